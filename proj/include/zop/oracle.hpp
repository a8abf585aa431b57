#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>

#include "zop/errors.hpp"
#include "zop/params.hpp"

namespace zop {

// Black-box scalar objective. The optimizer sees nothing but evaluate();
// query_count() audits exactly one increment per call. Bookkeeping
// evaluations (loss logging for plots) go through a separate counter so a
// query-budget comparison is not polluted by measurement.
class LossOracle {
 public:
  virtual ~LossOracle() = default;

  double evaluate(std::span<const double> phi) {
    check_dim(phi);
    ++query_count_;
    return loss(phi);
  }

  double evaluate_bookkeeping(std::span<const double> phi) {
    check_dim(phi);
    ++bookkeeping_count_;
    return loss_for_logging(phi);
  }

  std::uint64_t query_count() const { return query_count_; }
  std::uint64_t bookkeeping_count() const { return bookkeeping_count_; }
  virtual std::size_t dimension() const = 0;

 protected:
  virtual double loss(std::span<const double> phi) = 0;
  // Noisy wrappers override this to report the underlying clean loss.
  virtual double loss_for_logging(std::span<const double> phi) {
    return loss(phi);
  }

 private:
  void check_dim(std::span<const double> phi) const {
    if (phi.size() != dimension())
      throw ConfigError("oracle: parameter dimension mismatch");
  }

  std::uint64_t query_count_ = 0;
  std::uint64_t bookkeeping_count_ = 0;
};

// Adapter for plain callables (benchmarks, tests).
class FunctionOracle final : public LossOracle {
 public:
  FunctionOracle(std::size_t dimension,
                 std::function<double(std::span<const double>)> fn)
      : dim_(dimension), fn_(std::move(fn)) {}

  std::size_t dimension() const override { return dim_; }

 protected:
  double loss(std::span<const double> phi) override { return fn_(phi); }

 private:
  std::size_t dim_;
  std::function<double(std::span<const double>)> fn_;
};

}  // namespace zop
