#pragma once

#include <cstdint>
#include <vector>

#include "zop/datasets.hpp"
#include "zop/optimizers.hpp"
#include "zop/prompt.hpp"
#include "zop/surrogate.hpp"

namespace zop {

// Mean cross-entropy of the surrogate on prompted images, exposed to the
// optimizer as a black-box loss over the generator's flat parameters. The
// surrogate contributes logits only. Bookkeeping evaluations always cover
// the full split; optimization evaluations cover the current minibatch.
class PromptedClassificationOracle final : public LossOracle {
 public:
  PromptedClassificationOracle(const PromptGenerator& generator,
                               const SurrogateModel& surrogate,
                               const SyntheticDataset& data);

  void set_batch(std::vector<std::size_t> indices);
  std::size_t dimension() const override;

 protected:
  double loss(std::span<const double> params) override;
  double loss_for_logging(std::span<const double> params) override;

 private:
  double mean_loss(std::span<const double> params,
                   const std::vector<std::size_t>& indices);

  const PromptGenerator& generator_;
  const SurrogateModel& surrogate_;
  const SyntheticDataset& data_;
  std::vector<std::vector<float>> features_;  // frozen, cached per image
  std::vector<std::size_t> batch_;
  std::vector<std::size_t> all_;
  DecoderWeights weights_;
  PromptGenerator::Workspace ws_;
  std::vector<float> pixel_rows_, logits_, scratch_;
};

struct AdaptConfig {
  OptimizerKind optimizer = OptimizerKind::spsa_gc;
  GainSchedule schedule;
  double beta = 0.9;
  int repeats = 5;
  Perturbation distribution = Perturbation::segmented_uniform;
  double sigma = 0.5;
  std::uint64_t iterations = 1000;
  std::uint64_t batch_size = 64;
  GeneratorConfig generator;
  std::uint64_t seed = 1;
  std::uint64_t log_interval = 50;
};

struct AdaptReport {
  RunStatus status = RunStatus::ok;
  std::vector<TrajectoryPoint> trajectory;  // full-split train loss
  double initial_train_loss = 0.0;
  double final_train_loss = 0.0;
  double zero_shot_accuracy = 0.0;  // frozen surrogate, no prompt
  double final_accuracy = 0.0;      // prompted with the adapted generator
  std::uint64_t optimization_queries = 0;
  std::uint64_t bookkeeping_queries = 0;
  std::size_t param_count = 0;
  ParameterVector final_params;
};

double prompted_accuracy(const PromptGenerator& generator,
                         std::span<const double> params,
                         const SurrogateModel& surrogate,
                         const SyntheticDataset& data, double epsilon);

AdaptReport run_adaptation(const SyntheticDataset& train,
                           const SyntheticDataset& test,
                           const SurrogateModel& surrogate,
                           const AdaptConfig& cfg);

// generator checkpoint = <prefix>.f32 + <prefix>.json
void save_generator_params(const PromptGenerator& generator,
                           std::span<const double> params,
                           std::uint64_t seed, const std::string& prefix);
ParameterVector load_generator_params(const PromptGenerator& generator,
                                      const std::string& prefix);

}  // namespace zop
