#include <doctest.h>

#include <cmath>
#include <vector>

#include "zop/oracle.hpp"
#include "zop/rng.hpp"
#include "zop/sampler.hpp"
#include "zop/schedule.hpp"

using namespace zop;

TEST_CASE("rng streams are reproducible and substreams are independent") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng base(7);
  Rng s1 = base.substream("noise");
  Rng s2 = base.substream("perturbation");
  CHECK(s1.next_u64() != s2.next_u64());

  // substreams derive from the construction seed, not from consumption
  Rng c(7);
  c.next_u64();
  c.next_u64();
  Rng s1_again = c.substream("noise");
  Rng s1_fresh = Rng(7).substream("noise");
  CHECK(s1_again.next_u64() == s1_fresh.next_u64());
}

TEST_CASE("rng uniform and gaussian have sane moments") {
  Rng rng(123);
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sumsq / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));

  double gsum = 0.0, gsumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    gsum += g;
    gsumsq += g * g;
  }
  CHECK(gsum / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(gsumsq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("rademacher sampler stays on the support and is mean-zero") {
  RandomPerturbationSampler s(Perturbation::rademacher, 3, Rng(11));
  std::vector<double> d(3);
  double mean = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    s.sample(d);
    for (double x : d) {
      CHECK((x == 1.0 || x == -1.0));
      mean += x;
    }
  }
  mean /= double(n) * 3.0;
  CHECK(std::abs(mean) < 0.05);
}

TEST_CASE("segmented uniform support excludes (-0.5, 0.5)") {
  RandomPerturbationSampler s(Perturbation::segmented_uniform, 1000, Rng(5));
  std::vector<double> d(1000);
  s.sample(d);
  double mean = 0.0, max_recip = 0.0;
  for (double x : d) {
    CHECK(std::abs(x) >= 0.5);
    CHECK(std::abs(x) <= 1.0);
    mean += x;
    max_recip = std::max(max_recip, std::abs(1.0 / x));
  }
  CHECK(std::abs(mean / 1000.0) < 0.05);
  CHECK(max_recip <= 2.0);
}

TEST_CASE("identically constructed samplers emit identical sequences") {
  for (Perturbation kind : {Perturbation::rademacher,
                            Perturbation::segmented_uniform,
                            Perturbation::gaussian}) {
    RandomPerturbationSampler s1(kind, 17, Rng(99));
    RandomPerturbationSampler s2(kind, 17, Rng(99));
    std::vector<double> d1(17), d2(17);
    for (int i = 0; i < 20; ++i) {
      s1.sample(d1);
      s2.sample(d2);
      CHECK(d1 == d2);
    }
  }
}

TEST_CASE("exhaustive rademacher covers every sign pattern once per cycle") {
  ExhaustiveRademacherSampler s(3);
  std::vector<double> d(3);
  std::vector<int> seen(8, 0);
  for (int i = 0; i < 8; ++i) {
    s.sample(d);
    int code = 0;
    for (int j = 0; j < 3; ++j)
      if (d[j] > 0) code |= 1 << j;
    seen[code]++;
  }
  for (int c : seen) CHECK(c == 1);
}

TEST_CASE("gain schedule evaluates the power law") {
  GainSchedule s{.a1 = 1.0, .c1 = 0.01, .alpha = 0.6, .gamma = 0.1,
                 .stability_offset = 0.0};
  s.validate();
  CHECK(gain_at(s, 1).a == doctest::Approx(1.0));
  CHECK(gain_at(s, 1).c == doctest::Approx(0.01));

  GainSchedule half{.a1 = 1.0, .c1 = 0.01, .alpha = 0.5, .gamma = 0.1,
                    .stability_offset = 0.0};
  CHECK(gain_at(half, 4).a == doctest::Approx(0.5));  // 1/4^0.5

  // strictly decreasing and inside (0, c1]
  double prev_a = 1e300, prev_c = 1e300;
  for (std::uint64_t i = 1; i <= 200; ++i) {
    const GainPair g = gain_at(s, i);
    CHECK(g.a > 0.0);
    CHECK(g.c > 0.0);
    CHECK(g.c <= s.c1);
    CHECK(g.a < prev_a);
    CHECK(g.c < prev_c);
    prev_a = g.a;
    prev_c = g.c;
  }
}

TEST_CASE("gain schedule rejects bad parameters") {
  GainSchedule s;
  s.a1 = -1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = GainSchedule{};
  s.c1 = 1.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = GainSchedule{};
  s.gamma = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("oracle counts exactly one query per evaluation") {
  FunctionOracle oracle(2, [](std::span<const double> x) {
    return x[0] * x[0] + x[1];
  });
  ParameterVector p{1.0, 2.0};
  CHECK(oracle.query_count() == 0);
  for (int i = 1; i <= 5; ++i) {
    oracle.evaluate(p);
    CHECK(oracle.query_count() == std::uint64_t(i));
  }
  oracle.evaluate_bookkeeping(p);
  CHECK(oracle.query_count() == 5);
  CHECK(oracle.bookkeeping_count() == 1);

  ParameterVector wrong{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(oracle.evaluate(wrong), ConfigError);
}
