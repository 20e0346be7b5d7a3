#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "chq/builtins.hpp"
#include "chq/sampler.hpp"

using namespace chq;

namespace {

const Scenario& bs() {
  static const Scenario s = build_beamsplitter();
  return s;
}

std::uint64_t total(const SampleReport& r) { return std::accumulate(r.counts.begin(), r.counts.end(), std::uint64_t{0}); }

}  // namespace

TEST(Sampler, DeterministicForSameSeed) {
  const Family& f = bs().family("F2");
  const SampleReport a = sample(f, 20000, 42), b = sample(f, 20000, 42), c = sample(f, 20000, 43);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_NE(a.counts, c.counts);
  EXPECT_EQ(a.prng, b.prng);
}

TEST(Sampler, WorkerCountDoesNotChangeTheReport) {
  const Family& f = bs().family("F3");
  const SampleReport one = sample(f, 50001, 9, 1);
  for (unsigned w : {2u, 3u, 8u, 64u}) EXPECT_EQ(sample(f, 50001, 9, w).counts, one.counts) << w;
}

TEST(Sampler, CountsSumToRunsAndFrequenciesMatch) {
  for (std::uint64_t n : {1ull, 7ull, 4096ull, 4097ull, 10000ull}) {
    const SampleReport r = sample(bs().family("F2"), n, 5);
    EXPECT_EQ(total(r), n);
    EXPECT_EQ(r.n_runs, n);
    for (std::size_t i = 0; i < r.counts.size(); ++i)
      EXPECT_DOUBLE_EQ(r.frequencies[i], static_cast<double>(r.counts[i]) / static_cast<double>(n));
  }
  EXPECT_THROW(sample(bs().family("F2"), 0, 5), Error);
}

TEST(Sampler, ZeroWeightHistoriesNeverDrawn) {
  for (const char* name : {"F1", "F2", "F3", "F3fine"}) {
    const Family& f = bs().family(name);
    const SampleReport r = sample(f, 30000, 11, 4);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f.certificate().zero_weight[i]) {
        EXPECT_EQ(r.counts[i], 0u) << name << " " << r.histories[i];
      }
    }
  }
}

TEST(Sampler, CertainHistoryTakesEveryRun) {
  const Family& f1 = bs().family("F1");
  const SampleReport r = sample(f1, 10, 1);
  std::size_t finite = 0;
  for (std::size_t i = 0; i < f1.size(); ++i)
    if (!f1.certificate().zero_weight[i]) {
      ++finite;
      EXPECT_EQ(r.counts[i], 10u);
    }
  EXPECT_EQ(finite, 1u);
}

TEST(Sampler, FrequenciesWithinThreeSigma) {
  const std::uint64_t n = 100000;
  const SampleReport r = sample(bs().family("F2"), n, 1);
  for (std::size_t i = 0; i < r.counts.size(); ++i) {
    const double p = r.probabilities[i];
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
    EXPECT_LE(std::abs(r.frequencies[i] - p), 3 * sigma + 1e-15) << r.histories[i];
  }
}

TEST(Sampler, EmpiricalConditionalOfPathGivenDetector) {
  const Scenario& s = bs();
  const Family& f3 = s.family("F3");
  const SampleReport r = sample(f3, 40000, 3);
  const auto c = s.parse_event("c@t1"), d = s.parse_event("d@t1"), cstar = s.parse_event("Cstar@t2");
  EXPECT_EQ(empirical_conditional(f3, r, c, cstar), std::optional<double>(1.0));
  EXPECT_EQ(empirical_conditional(f3, r, d, cstar), std::optional<double>(0.0));
  EXPECT_FALSE(empirical_conditional(f3, r, s.parse_event("s@t1"), cstar).has_value());
  EXPECT_FALSE(empirical_conditional(f3, r, c, s.parse_event("Cstar@t2 AND Dstar@t2")).has_value());
}

TEST(Sampler, BlockSeedsDiffer) {
  EXPECT_NE(sampling::block_seed(1, 0), sampling::block_seed(1, 1));
  EXPECT_NE(sampling::block_seed(1, 0), sampling::block_seed(2, 0));
  EXPECT_NE(sampling::block_seed(0, 0), 0u);
}
