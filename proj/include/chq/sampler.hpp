// Monte Carlo realization of a certified family: one elementary history per run.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "chq/frameworks.hpp"

namespace chq {

struct SampleReport {
  std::string family;
  std::uint64_t n_runs = 0;
  std::uint64_t seed = 0;
  std::string prng;
  std::vector<std::string> histories;
  std::vector<std::uint64_t> counts;
  std::vector<double> frequencies;
  std::vector<double> probabilities;  // analytic, weight / total weight
  double max_abs_dev = 0;
};

namespace sampling {

inline constexpr std::uint64_t kBlockSize = 4096;
inline constexpr const char* kPrngName = "mt19937_64; block seeds splitmix64(seed ^ 0x9E3779B97F4A7C15*(block+1)); 4096 runs/block";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t block_seed(std::uint64_t master, std::uint64_t block) {
  return splitmix64(master ^ (0x9E3779B97F4A7C15ull * (block + 1)));
}

// Uniform in [0, 1) from the top 53 bits.
inline double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline std::size_t draw(const std::vector<double>& cumulative, std::size_t last_positive, double u) {
  const double target = u * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) return last_positive;
  return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace sampling

/// Draws n elementary histories with probability weight / total weight.
/// Runs are cut into fixed blocks with seeds derived from `seed`, so the
/// report does not depend on `workers`.
inline SampleReport sample(const Family& f, std::uint64_t n, std::uint64_t seed, unsigned workers = 1) {
  if (n < 1) throw Error(Errc::InvalidArgument, "sample needs n >= 1");
  const auto& w = f.weights();
  const double eps = f.tolerances().eps;
  std::vector<double> cumulative(w.size());
  double acc = 0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > eps) {
      acc += w[i];
      last_positive = i;
    }
    cumulative[i] = acc;
  }

  const std::uint64_t blocks = (n + sampling::kBlockSize - 1) / sampling::kBlockSize;
  std::vector<std::vector<std::uint64_t>> block_counts(blocks, std::vector<std::uint64_t>(w.size(), 0));
  auto run_block = [&](std::uint64_t b) {
    std::mt19937_64 gen(sampling::block_seed(seed, b));
    const std::uint64_t begin = b * sampling::kBlockSize;
    const std::uint64_t end = std::min(n, begin + sampling::kBlockSize);
    for (std::uint64_t r = begin; r < end; ++r)
      ++block_counts[b][sampling::draw(cumulative, last_positive, sampling::unit(gen))];
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(blocks)));
  if (workers == 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < workers; ++k)
      pool.emplace_back([&, k] {
        for (std::uint64_t b = k; b < blocks; b += workers) run_block(b);
      });
    for (auto& t : pool) t.join();
  }

  SampleReport rep;
  rep.family = f.name();
  rep.n_runs = n;
  rep.seed = seed;
  rep.prng = sampling::kPrngName;
  rep.histories = f.certificate().histories;
  rep.counts.assign(w.size(), 0);
  for (const auto& bc : block_counts)
    for (std::size_t i = 0; i < w.size(); ++i) rep.counts[i] += bc[i];
  const double total = f.total_weight();
  for (std::size_t i = 0; i < w.size(); ++i) {
    rep.frequencies.push_back(static_cast<double>(rep.counts[i]) / static_cast<double>(n));
    rep.probabilities.push_back(w[i] > eps ? w[i] / total : 0.0);
    rep.max_abs_dev = std::max(rep.max_abs_dev, std::abs(rep.frequencies[i] - rep.probabilities[i]));
  }
  return rep;
}

/// Fraction of runs satisfying `data` that also satisfy `target`; nullopt if
/// either is outside the family's algebra or no run satisfied `data`.
inline std::optional<double> empirical_conditional(const Family& f, const SampleReport& rep, const EventExpr& target,
                                                   const EventExpr& data) {
  auto t = f.evaluate(target);
  auto d = f.evaluate(data);
  if (!t || !d) return std::nullopt;
  std::uint64_t hits = 0, total = 0;
  for (std::size_t i = 0; i < rep.counts.size(); ++i) {
    if (!(*d)[i]) continue;
    total += rep.counts[i];
    if ((*t)[i]) hits += rep.counts[i];
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace chq
