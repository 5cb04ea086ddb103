#ifndef TRACEDYN_SAMPLER_HPP
#define TRACEDYN_SAMPLER_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "tracedyn/errors.hpp"
#include "tracedyn/trace.hpp"
#include "tracedyn/valuation.hpp"

namespace tracedyn {

// splitmix64: small, seedable, identical across platforms.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // index into a cumulative draw over (index, weight) pairs
  template <typename Pair>
  std::size_t pick(const std::vector<Pair>& weighted) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < weighted.size(); ++i) {
      acc += weighted[i].second;
      if (u < acc) return i;
    }
    return weighted.size() - 1;  // guard against rounding at the tail
  }
};

struct SampleRun {
  std::uint64_t seed = 0;
  int start_state = 0;
  std::vector<std::pair<int, int>> steps;  // (state before, clique index drawn)
  Trace prefix;
};

// Draw the first n Cartier-Foata cliques of the Markov measure started at
// start_state: C_1 from h restricted to nonempty cliques, then chain rows.
inline SampleRun sample_prefix(const ChainSpec& chain, int start_state, int n,
                               std::uint64_t seed) {
  SampleRun run{seed, start_state, {}, {}};
  if (n == 0) return run;
  Rng rng(seed);
  const Monoid& m = chain.monoid();

  std::vector<std::pair<int, double>> first;
  for (int j = 1; j < m.clique_count(); ++j) {
    const double p = chain.h[static_cast<std::size_t>(start_state)][static_cast<std::size_t>(j)];
    if (p > 0.0) first.emplace_back(j, p);
  }
  if (first.empty())
    throw DomainError("DeadRow", "no clique is charged at state " +
                                     chain.action.states[static_cast<std::size_t>(start_state)]);
  int state = start_state;
  int cidx = first[rng.pick(first)].first;
  run.steps.emplace_back(state, cidx);
  run.prefix.cliques.push_back(m.cliques()[static_cast<std::size_t>(cidx)]);

  for (int i = 2; i <= n; ++i) {
    const auto row = chain.row(state, cidx);
    if (row.empty())
      throw DomainError("DeadRow", "chain row is zero at (" +
                                       chain.action.states[static_cast<std::size_t>(state)] + ", " +
                                       m.clique_name(m.cliques()[static_cast<std::size_t>(cidx)]) +
                                       ")");
    const auto& [node, p] = row[rng.pick(row)];
    (void)p;
    state = row[0].first.first;  // all entries of a row share the target state
    cidx = node.second;
    run.steps.emplace_back(state, cidx);
    run.prefix.cliques.push_back(m.cliques()[static_cast<std::size_t>(cidx)]);
  }
  return run;
}

struct Estimate {
  double value = 0.0;
  long long n_samples = 0;
  double std_error = 0.0;
};

namespace detail {

// Monte-Carlo mean of a 0/1 statistic of the height-n prefix. Workers get
// consecutive seeds and fixed shares, so the total is independent of the
// worker count and of scheduling.
template <typename Predicate>
Estimate estimate_indicator(const ChainSpec& chain, int start_state, int n, long long n_samples,
                            std::uint64_t seed, int workers, Predicate&& pred) {
  Estimate est;
  est.n_samples = n_samples;
  if (n_samples <= 0) return est;
  if (workers < 1) workers = 1;
  if (static_cast<long long>(workers) > n_samples) workers = static_cast<int>(n_samples);

  std::vector<long long> hits(static_cast<std::size_t>(workers), 0);
  std::vector<std::thread> pool;
  const long long share = n_samples / workers;
  const long long extra = n_samples % workers;
  std::uint64_t chunk_seed = seed;
  long long done = 0;
  for (int w = 0; w < workers; ++w) {
    const long long count = share + (w < extra ? 1 : 0);
    const std::uint64_t s0 = chunk_seed;
    pool.emplace_back([&, w, count, s0]() {
      long long local = 0;
      for (long long i = 0; i < count; ++i) {
        const SampleRun run = sample_prefix(chain, start_state, n, s0 + static_cast<std::uint64_t>(i));
        if (pred(run.prefix)) ++local;
      }
      hits[static_cast<std::size_t>(w)] = local;
    });
    chunk_seed += static_cast<std::uint64_t>(count);
    done += count;
  }
  for (auto& t : pool) t.join();
  (void)done;
  long long total = 0;
  for (long long v : hits) total += v;
  est.value = static_cast<double>(total) / static_cast<double>(n_samples);
  est.std_error = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(n_samples));
  return est;
}

}  // namespace detail

// Estimates P_alpha(x <= Y) by testing x against the height-tau(x) prefix.
inline Estimate estimate_cylinder(const ChainSpec& chain, int start_state, const Trace& x,
                                  long long n_samples, std::uint64_t seed, int workers = 1) {
  if (x.is_unit()) return Estimate{1.0, n_samples, 0.0};
  const Monoid& m = chain.monoid();
  return detail::estimate_indicator(chain, start_state, x.height(), n_samples, seed, workers,
                                    [&](const Trace& y) { return trace_leq(m, x, y); });
}

// Estimates P_alpha(Y_n = x) for n = tau(x).
inline Estimate estimate_prefix(const ChainSpec& chain, int start_state, const Trace& x,
                                long long n_samples, std::uint64_t seed, int workers = 1) {
  if (x.is_unit()) return Estimate{1.0, n_samples, 0.0};
  return detail::estimate_indicator(chain, start_state, x.height(), n_samples, seed, workers,
                                    [&](const Trace& y) { return y == x; });
}

}  // namespace tracedyn

#endif
