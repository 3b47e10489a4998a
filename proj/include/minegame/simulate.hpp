#ifndef MINEGAME_SIMULATE_HPP
#define MINEGAME_SIMULATE_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "minegame/game.hpp"

// Monte Carlo runner.  Each trial owns an independent RNG stream derived
// from (seed, trial index), so results do not depend on scheduling and a
// fixed seed reproduces the report bit for bit.

namespace minegame {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t x = seed ^ (0xD1B54A32D192ED03ull * (trial + 1));
  (void)splitmix64(x);
  return std::mt19937_64(splitmix64(x));
}

// uniform in [0,1) from the top 53 bits; avoids distribution objects, whose
// output is not pinned down by the standard
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

struct SimConfig {
  Policy policy;  // carries the game parameters
  long target_levels = 10000;
  int trials = 1;
  std::uint64_t seed = 1;
  std::string policy_label;  // echoed into the report
};

struct TrialStats {
  long levels = 0;
  long miner1_paid = 0;
  long miner2_paid = 0;
  long phases = 0;  // mining draws
  double gain = 0.0;
};

struct SimReport {
  GameParams params;
  std::string policy_label;
  long target_levels = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  double empirical_gain = 0.0;
  double std_error = 0.0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  long phases_run = 0;
  std::vector<double> per_trial;
  // races still open at cutoff resolve by forced capitulation; their levels
  // count toward the denominator
  std::string cutoff_rule = "forced-capitulation";
};

namespace detail {

inline TrialStats run_trial(const Policy& pol, long target,
                            std::mt19937_64 rng) {
  const GameParams& gp = pol.params;
  GameState s{0, 0};
  TrialStats t;
  auto apply = [&](const Transition& tr) {
    t.levels += tr.levels_advanced;
    t.miner1_paid += tr.miner1_paid;
    t.miner2_paid += tr.miner2_paid;
    s = tr.next;
  };
  while (t.levels < target) {
    const Action act = pol.at(s);
    if (act.kind != ActionKind::mine) {
      apply(step(gp, s, act));  // capitulation / release chains draw nothing
      continue;
    }
    ++t.phases;
    const Winner w =
        uniform01(rng) < gp.p ? Winner::miner1 : Winner::miner2;
    apply(step(gp, s, act, w));
  }
  if (!(s == GameState{0, 0})) {
    // cutoff with a race open: the withholding miner concedes
    t.miner2_paid += s.b;
    s = {0, 0};
  }
  if (t.miner1_paid + t.miner2_paid != t.levels)
    throw std::logic_error("payment conservation violated in simulation");
  t.gain = static_cast<double>(t.miner1_paid) / static_cast<double>(t.levels);
  return t;
}

}  // namespace detail

inline SimReport simulate(const SimConfig& cfg) {
  validate_policy(cfg.policy);
  if (cfg.target_levels < 10000)
    throw std::invalid_argument("target_levels must be at least 10^4");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be at least 1");

  SimReport rep;
  rep.params = cfg.policy.params;
  rep.policy_label = cfg.policy_label;
  rep.target_levels = cfg.target_levels;
  rep.trials = cfg.trials;
  rep.seed = cfg.seed;
  rep.per_trial.reserve(cfg.trials);

  std::vector<TrialStats> stats;
  stats.reserve(cfg.trials);
  for (int i = 0; i < cfg.trials; ++i)
    stats.push_back(detail::run_trial(cfg.policy, cfg.target_levels,
                                      detail::trial_stream(cfg.seed, i)));

  double mean = 0.0;
  for (const TrialStats& t : stats) {
    rep.per_trial.push_back(t.gain);
    rep.phases_run += t.phases;
    mean += t.gain;
  }
  mean /= cfg.trials;
  double var = 0.0;
  if (cfg.trials > 1) {
    for (const TrialStats& t : stats)
      var += (t.gain - mean) * (t.gain - mean);
    var /= (cfg.trials - 1);
  }
  rep.empirical_gain = mean;
  rep.std_error = cfg.trials > 1 ? std::sqrt(var / cfg.trials) : 0.0;
  rep.ci95_lo = mean - 1.96 * rep.std_error;
  rep.ci95_hi = mean + 1.96 * rep.std_error;
  return rep;
}

// Named reference policies.  "frontier" is honest play; "deviator-d3" is the
// depth-3 withholding strategy (mine on {(0,0),(0,1),(1,1),(1,2),(2,2)},
// land at (0,1), concede whenever b >= 3).
inline Policy load_builtin(const std::string& name, const GameParams& gp) {
  if (name == "frontier") return frontier_policy(gp);
  if (name == "deviator-d3")
    return expand(CompactPolicy{{{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}}, 1}, gp);
  throw std::invalid_argument("unknown builtin policy: " + name);
}

}  // namespace minegame

#endif  // MINEGAME_SIMULATE_HPP
