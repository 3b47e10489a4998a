#ifndef MINEGAME_IMMEDIATE_HPP
#define MINEGAME_IMMEDIATE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "minegame/game.hpp"
#include "minegame/linalg.hpp"

// Immediate-release solver.  Level-indexed value iteration: one operator
// application advances the honest frontier by exactly one level, so the
// per-level gain g* is bracketed by the min/max one-sweep increment (span
// bound) and the shifted table converges to the potential phi, phi(0,0) = 0.

namespace minegame {

struct ConvergenceError : std::runtime_error {
  double last_residual;
  long iterations;
  ConvergenceError(const std::string& what, double r, long it)
      : std::runtime_error(what), last_residual(r), iterations(it) {}
};

struct SolveReport {
  GameParams params;
  double tol = 1e-12;
  long iterations = 0;
  double residual = 0.0;  // max-norm potential change at the final sweep
  double g_star = 0.0;
  bool frontier_is_best_response = false;
  bool p_at_least_half = false;
  std::vector<double> phi;  // StateGrid-indexed, phi(0,0) = 0
  Policy policy;

  double phi_at(GameState s) const {
    return phi[StateGrid::of(params).index(s)];
  }
};

namespace detail {

// Value ties are broken toward capitulation (then the smallest landing)
// once the difference is inside the solver's accuracy.
inline constexpr double tie_eps = 1e-9;

}  // namespace detail

inline SolveReport solve(const GameParams& gp, double tol = 1e-12,
                         long max_iters = 1000000,
                         const std::vector<double>* warm_start = nullptr) {
  validate_params(gp);
  if (gp.model != Model::immediate)
    throw std::invalid_argument("solve expects the immediate model");
  const StateGrid grid = StateGrid::of(gp);
  const int n = grid.size();
  const int i00 = grid.index({0, 0});
  const double p = gp.p, q = 1.0 - gp.p;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  std::vector<double> h(n, 0.0), cur(n, 0.0);
  if (warm_start && static_cast<int>(warm_start->size()) == n) {
    h = *warm_start;
    const double h00 = h[i00];
    for (double& v : h) v -= h00;
  }

  // One application of the level operator; returns the increment extrema.
  // When pol != nullptr the sweep also records the greedy action table.
  auto sweep = [&](Policy* pol, double& dmin, double& dmax) {
    double capbest = neg_inf;  // max over cur(0,s), s < current b
    dmin = std::numeric_limits<double>::infinity();
    dmax = neg_inf;
    for (int b = 0; b <= gp.d; ++b) {
      const int off = grid.row_offset(b);
      for (int a = b + 1; a >= 0; --a) {
        double v;
        if (a == b + 1) {
          v = h[i00] + a;  // lead published, race restarts
        } else {
          const double cap = b >= 1 ? capbest : neg_inf;
          const double mine =
              b < gp.d ? p * cur[off + a + 1] + q * h[grid.row_offset(b + 1) + a]
                       : neg_inf;
          v = std::max(cap, mine);
          if (pol) {
            Action& act = pol->actions[off + a];
            if (b >= 1 && cap >= mine - detail::tie_eps) {
              int landing = 0;
              double best = neg_inf;
              for (int s = 0; s < b; ++s)
                best = std::max(best, cur[grid.row_offset(s)]);
              while (landing < b - 1 &&
                     cur[grid.row_offset(landing)] < best - detail::tie_eps)
                ++landing;
              act = capitulate_to(landing);
            } else {
              act = mine_action();
            }
          }
        }
        cur[off + a] = v;
        const double delta = v - h[off + a];
        dmin = std::min(dmin, delta);
        dmax = std::max(dmax, delta);
      }
      capbest = std::max(capbest, cur[off]);
    }
  };

  double g_est = 0.0, g_prev = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::infinity();
  long iter = 0;
  bool converged = false;
  for (iter = 1; iter <= max_iters; ++iter) {
    double dmin, dmax;
    sweep(nullptr, dmin, dmax);
    g_est = cur[i00] - h[i00];
    residual = std::max(dmax - g_est, g_est - dmin);
    const bool span_ok = dmax - dmin <= tol;
    const bool drift_ok = iter >= 2 && std::fabs(g_est - g_prev) <= tol;
    const double cur00 = cur[i00];
    for (int i = 0; i < n; ++i) h[i] = cur[i] - cur00;
    g_prev = g_est;
    if (span_ok && drift_ok) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw ConvergenceError(
        "value iteration did not converge within max_iters; last residual " +
            std::to_string(residual),
        residual, max_iters);

  SolveReport rep;
  rep.params = gp;
  rep.tol = tol;
  rep.iterations = iter;
  rep.policy = Policy{gp, std::vector<Action>(n, mine_action())};

  // Final pass re-applies the operator with action bookkeeping.
  double dmin, dmax;
  sweep(&rep.policy, dmin, dmax);
  rep.g_star = cur[i00] - h[i00];
  rep.residual = std::max(dmax - rep.g_star, rep.g_star - dmin);
  const double cur00 = cur[i00];
  rep.phi = cur;
  for (double& v : rep.phi) v -= cur00;
  rep.frontier_is_best_response = std::fabs(rep.g_star - gp.p) <= tol;
  rep.p_at_least_half = gp.p >= 0.5;
  return rep;
}

struct PolicyEvaluation {
  double gain = 0.0;
  double payment_per_excursion = 0.0;  // expected miner-1 blocks, (0,0) renewal
  double levels_per_excursion = 0.0;
};

// Exact average gain of a fixed policy by renewal-reward at (0,0): solve the
// excursion system for expected payment and expected levels until the chain
// re-enters (0,0), over the states reachable from (0,0).
inline PolicyEvaluation evaluate_policy(const Policy& pol) {
  validate_policy(pol);
  if (pol.params.model != Model::immediate)
    throw std::invalid_argument("evaluate_policy expects the immediate model");
  const GameParams& gp = pol.params;
  const StateGrid grid = StateGrid::of(gp);
  const double p = gp.p, q = 1.0 - gp.p;

  std::vector<int> slot(grid.size(), -1);
  std::vector<GameState> states;
  std::vector<GameState> queue{{0, 0}};
  slot[grid.index({0, 0})] = 0;
  states.push_back({0, 0});
  // Edges: (from_slot, to_slot, probability); re-entry into (0,0) absorbs.
  struct Edge {
    int from, to;
    double pr;
  };
  std::vector<Edge> edges;
  std::vector<double> pay, lev;  // one-step expected rewards per slot

  auto discover = [&](GameState s) {
    const int gi = grid.index(s);
    if (slot[gi] < 0) {
      slot[gi] = static_cast<int>(states.size());
      states.push_back(s);
      queue.push_back(s);
    }
    return slot[gi];
  };

  for (size_t head = 0; head < queue.size(); ++head) {
    const GameState s = queue[head];
    const int me = slot[grid.index(s)];
    if (static_cast<int>(pay.size()) <= me) {
      pay.resize(me + 1, 0.0);
      lev.resize(me + 1, 0.0);
    }
    const Action act = pol.at(s);
    if (act.kind == ActionKind::mine) {
      if (p > 0.0) {
        if (s.a + 1 == s.b + 1) {
          pay[me] += p * (s.a + 1);  // race won, branch adopted
          lev[me] += p;
        } else {
          edges.push_back({me, discover({s.a + 1, s.b}), p});
        }
      }
      if (q > 0.0) {
        lev[me] += q;
        edges.push_back({me, discover({s.a, s.b + 1}), q});
      }
    } else {  // capitulate; release cannot appear in the immediate model
      if (act.landing != 0) edges.push_back({me, discover({0, act.landing}), 1.0});
      // landing at (0,0) is the renewal point: absorb with no reward
    }
  }

  const int N = static_cast<int>(states.size());
  std::vector<double> A(static_cast<size_t>(N) * N, 0.0);
  for (int i = 0; i < N; ++i) A[static_cast<size_t>(i) * N + i] = 1.0;
  for (const Edge& e : edges)
    if (e.to != 0) A[static_cast<size_t>(e.from) * N + e.to] -= e.pr;
  std::vector<double> rhs(2 * static_cast<size_t>(N));
  for (int i = 0; i < N; ++i) {
    rhs[i] = pay[i];
    rhs[N + i] = lev[i];
  }
  if (!solve_dense(A, rhs, N, 2))
    throw std::runtime_error(
        "policy evaluation failed: (0,0) is not recurrent under this policy");
  PolicyEvaluation ev;
  ev.payment_per_excursion = rhs[0];
  ev.levels_per_excursion = rhs[N];
  if (!(ev.levels_per_excursion > 0.0) || !std::isfinite(ev.levels_per_excursion))
    throw std::runtime_error(
        "policy evaluation failed: excursion level count is degenerate");
  ev.gain = ev.payment_per_excursion / ev.levels_per_excursion;
  return ev;
}

// Probability that the race started at each state reaches a published lead
// before the policy capitulates.  Pure reverse sweep: mining only moves to
// larger a or larger b.
inline std::vector<double> winning_probability(const Policy& pol) {
  validate_policy(pol);
  if (pol.params.model != Model::immediate)
    throw std::invalid_argument("winning_probability expects the immediate model");
  const GameParams& gp = pol.params;
  const StateGrid grid = StateGrid::of(gp);
  std::vector<double> r(grid.size(), 0.0);
  for (int b = gp.d; b >= 0; --b) {
    for (int a = grid.max_a(b); a >= 0; --a) {
      const int i = grid.row_offset(b) + a;
      if (a == b + 1) {
        r[i] = 1.0;
      } else if (pol.actions[i].kind == ActionKind::mine) {
        r[i] = gp.p * r[grid.row_offset(b) + a + 1] +
               (1.0 - gp.p) * r[grid.row_offset(b + 1) + a];
      } else {
        r[i] = 0.0;
      }
    }
  }
  return r;
}

// Honest play is a best response exactly when the potential gap at (0,1)
// closes: phi(0,1) - phi(0,0) = (g* - p) / (1 - p).  Returns the gap and
// rejects a table that violates the identity.
inline double check_frontier_condition(const SolveReport& rep,
                                       double tol = 1e-9) {
  const double gap = rep.phi_at({0, 1}) - rep.phi_at({0, 0});
  const double predicted = (rep.g_star - rep.params.p) / (1.0 - rep.params.p);
  if (std::fabs(gap - predicted) > tol)
    throw std::runtime_error("frontier gap identity violated: gap " +
                             std::to_string(gap) + " vs predicted " +
                             std::to_string(predicted));
  return gap;
}

}  // namespace minegame

#endif  // MINEGAME_IMMEDIATE_HPP
