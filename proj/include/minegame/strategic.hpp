#ifndef MINEGAME_STRATEGIC_HPP
#define MINEGAME_STRATEGIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "minegame/game.hpp"
#include "minegame/immediate.hpp"

// Strategic-release solver.  Same level-indexed iteration as the immediate
// model, on the rectangular grid a <= a_max, with the extra release option
// (publish b+1 blocks, collect them, keep the remaining lead).  Mining is
// disallowed at a = a_max and b = d still forces capitulation.

namespace minegame {

struct StrategicSolveReport {
  GameParams params;
  double tol = 1e-12;
  long iterations = 0;
  double residual = 0.0;
  double g_star = 0.0;
  bool frontier_is_best_response = false;
  bool p_at_least_half = false;
  // |g* at a_max - g* at max(d+2, a_max/2)|; NaN when skipped
  double truncation_sensitivity = 0.0;
  std::vector<double> psi;  // StateGrid-indexed, psi(0,0) = 0
  Policy policy;

  double psi_at(GameState s) const {
    return psi[StateGrid::of(params).index(s)];
  }
};

namespace detail {

inline StrategicSolveReport solve_strategic_core(
    const GameParams& gp, double tol, long max_iters,
    const std::vector<double>* warm_start) {
  validate_params(gp);
  if (gp.model != Model::strategic)
    throw std::invalid_argument("solve_strategic expects the strategic model");
  const StateGrid grid = StateGrid::of(gp);
  const int n = grid.size();
  const int amax = grid.a_cap;
  const int i00 = grid.index({0, 0});
  const double p = gp.p, q = 1.0 - gp.p;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  std::vector<double> h(n, 0.0), cur(n, 0.0);
  if (warm_start && static_cast<int>(warm_start->size()) == n) {
    h = *warm_start;
    const double h00 = h[i00];
    for (double& v : h) v -= h00;
  }

  auto sweep = [&](Policy* pol, double& dmin, double& dmax) {
    double capbest = neg_inf;
    dmin = std::numeric_limits<double>::infinity();
    dmax = neg_inf;
    for (int b = 0; b <= gp.d; ++b) {
      const int off = grid.row_offset(b);
      for (int a = amax; a >= 0; --a) {
        const double cap = b >= 1 ? capbest : neg_inf;
        double mine = neg_inf, rel = neg_inf;
        if (b < gp.d) {
          if (a < amax)
            mine = p * cur[off + a + 1] + q * h[grid.row_offset(b + 1) + a];
          if (a >= b + 1) rel = h[a - b - 1] + b + 1;  // row 0 offset is 0
        }
        const double v = std::max({cap, mine, rel});
        if (pol) {
          Action& act = pol->actions[off + a];
          if (cap > neg_inf && cap >= v - detail::tie_eps) {
            int landing = 0;
            double best = neg_inf;
            for (int s = 0; s < b; ++s)
              best = std::max(best, cur[grid.row_offset(s)]);
            while (landing < b - 1 &&
                   cur[grid.row_offset(landing)] < best - detail::tie_eps)
              ++landing;
            act = capitulate_to(landing);
          } else if (rel > neg_inf && rel >= v - detail::tie_eps) {
            act = release_action();
          } else {
            act = mine_action();
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
        "strategic value iteration did not converge within max_iters; "
        "last residual " +
            std::to_string(residual),
        residual, max_iters);

  StrategicSolveReport rep;
  rep.params = gp;
  rep.tol = tol;
  rep.iterations = iter;
  rep.policy = Policy{gp, std::vector<Action>(n, mine_action())};
  double dmin, dmax;
  sweep(&rep.policy, dmin, dmax);
  rep.g_star = cur[i00] - h[i00];
  rep.residual = std::max(dmax - rep.g_star, rep.g_star - dmin);
  const double cur00 = cur[i00];
  rep.psi = cur;
  for (double& v : rep.psi) v -= cur00;
  rep.frontier_is_best_response = std::fabs(rep.g_star - gp.p) <= tol;
  rep.p_at_least_half = gp.p >= 0.5;
  rep.truncation_sensitivity = std::numeric_limits<double>::quiet_NaN();
  return rep;
}

}  // namespace detail

inline StrategicSolveReport solve_strategic(
    const GameParams& gp, double tol = 1e-12, long max_iters = 1000000,
    const std::vector<double>* warm_start = nullptr,
    bool with_sensitivity = true) {
  StrategicSolveReport rep =
      detail::solve_strategic_core(gp, tol, max_iters, warm_start);
  if (with_sensitivity) {
    GameParams half = gp;
    half.a_max = std::max(gp.d + 2, effective_a_max(gp) / 2);
    rep.truncation_sensitivity = std::fabs(
        rep.g_star -
        detail::solve_strategic_core(half, tol, max_iters, nullptr).g_star);
  }
  return rep;
}

// Affine coefficients of the candidate potential above the lead diagonal:
// sol(a,b) = a*lambda - b*mu - c there.  Defined for p < 1/2 only.
struct SolParams {
  double lambda = 0.0;
  double mu = 0.0;
  double c = 0.0;

  static SolParams for_p(double p) {
    if (!(p >= 0.0 && p < 0.5))
      throw std::invalid_argument("sol construction requires 0 <= p < 1/2");
    const double s = 1.0 - 2.0 * p;
    return {(1.0 - p) * (1.0 - p) / s, p * p / s, p * (1.0 - p) / s};
  }
};

// Candidate strategic potential: the immediate-model table below and on the
// lead diagonal, the affine extension strictly above it.
inline double sol_value(const SolveReport& immediate_report, GameState s) {
  if (s.a < 0 || s.b < 0) throw std::invalid_argument("negative state");
  if (s.a <= s.b + 1) return immediate_report.phi_at(s);
  const SolParams sp = SolParams::for_p(immediate_report.params.p);
  return s.a * sp.lambda - s.b * sp.mu - sp.c;
}

struct SolCheck {
  bool pass = true;
  GameState first_violation{-1, -1};
  double margin = 0.0;      // signed margin at the first violation
  std::string detail;       // which relation failed there
  long states_checked = 0;
  long violations = 0;
};

// Checks that sol satisfies the strategic one-level recurrence on the given
// ranges: equality with the mine/capitulate maximum below the lead diagonal,
// release dominance on it (which reduces to b(1-2p)^2 + 1-5p+6p^2-p^3 >= 0),
// and strict mine dominance above it.  Scan order is b ascending, a
// ascending, so first_violation is the lexicographically least offender.
inline SolCheck verify_sol_recurrence(const SolveReport& immediate_report,
                                      int a_hi, int b_hi, double tol = 1e-9) {
  const GameParams& gp = immediate_report.params;
  if (a_hi < 0 || b_hi < 0) throw std::invalid_argument("bad range");
  if (gp.d < b_hi + 2)
    throw std::invalid_argument(
        "potential table too shallow: need d >= b_hi + 2");
  const double p = gp.p, q = 1.0 - gp.p;
  const SolParams sp = SolParams::for_p(p);  // also enforces p < 1/2
  (void)sp;

  auto sol = [&](int a, int b) { return sol_value(immediate_report, {a, b}); };
  SolCheck out;
  auto flag = [&](int a, int b, double margin, const std::string& what) {
    ++out.violations;
    if (out.pass) {
      out.pass = false;
      out.first_violation = {a, b};
      out.margin = margin;
      out.detail = what;
    }
  };

  for (int b = 0; b <= b_hi; ++b) {
    double capv = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < b; ++s) capv = std::max(capv, sol(0, s));
    for (int a = 0; a <= a_hi; ++a) {
      ++out.states_checked;
      if (a == b + 1) {
        // release dominance on the diagonal, reduced polynomial form
        const double m = b * (1.0 - 2.0 * p) * (1.0 - 2.0 * p) +
                         (1.0 - 5.0 * p + 6.0 * p * p - p * p * p);
        if (m < -tol) flag(a, b, m, "release dominance polynomial");
        continue;
      }
      const double mine = p * sol(a + 1, b) + q * sol(a, b + 1) - p * q;
      if (a <= b) {
        const double rec = std::max(capv, mine);
        const double diff = sol(a, b) - rec;
        if (std::fabs(diff) > tol) flag(a, b, diff, "one-level recurrence equality");
      } else {  // a > b + 1
        const double diff = sol(a, b) - mine;
        if (std::fabs(diff) > tol) flag(a, b, diff, "mine equality above the diagonal");
        const double rel = sol(a - b - 1, 0) + b + 1 - p;
        if (mine < rel - tol) flag(a, b, mine - rel, "mine vs release dominance");
        if (b >= 1 && mine < capv - tol)
          flag(a, b, mine - capv, "mine vs capitulation dominance");
      }
    }
  }
  return out;
}

}  // namespace minegame

#endif  // MINEGAME_STRATEGIC_HPP
