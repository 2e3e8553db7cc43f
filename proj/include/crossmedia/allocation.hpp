#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "crossmedia/channel.hpp"
#include "crossmedia/config.hpp"
#include "crossmedia/linkmodel.hpp"
#include "crossmedia/phase_solver.hpp"

namespace crossmedia {

/// Frame-normalized downlink slot lengths. TDMA allocations satisfy
/// t1 + t2 = 1 with both slots nonzero; the AP-based benchmark fixes both
/// slots to the full frame instead.
struct Allocation {
  double t1 = 0.5;
  double t2 = 0.5;
};

/// min over the four slot-weighted link values; with capacities this is the
/// objective of the unconstrained problem, with rates the delay-constrained
/// one. Uplink of device i counts against the partner's downlink slot.
inline double end_to_end_objective(const LinkValues& v, const Allocation& a) {
  return std::min(std::min(v[kUplinkD1] * a.t2, v[kUplinkD2] * a.t1),
                  std::min(v[kDownlinkD1] * a.t1, v[kDownlinkD2] * a.t2));
}

/// One-dimensional search grid T1 = k/k_max for k = 1..k_max-1; the
/// endpoints are excluded so both slots stay nonzero.
inline std::vector<Allocation> time_grid(int k_max) {
  if (k_max < 2) throw std::invalid_argument("k_max must be >= 2");
  std::vector<Allocation> grid;
  grid.reserve(k_max - 1);
  const double dt = 1.0 / k_max;
  for (int k = 1; k < k_max; ++k) grid.push_back({k * dt, 1.0 - k * dt});
  return grid;
}

/// Rate assignment of the problem without delay constraints: each direction
/// runs at the smaller of its uplink and partner-downlink capacities.
inline LinkValues p1_rate_assignment(const LinkValues& caps) {
  LinkValues r{};
  r[kUplinkD1] = r[kDownlinkD2] = std::min(caps[kUplinkD1], caps[kDownlinkD2]);
  r[kUplinkD2] = r[kDownlinkD1] = std::min(caps[kUplinkD2], caps[kDownlinkD1]);
  return r;
}

struct RateLpResult {
  LinkValues rates{};
  double objective = 0.0;
};

namespace detail {

/// Nudges r down until r * ti <= bound holds in floating point. The analytic
/// solution satisfies it with equality, so at most a few ulps are shaved.
inline double enforce_delay(double r, double ti, double bound) {
  while (r > 0.0 && r * ti > bound) r = std::nextafter(r, 0.0);
  return r;
}

}  // namespace detail

/// Maximizes t subject to the four slot-weighted rates reaching t,
/// 0 <= R <= C, and the delay constraints R_i^U T_i <= R_j^D T_j.
/// Solved by bisection on t: at level t each rate only needs to reach its
/// floor while the partner downlink sits at capacity, which turns
/// feasibility into six closed-form bounds. The returned rates put the
/// downlinks at capacity and cap each uplink by its delay partner.
inline RateLpResult solve_rate_lp(const LinkValues& caps, double t1, double t2) {
  if (!(t1 > 0.0) || !(t2 > 0.0))
    throw std::invalid_argument("slot lengths must be positive");
  RateLpResult out;
  for (double c : caps) {
    if (c < 0.0) throw std::invalid_argument("capacities must be >= 0");
    if (c == 0.0) return out;  // some link is dead: all-zero rates
  }

  const auto feasible = [&](double t) {
    return t <= caps[kUplinkD1] * t2 && t <= caps[kDownlinkD2] * t2 &&
           (t / t2) * t1 <= caps[kDownlinkD2] * t2 &&
           t <= caps[kUplinkD2] * t1 && t <= caps[kDownlinkD1] * t1 &&
           (t / t1) * t2 <= caps[kDownlinkD1] * t1;
  };

  double lo = 0.0;
  double hi = std::min(std::min(caps[kUplinkD1] * t2, caps[kUplinkD2] * t1),
                       std::min(caps[kDownlinkD1] * t1, caps[kDownlinkD2] * t2));
  if (feasible(hi)) {
    lo = hi;
  } else {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? lo : hi) = mid;
    }
  }

  LinkValues r{};
  r[kDownlinkD1] = caps[kDownlinkD1];
  r[kDownlinkD2] = caps[kDownlinkD2];
  r[kUplinkD1] = detail::enforce_delay(
      std::min(caps[kUplinkD1], caps[kDownlinkD2] * t2 / t1), t1,
      r[kDownlinkD2] * t2);
  r[kUplinkD2] = detail::enforce_delay(
      std::min(caps[kUplinkD2], caps[kDownlinkD1] * t1 / t2), t2,
      r[kDownlinkD1] * t1);
  out.rates = r;
  out.objective = end_to_end_objective(r, Allocation{t1, t2});
  // Bisection and rate recovery agree analytically; keep the smaller of the
  // two in the presence of rounding so the reported value is achieved.
  out.objective = std::min(out.objective, std::max(lo, 0.0));
  return out;
}

inline RateLpResult solve_rate_lp(const LinkValues& caps, const Allocation& a) {
  return solve_rate_lp(caps, a.t1, a.t2);
}

/// Optimizer output for one channel realization.
struct Solution {
  PhaseVector phase;
  Allocation alloc;
  LinkValues rates{};
  LinkValues capacities{};
  double objective_bits = 0.0;     // F, bits per frame
  std::vector<double> trace;       // F(t) per outer iteration
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline bool better_allocation(double val, double t1, double best_val,
                              double best_t1) {
  if (val > best_val) return true;
  // Deterministic tie-break: smallest T1 wins.
  return val == best_val && t1 < best_t1;
}

inline double rel_gap(double now, double before) {
  return (now - before) / std::max(std::abs(now), 1e-300);
}

/// Scales a quadratic form built at unit slot weight by the actual weight;
/// all three coefficient blocks are linear in the weight.
inline QuadForm scale_form(const QuadForm& f, double weight) {
  QuadForm out;
  out.a = weight * f.a;
  out.b = weight * f.b;
  out.c = weight * f.c;
  out.label = f.label;
  return out;
}

inline std::array<QuadForm, 4> scale_forms(const std::array<QuadForm, 4>& base,
                                           const Allocation& a) {
  // Slot pairing of the objective: f_1U ~ T2, f_2U ~ T1, f_1D ~ T1, f_2D ~ T2.
  return {scale_form(base[kUplinkD1], a.t2), scale_form(base[kUplinkD2], a.t1),
          scale_form(base[kDownlinkD1], a.t1),
          scale_form(base[kDownlinkD2], a.t2)};
}

}  // namespace detail

/// Iterative optimizer for the problem without delay constraints.
/// Each outer iteration refreshes the MMSE receivers and weights at the
/// current phase, solves the phase subproblem on every time-grid point
/// (ranked by the relaxed surrogate value), applies the feasible rounding
/// rule against the previous objective, and reads off rates. The candidate
/// phase is only accepted when the true objective does not decrease, which
/// keeps the trace monotone.
inline Solution optimize_p1(const SystemConfig& cfg, const ChannelSet& ch) {
  const SolverOptions& opt = cfg.solver;
  const SolverParams params = SolverParams::from(opt);
  const auto grid = time_grid(opt.k_max);
  const auto paths = ris_downlink_paths(cfg, ch);

  Solution sol;
  PhaseVector phi = PhaseVector::all_ones(cfg.num_ris_elements);
  double f_prev = -std::numeric_limits<double>::infinity();

  for (int t = 1; t <= opt.t_max; ++t) {
    const WmmseState state = wmmse_update(cfg, ch, phi.coeff, paths);
    const auto base = quad_forms(cfg, ch, state, paths, 1.0, 1.0);

    double best_val = -std::numeric_limits<double>::infinity();
    double best_t1 = 2.0;
    Allocation best_alloc{};
    PhaseVector best_phi = phi;
    for (const Allocation& a : grid) {
      const auto forms = detail::scale_forms(base, a);
      PhaseVector cand = solve_maxmin_phase(forms, phi, params);
      const double val = min_quad_value(forms, cand.coeff);
      if (detail::better_allocation(val, a.t1, best_val, best_t1)) {
        best_val = val;
        best_t1 = a.t1;
        best_alloc = a;
        best_phi = std::move(cand);
      }
    }

    const auto true_objective = [&](const PhaseVector& p) {
      return end_to_end_objective(capacities(cfg, ch, p.coeff, paths), best_alloc);
    };
    PhaseVector cand = round_feasible(best_phi, f_prev, true_objective);
    if (true_objective(cand) >= f_prev) phi = std::move(cand);
    // otherwise keep the current phase: the objective never steps backwards

    // Report the grid point that maximizes the true objective at the
    // accepted phase; it is re-derivable from the solution's capacities.
    const LinkValues caps = capacities(cfg, ch, phi.coeff, paths);
    double f_t = -std::numeric_limits<double>::infinity();
    double rep_t1 = 2.0;
    Allocation rep_alloc{};
    for (const Allocation& a : grid) {
      const double val = end_to_end_objective(caps, a);
      if (detail::better_allocation(val, a.t1, f_t, rep_t1)) {
        f_t = val;
        rep_t1 = a.t1;
        rep_alloc = a;
      }
    }
    sol.phase = phi;
    sol.alloc = rep_alloc;
    sol.capacities = caps;
    sol.rates = p1_rate_assignment(caps);
    sol.objective_bits = f_t;
    sol.trace.push_back(f_t);
    sol.iterations = t;
    if (t >= 2 && detail::rel_gap(f_t, f_prev) <= opt.ero_rel) {
      sol.converged = true;
      break;
    }
    f_prev = f_t;
  }
  return sol;
}

/// Shared core of the delay-constrained optimizers. The time grid and the
/// downlink signal paths are parameters so the equal-slot baseline
/// ({0.5, 0.5}) and the AP-based benchmark ({1, 1} with AP paths) reuse the
/// machinery. Per outer iteration: rate LP over the grid at the current
/// capacities, then one phase update at the chosen allocation, accepted only
/// if the LP value does not decrease.
inline Solution optimize_delay_constrained(const SystemConfig& cfg,
                                           const ChannelSet& ch,
                                           const std::vector<Allocation>& grid,
                                           const std::array<DownlinkPath, 2>& paths) {
  const SolverOptions& opt = cfg.solver;
  const SolverParams params = SolverParams::from(opt);

  Solution sol;
  PhaseVector phi = PhaseVector::all_ones(cfg.num_ris_elements);
  double f_prev = -std::numeric_limits<double>::infinity();

  for (int t = 1; t <= opt.t_max; ++t) {
    const LinkValues caps = capacities(cfg, ch, phi.coeff, paths);
    double best_val = -std::numeric_limits<double>::infinity();
    double best_t1 = 2.0;
    Allocation best_alloc{};
    RateLpResult best_lp;
    for (const Allocation& a : grid) {
      RateLpResult lp = solve_rate_lp(caps, a);
      if (detail::better_allocation(lp.objective, a.t1, best_val, best_t1)) {
        best_val = lp.objective;
        best_t1 = a.t1;
        best_alloc = a;
        best_lp = std::move(lp);
      }
    }
    const double f_t = best_val;

    sol.phase = phi;
    sol.alloc = best_alloc;
    sol.capacities = caps;
    sol.rates = best_lp.rates;
    sol.objective_bits = f_t;
    sol.trace.push_back(f_t);
    sol.iterations = t;
    if (t >= 2 && detail::rel_gap(f_t, f_prev) <= opt.ero_rel) {
      sol.converged = true;
      break;
    }
    if (t == opt.t_max) break;

    // Phase update at the chosen allocation; one receiver/weight refresh.
    const WmmseState state = wmmse_update(cfg, ch, phi.coeff, paths);
    const auto base = quad_forms(cfg, ch, state, paths, 1.0, 1.0);
    const auto forms = detail::scale_forms(base, best_alloc);
    const PhaseVector relaxed = solve_maxmin_phase(forms, phi, params);
    const auto lp_objective = [&](const PhaseVector& p) {
      return solve_rate_lp(capacities(cfg, ch, p.coeff, paths), best_alloc)
          .objective;
    };
    PhaseVector cand = round_feasible(relaxed, f_t, lp_objective);
    if (lp_objective(cand) >= f_t) phi = std::move(cand);
    // otherwise keep the current phase: the objective never steps backwards
    f_prev = f_t;
  }
  return sol;
}

/// Delay-constrained optimizer with the full time grid.
inline Solution optimize_p2(const SystemConfig& cfg, const ChannelSet& ch) {
  return optimize_delay_constrained(cfg, ch, time_grid(cfg.solver.k_max),
                                    ris_downlink_paths(cfg, ch));
}

}  // namespace crossmedia
