#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "crossmedia/config.hpp"
#include "crossmedia/linkmodel.hpp"

namespace crossmedia {

/// Inner phase-subproblem solver knobs.
struct SolverParams {
  int max_inner_iters = 80;   // gradient steps per smoothing stage
  int smoothing_stages = 3;   // lambda grows geometrically across stages
  double lambda0 = 4.0;
  double growth = 5.0;
  double step0 = 0.35;        // c of the diminishing c/sqrt(t) step rule
  double tolerance = 1e-9;    // ascent slack granted to the output
  int oracle_grid_points = 64;

  static SolverParams from(const SolverOptions& o) {
    SolverParams p;
    p.max_inner_iters = o.inner_iters;
    p.smoothing_stages = o.smoothing_stages;
    p.lambda0 = o.smoothing_lambda0;
    p.growth = o.smoothing_growth;
    p.step0 = o.step0;
    return p;
  }
};

/// Entrywise projection onto the unit disk: z stays if |z| <= 1, otherwise
/// it is scaled back to the circle. Idempotent.
inline VectorXcd project_unit_disk(const VectorXcd& phi) {
  VectorXcd out(phi.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    const double mag = std::abs(phi(i));
    out(i) = mag > 1.0 ? phi(i) / mag : phi(i);
  }
  return out;
}

/// Entrywise e^{j arg(z)}; zero entries map to 1.
inline VectorXcd unit_modulus(const VectorXcd& phi) {
  VectorXcd out(phi.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    const double mag = std::abs(phi(i));
    out(i) = mag > 0.0 ? phi(i) / mag : cxd{1.0, 0.0};
  }
  return out;
}

inline double min_quad_value(std::span<const QuadForm> forms, const VectorXcd& phi) {
  double m = std::numeric_limits<double>::infinity();
  for (const QuadForm& f : forms) m = std::min(m, quad_eval(f, phi));
  return m;
}

/// Log-sum-exp softmin: -(1/lambda) ln sum_k exp(-lambda f_k). Computed with
/// the usual shift so large |f| cannot overflow. Lower-bounds min_k f_k and
/// approaches it from below as lambda grows.
inline double smoothed_min_value(std::span<const QuadForm> forms,
                                 const VectorXcd& phi, double lambda) {
  const double m = min_quad_value(forms, phi);
  double sum = 0.0;
  for (const QuadForm& f : forms)
    sum += std::exp(-lambda * (quad_eval(f, phi) - m));
  return m - std::log(sum) / lambda;
}

namespace detail {

inline void validate_forms(std::span<const QuadForm> forms) {
  if (forms.empty()) throw std::invalid_argument("no quadratic forms given");
  const Eigen::Index n = forms.front().a.size();
  for (const QuadForm& f : forms) {
    if (f.a.size() != n || f.b.rows() != n || f.b.cols() != n)
      throw std::invalid_argument("inconsistent quadratic form dimensions");
    const double bscale = std::max(1.0, f.b.norm());
    if ((f.b - f.b.adjoint()).norm() > 1e-10 * bscale)
      throw std::invalid_argument("quadratic form B matrix is not Hermitian");
    MatrixXcd shifted = f.b;
    shifted.diagonal().array() += 1e-12 * bscale;
    if (!shifted.ldlt().isPositive())
      throw std::invalid_argument("quadratic form B matrix is not PSD");
  }
}

}  // namespace detail

/// Maximizes min_k f_k(phi) over the relaxed set |phi_n| <= 1 by projected
/// gradient ascent on the softmin surrogate, sharpening lambda per stage and
/// shrinking steps as c/sqrt(t). A second ascent starts from the matched
/// filter of the form that is worst at the start point; the best iterate
/// under the true min (start point and the all-zero vector included) is
/// returned, so the output never falls below the start value.
inline PhaseVector solve_maxmin_phase(std::span<const QuadForm> forms,
                                      const PhaseVector& phi0,
                                      const SolverParams& params) {
  detail::validate_forms(forms);
  const Eigen::Index n = forms.front().a.size();
  if (phi0.coeff.size() != n)
    throw std::invalid_argument("start phase length does not match forms");

  const VectorXcd start = project_unit_disk(phi0.coeff);
  VectorXcd best = start;
  double best_val = min_quad_value(forms, start);
  {
    const VectorXcd zero = VectorXcd::Zero(n);
    const double v0 = min_quad_value(forms, zero);
    if (v0 > best_val) {
      best = zero;
      best_val = v0;
    }
  }

  // Objective magnitudes vary over many orders (bits per frame), so the
  // smoothing parameter is applied on a normalized scale.
  double scale = std::max(1.0, std::abs(best_val));
  for (const QuadForm& f : forms) scale = std::max(scale, std::abs(f.c));

  std::vector<VectorXcd> bphi(forms.size());
  std::vector<double> vals(forms.size());
  std::vector<double> weights(forms.size());
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  const auto ascend = [&](VectorXcd phi) {
    int global_t = 0;
    for (int stage = 0; stage < params.smoothing_stages; ++stage) {
      const double lambda =
          params.lambda0 * std::pow(params.growth, stage) / scale;
      for (int it = 0; it < params.max_inner_iters; ++it) {
        ++global_t;
        double fmin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < forms.size(); ++k) {
          bphi[k].noalias() = forms[k].b * phi;
          const cxd a_phi = forms[k].a * phi;
          const cxd quad = phi.adjoint() * bphi[k];
          vals[k] = 2.0 * a_phi.real() - quad.real() + forms[k].c;
          fmin = std::min(fmin, vals[k]);
        }
        if (fmin > best_val) {
          best = phi;
          best_val = fmin;
        }
        double wsum = 0.0;
        for (std::size_t k = 0; k < forms.size(); ++k) {
          weights[k] = std::exp(-lambda * (vals[k] - fmin));
          wsum += weights[k];
        }
        VectorXcd grad = VectorXcd::Zero(n);
        for (std::size_t k = 0; k < forms.size(); ++k) {
          grad.noalias() +=
              (weights[k] / wsum) * (forms[k].a.adjoint() - bphi[k]);
        }
        const double gnorm = grad.norm();
        if (gnorm <= 1e-14 * scale) return;  // interior stationary point
        const double step = params.step0 * sqrt_n / std::sqrt(double(global_t));
        phi = project_unit_disk(phi + (step / gnorm) * grad);
      }
    }
    const double final_val = min_quad_value(forms, phi);
    if (final_val > best_val) {
      best = phi;
      best_val = final_val;
    }
  };

  ascend(start);
  std::size_t worst_k = 0;
  double worst_v = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < forms.size(); ++k) {
    const double v = quad_eval(forms[k], start);
    if (v < worst_v) {
      worst_v = v;
      worst_k = k;
    }
  }
  ascend(unit_modulus(forms[worst_k].a.adjoint()));

  return PhaseVector{best, PhaseMode::relaxed};
}

/// Feasible-phase rounding rule: take the unit-modulus projection of the
/// relaxed optimum only when the true objective does not fall below the
/// previous iteration's value; otherwise keep the relaxed vector.
template <class Evaluator>
PhaseVector round_feasible(const PhaseVector& relaxed_opt, double f_prev,
                           Evaluator&& true_objective) {
  PhaseVector rounded{unit_modulus(relaxed_opt.coeff), PhaseMode::feasible};
  if (true_objective(rounded) >= f_prev) return rounded;
  return relaxed_opt;
}

struct PhaseOracleResult {
  VectorXcd phi;
  double value = 0.0;
};

/// Exhaustive reference maximizer of min_k f_k over the unit-modulus grid
/// (points_per_entry phases per element) plus the all-zero vector. Cost is
/// points^N, so N is capped at 3. Test oracle, independent of the solver.
inline PhaseOracleResult brute_force_phase_oracle(std::span<const QuadForm> forms,
                                                  int points_per_entry) {
  detail::validate_forms(forms);
  const Eigen::Index n = forms.front().a.size();
  if (n > 3) throw std::invalid_argument("oracle limited to N <= 3");
  if (points_per_entry < 1) throw std::invalid_argument("need at least one phase");

  std::vector<cxd> alphabet(points_per_entry);
  for (int q = 0; q < points_per_entry; ++q) {
    const double a = 2.0 * std::numbers::pi * q / points_per_entry;
    alphabet[q] = {std::cos(a), std::sin(a)};
  }

  PhaseOracleResult bestr;
  bestr.phi = VectorXcd::Zero(n);
  bestr.value = min_quad_value(forms, bestr.phi);

  std::vector<int> idx(n, 0);
  VectorXcd phi(n);
  const long total = static_cast<long>(std::pow(points_per_entry, double(n)) + 0.5);
  for (long step = 0; step < total; ++step) {
    for (Eigen::Index e = 0; e < n; ++e) phi(e) = alphabet[idx[e]];
    const double v = min_quad_value(forms, phi);
    if (v > bestr.value) {
      bestr.phi = phi;
      bestr.value = v;
    }
    for (Eigen::Index e = 0; e < n; ++e) {  // odometer increment
      if (++idx[e] < points_per_entry) break;
      idx[e] = 0;
    }
  }
  return bestr;
}

}  // namespace crossmedia
