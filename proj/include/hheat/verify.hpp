#ifndef HHEAT_VERIFY_HPP
#define HHEAT_VERIFY_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hheat/group.hpp"
#include "hheat/potential.hpp"
#include "hheat/quadrature.hpp"
#include "hheat/radial.hpp"

namespace hheat {

using ScalarField = std::function<double(const GroupPoint&)>;

// Outcome of one identity check: closed form vs an independent oracle, with an
// optional step-size ladder and fitted convergence order.
struct VerificationRecord {
  std::string identity_name;
  std::vector<double> sample_point;  // flattened (z..., l) or scalar parameters
  double closed_form_value = 0;
  double oracle_value = 0;
  double abs_error = 0;
  double rel_error = 0;
  std::vector<double> step_sizes;
  std::vector<double> step_errors;
  double fitted_order = std::numeric_limits<double>::quiet_NaN();

  void finalize() {
    abs_error = std::abs(closed_form_value - oracle_value);
    const double denom = std::max(std::abs(closed_form_value), std::abs(oracle_value));
    rel_error = (denom > 0) ? abs_error / denom : abs_error;
    if (step_sizes.size() >= 3) fitted_order = fit_order(step_sizes, step_errors);
  }

  // Least-squares slope of log(err) against log(h).
  static double fit_order(const std::vector<double>& hs, const std::vector<double>& errs) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      if (!(errs[i] > 0)) continue;  // exact matches carry no slope information
      const double lx = std::log(hs[i]), ly = std::log(errs[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++m;
    }
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
};

namespace fd {

// Points gamma(+-h) on the exact flow line of X_j through w: X_j moves x_j by t
// and l by 2 y_j t with y frozen, so the integral curve is a straight line.
inline GroupPoint x_flow(const GroupPoint& w, int j, double t) {
  std::vector<double> z(w.z());
  z[j] += t;
  return GroupPoint(std::move(z), w.l() + 2.0 * w.y(j) * t);
}

inline GroupPoint y_flow(const GroupPoint& w, int j, double t) {
  std::vector<double> z(w.z());
  z[w.index() + j] += t;
  return GroupPoint(std::move(z), w.l() - 2.0 * w.x(j) * t);
}

inline double x_derivative(const ScalarField& f, const GroupPoint& w, int j, double h) {
  return (f(x_flow(w, j, h)) - f(x_flow(w, j, -h))) / (2 * h);
}

inline double y_derivative(const ScalarField& f, const GroupPoint& w, int j, double h) {
  return (f(y_flow(w, j, h)) - f(y_flow(w, j, -h))) / (2 * h);
}

// |∇_H f|^2 by central differences along the vector-field flows.
inline double horizontal_gradient_sq(const ScalarField& f, const GroupPoint& w, double h) {
  double s = 0;
  for (int j = 0; j < w.index(); ++j) {
    const double xd = x_derivative(f, w, j, h);
    const double yd = y_derivative(f, w, j, h);
    s += xd * xd + yd * yd;
  }
  return s;
}

// Sub-Laplacian sum of second differences along the flows of X_j, Y_j.
inline double sublaplacian(const ScalarField& f, const GroupPoint& w, double h) {
  const double fw = f(w);
  double s = 0;
  for (int j = 0; j < w.index(); ++j) {
    s += f(x_flow(w, j, h)) - 2 * fw + f(x_flow(w, j, -h));
    s += f(y_flow(w, j, h)) - 2 * fw + f(y_flow(w, j, -h));
  }
  return s / (h * h);
}

}  // namespace fd

inline std::vector<double> flatten_point(const GroupPoint& w) {
  std::vector<double> p(w.z());
  p.push_back(w.l());
  return p;
}

// Eikonal identity |∇_H d|^2 = |z|^2 (|z|^4 + l^2)^(-1/2), closed form against
// the flow-difference oracle over a ladder of steps {h, h/2, h/4}. The step is
// taken relative to gauge(w), so the oracle's accuracy is uniform across
// dilation scales.
inline VerificationRecord verify_eikonal(const GroupPoint& w, double h) {
  const double d0 = gauge(w);
  if (d0 == 0) throw std::domain_error("verify_eikonal: gauge singularity at origin");
  VerificationRecord rec;
  rec.identity_name = "eikonal";
  rec.sample_point = flatten_point(w);
  rec.closed_form_value = horizontal_gauge_gradient_sq(w);
  const ScalarField d = [](const GroupPoint& p) { return gauge(p); };
  for (double step : {h, h / 2, h / 4}) {
    const double v = fd::horizontal_gradient_sq(d, w, step * d0);
    rec.step_sizes.push_back(step);
    rec.step_errors.push_back(std::abs(v - rec.closed_form_value));
    if (step == h) rec.oracle_value = v;
  }
  rec.finalize();
  return rec;
}

// -Δ_H d^-alpha = alpha(2N-alpha) d^-alpha |z|^2/(|z|^4+l^2) against the
// composed-difference oracle.
inline VerificationRecord verify_dalpha_identity(const GroupPoint& w, double alpha, double h) {
  const double d = gauge(w);
  if (d == 0) throw std::domain_error("verify_dalpha_identity: gauge singularity at origin");
  const int N = w.index();
  if (alpha < 0 || alpha >= 2 * N)
    throw std::invalid_argument("verify_dalpha_identity: need 0 <= alpha < 2N");
  VerificationRecord rec;
  rec.identity_name = "dalpha";
  rec.sample_point = flatten_point(w);
  rec.sample_point.push_back(alpha);
  const double coeff = alpha * (2 * N - alpha);
  rec.closed_form_value = -coeff * std::pow(d, -alpha) * hardy_density(w);
  const ScalarField f = [alpha](const GroupPoint& p) { return std::pow(gauge(p), -alpha); };
  for (double step : {h, h / 2, h / 4}) {
    const double v = fd::sublaplacian(f, w, step * d);
    rec.step_sizes.push_back(step);
    rec.step_errors.push_back(std::abs(v - rec.closed_form_value));
    if (step == h) rec.oracle_value = v;
  }
  rec.finalize();
  return rec;
}

// Δ_H d = (Q-1)/d |∇_H d|^2 against the composed-difference oracle.
inline VerificationRecord verify_gauge_sublaplacian(const GroupPoint& w, double h) {
  const double d = gauge(w);
  if (d == 0) throw std::domain_error("verify_gauge_sublaplacian: gauge singularity at origin");
  const GroupParams gp(w.index());
  VerificationRecord rec;
  rec.identity_name = "gauge_sublaplacian";
  rec.sample_point = flatten_point(w);
  rec.closed_form_value = (gp.Q - 1) / d * horizontal_gauge_gradient_sq(w);
  const ScalarField f = [](const GroupPoint& p) { return gauge(p); };
  for (double step : {h, h / 2, h / 4}) {
    const double v = fd::sublaplacian(f, w, step * d);
    rec.step_sizes.push_back(step);
    rec.step_errors.push_back(std::abs(v - rec.closed_form_value));
    if (step == h) rec.oracle_value = v;
  }
  rec.finalize();
  return rec;
}

// Covariance Δ_H (f ∘ D_lambda)(w) = lambda^2 (Δ_H f)(D_lambda w); both sides
// evaluated independently with the difference oracle.
inline VerificationRecord verify_dilation_covariance(const ScalarField& f, double lambda,
                                                     const GroupPoint& w, double h) {
  if (!(lambda > 0)) throw std::invalid_argument("verify_dilation_covariance: lambda > 0");
  VerificationRecord rec;
  rec.identity_name = "dilation_covariance";
  rec.sample_point = flatten_point(w);
  rec.sample_point.push_back(lambda);
  const ScalarField fl = [&f, lambda](const GroupPoint& p) { return f(dilate(lambda, p)); };
  rec.oracle_value = fd::sublaplacian(fl, w, h);
  rec.closed_form_value = lambda * lambda * fd::sublaplacian(f, dilate(lambda, w), h);
  rec.finalize();
  return rec;
}

// Scaling V*_c(D_lambda w) = lambda^-2 V*_c(w) of the Hardy density.
inline VerificationRecord verify_potential_scaling(double c, double lambda, const GroupPoint& w) {
  VerificationRecord rec;
  rec.identity_name = "potential_scaling";
  rec.sample_point = flatten_point(w);
  rec.sample_point.push_back(lambda);
  rec.oracle_value = c * hardy_density(dilate(lambda, w));
  rec.closed_form_value = c * hardy_density(w) / (lambda * lambda);
  rec.finalize();
  return rec;
}

// Reduction of gradient-type gauge-radial integrals over B_r to one dimension:
//   integral_{B_r} |∇_H k(d)|^2 d^-2alpha dw = C_N integral_0^r k'(s)^2 s^{2N-2alpha+1} ds.
inline double radial_reduce(const RadialProfile& k, double alpha, double r, int N) {
  if (!(r > 0)) throw std::invalid_argument("radial_reduce: r > 0");
  if (!(alpha >= 0 && alpha < N + 1))
    throw std::invalid_argument("radial_reduce: need 0 <= alpha < N+1");
  const double cn = radial_gradient_constant(N);
  const double p = 2 * N - 2 * alpha + 1;
  const double lo = std::max(k.s_min(), r * 1e-10);
  return cn * gl_integrate(
                  [&](double s) {
                    const double kp = k.derivative(s);
                    return kp * kp * std::pow(s, p);
                  },
                  lo, std::min(r, k.s_max()), 192, 1.05);
}

// Independent 3D tensor-product quadrature of the same integral over the gauge
// ball, for cross-checking radial_reduce.
inline double radial_reduce_oracle(const RadialProfile& k, double alpha, double r, int N,
                                   int cells_per_axis = 48) {
  RawIntegrand g = [&k, alpha](const double* z, int twoN, double l) {
    double zz = 0;
    for (int i = 0; i < twoN; ++i) zz += z[i] * z[i];
    const double d = gauge_from_parts(zz, l);
    if (d <= k.s_min() || d >= k.s_max()) return 0.0;
    const double kp = k.derivative(d);
    const double grad_sq = zz / std::sqrt(zz * zz + l * l);
    return kp * kp * grad_sq * std::pow(d, -2 * alpha);
  };
  return gauge_ball_integral(N, r, g, cells_per_axis);
}

// Exponent beta of the weighted interpolation inequality, from
// beta + 2/p = 1 with 1/p = 1/2 - 1/(2N - 2alpha + 2).
inline double sobolev_beta(double alpha, int N) {
  if (!(alpha < N + 1)) throw std::invalid_argument("sobolev_beta: need alpha < N+1");
  return 1.0 / (N - alpha + 1);
}

// Ratio lhs / rhs-without-constant of the weighted inequality
//   integral k^{2+2b} phi^2 <= C (integral (|∇_H k|^2 + k^2) phi^2) (integral k^2 phi^2)^b
// for the gauge-radial profile k; all three integrals reduced to 1D.
inline double sobolev_ratio(const RadialProfile& k, double alpha, double r, int N) {
  const double beta = sobolev_beta(alpha, N);
  const double cg = radial_gradient_constant(N);
  const double cv = radial_volume_constant(N);
  const double p = 2 * N - 2 * alpha + 1;
  const double lo = std::max(k.s_min(), r * 1e-10);
  const double hi = std::min(r, k.s_max());
  const double lhs = cv * gl_integrate(
                              [&](double s) {
                                return std::pow(k.value(s), 2 + 2 * beta) * std::pow(s, p);
                              },
                              lo, hi, 192, 1.05);
  const double grad = cg * gl_integrate(
                               [&](double s) {
                                 const double kp = k.derivative(s);
                                 return kp * kp * std::pow(s, p);
                               },
                               lo, hi, 192, 1.05);
  const double mass = cv * gl_integrate(
                               [&](double s) {
                                 const double kv = k.value(s);
                                 return kv * kv * std::pow(s, p);
                               },
                               lo, hi, 192, 1.05);
  if (lhs == 0) return 0.0;  // convention for k == 0
  return lhs / ((grad + mass) * std::pow(mass, beta));
}

enum class DivergenceCase { Subcritical, Supercritical };

struct DivergenceSample {
  double eps = 0;
  double value_1d = 0;  // exact reduced quadrature
  double value_3d = 0;  // tensor-product oracle
};

// I(eps) = integral over {eps < d < 1} of (|z|^2/(|z|^4+l^2)) d^-2a, with
// a = N in the supercritical case (log-divergent) and a = alpha < N in the
// subcritical case (convergent).
inline std::vector<DivergenceSample> divergence_probe(DivergenceCase which, double alpha, int N,
                                                      const std::vector<double>& eps_ladder,
                                                      int cells_per_axis = 40) {
  double prev = std::numeric_limits<double>::infinity();
  for (double e : eps_ladder) {
    if (!(e > 0 && e < prev && e <= 1))
      throw std::invalid_argument("divergence_probe: eps_ladder must be strictly decreasing in (0,1]");
    prev = e;
  }
  const double a = (which == DivergenceCase::Supercritical) ? double(N) : alpha;
  if (which == DivergenceCase::Subcritical && !(alpha < N))
    throw std::invalid_argument("divergence_probe: subcritical case needs alpha < N");
  const double cn = radial_gradient_constant(N);
  RawIntegrand g = [a](const double* z, int twoN, double l) {
    double zz = 0;
    for (int i = 0; i < twoN; ++i) zz += z[i] * z[i];
    const double d = gauge_from_parts(zz, l);
    return hardy_density_from_parts(zz, l) * std::pow(d, -2 * a);
  };
  std::vector<DivergenceSample> out;
  for (double e : eps_ladder) {
    DivergenceSample s;
    s.eps = e;
    if (e >= 1) {
      out.push_back(s);  // empty annulus
      continue;
    }
    // Reduced form: C_N integral_eps^1 s^{2N-2a-1} ds.
    const double expo = 2 * N - 2 * a;
    s.value_1d = (expo == 0) ? cn * std::log(1.0 / e) : cn * (1.0 - std::pow(e, expo)) / expo;
    s.value_3d = gauge_annulus_integral(N, e, 1.0, g, cells_per_axis);
    out.push_back(s);
  }
  return out;
}

// Smooth test fields with known sub-Laplacians, shared by the covariance and
// grid consistency checks.
struct SmoothField {
  std::string name;
  ScalarField f;
  ScalarField sublaplacian;  // analytic value
};

inline std::vector<SmoothField> standard_field_library(int N) {
  std::vector<SmoothField> lib;
  lib.push_back({"z_sq",
                 [](const GroupPoint& w) { return w.z_norm_sq(); },
                 [N](const GroupPoint&) { return 4.0 * N; }});
  lib.push_back({"l", [](const GroupPoint& w) { return w.l(); }, [](const GroupPoint&) { return 0.0; }});
  lib.push_back({"l_sq",
                 [](const GroupPoint& w) { return w.l() * w.l(); },
                 [](const GroupPoint& w) { return 8.0 * w.z_norm_sq(); }});
  lib.push_back({"x1_y1",
                 [](const GroupPoint& w) { return w.x(0) * w.y(0); },
                 [](const GroupPoint&) { return 0.0; }});
  lib.push_back({"x1_l",
                 [](const GroupPoint& w) { return w.x(0) * w.l(); },
                 [](const GroupPoint& w) { return 4.0 * w.y(0); }});
  return lib;
}

}  // namespace hheat

#endif  // HHEAT_VERIFY_HPP
