#ifndef HHEAT_RADIAL_HPP
#define HHEAT_RADIAL_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hheat/group.hpp"

namespace hheat {

// One-variable profile k(s) sampled on a strictly increasing grid of the gauge
// variable s, with the exponent alpha of the companion weight phi = d^-alpha.
// Values and derivatives are produced by local cubic interpolation through the
// four nearest samples.
class RadialProfile {
 public:
  RadialProfile(std::vector<double> s, std::vector<double> k, double alpha)
      : s_(std::move(s)), k_(std::move(k)), alpha_(alpha) {
    if (s_.size() != k_.size() || s_.size() < 4)
      throw std::invalid_argument("RadialProfile: need >= 4 samples with matching sizes");
    if (s_.front() < 0) throw std::invalid_argument("RadialProfile: grid must satisfy s >= 0");
    for (std::size_t i = 1; i < s_.size(); ++i)
      if (!(s_[i] > s_[i - 1]))
        throw std::invalid_argument("RadialProfile: grid must be strictly increasing");
  }

  template <class F>
  static RadialProfile sample(F&& f, double s0, double s1, int n, double alpha) {
    if (n < 4) throw std::invalid_argument("RadialProfile::sample: n >= 4");
    std::vector<double> s(n), k(n);
    for (int i = 0; i < n; ++i) {
      s[i] = s0 + (s1 - s0) * i / (n - 1);
      k[i] = f(s[i]);
    }
    return RadialProfile(std::move(s), std::move(k), alpha);
  }

  double alpha() const { return alpha_; }
  double s_min() const { return s_.front(); }
  double s_max() const { return s_.back(); }

  double value(double s) const { return eval(s, 0); }
  double derivative(double s) const { return eval(s, 1); }
  double second_derivative(double s) const { return eval(s, 2); }

 private:
  // Evaluate the cubic through the four samples nearest to s, or one of its
  // first two derivatives.
  double eval(double s, int order) const {
    if (s < s_.front() - 1e-12 || s > s_.back() + 1e-12)
      throw std::domain_error("RadialProfile: argument outside sampled range");
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t i = (it == s_.begin()) ? 0 : std::size_t(it - s_.begin() - 1);
    std::size_t lo = (i == 0) ? 0 : i - 1;
    lo = std::min(lo, s_.size() - 4);

    // Newton divided differences on the 4-point window.
    const double* xs = &s_[lo];
    double c0 = k_[lo];
    double d01 = (k_[lo + 1] - k_[lo]) / (xs[1] - xs[0]);
    double d12 = (k_[lo + 2] - k_[lo + 1]) / (xs[2] - xs[1]);
    double d23 = (k_[lo + 3] - k_[lo + 2]) / (xs[3] - xs[2]);
    double d012 = (d12 - d01) / (xs[2] - xs[0]);
    double d123 = (d23 - d12) / (xs[3] - xs[1]);
    double d0123 = (d123 - d012) / (xs[3] - xs[0]);

    const double t0 = s - xs[0], t1 = s - xs[1], t2 = s - xs[2];
    switch (order) {
      case 0:
        return c0 + d01 * t0 + d012 * t0 * t1 + d0123 * t0 * t1 * t2;
      case 1:
        return d01 + d012 * (t0 + t1) + d0123 * (t0 * t1 + t0 * t2 + t1 * t2);
      default:
        return 2 * d012 + 2 * d0123 * (t0 + t1 + t2);
    }
  }

  std::vector<double> s_;
  std::vector<double> k_;
  double alpha_;
};

// Sub-Laplacian of the gauge-radial function k(d(w)) away from the origin:
//   |∇_H d|^2 * ( k''(d) + (Q-1) k'(d) / d ).
inline double radial_sublaplacian(const RadialProfile& k, const GroupPoint& w) {
  const double d = gauge(w);
  if (d == 0) throw std::domain_error("radial_sublaplacian: gauge singularity at origin");
  const GroupParams gp(w.index());
  const double grad_sq = horizontal_gauge_gradient_sq(w);
  return grad_sq * (k.second_derivative(d) + (gp.Q - 1) * k.derivative(d) / d);
}

}  // namespace hheat

#endif  // HHEAT_RADIAL_HPP
