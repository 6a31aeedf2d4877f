#ifndef HHEAT_GROUP_HPP
#define HHEAT_GROUP_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hheat {

// Global parameters of the Heisenberg group H^N.
struct GroupParams {
  int N = 1;         // Heisenberg index
  int Q = 4;         // homogeneous dimension, always 2N+2
  double Cstar = 1;  // critical Hardy constant, always N^2

  explicit GroupParams(int n) : N(n), Q(2 * n + 2), Cstar(double(n) * n) {
    if (n < 1) throw std::invalid_argument("GroupParams: N must be >= 1");
  }
};

// A point w = (z, l) = (x, y, l) of H^N, with x, y in R^N and l in R.
// z is stored as [x_1..x_N, y_1..y_N].
class GroupPoint {
 public:
  GroupPoint(std::vector<double> z, double l) : z_(std::move(z)), l_(l) {
    if (z_.empty() || z_.size() % 2 != 0)
      throw std::invalid_argument("GroupPoint: z must have even positive length 2N");
    for (double v : z_)
      if (!std::isfinite(v)) throw std::invalid_argument("GroupPoint: non-finite coordinate");
    if (!std::isfinite(l_)) throw std::invalid_argument("GroupPoint: non-finite l");
  }

  static GroupPoint origin(int N) { return GroupPoint(std::vector<double>(2 * N, 0.0), 0.0); }

  static GroupPoint from_xyl(const std::vector<double>& x, const std::vector<double>& y, double l) {
    if (x.size() != y.size()) throw std::invalid_argument("GroupPoint: |x| != |y|");
    std::vector<double> z(x);
    z.insert(z.end(), y.begin(), y.end());
    return GroupPoint(std::move(z), l);
  }

  int index() const { return static_cast<int>(z_.size() / 2); }  // N
  double x(int j) const { return z_[j]; }
  double y(int j) const { return z_[index() + j]; }
  double l() const { return l_; }
  const std::vector<double>& z() const { return z_; }

  double z_norm_sq() const {
    double s = 0;
    for (double v : z_) s += v * v;
    return s;
  }

 private:
  std::vector<double> z_;
  double l_;
};

inline void require_same_index(const GroupPoint& a, const GroupPoint& b) {
  if (a.index() != b.index())
    throw std::invalid_argument("group operation: dimension mismatch between points");
}

// Group law (x,y,l)∘(x',y',l') = (x+x', y+y', l+l'+2(x'·y - y'·x)).
inline GroupPoint compose(const GroupPoint& w, const GroupPoint& w2) {
  require_same_index(w, w2);
  const int N = w.index();
  std::vector<double> z(2 * N);
  double twist = 0;
  for (int j = 0; j < N; ++j) {
    z[j] = w.x(j) + w2.x(j);
    z[N + j] = w.y(j) + w2.y(j);
    twist += w2.x(j) * w.y(j) - w2.y(j) * w.x(j);
  }
  return GroupPoint(std::move(z), w.l() + w2.l() + 2.0 * twist);
}

inline GroupPoint inverse(const GroupPoint& w) {
  std::vector<double> z(w.z());
  for (double& v : z) v = -v;
  return GroupPoint(std::move(z), -w.l());
}

// Anisotropic dilation D_lambda(z,l) = (lambda z, lambda^2 l).
inline GroupPoint dilate(double lambda, const GroupPoint& w) {
  if (!(lambda > 0)) throw std::invalid_argument("dilate: lambda must be > 0");
  std::vector<double> z(w.z());
  for (double& v : z) v *= lambda;
  return GroupPoint(std::move(z), lambda * lambda * w.l());
}

// Koranyi gauge d(w) = (|z|^4 + l^2)^(1/4).
inline double gauge_from_parts(double z_norm_sq, double l) {
  return std::pow(z_norm_sq * z_norm_sq + l * l, 0.25);
}

inline double gauge(const GroupPoint& w) { return gauge_from_parts(w.z_norm_sq(), w.l()); }

// Gauge metric rho(w, w2) = d(w2^{-1} ∘ w).
inline double metric(const GroupPoint& w, const GroupPoint& w2) {
  require_same_index(w, w2);
  return gauge(compose(inverse(w2), w));
}

// |∇_H d(w)|^2 = |z|^2 (|z|^4 + l^2)^(-1/2); value 0 at points with z = 0 (l != 0).
inline double horizontal_gauge_gradient_sq(const GroupPoint& w) {
  const double zz = w.z_norm_sq();
  const double q = zz * zz + w.l() * w.l();
  if (q == 0) throw std::domain_error("horizontal_gauge_gradient_sq: gauge singularity at origin");
  return zz / std::sqrt(q);
}

// Smallest root of alpha(2N - alpha) = c, i.e. alpha = N - sqrt(N^2 - c),
// evaluated in the cancellation-free form c / (N + sqrt(N^2 - c)).
inline double smallest_root_alpha(double c, int N) {
  if (c < 0) throw std::invalid_argument("smallest_root_alpha: c must be >= 0");
  const double Nsq = double(N) * N;
  if (c > Nsq)
    throw std::domain_error("smallest_root_alpha: c > N^2 (supercritical regime, no real root)");
  const double s = std::sqrt(Nsq - c);
  return (c == 0) ? 0.0 : c / (N + s);
}

}  // namespace hheat

#endif  // HHEAT_GROUP_HPP
