#ifndef HHEAT_QUADRATURE_HPP
#define HHEAT_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hheat/group.hpp"

namespace hheat {

// integral_{-pi/2}^{pi/2} cos^m(phi) dphi = sqrt(pi) Gamma((m+1)/2) / Gamma(m/2+1).
inline double cos_power_integral(int m) {
  if (m < 0) throw std::invalid_argument("cos_power_integral: m >= 0");
  return std::sqrt(M_PI) * std::tgamma(0.5 * (m + 1)) / std::tgamma(0.5 * m + 1.0);
}

// Surface area S_{2N-1} of the unit sphere in R^{2N}: 2 pi^N / (N-1)!.
inline double sphere_area(int N) {
  if (N < 1) throw std::invalid_argument("sphere_area: N >= 1");
  return 2.0 * std::pow(M_PI, N) / std::tgamma(double(N));
}

// Constant C_N = S_{2N-1} * integral cos^N in the reduction of gradient-type
// gauge-radial integrals to one dimension.
inline double radial_gradient_constant(int N) { return sphere_area(N) * cos_power_integral(N); }

// Constant for plain gauge-radial integrals: S_{2N-1} * integral cos^{N-1};
// |B_r| = radial_volume_constant(N) * r^Q / Q.
inline double radial_volume_constant(int N) { return sphere_area(N) * cos_power_integral(N - 1); }

// Composite 7-point Gauss-Legendre on [a, b] with geometrically graded panels
// toward a (grade > 1) or uniform panels (grade == 1).
template <class F>
double gl_integrate(F&& f, double a, double b, int panels = 64, double grade = 1.0) {
  static const double xs[7] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
                               0.0,                 0.4058451513773972,  0.7415311855993945,
                               0.9491079123427585};
  static const double ws[7] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                               0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
                               0.1294849661688697};
  if (!(b > a)) return 0.0;
  std::vector<double> knots(panels + 1);
  if (grade == 1.0) {
    for (int i = 0; i <= panels; ++i) knots[i] = a + (b - a) * double(i) / panels;
  } else {
    // Geometric grading: panel widths grow by `grade` away from a.
    double total = (std::pow(grade, panels) - 1) / (grade - 1);
    knots[0] = a;
    double wpanel = (b - a) / total;
    for (int i = 1; i <= panels; ++i) {
      knots[i] = knots[i - 1] + wpanel;
      wpanel *= grade;
    }
    knots[panels] = b;
  }
  double sum = 0;
  for (int i = 0; i < panels; ++i) {
    const double mid = 0.5 * (knots[i] + knots[i + 1]);
    const double hw = 0.5 * (knots[i + 1] - knots[i]);
    double s = 0;
    for (int q = 0; q < 7; ++q) s += ws[q] * f(mid + hw * xs[q]);
    sum += s * hw;
  }
  return sum;
}

// Raw-coordinate integrand: g(z, 2N, l) with z = [x_1..x_N, y_1..y_N].
using RawIntegrand = std::function<double(const double*, int, double)>;

namespace detail {

struct AnnulusQuad {
  int N;
  int dim;        // 2N + 1
  double s_lo;    // inner gauge radius of the current region
  double s_hi;    // outer gauge radius
  int max_depth;  // cell bisection depth at the gauge interfaces
  const RawIntegrand* g;

  double gauge_at(const double* c) const {
    double zz = 0;
    for (int i = 0; i < dim - 1; ++i) zz += c[i] * c[i];
    return gauge_from_parts(zz, c[dim - 1]);
  }

  // Conservative bound on the gauge variation over a cell centered at c.
  // |∂d/∂z_i| <= 1 everywhere; |∂d/∂l| <= 1/(2d).
  double gauge_diameter(const double* c, const double* hw, double d_center) const {
    double dz = 0;
    for (int i = 0; i < dim - 1; ++i) dz += hw[i];
    const double d_safe = std::max(d_center - dz, 0.25 * s_lo);
    const double ll = (d_safe > 0) ? hw[dim - 1] / (2.0 * d_safe) : hw[dim - 1] * 1e300;
    return dz + ll;
  }

  double cell(const double* c, const double* hw, int depth) const {
    const double d = gauge_at(c);
    const double diam = gauge_diameter(c, hw, d);
    if (d - diam > s_hi || d + diam <= s_lo) return 0.0;  // entirely outside
    double vol = 1;
    for (int i = 0; i < dim; ++i) vol *= 2 * hw[i];
    if (d - diam > s_lo && d + diam <= s_hi)  // entirely inside
      return (*g)(c, dim - 1, c[dim - 1]) * vol;
    if (depth >= max_depth)  // interface cell at max depth: midpoint indicator
      return (d > s_lo && d <= s_hi) ? (*g)(c, dim - 1, c[dim - 1]) * vol : 0.0;
    // Bisect per axis and recurse on the 2^dim subcells.
    std::vector<double> sc(dim), shw(dim);
    for (int i = 0; i < dim; ++i) shw[i] = 0.5 * hw[i];
    double sum = 0;
    const int ncorners = 1 << dim;
    for (int corner = 0; corner < ncorners; ++corner) {
      for (int i = 0; i < dim; ++i)
        sc[i] = c[i] + ((corner >> i) & 1 ? shw[i] : -shw[i]);
      sum += cell(sc.data(), shw.data(), depth + 1);
    }
    return sum;
  }
};

}  // namespace detail

// Tensor-product midpoint quadrature of g over the gauge annulus
// {eps < d(w) <= r}, with dyadic gauge shells and cell bisection at the shell
// interfaces. cells_per_axis controls the base resolution of each shell box.
inline double gauge_annulus_integral(int N, double eps, double r, const RawIntegrand& g,
                                     int cells_per_axis = 48, int max_depth = 4) {
  if (!(r > 0) || eps < 0 || eps >= r)
    throw std::invalid_argument("gauge_annulus_integral: need 0 <= eps < r");
  const int dim = 2 * N + 1;
  double total = 0;
  double hi = r;
  while (hi > eps) {
    const double lo = std::max(eps, 0.5 * hi);
    detail::AnnulusQuad quad{N, dim, lo, hi, max_depth, &g};
    // Shell bounding box: |z_i| <= hi, |l| <= hi^2.
    std::vector<double> half(dim, hi / cells_per_axis);
    half[dim - 1] = hi * hi / cells_per_axis;
    std::vector<int> idx(dim, 0);
    std::vector<double> c(dim);
    bool done = false;
    while (!done) {
      for (int i = 0; i < dim; ++i) {
        const double lo_box = (i == dim - 1) ? -hi * hi : -hi;
        c[i] = lo_box + (2 * idx[i] + 1) * half[i];
      }
      total += quad.cell(c.data(), half.data(), 0);
      int axis = 0;
      while (axis < dim) {
        if (++idx[axis] < cells_per_axis) break;
        idx[axis++] = 0;
      }
      done = (axis == dim);
    }
    hi = lo;
  }
  return total;
}

// Quadrature over the full gauge ball B_r; the inner core below r * 2^-16 is
// dropped (integrands used here vanish there).
inline double gauge_ball_integral(int N, double r, const RawIntegrand& g, int cells_per_axis = 48,
                                  int max_depth = 4) {
  return gauge_annulus_integral(N, r * std::pow(2.0, -16), r, g, cells_per_axis, max_depth);
}

}  // namespace hheat

#endif  // HHEAT_QUADRATURE_HPP
