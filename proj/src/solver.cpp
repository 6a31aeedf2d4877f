#include "hheat/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace hheat {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

SolveReport bicgstab(const SparseOperator& A, const std::vector<double>& b, std::vector<double>& x,
                     const SolverOptions& opts) {
  const std::size_t n = b.size();
  x.resize(n, 0.0);
  SolveReport rep;
  const double bnorm = norm(b);
  if (bnorm == 0) {
    x.assign(n, 0.0);
    rep.converged = true;
    return rep;
  }

  std::vector<double> r(n), r0(n), p(n), v(n), s(n), t(n);
  A.multiply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  r0 = r;
  p = r;
  double rho = dot(r0, r);
  double res = norm(r) / bnorm;
  if (res <= opts.tol) {
    rep.converged = true;
    rep.residual = res;
    return rep;
  }

  for (int it = 1; it <= opts.max_iterations; ++it) {
    A.multiply(p, v);
    const double r0v = dot(r0, v);
    if (r0v == 0) break;  // breakdown
    const double alpha = rho / r0v;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    double snorm = norm(s);
    if (snorm / bnorm <= opts.tol) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
      rep.converged = true;
      rep.iterations = it;
      rep.residual = snorm / bnorm;
      return rep;
    }
    A.multiply(s, t);
    const double tt = dot(t, t);
    if (tt == 0) break;
    const double omega = dot(t, s) / tt;
    if (omega == 0) break;
    for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i] + omega * s[i];
    for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    res = norm(r) / bnorm;
    rep.iterations = it;
    if (res <= opts.tol) {
      rep.converged = true;
      rep.residual = res;
      return rep;
    }
    const double rho_new = dot(r0, r);
    if (rho_new == 0) break;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
  }

  // breakdown or iteration cap: report the final true residual
  A.multiply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  rep.residual = norm(r) / bnorm;
  rep.converged = rep.residual <= opts.tol;
  return rep;
}

SolveReport conjugate_gradient(const SparseOperator& A, const std::vector<double>& b,
                               std::vector<double>& x, const SolverOptions& opts) {
  const std::size_t n = b.size();
  x.resize(n, 0.0);
  SolveReport rep;
  const double bnorm = norm(b);
  if (bnorm == 0) {
    x.assign(n, 0.0);
    rep.converged = true;
    return rep;
  }

  std::vector<double> diag(n, 1.0);
  for (std::int64_t r = 0; r < A.n; ++r)
    for (std::int64_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
      if (A.cols[k] == r && A.vals[k] > 0) diag[r] = A.vals[k];

  std::vector<double> r(n), z(n), p(n), ap(n);
  A.multiply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = dot(r, z);

  for (int it = 1; it <= opts.max_iterations; ++it) {
    A.multiply(p, ap);
    const double pap = dot(p, ap);
    if (pap <= 0) break;  // loss of positive definiteness
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
    for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * ap[i];
    rep.iterations = it;
    const double res = norm(r) / bnorm;
    if (res <= opts.tol) {
      rep.converged = true;
      rep.residual = res;
      return rep;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  rep.residual = norm(r) / bnorm;
  rep.converged = rep.residual <= opts.tol;
  return rep;
}

}  // namespace hheat
