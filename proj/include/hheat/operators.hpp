#ifndef HHEAT_OPERATORS_HPP
#define HHEAT_OPERATORS_HPP

#include <cstdint>
#include <vector>

#include "hheat/grid.hpp"

namespace hheat {

// Assembled discrete operator in compressed sparse row form, with per-row
// stencil provenance and the boundary condition it was built under.
struct SparseOperator {
  enum class Boundary { DirichletZero };

  struct RowInfo {
    std::uint8_t clipped_endpoints = 0;  // flow endpoints lost to the boundary
    bool exact_landing = true;           // all endpoints hit l-nodes exactly
  };

  std::int64_t n = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int32_t> cols;
  std::vector<double> vals;
  std::vector<RowInfo> rows;
  Boundary bc = Boundary::DirichletZero;

  void multiply(const double* x, double* y) const {
    for (std::int64_t r = 0; r < n; ++r) {
      double s = 0;
      for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += vals[k] * x[cols[k]];
      y[r] = s;
    }
  }

  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.resize(x.size());
    multiply(x.data(), y.data());
  }

  double row_sum(std::int64_t r) const {
    double s = 0;
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += vals[k];
    return s;
  }
};

// Monotone discretization of the sub-Laplacian. Each X_j^2 (resp. Y_j^2) is the
// three-point second difference along the exact straight-line flow of the
// field, which moves l by +-2 y_j h when x_j moves by +-h (the coefficient 2y_j
// is constant along the flow line, so the line is the exact integral curve).
// Off-grid flow endpoints are resolved by linear interpolation between the two
// bracketing l-planes; both weights are nonnegative, so every off-diagonal
// entry is >= 0 and I - dt*A is an M-matrix for any dt > 0. Endpoints falling
// outside the box are dropped (homogeneous Dirichlet truncation).
SparseOperator assemble_sublaplacian(const GridSpec& spec);

// Symmetric positive semidefinite stiffness of the horizontal Dirichlet energy
//   E(u) = sum_nodes sum_{j,+-} (1/2) [ (interp u at flow endpoint - u) / h ]^2
// with u extended by zero outside the box; cell volume deliberately omitted
// (it cancels in Rayleigh quotients against a volume-free mass vector).
SparseOperator assemble_horizontal_stiffness(const GridSpec& spec);

// I - dt * A, for the implicit diffusion solve.
SparseOperator shifted_identity_minus(const SparseOperator& a, double dt);

}  // namespace hheat

#endif  // HHEAT_OPERATORS_HPP
