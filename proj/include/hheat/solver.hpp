#ifndef HHEAT_SOLVER_HPP
#define HHEAT_SOLVER_HPP

#include <string>
#include <vector>

#include "hheat/operators.hpp"

namespace hheat {

struct SolverOptions {
  double tol = 1e-10;       // relative residual target
  int max_iterations = 10000;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double residual = 0;  // relative to |b|
};

// BiCGSTAB for the nonsymmetric M-matrix solves of the implicit diffusion
// step. x is used as the initial guess (warm start) and overwritten.
SolveReport bicgstab(const SparseOperator& A, const std::vector<double>& b, std::vector<double>& x,
                     const SolverOptions& opts);

// Conjugate gradients with Jacobi preconditioning for the symmetric
// positive (semi)definite stiffness solves.
SolveReport conjugate_gradient(const SparseOperator& A, const std::vector<double>& b,
                               std::vector<double>& x, const SolverOptions& opts);

}  // namespace hheat

#endif  // HHEAT_SOLVER_HPP
