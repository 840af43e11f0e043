// Small dense linear-algebra helpers shared across modules.
#ifndef RELREP_LINALG_HPP
#define RELREP_LINALG_HPP

#include <Eigen/Dense>

namespace relrep {

// Largest singular value of A by power iteration on A^T A, converged to the
// given relative tolerance.
double spectral_norm(const Eigen::MatrixXd& A, double rel_tol = 1e-10, int max_iters = 100000);

// Smallest eigenvalue of a symmetric matrix; the input is symmetrized as
// (M + M^T)/2 before the solve to kill round-off asymmetry.
double min_symmetric_eigenvalue(const Eigen::MatrixXd& M);

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& M) {
    return 0.5 * (M + M.transpose());
}

} // namespace relrep

#endif
