#include "relrep/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace relrep {

double spectral_norm(const Eigen::MatrixXd& A, double rel_tol, int max_iters) {
    if (A.size() == 0) return 0.0;
    const Eigen::Index n = A.cols();

    // Deterministic start vector with a mild ramp so it is never orthogonal
    // to the leading singular subspace of the matrices seen here.
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 1e-3 * static_cast<double>(i);
    v.normalize();

    double sigma = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd w = A * v;
        double norm_w = w.norm();
        if (norm_w == 0.0) return 0.0; // v in the null space; matrices here are not adversarial
        Eigen::VectorXd u = A.transpose() * w;
        double norm_u = u.norm();
        if (norm_u == 0.0) return 0.0;
        v = u / norm_u;
        double sigma_new = norm_w;
        if (it > 0 && std::abs(sigma_new - sigma) <= rel_tol * std::max(1.0, sigma_new)) {
            return sigma_new;
        }
        sigma = sigma_new;
    }
    return sigma;
}

double min_symmetric_eigenvalue(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) throw std::invalid_argument("min_symmetric_eigenvalue: matrix not square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(M), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("min_symmetric_eigenvalue: eigensolver failed");
    return es.eigenvalues().minCoeff();
}

} // namespace relrep
