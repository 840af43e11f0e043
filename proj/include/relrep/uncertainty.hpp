// Gaussian representation-level uncertainty: Mahalanobis distances, chi-square
// quantiles, coverage calibration, and the uncertainty regularizers.
#ifndef RELREP_UNCERTAINTY_HPP
#define RELREP_UNCERTAINTY_HPP

#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "relrep/graph.hpp"

namespace relrep {

/// Per-sample Gaussian representation (mu, Sigma) with Sigma symmetric
/// positive definite (all eigenvalues > 1e-10, validated at construction).
class GaussianRepr {
public:
    GaussianRepr(Eigen::VectorXd mu, Eigen::MatrixXd sigma);

    const Eigen::VectorXd& mu() const { return mu_; }
    const Eigen::MatrixXd& sigma() const { return sigma_; }
    int dim() const { return static_cast<int>(mu_.size()); }
    const Eigen::LLT<Eigen::MatrixXd>& chol() const { return chol_; }

private:
    Eigen::VectorXd mu_;
    Eigen::MatrixXd sigma_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
};

/// (z - mu)^T Sigma^{-1} (z - mu), evaluated through the cached Cholesky
/// factorization (no explicit inverse).
double mahalanobis_sq(const Eigen::VectorXd& z, const GaussianRepr& repr);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series expansion for x < a + 1, continued fraction otherwise.
double regularized_gamma_p(double a, double x);

/// CDF of the chi-square distribution with d degrees of freedom.
double chi2_cdf(int d, double x);

/// alpha-quantile of chi^2_d, solved by bracketing + bisection on the
/// regularized incomplete gamma to absolute tolerance 1e-10.
double chi2_quantile(int d, double alpha);

struct CoverageReport {
    double alpha = 0.0;     ///< nominal level
    double empirical = 0.0; ///< fraction of samples inside the alpha-ellipsoid
    int n = 0;              ///< sample count
};

/// Fraction of indices with mahalanobis_sq(z_i, repr_i) <= chi2_quantile(d, alpha).
CoverageReport coverage(const std::vector<Eigen::VectorXd>& samples,
                        const std::vector<GaussianRepr>& reprs, double alpha);

/// Batch form for a shared covariance: row i of `samples` is checked against
/// N(means.row(i), sigma). Validates and factorizes sigma once.
CoverageReport coverage(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& means,
                        const Eigen::MatrixXd& sigma, double alpha);

enum class PhiMode { Trace, LogDet };
PhiMode phi_mode_from_string(const std::string& s);

/// Scalar uncertainty measure of a covariance: trace or log-determinant.
double phi(const GaussianRepr& repr, PhiMode mode);
double phi_sigma(const Eigen::MatrixXd& sigma, PhiMode mode);

/// (1/n) sum_i phi(Sigma_i)
double uncertainty_regularizer(const std::vector<GaussianRepr>& reprs, PhiMode mode);

/// Squared Frobenius distance ||Sigma_i - Sigma_j||_F^2 between uncertainty
/// profiles; symmetric, nonnegative, zero iff equal.
double psi(const GaussianRepr& a, const GaussianRepr& b);
double psi_sigma(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// sum_{(i,j) in S} w_ij (||mu_i - mu_j||^2 + psi(Sigma_i, Sigma_j))
double structural_uncertainty_regularizer(const std::vector<GaussianRepr>& reprs,
                                          const StructureGraph& g);
double structural_uncertainty_regularizer(const Eigen::MatrixXd& means,
                                          const std::vector<Eigen::MatrixXd>& sigmas,
                                          const StructureGraph& g);

} // namespace relrep

#endif
