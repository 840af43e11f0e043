#include "relrep/uncertainty.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace relrep {

namespace {
constexpr double kSpdEps = 1e-10; // minimum eigenvalue for a valid Sigma
}

GaussianRepr::GaussianRepr(Eigen::VectorXd mu, Eigen::MatrixXd sigma)
    : mu_(std::move(mu)), sigma_(std::move(sigma)) {
    if (mu_.size() == 0) throw std::invalid_argument("GaussianRepr: empty mean");
    if (!mu_.allFinite()) throw std::invalid_argument("GaussianRepr: non-finite mean");
    if (sigma_.rows() != sigma_.cols() || sigma_.rows() != mu_.size())
        throw std::invalid_argument("GaussianRepr: sigma shape does not match mean");
    double scale = std::max(1.0, sigma_.cwiseAbs().maxCoeff());
    if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("GaussianRepr: sigma not symmetric");
    sigma_ = 0.5 * (sigma_ + sigma_.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= kSpdEps)
        throw std::invalid_argument("GaussianRepr: sigma not positive definite");
    chol_.compute(sigma_);
    if (chol_.info() != Eigen::Success)
        throw std::invalid_argument("GaussianRepr: Cholesky factorization failed");
}

double mahalanobis_sq(const Eigen::VectorXd& z, const GaussianRepr& repr) {
    if (z.size() != repr.dim())
        throw std::invalid_argument("mahalanobis_sq: dimension mismatch");
    Eigen::VectorXd y = z - repr.mu();
    Eigen::VectorXd x = repr.chol().solve(y);
    return std::max(0.0, y.dot(x));
}

// ---------------------------------------------------------------------------
// Regularized lower incomplete gamma
// ---------------------------------------------------------------------------

namespace {

// series representation, converges quickly for x < a + 1
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), stable for x >= a + 1
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("regularized_gamma_p: a must be positive");
    if (x < 0.0) throw std::invalid_argument("regularized_gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi2_cdf(int d, double x) {
    if (d < 1) throw std::invalid_argument("chi2_cdf: d must be >= 1");
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * d, 0.5 * x);
}

double chi2_quantile(int d, double alpha) {
    if (d < 1) throw std::invalid_argument("chi2_quantile: d must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("chi2_quantile: alpha must lie in (0, 1)");

    double lo = 0.0;
    double hi = d + 10.0 * std::sqrt(2.0 * d) + 10.0;
    while (chi2_cdf(d, hi) < alpha) hi *= 2.0;

    // bisection; the CDF is strictly increasing on (0, inf)
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (chi2_cdf(d, mid) < alpha) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-13 * std::max(1.0, lo)) break;
    }
    double q = 0.5 * (lo + hi);
    if (std::abs(chi2_cdf(d, q) - alpha) > 1e-10)
        throw std::runtime_error("chi2_quantile: bisection failed to converge");
    return q;
}

// ---------------------------------------------------------------------------
// Coverage
// ---------------------------------------------------------------------------

CoverageReport coverage(const std::vector<Eigen::VectorXd>& samples,
                        const std::vector<GaussianRepr>& reprs, double alpha) {
    if (samples.empty()) throw std::invalid_argument("coverage: empty input");
    if (samples.size() != reprs.size())
        throw std::invalid_argument("coverage: samples and reprs length mismatch");
    int d = reprs.front().dim();
    for (const GaussianRepr& r : reprs)
        if (r.dim() != d) throw std::invalid_argument("coverage: mixed dimensions");

    double threshold = chi2_quantile(d, alpha);
    int inside = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (mahalanobis_sq(samples[i], reprs[i]) <= threshold) ++inside;
    }
    CoverageReport rep;
    rep.alpha = alpha;
    rep.n = static_cast<int>(samples.size());
    rep.empirical = static_cast<double>(inside) / rep.n;
    return rep;
}

CoverageReport coverage(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& means,
                        const Eigen::MatrixXd& sigma, double alpha) {
    if (samples.rows() == 0) throw std::invalid_argument("coverage: empty input");
    if (samples.rows() != means.rows() || samples.cols() != means.cols())
        throw std::invalid_argument("coverage: samples/means shape mismatch");
    int d = static_cast<int>(samples.cols());
    GaussianRepr shared(Eigen::VectorXd::Zero(d), sigma); // validates sigma once

    double threshold = chi2_quantile(d, alpha);
    Eigen::MatrixXd diff = samples - means;
    // M_i = diff_i^T Sigma^{-1} diff_i via one triangular solve for all rows
    Eigen::MatrixXd solved = shared.chol().solve(diff.transpose());
    int inside = 0;
    for (Eigen::Index i = 0; i < diff.rows(); ++i) {
        double m = diff.row(i).dot(solved.col(i));
        if (m <= threshold) ++inside;
    }
    CoverageReport rep;
    rep.alpha = alpha;
    rep.n = static_cast<int>(samples.rows());
    rep.empirical = static_cast<double>(inside) / rep.n;
    return rep;
}

// ---------------------------------------------------------------------------
// Uncertainty measures and regularizers
// ---------------------------------------------------------------------------

PhiMode phi_mode_from_string(const std::string& s) {
    if (s == "trace") return PhiMode::Trace;
    if (s == "logdet") return PhiMode::LogDet;
    throw std::invalid_argument("unknown phi mode: " + s);
}

double phi_sigma(const Eigen::MatrixXd& sigma, PhiMode mode) {
    if (mode == PhiMode::Trace) return sigma.trace();
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("phi: sigma not positive definite");
    // log det Sigma = 2 * sum_k log L_kk
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double phi(const GaussianRepr& repr, PhiMode mode) {
    if (mode == PhiMode::Trace) return repr.sigma().trace();
    return 2.0 * repr.chol().matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double uncertainty_regularizer(const std::vector<GaussianRepr>& reprs, PhiMode mode) {
    if (reprs.empty()) throw std::invalid_argument("uncertainty_regularizer: empty list");
    double sum = 0.0;
    for (const GaussianRepr& r : reprs) sum += phi(r, mode);
    return sum / static_cast<double>(reprs.size());
}

double psi_sigma(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("psi: dimension mismatch");
    return (a - b).squaredNorm();
}

double psi(const GaussianRepr& a, const GaussianRepr& b) {
    return psi_sigma(a.sigma(), b.sigma());
}

double structural_uncertainty_regularizer(const Eigen::MatrixXd& means,
                                          const std::vector<Eigen::MatrixXd>& sigmas,
                                          const StructureGraph& g) {
    if (means.rows() != g.size() || sigmas.size() != static_cast<std::size_t>(g.size()))
        throw std::invalid_argument("structural_uncertainty_regularizer: length mismatch");
    double v = 0.0;
    for (const Edge& e : g.edges()) {
        v += e.w * ((means.row(e.i) - means.row(e.j)).squaredNorm() +
                    psi_sigma(sigmas[e.i], sigmas[e.j]));
    }
    return v;
}

double structural_uncertainty_regularizer(const std::vector<GaussianRepr>& reprs,
                                          const StructureGraph& g) {
    if (reprs.size() != static_cast<std::size_t>(g.size()))
        throw std::invalid_argument("structural_uncertainty_regularizer: length mismatch");
    double v = 0.0;
    for (const Edge& e : g.edges()) {
        v += e.w * ((reprs[e.i].mu() - reprs[e.j].mu()).squaredNorm() +
                    psi(reprs[e.i], reprs[e.j]));
    }
    return v;
}

} // namespace relrep
