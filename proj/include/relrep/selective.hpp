// Linear softmax classification, calibration (ECE), representation-level
// uncertainty scoring, and risk-coverage selective prediction.
#ifndef RELREP_SELECTIVE_HPP
#define RELREP_SELECTIVE_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace relrep {

struct SoftmaxClassifier {
    Eigen::MatrixXd V; ///< d x K
    Eigen::VectorXd c; ///< K
    std::string variant;      ///< trained-on metadata
    bool structure_features = false;
};

struct SoftmaxHyper {
    double lr = 1.0;
    int steps = 400;
    double l2 = 1e-4;
};

/// Multinomial logistic regression by full-batch gradient descent with l2
/// penalty on the weights. The penalized loss is non-increasing per accepted
/// step (backtracking halves the step on increase). K is inferred from the
/// labels. Deterministic.
SoftmaxClassifier train_softmax(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                const SoftmaxHyper& hyper);

struct EvalResult {
    double accuracy = 0.0;
    Eigen::MatrixXd probs; ///< n x K softmax outputs
};

/// Accuracy under argmax prediction (ties broken toward the lowest class
/// index) plus the full probability matrix.
EvalResult evaluate_classifier(const SoftmaxClassifier& clf, const Eigen::MatrixXd& features,
                               const std::vector<int>& labels);

/// Expected calibration error with equal-width confidence bins on the max
/// probability; empty bins are skipped. Rows must sum to 1 within 1e-6.
double ece(const Eigen::MatrixXd& probs, const std::vector<int>& labels, int bins);

/// Mahalanobis margin under Sigma_global: d1 - d2, where d1 <= d2 are the two
/// smallest squared Mahalanobis distances from mu to the class prototypes.
/// Always <= 0; near zero on class boundaries (maximally uncertain), strongly
/// negative near a prototype. Equals -2x the log-likelihood ratio between the
/// two most plausible classes under the Gaussian prototype model, so the
/// ranking it induces tracks boundary proximity. Scaling Sigma_global by c
/// rescales every score by 1/c and never changes the ranking.
double uncertainty_score(const Eigen::VectorXd& mu, const Eigen::MatrixXd& Sigma_global,
                         const Eigen::MatrixXd& class_means);

/// Batch version: one score per row of mus, one shared factorization.
Eigen::VectorXd uncertainty_scores(const Eigen::MatrixXd& mus, const Eigen::MatrixXd& Sigma_global,
                                   const Eigen::MatrixXd& class_means);

/// Per-class mean feature vectors (K x d) from a labeled training set.
Eigen::MatrixXd class_prototypes(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                 int num_classes);

struct RiskCoveragePoint {
    double coverage = 0.0;
    double risk = 0.0;
};

struct RiskCoverageCurve {
    std::vector<RiskCoveragePoint> points; ///< coverage strictly increasing

    double risk_at_coverage(double coverage) const; ///< largest point with coverage <= arg
    std::string to_csv() const;                     ///< "coverage,risk" header + rows
    static RiskCoverageCurve from_csv(const std::string& text);
};

/// Sort ascending by score (ties by original index); point k is
/// (k/n, mean risk of the k lowest-score points).
RiskCoverageCurve risk_coverage_curve(const std::vector<double>& scores,
                                      const std::vector<double>& point_risks);
RiskCoverageCurve risk_coverage_curve(const std::vector<double>& scores,
                                      const std::vector<bool>& correct);

/// Exhaustive minimum over all size-k subsets of the mean risk (n <= 12).
double optimal_selective_risk(const std::vector<double>& risks, int k);

} // namespace relrep

#endif
