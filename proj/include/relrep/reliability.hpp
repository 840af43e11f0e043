// Reliability metrics over fitted encoders: stability under input noise and
// robustness under structure change. Coverage lives in uncertainty.hpp.
#ifndef RELREP_RELIABILITY_HPP
#define RELREP_RELIABILITY_HPP

#include <cstdint>

#include <Eigen/Dense>

#include "relrep/encoder.hpp"
#include "relrep/uncertainty.hpp"

namespace relrep {

/// Mean squared representation displacement between encode(X) and
/// encode(X + tau * noise). Zero when tau is zero.
double stability(const EncoderModel& model, const Eigen::MatrixXd& X, double tau,
                 std::uint64_t seed, bool use_structure);

/// Mean (unsquared) displacement, same perturbation draw as stability for the
/// same seed. Exported as a secondary metric.
double stability_unsquared(const EncoderModel& model, const Eigen::MatrixXd& X, double tau,
                           std::uint64_t seed, bool use_structure);

/// Mean Euclidean distance between the representations produced by two models
/// that share the ridge stage and differ only in the smoothing operator.
double robustness(const EncoderModel& model_star, const EncoderModel& model_prime,
                  const Eigen::MatrixXd& X);

struct ReliabilityReport {
    double stability_sq = 0.0;
    CoverageReport coverage;
    double robustness = 0.0;
    double tau = 0.0;
    double p = 0.0;
    std::string variant;
    std::uint64_t seed = 0;
};

} // namespace relrep

#endif
