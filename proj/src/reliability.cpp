#include "relrep/reliability.hpp"

#include <stdexcept>

#include "relrep/bench.hpp"

namespace relrep {

namespace {

Eigen::MatrixXd displacement(const EncoderModel& model, const Eigen::MatrixXd& X, double tau,
                             std::uint64_t seed, bool use_structure) {
    Eigen::MatrixXd clean = encode(model, X, use_structure);
    Eigen::MatrixXd noisy = encode(model, inject_noise(X, tau, seed), use_structure);
    return noisy - clean;
}

} // namespace

double stability(const EncoderModel& model, const Eigen::MatrixXd& X, double tau,
                 std::uint64_t seed, bool use_structure) {
    if (tau == 0.0) return 0.0;
    Eigen::MatrixXd diff = displacement(model, X, tau, seed, use_structure);
    return diff.rowwise().squaredNorm().mean();
}

double stability_unsquared(const EncoderModel& model, const Eigen::MatrixXd& X, double tau,
                           std::uint64_t seed, bool use_structure) {
    if (tau == 0.0) return 0.0;
    Eigen::MatrixXd diff = displacement(model, X, tau, seed, use_structure);
    return diff.rowwise().norm().mean();
}

double robustness(const EncoderModel& model_star, const EncoderModel& model_prime,
                  const Eigen::MatrixXd& X) {
    if (model_star.W.rows() != model_prime.W.rows() || model_star.W.cols() != model_prime.W.cols())
        throw std::invalid_argument("robustness: models have different shapes");
    if (model_star.W != model_prime.W || model_star.b != model_prime.b)
        throw std::invalid_argument("robustness: models must share the ridge stage");
    bool structured = model_star.M_S.has_value() || model_prime.M_S.has_value();
    if (model_star.M_S.has_value() != model_prime.M_S.has_value())
        throw std::invalid_argument("robustness: smoothing present on only one side");
    Eigen::MatrixXd a = encode(model_star, X, structured);
    Eigen::MatrixXd b = encode(model_prime, X, structured);
    return (a - b).rowwise().norm().mean();
}

} // namespace relrep
