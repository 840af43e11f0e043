#include "relrep/selective.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "relrep/io.hpp"

namespace relrep {

namespace {

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd probs(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        double mx = logits.row(i).maxCoeff();
        Eigen::ArrayXd ex = (logits.row(i).array() - mx).exp();
        probs.row(i) = (ex / ex.sum()).matrix();
    }
    return probs;
}

double penalized_loss(const Eigen::MatrixXd& F, const std::vector<int>& labels,
                      const Eigen::MatrixXd& V, const Eigen::VectorXd& c, double l2,
                      Eigen::MatrixXd* probs_out = nullptr) {
    Eigen::MatrixXd logits = (F * V).rowwise() + c.transpose();
    Eigen::MatrixXd probs = softmax_rows(logits);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < F.rows(); ++i)
        loss -= std::log(std::max(probs(i, labels[static_cast<std::size_t>(i)]),
                                  std::numeric_limits<double>::min()));
    loss /= static_cast<double>(F.rows());
    loss += 0.5 * l2 * V.squaredNorm();
    if (probs_out) *probs_out = std::move(probs);
    return loss;
}

} // namespace

SoftmaxClassifier train_softmax(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                const SoftmaxHyper& hyper) {
    const Eigen::Index n = features.rows();
    if (n == 0 || static_cast<std::size_t>(n) != labels.size())
        throw std::invalid_argument("train_softmax: feature/label shape mismatch");
    int K = 0;
    for (int y : labels) {
        if (y < 0) throw std::invalid_argument("train_softmax: negative label");
        K = std::max(K, y + 1);
    }
    if (K < 2) throw std::invalid_argument("train_softmax: at least two classes required");
    if (n < K) throw std::invalid_argument("train_softmax: need at least K samples");
    if (hyper.lr <= 0.0 || hyper.steps < 1)
        throw std::invalid_argument("train_softmax: invalid hyperparameters");

    const Eigen::Index d = features.cols();
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(d, K);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(K);

    double lr = hyper.lr;
    const double lr_cap = hyper.lr;
    Eigen::MatrixXd probs;
    double loss = penalized_loss(features, labels, V, c, hyper.l2, &probs);

    for (int step = 0; step < hyper.steps; ++step) {
        // gradient of the penalized loss
        Eigen::MatrixXd delta = probs;
        for (Eigen::Index i = 0; i < n; ++i) delta(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
        Eigen::MatrixXd gV = (features.transpose() * delta) / static_cast<double>(n) + hyper.l2 * V;
        Eigen::VectorXd gc = delta.colwise().mean().transpose();

        Eigen::MatrixXd V_new;
        Eigen::VectorXd c_new;
        double loss_new = 0.0;
        Eigen::MatrixXd probs_new;
        while (true) {
            V_new = V - lr * gV;
            c_new = c - lr * gc;
            loss_new = penalized_loss(features, labels, V_new, c_new, hyper.l2, &probs_new);
            if (std::isfinite(loss_new) && loss_new <= loss) break;
            lr *= 0.5;
            if (lr < 1e-300) {
                if (!std::isfinite(loss_new)) throw std::runtime_error("train_softmax: diverged");
                SoftmaxClassifier clf;
                clf.V = V;
                clf.c = c;
                return clf;
            }
        }
        double drop = loss - loss_new;
        V = std::move(V_new);
        c = std::move(c_new);
        probs = std::move(probs_new);
        loss = loss_new;
        if (drop <= 1e-12 * std::max(1.0, std::abs(loss))) break;
        lr = std::min(lr * 2.0, lr_cap);
    }

    SoftmaxClassifier clf;
    clf.V = std::move(V);
    clf.c = std::move(c);
    return clf;
}

EvalResult evaluate_classifier(const SoftmaxClassifier& clf, const Eigen::MatrixXd& features,
                               const std::vector<int>& labels) {
    if (features.cols() != clf.V.rows())
        throw std::invalid_argument("evaluate_classifier: feature dimension mismatch");
    if (static_cast<std::size_t>(features.rows()) != labels.size())
        throw std::invalid_argument("evaluate_classifier: label count mismatch");
    Eigen::MatrixXd logits = (features * clf.V).rowwise() + clf.c.transpose();
    EvalResult res;
    res.probs = softmax_rows(logits);
    int hits = 0;
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        int argmax = 0;
        for (Eigen::Index k = 1; k < logits.cols(); ++k)
            if (logits(i, k) > logits(i, argmax)) argmax = static_cast<int>(k);
        if (argmax == labels[static_cast<std::size_t>(i)]) ++hits;
    }
    res.accuracy = static_cast<double>(hits) / static_cast<double>(features.rows());
    return res;
}

double ece(const Eigen::MatrixXd& probs, const std::vector<int>& labels, int bins) {
    if (bins < 1) throw std::invalid_argument("ece: bins must be >= 1");
    const Eigen::Index n = probs.rows();
    if (static_cast<std::size_t>(n) != labels.size())
        throw std::invalid_argument("ece: label count mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(probs.row(i).sum() - 1.0) > 1e-6)
            throw std::invalid_argument("ece: probability rows must sum to 1");
    }
    std::vector<double> conf_sum(static_cast<std::size_t>(bins), 0.0);
    std::vector<double> acc_sum(static_cast<std::size_t>(bins), 0.0);
    std::vector<int> count(static_cast<std::size_t>(bins), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        int argmax = 0;
        for (Eigen::Index k = 1; k < probs.cols(); ++k)
            if (probs(i, k) > probs(i, argmax)) argmax = static_cast<int>(k);
        double conf = probs(i, argmax);
        int b = std::min(bins - 1, static_cast<int>(conf * bins));
        conf_sum[static_cast<std::size_t>(b)] += conf;
        acc_sum[static_cast<std::size_t>(b)] += (argmax == labels[static_cast<std::size_t>(i)]) ? 1.0 : 0.0;
        count[static_cast<std::size_t>(b)] += 1;
    }
    double e = 0.0;
    for (int b = 0; b < bins; ++b) {
        if (count[static_cast<std::size_t>(b)] == 0) continue;
        double nb = count[static_cast<std::size_t>(b)];
        e += (nb / static_cast<double>(n)) *
             std::abs(acc_sum[static_cast<std::size_t>(b)] / nb - conf_sum[static_cast<std::size_t>(b)] / nb);
    }
    return e;
}

Eigen::MatrixXd class_prototypes(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                 int num_classes) {
    if (static_cast<std::size_t>(features.rows()) != labels.size())
        throw std::invalid_argument("class_prototypes: label count mismatch");
    Eigen::MatrixXd protos = Eigen::MatrixXd::Zero(num_classes, features.cols());
    std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        int y = labels[static_cast<std::size_t>(i)];
        if (y < 0 || y >= num_classes) throw std::invalid_argument("class_prototypes: label out of range");
        protos.row(y) += features.row(i);
        counts[static_cast<std::size_t>(y)] += 1;
    }
    for (int k = 0; k < num_classes; ++k) {
        if (counts[static_cast<std::size_t>(k)] == 0)
            throw std::invalid_argument("class_prototypes: empty class " + std::to_string(k));
        protos.row(k) /= static_cast<double>(counts[static_cast<std::size_t>(k)]);
    }
    return protos;
}

Eigen::VectorXd uncertainty_scores(const Eigen::MatrixXd& mus, const Eigen::MatrixXd& Sigma_global,
                                   const Eigen::MatrixXd& class_means) {
    if (mus.cols() != Sigma_global.rows() || class_means.cols() != mus.cols())
        throw std::invalid_argument("uncertainty_scores: dimension mismatch");
    if (class_means.rows() < 2)
        throw std::invalid_argument("uncertainty_scores: margin needs at least two prototypes");
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (Sigma_global + Sigma_global.transpose()));
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("uncertainty_scores: covariance not positive definite");
    Eigen::VectorXd out(mus.rows());
    for (Eigen::Index i = 0; i < mus.rows(); ++i) {
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < class_means.rows(); ++k) {
            Eigen::VectorXd diff = (mus.row(i) - class_means.row(k)).transpose();
            double m = std::max(0.0, diff.dot(llt.solve(diff)));
            if (m < d1) {
                d2 = d1;
                d1 = m;
            } else if (m < d2) {
                d2 = m;
            }
        }
        out(i) = d1 - d2;
    }
    return out;
}

double uncertainty_score(const Eigen::VectorXd& mu, const Eigen::MatrixXd& Sigma_global,
                         const Eigen::MatrixXd& class_means) {
    return uncertainty_scores(mu.transpose(), Sigma_global, class_means)(0);
}

// ---------------------------------------------------------------------------
// Risk-coverage
// ---------------------------------------------------------------------------

double RiskCoverageCurve::risk_at_coverage(double coverage) const {
    if (points.empty()) throw std::invalid_argument("risk_at_coverage: empty curve");
    double risk = points.front().risk;
    for (const RiskCoveragePoint& p : points) {
        if (p.coverage <= coverage + 1e-12) risk = p.risk;
        else break;
    }
    return risk;
}

std::string RiskCoverageCurve::to_csv() const {
    std::string out = "coverage,risk\n";
    for (const RiskCoveragePoint& p : points)
        out += format_double(p.coverage, 9) + "," + format_double(p.risk, 9) + "\n";
    return out;
}

RiskCoverageCurve RiskCoverageCurve::from_csv(const std::string& text) {
    RiskCoverageCurve curve;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "coverage,risk")
        throw std::invalid_argument("RiskCoverageCurve: bad header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("RiskCoverageCurve: bad row");
        curve.points.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    }
    return curve;
}

RiskCoverageCurve risk_coverage_curve(const std::vector<double>& scores,
                                      const std::vector<double>& point_risks) {
    const std::size_t n = scores.size();
    if (n == 0 || n != point_risks.size())
        throw std::invalid_argument("risk_coverage_curve: length mismatch or empty");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    RiskCoverageCurve curve;
    curve.points.reserve(n);
    double risk_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        risk_sum += point_risks[order[k]];
        curve.points.push_back({static_cast<double>(k + 1) / static_cast<double>(n),
                                risk_sum / static_cast<double>(k + 1)});
    }
    return curve;
}

RiskCoverageCurve risk_coverage_curve(const std::vector<double>& scores,
                                      const std::vector<bool>& correct) {
    std::vector<double> risks(correct.size());
    for (std::size_t i = 0; i < correct.size(); ++i) risks[i] = correct[i] ? 0.0 : 1.0;
    return risk_coverage_curve(scores, risks);
}

double optimal_selective_risk(const std::vector<double>& risks, int k) {
    const int n = static_cast<int>(risks.size());
    if (n < 1 || n > 12)
        throw std::invalid_argument("optimal_selective_risk: exhaustive mode requires 1 <= n <= 12");
    if (k < 1 || k > n) throw std::invalid_argument("optimal_selective_risk: k out of range");
    double best = std::numeric_limits<double>::infinity();
    const std::uint32_t limit = 1u << n;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        if (std::popcount(mask) != k) continue;
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) sum += risks[static_cast<std::size_t>(i)];
        best = std::min(best, sum / static_cast<double>(k));
    }
    return best;
}

} // namespace relrep
