#include "relrep/encoder.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "relrep/io.hpp"
#include "relrep/linalg.hpp"

namespace relrep {

EncoderModel fit_ridge_encoder(const Eigen::MatrixXd& X, const Eigen::MatrixXd& targets,
                               double lambda_ridge) {
    if (X.rows() == 0 || X.cols() == 0 || targets.cols() == 0)
        throw std::invalid_argument("fit_ridge_encoder: degenerate shapes");
    if (X.rows() != targets.rows())
        throw std::invalid_argument("fit_ridge_encoder: X and targets row counts differ");
    if (lambda_ridge <= 0.0)
        throw std::invalid_argument("fit_ridge_encoder: lambda_ridge must be positive");

    Eigen::RowVectorXd x_mean = X.colwise().mean();
    Eigen::RowVectorXd t_mean = targets.colwise().mean();
    Eigen::MatrixXd Xc = X.rowwise() - x_mean;
    Eigen::MatrixXd Tc = targets.rowwise() - t_mean;

    Eigen::MatrixXd A = Xc.transpose() * Xc;
    A.diagonal().array() += lambda_ridge;
    Eigen::MatrixXd rhs = Xc.transpose() * Tc;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("fit_ridge_encoder: normal equations not SPD");
    Eigen::MatrixXd W = llt.solve(rhs);

    EncoderModel model;
    model.W = W;
    model.b = (t_mean - x_mean * W).transpose();
    model.lambda_ridge = lambda_ridge;

    // residual covariance of the fitted map, shrunk to SPD
    Eigen::MatrixXd R = Tc - Xc * W;
    Eigen::MatrixXd Sigma = (R.transpose() * R) / static_cast<double>(X.rows());
    double ridge = 1e-6 * Sigma.trace() / static_cast<double>(Sigma.rows());
    if (!(ridge > 0.0)) ridge = 1e-12;
    Sigma.diagonal().array() += ridge;
    model.Sigma_global = symmetrized(Sigma);
    return model;
}

StructureGraph lifted_dimension_graph(const StructureGraph& group_graph,
                                      const std::vector<int>& group_of) {
    const int d = static_cast<int>(group_of.size());
    for (int g : group_of)
        if (g < 0 || g >= group_graph.size())
            throw std::invalid_argument("lifted_dimension_graph: group index out of range");
    std::vector<Edge> edges;
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            if (group_of[a] == group_of[b]) {
                edges.push_back({a, b, 1.0});
            } else if (group_graph.has_edge(group_of[a], group_of[b])) {
                edges.push_back({a, b, group_graph.weight(group_of[a], group_of[b])});
            }
        }
    }
    return StructureGraph(d, edges);
}

Eigen::MatrixXd smoothing_operator(const StructureGraph& group_graph,
                                   const std::vector<int>& group_of, double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("smoothing_operator: gamma must be nonnegative");
    const int d = static_cast<int>(group_of.size());
    if (gamma == 0.0) return Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd L = laplacian(lifted_dimension_graph(group_graph, group_of));
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(d, d) + gamma * L;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("smoothing_operator: I + gamma L not SPD");
    Eigen::MatrixXd M = llt.solve(Eigen::MatrixXd::Identity(d, d));
    return symmetrized(M);
}

Eigen::MatrixXd encode(const EncoderModel& model, const Eigen::MatrixXd& X, bool use_structure) {
    if (X.cols() != model.W.rows())
        throw std::invalid_argument("encode: input dimension does not match model");
    Eigen::MatrixXd mu = (X * model.W).rowwise() + model.b.transpose();
    if (use_structure) {
        if (!model.M_S) throw std::invalid_argument("encode: structure requested but M_S absent");
        mu = mu * model.M_S->transpose();
    }
    return mu;
}

double lipschitz_bound(const EncoderModel& model, bool with_structure) {
    double bound = spectral_norm(model.W);
    if (with_structure) {
        if (!model.M_S)
            throw std::invalid_argument("lipschitz_bound: structure requested but M_S absent");
        bound *= spectral_norm(*model.M_S);
    }
    return bound;
}

// ---------------------------------------------------------------------------
// Unified objective
// ---------------------------------------------------------------------------

namespace {

// mean cross-entropy of the frozen head on rows of Z; probs_out, when given,
// receives the softmax matrix for gradient reuse
double task_cross_entropy(const Eigen::MatrixXd& Z, const std::vector<int>& labels,
                          const LinearHead& head, Eigen::MatrixXd* probs_out = nullptr) {
    const Eigen::Index n = Z.rows();
    const Eigen::Index K = head.V.cols();
    Eigen::MatrixXd logits = (Z * head.V).rowwise() + head.c.transpose();
    double loss = 0.0;
    Eigen::MatrixXd probs(n, K);
    for (Eigen::Index i = 0; i < n; ++i) {
        double mx = logits.row(i).maxCoeff();
        Eigen::ArrayXd ex = (logits.row(i).array() - mx).exp();
        double denom = ex.sum();
        probs.row(i) = (ex / denom).matrix();
        loss -= std::log(std::max(probs(i, labels[static_cast<std::size_t>(i)]),
                                  std::numeric_limits<double>::min()));
    }
    if (probs_out) *probs_out = std::move(probs);
    return loss / static_cast<double>(n);
}

void check_objective_shapes(const Eigen::MatrixXd& Z, const std::vector<Eigen::MatrixXd>& sigmas,
                            const std::vector<int>& labels, const StructureGraph& g,
                            const LinearHead* head, const ObjectiveWeights& wts) {
    if (Z.rows() != g.size())
        throw std::invalid_argument("unified_objective: Z rows must match graph size");
    if (static_cast<Eigen::Index>(sigmas.size()) != Z.rows())
        throw std::invalid_argument("unified_objective: sigma list length mismatch");
    if (static_cast<Eigen::Index>(labels.size()) != Z.rows())
        throw std::invalid_argument("unified_objective: label count mismatch");
    if (wts.lambda_task < 0.0 || wts.lambda_uncertainty < 0.0 || wts.lambda_structure < 0.0)
        throw std::invalid_argument("unified_objective: negative weights");
    if (wts.lambda_task > 0.0) {
        if (!head) throw std::invalid_argument("unified_objective: task term requires a head");
        if (head->V.rows() != Z.cols())
            throw std::invalid_argument("unified_objective: head dimension mismatch");
    }
}

} // namespace

double unified_objective(const Eigen::MatrixXd& Z, const std::vector<Eigen::MatrixXd>& sigmas,
                         const std::vector<int>& labels, const StructureGraph& g,
                         const LinearHead* head, const ObjectiveWeights& wts, PhiMode mode) {
    check_objective_shapes(Z, sigmas, labels, g, head, wts);
    double obj = 0.0;
    if (wts.lambda_task > 0.0) obj += wts.lambda_task * task_cross_entropy(Z, labels, *head);
    if (wts.lambda_uncertainty > 0.0) {
        double sum = 0.0;
        for (const Eigen::MatrixXd& s : sigmas) sum += phi_sigma(s, mode);
        obj += wts.lambda_uncertainty * sum / static_cast<double>(sigmas.size());
    }
    if (wts.lambda_structure > 0.0)
        obj += wts.lambda_structure * structural_uncertainty_regularizer(Z, sigmas, g);
    return obj;
}

Eigen::MatrixXd unified_objective_grad(const Eigen::MatrixXd& Z,
                                       const std::vector<Eigen::MatrixXd>& sigmas,
                                       const std::vector<int>& labels, const StructureGraph& g,
                                       const LinearHead* head, const ObjectiveWeights& wts,
                                       [[maybe_unused]] PhiMode mode) {
    check_objective_shapes(Z, sigmas, labels, g, head, wts);
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(Z.rows(), Z.cols());
    if (wts.lambda_task > 0.0) {
        Eigen::MatrixXd probs;
        task_cross_entropy(Z, labels, *head, &probs);
        for (Eigen::Index i = 0; i < Z.rows(); ++i) probs(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
        grad += (wts.lambda_task / static_cast<double>(Z.rows())) * (probs * head->V.transpose());
    }
    // uncertainty term has no Z dependence; structural term differentiates to 2 L Z
    if (wts.lambda_structure > 0.0) grad += (2.0 * wts.lambda_structure) * (laplacian(g) * Z);
    return grad;
}

Eigen::MatrixXd train_representations(const Eigen::MatrixXd& Z_init,
                                      const std::vector<Eigen::MatrixXd>& sigmas,
                                      const std::vector<int>& labels, const StructureGraph& g,
                                      const LinearHead* head, const ObjectiveWeights& wts,
                                      int steps, double lr, PhiMode mode,
                                      std::vector<double>* objective_trace) {
    if (steps < 1) throw std::invalid_argument("train_representations: steps must be >= 1");
    if (lr <= 0.0) throw std::invalid_argument("train_representations: lr must be positive");

    Eigen::MatrixXd Z = Z_init;
    double obj = unified_objective(Z, sigmas, labels, g, head, wts, mode);
    if (!std::isfinite(obj)) throw std::runtime_error("train_representations: non-finite objective");
    if (objective_trace) objective_trace->push_back(obj);

    const double lr_cap = lr;
    for (int step = 0; step < steps; ++step) {
        Eigen::MatrixXd grad = unified_objective_grad(Z, sigmas, labels, g, head, wts, mode);
        double grad_norm = grad.norm();
        if (grad_norm == 0.0) break;

        Eigen::MatrixXd Z_new;
        double obj_new = 0.0;
        while (true) {
            Z_new = Z - lr * grad;
            obj_new = unified_objective(Z_new, sigmas, labels, g, head, wts, mode);
            if (std::isfinite(obj_new) && obj_new <= obj) break;
            lr *= 0.5;
            if (lr < 1e-300) {
                if (!std::isfinite(obj_new))
                    throw std::runtime_error("train_representations: objective diverged");
                return Z; // no descent direction at float resolution
            }
        }
        double drop = obj - obj_new;
        Z = std::move(Z_new);
        obj = obj_new;
        if (objective_trace) objective_trace->push_back(obj);
        if (drop <= 1e-10 * std::max(1.0, std::abs(obj))) break;
        lr = std::min(lr * 2.0, lr_cap);
    }
    return Z;
}

std::vector<Eigen::MatrixXd> replicate_sigma(const Eigen::MatrixXd& sigma, int n) {
    return std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(n), sigma);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void save_encoder(const EncoderModel& model, const std::string& dir) {
    std::filesystem::create_directories(dir);
    auto p = [&dir](const char* name) { return (std::filesystem::path(dir) / name).string(); };
    write_file(p("W.csv"), matrix_to_csv(model.W));
    write_file(p("b.csv"), matrix_to_csv(model.b));
    write_file(p("Sigma_global.csv"), matrix_to_csv(model.Sigma_global));
    if (model.M_S) write_file(p("M_S.csv"), matrix_to_csv(*model.M_S));
    nlohmann::json j;
    j["lambda_ridge"] = model.lambda_ridge;
    j["has_smoothing"] = model.M_S.has_value();
    write_file(p("model.json"), j.dump(2) + "\n");
}

EncoderModel load_encoder(const std::string& dir) {
    auto p = [&dir](const char* name) { return (std::filesystem::path(dir) / name).string(); };
    nlohmann::json j = nlohmann::json::parse(read_file(p("model.json")));
    EncoderModel model;
    model.W = matrix_from_csv(read_file(p("W.csv")));
    model.b = matrix_from_csv(read_file(p("b.csv")));
    model.Sigma_global = matrix_from_csv(read_file(p("Sigma_global.csv")));
    model.lambda_ridge = j.at("lambda_ridge").get<double>();
    if (j.at("has_smoothing").get<bool>()) model.M_S = matrix_from_csv(read_file(p("M_S.csv")));
    return model;
}

} // namespace relrep
