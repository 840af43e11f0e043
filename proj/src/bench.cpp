#include "relrep/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "relrep/io.hpp"
#include "relrep/linalg.hpp"
#include "relrep/rng.hpp"

namespace relrep {

namespace {
// substream tags for seed derivation
enum : std::uint64_t { kStreamLabels = 1, kStreamLatents = 2, kStreamGenerator = 3, kStreamObsNoise = 4 };
} // namespace

void BenchConfig::validate() const {
    if (latent_dim <= 0 || groups <= 0 || components <= 0)
        throw std::invalid_argument("BenchConfig: dimensions must be positive");
    if (latent_dim % groups != 0)
        throw std::invalid_argument("BenchConfig: latent_dim must be divisible by groups");
    if (components > latent_dim)
        throw std::invalid_argument("BenchConfig: components must not exceed latent_dim");
    if (n_train <= 0 || n_test <= 0)
        throw std::invalid_argument("BenchConfig: sample counts must be positive");
    if (!mixture_weights.empty()) {
        if (static_cast<int>(mixture_weights.size()) != components)
            throw std::invalid_argument("BenchConfig: mixture_weights size must equal components");
        double sum = 0.0;
        for (double w : mixture_weights) {
            if (w < 0.0) throw std::invalid_argument("BenchConfig: negative mixture weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("BenchConfig: mixture weights must sum to 1");
    }
    if (rho_within < 0.0 || rho_within >= 1.0 || rho_between < 0.0 || rho_between >= 1.0)
        throw std::invalid_argument("BenchConfig: correlations must lie in [0, 1)");
    if (sigma_obs < 0.0) throw std::invalid_argument("BenchConfig: sigma_obs must be nonnegative");
    if (gen_width <= 0 || obs_dim <= 0)
        throw std::invalid_argument("BenchConfig: generator dimensions must be positive");
}

std::vector<double> BenchConfig::effective_weights() const {
    if (!mixture_weights.empty()) return mixture_weights;
    return std::vector<double>(components, 1.0 / components);
}

std::vector<int> BenchConfig::dim_group_assignment() const {
    std::vector<int> group_of(latent_dim);
    int per = latent_dim / groups;
    for (int a = 0; a < latent_dim; ++a) group_of[a] = a / per;
    return group_of;
}

nlohmann::json BenchConfig::to_json() const {
    nlohmann::json j;
    j["latent_dim"] = latent_dim;
    j["groups"] = groups;
    j["components"] = components;
    j["n_train"] = n_train;
    j["n_test"] = n_test;
    if (!mixture_weights.empty()) j["mixture_weights"] = mixture_weights;
    j["component_sep"] = component_sep;
    j["rho_within"] = rho_within;
    j["rho_between"] = rho_between;
    j["sigma_obs"] = sigma_obs;
    j["gen_width"] = gen_width;
    j["obs_dim"] = obs_dim;
    j["seed"] = seed;
    return j;
}

BenchConfig BenchConfig::from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {
        "latent_dim", "groups", "components", "n_train", "n_test", "mixture_weights",
        "component_sep", "rho_within", "rho_between", "sigma_obs", "gen_width",
        "obs_dim", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw std::invalid_argument("BenchConfig: unknown key '" + it.key() + "'");
    }
    BenchConfig cfg;
    if (j.contains("latent_dim")) cfg.latent_dim = j.at("latent_dim").get<int>();
    if (j.contains("groups")) cfg.groups = j.at("groups").get<int>();
    if (j.contains("components")) cfg.components = j.at("components").get<int>();
    if (j.contains("n_train")) cfg.n_train = j.at("n_train").get<int>();
    if (j.contains("n_test")) cfg.n_test = j.at("n_test").get<int>();
    if (j.contains("mixture_weights"))
        cfg.mixture_weights = j.at("mixture_weights").get<std::vector<double>>();
    if (j.contains("component_sep")) cfg.component_sep = j.at("component_sep").get<double>();
    if (j.contains("rho_within")) cfg.rho_within = j.at("rho_within").get<double>();
    if (j.contains("rho_between")) cfg.rho_between = j.at("rho_between").get<double>();
    if (j.contains("sigma_obs")) cfg.sigma_obs = j.at("sigma_obs").get<double>();
    if (j.contains("gen_width")) cfg.gen_width = j.at("gen_width").get<int>();
    if (j.contains("obs_dim")) cfg.obs_dim = j.at("obs_dim").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.validate();
    return cfg;
}

std::vector<int> SynthDataset::train_labels() const {
    return std::vector<int>(labels.begin(), labels.begin() + config.n_train);
}

std::vector<int> SynthDataset::test_labels() const {
    return std::vector<int>(labels.begin() + config.n_train, labels.end());
}

// ---------------------------------------------------------------------------
// Generator
// ---------------------------------------------------------------------------

Generator Generator::random(int in_dim, int width, int out_dim, std::uint64_t seed) {
    Rng rng(seed);
    Generator g;
    g.W1_ = Eigen::MatrixXd(width, in_dim);
    double s1 = 1.0 / std::sqrt(static_cast<double>(in_dim));
    for (Eigen::Index i = 0; i < g.W1_.rows(); ++i)
        for (Eigen::Index j = 0; j < g.W1_.cols(); ++j) g.W1_(i, j) = s1 * rng.normal();
    g.b1_ = Eigen::VectorXd::Zero(width);
    g.W2_ = Eigen::MatrixXd(out_dim, width);
    double s2 = 1.0 / std::sqrt(static_cast<double>(width));
    for (Eigen::Index i = 0; i < g.W2_.rows(); ++i)
        for (Eigen::Index j = 0; j < g.W2_.cols(); ++j) g.W2_(i, j) = s2 * rng.normal();
    g.b2_ = Eigen::VectorXd::Zero(out_dim);
    return g;
}

Eigen::MatrixXd Generator::apply(const Eigen::MatrixXd& Z) const {
    if (Z.cols() != W1_.cols())
        throw std::invalid_argument("Generator::apply: latent dimension mismatch");
    Eigen::MatrixXd hidden = (Z * W1_.transpose()).rowwise() + b1_.transpose();
    hidden = hidden.array().tanh();
    return (hidden * W2_.transpose()).rowwise() + b2_.transpose();
}

double Generator::lipschitz_bound() const {
    return spectral_norm(W1_) * spectral_norm(W2_);
}

// ---------------------------------------------------------------------------
// Dataset construction
// ---------------------------------------------------------------------------

Eigen::MatrixXd build_block_covariance(const std::vector<int>& group_of,
                                       const StructureGraph& group_graph,
                                       double rho_w, double rho_b) {
    const int d = static_cast<int>(group_of.size());
    if (d == 0) throw std::invalid_argument("build_block_covariance: empty partition");
    for (int g : group_of)
        if (g < 0 || g >= group_graph.size())
            throw std::invalid_argument("build_block_covariance: group index out of range");

    Eigen::MatrixXd S(d, d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            if (a == b) S(a, b) = 1.0;
            else if (group_of[a] == group_of[b]) S(a, b) = rho_w;
            else if (group_graph.has_edge(group_of[a], group_of[b])) S(a, b) = rho_b;
            else S(a, b) = 0.0;
        }
    }
    double min_eig = min_symmetric_eigenvalue(S);
    if (min_eig <= 0.0)
        throw std::invalid_argument(
            "build_block_covariance: result not SPD (min eigenvalue " +
            std::to_string(min_eig) + "); reduce rho_within/rho_between");
    return S;
}

SynthDataset make_dataset(const BenchConfig& cfg) {
    cfg.validate();
    const int n = cfg.total_samples();
    const int d = cfg.latent_dim;

    StructureGraph group_graph = StructureGraph::path(cfg.groups);
    Eigen::MatrixXd Sigma_star =
        build_block_covariance(cfg.dim_group_assignment(), group_graph, cfg.rho_within, cfg.rho_between);
    Eigen::LLT<Eigen::MatrixXd> chol(Sigma_star);
    if (chol.info() != Eigen::Success)
        throw std::runtime_error("make_dataset: covariance factorization failed");
    Eigen::MatrixXd Lc = chol.matrixL();

    // component means: component_sep on the k-th latent coordinate
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(cfg.components, d);
    for (int k = 0; k < cfg.components; ++k) means(k, k) = cfg.component_sep;

    std::vector<double> pi = cfg.effective_weights();

    std::vector<int> labels(n);
    {
        Rng rng(derive_seed(cfg.seed, {kStreamLabels}));
        for (int i = 0; i < n; ++i) labels[i] = rng.categorical(pi);
    }

    Eigen::MatrixXd Z(n, d);
    {
        Rng rng(derive_seed(cfg.seed, {kStreamLatents}));
        Eigen::VectorXd g(d);
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < d; ++k) g(k) = rng.normal();
            Z.row(i) = means.row(labels[i]) + (Lc * g).transpose();
        }
    }

    Generator gen = dataset_generator(cfg);
    Eigen::MatrixXd X = gen.apply(Z);
    if (cfg.sigma_obs > 0.0) {
        Rng rng(derive_seed(cfg.seed, {kStreamObsNoise}));
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) += cfg.sigma_obs * rng.normal();
    }

    return SynthDataset{cfg, std::move(Z), std::move(labels), std::move(X), std::move(group_graph)};
}

Generator dataset_generator(const BenchConfig& cfg) {
    return Generator::random(cfg.latent_dim, cfg.gen_width, cfg.obs_dim,
                             derive_seed(cfg.seed, {kStreamGenerator}));
}

Eigen::MatrixXd inject_noise(const Eigen::MatrixXd& X, double tau, std::uint64_t seed) {
    if (tau < 0.0) throw std::invalid_argument("inject_noise: tau must be nonnegative");
    if (tau == 0.0) return X;
    Rng rng(seed);
    Eigen::MatrixXd out = X;
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) += tau * rng.normal();
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void save_dataset(const SynthDataset& ds, const std::string& dir) {
    std::filesystem::create_directories(dir);
    auto p = [&dir](const char* name) { return (std::filesystem::path(dir) / name).string(); };
    write_file(p("Z_star.csv"), matrix_to_csv(ds.Z_star));
    write_file(p("labels.csv"), labels_to_csv(ds.labels));
    write_file(p("X.csv"), matrix_to_csv(ds.X));
    save_graph(ds.group_graph, p("group_graph.txt"));
    nlohmann::json sidecar;
    sidecar["config"] = ds.config.to_json();
    write_file(p("dataset.json"), sidecar.dump(2) + "\n");
}

SynthDataset load_dataset(const std::string& dir) {
    auto p = [&dir](const char* name) { return (std::filesystem::path(dir) / name).string(); };
    nlohmann::json sidecar = nlohmann::json::parse(read_file(p("dataset.json")));
    BenchConfig cfg = BenchConfig::from_json(sidecar.at("config"));
    Eigen::MatrixXd Z = matrix_from_csv(read_file(p("Z_star.csv")));
    std::vector<int> labels = labels_from_csv(read_file(p("labels.csv")));
    Eigen::MatrixXd X = matrix_from_csv(read_file(p("X.csv")));
    StructureGraph g = load_graph(p("group_graph.txt"));
    if (Z.rows() != cfg.total_samples() || X.rows() != cfg.total_samples() ||
        static_cast<int>(labels.size()) != cfg.total_samples())
        throw std::runtime_error("load_dataset: array sizes do not match config");
    return SynthDataset{cfg, std::move(Z), std::move(labels), std::move(X), std::move(g)};
}

} // namespace relrep
