// Controlled latent-variable benchmark: mixture latents with group-structured
// covariance, a frozen two-layer random generator, and observation noise.
#ifndef RELREP_BENCH_HPP
#define RELREP_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relrep/graph.hpp"

#include <nlohmann/json_fwd.hpp>

namespace relrep {

struct BenchConfig {
    int latent_dim = 16;    ///< d, divisible by groups
    int groups = 4;         ///< G feature groups
    int components = 4;     ///< K mixture components
    int n_train = 2000;
    int n_test = 2000;
    std::vector<double> mixture_weights; ///< pi; empty = uniform
    double component_sep = 6.0;          ///< spacing of component means
    double rho_within = 0.6;             ///< within-group correlation
    double rho_between = 0.3;            ///< correlation for adjacent groups
    double sigma_obs = 0.1;              ///< observation noise level
    int gen_width = 32;                  ///< generator hidden width
    int obs_dim = 128;                   ///< m, observation dimension
    std::uint64_t seed = 1;

    void validate() const;
    std::vector<double> effective_weights() const; ///< pi, uniform if unset
    std::vector<int> dim_group_assignment() const; ///< contiguous blocks of d/G dims
    int total_samples() const { return n_train + n_test; }

    nlohmann::json to_json() const;
    static BenchConfig from_json(const nlohmann::json& j);
};

/// Frozen two-layer network x = W2 tanh(W1 z + b1) + b2 with weights drawn
/// once from the seed (N(0, 1/fan_in)) and never updated.
class Generator {
public:
    static Generator random(int in_dim, int width, int out_dim, std::uint64_t seed);

    Eigen::MatrixXd apply(const Eigen::MatrixXd& Z) const; ///< rowwise, n x d -> n x m
    double lipschitz_bound() const; ///< spectral-norm product, tanh is 1-Lipschitz

    const Eigen::MatrixXd& W1() const { return W1_; }
    const Eigen::MatrixXd& W2() const { return W2_; }

private:
    Eigen::MatrixXd W1_; // width x d
    Eigen::VectorXd b1_;
    Eigen::MatrixXd W2_; // m x width
    Eigen::VectorXd b2_;
};

struct SynthDataset {
    BenchConfig config;
    Eigen::MatrixXd Z_star;  ///< n x d true latents, train rows first
    std::vector<int> labels; ///< component indices in [0, K)
    Eigen::MatrixXd X;       ///< n x m observations
    StructureGraph group_graph; ///< true S* over the G groups

    int n_train() const { return config.n_train; }
    int n_test() const { return config.n_test; }
    Eigen::MatrixXd train_X() const { return X.topRows(config.n_train); }
    Eigen::MatrixXd test_X() const { return X.bottomRows(config.n_test); }
    Eigen::MatrixXd train_Z() const { return Z_star.topRows(config.n_train); }
    Eigen::MatrixXd test_Z() const { return Z_star.bottomRows(config.n_test); }
    std::vector<int> train_labels() const;
    std::vector<int> test_labels() const;
};

/// Latent covariance with unit diagonal, rho_w inside groups and rho_b across
/// groups adjacent in the group graph; rejects non-SPD results.
Eigen::MatrixXd build_block_covariance(const std::vector<int>& group_of,
                                       const StructureGraph& group_graph,
                                       double rho_w, double rho_b);

/// Deterministic dataset construction: labels from pi, latents from the
/// per-component Gaussians sharing Sigma*, X = g(Z*) + sigma_obs * noise.
SynthDataset make_dataset(const BenchConfig& cfg);

/// The frozen generator make_dataset derives from the config seed.
Generator dataset_generator(const BenchConfig& cfg);

/// X + tau * standard normal perturbation, deterministic per seed.
Eigen::MatrixXd inject_noise(const Eigen::MatrixXd& X, double tau, std::uint64_t seed);

// Dataset export: Z_star.csv, labels.csv, X.csv, group_graph.txt and a JSON
// sidecar with the config. Re-import reproduces the object exactly.
void save_dataset(const SynthDataset& ds, const std::string& dir);
SynthDataset load_dataset(const std::string& dir);

} // namespace relrep

#endif
