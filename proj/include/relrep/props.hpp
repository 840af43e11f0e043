// Verification suite for the five structural/statistical propositions the
// library is built on. Each check is exposed individually so tests can probe
// failure paths; verify_propositions composes them into a report.
#ifndef RELREP_PROPS_HPP
#define RELREP_PROPS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relrep/graph.hpp"
#include "relrep/rng.hpp"

namespace relrep {

struct PropCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct PropSection {
    std::string title;
    std::vector<PropCheck> checks;
    bool passed() const;
};

struct PropReport {
    std::vector<PropSection> sections;
    bool all_passed() const;
    std::string to_text() const;
};

/// Runs every proposition check with substreams derived from the seed.
/// Sections: consensus minimizers, Laplacian identity/convexity, risk-coverage
/// monotonicity/optimality, Lipschitz stability, Gaussian coverage.
PropReport verify_propositions(std::uint64_t seed);

// --- granular helpers -------------------------------------------------------

/// |tr(Z^T L Z) - edge sum| / (1 + |edge sum|) for an explicitly supplied L,
/// so corrupted Laplacians can be fed in by tests.
double laplacian_identity_rel_gap(const Eigen::MatrixXd& L, const StructureGraph& g,
                                  const Eigen::MatrixXd& Z);

/// Erdos-Renyi-style random graph with uniform weights in [0.2, 2].
StructureGraph random_graph(int n, double edge_prob, Rng& rng);

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng);

/// Random SPD matrix A A^T / d + 0.5 I.
Eigen::MatrixXd random_spd(int d, Rng& rng);

/// Kolmogorov-Smirnov distance between the draws and the chi-square CDF.
double ks_distance_chi2(std::vector<double> draws, int dof);

} // namespace relrep

#endif
