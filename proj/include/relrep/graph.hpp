// Weighted undirected graphs, their Laplacians, structural corruption and the
// structure regularizer tr(Z^T L Z).
#ifndef RELREP_GRAPH_HPP
#define RELREP_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace relrep {

struct Edge {
    int i = 0;
    int j = 0;
    double w = 1.0;
};

/// Weighted undirected graph over n nodes with symmetric nonnegative weights,
/// zero diagonal, and an edge set containing each unordered pair {i,j} with
/// w_ij > 0 exactly once. Immutable after construction.
class StructureGraph {
public:
    // Rejects out-of-range indices, self-loops, negative weights and
    // duplicate (i,j)/(j,i) entries. Zero-weight entries are allowed as
    // input but do not become edges.
    StructureGraph(int n, const std::vector<Edge>& edges);

    int size() const { return n_; }
    const Eigen::MatrixXd& weights() const { return weights_; }
    /// Edges with w > 0, normalized to i < j and sorted by (i, j).
    const std::vector<Edge>& edges() const { return edges_; }
    double weight(int i, int j) const { return weights_(i, j); }
    bool has_edge(int i, int j) const { return weights_(i, j) > 0.0; }

    static StructureGraph path(int n, double w = 1.0);
    static StructureGraph complete(int n, double w = 1.0);

private:
    int n_;
    Eigen::MatrixXd weights_;
    std::vector<Edge> edges_;
};

/// Unnormalized graph Laplacian L = D - W. Symmetric, rows sum to zero,
/// positive semidefinite.
Eigen::MatrixXd laplacian(const StructureGraph& g);

/// tr(Z^T L Z), the quadratic-form route. Clamped at zero against round-off.
double structure_regularizer(const Eigen::MatrixXd& Z, const StructureGraph& g);

/// sum_{(i,j) in S} w_ij ||z_i - z_j||^2, the edge-sum route. Kept separate
/// from structure_regularizer so the two can be checked against each other.
double structure_regularizer_edge_sum(const Eigen::MatrixXd& Z, const StructureGraph& g);

/// Partition of {0..n-1} into connected components (positive-weight paths).
/// Components are ordered by their smallest node; nodes within a component
/// are ascending.
std::vector<std::vector<int>> connected_components(const StructureGraph& g);

/// Random edge flips: each existing edge is dropped with probability p and
/// each absent pair is added (with weight 1.0) with probability p.
/// Exactly one uniform draw is consumed per unordered pair in (i,j) order,
/// so for a fixed seed the flip sets are nested as p grows.
StructureGraph corrupt(const StructureGraph& g, double p, std::uint64_t seed);

// Plain-text edge-list serialization: header "n=<int>", then one "i j w"
// line per edge sorted by (i, j). Round trips bit-exactly.
std::string to_edge_list(const StructureGraph& g);
StructureGraph from_edge_list(const std::string& text);
void save_graph(const StructureGraph& g, const std::string& path);
StructureGraph load_graph(const std::string& path);

} // namespace relrep

#endif
