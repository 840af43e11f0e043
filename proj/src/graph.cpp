#include "relrep/graph.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "relrep/rng.hpp"

namespace relrep {

StructureGraph::StructureGraph(int n, const std::vector<Edge>& edges) : n_(n) {
    if (n <= 0) throw std::invalid_argument("StructureGraph: node count must be positive");
    weights_ = Eigen::MatrixXd::Zero(n, n);
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : edges) {
        if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n)
            throw std::invalid_argument("StructureGraph: edge index out of range");
        if (e.i == e.j) throw std::invalid_argument("StructureGraph: self-loop rejected");
        if (e.w < 0.0) throw std::invalid_argument("StructureGraph: negative weight rejected");
        int a = std::min(e.i, e.j), b = std::max(e.i, e.j);
        if (!seen.insert({a, b}).second)
            throw std::invalid_argument("StructureGraph: duplicate edge rejected");
        weights_(a, b) = e.w;
        weights_(b, a) = e.w;
        if (e.w > 0.0) edges_.push_back({a, b, e.w});
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& x, const Edge& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
}

StructureGraph StructureGraph::path(int n, double w) {
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, w});
    return StructureGraph(n, edges);
}

StructureGraph StructureGraph::complete(int n, double w) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j, w});
    return StructureGraph(n, edges);
}

Eigen::MatrixXd laplacian(const StructureGraph& g) {
    const Eigen::MatrixXd& W = g.weights();
    Eigen::VectorXd deg = W.rowwise().sum();
    Eigen::MatrixXd L = -W;
    L.diagonal() += deg;
    return L;
}

double structure_regularizer(const Eigen::MatrixXd& Z, const StructureGraph& g) {
    if (Z.rows() != g.size())
        throw std::invalid_argument("structure_regularizer: Z row count does not match graph");
    Eigen::MatrixXd LZ = laplacian(g) * Z;
    double v = (Z.array() * LZ.array()).sum();
    return std::max(0.0, v);
}

double structure_regularizer_edge_sum(const Eigen::MatrixXd& Z, const StructureGraph& g) {
    if (Z.rows() != g.size())
        throw std::invalid_argument("structure_regularizer_edge_sum: Z row count does not match graph");
    double v = 0.0;
    for (const Edge& e : g.edges()) {
        v += e.w * (Z.row(e.i) - Z.row(e.j)).squaredNorm();
    }
    return v;
}

std::vector<std::vector<int>> connected_components(const StructureGraph& g) {
    const int n = g.size();
    std::vector<int> label(n, -1);
    std::vector<std::vector<int>> parts;
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (label[s] != -1) continue;
        int c = static_cast<int>(parts.size());
        parts.emplace_back();
        stack.push_back(s);
        label[s] = c;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            parts[c].push_back(u);
            for (int v = 0; v < n; ++v) {
                if (label[v] == -1 && g.weight(u, v) > 0.0) {
                    label[v] = c;
                    stack.push_back(v);
                }
            }
        }
        std::sort(parts[c].begin(), parts[c].end());
    }
    return parts;
}

StructureGraph corrupt(const StructureGraph& g, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("corrupt: p must lie in [0, 1]");
    Rng rng(seed);
    const int n = g.size();
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            bool flip = rng.bernoulli(p);
            if (g.has_edge(i, j)) {
                if (!flip) edges.push_back({i, j, g.weight(i, j)});
            } else {
                if (flip) edges.push_back({i, j, 1.0});
            }
        }
    }
    return StructureGraph(n, edges);
}

namespace {

std::string format_weight(double w) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    return buf;
}

} // namespace

std::string to_edge_list(const StructureGraph& g) {
    std::string out = "n=" + std::to_string(g.size()) + "\n";
    for (const Edge& e : g.edges()) {
        out += std::to_string(e.i) + " " + std::to_string(e.j) + " " + format_weight(e.w) + "\n";
    }
    return out;
}

StructureGraph from_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("n=", 0) != 0)
        throw std::invalid_argument("from_edge_list: missing n= header");
    int n = std::stoi(line.substr(2));
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Edge e;
        if (!(ls >> e.i >> e.j >> e.w))
            throw std::invalid_argument("from_edge_list: malformed edge line: " + line);
        edges.push_back(e);
    }
    return StructureGraph(n, edges);
}

void save_graph(const StructureGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_graph: cannot open " + path);
    out << to_edge_list(g);
}

StructureGraph load_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_graph: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_edge_list(ss.str());
}

} // namespace relrep
