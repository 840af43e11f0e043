#include "relrep/props.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "relrep/bench.hpp"
#include "relrep/encoder.hpp"
#include "relrep/io.hpp"
#include "relrep/linalg.hpp"
#include "relrep/reliability.hpp"
#include "relrep/selective.hpp"
#include "relrep/uncertainty.hpp"

namespace relrep {

bool PropSection::passed() const {
    for (const PropCheck& c : checks)
        if (!c.passed) return false;
    return true;
}

bool PropReport::all_passed() const {
    for (const PropSection& s : sections)
        if (!s.passed()) return false;
    return true;
}

std::string PropReport::to_text() const {
    std::ostringstream out;
    for (const PropSection& s : sections) {
        out << s.title << ": " << (s.passed() ? "PASS" : "FAIL") << "\n";
        for (const PropCheck& c : s.checks) {
            out << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name;
            if (!c.detail.empty()) out << " (" << c.detail << ")";
            out << "\n";
        }
    }
    out << (all_passed() ? "all propositions verified" : "PROPOSITION CHECKS FAILED") << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

double laplacian_identity_rel_gap(const Eigen::MatrixXd& L, const StructureGraph& g,
                                  const Eigen::MatrixXd& Z) {
    double trace_form = (Z.array() * (L * Z).array()).sum();
    double edge_form = structure_regularizer_edge_sum(Z, g);
    return std::abs(trace_form - edge_form) / (1.0 + std::abs(edge_form));
}

StructureGraph random_graph(int n, double edge_prob, Rng& rng) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.bernoulli(edge_prob)) edges.push_back({i, j, rng.uniform(0.2, 2.0)});
    return StructureGraph(n, edges);
}

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
    return m;
}

Eigen::MatrixXd random_spd(int d, Rng& rng) {
    Eigen::MatrixXd a = random_matrix(d, d, rng);
    Eigen::MatrixXd s = (a * a.transpose()) / static_cast<double>(d);
    s.diagonal().array() += 0.5;
    return symmetrized(s);
}

double ks_distance_chi2(std::vector<double> draws, int dof) {
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    double d = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        double f = chi2_cdf(dof, draws[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// ---------------------------------------------------------------------------
// Section builders
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) { return format_double(v, 4); }

double max_pairwise_row_distance(const Eigen::MatrixXd& Z) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < Z.rows(); ++i)
        for (Eigen::Index j = i + 1; j < Z.rows(); ++j)
            d = std::max(d, (Z.row(i) - Z.row(j)).norm());
    return d;
}

Eigen::MatrixXd run_structure_only(const StructureGraph& g, const Eigen::MatrixXd& Z_init) {
    ObjectiveWeights wts;
    wts.lambda_task = 0.0;
    wts.lambda_uncertainty = 0.0;
    wts.lambda_structure = 1000.0; // scale keeps the stopping rule tight
    std::vector<Eigen::MatrixXd> sigmas =
        replicate_sigma(Eigen::MatrixXd::Identity(Z_init.cols(), Z_init.cols()),
                        static_cast<int>(Z_init.rows()));
    std::vector<int> labels(static_cast<std::size_t>(Z_init.rows()), 0);
    return train_representations(Z_init, sigmas, labels, g, nullptr, wts, 60000, 1.0,
                                 PhiMode::Trace);
}

PropSection section_prop1(Rng& rng) {
    PropSection sec;
    sec.title = "Proposition 1 (structure-only minimizers constant on components)";

    // null space spanned by component indicators
    double worst_null = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        StructureGraph g = random_graph(3 + static_cast<int>(rng.uniform_index(15)), 0.3, rng);
        Eigen::MatrixXd L = laplacian(g);
        for (const std::vector<int>& comp : connected_components(g)) {
            Eigen::VectorXd ind = Eigen::VectorXd::Zero(g.size());
            for (int v : comp) ind(v) = 1.0;
            worst_null = std::max(worst_null, (L * ind).cwiseAbs().maxCoeff());
        }
    }
    sec.checks.push_back({"component indicators lie in the null space", worst_null <= 1e-12,
                          "max |L 1_C| = " + fmt(worst_null)});

    // zero iff piecewise constant, both directions
    {
        StructureGraph g(6, {{0, 1, 1.0}, {1, 2, 0.5}, {3, 4, 2.0}, {4, 5, 1.0}});
        Eigen::MatrixXd Zc(6, 3);
        Zc << 1, 2, 3, 1, 2, 3, 1, 2, 3, -4, 0, 7, -4, 0, 7, -4, 0, 7;
        double r_const = structure_regularizer(Zc, g);
        Eigen::MatrixXd Znc = Zc;
        Znc(2, 1) += 0.5;
        double r_nonconst = structure_regularizer(Znc, g);
        bool ok = r_const <= 1e-12 && r_nonconst > 1e-6;
        sec.checks.push_back({"regularizer vanishes exactly on component-constant rows", ok,
                              "constant " + fmt(r_const) + ", perturbed " + fmt(r_nonconst)});
    }

    // consensus on a connected graph
    {
        std::vector<Edge> edges;
        for (int i = 0; i + 1 < 20; ++i) edges.push_back({i, i + 1, 1.0});
        edges.push_back({0, 10, 1.0});
        edges.push_back({5, 15, 1.0});
        StructureGraph g(20, edges);
        Eigen::MatrixXd Z = run_structure_only(g, random_matrix(20, 3, rng));
        double spread = max_pairwise_row_distance(Z);
        sec.checks.push_back({"gradient descent reaches consensus on a connected graph",
                              spread < 1e-4, "max pairwise distance " + fmt(spread)});
    }

    // two components stay separated while collapsing internally
    {
        std::vector<Edge> edges;
        for (int i = 0; i + 1 < 10; ++i) edges.push_back({i, i + 1, 1.0});
        for (int i = 10; i + 1 < 20; ++i) edges.push_back({i, i + 1, 1.0});
        StructureGraph g(20, edges);
        Eigen::MatrixXd Z0 = random_matrix(20, 3, rng);
        Z0.bottomRows(10).array() += 10.0;
        Eigen::MatrixXd Z = run_structure_only(g, Z0);
        double spread_a = max_pairwise_row_distance(Z.topRows(10));
        double spread_b = max_pairwise_row_distance(Z.bottomRows(10));
        double gap = (Z.row(0) - Z.row(19)).norm();
        bool ok = spread_a < 1e-4 && spread_b < 1e-4 && gap > 1.0;
        sec.checks.push_back({"per-component consensus with separated components", ok,
                              "spreads " + fmt(spread_a) + "/" + fmt(spread_b) + ", gap " + fmt(gap)});
    }
    return sec;
}

PropSection section_prop2(Rng& rng) {
    PropSection sec;
    sec.title = "Proposition 2 (Laplacian identity, PSD, convexity)";

    double worst_gap = 0.0, worst_eig = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform_index(19));
        int d = 1 + static_cast<int>(rng.uniform_index(8));
        StructureGraph g = random_graph(n, 0.4, rng);
        Eigen::MatrixXd Z = random_matrix(n, d, rng);
        worst_gap = std::max(worst_gap, laplacian_identity_rel_gap(laplacian(g), g, Z));
        worst_eig = std::min(worst_eig, min_symmetric_eigenvalue(laplacian(g)));
    }
    sec.checks.push_back({"trace form equals edge sum on 200 random instances",
                          worst_gap <= 1e-10, "max relative gap " + fmt(worst_gap)});
    sec.checks.push_back({"Laplacians are positive semidefinite", worst_eig >= -1e-9,
                          "min eigenvalue " + fmt(worst_eig)});

    double worst_convexity = -1.0;
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform_index(12));
        int d = 1 + static_cast<int>(rng.uniform_index(5));
        StructureGraph g = random_graph(n, 0.5, rng);
        Eigen::MatrixXd Z1 = random_matrix(n, d, rng);
        Eigen::MatrixXd Z2 = random_matrix(n, d, rng);
        double t = rng.uniform();
        double lhs = structure_regularizer(t * Z1 + (1.0 - t) * Z2, g);
        double rhs = t * structure_regularizer(Z1, g) + (1.0 - t) * structure_regularizer(Z2, g);
        worst_convexity = std::max(worst_convexity, lhs - rhs);
    }
    sec.checks.push_back({"regularizer is convex along random segments",
                          worst_convexity <= 1e-10, "max violation " + fmt(worst_convexity)});
    return sec;
}

PropSection section_prop3(Rng& rng) {
    PropSection sec;
    sec.title = "Proposition 3 (monotone risk-coverage, optimal under perfect ranking)";

    // comonotone scores/risks -> exactly non-decreasing curve
    bool monotone_ok = true;
    for (int trial = 0; trial < 500 && monotone_ok; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform_index(399));
        std::vector<double> risks(static_cast<std::size_t>(n));
        for (double& r : risks) r = static_cast<double>(rng.uniform_index(1025)) / 1024.0;
        std::sort(risks.begin(), risks.end());
        std::vector<double> scores(static_cast<std::size_t>(n));
        double acc = 0.0;
        for (double& s : scores) s = (acc += rng.uniform() + 1e-3);
        // shuffle jointly so the curve has to do the sorting
        for (std::size_t i = risks.size(); i > 1; --i) {
            std::size_t j = rng.uniform_index(i);
            std::swap(risks[i - 1], risks[j]);
            std::swap(scores[i - 1], scores[j]);
        }
        RiskCoverageCurve curve = risk_coverage_curve(scores, risks);
        for (std::size_t k = 1; k < curve.points.size(); ++k)
            if (curve.points[k].risk < curve.points[k - 1].risk) monotone_ok = false;
    }
    sec.checks.push_back({"curves non-decreasing on 500 comonotone instances", monotone_ok, ""});

    // perfect ranking attains the exhaustive optimum exactly
    bool optimal_ok = true;
    for (int trial = 0; trial < 100 && optimal_ok; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform_index(12));
        std::vector<double> risks(static_cast<std::size_t>(n));
        for (double& r : risks) r = static_cast<double>(rng.uniform_index(1025)) / 1024.0;
        std::vector<double> scores = risks; // perfect ranking
        RiskCoverageCurve curve = risk_coverage_curve(scores, risks);
        for (int k = 1; k <= n; ++k) {
            if (curve.points[static_cast<std::size_t>(k - 1)].risk !=
                optimal_selective_risk(risks, k))
                optimal_ok = false;
        }
    }
    sec.checks.push_back(
        {"threshold rule equals subset-enumeration optimum on 100 instances", optimal_ok, ""});
    return sec;
}

PropSection section_prop4(std::uint64_t seed) {
    PropSection sec;
    sec.title = "Proposition 4 (stability bounded by the Lipschitz constant)";

    BenchConfig cfg;
    cfg.seed = seed;
    SynthDataset ds = make_dataset(cfg);
    EncoderModel base = fit_ridge_encoder(ds.train_X(), ds.train_Z(), 1e-3);
    EncoderModel full =
        base.with_smoothing(smoothing_operator(ds.group_graph, cfg.dim_group_assignment(), 1.0));
    const double m = static_cast<double>(cfg.obs_dim);
    const Eigen::MatrixXd X = ds.test_X();

    double lip = lipschitz_bound(full, true);
    bool bound_ok = true;
    std::string detail;
    for (double tau : {0.1, 0.5, 1.0}) {
        double est = stability(full, X, tau, derive_seed(seed, {401}), true);
        double cap = lip * lip * m * tau * tau * 1.01;
        if (est > cap) bound_ok = false;
        detail += "tau=" + fmt(tau) + ": " + fmt(est) + "<=" + fmt(cap) + " ";
    }
    sec.checks.push_back({"stability within L^2 m tau^2 at tau in {0.1, 0.5, 1.0}", bound_ok, detail});

    double est1 = stability(base, X, 0.5, derive_seed(seed, {402}), false);
    double est2 = stability(base, X, 1.0, derive_seed(seed, {402}), false);
    double ratio = est2 / est1;
    sec.checks.push_back({"quadratic tau scaling for the affine encoder",
                          std::abs(ratio - 4.0) <= 0.05, "paired ratio " + fmt(ratio)});
    return sec;
}

PropSection section_prop5(Rng& rng) {
    PropSection sec;
    sec.title = "Proposition 5 (Gaussian coverage exactly calibrated)";

    bool ks_ok = true;
    std::string ks_detail;
    for (int d : {1, 4, 16}) {
        Eigen::MatrixXd sigma = random_spd(d, rng);
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        Eigen::MatrixXd Lc = llt.matrixL();
        Eigen::VectorXd mu = random_matrix(d, 1, rng);
        GaussianRepr repr(mu, sigma);
        std::vector<double> draws(50000);
        Eigen::VectorXd gvec(d);
        for (double& m : draws) {
            for (int k = 0; k < d; ++k) gvec(k) = rng.normal();
            m = mahalanobis_sq(mu + Lc * gvec, repr);
        }
        double ks = ks_distance_chi2(std::move(draws), d);
        if (ks >= 0.01) ks_ok = false;
        ks_detail += "d=" + std::to_string(d) + ": " + fmt(ks) + " ";
    }
    sec.checks.push_back({"Mahalanobis statistic matches chi^2_d (KS < 0.01)", ks_ok, ks_detail});

    // coverage convergence at n = 100000
    {
        const int n = 100000, d = 4;
        Eigen::MatrixXd sigma = random_spd(d, rng);
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        Eigen::MatrixXd Lc = llt.matrixL();
        Eigen::MatrixXd means = random_matrix(n, d, rng);
        Eigen::MatrixXd samples = means + random_matrix(n, d, rng) * Lc.transpose();
        bool cov_ok = true;
        std::string detail;
        for (double alpha : {0.5, 0.9, 0.95}) {
            CoverageReport rep = coverage(samples, means, sigma, alpha);
            double bound = 3.0 * std::sqrt(alpha * (1.0 - alpha) / n);
            if (std::abs(rep.empirical - alpha) >= bound) cov_ok = false;
            detail += "a=" + fmt(alpha) + ": " + fmt(rep.empirical) + " ";
        }
        sec.checks.push_back({"empirical coverage converges to alpha", cov_ok, detail});
    }
    return sec;
}

} // namespace

PropReport verify_propositions(std::uint64_t seed) {
    PropReport report;
    Rng rng1(derive_seed(seed, {1}));
    report.sections.push_back(section_prop1(rng1));
    Rng rng2(derive_seed(seed, {2}));
    report.sections.push_back(section_prop2(rng2));
    Rng rng3(derive_seed(seed, {3}));
    report.sections.push_back(section_prop3(rng3));
    report.sections.push_back(section_prop4(derive_seed(seed, {4})));
    Rng rng5(derive_seed(seed, {5}));
    report.sections.push_back(section_prop5(rng5));
    return report;
}

} // namespace relrep
