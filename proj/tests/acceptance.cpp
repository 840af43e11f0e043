// Acceptance suite: one pass/fail line per criterion, each with its stated
// tolerance and runtime budget pinned in code. Exit status 0 only if every
// criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "relrep/bench.hpp"
#include "relrep/encoder.hpp"
#include "relrep/graph.hpp"
#include "relrep/linalg.hpp"
#include "relrep/props.hpp"
#include "relrep/reliability.hpp"
#include "relrep/selective.hpp"
#include "relrep/sweep.hpp"
#include "relrep/uncertainty.hpp"

using namespace relrep;

namespace {

constexpr std::uint64_t kSeed = 20260809ULL;
int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int criterion, const std::string& name, bool ok, double elapsed, double budget,
            const std::string& detail) {
    bool in_time = elapsed < budget;
    if (!(ok && in_time)) ++g_failures;
    std::printf("[%s] criterion %d: %s (%.2fs / budget %.0fs)%s%s\n",
                ok && in_time ? "PASS" : "FAIL", criterion, name.c_str(), elapsed, budget,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
}

// for criteria whose runtime is accounted to another criterion's budget
void report_untimed(int criterion, const std::string& name, bool ok, const std::string& detail) {
    if (!ok) ++g_failures;
    std::printf("[%s] criterion %d: %s (runtime included in criterion 6)%s%s\n",
                ok ? "PASS" : "FAIL", criterion, name.c_str(), detail.empty() ? "" : " -- ",
                detail.c_str());
    std::fflush(stdout);
}

// ---------------------------------------------------------------------------

void criterion1_laplacian_identity() {
    Timer timer;
    Rng rng(derive_seed(kSeed, {1}));
    double worst_gap = 0.0;
    double worst_eig = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform_index(19));
        int d = 1 + static_cast<int>(rng.uniform_index(8));
        StructureGraph g = random_graph(n, 0.4, rng);
        Eigen::MatrixXd Z = random_matrix(n, d, rng);
        double trace_form = structure_regularizer(Z, g);
        double edge_form = structure_regularizer_edge_sum(Z, g);
        worst_gap = std::max(worst_gap,
                             std::abs(trace_form - edge_form) / (1.0 + std::abs(edge_form)));
        worst_eig = std::min(worst_eig, min_symmetric_eigenvalue(laplacian(g)));
    }
    bool ok = worst_gap <= 1e-10 && worst_eig >= -1e-9;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max rel gap %.3g (<=1e-10), min eig %.3g (>=-1e-9)",
                  worst_gap, worst_eig);
    report(1, "trace form equals pair sum on 200 instances, Laplacians PSD", ok, timer.seconds(),
           5.0, buf);
}

Eigen::MatrixXd structure_only_descent(const StructureGraph& g, const Eigen::MatrixXd& Z0) {
    ObjectiveWeights wts;
    wts.lambda_task = 0.0;
    wts.lambda_structure = 1000.0;
    std::vector<Eigen::MatrixXd> sigmas =
        replicate_sigma(Eigen::MatrixXd::Identity(Z0.cols(), Z0.cols()), static_cast<int>(Z0.rows()));
    std::vector<int> labels(static_cast<std::size_t>(Z0.rows()), 0);
    return train_representations(Z0, sigmas, labels, g, nullptr, wts, 60000, 1.0, PhiMode::Trace);
}

double max_pairwise(const Eigen::MatrixXd& Z, int lo, int hi) {
    double d = 0.0;
    for (int i = lo; i < hi; ++i)
        for (int j = i + 1; j < hi; ++j) d = std::max(d, (Z.row(i) - Z.row(j)).norm());
    return d;
}

void criterion2_consensus() {
    Timer timer;
    Rng rng(derive_seed(kSeed, {2}));

    std::vector<Edge> edges;
    for (int i = 0; i + 1 < 20; ++i) edges.push_back({i, i + 1, 1.0});
    edges.push_back({0, 12, 1.0});
    edges.push_back({4, 17, 1.0});
    StructureGraph connected(20, edges);
    Eigen::MatrixXd Zc = structure_only_descent(connected, random_matrix(20, 3, rng));
    double spread_connected = max_pairwise(Zc, 0, 20);

    std::vector<Edge> split;
    for (int i = 0; i + 1 < 10; ++i) split.push_back({i, i + 1, 1.0});
    for (int i = 10; i + 1 < 20; ++i) split.push_back({i, i + 1, 1.0});
    StructureGraph two(20, split);
    Eigen::MatrixXd Z0 = random_matrix(20, 3, rng);
    Z0.bottomRows(10).array() += 10.0;
    Eigen::MatrixXd Zt = structure_only_descent(two, Z0);
    double spread_a = max_pairwise(Zt, 0, 10);
    double spread_b = max_pairwise(Zt, 10, 20);
    double gap = (Zt.topRows(10).colwise().mean() - Zt.bottomRows(10).colwise().mean()).norm();

    bool ok = spread_connected < 1e-4 && spread_a < 1e-4 && spread_b < 1e-4 && gap > 1.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "connected spread %.3g (<1e-4), component spreads %.3g/%.3g, gap %.3g (>1)",
                  spread_connected, spread_a, spread_b, gap);
    report(2, "structure-only descent reaches per-component consensus", ok, timer.seconds(), 10.0,
           buf);
}

void criterion3_calibration() {
    Timer timer;
    Rng rng(derive_seed(kSeed, {3}));
    const int n = 100000;
    bool ok = true;
    std::string detail;

    for (int d : {1, 4, 16}) {
        std::vector<double> mvals(static_cast<std::size_t>(n));
        double cov[3] = {0, 0, 0};
        const double alphas[3] = {0.5, 0.9, 0.95};

        if (d < 16) {
            // heterogeneous (mu_i, Sigma_i), the list-based coverage API
            std::vector<Eigen::VectorXd> samples;
            std::vector<GaussianRepr> reprs;
            samples.reserve(n);
            reprs.reserve(n);
            Eigen::VectorXd g(d);
            for (int i = 0; i < n; ++i) {
                Eigen::MatrixXd sigma = random_spd(d, rng);
                Eigen::VectorXd mu = random_matrix(d, 1, rng);
                Eigen::MatrixXd Lc = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
                for (int k = 0; k < d; ++k) g(k) = rng.normal();
                samples.push_back(mu + Lc * g);
                reprs.emplace_back(mu, sigma);
            }
            for (int a = 0; a < 3; ++a) cov[a] = coverage(samples, reprs, alphas[a]).empirical;
            for (int i = 0; i < n; ++i)
                mvals[static_cast<std::size_t>(i)] =
                    mahalanobis_sq(samples[static_cast<std::size_t>(i)],
                                   reprs[static_cast<std::size_t>(i)]);
        } else {
            // shared covariance, per-sample means, the batch coverage API
            Eigen::MatrixXd sigma = random_spd(d, rng);
            Eigen::MatrixXd Lc = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
            Eigen::MatrixXd means = random_matrix(n, d, rng);
            Eigen::MatrixXd samples = means + random_matrix(n, d, rng) * Lc.transpose();
            for (int a = 0; a < 3; ++a) cov[a] = coverage(samples, means, sigma, alphas[a]).empirical;
            GaussianRepr shared(Eigen::VectorXd::Zero(d), sigma);
            for (int i = 0; i < n; ++i)
                mvals[static_cast<std::size_t>(i)] =
                    mahalanobis_sq((samples.row(i) - means.row(i)).transpose(), shared);
        }

        double ks = ks_distance_chi2(std::move(mvals), d);
        bool d_ok = ks < 0.01;
        for (int a = 0; a < 3; ++a) d_ok = d_ok && std::abs(cov[a] - alphas[a]) < 0.005;
        ok = ok && d_ok;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "d=%d: cov {%.4f,%.4f,%.4f}, KS %.4f; ", d, cov[0], cov[1],
                      cov[2], ks);
        detail += buf;
    }
    report(3, "Gaussian coverage within 0.005 of alpha, Mahalanobis KS < 0.01", ok,
           timer.seconds(), 30.0, detail);
}

void criterion4_risk_coverage() {
    Timer timer;
    Rng rng(derive_seed(kSeed, {4}));

    bool monotone_ok = true;
    for (int trial = 0; trial < 500; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform_index(399));
        std::vector<double> risks(static_cast<std::size_t>(n)), scores(static_cast<std::size_t>(n));
        for (double& r : risks) r = static_cast<double>(rng.uniform_index(1025)) / 1024.0;
        std::sort(risks.begin(), risks.end());
        double acc = 0.0;
        for (double& s : scores) s = (acc += 1.0 + rng.uniform());
        for (std::size_t i = risks.size(); i > 1; --i) {
            std::size_t j = rng.uniform_index(i);
            std::swap(risks[i - 1], risks[j]);
            std::swap(scores[i - 1], scores[j]);
        }
        RiskCoverageCurve curve = risk_coverage_curve(scores, risks);
        for (std::size_t k = 1; k < curve.points.size(); ++k)
            if (curve.points[k].risk < curve.points[k - 1].risk) monotone_ok = false;
    }

    bool optimal_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform_index(12));
        std::vector<double> risks(static_cast<std::size_t>(n));
        for (double& r : risks) r = static_cast<double>(rng.uniform_index(1025)) / 1024.0;
        RiskCoverageCurve curve = risk_coverage_curve(risks, risks);
        for (int k = 1; k <= n; ++k)
            if (curve.points[static_cast<std::size_t>(k - 1)].risk !=
                optimal_selective_risk(risks, k))
                optimal_ok = false;
    }

    bool ok = monotone_ok && optimal_ok;
    std::string detail = std::string("monotone ") + (monotone_ok ? "exact" : "VIOLATED") +
                         ", optimality " + (optimal_ok ? "exact" : "VIOLATED");
    report(4, "risk-coverage monotone on 500 comonotone instances, optimal on 100", ok,
           timer.seconds(), 10.0, detail);
}

void criterion5_stability_bound() {
    Timer timer;
    BenchConfig cfg;
    cfg.seed = kSeed;
    SynthDataset ds = make_dataset(cfg);
    EncoderModel base = fit_ridge_encoder(ds.train_X(), ds.train_Z(), 1e-3);
    EncoderModel full =
        base.with_smoothing(smoothing_operator(ds.group_graph, cfg.dim_group_assignment(), 1.0));

    // 10000 probes: tile the test inputs
    const int want = 10000;
    Eigen::MatrixXd X = ds.test_X();
    Eigen::MatrixXd probes(want, X.cols());
    for (int i = 0; i < want; ++i) probes.row(i) = X.row(i % X.rows());

    const double m = static_cast<double>(cfg.obs_dim);
    double lip = lipschitz_bound(full, true);
    bool bound_ok = true;
    std::string detail;
    for (double tau : {0.1, 0.5, 1.0}) {
        double est = stability(full, probes, tau, derive_seed(kSeed, {5, 1}), true);
        double cap = lip * lip * m * tau * tau * 1.01;
        bound_ok = bound_ok && est <= cap;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "tau=%.1f: %.4g<=%.4g; ", tau, est, cap);
        detail += buf;
    }

    double est1 = stability(base, probes, 0.5, derive_seed(kSeed, {5, 2}), false);
    double est2 = stability(base, probes, 1.0, derive_seed(kSeed, {5, 2}), false);
    double ratio = est2 / est1;
    bool scale_ok = std::abs(ratio / 4.0 - 1.0) <= 0.05;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "paired ratio %.4f", ratio);
    detail += buf;

    report(5, "stability within 1.01 L^2 m tau^2 at 10000 probes, quadratic scaling",
           bound_ok && scale_ok, timer.seconds(), 20.0, detail);
}

void criteria678_sweep(SweepResult& shared_result) {
    Timer timer;
    SweepConfig cfg;
    cfg.bench.seed = kSeed;
    cfg.corruption_seeds = 20;
    shared_result = run_sweep(cfg);
    const SweepResult& result = shared_result;

    auto means_over_p = [&](const std::string& variant) {
        std::vector<double> means;
        for (double p : cfg.p_grid) means.push_back(mean_metric(result, "robustness", variant, 0.0, p));
        return means;
    };

    // criterion 6: robustness trend
    {
        bool ok = true;
        std::string detail;
        for (const std::string& v : {std::string("structure-only"), std::string("full")}) {
            std::vector<double> m = means_over_p(v);
            ok = ok && m[0] < 1e-6;
            for (std::size_t i = 1; i < m.size(); ++i) ok = ok && m[i] > m[i - 1];
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s {%.3g, %.3g, %.3g, %.3g}; ", v.c_str(), m[0], m[1],
                          m[2], m[3]);
            detail += buf;
        }
        for (const std::string& v : {std::string("baseline"), std::string("uq-only")}) {
            for (double p : cfg.p_grid) {
                for (double tau : cfg.tau_grid)
                    ok = ok && mean_metric(result, "robustness", v, tau, p) < 1e-6;
            }
        }
        detail += "baseline/uq-only < 1e-6 at all p";
        report(6, "robustness zero at p=0, strictly increasing in p, zero for unstructured", ok,
               timer.seconds(), 120.0, detail);
    }

    // criterion 7: accuracy degradation band for the full variant
    {
        double acc00 = mean_metric(result, "accuracy", "full", 0.0, 0.0);
        bool ok = acc00 >= 0.95;
        double worst_low = 1.0, worst_high = 0.0;
        for (double p : cfg.p_grid) {
            double a = mean_metric(result, "accuracy", "full", 2.0, p);
            worst_low = std::min(worst_low, a);
            worst_high = std::max(worst_high, a);
            ok = ok && a >= 0.5 && a <= acc00 - 0.15;
        }
        char buf[160];
        std::snprintf(buf, sizeof(buf), "acc(0,0)=%.4f, acc(2,*) in [%.4f, %.4f], band [0.5, %.4f]",
                      acc00, worst_low, worst_high, acc00 - 0.15);
        report(7, "full-variant accuracy ~1 in distribution, degraded but >= 0.5 at tau=2", ok, 0.0,
               1.0, buf); // runtime included in criterion 6's sweep
    }

    // criterion 8: calibration and selective trends
    {
        bool ece_ok = true;
        std::string detail;
        for (Variant v : cfg.variants) {
            double e00 = mean_metric(result, "ece", to_string(v), 0.0, 0.0);
            double e24 = mean_metric(result, "ece", to_string(v), 2.0, 0.4);
            ece_ok = ece_ok && e24 > e00;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%s ECE %.4f->%.4f; ", to_string(v).c_str(), e00, e24);
            detail += buf;
        }

        bool risk_ok = true;
        bool gating_ok = true;
        int curves = 0;
        for (const SweepRow& row : result.rows) {
            bool uq = variant_uses_uncertainty(variant_from_string(row.variant));
            if (row.curve.has_value() != uq) gating_ok = false;
            if (row.curve) {
                ++curves;
                if (row.curve->risk_at_coverage(0.5) > row.curve->risk_at_coverage(1.0))
                    risk_ok = false;
            }
        }
        char buf[96];
        std::snprintf(buf, sizeof(buf), "risk@50%%<=risk@100%% in %d curves, gating %s", curves,
                      gating_ok ? "correct" : "BROKEN");
        detail += buf;
        report(8, "ECE grows under joint shift; selective risk improves at half coverage",
               ece_ok && risk_ok && gating_ok, 0.0, 1.0, detail);
    }
}

void criterion9_determinism() {
    Timer timer;
    SweepConfig cfg;
    cfg.bench.seed = kSeed;
    SweepResult a = run_sweep(cfg);
    SweepResult b = run_sweep(cfg);
    bool ok = sweep_csv(a) == sweep_csv(b);
    std::size_t curve_count = 0;
    for (std::size_t i = 0; i < a.rows.size() && ok; ++i) {
        if (a.rows[i].curve.has_value() != b.rows[i].curve.has_value()) ok = false;
        if (a.rows[i].curve) {
            ++curve_count;
            if (a.rows[i].curve->to_csv() != b.rows[i].curve->to_csv()) ok = false;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu rows and %zu curve files compared byte for byte",
                  a.rows.size(), curve_count);
    report(9, "identical SweepConfig produces byte-identical CSV outputs", ok, timer.seconds(),
           300.0, buf);
}

} // namespace

int main() {
    std::printf("acceptance suite (seed %llu)\n", static_cast<unsigned long long>(kSeed));
    criterion1_laplacian_identity();
    criterion2_consensus();
    criterion3_calibration();
    criterion4_risk_coverage();
    criterion5_stability_bound();
    SweepResult shared;
    criteria678_sweep(shared);
    criterion9_determinism();
    std::printf("%s\n", g_failures == 0 ? "ACCEPTANCE: all criteria passed"
                                        : "ACCEPTANCE: FAILURES PRESENT");
    return g_failures == 0 ? 0 : 1;
}
