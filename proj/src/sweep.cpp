#include "relrep/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "relrep/encoder.hpp"
#include "relrep/io.hpp"
#include "relrep/reliability.hpp"
#include "relrep/rng.hpp"

namespace relrep {

namespace {
// substream tags, disjoint from the ones used in bench.cpp by construction
// (different base seeds are derived per purpose)
enum : std::uint64_t { kStreamCorrupt = 101, kStreamTestNoise = 102, kStreamStability = 103 };

constexpr int kEceBins = 15;
const double kAlphas[3] = {0.5, 0.9, 0.95};
} // namespace

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Baseline: return "baseline";
        case Variant::UqOnly: return "uq-only";
        case Variant::StructureOnly: return "structure-only";
        case Variant::Full: return "full";
    }
    throw std::logic_error("to_string(Variant): unreachable");
}

Variant variant_from_string(const std::string& s) {
    if (s == "baseline") return Variant::Baseline;
    if (s == "uq-only") return Variant::UqOnly;
    if (s == "structure-only") return Variant::StructureOnly;
    if (s == "full") return Variant::Full;
    throw std::invalid_argument("unknown variant: " + s);
}

bool variant_uses_structure(Variant v) {
    return v == Variant::StructureOnly || v == Variant::Full;
}

bool variant_uses_uncertainty(Variant v) {
    return v == Variant::UqOnly || v == Variant::Full;
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

void SweepConfig::validate() const {
    bench.validate();
    if (tau_grid.empty() || p_grid.empty()) throw std::invalid_argument("SweepConfig: empty grid");
    for (double t : tau_grid)
        if (t < 0.0) throw std::invalid_argument("SweepConfig: tau must be nonnegative");
    for (double p : p_grid)
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("SweepConfig: p must lie in [0, 1]");
    if (variants.empty()) throw std::invalid_argument("SweepConfig: no variants");
    for (std::size_t i = 0; i < variants.size(); ++i)
        for (std::size_t j = i + 1; j < variants.size(); ++j)
            if (variants[i] == variants[j])
                throw std::invalid_argument("SweepConfig: duplicate variant");
    if (corruption_seeds < 1) throw std::invalid_argument("SweepConfig: corruption_seeds must be >= 1");
    if (gamma < 0.0) throw std::invalid_argument("SweepConfig: gamma must be nonnegative");
    if (lambda_ridge <= 0.0) throw std::invalid_argument("SweepConfig: lambda_ridge must be positive");
    if (classifier.lr <= 0.0 || classifier.steps < 1 || classifier.l2 < 0.0)
        throw std::invalid_argument("SweepConfig: invalid classifier hyperparameters");
}

nlohmann::json SweepConfig::to_json() const {
    nlohmann::json j;
    j["bench"] = bench.to_json();
    j["tau_grid"] = tau_grid;
    j["p_grid"] = p_grid;
    std::vector<std::string> names;
    for (Variant v : variants) names.push_back(to_string(v));
    j["variants"] = names;
    j["corruption_seeds"] = corruption_seeds;
    j["gamma"] = gamma;
    j["lambda_ridge"] = lambda_ridge;
    j["classifier"] = {{"lr", classifier.lr}, {"steps", classifier.steps}, {"l2", classifier.l2}};
    return j;
}

SweepConfig SweepConfig::from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {"bench",  "tau_grid",         "p_grid",
                                                   "variants", "corruption_seeds", "gamma",
                                                   "lambda_ridge", "classifier"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw std::invalid_argument("SweepConfig: unknown key '" + it.key() + "'");
    }
    SweepConfig cfg;
    if (j.contains("bench")) cfg.bench = BenchConfig::from_json(j.at("bench"));
    if (j.contains("tau_grid")) cfg.tau_grid = j.at("tau_grid").get<std::vector<double>>();
    if (j.contains("p_grid")) cfg.p_grid = j.at("p_grid").get<std::vector<double>>();
    if (j.contains("variants")) {
        cfg.variants.clear();
        for (const auto& name : j.at("variants"))
            cfg.variants.push_back(variant_from_string(name.get<std::string>()));
    }
    if (j.contains("corruption_seeds")) cfg.corruption_seeds = j.at("corruption_seeds").get<int>();
    if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
    if (j.contains("lambda_ridge")) cfg.lambda_ridge = j.at("lambda_ridge").get<double>();
    if (j.contains("classifier")) {
        const auto& c = j.at("classifier");
        static const std::vector<std::string> cknown = {"lr", "steps", "l2"};
        for (auto it = c.begin(); it != c.end(); ++it)
            if (std::find(cknown.begin(), cknown.end(), it.key()) == cknown.end())
                throw std::invalid_argument("SweepConfig: unknown classifier key '" + it.key() + "'");
        if (c.contains("lr")) cfg.classifier.lr = c.at("lr").get<double>();
        if (c.contains("steps")) cfg.classifier.steps = c.at("steps").get<int>();
        if (c.contains("l2")) cfg.classifier.l2 = c.at("l2").get<double>();
    }
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

namespace {

std::string grid_value(double v) {
    return format_double(v, 9);
}

std::string rc_filename(const std::string& variant, double tau, double p, int seed) {
    return "rc_" + variant + "_tau" + grid_value(tau) + "_p" + grid_value(p) + "_s" +
           std::to_string(seed) + ".csv";
}

} // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();

    SynthDataset ds = make_dataset(cfg.bench);
    const std::vector<int> group_of = cfg.bench.dim_group_assignment();
    const std::vector<int> train_y = ds.train_labels();
    const std::vector<int> test_y = ds.test_labels();
    const Eigen::MatrixXd X_train = ds.train_X();
    const Eigen::MatrixXd X_test = ds.test_X();
    const Eigen::MatrixXd Z_test = ds.test_Z();
    const int K = cfg.bench.components;

    EncoderModel base = fit_ridge_encoder(X_train, ds.train_Z(), cfg.lambda_ridge);
    Eigen::MatrixXd M_star = smoothing_operator(ds.group_graph, group_of, cfg.gamma);
    EncoderModel enc_star = base.with_smoothing(M_star);

    Eigen::MatrixXd feat_train_base = encode(base, X_train, false);
    Eigen::MatrixXd feat_train_star = encode(enc_star, X_train, true);

    // classifiers are trained once on clean training features and shared by
    // the variants that use the same feature set
    SoftmaxClassifier clf_base = train_softmax(feat_train_base, train_y, cfg.classifier);
    SoftmaxClassifier clf_star = train_softmax(feat_train_star, train_y, cfg.classifier);
    Eigen::MatrixXd proto_base = class_prototypes(feat_train_base, train_y, K);
    Eigen::MatrixXd proto_star = class_prototypes(feat_train_star, train_y, K);

    SweepResult result;
    result.config = cfg;

    for (Variant variant : cfg.variants) {
        const bool structured = variant_uses_structure(variant);
        const bool uq = variant_uses_uncertainty(variant);
        const SoftmaxClassifier& clf = structured ? clf_star : clf_base;
        const Eigen::MatrixXd& protos = structured ? proto_star : proto_base;

        for (double tau : cfg.tau_grid) {
            for (double p : cfg.p_grid) {
                for (int si = 0; si < cfg.corruption_seeds; ++si) {
                    SweepRow row;
                    row.variant = to_string(variant);
                    row.tau = tau;
                    row.p = p;
                    row.corruption_seed = si;
                    try {
                        // corruption and noise seeds are independent of p and
                        // tau so cells at the same seed index are paired
                        const std::uint64_t cseed =
                            derive_seed(cfg.bench.seed, {kStreamCorrupt, static_cast<std::uint64_t>(si)});
                        const std::uint64_t nseed =
                            derive_seed(cfg.bench.seed, {kStreamTestNoise, static_cast<std::uint64_t>(si)});
                        const std::uint64_t sseed =
                            derive_seed(cfg.bench.seed, {kStreamStability, static_cast<std::uint64_t>(si)});

                        EncoderModel enc_eval = base;
                        if (structured) {
                            StructureGraph s_prime = corrupt(ds.group_graph, p, cseed);
                            enc_eval = base.with_smoothing(smoothing_operator(s_prime, group_of, cfg.gamma));
                            row.robustness = robustness(enc_star, enc_eval, X_test);
                        } else {
                            row.robustness = robustness(base, base, X_test);
                        }

                        Eigen::MatrixXd X_noisy = inject_noise(X_test, tau, nseed);
                        Eigen::MatrixXd feat_test = encode(enc_eval, X_noisy, structured);

                        EvalResult eval = evaluate_classifier(clf, feat_test, test_y);
                        row.accuracy = eval.accuracy;
                        row.ece = ece(eval.probs, test_y, kEceBins);
                        row.stability_sq = stability(enc_eval, X_test, tau, sseed, structured);
                        row.stability_unsq = stability_unsquared(enc_eval, X_test, tau, sseed, structured);

                        if (uq) {
                            // the covariance attached to the representation the
                            // variant actually deploys: smoothing maps mu to
                            // mu M^T, so Sigma maps to M Sigma M^T
                            Eigen::MatrixXd sigma_repr = base.Sigma_global;
                            if (structured)
                                sigma_repr = (*enc_eval.M_S) * base.Sigma_global *
                                             enc_eval.M_S->transpose();
                            std::vector<double> scores_v;
                            Eigen::VectorXd scores = uncertainty_scores(feat_test, sigma_repr, protos);
                            scores_v.assign(scores.data(), scores.data() + scores.size());
                            std::vector<bool> correct(test_y.size());
                            for (std::size_t i = 0; i < test_y.size(); ++i) {
                                int argmax = 0;
                                for (Eigen::Index k = 1; k < eval.probs.cols(); ++k)
                                    if (eval.probs(static_cast<Eigen::Index>(i), k) >
                                        eval.probs(static_cast<Eigen::Index>(i), argmax))
                                        argmax = static_cast<int>(k);
                                correct[i] = (argmax == test_y[i]);
                            }
                            row.curve = risk_coverage_curve(scores_v, correct);
                            row.rc_file = rc_filename(row.variant, tau, p, si);
                            row.cov50 = coverage(Z_test, feat_test, sigma_repr, kAlphas[0]).empirical;
                            row.cov90 = coverage(Z_test, feat_test, sigma_repr, kAlphas[1]).empirical;
                            row.cov95 = coverage(Z_test, feat_test, sigma_repr, kAlphas[2]).empirical;
                        }
                    } catch (const std::exception& e) {
                        row = SweepRow{};
                        row.variant = to_string(variant);
                        row.tau = tau;
                        row.p = p;
                        row.corruption_seed = si;
                        row.ok = false;
                        row.error = e.what();
                    }
                    result.rows.push_back(std::move(row));
                }
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Metric access
// ---------------------------------------------------------------------------

const std::vector<std::string>& sweep_metric_names() {
    static const std::vector<std::string> names = {
        "accuracy", "ece", "stability", "stability_unsq", "robustness",
        "coverage_0.5", "coverage_0.9", "coverage_0.95"};
    return names;
}

std::optional<double> row_metric(const SweepRow& row, const std::string& metric) {
    if (!row.ok) return std::nullopt;
    if (metric == "accuracy") return row.accuracy;
    if (metric == "ece") return row.ece;
    if (metric == "stability") return row.stability_sq;
    if (metric == "stability_unsq") return row.stability_unsq;
    if (metric == "robustness") return row.robustness;
    if (metric == "coverage_0.5") return row.cov50;
    if (metric == "coverage_0.9") return row.cov90;
    if (metric == "coverage_0.95") return row.cov95;
    throw std::invalid_argument("unknown metric: " + metric);
}

double mean_metric(const SweepResult& result, const std::string& metric,
                   const std::string& variant, double tau, double p) {
    double sum = 0.0;
    int count = 0;
    for (const SweepRow& row : result.rows) {
        if (row.variant != variant || row.tau != tau || row.p != p) continue;
        std::optional<double> v = row_metric(row, metric);
        if (v) {
            sum += *v;
            ++count;
        }
    }
    if (count == 0)
        throw std::invalid_argument("mean_metric: no values for " + metric + "/" + variant);
    return sum / count;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string sanitize_error(std::string msg) {
    for (char& ch : msg)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return msg;
}

std::string opt_field(const std::optional<double>& v) {
    return v ? format_double(*v, 9) : std::string();
}

} // namespace

std::string sweep_csv(const SweepResult& result) {
    std::string out =
        "variant,tau,p,corruption_seed,accuracy,ece,stability,stability_unsq,robustness,"
        "coverage_0.5,coverage_0.9,coverage_0.95,rc_file,error\n";
    for (const SweepRow& r : result.rows) {
        out += r.variant + "," + format_double(r.tau, 9) + "," + format_double(r.p, 9) + "," +
               std::to_string(r.corruption_seed) + ",";
        if (r.ok) {
            out += format_double(r.accuracy, 9) + "," + format_double(r.ece, 9) + "," +
                   format_double(r.stability_sq, 9) + "," + format_double(r.stability_unsq, 9) +
                   "," + format_double(r.robustness, 9) + "," + opt_field(r.cov50) + "," +
                   opt_field(r.cov90) + "," + opt_field(r.cov95) + "," + r.rc_file + ",";
        } else {
            out += ",,,,,,,,," + sanitize_error(r.error);
        }
        out += "\n";
    }
    return out;
}

void write_sweep_outputs(const SweepResult& result, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_file((std::filesystem::path(dir) / "results.csv").string(), sweep_csv(result));
    for (const SweepRow& r : result.rows) {
        if (r.curve && !r.rc_file.empty())
            write_file((std::filesystem::path(dir) / r.rc_file).string(), r.curve->to_csv());
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

SweepResult load_sweep_outputs(const std::string& dir) {
    SweepResult result;
    std::istringstream in(read_file((std::filesystem::path(dir) / "results.csv").string()));
    std::string line;
    if (!std::getline(in, line) || line.rfind("variant,", 0) != 0)
        throw std::runtime_error("load_sweep_outputs: bad results.csv header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 14) throw std::runtime_error("load_sweep_outputs: bad row: " + line);
        SweepRow row;
        row.variant = f[0];
        row.tau = std::stod(f[1]);
        row.p = std::stod(f[2]);
        row.corruption_seed = std::stoi(f[3]);
        row.error = f[13];
        row.ok = row.error.empty();
        if (row.ok) {
            row.accuracy = std::stod(f[4]);
            row.ece = std::stod(f[5]);
            row.stability_sq = std::stod(f[6]);
            row.stability_unsq = std::stod(f[7]);
            row.robustness = std::stod(f[8]);
            if (!f[9].empty()) row.cov50 = std::stod(f[9]);
            if (!f[10].empty()) row.cov90 = std::stod(f[10]);
            if (!f[11].empty()) row.cov95 = std::stod(f[11]);
            row.rc_file = f[12];
            if (!row.rc_file.empty()) {
                std::string path = (std::filesystem::path(dir) / row.rc_file).string();
                if (std::filesystem::exists(path))
                    row.curve = RiskCoverageCurve::from_csv(read_file(path));
            }
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

} // namespace relrep
