// Experiment orchestration: the four-variant (p, tau) sweep, CSV emission,
// and deterministic per-cell seed derivation.
#ifndef RELREP_SWEEP_HPP
#define RELREP_SWEEP_HPP

#include <optional>
#include <string>
#include <vector>

#include "relrep/bench.hpp"
#include "relrep/selective.hpp"

#include <nlohmann/json_fwd.hpp>

namespace relrep {

enum class Variant { Baseline, UqOnly, StructureOnly, Full };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);
bool variant_uses_structure(Variant v);
bool variant_uses_uncertainty(Variant v);

struct SweepConfig {
    BenchConfig bench;
    std::vector<double> tau_grid{0.0, 0.5, 1.0, 2.0};
    std::vector<double> p_grid{0.0, 0.1, 0.2, 0.4};
    std::vector<Variant> variants{Variant::Baseline, Variant::UqOnly, Variant::StructureOnly,
                                  Variant::Full};
    int corruption_seeds = 5; ///< corruption draws per p
    double gamma = 1.0;       ///< smoothing strength
    double lambda_ridge = 1e-3;
    SoftmaxHyper classifier;

    void validate() const;
    nlohmann::json to_json() const;
    static SweepConfig from_json(const nlohmann::json& j);
};

/// One result row per (variant, tau, p, corruption seed). Metrics gated by
/// variant capability are absent rather than zero; rows from failed cells
/// carry an error marker and no metrics.
struct SweepRow {
    std::string variant;
    double tau = 0.0;
    double p = 0.0;
    int corruption_seed = 0;
    bool ok = true;
    std::string error;

    double accuracy = 0.0;
    double ece = 0.0;
    double stability_sq = 0.0;
    double stability_unsq = 0.0;
    double robustness = 0.0;
    std::optional<double> cov50, cov90, cov95;
    std::optional<RiskCoverageCurve> curve;
    std::string rc_file; ///< relative path of the exported curve, if any
};

struct SweepResult {
    SweepConfig config;
    std::vector<SweepRow> rows; ///< sorted by (variant, tau, p, seed)
};

/// Runs the full grid. Every cell is a pure function of (config, derived
/// seeds); rows come out in canonical order regardless of evaluation order.
SweepResult run_sweep(const SweepConfig& cfg);

/// Metric accessor by column name; absent for gated or failed cells.
std::optional<double> row_metric(const SweepRow& row, const std::string& metric);

/// Mean of a metric over corruption seeds at one (variant, tau, p) cell.
/// Throws if no row carries the metric there.
double mean_metric(const SweepResult& result, const std::string& metric,
                   const std::string& variant, double tau, double p);

const std::vector<std::string>& sweep_metric_names();

/// results.csv plus one rc_*.csv per emitted risk-coverage curve.
void write_sweep_outputs(const SweepResult& result, const std::string& dir);
std::string sweep_csv(const SweepResult& result);

/// Reads back a directory written by write_sweep_outputs (curves included).
SweepResult load_sweep_outputs(const std::string& dir);

} // namespace relrep

#endif
