// Command-line harness: dataset generation, (p, tau) sweeps, proposition
// verification, and figure rendering.
//
// Exit codes: 0 success, 1 check failure, 2 config error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "relrep/bench.hpp"
#include "relrep/io.hpp"
#include "relrep/props.hpp"
#include "relrep/svg.hpp"
#include "relrep/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

nlohmann::json load_json(const std::string& path) {
    return nlohmann::json::parse(relrep::read_file(path));
}

int run_generate(const std::string& config_path, const std::string& out_dir, bool seed_set,
                 std::uint64_t seed) {
    relrep::BenchConfig cfg;
    if (!config_path.empty()) cfg = relrep::BenchConfig::from_json(load_json(config_path));
    if (seed_set) cfg.seed = seed;
    cfg.validate();
    relrep::SynthDataset ds = relrep::make_dataset(cfg);
    relrep::save_dataset(ds, out_dir);
    std::cout << "dataset written to " << out_dir << " (" << ds.Z_star.rows() << " samples, d="
              << cfg.latent_dim << ", m=" << cfg.obs_dim << ")\n";
    return kExitOk;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out_dir, bool seed_set,
                  std::uint64_t seed) {
    relrep::SweepConfig cfg;
    if (!config_path.empty()) cfg = relrep::SweepConfig::from_json(load_json(config_path));
    if (seed_set) cfg.bench.seed = seed;
    cfg.validate();
    relrep::SweepResult result = relrep::run_sweep(cfg);
    relrep::write_sweep_outputs(result, out_dir);
    int failed = 0;
    for (const relrep::SweepRow& row : result.rows)
        if (!row.ok) ++failed;
    std::cout << result.rows.size() << " rows written to " << out_dir;
    if (failed > 0) std::cout << " (" << failed << " cells failed, see error column)";
    std::cout << "\n";
    return kExitOk;
}

int run_verify(std::uint64_t seed) {
    relrep::PropReport report = relrep::verify_propositions(seed);
    std::cout << report.to_text();
    return report.all_passed() ? kExitOk : kExitCheckFailure;
}

int run_plot(const std::string& out_dir, const std::string& metric, const std::string& variant) {
    relrep::SweepResult result = relrep::load_sweep_outputs(out_dir);

    std::vector<std::string> metrics =
        metric.empty() ? std::vector<std::string>{"accuracy", "ece", "stability", "robustness"}
                       : std::vector<std::string>{metric};
    std::vector<std::string> variants;
    if (variant.empty()) {
        for (relrep::Variant v : result.config.variants) variants.push_back(to_string(v));
        if (variants.empty()) {
            // config is not stored in the CSV; fall back to the rows
            for (const relrep::SweepRow& r : result.rows) {
                if (std::find(variants.begin(), variants.end(), r.variant) == variants.end())
                    variants.push_back(r.variant);
            }
        }
    } else {
        variants.push_back(variant);
    }

    int written = 0;
    for (const std::string& v : variants) {
        for (const std::string& m : metrics) {
            try {
                std::string svg = relrep::render_heatmap(result, m, v);
                std::string name = "heatmap_" + m + "_" + v + ".svg";
                relrep::write_file((std::filesystem::path(out_dir) / name).string(), svg);
                ++written;
            } catch (const std::invalid_argument&) {
                // metric absent for this variant (capability gated); skip
            }
        }
        // risk-coverage chart from the first corruption seed of each cell
        std::vector<relrep::LabeledCurve> curves;
        for (const relrep::SweepRow& r : result.rows) {
            if (r.variant != v || !r.curve || r.corruption_seed != 0) continue;
            curves.push_back({"tau=" + relrep::format_double(r.tau, 3) +
                                  " p=" + relrep::format_double(r.p, 3),
                              *r.curve});
        }
        if (!curves.empty()) {
            std::string svg = relrep::render_risk_coverage_chart(curves, "risk-coverage (" + v + ")");
            relrep::write_file((std::filesystem::path(out_dir) / ("rc_" + v + ".svg")).string(), svg);
            ++written;
        }
    }
    std::cout << written << " figures written to " << out_dir << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reliable representation learning benchmark harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", metric, variant;
    std::uint64_t seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* sub, bool with_config) {
        if (with_config) sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            seed_set = true;
        });
    };

    CLI::App* gen = app.add_subcommand("generate", "generate and export a synthetic dataset");
    add_common(gen, true);
    CLI::App* sweep = app.add_subcommand("sweep", "run the (p, tau) x variant sweep");
    add_common(sweep, true);
    CLI::App* verify = app.add_subcommand("verify-props", "run the proposition verification suite");
    verify->add_option("--seed", seed, "verification seed")->each([&](const std::string&) {
        seed_set = true;
    });
    CLI::App* plot = app.add_subcommand("plot", "render figures from sweep outputs in --out");
    add_common(plot, false);
    plot->add_option("--metric", metric, "metric to plot (default: the main four)");
    plot->add_option("--variant", variant, "variant to plot (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (gen->parsed()) return run_generate(config_path, out_dir, seed_set, seed);
        if (sweep->parsed()) return run_sweep_cmd(config_path, out_dir, seed_set, seed);
        if (verify->parsed()) return run_verify(seed_set ? seed : 20260809ULL);
        if (plot->parsed()) return run_plot(out_dir, metric, variant);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailure;
    }
    return kExitConfigError;
}
