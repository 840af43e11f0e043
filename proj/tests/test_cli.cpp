// End-to-end smoke test of the CLI binary: subcommands, file outputs and the
// documented exit codes (0 success, 1 check failure, 2 config error).
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "relrep/io.hpp"

#ifndef RELREP_CLI_PATH
#error "RELREP_CLI_PATH must be defined by the build"
#endif

namespace {

const std::string cli = RELREP_CLI_PATH;

int run(const std::string& args) {
    int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const char* name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_CASE("generate exports a loadable dataset") {
    TempDir dir("relrep_cli_gen");
    relrep::write_file(dir.str() + "/bench.json",
                       "{\"n_train\": 120, \"n_test\": 80, \"seed\": 3}\n");
    CHECK(run("generate --config " + dir.str() + "/bench.json --out " + dir.str() + "/ds") == 0);
    for (const char* f : {"Z_star.csv", "labels.csv", "X.csv", "group_graph.txt", "dataset.json"})
        CHECK(std::filesystem::exists(dir.path / "ds" / f));
}

TEST_CASE("sweep then plot produce results and figures") {
    TempDir dir("relrep_cli_sweep");
    relrep::write_file(dir.str() + "/sweep.json",
                       "{\"bench\": {\"n_train\": 150, \"n_test\": 100, \"seed\": 4},"
                       " \"tau_grid\": [0, 1.0], \"p_grid\": [0, 0.2],"
                       " \"corruption_seeds\": 1, \"classifier\": {\"steps\": 100}}\n");
    CHECK(run("sweep --config " + dir.str() + "/sweep.json --out " + dir.str() + "/sw") == 0);
    CHECK(std::filesystem::exists(dir.path / "sw" / "results.csv"));

    CHECK(run("plot --out " + dir.str() + "/sw --metric accuracy --variant full") == 0);
    CHECK(std::filesystem::exists(dir.path / "sw" / "heatmap_accuracy_full.svg"));
}

TEST_CASE("verify-props succeeds and reports five sections") {
    CHECK(run("verify-props --seed 3") == 0);
}

TEST_CASE("config errors exit with status 2") {
    TempDir dir("relrep_cli_bad");
    relrep::write_file(dir.str() + "/bad.json", "{\"bogus\": 1}\n");
    CHECK(run("sweep --config " + dir.str() + "/bad.json --out " + dir.str() + "/x") == 2);
    relrep::write_file(dir.str() + "/notjson.json", "{{{{\n");
    CHECK(run("generate --config " + dir.str() + "/notjson.json --out " + dir.str() + "/y") == 2);
    CHECK(run("definitely-not-a-subcommand") == 2);
}
