#include <doctest.h>

#include "relrep/graph.hpp"
#include "relrep/linalg.hpp"
#include "relrep/props.hpp"
#include "relrep/rng.hpp"

using namespace relrep;

TEST_CASE("the report lists exactly 5 proposition sections") {
    PropReport report = verify_propositions(20260809);
    CHECK(report.sections.size() == 5);
    for (const PropSection& s : report.sections) CHECK(!s.checks.empty());
}

TEST_CASE("all propositions pass on the default seed") {
    PropReport report = verify_propositions(20260809);
    for (const PropSection& s : report.sections) {
        INFO(s.title);
        CHECK(s.passed());
    }
    CHECK(report.all_passed());
    std::string text = report.to_text();
    CHECK(text.find("FAIL") == std::string::npos);
    CHECK(text.find("all propositions verified") != std::string::npos);
}

TEST_CASE("a sign-flipped Laplacian is caught by the identity check") {
    Rng rng(71);
    StructureGraph g = random_graph(8, 0.5, rng);
    Eigen::MatrixXd Z = random_matrix(8, 3, rng);
    Eigen::MatrixXd L = laplacian(g);

    CHECK(laplacian_identity_rel_gap(L, g, Z) <= 1e-10);
    CHECK(laplacian_identity_rel_gap(Eigen::MatrixXd(-L), g, Z) > 1e-6);
    CHECK(min_symmetric_eigenvalue(Eigen::MatrixXd(-L)) < -1e-9);
}

TEST_CASE("the KS helper flags a wrong distribution") {
    Rng rng(72);
    std::vector<double> uniform_draws(20000);
    for (double& v : uniform_draws) v = rng.uniform() * 4.0;
    // uniform on [0,4] is far from chi^2_4
    CHECK(ks_distance_chi2(std::move(uniform_draws), 4) > 0.1);

    std::vector<double> chi2ish(20000);
    for (double& v : chi2ish) {
        double a = rng.normal(), b = rng.normal();
        v = a * a + b * b;
    }
    CHECK(ks_distance_chi2(std::move(chi2ish), 2) < 0.02);
}

TEST_CASE("different seeds still verify") {
    PropReport report = verify_propositions(7);
    CHECK(report.all_passed());
}
