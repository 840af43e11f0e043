#include <doctest.h>

#include <cmath>

#include "relrep/props.hpp"
#include "relrep/rng.hpp"
#include "relrep/selective.hpp"

using namespace relrep;

namespace {

// two well-separated 2-D clusters
void separable_toy(Eigen::MatrixXd& F, std::vector<int>& y, int per_class, Rng& rng) {
    F.resize(2 * per_class, 2);
    y.clear();
    for (int i = 0; i < per_class; ++i) {
        F.row(i) = Eigen::RowVector2d(-4.0 + 0.3 * rng.normal(), 0.3 * rng.normal());
        y.push_back(0);
    }
    for (int i = 0; i < per_class; ++i) {
        F.row(per_class + i) = Eigen::RowVector2d(4.0 + 0.3 * rng.normal(), 0.3 * rng.normal());
        y.push_back(1);
    }
}

} // namespace

TEST_CASE("softmax training separates well-separated clusters") {
    Rng rng(51);
    Eigen::MatrixXd F;
    std::vector<int> y;
    separable_toy(F, y, 50, rng);
    SoftmaxClassifier clf = train_softmax(F, y, SoftmaxHyper{});
    EvalResult res = evaluate_classifier(clf, F, y);
    CHECK(res.accuracy == 1.0);

    for (Eigen::Index i = 0; i < res.probs.rows(); ++i)
        CHECK(std::abs(res.probs.row(i).sum() - 1.0) <= 1e-12);
}

TEST_CASE("duplicating every training point leaves the fit unchanged") {
    Rng rng(52);
    Eigen::MatrixXd F;
    std::vector<int> y;
    separable_toy(F, y, 30, rng);

    SoftmaxHyper hyper;
    hyper.steps = 200;
    SoftmaxClassifier a = train_softmax(F, y, hyper);

    Eigen::MatrixXd F2(2 * F.rows(), 2);
    F2 << F, F;
    std::vector<int> y2 = y;
    y2.insert(y2.end(), y.begin(), y.end());
    SoftmaxClassifier b = train_softmax(F2, y2, hyper);
    CHECK((a.V - b.V).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((a.c - b.c).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("softmax training is deterministic and validates input") {
    Rng rng(53);
    Eigen::MatrixXd F;
    std::vector<int> y;
    separable_toy(F, y, 20, rng);
    SoftmaxClassifier a = train_softmax(F, y, SoftmaxHyper{});
    SoftmaxClassifier b = train_softmax(F, y, SoftmaxHyper{});
    CHECK((a.V - b.V).cwiseAbs().maxCoeff() == 0.0);

    std::vector<int> bad = y;
    bad[0] = -1;
    CHECK_THROWS_AS(train_softmax(F, bad, SoftmaxHyper{}), std::invalid_argument);
    std::vector<int> one_class(y.size(), 0);
    CHECK_THROWS_AS(train_softmax(F, one_class, SoftmaxHyper{}), std::invalid_argument);
}

TEST_CASE("evaluation accuracy endpoints and tie breaking") {
    SoftmaxClassifier clf;
    clf.V = Eigen::MatrixXd::Zero(2, 2);
    clf.c = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd F = Eigen::MatrixXd::Random(10, 2);

    // all logits tie; the lowest class index wins
    std::vector<int> zeros(10, 0);
    CHECK(evaluate_classifier(clf, F, zeros).accuracy == 1.0);
    std::vector<int> ones(10, 1);
    CHECK(evaluate_classifier(clf, F, ones).accuracy == 0.0);

    clf.c << 0.0, 1.0; // class 1 always wins now
    CHECK(evaluate_classifier(clf, F, ones).accuracy == 1.0);
    CHECK(evaluate_classifier(clf, F, zeros).accuracy == 0.0);

    std::vector<int> short_labels(9, 0);
    CHECK_THROWS_AS(evaluate_classifier(clf, F, short_labels), std::invalid_argument);
}

TEST_CASE("argmax predictions are invariant under constant logit shifts") {
    Rng rng(54);
    Eigen::MatrixXd F = random_matrix(50, 3, rng);
    SoftmaxClassifier clf;
    clf.V = random_matrix(3, 4, rng);
    clf.c = random_matrix(4, 1, rng);
    std::vector<int> y(50, 0);
    EvalResult base = evaluate_classifier(clf, F, y);

    SoftmaxClassifier shifted = clf;
    shifted.c.array() += 13.7;
    EvalResult moved = evaluate_classifier(shifted, F, y);
    CHECK(base.accuracy == moved.accuracy);
    for (Eigen::Index i = 0; i < F.rows(); ++i) {
        Eigen::Index a, b;
        base.probs.row(i).maxCoeff(&a);
        moved.probs.row(i).maxCoeff(&b);
        CHECK(a == b);
    }
}

TEST_CASE("ece closed forms") {
    // all predictions fully confident and correct
    Eigen::MatrixXd probs(4, 2);
    probs << 1, 0, 1, 0, 1, 0, 1, 0;
    std::vector<int> labels{0, 0, 0, 0};
    CHECK(ece(probs, labels, 15) == 0.0);

    // fully confident, half correct
    std::vector<int> half{0, 0, 1, 1};
    CHECK(ece(probs, half, 15) == doctest::Approx(0.5).epsilon(1e-12));

    // calibrated 0.7 predictor
    const int n = 1000;
    Eigen::MatrixXd p7(n, 2);
    std::vector<int> y7;
    for (int i = 0; i < n; ++i) {
        p7.row(i) = Eigen::RowVector2d(0.7, 0.3);
        y7.push_back(i < 700 ? 0 : 1);
    }
    CHECK(ece(p7, y7, 15) <= 1.0 / n + 1e-12);

    CHECK_THROWS_AS(ece(probs, labels, 0), std::invalid_argument);
    Eigen::MatrixXd bad(1, 2);
    bad << 0.9, 0.2;
    CHECK_THROWS_AS(ece(bad, std::vector<int>{0}, 10), std::invalid_argument);
}

TEST_CASE("ece of a perfectly calibrated synthetic predictor vanishes with n") {
    Rng rng(55);
    const int n = 50000, K = 3;
    Eigen::MatrixXd probs(n, K);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // random probability vector, then draw the label from it
        double a = rng.uniform(), b = rng.uniform();
        double lo = std::min(a, b), hi = std::max(a, b);
        probs.row(i) = Eigen::RowVector3d(lo, hi - lo, 1.0 - hi);
        labels[static_cast<std::size_t>(i)] =
            rng.categorical({probs(i, 0), probs(i, 1), probs(i, 2)});
    }
    CHECK(ece(probs, labels, 15) < 0.02);
}

TEST_CASE("uncertainty score margin semantics") {
    Eigen::MatrixXd protos(3, 2);
    protos << 0, 0, 10, 0, 0, 10;
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);

    // at a prototype the margin is strongly negative; on a boundary it is 0
    Eigen::VectorXd at_proto(2), midpoint(2);
    at_proto << 0, 0;
    midpoint << 5, 0;
    double u_proto = uncertainty_score(at_proto, sigma, protos);
    double u_mid = uncertainty_score(midpoint, sigma, protos);
    CHECK(u_proto < u_mid);
    CHECK(u_mid == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(u_proto == doctest::Approx(-100.0).epsilon(1e-9)); // 0 - 10^2

    CHECK_THROWS_AS(uncertainty_score(at_proto, sigma, protos.topRows(1)), std::invalid_argument);
    Eigen::MatrixXd notspd(2, 2);
    notspd << 1, 2, 2, 1;
    CHECK_THROWS_AS(uncertainty_score(at_proto, notspd, protos), std::invalid_argument);
}

TEST_CASE("scaling the covariance rescales scores and keeps the ranking") {
    Rng rng(56);
    Eigen::MatrixXd protos = random_matrix(4, 3, rng);
    Eigen::MatrixXd sigma = random_spd(3, rng);
    Eigen::MatrixXd mus = random_matrix(40, 3, rng);

    Eigen::VectorXd s1 = uncertainty_scores(mus, sigma, protos);
    Eigen::VectorXd s2 = uncertainty_scores(mus, Eigen::MatrixXd(2.0 * sigma), protos);
    for (int i = 0; i < 40; ++i) CHECK(s2(i) == doctest::Approx(s1(i) / 2.0).epsilon(1e-9));
    for (int i = 0; i < 40; ++i)
        for (int j = i + 1; j < 40; ++j) CHECK((s1(i) < s1(j)) == (s2(i) < s2(j)));
}

TEST_CASE("class prototypes are per-class means") {
    Eigen::MatrixXd F(4, 2);
    F << 0, 0, 2, 2, 10, 0, 12, 0;
    std::vector<int> y{0, 0, 1, 1};
    Eigen::MatrixXd P = class_prototypes(F, y, 2);
    CHECK(P(0, 0) == 1.0);
    CHECK(P(0, 1) == 1.0);
    CHECK(P(1, 0) == 11.0);
    CHECK_THROWS_AS(class_prototypes(F, y, 3), std::invalid_argument); // empty class 2
}

TEST_CASE("risk coverage curve from booleans") {
    RiskCoverageCurve c =
        risk_coverage_curve({1.0, 2.0, 3.0, 4.0}, std::vector<bool>{true, true, false, false});
    REQUIRE(c.points.size() == 4);
    CHECK(c.points[0].coverage == 0.25);
    CHECK(c.points[0].risk == 0.0);
    CHECK(c.points[1].risk == 0.0);
    CHECK(c.points[2].risk == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(c.points[3].risk == 0.5);

    RiskCoverageCurve all_ok = risk_coverage_curve({3.0, 1.0, 2.0}, std::vector<bool>{true, true, true});
    for (const auto& p : all_ok.points) CHECK(p.risk == 0.0);

    CHECK_THROWS_AS(risk_coverage_curve({1.0}, std::vector<bool>{}), std::invalid_argument);
}

TEST_CASE("ties are broken by original index") {
    // equal scores: the earlier point is accepted first
    RiskCoverageCurve c = risk_coverage_curve({1.0, 1.0}, std::vector<bool>{false, true});
    CHECK(c.points[0].risk == 1.0); // index 0 (incorrect) enters first
}

TEST_CASE("comonotone instances give exactly non-decreasing curves") {
    Rng rng(57);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform_index(200));
        std::vector<double> risks(static_cast<std::size_t>(n)), scores(static_cast<std::size_t>(n));
        for (double& r : risks) r = static_cast<double>(rng.uniform_index(1025)) / 1024.0;
        std::sort(risks.begin(), risks.end());
        double acc = 0.0;
        for (double& s : scores) s = (acc += 1.0 + rng.uniform());
        RiskCoverageCurve c = risk_coverage_curve(scores, risks);
        for (std::size_t k = 1; k < c.points.size(); ++k)
            CHECK(c.points[k].risk >= c.points[k - 1].risk);
    }
}

TEST_CASE("optimal selective risk by exhaustive enumeration") {
    CHECK(optimal_selective_risk({0.9, 0.1, 0.5}, 2) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(optimal_selective_risk({0.9, 0.1, 0.5}, 3) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(optimal_selective_risk({0.5}, 2), std::invalid_argument);
    CHECK_THROWS_AS(optimal_selective_risk({0.5}, 0), std::invalid_argument);
    CHECK_THROWS_AS(optimal_selective_risk(std::vector<double>(13, 0.5), 1), std::invalid_argument);

    // exhaustive minimum equals the bottom-k mean, exactly, on dyadic risks
    Rng rng(58);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform_index(12));
        std::vector<double> risks(static_cast<std::size_t>(n));
        for (double& r : risks) r = static_cast<double>(rng.uniform_index(1025)) / 1024.0;
        std::vector<double> scores = risks; // perfect ranking
        RiskCoverageCurve c = risk_coverage_curve(scores, risks);
        for (int k = 1; k <= n; ++k)
            CHECK(c.points[static_cast<std::size_t>(k - 1)].risk == optimal_selective_risk(risks, k));
    }
}

TEST_CASE("risk coverage csv round trip") {
    RiskCoverageCurve c =
        risk_coverage_curve({1.0, 2.0, 3.0}, std::vector<bool>{true, false, true});
    RiskCoverageCurve back = RiskCoverageCurve::from_csv(c.to_csv());
    REQUIRE(back.points.size() == c.points.size());
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        // the curve format carries 9 significant digits
        CHECK(back.points[i].coverage == doctest::Approx(c.points[i].coverage).epsilon(1e-9));
        CHECK(back.points[i].risk == doctest::Approx(c.points[i].risk).epsilon(1e-9));
    }
    CHECK(back.risk_at_coverage(1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}
