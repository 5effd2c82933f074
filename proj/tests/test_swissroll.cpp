#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "graphdenoise/error.hpp"
#include "graphdenoise/swissroll.hpp"

using namespace gd;
using namespace gd::swissroll;

namespace {

// Antiderivative of sqrt(1 + a^2).
double arc(double a) { return 0.5 * (a * std::sqrt(1.0 + a * a) + std::asinh(a)); }

}  // namespace

TEST_CASE("embedding and normals") {
    const auto x = embed(kMinA, 0.0);
    CHECK(x(0) == doctest::Approx(-kMinA));
    CHECK(std::abs(x(1)) == 0.0);
    CHECK(std::abs(x(2)) <= 1e-15);

    const auto s = sample_swiss_roll(300, 5);
    CHECK(s.params(0, 0) == kMinA);
    CHECK(s.params(0, 1) == 0.0);
    for (NodeId i = 0; i < s.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        const double a = s.params(row, 0);
        const double b = s.params(row, 1);
        CHECK(a >= kMinA);
        CHECK(a <= kMaxA);
        CHECK(b >= 0.0);
        CHECK(b <= kMaxB);
        const Eigen::Vector3d n = s.normals.row(row).transpose();
        CHECK(std::abs(n.norm() - 1.0) <= 1e-12);
        CHECK(std::abs(n.dot(tangent_a(a))) <= 1e-10);
        CHECK(std::abs(n.dot(tangent_b())) <= 1e-10);
        CHECK((s.points.row(row).transpose() - embed(a, b)).norm() == 0.0);
    }
}

TEST_CASE("sampling density follows the area element") {
    const auto s = sample_swiss_roll(10'000, 99);
    constexpr int bins = 30;
    std::vector<double> observed(bins, 0.0);
    const double width = (kMaxA - kMinA) / bins;
    // Skip the pinned first point.
    for (Eigen::Index i = 1; i < s.params.rows(); ++i) {
        const int bin = std::min(bins - 1, static_cast<int>((s.params(i, 0) - kMinA) / width));
        observed[static_cast<std::size_t>(bin)] += 1.0;
    }
    const double total = arc(kMaxA) - arc(kMinA);
    const double count = static_cast<double>(s.params.rows() - 1);
    double chi2 = 0.0;
    for (int k = 0; k < bins; ++k) {
        const double lo = kMinA + k * width;
        const double expected = count * (arc(lo + width) - arc(lo)) / total;
        chi2 += (observed[static_cast<std::size_t>(k)] - expected) *
                (observed[static_cast<std::size_t>(k)] - expected) / expected;
    }
    const boost::math::chi_squared dist(bins - 1);
    const double p = boost::math::cdf(boost::math::complement(dist, chi2));
    MESSAGE("chi2 " << chi2 << " p " << p);
    CHECK(p > 0.01);
}

TEST_CASE("noise") {
    const auto s = sample_swiss_roll(200, 6);
    const auto zero = add_normal_noise(s, 0.0, 7);
    CHECK((zero.noisy.array() == s.points.array()).all());

    const auto noisy = add_normal_noise(s, 1.5, 7);
    for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
        const double u = noisy.u[static_cast<std::size_t>(i)];
        CHECK(std::abs(u) <= 1.0);
        CHECK((noisy.noisy.row(i) - s.points.row(i)).norm() == doctest::Approx(1.5 * std::abs(u)));
    }
    const auto again = add_normal_noise(s, 1.5, 7);
    CHECK((again.noisy.array() == noisy.noisy.array()).all());
}

TEST_CASE("true geodesic") {
    const Eigen::Vector2d p(5.0, 3.0);
    CHECK(true_geodesic(p, p) == 0.0);
    CHECK(true_geodesic({6.0, 2.0}, {6.0, 19.5}) == doctest::Approx(17.5).epsilon(1e-12));
    for (auto [a0, a1] : {std::pair{kMinA, kMaxA}, std::pair{4.0, 4.5}, std::pair{9.0, 7.0}})
        CHECK(std::abs(true_geodesic({a0, 8.0}, {a1, 8.0}) - std::abs(arc(a1) - arc(a0))) <= 1e-8);

    const Eigen::Vector2d a(4.0, 1.0);
    const Eigen::Vector2d b(11.0, 17.0);
    CHECK(std::abs(true_geodesic(a, b) - true_geodesic(b, a)) <= 1e-8);
    for (double t : {0.2, 0.5, 0.9}) {
        const Eigen::Vector2d m = a + t * (b - a);
        CHECK(std::abs(true_geodesic(a, m) + true_geodesic(m, b) - true_geodesic(a, b)) <= 2e-8);
    }
}

TEST_CASE("mean error") {
    Eigen::MatrixXd truth = Eigen::MatrixXd::Random(5, 20).cwiseAbs() * 10.0;
    CHECK(mean_error(truth, truth, 100.0) == 0.0);
    CHECK(mean_error(truth, truth.array() + 1.0, 100.0) == doctest::Approx(1.0));

    Eigen::MatrixXd est = truth;
    est(2, 3) = kInfinity;
    bool capped = false;
    const double e = mean_error(truth, est, 50.0, &capped);
    CHECK(capped);
    CHECK(e == doctest::Approx(50.0 / 100.0));
}

TEST_CASE("bridge labels") {
    const auto s = sample_swiss_roll(500, 13);
    const auto clean = build_ball_graph(PointCloud(s.points), 4.0);
    CHECK(count_bridges(clean, s) == 0);

    const auto noise = add_normal_noise(s, 1.8, 14);
    const auto g = build_ball_graph(PointCloud(noise.noisy), 4.0);
    const auto labels = label_bridges(g, s);
    // The shortcut bounds must agree with direct quadrature.
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const auto& edge = g.edge(e);
        CHECK(labels[e] == (true_geodesic(s.param(edge.u), s.param(edge.v)) > 5.0 * edge.cost));
    }
    CHECK_THROWS_AS(count_bridges(g, s, 1.0), InvalidParameter);
}

TEST_CASE("reference nodes are distinct and near their anchors") {
    const auto s = sample_swiss_roll(500, 15);
    const auto refs = reference_nodes(s);
    REQUIRE(refs.size() == 5);
    CHECK(refs[0] == 0);
    std::vector<NodeId> sorted(refs);
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
}

TEST_CASE("single clean trial measures discretization error only") {
    BenchmarkConfig cfg;
    cfg.mu = {0.0};
    cfg.trials = 1;
    cfg.methods = {{Rule::None, 1.0}};
    const auto report = run_benchmark(cfg);
    const auto& agg = report.aggregate(0.0, cfg.methods[0]);
    MESSAGE("E " << agg.mean_error);
    CHECK(agg.mean_error > 0.0);
    CHECK(agg.mean_error < 2.0);
    CHECK(agg.disconnected_trials == 0);
    CHECK(report.median_true_bridges(0.0) == 0.0);
}

TEST_CASE("shortest paths at low noise") {
    BenchmarkConfig cfg;
    cfg.mu = {0.1};
    cfg.trials = 20;
    cfg.methods = {{Rule::None, 1.0}};
    const auto report = run_benchmark(cfg);
    const double e = report.aggregate(0.1, cfg.methods[0]).mean_error;
    MESSAGE("E_SP(0.1) " << e);
    CHECK(e >= 0.4);
    CHECK(e <= 1.6);
    for (const auto& r : report.records) {
        CHECK(r.error >= 0.0);
        CHECK(r.bridges_flagged == 0);
    }
}

TEST_CASE("benchmark output layout") {
    BenchmarkConfig cfg;
    cfg.n = 200;
    cfg.mu = {1.0};
    cfg.trials = 1;
    cfg.methods = {{Rule::None, 1.0}, {Rule::LDR, 0.92}, {Rule::NPDR, 0.95}};
    const auto report = run_benchmark(cfg);
    CHECK(report.records.size() == 3);
    CHECK(report.aggregates.size() == 3);

    std::ostringstream trials;
    write_trials_csv(trials, report);
    std::istringstream lines(trials.str());
    std::string line;
    std::size_t data = 0;
    bool header_seen = false;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            CHECK(line == "mu,rule,q,trial,E,bridges_flagged,bridges_true,disconnected");
            header_seen = true;
            continue;
        }
        ++data;
    }
    CHECK(data == 3);

    std::ostringstream table;
    write_error_table(table, report);
    CHECK(table.str().find("SP") != std::string::npos);
    CHECK(table.str().find("NPDR") != std::string::npos);
}

TEST_CASE("benchmark is deterministic") {
    BenchmarkConfig cfg;
    cfg.n = 200;
    cfg.mu = {0.5, 1.5};
    cfg.trials = 2;
    cfg.methods = {{Rule::None, 1.0}, {Rule::NPDR, 0.95}};
    std::ostringstream a, b;
    write_trials_csv(a, run_benchmark(cfg));
    write_trials_csv(b, run_benchmark(cfg));
    CHECK(a.str() == b.str());
}
