// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <array>
#include <chrono>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <Eigen/Eigenvalues>

#include "graphdenoise/kernels.hpp"
#include "graphdenoise/parallel.hpp"
#include "graphdenoise/rules.hpp"
#include "graphdenoise/swissroll.hpp"
#include "graphdenoise/tomography.hpp"
#include "support.hpp"

using namespace gd;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Real eigen decomposition of a matrix with real spectrum, sorted ascending.
struct RealEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    double max_imag = 0.0;
};

RealEigen real_eigen(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    const auto n = m.rows();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        return es.eigenvalues()(a).real() < es.eigenvalues()(b).real();
    });
    RealEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto src = idx[static_cast<std::size_t>(k)];
        out.values(k) = es.eigenvalues()(src).real();
        out.max_imag = std::max(out.max_imag, std::abs(es.eigenvalues()(src).imag()));
        // A real eigenvalue has an eigenvector that is real up to a complex phase.
        Eigen::VectorXcd v = es.eigenvectors().col(src);
        Eigen::Index big = 0;
        v.cwiseAbs().maxCoeff(&big);
        v *= std::conj(v(big)) / std::abs(v(big));
        out.vectors.col(k) = v.real().normalized();
    }
    return out;
}

double sin_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ua = a.normalized();
    const Eigen::VectorXd ub = b.normalized();
    return (ub - ua * ua.dot(ub)).norm();
}

NNGraph graph_of(const DiffusionKernel& k) {
    std::vector<Edge> edges;
    const auto pd = k.p.to_dense();
    for (Eigen::Index i = 0; i < pd.rows(); ++i)
        for (Eigen::Index j = i + 1; j < pd.cols(); ++j)
            if (pd(i, j) != 0.0) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
    return NNGraph(k.size(), edges);
}

void spectral_lemma() {
    const auto t0 = Clock::now();
    const auto battery = testing::kernel_battery(25);
    double value_dev = 0.0;
    double angle = 0.0;
    std::size_t simple = 0;
    for (const auto& k : battery) {
        const auto pe = real_eigen(k.p.to_dense());
        for (double p : {0.01, 0.1, 0.5}) {
            const auto ne = real_eigen(*neighbor_probability_dense(k, p).dense);
            // The map lambda -> p / (1 - (1-p) lambda) is increasing, so sorted orders agree.
            for (Eigen::Index i = 0; i < pe.values.size(); ++i) {
                const double want = p / (1.0 - (1.0 - p) * pe.values(i));
                value_dev = std::max(value_dev, std::abs(ne.values(i) - want));
            }
            for (Eigen::Index i = 0; i < pe.values.size(); ++i) {
                double gap = kInfinity;
                if (i > 0) gap = std::min(gap, pe.values(i) - pe.values(i - 1));
                if (i + 1 < pe.values.size()) gap = std::min(gap, pe.values(i + 1) - pe.values(i));
                if (gap < 1e-4) continue;
                ++simple;
                angle = std::max(angle, sin_angle(pe.vectors.col(i), ne.vectors.col(i)));
            }
        }
    }
    const double secs = seconds_since(t0);
    report(value_dev <= 1e-8 && angle <= 1e-6 && secs < 30.0, "spectral lemma",
           "eigenvalue dev " + fmt(value_dev) + ", max sin angle " + fmt(angle) + " over " +
               std::to_string(simple) + " simple pairs, " + fmt(secs) + " s");
}

void kernel_spectrum() {
    double lo = kInfinity, hi = -kInfinity, imag = 0.0;
    for (const auto& k : testing::kernel_battery(25)) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(k.p.to_dense(), false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            lo = std::min(lo, es.eigenvalues()(i).real());
            hi = std::max(hi, es.eigenvalues()(i).real());
            imag = std::max(imag, std::abs(es.eigenvalues()(i).imag()));
        }
    }
    report(lo >= -1e-10 && hi <= 1.0 + 1e-10 && imag <= 1e-10, "kernel spectrum",
           "range [" + fmt(lo) + ", " + fmt(hi) + "], max imag " + fmt(imag));
}

void series_oracle() {
    double dev = 0.0;
    for (const auto& k : testing::kernel_battery(25, 40))
        for (double p : {0.01, 0.1, 0.5})
            dev = std::max(dev, max_abs(*neighbor_probability_dense(k, p).dense -
                                        neighbor_probability_series(k, p, 1e-12)));
    report(dev <= 1e-8, "series oracle", "max deviation " + fmt(dev));
}

void identities() {
    double dev = 0.0;
    for (const auto& k : testing::kernel_battery(25))
        for (double p : {0.01, 0.1, 0.5}) dev = std::max(dev, regularized_laplacian_identity_check(k, p).max());
    report(dev <= 1e-10, "algebraic identities", "max deviation " + fmt(dev));
}

void betweenness() {
    double dev = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t n = 4 + seed % 9;
        // Even seeds use small integer weights so that equal-length paths occur.
        const auto g = seed % 2 == 0
                           ? testing::random_connected_graph(n, n, 500 + seed,
                                                             [](std::mt19937_64& r) {
                                                                 return static_cast<double>(1 + r() % 3);
                                                             })
                           : testing::random_connected_graph(n, n, 500 + seed);
        const auto got = edge_betweenness(g);
        const auto want = testing::brute_force_betweenness(g, g.costs());
        for (std::size_t e = 0; e < got.size(); ++e) dev = std::max(dev, std::abs(got[e] - want[e]));
    }
    report(dev <= 1e-9, "betweenness exactness", "max deviation " + fmt(dev) + " on 50 graphs");
}

void shortest_paths() {
    double dev = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t n = 10 + 2 * seed;
        const auto g = testing::random_connected_graph(n, 2 * n, 900 + seed);
        const auto fw = testing::floyd_warshall(g, g.costs());
        for (NodeId s = 0; s < n; ++s) {
            const auto d = dijkstra_sssp(g, s);
            for (NodeId j = 0; j < n; ++j)
                dev = std::max(dev, std::abs(d[j] - fw(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j))));
        }
    }
    report(dev <= 1e-12, "shortest-path oracle", "max deviation " + fmt(dev) + " on 20 graphs");
}

void low_rank() {
    double dev = 0.0;
    auto all = testing::kernel_battery(10);
    for (auto& k : testing::sparse_kernel_battery(10)) all.push_back(std::move(k));
    for (const auto& k : all) {
        const auto g = graph_of(k);
        const auto dense = edge_scores_dense(*neighbor_probability_dense(k, 0.01).dense, g);
        const auto low = edge_scores_lowrank(k, 0.01, k.size(), g);
        for (std::size_t e = 0; e < dense.size(); ++e) dev = std::max(dev, std::abs(dense[e] - low[e]));
    }

    // Pilot with the default median-half scale: Spearman 0.419 here, 0.39-0.59 across
    // mu in {0, 0.5, 1, 1.54} and three seeds. Unit affinities give 0.94-0.98.
    const auto sample = swissroll::sample_swiss_roll(300, derive_seed(11, 0));
    const auto noisy = swissroll::add_normal_noise(sample, 1.54, derive_seed(11, 1));
    const auto g = build_ball_graph(PointCloud(noisy.noisy), 4.0);
    const auto k = diffusion_kernel(g, default_epsilon(g));
    const auto dense = edge_scores_dense(*neighbor_probability_dense(k, 0.01).dense, g);
    const auto low = edge_scores_lowrank(k, 0.01, 20, g);
    const double rho = testing::spearman(dense, low);
    report(dev <= 1e-6 && rho >= 0.9, "low-rank fidelity",
           "J=n max deviation " + fmt(dev) + ", J=20 Spearman " + fmt(rho) + " on " +
               std::to_string(g.edge_count()) + " edges");
}

void swiss_table() {
    const auto t0 = Clock::now();
    using swissroll::Method;
    const Method sp{Rule::None, 1.0};
    const Method ecdr99{Rule::ECDR, 0.99};
    const Method npdr99{Rule::NPDR, 0.99};
    const Method npdr92{Rule::NPDR, 0.92};

    auto run = [](double mu, std::vector<Method> methods) {
        swissroll::BenchmarkConfig cfg;
        cfg.mu = {mu};
        cfg.methods = std::move(methods);
        return swissroll::run_benchmark(cfg);
    };
    const auto low = run(0.10, {sp});
    const auto mid = run(1.54, {sp, ecdr99, npdr99});
    const auto high = run(1.85, {npdr92, npdr99});

    const double e_sp_low = low.aggregate(0.10, sp).mean_error;
    const double e_sp = mid.aggregate(1.54, sp).mean_error;
    const double e_ecdr = mid.aggregate(1.54, ecdr99).mean_error;
    const double e_npdr = mid.aggregate(1.54, npdr99).mean_error;
    const double e92 = high.aggregate(1.85, npdr92).mean_error;
    const double e99 = high.aggregate(1.85, npdr99).mean_error;
    const double secs = seconds_since(t0);

    const bool a = e_sp_low <= 1.6;
    const bool b = e_npdr < e_ecdr && e_ecdr < e_sp && e_npdr >= 1.0 && e_npdr <= 5.0;
    const bool c = e92 < e99;
    report(a && b && c && secs < 300.0, "swiss-roll table",
           "mu=0.10 SP " + fmt(e_sp_low) + "; mu=1.54 NPDR.99 " + fmt(e_npdr) + " ECDR.99 " + fmt(e_ecdr) +
               " SP " + fmt(e_sp) + " (medians NPDR.99 " + fmt(mid.aggregate(1.54, npdr99).median_error) +
               " ECDR.99 " + fmt(mid.aggregate(1.54, ecdr99).median_error) + "); mu=1.85 NPDR.92 " + fmt(e92) + " NPDR.99 " + fmt(e99) + "; " +
               fmt(secs) + " s");
}

void bridge_counts() {
    swissroll::BenchmarkConfig cfg;
    cfg.mu = {1.44, 1.54, 1.64, 1.74, 1.85, 1.90};
    const auto medians = swissroll::median_bridge_counts(cfg);
    bool increasing = true;
    std::string detail;
    for (std::size_t i = 0; i < medians.size(); ++i) {
        if (i > 0 && !(medians[i] > medians[i - 1])) increasing = false;
        detail += (i ? ", " : "") + fmt(cfg.mu[i]) + ":" + fmt(medians[i]);
    }
    const double at154 = medians[1];
    report(at154 >= 10.0 && at154 <= 35.0 && increasing, "bridge counts", "medians " + detail);
}

void tomography() {
    const auto t0 = Clock::now();
    const tomo::BenchmarkConfig cfg;
    const auto results = tomo::run_benchmark(cfg);
    std::size_t fewer = 0;
    std::vector<double> rho_npdr, rho_jdr;
    std::string detail;
    for (const auto& r : results) {
        const auto& best = r.jdr[r.jdr_best];
        if (r.npdr.disconnected <= best.disconnected) ++fewer;
        rho_npdr.push_back(r.npdr.rho);
        rho_jdr.push_back(best.rho);
        detail += " [" + std::to_string(r.npdr.disconnected) + " vs " + std::to_string(best.disconnected) + "]";
    }
    const double mn = median(rho_npdr);
    const double mj = median(rho_jdr);
    const double secs = seconds_since(t0);
    report(fewer >= 4 && mn >= mj && secs < 600.0, "tomography",
           "NPDR disconnects no more than best JDR in " + std::to_string(fewer) + "/" +
               std::to_string(results.size()) + " seeds" + detail + "; median rho NPDR " + fmt(mn) +
               " vs JDR " + fmt(mj) + "; " + fmt(secs) + " s");
}

void fbp_sanity() {
    const auto truth = tomo::shepp_logan(128);
    const auto s = tomo::random_sinogram(truth, 256, 128, kInfinity, 1);
    const double rho = tomo::similarity_rho(truth, tomo::backproject_filtered(s.noisy, s.angles, 128));
    report(rho >= 0.9, "FBP sanity", "rho " + fmt(rho));
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GDENOISE_PATH) + " " + args + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string body(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::string out, line;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') out += line + "\n";
    return out;
}

void determinism() {
    const auto root = fs::temp_directory_path() / "gdenoise_acceptance";
    fs::remove_all(root);
    const std::string swiss = "swissroll --n 200 --mu 0.5,1.5 --trials 2 --seed 5 --out ";
    const std::string tomo = "tomo --side 64 --n 96 --r 64 --k 10 --seeds 2 --out ";
    bool ok = true;
    std::string detail;
    for (const char* run : {"a", "b"}) {
        ok &= run_cli(swiss + (root / "swiss" / run).string()) == 0;
        ok &= run_cli(tomo + (root / "tomo" / run).string()) == 0;
    }
    std::size_t compared = 0;
    for (const char* dir : {"swiss", "tomo"}) {
        for (const auto& entry : fs::directory_iterator(root / dir / "a")) {
            if (entry.path().extension() != ".csv") continue;
            const auto twin = root / dir / "b" / entry.path().filename();
            ++compared;
            if (!fs::exists(twin) || body(entry.path()) != body(twin)) {
                ok = false;
                detail += " differs:" + entry.path().filename().string();
            }
        }
    }
    ok &= compared > 0;
    report(ok, "determinism", std::to_string(compared) + " CSV files compared" + detail);
}

}  // namespace

int main() {
    spectral_lemma();
    kernel_spectrum();
    series_oracle();
    identities();
    betweenness();
    shortest_paths();
    low_rank();
    swiss_table();
    bridge_counts();
    tomography();
    fbp_sanity();
    determinism();
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
