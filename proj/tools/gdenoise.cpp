// gdenoise: bridge detection on nearest-neighbor graphs, plus the Swiss-roll and
// tomography benchmarks.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphdenoise/error.hpp"
#include "graphdenoise/graph.hpp"
#include "graphdenoise/parallel.hpp"
#include "graphdenoise/rules.hpp"
#include "graphdenoise/swissroll.hpp"
#include "graphdenoise/tomography.hpp"

namespace fs = std::filesystem;

namespace {

// Writes via a temporary sibling and renames it into place.
void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body,
                  bool binary = false) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, binary ? std::ios::binary : std::ios::out);
        if (!out) throw gd::InvalidParameter("cannot open " + tmp.string() + " for writing");
        body(out);
        out.flush();
        if (!out) throw gd::InvalidParameter("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

double parse_snr(const std::string& text) {
    if (text == "inf" || text == "+inf") return gd::kInfinity;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw gd::InvalidParameter("--snr-db must be a number or 'inf'");
    }
    if (used != text.size() || !std::isfinite(v)) throw gd::InvalidParameter("--snr-db must be a number or 'inf'");
    return v;
}

gd::ProbabilityMode parse_mode(const std::string& text, bool& automatic) {
    automatic = text == "auto";
    if (text == "auto" || text == "dense") return gd::ProbabilityMode::Dense;
    if (text == "lowrank") return gd::ProbabilityMode::LowRank;
    if (text == "series") return gd::ProbabilityMode::Series;
    throw gd::InvalidParameter("--mode must be auto, dense, lowrank or series");
}

struct RuleFlags {
    double q = 0.99;
    double p = 0.01;
    std::string epsilon = "median-half";
    std::size_t K = 15;
    std::size_t J = 0;
    std::string mode = "auto";
    std::string basis = "edges";

    void attach(CLI::App* cmd) {
        cmd->add_option("--q", q, "Good-edge fraction in (0, 1)")->capture_default_str();
        cmd->add_option("--p", p, "Restart probability for NPDR")->capture_default_str();
        cmd->add_option("--epsilon", epsilon, "Kernel scale: number, inf or median-half")->capture_default_str();
        cmd->add_option("--K", K, "ECDR rounds")->capture_default_str();
        cmd->add_option("--J", J, "Low-rank terms for NPDR (0 = min(n, 50))");
        cmd->add_option("--mode", mode, "NPDR evaluation: auto, dense, lowrank, series")->capture_default_str();
        cmd->add_option("--ecdr-basis", basis, "ECDR round size from 'edges' or 'nodes'")->capture_default_str();
    }

    gd::RuleConfig config() const {
        gd::RuleConfig cfg;
        cfg.q = q;
        cfg.p = p;
        cfg.epsilon = gd::parse_epsilon(epsilon);
        cfg.K = K;
        if (J > 0) cfg.J = J;
        cfg.mode = parse_mode(mode, cfg.auto_mode);
        if (basis == "edges")
            cfg.ecdr_basis = gd::EcdrBasis::Edges;
        else if (basis == "nodes")
            cfg.ecdr_basis = gd::EcdrBasis::Nodes;
        else
            throw gd::InvalidParameter("--ecdr-basis must be edges or nodes");
        cfg.validate();
        return cfg;
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cmd_denoise(const std::string& graph_path, const std::string& rule_name, const RuleFlags& flags,
                const std::string& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    std::ifstream in(graph_path);
    if (!in) throw gd::InvalidParameter("cannot open " + graph_path);
    const gd::NNGraph graph = gd::read_graph(in);
    const gd::Rule rule = gd::parse_rule(rule_name);
    const gd::RuleConfig cfg = flags.config();
    const gd::BridgeSet bridges = gd::run_rule(rule, graph, cfg);

    std::vector<std::string> extra = {"graph=" + fs::path(graph_path).filename().string(),
                                      "nodes=" + std::to_string(graph.node_count()),
                                      "edges=" + std::to_string(graph.edge_count())};
    if (rule == gd::Rule::ECDR && bridges.exhausted) extra.push_back("exhausted=1");
    const fs::path out = fs::path(out_dir) / ("bridges_" + gd::to_string(rule) + ".txt");
    write_atomic(out, [&](std::ostream& os) { gd::write_bridge_set(os, bridges, extra); });

    std::cout << "rule=" << gd::to_string(rule) << " q=" << cfg.q << " |E|=" << graph.edge_count()
              << " |B|=" << bridges.size() << " elapsed_s=" << seconds_since(start)
              << " out=" << out.string() << '\n';
    return 0;
}

int cmd_swissroll(gd::swissroll::BenchmarkConfig cfg, const RuleFlags& flags,
                  const std::string& out_dir, bool table) {
    const auto start = std::chrono::steady_clock::now();
    const double q_keep = cfg.rule.q;
    cfg.rule = flags.config();
    cfg.rule.q = q_keep;
    const auto report = gd::swissroll::run_benchmark(cfg);
    const fs::path dir(out_dir);
    write_atomic(dir / "swissroll_trials.csv", [&](std::ostream& os) { gd::swissroll::write_trials_csv(os, report); });
    write_atomic(dir / "swissroll_summary.csv", [&](std::ostream& os) { gd::swissroll::write_aggregate_csv(os, report); });
    write_atomic(dir / "swissroll_geodesics.dat", [&](std::ostream& os) { gd::swissroll::write_curves_dat(os, report); });
    write_atomic(dir / "swissroll_table.txt", [&](std::ostream& os) { gd::swissroll::write_error_table(os, report); });
    if (table) gd::swissroll::write_error_table(std::cout, report);
    for (double mu : cfg.mu)
        std::cout << "mu=" << mu << " median_true_bridges=" << report.median_true_bridges(mu) << '\n';
    std::cout << "trials=" << report.records.size() << " elapsed_s=" << seconds_since(start)
              << " out=" << dir.string() << '\n';
    return 0;
}

int cmd_tomo(const gd::tomo::BenchmarkConfig& cfg, const std::string& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    const auto results = gd::tomo::run_benchmark(cfg);
    const fs::path dir(out_dir);
    write_atomic(dir / "tomo_results.csv", [&](std::ostream& os) { gd::tomo::write_benchmark_csv(os, cfg, results); });

    // Artifacts for the first seed: sinogram, phantom, NPDR ordering and reconstruction.
    const auto phantom = gd::tomo::shepp_logan(cfg.side);
    const auto sino = gd::tomo::random_sinogram(phantom, cfg.n, cfg.r, cfg.snr_db, results.front().seed);
    write_atomic(dir / "tomo_sinogram.bin", [&](std::ostream& os) { gd::tomo::write_sinogram(os, sino); }, true);
    write_atomic(dir / "tomo_phantom.pgm", [&](std::ostream& os) { gd::tomo::write_pgm(os, phantom); }, true);
    const auto& first = results.front();
    if (!first.npdr_ordering.order.empty()) {
        write_atomic(dir / "tomo_ordering.csv",
                     [&](std::ostream& os) { gd::tomo::write_ordering_csv(os, first.npdr_ordering, sino); });
        write_atomic(dir / "tomo_reconstruction.pgm", [&](std::ostream& os) { gd::tomo::write_pgm(os, first.npdr_image); }, true);
    }

    for (const auto& s : results) {
        const auto& j = s.jdr[s.jdr_best];
        std::cout << "seed=" << s.index << " true_order: rho=" << s.true_order_rho
                  << " | none: rho=" << s.unpruned.rho
                  << " disconnected=" << s.unpruned.disconnected << " | jdr(q=" << j.q
                  << "): rho=" << j.rho << " disconnected=" << j.disconnected
                  << " | npdr(q=" << s.npdr.q << "): rho=" << s.npdr.rho
                  << " disconnected=" << s.npdr.disconnected << '\n';
    }
    std::cout << "elapsed_s=" << seconds_since(start) << " out=" << dir.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bridge detection for nearest-neighbor graphs of noisy samples"};
    app.require_subcommand(1);

    std::string out_dir = "out";

    auto* denoise = app.add_subcommand("denoise", "Flag bridge edges in a graph file");
    std::string graph_path;
    std::string rule_name = "npdr";
    RuleFlags denoise_flags;
    denoise->add_option("graph", graph_path, "Graph file: 'n m' header, then 'i j d' lines")->required();
    denoise->add_option("--rule", rule_name, "ldr, jdr, ecdr or npdr")->capture_default_str();
    denoise->add_option("--out", out_dir, "Output directory")->capture_default_str();
    denoise_flags.attach(denoise);

    auto* swiss = app.add_subcommand("swissroll", "Noisy Swiss-roll geodesic benchmark");
    gd::swissroll::BenchmarkConfig swiss_cfg;
    RuleFlags swiss_flags;
    bool table = false;
    swiss->add_option("--n", swiss_cfg.n, "Sample size")->capture_default_str();
    swiss->add_option("--delta", swiss_cfg.delta, "Ball-graph radius")->capture_default_str();
    swiss->add_option("--mu", swiss_cfg.mu, "Noise amplitudes, comma separated")->delimiter(',');
    swiss->add_option("--trials", swiss_cfg.trials, "Trials per amplitude")->capture_default_str();
    swiss->add_option("--seed", swiss_cfg.seed, "Master seed")->capture_default_str();
    swiss->add_option("--bridge-factor", swiss_cfg.bridge_factor,
                      "Ground-truth bridge: true geodesic above this multiple of edge length")
        ->capture_default_str();
    swiss->add_option("--out", out_dir, "Output directory")->capture_default_str();
    swiss->add_flag("--table", table, "Print the mean-error table");
    swiss_flags.attach(swiss);

    auto* tomo = app.add_subcommand("tomo", "Blind-angle tomography benchmark");
    gd::tomo::BenchmarkConfig tomo_cfg;
    std::string snr_text = "-2";
    std::string knn_text = "mutual";
    tomo->add_option("--side", tomo_cfg.side, "Phantom side in pixels")->capture_default_str();
    tomo->add_option("--n", tomo_cfg.n, "Number of projections")->capture_default_str();
    tomo->add_option("--r", tomo_cfg.r, "Bins per projection")->capture_default_str();
    tomo->add_option("--k", tomo_cfg.k, "Nearest neighbors")->capture_default_str();
    tomo->add_option("--knn", knn_text, "k-NN symmetrization: mutual or union")->capture_default_str();
    tomo->add_option("--snr-db", snr_text, "Signal-to-noise ratio in dB, or inf")->capture_default_str();
    tomo->add_option("--seed", tomo_cfg.seed, "Master seed")->capture_default_str();
    tomo->add_option("--seeds", tomo_cfg.seeds, "Number of sinograms")->capture_default_str();
    tomo->add_option("--q", tomo_cfg.npdr_q, "NPDR good-edge fraction")->capture_default_str();
    tomo->add_option("--p", tomo_cfg.npdr_p, "NPDR restart probability")->capture_default_str();
    tomo->add_option("--jdr-grid", tomo_cfg.jdr_grid, "JDR q values, comma separated")->delimiter(',');
    tomo->add_option("--out", out_dir, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (denoise->parsed()) return cmd_denoise(graph_path, rule_name, denoise_flags, out_dir);
        if (swiss->parsed()) {
            swiss_cfg.rule.q = 0.99;
            return cmd_swissroll(swiss_cfg, swiss_flags, out_dir, table);
        }
        if (tomo->parsed()) {
            tomo_cfg.snr_db = parse_snr(snr_text);
            if (knn_text == "mutual")
                tomo_cfg.knn = gd::KnnSymmetrization::Mutual;
            else if (knn_text == "union")
                tomo_cfg.knn = gd::KnnSymmetrization::Union;
            else
                throw gd::InvalidParameter("--knn must be mutual or union");
            if (!(tomo_cfg.npdr_q > 0.0 && tomo_cfg.npdr_q < 1.0)) throw gd::InvalidParameter("--q must lie in (0, 1)");
            gd::require_restart_probability(tomo_cfg.npdr_p);
            return cmd_tomo(tomo_cfg, out_dir);
        }
    } catch (const gd::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const gd::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
