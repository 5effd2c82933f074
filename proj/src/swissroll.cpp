#include "graphdenoise/swissroll.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "graphdenoise/error.hpp"
#include "graphdenoise/parallel.hpp"

namespace gd::swissroll {

Eigen::Vector3d embed(double a, double b) { return {a * std::cos(a), b, a * std::sin(a)}; }

Eigen::Vector3d tangent_a(double a) {
    return {std::cos(a) - a * std::sin(a), 0.0, std::sin(a) + a * std::cos(a)};
}

Eigen::Vector3d tangent_b() { return {0.0, 1.0, 0.0}; }

Eigen::Vector3d normal(double a) { return tangent_a(a).cross(tangent_b()).normalized(); }

Sample sample_swiss_roll(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw InvalidParameter("swiss roll sample needs n >= 2");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ua(kMinA, kMaxA);
    std::uniform_real_distribution<double> ub(0.0, kMaxB);
    std::uniform_real_distribution<double> accept(0.0, 1.0);
    const double peak = std::sqrt(1.0 + kMaxA * kMaxA);

    Sample s;
    s.seed = seed;
    s.params.resize(static_cast<Eigen::Index>(n), 2);
    s.points.resize(static_cast<Eigen::Index>(n), 3);
    s.normals.resize(static_cast<Eigen::Index>(n), 3);
    for (std::size_t i = 0; i < n; ++i) {
        double a = kMinA;
        double b = 0.0;
        if (i > 0) {
            // Area element |df/da x df/db| = sqrt(1 + a^2).
            do {
                a = ua(rng);
            } while (accept(rng) * peak > std::sqrt(1.0 + a * a));
            b = ub(rng);
        }
        const auto row = static_cast<Eigen::Index>(i);
        s.params(row, 0) = a;
        s.params(row, 1) = b;
        s.points.row(row) = embed(a, b).transpose();
        s.normals.row(row) = normal(a).transpose();
    }
    return s;
}

NoiseRealization add_normal_noise(const Sample& sample, double mu, std::vector<double> u,
                                  std::uint64_t seed) {
    if (!(mu >= 0.0)) throw InvalidParameter("noise amplitude must be nonnegative");
    if (u.size() != sample.size()) throw InvalidParameter("one noise value per point required");
    NoiseRealization out;
    out.mu = mu;
    out.seed = seed;
    out.noisy = sample.points;
    if (mu != 0.0) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            out.noisy.row(row) += (mu * u[i]) * sample.normals.row(row);
        }
    }
    out.u = std::move(u);
    return out;
}

NoiseRealization add_normal_noise(const Sample& sample, double mu, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<double> u(sample.size());
    for (auto& v : u) v = uniform(rng);
    return add_normal_noise(sample, mu, std::move(u), seed);
}

namespace {

double simpson(double fa, double fm, double fb, double width) {
    return width / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double integrate_adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                                  double tol, int max_depth) {
    if (lo == hi) return 0.0;
    const double fa = f(lo);
    const double fb = f(hi);
    const double fm = f(0.5 * (lo + hi));
    return adaptive_step(f, lo, hi, fa, fm, fb, simpson(fa, fm, fb, hi - lo), tol, max_depth);
}

double true_geodesic(const Eigen::Vector2d& from, const Eigen::Vector2d& to) {
    const Eigen::Vector2d dv = to - from;
    if (dv.isZero(0.0)) return 0.0;
    auto speed = [&](double t) {
        const Eigen::Vector2d v = from + t * dv;
        return (tangent_a(v(0)) * dv(0) + tangent_b() * dv(1)).norm();
    };
    return integrate_adaptive_simpson(speed, 0.0, 1.0, 1e-8, 40);
}

double geodesic_diameter() {
    const Eigen::Vector2d corners[] = {{kMinA, 0.0}, {kMinA, kMaxB}, {kMaxA, 0.0}, {kMaxA, kMaxB}};
    double best = 0.0;
    for (const auto& a : corners)
        for (const auto& b : corners) best = std::max(best, true_geodesic(a, b));
    return best;
}

double mean_error(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& estimate, double cap,
                  bool* capped) {
    if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols())
        throw InvalidParameter("mean_error: shape mismatch");
    if (truth.size() == 0) throw InvalidParameter("mean_error: empty input");
    double sum = 0.0;
    bool any = false;
    for (Eigen::Index r = 0; r < truth.rows(); ++r) {
        for (Eigen::Index c = 0; c < truth.cols(); ++c) {
            const double est = estimate(r, c);
            if (std::isfinite(est)) {
                sum += std::abs(truth(r, c) - est);
            } else {
                sum += cap;
                any = true;
            }
        }
    }
    if (capped) *capped = any;
    return sum / static_cast<double>(truth.size());
}

std::vector<bool> label_bridges(const NNGraph& graph, const Sample& sample, double factor) {
    if (!(factor > 1.0)) throw InvalidParameter("bridge factor must exceed 1");
    if (graph.node_count() != sample.size()) throw InvalidParameter("graph and sample sizes differ");
    std::vector<bool> out(graph.edge_count(), false);
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        const auto& edge = graph.edge(e);
        const double limit = factor * edge.cost;
        // The straight-line parameter length never exceeds |da| sqrt(1 + a_max^2) + |db|,
        // and is at least |db|; skip the quadrature when either bound settles the label.
        const Eigen::Vector2d d = sample.param(edge.v) - sample.param(edge.u);
        if (std::abs(d(1)) > limit) {
            out[e] = true;
            continue;
        }
        if (std::abs(d(0)) * std::sqrt(1.0 + kMaxA * kMaxA) + std::abs(d(1)) <= limit) continue;
        out[e] = true_geodesic(sample.param(edge.u), sample.param(edge.v)) > limit;
    }
    return out;
}

std::size_t count_bridges(const NNGraph& graph, const Sample& sample, double factor) {
    const auto labels = label_bridges(graph, sample, factor);
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
}

std::vector<Eigen::Vector2d> reference_anchors() {
    return {{kMinA, 0.0},
            {2.0 * kMinA, 15.75},
            {2.5 * kMinA, 5.25},
            {3.0 * kMinA, 15.75},
            {3.75 * kMinA, 10.5}};
}

std::vector<NodeId> reference_nodes(const Sample& sample) {
    std::vector<NodeId> out;
    for (const auto& anchor : reference_anchors()) {
        const Eigen::Vector3d target = embed(anchor(0), anchor(1));
        NodeId best = 0;
        double best_d = kInfinity;
        for (NodeId i = 0; i < sample.size(); ++i) {
            if (std::find(out.begin(), out.end(), i) != out.end()) continue;
            const double d = (sample.points.row(static_cast<Eigen::Index>(i)).transpose() - target).norm();
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        out.push_back(best);
    }
    return out;
}

std::string Method::label() const {
    if (rule == Rule::None) return "sp";
    std::ostringstream ss;
    ss << to_string(rule) << "(q=" << q << ")";
    return ss.str();
}

std::vector<Method> default_methods() {
    return {{Rule::None, 1.0},  {Rule::LDR, 0.92},  {Rule::ECDR, 0.92}, {Rule::ECDR, 0.95},
            {Rule::ECDR, 0.99}, {Rule::NPDR, 0.92}, {Rule::NPDR, 0.95}, {Rule::NPDR, 0.99}};
}

std::vector<double> default_mu_grid() { return {0.10, 1.44, 1.54, 1.64, 1.74, 1.85}; }

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return NAN;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

// Linear-interpolated empirical quantile, used only for the plotted envelopes.
double interpolated_quantile(std::vector<double> v, double level) {
    std::sort(v.begin(), v.end());
    const double pos = level * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (!std::isfinite(v[lo]) || !std::isfinite(v[hi])) return frac > 0.0 ? v[hi] : v[lo];
    return v[lo] + frac * (v[hi] - v[lo]);
}

std::vector<double> noise_draw(const Sample& sample, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<double> u(sample.size());
    for (auto& v : u) v = uniform(rng);
    return u;
}

void validate(const BenchmarkConfig& cfg) {
    if (cfg.trials < 1) throw InvalidParameter("trial count must be at least 1");
    if (cfg.n < 6) throw InvalidParameter("benchmark needs n >= 6 (five reference nodes)");
    if (!(cfg.delta > 0.0)) throw InvalidParameter("delta must be positive");
    if (cfg.mu.empty()) throw InvalidParameter("empty noise amplitude grid");
    for (double mu : cfg.mu)
        if (!(mu >= 0.0)) throw InvalidParameter("noise amplitudes must be nonnegative");
    if (cfg.methods.empty()) throw InvalidParameter("no methods selected");
    for (const auto& m : cfg.methods)
        if (m.rule != Rule::None && !(m.q > 0.0 && m.q < 1.0))
            throw InvalidParameter("method q must lie in (0, 1)");
}

struct TrialOutput {
    std::vector<TrialRecord> records;
    std::vector<std::vector<double>> first_row;  // per method, estimates from reference 0
};

TrialOutput run_trial(const BenchmarkConfig& cfg, const Sample& sample,
                      const std::vector<NodeId>& refs, const Eigen::MatrixXd& truth, double cap,
                      double mu, std::size_t trial) {
    const std::uint64_t seed = derive_seed(cfg.seed, trial + 1);
    const auto noise = add_normal_noise(sample, mu, noise_draw(sample, seed), seed);
    const NNGraph graph = build_ball_graph(PointCloud(noise.noisy), cfg.delta);
    const std::size_t true_bridges = count_bridges(graph, sample, cfg.bridge_factor);

    // NPDR scores depend only on the kernel, so one computation serves every q.
    std::optional<std::vector<double>> npdr_scores_cache;

    TrialOutput out;
    for (const auto& method : cfg.methods) {
        BridgeSet bridges;
        if (method.rule == Rule::NPDR) {
            RuleConfig rc = cfg.rule;
            rc.q = method.q;
            if (!npdr_scores_cache) npdr_scores_cache = npdr_scores(graph, rc);
            bridges = flag_low_scores(graph, *npdr_scores_cache, Rule::NPDR, method.q);
        } else if (method.rule != Rule::None) {
            RuleConfig rc = cfg.rule;
            rc.q = method.q;
            bridges = run_rule(method.rule, graph, rc);
        }
        const PenalizedGraph pg(graph, bridges);
        const Eigen::MatrixXd est = adjusted_geodesics(pg, refs);
        bool capped = false;
        const double err = mean_error(truth, est, cap, &capped);
        out.records.push_back({mu, method, trial, err, bridges.size(), true_bridges, capped});
        auto& row = out.first_row.emplace_back(static_cast<std::size_t>(est.cols()));
        for (Eigen::Index c = 0; c < est.cols(); ++c) row[static_cast<std::size_t>(c)] = est(0, c);
    }
    return out;
}

}  // namespace

const Aggregate& BenchmarkReport::aggregate(double mu, const Method& method) const {
    for (const auto& a : aggregates)
        if (a.mu == mu && a.method == method) return a;
    throw InvalidParameter("no aggregate for mu=" + std::to_string(mu) + " method " + method.label());
}

double BenchmarkReport::median_true_bridges(double mu) const {
    std::vector<double> counts;
    for (const auto& r : records)
        if (r.mu == mu && r.method == config.methods.front())
            counts.push_back(static_cast<double>(r.bridges_true));
    return median_of(counts);
}

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg) {
    validate(cfg);
    BenchmarkReport report;
    report.config = cfg;

    const Sample sample = sample_swiss_roll(cfg.n, derive_seed(cfg.seed, 0));
    report.references = reference_nodes(sample);
    const std::size_t nrefs = report.references.size();
    Eigen::MatrixXd truth(static_cast<Eigen::Index>(nrefs), static_cast<Eigen::Index>(cfg.n));
    for (std::size_t r = 0; r < nrefs; ++r)
        for (std::size_t i = 0; i < cfg.n; ++i)
            truth(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
                true_geodesic(sample.param(report.references[r]), sample.param(i));
    const double cap = geodesic_diameter();

    const std::size_t jobs = cfg.mu.size() * cfg.trials;
    std::vector<TrialOutput> outputs(jobs);
    parallel_for(jobs, [&](std::size_t job) {
        const std::size_t mi = job / cfg.trials;
        const std::size_t t = job % cfg.trials;
        outputs[job] = run_trial(cfg, sample, report.references, truth, cap, cfg.mu[mi], t);
    });

    for (const auto& o : outputs)
        report.records.insert(report.records.end(), o.records.begin(), o.records.end());

    std::vector<NodeId> by_truth(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) by_truth[i] = i;
    std::stable_sort(by_truth.begin(), by_truth.end(), [&](NodeId a, NodeId b) {
        return truth(0, static_cast<Eigen::Index>(a)) < truth(0, static_cast<Eigen::Index>(b));
    });

    for (std::size_t mi = 0; mi < cfg.mu.size(); ++mi) {
        for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
            Aggregate agg;
            agg.mu = cfg.mu[mi];
            agg.method = cfg.methods[k];
            std::vector<double> errs, flagged, truecount;
            for (std::size_t t = 0; t < cfg.trials; ++t) {
                const auto& rec = outputs[mi * cfg.trials + t].records[k];
                errs.push_back(rec.error);
                flagged.push_back(static_cast<double>(rec.bridges_flagged));
                truecount.push_back(static_cast<double>(rec.bridges_true));
                if (rec.disconnected) ++agg.disconnected_trials;
            }
            double total = 0.0;
            for (double e : errs) total += e;
            agg.mean_error = total / static_cast<double>(errs.size());
            agg.median_error = median_of(errs);
            agg.median_flagged = median_of(flagged);
            agg.median_true = median_of(truecount);
            report.aggregates.push_back(agg);

            GeodesicCurve curve;
            curve.mu = agg.mu;
            curve.method = agg.method;
            curve.nodes = by_truth;
            std::vector<double> across(cfg.trials);
            for (NodeId node : by_truth) {
                for (std::size_t t = 0; t < cfg.trials; ++t)
                    across[t] = outputs[mi * cfg.trials + t].first_row[k][node];
                curve.truth.push_back(truth(0, static_cast<Eigen::Index>(node)));
                curve.q33.push_back(interpolated_quantile(across, 0.33));
                curve.median.push_back(interpolated_quantile(across, 0.5));
                curve.q66.push_back(interpolated_quantile(across, 0.66));
            }
            report.curves.push_back(std::move(curve));
        }
    }
    return report;
}

std::vector<double> median_bridge_counts(const BenchmarkConfig& cfg) {
    validate(cfg);
    const Sample sample = sample_swiss_roll(cfg.n, derive_seed(cfg.seed, 0));
    std::vector<double> counts(cfg.mu.size() * cfg.trials);
    parallel_for(counts.size(), [&](std::size_t job) {
        const std::size_t mi = job / cfg.trials;
        const std::size_t t = job % cfg.trials;
        const std::uint64_t seed = derive_seed(cfg.seed, t + 1);
        const auto noise = add_normal_noise(sample, cfg.mu[mi], noise_draw(sample, seed), seed);
        const NNGraph graph = build_ball_graph(PointCloud(noise.noisy), cfg.delta);
        counts[job] = static_cast<double>(count_bridges(graph, sample, cfg.bridge_factor));
    });
    std::vector<double> out;
    for (std::size_t mi = 0; mi < cfg.mu.size(); ++mi)
        out.push_back(median_of({counts.begin() + static_cast<std::ptrdiff_t>(mi * cfg.trials),
                                 counts.begin() + static_cast<std::ptrdiff_t>((mi + 1) * cfg.trials)}));
    return out;
}

namespace {

std::string q_field(const Method& m) {
    if (m.rule == Rule::None) return "";
    std::ostringstream ss;
    ss << m.q;
    return ss.str();
}

}  // namespace

void write_config_header(std::ostream& out, const BenchmarkConfig& cfg) {
    out << "# command=swissroll\n";
    out << "# n=" << cfg.n << "\n# delta=" << cfg.delta << "\n# trials=" << cfg.trials
        << "\n# seed=" << cfg.seed << "\n# mu=";
    for (std::size_t i = 0; i < cfg.mu.size(); ++i) out << (i ? "," : "") << cfg.mu[i];
    out << "\n# methods=";
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) out << (i ? "," : "") << cfg.methods[i].label();
    out << "\n# K=" << cfg.rule.K << "\n# p=" << cfg.rule.p << "\n# epsilon=";
    switch (cfg.rule.epsilon.kind) {
        case EpsilonChoice::Kind::MedianHalf: out << "median-half"; break;
        case EpsilonChoice::Kind::Infinite: out << "inf"; break;
        case EpsilonChoice::Kind::Value: out << cfg.rule.epsilon.value; break;
    }
    out << "\n# ecdr_basis=" << (cfg.rule.ecdr_basis == EcdrBasis::Edges ? "edges" : "nodes")
        << "\n# bridge_factor=" << cfg.bridge_factor << '\n';
}

void write_trials_csv(std::ostream& out, const BenchmarkReport& report) {
    write_config_header(out, report.config);
    out << "mu,rule,q,trial,E,bridges_flagged,bridges_true,disconnected\n";
    out << std::setprecision(10);
    for (const auto& r : report.records) {
        out << r.mu << ',' << to_string(r.method.rule) << ',' << q_field(r.method) << ',' << r.trial
            << ',' << r.error << ',' << r.bridges_flagged << ',' << r.bridges_true << ','
            << (r.disconnected ? 1 : 0) << '\n';
    }
}

void write_aggregate_csv(std::ostream& out, const BenchmarkReport& report) {
    write_config_header(out, report.config);
    out << "mu,rule,q,mean_E,median_E,median_bridges_flagged,median_bridges_true,"
           "disconnected_trials\n";
    out << std::setprecision(10);
    for (const auto& a : report.aggregates) {
        out << a.mu << ',' << to_string(a.method.rule) << ',' << q_field(a.method) << ','
            << a.mean_error << ',' << a.median_error << ',' << a.median_flagged << ','
            << a.median_true << ',' << a.disconnected_trials << '\n';
    }
}

void write_curves_dat(std::ostream& out, const BenchmarkReport& report) {
    write_config_header(out, report.config);
    out << "# blocks separated by two blank lines (gnuplot 'index'); columns:\n"
           "# rank node true_geodesic q33 median q66\n";
    out << std::setprecision(10);
    bool first = true;
    for (const auto& c : report.curves) {
        if (!first) out << "\n\n";
        first = false;
        out << "# mu=" << c.mu << " method=" << c.method.label() << '\n';
        for (std::size_t k = 0; k < c.nodes.size(); ++k)
            out << k << ' ' << c.nodes[k] << ' ' << c.truth[k] << ' ' << c.q33[k] << ' '
                << c.median[k] << ' ' << c.q66[k] << '\n';
    }
}

void write_error_table(std::ostream& out, const BenchmarkReport& report) {
    const auto& methods = report.config.methods;
    const auto flags = out.flags();
    const auto precision = out.precision();
    // Group columns by rule, keeping the configured order of first appearance.
    std::vector<Rule> rules;
    for (const auto& m : methods)
        if (std::find(rules.begin(), rules.end(), m.rule) == rules.end()) rules.push_back(m.rule);

    std::ostringstream head1, head2;
    head1 << std::left << std::setw(6) << "mu";
    head2 << std::left << std::setw(6) << "";
    for (Rule r : rules) {
        std::vector<Method> cols;
        for (const auto& m : methods)
            if (m.rule == r) cols.push_back(m);
        std::string name = r == Rule::None ? "SP" : to_string(r);
        std::transform(name.begin(), name.end(), name.begin(), ::toupper);
        if (r != Rule::None) name += ", q=";
        const int width = static_cast<int>(cols.size()) * 7;
        head1 << "| " << std::left << std::setw(width - 2) << name;
        for (const auto& m : cols) {
            std::ostringstream q;
            if (r != Rule::None) q << std::setprecision(2) << m.q;
            head2 << "| " << std::left << std::setw(5) << q.str();
        }
    }
    out << head1.str() << "|\n" << head2.str() << "|\n";
    for (double mu : report.config.mu) {
        out << std::left << std::setw(6) << std::fixed << std::setprecision(2) << mu;
        for (Rule r : rules) {
            for (const auto& m : methods) {
                if (m.rule != r) continue;
                out << "| " << std::right << std::setw(4) << std::setprecision(1)
                    << report.aggregate(mu, m).mean_error << ' ';
            }
        }
        out << "|\n";
    }
    out.flags(flags);
    out.precision(precision);
}

}  // namespace gd::swissroll
