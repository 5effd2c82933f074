#include "graphdenoise/tomography.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <mutex>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include <fftw3.h>

#include "graphdenoise/error.hpp"
#include "graphdenoise/linalg.hpp"
#include "graphdenoise/parallel.hpp"

namespace gd::tomo {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

Image::Image(std::size_t s) : side(s), pixels(RowMatrix::Zero(idx(s), idx(s))) {
    if (s < 2) throw InvalidParameter("image side must be at least 2");
}

double Image::x(std::size_t j) const {
    return -1.0 + (2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(side);
}

double Image::y(std::size_t i) const {
    return 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(side);
}

double Image::sample(double px, double py) const {
    const double half = 0.5 * static_cast<double>(side);
    const double col = (px + 1.0) * half - 0.5;
    const double row = (1.0 - py) * half - 0.5;
    const double c0 = std::floor(col);
    const double r0 = std::floor(row);
    const double fc = col - c0;
    const double fr = row - r0;
    const auto limit = static_cast<double>(side);
    auto at = [&](double r, double c) -> double {
        if (r < 0.0 || c < 0.0 || r >= limit || c >= limit) return 0.0;
        return pixels(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    };
    return (1.0 - fr) * ((1.0 - fc) * at(r0, c0) + fc * at(r0, c0 + 1.0)) +
           fr * ((1.0 - fc) * at(r0 + 1.0, c0) + fc * at(r0 + 1.0, c0 + 1.0));
}

bool Ellipse::contains(double px, double py) const {
    const double t = tilt_deg * kPi / 180.0;
    const double dx = px - cx;
    const double dy = py - cy;
    const double u = dx * std::cos(t) + dy * std::sin(t);
    const double v = -dx * std::sin(t) + dy * std::cos(t);
    return (u * u) / (semi_x * semi_x) + (v * v) / (semi_y * semi_y) <= 1.0;
}

const std::vector<Ellipse>& shepp_logan_table() {
    static const std::vector<Ellipse> table = {
        {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
        {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
        {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
        {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
        {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
        {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
        {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
        {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
    };
    return table;
}

Image rasterize(const std::vector<Ellipse>& ellipses, std::size_t side) {
    Image img(side);
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j) {
            double v = 0.0;
            for (const auto& e : ellipses)
                if (e.contains(img.x(j), img.y(i))) v += e.intensity;
            img.pixels(idx(i), idx(j)) = v;
        }
    return img;
}

Image shepp_logan(std::size_t side) {
    if (side < 16) throw InvalidParameter("phantom side must be at least 16");
    return rasterize(shepp_logan_table(), side);
}

namespace {

// Keys cubic convolution weight, a = -1/2.
double keys(double t) {
    t = std::abs(t);
    if (t < 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
    if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
    return 0.0;
}

double sample_cubic(const Image& image, double px, double py) {
    const double half = 0.5 * static_cast<double>(image.side);
    const double col = (px + 1.0) * half - 0.5;
    const double row = (1.0 - py) * half - 0.5;
    const auto c0 = static_cast<long>(std::floor(col));
    const auto r0 = static_cast<long>(std::floor(row));
    const auto limit = static_cast<long>(image.side);
    double acc = 0.0;
    for (long r = r0 - 1; r <= r0 + 2; ++r) {
        if (r < 0 || r >= limit) continue;
        const double wr = keys(row - static_cast<double>(r));
        for (long c = c0 - 1; c <= c0 + 2; ++c) {
            if (c < 0 || c >= limit) continue;
            acc += wr * keys(col - static_cast<double>(c)) * image.pixels(r, c);
        }
    }
    return acc;
}

}  // namespace

Image rotate(const Image& image, double degrees, bool reflect) {
    const double t = degrees * kPi / 180.0;
    const double c = std::cos(t);
    const double s = std::sin(t);
    Image out(image.side);
    for (std::size_t i = 0; i < image.side; ++i)
        for (std::size_t j = 0; j < image.side; ++j) {
            const double x = out.x(j);
            const double y = out.y(i);
            double sx = c * x + s * y;
            const double sy = -s * x + c * y;
            if (reflect) sx = -sx;
            out.pixels(idx(i), idx(j)) = sample_cubic(image, sx, sy);
        }
    return out;
}

std::vector<double> bin_centers(std::size_t r) {
    if (r < 2) throw InvalidParameter("need at least 2 bins");
    std::vector<double> s(r);
    for (std::size_t k = 0; k < r; ++k)
        s[k] = -1.0 + (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(r);
    return s;
}

std::vector<double> radon_project(const Image& image, double theta, std::size_t r) {
    const auto centers = bin_centers(r);
    const double h = 1.0 / static_cast<double>(image.side);
    const auto steps = static_cast<long>(std::floor(std::numbers::sqrt2 / h));
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    std::vector<double> out(r, 0.0);
    for (std::size_t k = 0; k < r; ++k) {
        double sum = 0.0;
        for (long j = -steps; j <= steps; ++j) {
            const double u = static_cast<double>(j) * h;
            sum += image.sample(centers[k] * c - u * s, centers[k] * s + u * c);
        }
        out[k] = sum * h;
    }
    return out;
}

Sinogram random_sinogram(const Image& image, std::size_t n, std::size_t r, double snr_db,
                         std::uint64_t seed) {
    if (n < 8) throw InvalidParameter("sinogram needs at least 8 projections");
    if (std::isnan(snr_db) || snr_db == -kInfinity) throw InvalidParameter("invalid SNR");
    Sinogram sino;
    sino.n = n;
    sino.r = r;
    sino.snr_db = snr_db;
    sino.seed = seed;
    sino.angles.resize(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (auto& a : sino.angles) a = angle(rng);

    sino.clean.resize(idx(n), idx(r));
    parallel_for(n, [&](std::size_t i) {
        const auto row = radon_project(image, sino.angles[i], r);
        for (std::size_t k = 0; k < r; ++k) sino.clean(idx(i), idx(k)) = row[k];
    });
    sino.signal_power = sino.clean.squaredNorm() / static_cast<double>(n * r);
    sino.noisy = sino.clean;
    if (std::isfinite(snr_db)) {
        sino.noise_sigma = std::sqrt(sino.signal_power / std::pow(10.0, snr_db / 10.0));
        std::normal_distribution<double> noise(0.0, sino.noise_sigma);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < r; ++k) sino.noisy(idx(i), idx(k)) += noise(rng);
    }
    return sino;
}

namespace {

constexpr char kMagic[8] = {'G', 'D', 'S', 'I', 'N', 'O', '0', '1'};

template <typename T>
void put(std::ostream& out, T value) {
    static_assert(sizeof(T) == 8);
    std::uint64_t bits;
    std::memcpy(&bits, &value, 8);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

template <typename T>
T get(std::istream& in) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ParseError(0, "truncated sinogram file");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    T value;
    std::memcpy(&value, &bits, 8);
    return value;
}

}  // namespace

void write_sinogram(std::ostream& out, const Sinogram& sino) {
    out.write(kMagic, 8);
    put<std::uint64_t>(out, sino.n);
    put<std::uint64_t>(out, sino.r);
    put<double>(out, sino.snr_db);
    put<std::uint64_t>(out, sino.seed);
    for (std::size_t i = 0; i < sino.n; ++i)
        for (std::size_t k = 0; k < sino.r; ++k) put<double>(out, sino.noisy(idx(i), idx(k)));
    for (double a : sino.angles) put<double>(out, a);
}

Sinogram read_sinogram(std::istream& in) {
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw ParseError(0, "not a sinogram file (bad magic)");
    Sinogram sino;
    sino.n = get<std::uint64_t>(in);
    sino.r = get<std::uint64_t>(in);
    sino.snr_db = get<double>(in);
    sino.seed = get<std::uint64_t>(in);
    if (sino.n == 0 || sino.r == 0 || sino.n > (1u << 24) || sino.r > (1u << 24))
        throw ParseError(0, "implausible sinogram dimensions");
    sino.noisy.resize(idx(sino.n), idx(sino.r));
    for (std::size_t i = 0; i < sino.n; ++i)
        for (std::size_t k = 0; k < sino.r; ++k) sino.noisy(idx(i), idx(k)) = get<double>(in);
    sino.angles.resize(sino.n);
    for (auto& a : sino.angles) a = get<double>(in);
    return sino;
}

void write_pgm(std::ostream& out, const Image& image) {
    out << "P5\n" << image.side << ' ' << image.side << "\n65535\n";
    const double lo = image.pixels.minCoeff();
    const double hi = image.pixels.maxCoeff();
    const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
    for (std::size_t i = 0; i < image.side; ++i)
        for (std::size_t j = 0; j < image.side; ++j) {
            const auto v = static_cast<std::uint16_t>(std::lround((image.pixels(idx(i), idx(j)) - lo) * scale));
            const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
            out.write(bytes, 2);
        }
}

AngularOrdering prune_and_order(const Sinogram& sino, std::size_t k, Rule rule,
                                const RuleConfig& cfg, KnnSymmetrization knn) {
    const std::size_t n = sino.n;
    if (k == 0 || k >= n) throw InvalidParameter("k must satisfy 0 < k < n");

    RowMatrix rows = sino.noisy;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) rows.row(i).array() -= rows.row(i).mean();
    const NNGraph graph = build_knn_graph(PointCloud(std::move(rows)), k, knn);

    const BridgeSet bridges = run_rule(rule, graph, cfg);
    std::vector<bool> keep = bridges.mask_for(graph);
    keep.flip();
    const NNGraph pruned = graph.filter_edges(keep);

    std::vector<bool> alive(n);
    for (NodeId v = 0; v < n; ++v) alive[v] = pruned.degree(v) >= 2;

    // Largest component among the surviving nodes (lowest label on ties).
    std::vector<Edge> kept;
    for (const auto& e : pruned.edges())
        if (alive[e.u] && alive[e.v]) kept.push_back(e);
    const auto labels = connected_components(NNGraph(n, kept));
    std::vector<std::size_t> sizes(n, 0);
    for (NodeId v = 0; v < n; ++v)
        if (alive[v]) ++sizes[labels[v]];
    const auto best = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());

    std::vector<NodeId> nodes;
    std::vector<std::ptrdiff_t> local(n, -1);
    for (NodeId v = 0; v < n; ++v)
        if (alive[v] && labels[v] == best) {
            local[v] = static_cast<std::ptrdiff_t>(nodes.size());
            nodes.push_back(v);
        }
    const std::size_t m = nodes.size();
    if (m < 4) throw InsufficientData("fewer than 4 projections survive pruning");

    std::vector<double> degree(m, 0.0);
    std::vector<std::pair<std::size_t, std::size_t>> links;
    for (const auto& e : kept) {
        if (local[e.u] < 0 || local[e.v] < 0) continue;
        const auto a = static_cast<std::size_t>(local[e.u]);
        const auto b = static_cast<std::size_t>(local[e.v]);
        links.emplace_back(a, b);
        degree[a] += 1.0;
        degree[b] += 1.0;
    }
    std::vector<SparseMatrix::Triplet> t;
    for (const auto& [a, b] : links) {
        t.push_back({a, b, 1.0 / degree[a]});
        t.push_back({b, a, 1.0 / degree[b]});
    }
    const SparseMatrix w(m, m, std::move(t));
    const EigenPairs pairs = top_eigenpairs(w, degree, 3);

    std::vector<double> theta(m);
    for (std::size_t i = 0; i < m; ++i) {
        double a = std::atan2(pairs.right[2](idx(i)), pairs.right[1](idx(i)));
        if (a < 0.0) a += 2.0 * kPi;
        theta[i] = a;
    }
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return theta[a] < theta[b]; });

    AngularOrdering out;
    out.flagged = bridges.size();
    out.disconnected = n - m;
    for (std::size_t i : perm) {
        out.order.push_back(nodes[i]);
        out.angles.push_back(theta[i]);
    }
    return out;
}

AngularOrdering true_ordering(const Sinogram& sino) {
    AngularOrdering out;
    out.order.resize(sino.n);
    std::iota(out.order.begin(), out.order.end(), 0);
    std::stable_sort(out.order.begin(), out.order.end(),
                     [&](NodeId a, NodeId b) { return sino.angles[a] < sino.angles[b]; });
    for (NodeId v : out.order) out.angles.push_back(sino.angles[v]);
    return out;
}

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Each row convolved with the band-limited ramp kernel sampled at the bin spacing.
RowMatrix ramp_filter(const RowMatrix& rows) {
    const auto r = static_cast<std::size_t>(rows.cols());
    const double tau = 2.0 / static_cast<double>(r);
    std::size_t size = 1;
    while (size < 2 * r) size <<= 1;
    const std::size_t spectrum = size / 2 + 1;

    std::vector<double> buffer(size);
    auto* freq = fftw_alloc_complex(spectrum);
    fftw_plan forward;
    fftw_plan backward;
    {
        std::lock_guard lock(planner_mutex());
        forward = fftw_plan_dft_r2c_1d(static_cast<int>(size), buffer.data(), freq, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_1d(static_cast<int>(size), freq, buffer.data(), FFTW_ESTIMATE);
    }

    for (std::size_t j = 0; j < size; ++j) {
        const long k = j < size / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(size);
        if (k == 0)
            buffer[j] = 1.0 / (4.0 * tau * tau);
        else if (k % 2 != 0)
            buffer[j] = -1.0 / (kPi * kPi * static_cast<double>(k * k) * tau * tau);
        else
            buffer[j] = 0.0;
    }
    fftw_execute(forward);
    std::vector<double> kernel(spectrum);
    for (std::size_t j = 0; j < spectrum; ++j) kernel[j] = freq[j][0];

    RowMatrix out(rows.rows(), rows.cols());
    const double scale = tau / static_cast<double>(size);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        std::fill(buffer.begin(), buffer.end(), 0.0);
        for (std::size_t k = 0; k < r; ++k) buffer[k] = rows(i, idx(k));
        fftw_execute(forward);
        for (std::size_t j = 0; j < spectrum; ++j) {
            freq[j][0] *= kernel[j];
            freq[j][1] *= kernel[j];
        }
        fftw_execute(backward);
        for (std::size_t k = 0; k < r; ++k) out(i, idx(k)) = buffer[k] * scale;
    }

    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }
    fftw_free(freq);
    return out;
}

}  // namespace

Image backproject_filtered(const RowMatrix& rows, const std::vector<double>& angles,
                           std::size_t side) {
    if (static_cast<std::size_t>(rows.rows()) != angles.size())
        throw InvalidParameter("one angle per row required");
    if (angles.size() < 8) throw InsufficientData("reconstruction needs at least 8 projections");
    const auto r = static_cast<std::size_t>(rows.cols());
    const RowMatrix filtered = ramp_filter(rows);
    const std::size_t m = angles.size();
    std::vector<double> cs(m), sn(m);
    for (std::size_t a = 0; a < m; ++a) {
        cs[a] = std::cos(angles[a]);
        sn[a] = std::sin(angles[a]);
    }
    Image out(side);
    const double half_r = 0.5 * static_cast<double>(r);
    const double weight = kPi / static_cast<double>(m);
    parallel_for(side, [&](std::size_t i) {
        const double y = out.y(i);
        for (std::size_t j = 0; j < side; ++j) {
            const double x = out.x(j);
            double sum = 0.0;
            for (std::size_t a = 0; a < m; ++a) {
                const double pos = (x * cs[a] + y * sn[a] + 1.0) * half_r - 0.5;
                const double lo = std::floor(pos);
                const double f = pos - lo;
                const auto k = static_cast<long>(lo);
                const auto row = idx(a);
                if (k >= 0 && k < static_cast<long>(r)) sum += (1.0 - f) * filtered(row, k);
                if (k + 1 >= 0 && k + 1 < static_cast<long>(r)) sum += f * filtered(row, k + 1);
            }
            out.pixels(idx(i), idx(j)) = sum * weight;
        }
    });
    return out;
}

Image fbp_reconstruct(const AngularOrdering& ordering, const Sinogram& sino, std::size_t side) {
    const std::size_t m = ordering.order.size();
    if (m < 8) throw InsufficientData("reconstruction needs at least 8 projections");
    RowMatrix rows(idx(m), idx(sino.r));
    std::vector<double> angles(m);
    for (std::size_t a = 0; a < m; ++a) {
        if (ordering.order[a] >= sino.n) throw InvalidParameter("ordering refers to a missing row");
        rows.row(idx(a)) = sino.noisy.row(idx(ordering.order[a]));
        angles[a] = 2.0 * kPi * static_cast<double>(a) / static_cast<double>(m);
    }
    return backproject_filtered(rows, angles, side);
}

double raw_similarity(const Image& a, const Image& b) {
    if (a.side != b.side) throw InvalidParameter("images differ in size");
    const double na = a.pixels.norm();
    const double nb = b.pixels.norm();
    if (na == 0.0 || nb == 0.0) throw UndefinedSimilarity("similarity of a zero image");
    return a.pixels.cwiseProduct(b.pixels).sum() / (na * nb);
}

double similarity_rho(const Image& a, const Image& b) {
    if (a.side != b.side) throw InvalidParameter("images differ in size");
    if (a.pixels.norm() == 0.0 || b.pixels.norm() == 0.0)
        throw UndefinedSimilarity("similarity of a zero image");
    std::vector<double> score(720);
    parallel_for(score.size(), [&](std::size_t t) {
        const Image moved = rotate(b, static_cast<double>(t % 360), t >= 360);
        const double nm = moved.pixels.norm();
        score[t] = nm == 0.0 ? -1.0 : a.pixels.cwiseProduct(moved.pixels).sum() / (a.pixels.norm() * nm);
    });
    return *std::max_element(score.begin(), score.end());
}

double circular_kendall_tau(const std::vector<double>& true_angles) {
    const std::size_t m = true_angles.size();
    if (m < 2) throw InvalidParameter("Kendall tau needs at least 2 items");
    std::vector<std::size_t> by_angle(m);
    std::iota(by_angle.begin(), by_angle.end(), 0);
    std::stable_sort(by_angle.begin(), by_angle.end(),
                     [&](std::size_t a, std::size_t b) { return true_angles[a] < true_angles[b]; });
    std::vector<std::size_t> rank(m);
    for (std::size_t i = 0; i < m; ++i) rank[by_angle[i]] = i;

    const double pairs = 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
    double best = -1.0;
    std::vector<std::size_t> seq(m);
    for (int reflect = 0; reflect < 2; ++reflect)
        for (std::size_t c = 0; c < m; ++c) {
            for (std::size_t j = 0; j < m; ++j)
                seq[j] = rank[reflect ? (c + m - j) % m : (c + j) % m];
            long score = 0;
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = a + 1; b < m; ++b) score += seq[a] < seq[b] ? 1 : -1;
            best = std::max(best, static_cast<double>(score) / pairs);
        }
    return best;
}

namespace {

MethodResult evaluate(const Sinogram& sino, const Image& truth, const BenchmarkConfig& cfg,
                      Rule rule, double q, double p, AngularOrdering* keep_ordering,
                      Image* keep_image) {
    MethodResult res;
    res.rule = rule;
    res.q = q;
    RuleConfig rc;
    rc.q = q;
    rc.p = p;
    rc.epsilon = EpsilonChoice::infinite();
    AngularOrdering ordering;
    try {
        ordering = prune_and_order(sino, cfg.k, rule, rc, cfg.knn);
    } catch (const InsufficientData&) {
        // Everything disconnected: no reconstruction to score.
        res.disconnected = sino.n;
        return res;
    }
    res.flagged = ordering.flagged;
    res.disconnected = ordering.disconnected;
    std::vector<double> seen;
    for (NodeId v : ordering.order) seen.push_back(sino.angles[v]);
    res.kendall = circular_kendall_tau(seen);
    Image recon = fbp_reconstruct(ordering, sino, cfg.side);
    res.rho = recon.pixels.norm() == 0.0 ? 0.0 : similarity_rho(truth, recon);
    if (keep_ordering) *keep_ordering = std::move(ordering);
    if (keep_image) *keep_image = std::move(recon);
    return res;
}

}  // namespace

std::vector<SeedResult> run_benchmark(const BenchmarkConfig& cfg) {
    if (cfg.seeds == 0) throw InvalidParameter("need at least one seed");
    if (cfg.jdr_grid.empty()) throw InvalidParameter("empty JDR grid");
    const Image truth = shepp_logan(cfg.side);
    std::vector<SeedResult> out(cfg.seeds);
    for (std::size_t s = 0; s < cfg.seeds; ++s) {
        SeedResult& res = out[s];
        res.index = s;
        res.seed = derive_seed(cfg.seed, s);
        const Sinogram sino = random_sinogram(truth, cfg.n, cfg.r, cfg.snr_db, res.seed);
        const Image reference = backproject_filtered(sino.noisy, sino.angles, cfg.side);
        res.true_order_rho = reference.pixels.norm() == 0.0 ? 0.0 : similarity_rho(truth, reference);
        res.unpruned = evaluate(sino, truth, cfg, Rule::None, 0.5, cfg.npdr_p, nullptr, nullptr);
        for (double q : cfg.jdr_grid)
            res.jdr.push_back(evaluate(sino, truth, cfg, Rule::JDR, q, cfg.npdr_p, nullptr, nullptr));
        for (std::size_t i = 1; i < res.jdr.size(); ++i)
            if (res.jdr[i].rho > res.jdr[res.jdr_best].rho) res.jdr_best = i;
        res.npdr = evaluate(sino, truth, cfg, Rule::NPDR, cfg.npdr_q, cfg.npdr_p, &res.npdr_ordering,
                            &res.npdr_image);
    }
    return out;
}

void write_benchmark_csv(std::ostream& out, const BenchmarkConfig& cfg,
                         const std::vector<SeedResult>& results) {
    out << "# command=tomo\n# side=" << cfg.side << "\n# n=" << cfg.n << "\n# r=" << cfg.r
        << "\n# k=" << cfg.k << "\n# snr_db=" << cfg.snr_db << "\n# seed=" << cfg.seed
        << "\n# knn=" << (cfg.knn == KnnSymmetrization::Mutual ? "mutual" : "union")
        << "\n# seeds=" << cfg.seeds << "\n# npdr=epsilon:inf,p:" << cfg.npdr_p
        << ",q:" << cfg.npdr_q << "\n";
    out << "seed_index,seed,rule,q,flagged,disconnected,rho,kendall,jdr_best\n";
    out.precision(10);
    auto line = [&](const SeedResult& s, const MethodResult& m, int best) {
        out << s.index << ',' << s.seed << ',' << to_string(m.rule) << ',';
        if (m.rule != Rule::None) out << m.q;
        out << ',' << m.flagged << ',' << m.disconnected << ',' << m.rho << ',' << m.kendall << ','
            << best << '\n';
    };
    for (const auto& s : results) {
        out << s.index << ',' << s.seed << ",true_order,,0,0," << s.true_order_rho << ",1,0\n";
        line(s, s.unpruned, 0);
        for (std::size_t i = 0; i < s.jdr.size(); ++i) line(s, s.jdr[i], i == s.jdr_best ? 1 : 0);
        line(s, s.npdr, 0);
    }
}

void write_ordering_csv(std::ostream& out, const AngularOrdering& ordering, const Sinogram& sino) {
    out << "# flagged=" << ordering.flagged << "\n# disconnected=" << ordering.disconnected << '\n';
    out << "rank,node,estimated_angle,true_angle\n";
    out.precision(17);
    for (std::size_t i = 0; i < ordering.order.size(); ++i)
        out << i << ',' << ordering.order[i] << ',' << ordering.angles[i] << ','
            << sino.angles[ordering.order[i]] << '\n';
}

}  // namespace gd::tomo
