#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "graphdenoise/graph.hpp"
#include "graphdenoise/rules.hpp"

namespace gd::tomo {

/// Square image on [-1, 1]^2. Row 0 is the top (y = 1); pixel (i, j) has its center at
/// x = -1 + (2j + 1) / side, y = 1 - (2i + 1) / side.
struct Image {
    std::size_t side = 0;
    RowMatrix pixels;

    Image() = default;
    explicit Image(std::size_t side);  // zero-filled

    double x(std::size_t j) const;
    double y(std::size_t i) const;
    /// Bilinear sample at (x, y); zero outside the pixel-center grid.
    double sample(double x, double y) const;
};

struct Ellipse {
    double intensity;
    double semi_x;
    double semi_y;
    double cx;
    double cy;
    double tilt_deg;  // counter-clockwise

    bool contains(double x, double y) const;
};

/// Modified Shepp-Logan table (Toft's higher-contrast intensities), 10 ellipses.
const std::vector<Ellipse>& shepp_logan_table();

/// Sum of the intensities of the ellipses containing each pixel center.
Image rasterize(const std::vector<Ellipse>& ellipses, std::size_t side);
Image shepp_logan(std::size_t side);

/// Rotate counter-clockwise by `degrees` about the center, optionally reflecting
/// x -> -x first. Cubic convolution resampling, zero outside.
Image rotate(const Image& image, double degrees, bool reflect = false);

/// Centers of r equal bins covering [-1, 1].
std::vector<double> bin_centers(std::size_t r);

/// Line integrals along rays {s (cos t, sin t) + u (-sin t, cos t)}, s at bin centers,
/// sampled bilinearly every 1/side in u.
std::vector<double> radon_project(const Image& image, double theta, std::size_t r);

struct Sinogram {
    std::size_t n = 0;
    std::size_t r = 0;
    RowMatrix clean;  // n x r
    RowMatrix noisy;  // n x r
    std::vector<double> angles;  // true, in [0, 2 pi)
    double snr_db = kInfinity;
    double signal_power = 0.0;  // mean square of the clean entries
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Uniform random angles and white Gaussian noise of variance
/// signal_power / 10^(snr_db / 10). snr_db = +inf gives noiseless rows.
Sinogram random_sinogram(const Image& image, std::size_t n, std::size_t r, double snr_db,
                         std::uint64_t seed);

/// Binary layout, little-endian: "GDSINO01", uint64 n, uint64 r, float64 snr_db,
/// uint64 seed, n*r float64 noisy rows (row-major), n float64 true angles.
void write_sinogram(std::ostream& out, const Sinogram& sinogram);
/// Reads the noisy rows and angles back; `clean` is left empty.
Sinogram read_sinogram(std::istream& in);

/// Binary PGM (P5), 16-bit big-endian, linearly mapped from [min, max] to [0, 65535].
void write_pgm(std::ostream& out, const Image& image);

struct AngularOrdering {
    std::vector<NodeId> order;    // surviving node ids sorted by estimated angle
    std::vector<double> angles;   // estimated angles, ascending, aligned with `order`
    std::size_t flagged = 0;      // edges removed by the rule
    std::size_t disconnected = 0; // nodes discarded (degree < 2 or outside the largest component)
};

/// Mean-subtracts each noisy row, builds the k-NN graph, removes the edges flagged by
/// `rule` (Rule::None keeps all), drops nodes with fewer than two remaining edges, keeps
/// the largest component and orders it by atan2 of the two leading nontrivial
/// eigenvectors of the row-normalized adjacency.
AngularOrdering prune_and_order(const Sinogram& sinogram, std::size_t k, Rule rule,
                                const RuleConfig& cfg,
                                KnnSymmetrization knn = KnnSymmetrization::Union);

/// Ordering of all rows by their true angles.
AngularOrdering true_ordering(const Sinogram& sinogram);

/// Ram-Lak filtered backprojection of the given rows at the given angles.
Image backproject_filtered(const RowMatrix& rows, const std::vector<double>& angles,
                           std::size_t side);

/// Reconstruction from the noisy rows listed in `ordering`, placed at equispaced angles
/// 2 pi k / m in that order. Needs at least 8 rows.
Image fbp_reconstruct(const AngularOrdering& ordering, const Sinogram& sinogram, std::size_t side);

/// I . J / (|I| |J|) without alignment.
double raw_similarity(const Image& a, const Image& b);
/// Maximum of raw_similarity(a, rotate(b, deg, refl)) over deg = 0..359 and refl.
double similarity_rho(const Image& a, const Image& b);

/// Kendall tau between estimated positions and true angular ranks, maximized over the
/// 2m circular shifts and reflections of the estimated cycle. `true_angles[i]` is the
/// true angle of the i-th node in estimated order.
double circular_kendall_tau(const std::vector<double>& true_angles);

struct BenchmarkConfig {
    std::size_t side = 128;
    std::size_t n = 256;
    std::size_t r = 128;
    std::size_t k = 32;
    // Mutual selection leaves weakly attached projections with few edges, which is the
    // regime where pruning can isolate nodes; a union graph keeps every degree >= k.
    KnnSymmetrization knn = KnnSymmetrization::Mutual;
    double snr_db = -2.0;
    std::uint64_t seed = 1;
    std::size_t seeds = 5;
    std::vector<double> jdr_grid = {0.70, 0.74, 0.78, 0.82};
    double npdr_q = 0.8;
    double npdr_p = 0.01;
};

struct MethodResult {
    Rule rule = Rule::None;
    double q = 0.0;
    std::size_t flagged = 0;
    std::size_t disconnected = 0;
    double rho = 0.0;
    double kendall = 0.0;
};

struct SeedResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::vector<MethodResult> jdr;  // one per grid value
    std::size_t jdr_best = 0;       // index into jdr, highest rho
    MethodResult npdr;
    MethodResult unpruned;
    double true_order_rho = 0.0;  // noisy rows backprojected at their true angles
    AngularOrdering npdr_ordering;
    Image npdr_image;
};

/// Sinogram for seed index s uses derive_seed(seed, s).
std::vector<SeedResult> run_benchmark(const BenchmarkConfig& config);

void write_benchmark_csv(std::ostream& out, const BenchmarkConfig& config,
                         const std::vector<SeedResult>& results);
void write_ordering_csv(std::ostream& out, const AngularOrdering& ordering,
                        const Sinogram& sinogram);

}  // namespace gd::tomo
