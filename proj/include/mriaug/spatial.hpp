#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "mriaug/error.hpp"
#include "mriaug/grid.hpp"
#include "mriaug/rng.hpp"
#include "mriaug/volume.hpp"

namespace mriaug {

enum class Interp { Trilinear, Nearest };

// ---------------------------------------------------------------------------
// Sampling

/// Trilinear read at a continuous voxel coordinate; samples outside the grid are 0.
template <typename T>
double sample_trilinear(const Grid3<T>& g, const Vec3& p) {
    const Shape& s = g.shape();
    std::array<std::int64_t, 3> base{};
    std::array<double, 3> frac{};
    for (int a = 0; a < 3; ++a) {
        const double f = std::floor(p[a]);
        base[a] = static_cast<std::int64_t>(f);
        frac[a] = p[a] - f;
    }
    double acc = 0.0;
    for (int corner = 0; corner < 8; ++corner) {
        double w = 1.0;
        std::array<std::int64_t, 3> c{};
        for (int a = 0; a < 3; ++a) {
            const bool hi = (corner >> a) & 1;
            w *= hi ? frac[a] : 1.0 - frac[a];
            c[a] = base[a] + hi;
        }
        if (w == 0.0) continue;
        if (c[0] < 0 || c[1] < 0 || c[2] < 0 || c[0] >= static_cast<std::int64_t>(s[0]) ||
            c[1] >= static_cast<std::int64_t>(s[1]) || c[2] >= static_cast<std::int64_t>(s[2]))
            continue;
        acc += w * static_cast<double>(g(static_cast<std::size_t>(c[0]), static_cast<std::size_t>(c[1]),
                                         static_cast<std::size_t>(c[2])));
    }
    return acc;
}

/// Nearest index along one axis; exact .5 ties go to the neighbour farther
/// from the axis centre so the rule is symmetric under flips.
inline std::int64_t nearest_index(double p, std::size_t len) {
    const double f = std::floor(p);
    const double frac = p - f;
    auto r = static_cast<std::int64_t>(f);
    if (frac > 0.5) return r + 1;
    if (frac < 0.5) return r;
    const double centre = (static_cast<double>(len) - 1.0) / 2.0;
    return p >= centre ? r + 1 : r;
}

template <typename T>
T sample_nearest(const Grid3<T>& g, const Vec3& p) {
    const Shape& s = g.shape();
    std::array<std::int64_t, 3> c{};
    for (int a = 0; a < 3; ++a) {
        if (!std::isfinite(p[a])) return T{};
        c[a] = nearest_index(p[a], s[a]);
        if (c[a] < 0 || c[a] >= static_cast<std::int64_t>(s[a])) return T{};
    }
    return g(static_cast<std::size_t>(c[0]), static_cast<std::size_t>(c[1]), static_cast<std::size_t>(c[2]));
}

/// out[x] = interpolate(v, mapping(x)), zero outside the grid. `mapping`
/// takes (x, y, z) output indices and returns a source voxel coordinate.
template <typename Mapping>
Volume resample(const Volume& v, Mapping&& mapping, Interp interp) {
    Grid3<float> out(v.shape());
    const auto& src = v.data();
    for_each_voxel(v.shape(), [&](std::size_t x, std::size_t y, std::size_t z, std::size_t i) {
        const Vec3 p = mapping(x, y, z);
        out[i] = interp == Interp::Trilinear ? static_cast<float>(sample_trilinear(src, p)) : sample_nearest(src, p);
    });
    return v.with_data(std::move(out));
}

/// Labels are always resampled nearest-neighbour, so no new label values appear.
template <typename Mapping>
LabelVolume resample_labels(const LabelVolume& labels, Mapping&& mapping) {
    Grid3<Label> out(labels.shape());
    for_each_voxel(labels.shape(), [&](std::size_t x, std::size_t y, std::size_t z, std::size_t i) {
        out[i] = sample_nearest(labels.data(), mapping(x, y, z));
    });
    return LabelVolume(std::move(out));
}

struct SpatialResult {
    Volume image;
    std::optional<LabelVolume> labels;
};

// ---------------------------------------------------------------------------
// Rotation

struct RotationParams {
    Vec3 degrees{}; // about x, then y, then z (intrinsic)
};

using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 mat3_mul(const Mat3& a, const Mat3& b) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

/// Intrinsic x -> y -> z rotation: R = Rx(a) * Ry(b) * Rz(c).
inline Mat3 rotation_matrix(const Vec3& degrees) {
    const double k = std::numbers::pi / 180.0;
    const double a = degrees[0] * k, b = degrees[1] * k, c = degrees[2] * k;
    const Mat3 rx{{{1, 0, 0}, {0, std::cos(a), -std::sin(a)}, {0, std::sin(a), std::cos(a)}}};
    const Mat3 ry{{{std::cos(b), 0, std::sin(b)}, {0, 1, 0}, {-std::sin(b), 0, std::cos(b)}}};
    const Mat3 rz{{{std::cos(c), -std::sin(c), 0}, {std::sin(c), std::cos(c), 0}, {0, 0, 1}}};
    return mat3_mul(mat3_mul(rx, ry), rz);
}

/// Rotates about the volume centre in physical (mm) space by inverse mapping.
/// Image is trilinear, labels nearest; the shape is unchanged.
inline SpatialResult rotate(const Volume& v, const std::optional<LabelVolume>& labels, const RotationParams& p) {
    if (!orientation_of(v.affine()).is_ras())
        fail(ErrorCode::NotRasOriented, "rotation expects RAS, got " + orientation_of(v.affine()).str());
    if (labels && labels->shape() != v.shape())
        fail(ErrorCode::ShapeMismatch, "labels " + shape_string(labels->shape()) + " vs image " + shape_string(v.shape()));
    if (p.degrees == Vec3{0.0, 0.0, 0.0}) return {v, labels};

    const Mat3 r = rotation_matrix(p.degrees);
    const Vec3 sp = v.spacing();
    const Shape& s = v.shape();
    const Vec3 c{(static_cast<double>(s[0]) - 1) / 2, (static_cast<double>(s[1]) - 1) / 2,
                 (static_cast<double>(s[2]) - 1) / 2};
    // src = c + S^-1 R^T S (x - c)
    auto mapping = [&](std::size_t x, std::size_t y, std::size_t z) {
        const Vec3 d{(static_cast<double>(x) - c[0]) * sp[0], (static_cast<double>(y) - c[1]) * sp[1],
                     (static_cast<double>(z) - c[2]) * sp[2]};
        Vec3 src{};
        for (int i = 0; i < 3; ++i) src[i] = c[i] + (r[0][i] * d[0] + r[1][i] * d[1] + r[2][i] * d[2]) / sp[i];
        return src;
    };
    SpatialResult out{resample(v, mapping, Interp::Trilinear), std::nullopt};
    if (labels) out.labels = resample_labels(*labels, mapping);
    return out;
}

// ---------------------------------------------------------------------------
// Elastic deformation

/// Per-voxel displacement in voxel units.
struct DisplacementField {
    Grid3<float> dx, dy, dz;

    const Shape& shape() const noexcept { return dx.shape(); }
};

/// Normalized Gaussian taps for offsets -R..R with R = ceil(4 sigma).
inline std::vector<double> gaussian_kernel(double sigma) {
    const auto radius = static_cast<std::int64_t>(std::ceil(4.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (std::int64_t t = -radius; t <= radius; ++t) {
        const double w = std::exp(-0.5 * static_cast<double>(t * t) / (sigma * sigma));
        k[static_cast<std::size_t>(t + radius)] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

/// Half-sample symmetric reflection (d c b a | a b c d | d c b a), valid for any offset.
inline std::size_t reflect_index(std::int64_t i, std::size_t len) {
    const auto period = static_cast<std::int64_t>(2 * len);
    std::int64_t m = i % period;
    if (m < 0) m += period;
    if (m >= static_cast<std::int64_t>(len)) m = period - 1 - m;
    return static_cast<std::size_t>(m);
}

namespace detail {

/// Sparse rows of the reflect-padded convolution operator along one axis.
/// Taps landing on the same source sample are folded together, so a kernel
/// wider than the axis costs at most `len` multiply-adds per output.
struct FoldedKernel {
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;

    FoldedKernel(const std::vector<double>& kernel, std::size_t len) : rows(len) {
        const auto radius = static_cast<std::int64_t>(kernel.size() / 2);
        std::vector<double> dense(len);
        for (std::size_t i = 0; i < len; ++i) {
            std::fill(dense.begin(), dense.end(), 0.0);
            for (std::int64_t t = -radius; t <= radius; ++t)
                dense[reflect_index(static_cast<std::int64_t>(i) + t, len)] += kernel[static_cast<std::size_t>(t + radius)];
            for (std::size_t j = 0; j < len; ++j)
                if (dense[j] != 0.0) rows[i].emplace_back(j, dense[j]);
        }
    }
};

inline void convolve_axis(Grid3<double>& g, const std::vector<double>& kernel, Axis axis) {
    const std::size_t len = g.extent(axis);
    const FoldedKernel fk(kernel, len);
    const std::size_t stride = g.stride(axis);
    const Shape& s = g.shape();
    const int a = static_cast<int>(axis);
    const int u = (a + 1) % 3;
    const int v = (a + 2) % 3;
    std::vector<double> in(len), out(len);
    for (std::size_t j = 0; j < s[v]; ++j) {
        for (std::size_t i = 0; i < s[u]; ++i) {
            std::array<std::size_t, 3> c{};
            c[u] = i;
            c[v] = j;
            const std::size_t base = g.index(c[0], c[1], c[2]);
            for (std::size_t k = 0; k < len; ++k) in[k] = g[base + k * stride];
            for (std::size_t k = 0; k < len; ++k) {
                double acc = 0.0;
                for (const auto& [src, w] : fk.rows[k]) acc += w * in[src];
                out[k] = acc;
            }
            for (std::size_t k = 0; k < len; ++k) g[base + k * stride] = out[k];
        }
    }
}

} // namespace detail

/// Separable Gaussian smoothing (truncated at 4 sigma, reflect padding).
inline void gaussian_smooth(Grid3<double>& g, double sigma) {
    const auto kernel = gaussian_kernel(sigma);
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) detail::convolve_axis(g, kernel, a);
}

/// Each component: i.i.d. U(-1, 1) per voxel, Gaussian-smoothed, times alpha.
inline DisplacementField generate_displacement_field(const Shape& shape, double kernel_sigma, double alpha,
                                                     std::uint64_t seed) {
    if (shape[0] == 0 || shape[1] == 0 || shape[2] == 0) fail(ErrorCode::BadShape, "empty shape");
    if (!(kernel_sigma > 0.0) || !std::isfinite(kernel_sigma)) fail(ErrorCode::BadShape, "kernel sigma must be > 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail(ErrorCode::BadShape, "alpha must be >= 0");
    DisplacementField f{Grid3<float>(shape), Grid3<float>(shape), Grid3<float>(shape)};
    if (alpha == 0.0) return f;
    Grid3<float>* comps[3] = {&f.dx, &f.dy, &f.dz};
    for (std::uint64_t c = 0; c < 3; ++c) {
        const IndexedNormal gen(seed, 16 + c);
        Grid3<double> noise(shape);
        for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = gen.symmetric_uniform(i);
        gaussian_smooth(noise, kernel_sigma);
        Grid3<float>& dst = *comps[c];
        for (std::size_t i = 0; i < noise.size(); ++i) dst[i] = static_cast<float>(alpha * noise[i]);
    }
    return f;
}

inline DisplacementField generate_displacement_field(const Shape& shape, double kernel_sigma, double alpha,
                                                     SeededRng& rng) {
    return generate_displacement_field(shape, kernel_sigma, alpha, rng.next_u64());
}

/// out[x] = interpolate(v, x + field(x)); trilinear image, nearest labels.
inline SpatialResult elastic_deform(const Volume& v, const std::optional<LabelVolume>& labels,
                                    const DisplacementField& field) {
    if (field.shape() != v.shape())
        fail(ErrorCode::ShapeMismatch, "field " + shape_string(field.shape()) + " vs image " + shape_string(v.shape()));
    if (labels && labels->shape() != v.shape())
        fail(ErrorCode::ShapeMismatch, "labels " + shape_string(labels->shape()) + " vs image " + shape_string(v.shape()));
    auto mapping = [&](std::size_t x, std::size_t y, std::size_t z) {
        const std::size_t i = field.dx.index(x, y, z);
        return Vec3{static_cast<double>(x) + field.dx[i], static_cast<double>(y) + field.dy[i],
                    static_cast<double>(z) + field.dz[i]};
    };
    SpatialResult out{resample(v, mapping, Interp::Trilinear), std::nullopt};
    if (labels) out.labels = resample_labels(*labels, mapping);
    return out;
}

} // namespace mriaug
