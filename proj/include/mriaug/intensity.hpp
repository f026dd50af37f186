#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "mriaug/error.hpp"
#include "mriaug/grid.hpp"
#include "mriaug/rng.hpp"
#include "mriaug/volume.hpp"

namespace mriaug {

namespace detail {

inline constexpr std::uint64_t additive_noise_stream = 1;
inline constexpr std::uint64_t multiplicative_noise_stream = 2;

inline void check_sigma(double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        fail(ErrorCode::NegativeSigma, "sigma must be finite and >= 0, got " + std::to_string(sigma));
}

} // namespace detail

/// sigma * N(0, 1) per voxel, the draw for voxel i addressed by (seed, stream, i).
/// This is the pre-clamp perturbation both noise transforms use.
inline Grid3<double> gaussian_noise_field(const Shape& shape, double sigma, std::uint64_t seed,
                                          std::uint64_t stream = detail::additive_noise_stream) {
    detail::check_sigma(sigma);
    Grid3<double> n(shape);
    const IndexedNormal gen(seed, stream);
    for (std::size_t i = 0; i < n.size(); ++i) n[i] = sigma * gen.normal(i);
    return n;
}

/// out = clamp(v + n, 0, 1) with n ~ N(0, sigma^2) i.i.d.
inline Volume additive_gaussian_noise(const Volume& v, double sigma, std::uint64_t noise_seed) {
    detail::check_sigma(sigma);
    if (sigma == 0.0) return v;
    const IndexedNormal gen(noise_seed, detail::additive_noise_stream);
    Grid3<float> out(v.shape());
    const auto& in = v.data();
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::clamp(static_cast<float>(in[i] + sigma * gen.normal(i)), 0.0f, 1.0f);
    return v.with_data(std::move(out));
}

inline Volume additive_gaussian_noise(const Volume& v, double sigma, SeededRng& rng) {
    return additive_gaussian_noise(v, sigma, rng.next_u64());
}

/// Speckle: out = clamp(v * (1 + n), 0, 1) with n ~ N(0, sigma^2).
inline Volume multiplicative_noise(const Volume& v, double sigma, std::uint64_t noise_seed) {
    detail::check_sigma(sigma);
    if (sigma == 0.0) return v;
    const IndexedNormal gen(noise_seed, detail::multiplicative_noise_stream);
    Grid3<float> out(v.shape());
    const auto& in = v.data();
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::clamp(static_cast<float>(in[i] * (1.0 + sigma * gen.normal(i))), 0.0f, 1.0f);
    return v.with_data(std::move(out));
}

inline Volume multiplicative_noise(const Volume& v, double sigma, SeededRng& rng) {
    return multiplicative_noise(v, sigma, rng.next_u64());
}

struct BiasFieldParams {
    Vec3 center{};          // voxel coordinates
    double scale = 1.0;     // Gaussian width in voxels
    double amplitude = 0.0; // peak log-gain
};

/// field(x) = exp(a * exp(-|x - c|^2 / (2 s^2))): smooth, >= 1, peak exp(a) at c.
inline Grid3<double> generate_bias_field(const Shape& shape, const BiasFieldParams& p) {
    if (shape[0] == 0 || shape[1] == 0 || shape[2] == 0) fail(ErrorCode::BadShape, "empty shape");
    for (int i = 0; i < 3; ++i)
        if (!(p.center[i] >= 0.0 && p.center[i] <= static_cast<double>(shape[i] - 1)))
            fail(ErrorCode::BadShape, "bias center outside the grid " + shape_string(shape));
    if (!(p.scale > 0.0) || !std::isfinite(p.scale)) fail(ErrorCode::BadShape, "bias scale must be > 0");
    if (!(p.amplitude >= 0.0) || !std::isfinite(p.amplitude)) fail(ErrorCode::BadShape, "bias amplitude must be >= 0");

    Grid3<double> field(shape);
    const double inv = 1.0 / (2.0 * p.scale * p.scale);
    for_each_voxel(shape, [&](std::size_t x, std::size_t y, std::size_t z, std::size_t i) {
        const double dx = static_cast<double>(x) - p.center[0];
        const double dy = static_cast<double>(y) - p.center[1];
        const double dz = static_cast<double>(z) - p.center[2];
        field[i] = std::exp(p.amplitude * std::exp(-(dx * dx + dy * dy + dz * dz) * inv));
    });
    return field;
}

/// out = v * field, rescaled so the maximum is 1.
inline Volume bias_field(const Volume& v, const BiasFieldParams& p) {
    const Grid3<double> field = generate_bias_field(v.shape(), p);
    const auto& in = v.data();
    double peak = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) peak = std::max(peak, in[i] * field[i]);
    if (!(peak > 0.0)) return v;
    Grid3<float> out(v.shape());
    for (std::size_t i = 0; i < in.size(); ++i)
        out[i] = std::clamp(static_cast<float>(in[i] * field[i] / peak), 0.0f, 1.0f);
    return v.with_data(std::move(out));
}

} // namespace mriaug
