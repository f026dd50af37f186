#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "mriaug/error.hpp"
#include "mriaug/fft.hpp"
#include "mriaug/grid.hpp"
#include "mriaug/volume.hpp"

namespace mriaug {

/// Complex spectrum, unshifted: DC at (0, 0, 0).
using KSpace = Grid3<cplx>;

/// Forward 3D DFT, unnormalized.
template <typename T>
KSpace fft3(const Grid3<T>& v) {
    KSpace k(v.shape());
    for (std::size_t i = 0; i < v.size(); ++i) k[i] = cplx(static_cast<double>(v[i]), 0.0);
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) fft_along(k, a, false);
    return k;
}

inline KSpace fft3(const Volume& v) { return fft3(v.data()); }

/// Inverse 3D DFT with 1/N normalization, complex result.
inline Grid3<cplx> ifft3_complex(KSpace k) {
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) fft_along(k, a, true);
    const double scale = 1.0 / static_cast<double>(k.size());
    for (auto& c : k) c *= scale;
    return k;
}

/// Inverse 3D DFT followed by the complex magnitude (magnitude reconstruction).
inline Grid3<double> ifft3_magnitude(const KSpace& k) {
    const Grid3<cplx> c = ifft3_complex(k);
    Grid3<double> out(c.shape());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = std::abs(c[i]);
    return out;
}

/// ifft3 as a Volume on the identity grid.
inline Volume ifft3(const KSpace& k) {
    const Grid3<double> m = ifft3_magnitude(k);
    Grid3<float> out(m.shape());
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = static_cast<float>(m[i]);
    return Volume(std::move(out));
}

/// Signed frequency of unshifted index j on an axis of length len; the
/// Nyquist bin of an even axis maps to -len/2.
inline std::int64_t signed_frequency(std::size_t j, std::size_t len) {
    const auto sj = static_cast<std::int64_t>(j);
    const auto sl = static_cast<std::int64_t>(len);
    return 2 * sj < sl ? sj : sj - sl;
}

/// The sampled cutoff is expressed on a 256-sample axis; scale it to `len`.
inline std::int64_t effective_cutoff(std::int64_t cutoff, std::size_t len) {
    return std::llround(static_cast<double>(cutoff) * static_cast<double>(len) / 256.0);
}

/// Zeroes every entry whose |signed frequency| along `axis` exceeds keep/2.
/// Returns the number of planes removed.
inline std::size_t truncate_band(KSpace& k, std::int64_t keep, Axis axis) {
    const std::size_t len = k.extent(axis);
    std::size_t removed = 0;
    std::vector<bool> cut(len);
    for (std::size_t j = 0; j < len; ++j) {
        cut[j] = 2 * std::llabs(signed_frequency(j, len)) > keep;
        removed += cut[j];
    }
    if (removed == 0) return 0;
    const int a = static_cast<int>(axis);
    for_each_voxel(k.shape(), [&](std::size_t x, std::size_t y, std::size_t z, std::size_t i) {
        const std::size_t c[3] = {x, y, z};
        if (cut[c[a]]) k[i] = cplx{};
    });
    return removed;
}

/// Multiplies every plane whose index along `axis` is 0 mod n by `factor`.
/// Returns the number of planes touched, ceil(len / n).
inline std::size_t modulate_comb(KSpace& k, std::int64_t n, double factor, Axis axis) {
    const auto step = static_cast<std::size_t>(n);
    const int a = static_cast<int>(axis);
    for_each_voxel(k.shape(), [&](std::size_t x, std::size_t y, std::size_t z, std::size_t i) {
        const std::size_t c[3] = {x, y, z};
        if (c[a] % step == 0) k[i] *= factor;
    });
    return (k.extent(axis) + step - 1) / step;
}

/// Divides by the maximum so values land in [0, 1]; an all-zero input stays zero.
inline Grid3<float> renormalize_by_max(const Grid3<double>& g) {
    const double peak = *std::max_element(g.begin(), g.end());
    Grid3<float> out(g.shape());
    if (!(peak > 0.0)) return out;
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = std::clamp(static_cast<float>(g[i] / peak), 0.0f, 1.0f);
    return out;
}

namespace detail {

inline std::int64_t checked_keep(std::int64_t cutoff, std::size_t len) {
    if (cutoff < 1) fail(ErrorCode::BadCutoff, "cutoff " + std::to_string(cutoff) + " < 1");
    const std::int64_t keep = effective_cutoff(cutoff, len);
    if (keep < 1)
        fail(ErrorCode::BadCutoff, "effective cutoff rounds to " + std::to_string(keep) + " on an axis of length " +
                                       std::to_string(len));
    return keep;
}

inline void check_ghost_params(std::int64_t n, double factor) {
    if (n < 2) fail(ErrorCode::BadN, "ghost period " + std::to_string(n) + " < 2");
    if (!(factor > 0.0 && factor <= 1.0)) fail(ErrorCode::BadFactor, "factor " + std::to_string(factor) + " outside (0, 1]");
}

} // namespace detail

/// Magnitude image after k-space truncation, before renormalization.
inline Grid3<double> ringing_magnitude(const Volume& v, std::int64_t cutoff, Axis axis) {
    const std::int64_t keep = detail::checked_keep(cutoff, v.data().extent(axis));
    KSpace k = fft3(v);
    truncate_band(k, keep, axis);
    return ifft3_magnitude(k);
}

/// Gibbs ringing: keeps the central k' = round(cutoff * L / 256) band along
/// `axis`, reconstructs by magnitude and renormalizes to [0, 1].
inline Volume gibbs_ringing(const Volume& v, std::int64_t cutoff, Axis axis) {
    const std::size_t len = v.data().extent(axis);
    const std::int64_t keep = detail::checked_keep(cutoff, len);
    if (keep >= static_cast<std::int64_t>(len)) return v;
    return v.with_data(renormalize_by_max(ringing_magnitude(v, cutoff, axis)));
}

/// Magnitude image after comb modulation, before renormalization.
inline Grid3<double> ghosting_magnitude(const Volume& v, std::int64_t n, double factor, Axis axis) {
    detail::check_ghost_params(n, factor);
    KSpace k = fft3(v);
    modulate_comb(k, n, factor, axis);
    return ifft3_magnitude(k);
}

/// Motion ghosting: every n-th k-space plane along `axis` (DC included) is
/// weighted by `factor`, producing n - 1 ghosts at multiples of L / n.
inline Volume motion_ghosting(const Volume& v, std::int64_t n, double factor, Axis axis) {
    detail::check_ghost_params(n, factor);
    if (factor == 1.0) return v;
    return v.with_data(renormalize_by_max(ghosting_magnitude(v, n, factor, axis)));
}

} // namespace mriaug
