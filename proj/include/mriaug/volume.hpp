#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "mriaug/affine.hpp"
#include "mriaug/error.hpp"
#include "mriaug/grid.hpp"

namespace mriaug {

using Label = std::int32_t;

/// Scalar image: float voxels plus the voxel-to-world affine.
class Volume {
public:
    Volume() = default;

    explicit Volume(Grid3<float> data, const Mat4& affine = identity_affine(),
                    std::optional<std::pair<double, double>> intensity_range = std::nullopt)
        : data_(std::move(data)), affine_(affine), intensity_range_(intensity_range) {
        if (!is_invertible(affine_)) fail(ErrorCode::NonInvertibleAffine, "volume affine is singular");
        for (float v : data_)
            if (!std::isfinite(v)) fail(ErrorCode::NonFiniteData, "volume contains NaN or Inf");
    }

    const Grid3<float>& data() const noexcept { return data_; }
    const Shape& shape() const noexcept { return data_.shape(); }
    const Mat4& affine() const noexcept { return affine_; }
    const std::optional<std::pair<double, double>>& intensity_range() const noexcept { return intensity_range_; }

    /// Voxel sizes in mm, taken as the column norms of the affine.
    Vec3 spacing() const {
        Vec3 s{};
        for (int j = 0; j < 3; ++j)
            s[j] = std::sqrt(affine_[0][j] * affine_[0][j] + affine_[1][j] * affine_[1][j] +
                             affine_[2][j] * affine_[2][j]);
        return s;
    }

    /// Same geometry and intensity record, new voxel values.
    Volume with_data(Grid3<float> data) const {
        if (data.shape() != shape())
            fail(ErrorCode::ShapeMismatch, shape_string(data.shape()) + " vs " + shape_string(shape()));
        return Volume(std::move(data), affine_, intensity_range_);
    }

    friend bool operator==(const Volume&, const Volume&) = default;

private:
    Grid3<float> data_;
    Mat4 affine_ = identity_affine();
    std::optional<std::pair<double, double>> intensity_range_;
};

/// Segmentation map paired with a Volume. Values are non-negative.
class LabelVolume {
public:
    LabelVolume() = default;

    explicit LabelVolume(Grid3<Label> data) : data_(std::move(data)) {
        for (Label l : data_)
            if (l < 0) fail(ErrorCode::BadLabel, "negative label " + std::to_string(l));
    }

    const Grid3<Label>& data() const noexcept { return data_; }
    const Shape& shape() const noexcept { return data_.shape(); }

    friend bool operator==(const LabelVolume&, const LabelVolume&) = default;

private:
    Grid3<Label> data_;
};

inline std::set<Label> label_set(const LabelVolume& labels) {
    return std::set<Label>(labels.data().begin(), labels.data().end());
}

inline bool is_normalized(const Volume& v) {
    return std::all_of(v.data().begin(), v.data().end(), [](float x) { return x >= 0.0f && x <= 1.0f; });
}

// ---------------------------------------------------------------------------
// Orientation

/// Three-letter axis code (e.g. "RAS", "LPI") naming the world direction each
/// voxel axis points toward.
struct Orientation {
    std::array<char, 3> code{'R', 'A', 'S'};

    std::string str() const { return std::string(code.begin(), code.end()); }
    bool is_ras() const { return code == std::array<char, 3>{'R', 'A', 'S'}; }
    friend bool operator==(const Orientation&, const Orientation&) = default;
};

namespace detail {

struct AxisMapping {
    std::array<int, 3> world_of_voxel{}; // voxel axis j points along world axis world_of_voxel[j]
    std::array<bool, 3> negative{};      // ... in the negative direction
};

/// Dominant world axis per affine column. Throws ObliqueAffine when a column
/// has no component within 45 degrees, or two columns share a world axis.
inline AxisMapping axis_mapping(const Mat4& a) {
    if (!is_invertible(a)) fail(ErrorCode::NonInvertibleAffine, "affine has zero determinant");
    AxisMapping m;
    std::array<bool, 3> used{};
    for (int j = 0; j < 3; ++j) {
        const double norm = std::sqrt(a[0][j] * a[0][j] + a[1][j] * a[1][j] + a[2][j] * a[2][j]);
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(a[i][j]) > std::abs(a[best][j])) best = i;
        if (!(std::abs(a[best][j]) > norm * std::cos(std::numbers::pi / 4.0)))
            fail(ErrorCode::ObliqueAffine, "voxel axis " + std::to_string(j) + " has no dominant world direction");
        if (used[best]) fail(ErrorCode::ObliqueAffine, "two voxel axes map to the same world axis");
        used[best] = true;
        m.world_of_voxel[j] = best;
        m.negative[j] = a[best][j] < 0.0;
    }
    return m;
}

template <typename T>
Grid3<T> permute_flip(const Grid3<T>& in, const std::array<int, 3>& perm, const std::array<bool, 3>& flip) {
    const Shape& s = in.shape();
    Shape out_shape{s[perm[0]], s[perm[1]], s[perm[2]]};
    Grid3<T> out(out_shape);
    for_each_voxel(out_shape, [&](std::size_t x, std::size_t y, std::size_t z, std::size_t i) {
        const std::array<std::size_t, 3> o{x, y, z};
        std::array<std::size_t, 3> v{};
        for (int k = 0; k < 3; ++k) v[perm[k]] = flip[k] ? out_shape[k] - 1 - o[k] : o[k];
        out[i] = in(v[0], v[1], v[2]);
    });
    return out;
}

} // namespace detail

inline Orientation orientation_of(const Mat4& affine) {
    static constexpr char pos[3] = {'R', 'A', 'S'};
    static constexpr char neg[3] = {'L', 'P', 'I'};
    const auto m = detail::axis_mapping(affine);
    Orientation o;
    for (int j = 0; j < 3; ++j) o.code[j] = m.negative[j] ? neg[m.world_of_voxel[j]] : pos[m.world_of_voxel[j]];
    return o;
}

struct Reoriented {
    Volume image;
    std::optional<LabelVolume> labels;
};

/// Permutes and flips voxel axes so each affine column points along +x, +y, +z.
/// No interpolation; oblique affines are refused.
inline Reoriented reorient_to_ras(const Volume& v, const std::optional<LabelVolume>& labels = std::nullopt) {
    if (labels && labels->shape() != v.shape())
        fail(ErrorCode::ShapeMismatch, "labels " + shape_string(labels->shape()) + " vs image " + shape_string(v.shape()));
    const auto m = detail::axis_mapping(v.affine());

    std::array<int, 3> perm{};  // output axis i reads input voxel axis perm[i]
    std::array<bool, 3> flip{};
    for (int j = 0; j < 3; ++j) {
        perm[m.world_of_voxel[j]] = j;
        flip[m.world_of_voxel[j]] = m.negative[j];
    }
    if (perm == std::array<int, 3>{0, 1, 2} && flip == std::array<bool, 3>{})
        return {v, labels};

    const Shape& s = v.shape();
    Mat4 t{};
    t[3][3] = 1.0;
    for (int i = 0; i < 3; ++i) {
        t[perm[i]][i] = flip[i] ? -1.0 : 1.0;
        t[perm[i]][3] = flip[i] ? static_cast<double>(s[perm[i]] - 1) : 0.0;
    }
    Reoriented out{Volume(detail::permute_flip(v.data(), perm, flip), v.affine() * t, v.intensity_range()),
                   std::nullopt};
    if (labels) out.labels = LabelVolume(detail::permute_flip(labels->data(), perm, flip));
    return out;
}

// ---------------------------------------------------------------------------
// Intensity and metrics

/// Affine map of [min, max] onto [0, 1]; the original range is recorded.
inline Volume normalize_intensity(const Volume& v) {
    const auto [lo_it, hi_it] = std::minmax_element(v.data().begin(), v.data().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) fail(ErrorCode::ConstantVolume, "cannot normalize a constant volume");
    Grid3<float> out(v.shape());
    const double span = hi - lo;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::clamp(static_cast<float>((static_cast<double>(v.data()[i]) - lo) / span), 0.0f, 1.0f);
    return Volume(std::move(out), v.affine(), std::make_pair(lo, hi));
}

/// 2|A∩B| / (|A| + |B|) for one label; 1.0 when both masks are empty.
inline double dice_coefficient(const LabelVolume& a, const LabelVolume& b, Label label) {
    if (a.shape() != b.shape())
        fail(ErrorCode::ShapeMismatch, shape_string(a.shape()) + " vs " + shape_string(b.shape()));
    std::size_t na = 0, nb = 0, both = 0;
    const auto& da = a.data();
    const auto& db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const bool ia = da[i] == label;
        const bool ib = db[i] == label;
        na += ia;
        nb += ib;
        both += ia && ib;
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

struct VolumeStats {
    double mean = 0.0;
    double std = 0.0; // population standard deviation
    double min = 0.0;
    double max = 0.0;
    std::array<std::uint64_t, 256> histogram{}; // equal-width bins over [min, max]
};

inline VolumeStats volume_stats(const Volume& v) {
    const auto& d = v.data();
    VolumeStats s;
    const auto [lo_it, hi_it] = std::minmax_element(d.begin(), d.end());
    s.min = *lo_it;
    s.max = *hi_it;
    double sum = 0.0;
    for (float x : d) sum += x;
    s.mean = sum / static_cast<double>(d.size());
    double ss = 0.0;
    for (float x : d) {
        const double dx = x - s.mean;
        ss += dx * dx;
    }
    s.std = std::sqrt(ss / static_cast<double>(d.size()));
    const double span = s.max - s.min;
    for (float x : d) {
        std::size_t bin = 0;
        if (span > 0.0) bin = std::min<std::size_t>(255, static_cast<std::size_t>((x - s.min) / span * 256.0));
        ++s.histogram[bin];
    }
    return s;
}

} // namespace mriaug
