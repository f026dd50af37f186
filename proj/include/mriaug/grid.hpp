#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mriaug/error.hpp"

namespace mriaug {

/// Voxel counts along x, y, z.
using Shape = std::array<std::size_t, 3>;

enum class Axis { X = 0, Y = 1, Z = 2 };

inline std::string_view to_string(Axis a) {
    switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
    }
    return "?";
}

inline Axis axis_from_string(std::string_view s) {
    if (s == "x") return Axis::X;
    if (s == "y") return Axis::Y;
    if (s == "z") return Axis::Z;
    fail(ErrorCode::BadConfig, "unknown axis '" + std::string(s) + "'");
}

inline std::size_t voxel_count(const Shape& s) { return s[0] * s[1] * s[2]; }

inline std::string shape_string(const Shape& s) {
    return std::to_string(s[0]) + "x" + std::to_string(s[1]) + "x" + std::to_string(s[2]);
}

/// Dense 3D array stored x-fastest (NIfTI scan order):
/// linear index = x + nx * (y + ny * z).
template <typename T>
class Grid3 {
public:
    using value_type = T;

    Grid3() = default;

    explicit Grid3(const Shape& shape, T fill = T{}) : shape_(shape), data_(voxel_count(shape), fill) {
        check_shape(shape);
    }

    Grid3(const Shape& shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
        check_shape(shape);
        if (data_.size() != voxel_count(shape))
            fail(ErrorCode::BadShape, "data size " + std::to_string(data_.size()) + " does not match shape " +
                                          shape_string(shape));
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t nx() const noexcept { return shape_[0]; }
    std::size_t ny() const noexcept { return shape_[1]; }
    std::size_t nz() const noexcept { return shape_[2]; }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t extent(Axis a) const noexcept { return shape_[static_cast<int>(a)]; }

    std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
        return x + shape_[0] * (y + shape_[1] * z);
    }

    /// Linear stride of one step along `a`.
    std::size_t stride(Axis a) const noexcept {
        switch (a) {
        case Axis::X: return 1;
        case Axis::Y: return shape_[0];
        case Axis::Z: return shape_[0] * shape_[1];
        }
        return 0;
    }

    T& operator()(std::size_t x, std::size_t y, std::size_t z) noexcept { return data_[index(x, y, z)]; }
    const T& operator()(std::size_t x, std::size_t y, std::size_t z) const noexcept { return data_[index(x, y, z)]; }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    const std::vector<T>& vector() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    friend bool operator==(const Grid3&, const Grid3&) = default;

private:
    static void check_shape(const Shape& s) {
        if (s[0] == 0 || s[1] == 0 || s[2] == 0) fail(ErrorCode::BadShape, "zero extent in shape " + shape_string(s));
    }

    Shape shape_{};
    std::vector<T> data_;
};

/// Calls f(x, y, z, linear_index) for every voxel in scan order.
template <typename F>
void for_each_voxel(const Shape& s, F&& f) {
    std::size_t i = 0;
    for (std::size_t z = 0; z < s[2]; ++z)
        for (std::size_t y = 0; y < s[1]; ++y)
            for (std::size_t x = 0; x < s[0]; ++x, ++i) f(x, y, z, i);
}

} // namespace mriaug
