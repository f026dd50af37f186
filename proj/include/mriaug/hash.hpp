#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <utility>

#include "mriaug/grid.hpp"
#include "mriaug/volume.hpp"

namespace mriaug {

/// 64-bit FNV-1a.
class Fnv1a {
public:
    void update(const void* data, std::size_t n) noexcept {
        const auto* p = static_cast<const std::uint8_t*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001B3ull;
        }
    }

    template <typename T>
    void update_le(T v) noexcept {
        std::uint8_t raw[sizeof(T)];
        std::memcpy(raw, &v, sizeof(T));
        if constexpr (std::endian::native == std::endian::big)
            for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
        update(raw, sizeof(T));
    }

    std::uint64_t value() const noexcept { return h_; }

    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
        return buf;
    }

private:
    std::uint64_t h_ = 0xCBF29CE484222325ull;
};

/// Hash of shape and voxel values; affine excluded.
template <typename T>
std::string grid_hash(const Grid3<T>& g) {
    Fnv1a h;
    for (std::size_t s : g.shape()) h.update_le(static_cast<std::uint64_t>(s));
    for (const T& v : g) h.update_le(v);
    return h.hex();
}

inline std::string volume_hash(const Volume& v) { return grid_hash(v.data()); }
inline std::string volume_hash(const LabelVolume& v) { return grid_hash(v.data()); }

} // namespace mriaug
