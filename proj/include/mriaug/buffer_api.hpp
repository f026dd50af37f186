#pragma once

// Buffer-in/buffer-out entry point for language bindings. Never throws;
// failures come back as a status code plus message.

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mriaug/config.hpp"
#include "mriaug/error.hpp"
#include "mriaug/grid.hpp"
#include "mriaug/pipeline.hpp"
#include "mriaug/sampler.hpp"
#include "mriaug/version.hpp"
#include "mriaug/volume.hpp"

namespace mriaug::buffer {

enum class Status { Ok, BadConfig, BadBuffer, ShapeMismatch, Internal };

inline std::string_view to_string(Status s) {
    switch (s) {
    case Status::Ok: return "OK";
    case Status::BadConfig: return "BAD_CONFIG";
    case Status::BadBuffer: return "BAD_BUFFER";
    case Status::ShapeMismatch: return "SHAPE_MISMATCH";
    case Status::Internal: return "INTERNAL";
    }
    return "INTERNAL";
}

enum class ElementType { F32, U8, I16 };

/// Dense row-major buffer: element (x, y, z) lives at x*s0 + y*s1 + z*s2
/// with strides (ny*nz, nz, 1), in elements.
struct BufferDescriptor {
    const void* data = nullptr;
    ElementType type = ElementType::F32;
    Shape shape{};
    std::array<std::int64_t, 3> strides{};

    static BufferDescriptor dense(const void* data, ElementType type, const Shape& shape) {
        return {data, type, shape,
                {static_cast<std::int64_t>(shape[1] * shape[2]), static_cast<std::int64_t>(shape[2]), 1}};
    }
};

struct Result {
    Status status = Status::Ok;
    std::string message;
    std::vector<float> image;           // row-major, input shape
    std::vector<std::int32_t> labels;   // row-major; empty when no labels were given
    std::string plan_json;
};

struct VersionInfo {
    std::string version;
    int schema_version = 0;
};

inline VersionInfo version() { return {std::string(version_string), schema_version()}; }

namespace detail {

inline Status status_of(ErrorCode c) {
    switch (c) {
    case ErrorCode::BadConfig:
    case ErrorCode::BadLevel:
    case ErrorCode::BadTransformId:
    case ErrorCode::BadPlan: return Status::BadConfig;
    case ErrorCode::ShapeMismatch:
    case ErrorCode::PlanShapeMismatch: return Status::ShapeMismatch;
    case ErrorCode::BadShape:
    case ErrorCode::ConstantVolume:
    case ErrorCode::NonFiniteData:
    case ErrorCode::BadLabel: return Status::BadBuffer;
    default: return Status::Internal;
    }
}

inline void check_descriptor(const BufferDescriptor& d, const char* what) {
    if (!d.data) fail(ErrorCode::BadShape, std::string(what) + " buffer is null");
    for (std::size_t s : d.shape)
        if (s == 0) fail(ErrorCode::BadShape, std::string(what) + " buffer has a zero extent");
    const auto expected = BufferDescriptor::dense(d.data, d.type, d.shape).strides;
    if (d.strides != expected) fail(ErrorCode::BadShape, std::string(what) + " buffer must be dense row-major");
}

template <typename T, typename Out>
Grid3<Out> gather(const BufferDescriptor& d) {
    const auto* src = static_cast<const T*>(d.data);
    Grid3<Out> g(d.shape);
    for_each_voxel(d.shape, [&](std::size_t x, std::size_t y, std::size_t z, std::size_t i) {
        g[i] = static_cast<Out>(src[x * d.strides[0] + y * d.strides[1] + z * d.strides[2]]);
    });
    return g;
}

template <typename T, typename Out>
std::vector<Out> scatter(const Grid3<T>& g) {
    const Shape& s = g.shape();
    std::vector<Out> out(g.size());
    for_each_voxel(s, [&](std::size_t x, std::size_t y, std::size_t z, std::size_t i) {
        out[(x * s[1] + y) * s[2] + z] = static_cast<Out>(g[i]);
    });
    return out;
}

} // namespace detail

/// Normalizes the image, then runs the pipeline exactly as apply() does.
/// Image buffers must be F32, label buffers U8 or I16.
inline Result apply_pipeline(const BufferDescriptor& image, const std::optional<BufferDescriptor>& labels,
                             std::string_view config_json, std::uint64_t seed) {
    Result r;
    try {
        AugmentationConfig config;
        try {
            config = config_from_string(std::string(config_json));
        } catch (const Error& e) {
            r.status = Status::BadConfig;
            r.message = e.what();
            return r;
        }
        detail::check_descriptor(image, "image");
        if (image.type != ElementType::F32) fail(ErrorCode::BadShape, "image buffer must be f32");
        Sample s{normalize_intensity(Volume(detail::gather<float, float>(image))), std::nullopt, "buffer"};
        if (labels) {
            detail::check_descriptor(*labels, "labels");
            if (labels->shape != image.shape)
                fail(ErrorCode::ShapeMismatch, "labels " + shape_string(labels->shape) + " vs image " +
                                                   shape_string(image.shape));
            if (labels->type == ElementType::U8)
                s.labels = LabelVolume(detail::gather<std::uint8_t, Label>(*labels));
            else if (labels->type == ElementType::I16)
                s.labels = LabelVolume(detail::gather<std::int16_t, Label>(*labels));
            else
                fail(ErrorCode::BadShape, "label buffer must be u8 or i16");
        }
        const Augmented a = Pipeline(config).apply(s, seed);
        r.image = detail::scatter<float, float>(a.sample.image.data());
        if (a.sample.labels) r.labels = detail::scatter<Label, std::int32_t>(a.sample.labels->data());
        r.plan_json = plan_to_string(a.plan);
    } catch (const Error& e) {
        r = Result{};
        r.status = detail::status_of(e.code());
        r.message = e.what();
    } catch (const std::exception& e) {
        r = Result{};
        r.status = Status::Internal;
        r.message = e.what();
    } catch (...) {
        r = Result{};
        r.status = Status::Internal;
        r.message = "unknown failure";
    }
    return r;
}

} // namespace mriaug::buffer
