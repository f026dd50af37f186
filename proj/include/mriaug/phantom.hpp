#pragma once

// Analytic phantoms rasterized by voxel-center-in-shape tests (no anti-aliasing).

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mriaug/affine.hpp"
#include "mriaug/error.hpp"
#include "mriaug/grid.hpp"
#include "mriaug/volume.hpp"

namespace mriaug {

enum class StructureShape { Sphere, Ellipsoid, Box };

inline std::string_view to_string(StructureShape s) {
    switch (s) {
    case StructureShape::Sphere: return "sphere";
    case StructureShape::Ellipsoid: return "ellipsoid";
    case StructureShape::Box: return "box";
    }
    return "?";
}

struct Structure {
    StructureShape shape = StructureShape::Sphere;
    Vec3 center{};
    Vec3 radii{1.0, 1.0, 1.0}; // box: half-widths
    double intensity = 1.0;
    Label label = 1;

    bool contains(const Vec3& p) const {
        const Vec3 d{(p[0] - center[0]) / radii[0], (p[1] - center[1]) / radii[1], (p[2] - center[2]) / radii[2]};
        if (shape == StructureShape::Box) return std::abs(d[0]) <= 1.0 && std::abs(d[1]) <= 1.0 && std::abs(d[2]) <= 1.0;
        return d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= 1.0;
    }
};

/// Linear ramp added to the background: amplitude * t, t in [0, 1] along `direction`.
struct Gradient {
    Vec3 direction{1.0, 0.0, 0.0};
    double amplitude = 0.0;
};

struct PhantomSpec {
    Shape shape{64, 64, 64};
    Vec3 spacing{1.0, 1.0, 1.0};
    double background = 0.0;
    std::optional<Gradient> gradient;
    std::vector<Structure> structures; // later entries win where they overlap

    /// Every structure's bounding box lies inside the grid's cell extent
    /// [-0.5, n - 0.5] per axis; labels are positive and unique.
    void validate() const {
        for (std::size_t a = 0; a < 3; ++a)
            if (shape[a] == 0) fail(ErrorCode::BadShape, "phantom shape " + shape_string(shape));
        for (std::size_t a = 0; a < 3; ++a)
            if (!(spacing[a] > 0.0)) fail(ErrorCode::BadConfig, "phantom spacing must be positive");
        std::set<Label> labels;
        for (std::size_t i = 0; i < structures.size(); ++i) {
            const Structure& s = structures[i];
            const std::string where = "structure " + std::to_string(i);
            for (std::size_t a = 0; a < 3; ++a) {
                if (!(s.radii[a] > 0.0)) fail(ErrorCode::SpecOutOfBounds, where + " has a non-positive radius");
                const double lo = s.center[a] - s.radii[a];
                const double hi = s.center[a] + s.radii[a];
                if (lo < -0.5 || hi > static_cast<double>(shape[a]) - 0.5)
                    fail(ErrorCode::SpecOutOfBounds, where + " extends outside the grid along " +
                                                         std::string(to_string(static_cast<Axis>(a))));
            }
            if (s.label < 1) fail(ErrorCode::BadLabel, where + " label must be >= 1");
            if (!labels.insert(s.label).second)
                fail(ErrorCode::BadLabel, where + " reuses label " + std::to_string(s.label));
        }
    }
};

struct Phantom {
    Volume image;
    LabelVolume labels;
};

inline Phantom rasterize(const PhantomSpec& spec) {
    spec.validate();
    Grid3<float> image(spec.shape);
    Grid3<Label> labels(spec.shape);
    Vec3 dir{};
    double span = 0.0;
    if (spec.gradient) {
        const Vec3& d = spec.gradient->direction;
        const double norm = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        if (!(norm > 0.0)) fail(ErrorCode::BadConfig, "gradient direction must be non-zero");
        for (int a = 0; a < 3; ++a) {
            dir[a] = d[a] / norm;
            span += std::abs(dir[a]) * static_cast<double>(spec.shape[a] - 1);
        }
    }
    for_each_voxel(spec.shape, [&](std::size_t x, std::size_t y, std::size_t z, std::size_t i) {
        const Vec3 p{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
        double v = spec.background;
        if (spec.gradient && span > 0.0) {
            double t = 0.0;
            for (int a = 0; a < 3; ++a) t += dir[a] * (dir[a] >= 0 ? p[a] : p[a] - static_cast<double>(spec.shape[a] - 1));
            v += spec.gradient->amplitude * t / span;
        }
        Label l = 0;
        for (const Structure& s : spec.structures)
            if (s.contains(p)) {
                v = s.intensity;
                l = s.label;
            }
        image[i] = static_cast<float>(v);
        labels[i] = l;
    });
    return {Volume(std::move(image), diagonal_affine(spec.spacing)), LabelVolume(std::move(labels))};
}

/// Head-like phantom: scalp shell, brain, white matter, two ventricles, a lesion.
inline PhantomSpec brain_phantom_spec(const Shape& shape = {64, 64, 64}) {
    PhantomSpec spec;
    spec.shape = shape;
    spec.background = 0.0;
    const Vec3 c{(static_cast<double>(shape[0]) - 1.0) / 2.0, (static_cast<double>(shape[1]) - 1.0) / 2.0,
                 (static_cast<double>(shape[2]) - 1.0) / 2.0};
    const Vec3 h{static_cast<double>(shape[0]) / 2.0, static_cast<double>(shape[1]) / 2.0,
                 static_cast<double>(shape[2]) / 2.0};
    auto scaled = [&](double fx, double fy, double fz) { return Vec3{h[0] * fx, h[1] * fy, h[2] * fz}; };
    auto at = [&](double fx, double fy, double fz) { return Vec3{c[0] + h[0] * fx, c[1] + h[1] * fy, c[2] + h[2] * fz}; };
    spec.structures = {
        {StructureShape::Ellipsoid, c, scaled(0.72, 0.86, 0.76), 0.35, 1},
        {StructureShape::Ellipsoid, c, scaled(0.62, 0.76, 0.66), 0.6, 2},
        {StructureShape::Ellipsoid, at(0.0, 0.02, 0.04), scaled(0.42, 0.55, 0.42), 0.85, 3},
        {StructureShape::Ellipsoid, at(-0.14, 0.08, 0.06), scaled(0.08, 0.24, 0.12), 0.15, 4},
        {StructureShape::Ellipsoid, at(0.14, 0.08, 0.06), scaled(0.08, 0.24, 0.12), 0.15, 5},
        {StructureShape::Sphere, at(0.3, -0.35, 0.2), scaled(0.1, 0.1, 0.1), 1.0, 6},
    };
    // keep the lesion a true sphere on anisotropic grids
    auto& lesion = spec.structures.back();
    const double r = std::max(1.0, std::min({lesion.radii[0], lesion.radii[1], lesion.radii[2]}));
    lesion.radii = {r, r, r};
    return spec;
}

// ---------------------------------------------------------------------------
// JSON
//
// {
//   "shape": [64, 64, 64],
//   "spacing": [1, 1, 1],
//   "background": 0.0,
//   "gradient": {"direction": [1, 0, 0], "amplitude": 0.1},
//   "structures": [
//     {"shape": "sphere", "center": [31.5, 31.5, 31.5], "radii": 10, "intensity": 0.8, "label": 1}
//   ]
// }

inline StructureShape structure_shape_from_string(const std::string& s) {
    if (s == "sphere") return StructureShape::Sphere;
    if (s == "ellipsoid") return StructureShape::Ellipsoid;
    if (s == "box") return StructureShape::Box;
    fail(ErrorCode::BadConfig, "unknown structure shape '" + s + "'");
}

inline nlohmann::json to_json(const PhantomSpec& spec) {
    nlohmann::json j;
    j["shape"] = spec.shape;
    j["spacing"] = spec.spacing;
    j["background"] = spec.background;
    if (spec.gradient) j["gradient"] = {{"direction", spec.gradient->direction}, {"amplitude", spec.gradient->amplitude}};
    nlohmann::json list = nlohmann::json::array();
    for (const Structure& s : spec.structures)
        list.push_back({{"shape", std::string(to_string(s.shape))},
                        {"center", s.center},
                        {"radii", s.radii},
                        {"intensity", s.intensity},
                        {"label", s.label}});
    j["structures"] = list;
    return j;
}

inline PhantomSpec phantom_spec_from_json(const nlohmann::json& j) {
    try {
        PhantomSpec spec;
        spec.shape = j.at("shape").get<Shape>();
        if (j.contains("spacing")) spec.spacing = j.at("spacing").get<Vec3>();
        spec.background = j.value("background", 0.0);
        if (j.contains("gradient")) {
            Gradient g;
            g.direction = j.at("gradient").at("direction").get<Vec3>();
            g.amplitude = j.at("gradient").at("amplitude").get<double>();
            spec.gradient = g;
        }
        for (const auto& e : j.value("structures", nlohmann::json::array())) {
            Structure s;
            s.shape = structure_shape_from_string(e.at("shape").get<std::string>());
            s.center = e.at("center").get<Vec3>();
            const auto& r = e.at("radii");
            if (r.is_number()) {
                const double v = r.get<double>();
                s.radii = {v, v, v};
            } else {
                s.radii = r.get<Vec3>();
            }
            if (s.shape == StructureShape::Sphere && !(s.radii[0] == s.radii[1] && s.radii[1] == s.radii[2]))
                fail(ErrorCode::BadConfig, "sphere radii must be equal");
            s.intensity = e.at("intensity").get<double>();
            s.label = e.at("label").get<Label>();
            spec.structures.push_back(s);
        }
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::BadConfig, std::string("phantom spec: ") + e.what());
    }
}

} // namespace mriaug
