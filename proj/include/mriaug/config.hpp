#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mriaug/error.hpp"

namespace mriaug {

inline constexpr int config_schema_version = 1;

enum class TransformId {
    AdditiveNoise = 0,
    MultiplicativeNoise,
    BiasField,
    Rotation,
    Elastic,
    Ringing,
    Ghosting,
};

inline constexpr std::size_t transform_count = 7;

/// Fixed enumeration order; scheduling draws one uniform per transform in this order.
inline constexpr std::array<TransformId, transform_count> all_transforms{
    TransformId::AdditiveNoise, TransformId::MultiplicativeNoise, TransformId::BiasField, TransformId::Rotation,
    TransformId::Elastic,       TransformId::Ringing,             TransformId::Ghosting,
};

/// Pose/anatomy first, then field and readout artifacts, then measurement noise.
inline constexpr std::array<TransformId, transform_count> default_order{
    TransformId::Rotation, TransformId::Elastic,       TransformId::BiasField,           TransformId::Ringing,
    TransformId::Ghosting, TransformId::AdditiveNoise, TransformId::MultiplicativeNoise,
};

inline constexpr std::size_t index_of(TransformId t) { return static_cast<std::size_t>(t); }

inline std::string_view to_string(TransformId t) {
    switch (t) {
    case TransformId::AdditiveNoise: return "additive_noise";
    case TransformId::MultiplicativeNoise: return "multiplicative_noise";
    case TransformId::BiasField: return "bias_field";
    case TransformId::Rotation: return "rotation";
    case TransformId::Elastic: return "elastic";
    case TransformId::Ringing: return "ringing";
    case TransformId::Ghosting: return "ghosting";
    }
    return "unknown";
}

inline TransformId transform_from_string(std::string_view s) {
    for (TransformId t : all_transforms)
        if (to_string(t) == s) return t;
    fail(ErrorCode::BadTransformId, "unknown transform '" + std::string(s) + "'");
}

/// Closed interval [lo, hi].
struct Range {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
    friend bool operator==(const Range&, const Range&) = default;
};

/// Every sampled scalar that has a configurable range.
enum class ParamId {
    AdditiveSigma,
    MultiplicativeSigma,
    BiasAmplitude,
    BiasScale,
    RotationDegrees,
    ElasticKernelSigma,
    ElasticAlpha,
    RingingCutoff,
    GhostingN,
    GhostingFactor,
};

inline constexpr std::array<ParamId, 10> all_params{
    ParamId::AdditiveSigma,      ParamId::MultiplicativeSigma, ParamId::BiasAmplitude, ParamId::BiasScale,
    ParamId::RotationDegrees,    ParamId::ElasticKernelSigma,  ParamId::ElasticAlpha,  ParamId::RingingCutoff,
    ParamId::GhostingN,          ParamId::GhostingFactor,
};

inline std::string_view to_string(ParamId p) {
    switch (p) {
    case ParamId::AdditiveSigma: return "additive_sigma";
    case ParamId::MultiplicativeSigma: return "multiplicative_sigma";
    case ParamId::BiasAmplitude: return "bias_amplitude";
    case ParamId::BiasScale: return "bias_scale";
    case ParamId::RotationDegrees: return "rotation";
    case ParamId::ElasticKernelSigma: return "elastic_sigma";
    case ParamId::ElasticAlpha: return "elastic_alpha";
    case ParamId::RingingCutoff: return "ringing_cutoff";
    case ParamId::GhostingN: return "ghosting_n";
    case ParamId::GhostingFactor: return "ghosting_factor";
    }
    return "unknown";
}

inline ParamId param_from_string(std::string_view s) {
    for (ParamId p : all_params)
        if (to_string(p) == s) return p;
    fail(ErrorCode::BadTransformId, "unknown parameter '" + std::string(s) + "'");
}

inline bool is_integer_param(ParamId p) { return p == ParamId::RingingCutoff || p == ParamId::GhostingN; }

inline TransformId owner_of(ParamId p) {
    switch (p) {
    case ParamId::AdditiveSigma: return TransformId::AdditiveNoise;
    case ParamId::MultiplicativeSigma: return TransformId::MultiplicativeNoise;
    case ParamId::BiasAmplitude:
    case ParamId::BiasScale: return TransformId::BiasField;
    case ParamId::RotationDegrees: return TransformId::Rotation;
    case ParamId::ElasticKernelSigma:
    case ParamId::ElasticAlpha: return TransformId::Elastic;
    case ParamId::RingingCutoff: return TransformId::Ringing;
    case ParamId::GhostingN:
    case ParamId::GhostingFactor: return TransformId::Ghosting;
    }
    return TransformId::AdditiveNoise;
}

/// Default ranges. Bias-field amplitude and scale are not given numerically
/// by the source method; scale is a fraction of the longest axis.
inline Range default_range(ParamId p) {
    switch (p) {
    case ParamId::AdditiveSigma: return {0.0, 0.0001};
    case ParamId::MultiplicativeSigma: return {0.0, 0.001};
    case ParamId::BiasAmplitude: return {0.0, 0.5};
    case ParamId::BiasScale: return {0.3, 0.6};
    case ParamId::RotationDegrees: return {-30.0, 30.0};
    case ParamId::ElasticKernelSigma: return {20.0, 30.0};
    case ParamId::ElasticAlpha: return {200.0, 600.0};
    case ParamId::RingingCutoff: return {96.0, 128.0};
    case ParamId::GhostingN: return {2.0, 10.0};
    case ParamId::GhostingFactor: return {0.85, 0.95};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Magnitude ladder

inline constexpr std::array<double, 5> magnitude_factors{0.25, 0.5, 1.0, 1.5, 2.0};
inline constexpr double ringing_reference_length = 256.0;

inline double magnitude_factor(int level) {
    if (level < 1 || level > 5) fail(ErrorCode::BadLevel, "magnitude level " + std::to_string(level) + " not in 1..5");
    return magnitude_factors[static_cast<std::size_t>(level - 1)];
}

/// Scales a base range to magnitude `level` (3 is the identity):
///  - strength parameters (noise sigmas, bias amplitude, rotation, alpha): both bounds times f
///  - ringing cutoff: severity grows as the kept band shrinks, so bounds divided by f,
///    rounded, and capped at the reference axis length
///  - ghosting factor: distance from 1 times f, clamped to (0, 1]
///  - shape parameters (bias scale, kernel sigma, ghost count): unchanged
inline Range scale_range(ParamId p, const Range& base, int level) {
    const double f = magnitude_factor(level);
    if (level == 3) return base;
    switch (p) {
    case ParamId::AdditiveSigma:
    case ParamId::MultiplicativeSigma:
    case ParamId::BiasAmplitude:
    case ParamId::RotationDegrees:
    case ParamId::ElasticAlpha: return {base.lo * f, base.hi * f};
    case ParamId::RingingCutoff: {
        auto scale = [&](double v) { return std::clamp(std::round(v / f), 1.0, ringing_reference_length); };
        return {scale(base.lo), scale(base.hi)};
    }
    case ParamId::GhostingFactor: {
        auto scale = [&](double v) { return std::clamp(1.0 - f * (1.0 - v), 1e-6, 1.0); };
        return {scale(base.lo), scale(base.hi)};
    }
    case ParamId::BiasScale:
    case ParamId::ElasticKernelSigma:
    case ParamId::GhostingN: return base;
    }
    return base;
}

/// Range of `p` at magnitude `level`, starting from the defaults.
inline Range magnitude_preset(ParamId p, int level) { return scale_range(p, default_range(p), level); }

// ---------------------------------------------------------------------------
// Config

struct AugmentationConfig {
    double p_aug = 1.0 / 3.0;
    std::array<std::optional<double>, transform_count> p_override{};
    int magnitude_level = 3;
    std::array<TransformId, transform_count> order = default_order;
    std::array<Range, all_params.size()> ranges = [] {
        std::array<Range, all_params.size()> r{};
        for (ParamId p : all_params) r[static_cast<std::size_t>(p)] = default_range(p);
        return r;
    }();

    double probability(TransformId t) const { return p_override[index_of(t)].value_or(p_aug); }

    const Range& range(ParamId p) const { return ranges[static_cast<std::size_t>(p)]; }
    Range& range(ParamId p) { return ranges[static_cast<std::size_t>(p)]; }

    /// Configured range scaled to magnitude_level; what the sampler draws from.
    Range effective_range(ParamId p) const { return scale_range(p, range(p), magnitude_level); }

    /// Every transform forced on (p = 1) or off (p = 0).
    static AugmentationConfig only(TransformId t);
    static AugmentationConfig only(TransformId t, AugmentationConfig base) {
        for (TransformId u : all_transforms) base.p_override[index_of(u)] = u == t ? 1.0 : 0.0;
        return base;
    }

    void validate() const {
        auto bad = [](const std::string& m) { fail(ErrorCode::BadConfig, m); };
        auto check_p = [&](double p, const std::string& what) {
            if (!(p >= 0.0 && p <= 1.0)) bad(what + " must be a probability in [0, 1]");
        };
        check_p(p_aug, "p_aug");
        for (TransformId t : all_transforms)
            if (p_override[index_of(t)]) check_p(*p_override[index_of(t)], "p." + std::string(to_string(t)));
        if (magnitude_level < 1 || magnitude_level > 5)
            fail(ErrorCode::BadLevel, "magnitude_level " + std::to_string(magnitude_level) + " not in 1..5");
        std::set<TransformId> seen(order.begin(), order.end());
        if (seen.size() != transform_count) bad("order must list each of the 7 transforms exactly once");
        for (ParamId p : all_params) {
            const Range& r = range(p);
            const std::string name(to_string(p));
            if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) bad(name + " range must satisfy lo <= hi");
            if (is_integer_param(p)) {
                if (std::floor(r.lo) != r.lo || std::floor(r.hi) != r.hi) bad(name + " bounds must be integers");
            }
            switch (p) {
            case ParamId::AdditiveSigma:
            case ParamId::MultiplicativeSigma:
            case ParamId::BiasAmplitude:
            case ParamId::ElasticAlpha:
                if (r.lo < 0.0) bad(name + " must be >= 0");
                break;
            case ParamId::BiasScale:
            case ParamId::ElasticKernelSigma:
                if (!(r.lo > 0.0)) bad(name + " must be > 0");
                break;
            case ParamId::RingingCutoff:
                if (r.lo < 1.0) bad(name + " must be >= 1");
                break;
            case ParamId::GhostingN:
                if (r.lo < 2.0) bad(name + " must be >= 2");
                break;
            case ParamId::GhostingFactor:
                if (!(r.lo > 0.0) || r.hi > 1.0) bad(name + " must lie in (0, 1]");
                break;
            case ParamId::RotationDegrees: break;
            }
        }
    }
};

inline AugmentationConfig AugmentationConfig::only(TransformId t) { return only(t, AugmentationConfig{}); }

// ---------------------------------------------------------------------------
// JSON
//
// {
//   "schema_version": 1,
//   "p_aug": 0.333,
//   "p": {"rotation": 0.5},              // optional per-transform overrides
//   "magnitude_level": 3,
//   "order": ["rotation", ...],
//   "additive_noise": {"mu": 0, "sigma": [0, 0.0001]},
//   "multiplicative_noise": {"mu": 0, "sigma": [0, 0.001]},
//   "bias_field": {"amplitude": [0, 0.5], "scale": [0.3, 0.6]},
//   "rotation": {"degrees": [-30, 30]},
//   "elastic": {"kernel_sigma": [20, 30], "alpha": [200, 600]},
//   "ringing": {"cutoff": [96, 128]},
//   "ghosting": {"n": [2, 10], "factor": [0.85, 0.95]}
// }

namespace detail {

struct ParamKey {
    ParamId param;
    const char* section;
    const char* key;
};

inline constexpr std::array<ParamKey, 10> param_keys{{
    {ParamId::AdditiveSigma, "additive_noise", "sigma"},
    {ParamId::MultiplicativeSigma, "multiplicative_noise", "sigma"},
    {ParamId::BiasAmplitude, "bias_field", "amplitude"},
    {ParamId::BiasScale, "bias_field", "scale"},
    {ParamId::RotationDegrees, "rotation", "degrees"},
    {ParamId::ElasticKernelSigma, "elastic", "kernel_sigma"},
    {ParamId::ElasticAlpha, "elastic", "alpha"},
    {ParamId::RingingCutoff, "ringing", "cutoff"},
    {ParamId::GhostingN, "ghosting", "n"},
    {ParamId::GhostingFactor, "ghosting", "factor"},
}};

inline nlohmann::json range_json(ParamId p, const Range& r) {
    if (is_integer_param(p)) return {static_cast<std::int64_t>(r.lo), static_cast<std::int64_t>(r.hi)};
    return {r.lo, r.hi};
}

} // namespace detail

inline nlohmann::json to_json(const AugmentationConfig& c) {
    nlohmann::json j;
    j["schema_version"] = config_schema_version;
    j["p_aug"] = c.p_aug;
    nlohmann::json p = nlohmann::json::object();
    for (TransformId t : all_transforms)
        if (c.p_override[index_of(t)]) p[std::string(to_string(t))] = *c.p_override[index_of(t)];
    j["p"] = p;
    j["magnitude_level"] = c.magnitude_level;
    nlohmann::json order = nlohmann::json::array();
    for (TransformId t : c.order) order.push_back(std::string(to_string(t)));
    j["order"] = order;
    j["additive_noise"]["mu"] = 0.0;
    j["multiplicative_noise"]["mu"] = 0.0;
    for (const auto& k : detail::param_keys) j[k.section][k.key] = detail::range_json(k.param, c.range(k.param));
    return j;
}

inline AugmentationConfig config_from_json(const nlohmann::json& j) {
    auto bad = [](const std::string& m) { fail(ErrorCode::BadConfig, m); };
    if (!j.is_object()) bad("config must be a JSON object");
    static const std::set<std::string> top_keys{
        "schema_version", "p_aug",    "p",       "magnitude_level", "order",   "additive_noise",
        "multiplicative_noise", "bias_field", "rotation", "elastic", "ringing", "ghosting",
    };
    for (const auto& [key, value] : j.items())
        if (!top_keys.count(key)) bad("unknown config key '" + key + "'");

    AugmentationConfig c;
    try {
        if (j.contains("schema_version") && j.at("schema_version").get<int>() != config_schema_version)
            bad("unsupported schema_version " + j.at("schema_version").dump());
        if (j.contains("p_aug")) c.p_aug = j.at("p_aug").get<double>();
        if (j.contains("p")) {
            if (!j.at("p").is_object()) bad("'p' must be an object");
            for (const auto& [key, value] : j.at("p").items()) {
                TransformId t{};
                try {
                    t = transform_from_string(key);
                } catch (const Error&) {
                    bad("unknown transform in 'p': " + key);
                }
                c.p_override[index_of(t)] = value.get<double>();
            }
        }
        if (j.contains("magnitude_level")) c.magnitude_level = j.at("magnitude_level").get<int>();
        if (j.contains("order")) {
            const auto& o = j.at("order");
            if (!o.is_array() || o.size() != transform_count) bad("'order' must list all 7 transforms");
            for (std::size_t i = 0; i < transform_count; ++i) {
                try {
                    c.order[i] = transform_from_string(o[i].get<std::string>());
                } catch (const Error&) {
                    bad("unknown transform in 'order': " + o[i].dump());
                }
            }
        }
        for (const char* section : {"additive_noise", "multiplicative_noise"})
            if (j.contains(section) && j.at(section).contains("mu") && j.at(section).at("mu").get<double>() != 0.0)
                bad(std::string(section) + ".mu must be 0");
        std::set<std::string> known_section_keys;
        for (const auto& k : detail::param_keys) {
            known_section_keys.insert(std::string(k.section) + "." + k.key);
            if (!j.contains(k.section)) continue;
            const auto& sec = j.at(k.section);
            if (!sec.is_object()) bad(std::string(k.section) + " must be an object");
            if (!sec.contains(k.key)) continue;
            const auto& r = sec.at(k.key);
            if (!r.is_array() || r.size() != 2) bad(std::string(k.section) + "." + k.key + " must be [lo, hi]");
            c.range(k.param) = {r[0].get<double>(), r[1].get<double>()};
        }
        for (const char* section : {"additive_noise", "multiplicative_noise", "bias_field", "rotation", "elastic",
                                    "ringing", "ghosting"}) {
            if (!j.contains(section)) continue;
            for (const auto& [key, value] : j.at(section).items())
                if (key != "mu" && !known_section_keys.count(std::string(section) + "." + key))
                    bad("unknown key '" + key + "' in " + section);
        }
    } catch (const nlohmann::json::exception& e) {
        bad(e.what());
    }
    c.validate();
    return c;
}

inline AugmentationConfig config_from_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::BadConfig, e.what());
    }
    return config_from_json(j);
}

} // namespace mriaug
