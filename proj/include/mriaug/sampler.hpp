#pragma once

#include <algorithm>
#include <bitset>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mriaug/config.hpp"
#include "mriaug/error.hpp"
#include "mriaug/grid.hpp"
#include "mriaug/intensity.hpp"
#include "mriaug/rng.hpp"
#include "mriaug/spatial.hpp"

namespace mriaug {

using TransformSet = std::bitset<transform_count>;

/// Each transform is included independently with its probability; one
/// uniform is consumed per transform whatever the outcome.
inline TransformSet schedule(const AugmentationConfig& config, SeededRng& rng) {
    TransformSet set;
    for (TransformId t : all_transforms) {
        const double u = rng.uniform01();
        if (u < config.probability(t)) set.set(index_of(t));
    }
    return set;
}

// ---------------------------------------------------------------------------
// Plan steps: concrete, self-contained parameters for one transform.

struct AdditiveNoiseStep {
    double sigma = 0.0;
    std::uint64_t noise_seed = 0;
};

struct MultiplicativeNoiseStep {
    double sigma = 0.0;
    std::uint64_t noise_seed = 0;
};

struct BiasFieldStep {
    BiasFieldParams params;
};

struct RotationStep {
    RotationParams params;
};

struct ElasticStep {
    double kernel_sigma = 1.0;
    double alpha = 0.0;
    std::uint64_t field_seed = 0;
};

struct RingingStep {
    std::int64_t cutoff = 256;
    Axis axis = Axis::X;
};

struct GhostingStep {
    std::int64_t n = 2;
    double factor = 1.0;
    Axis axis = Axis::X;
};

using PlanStep =
    std::variant<AdditiveNoiseStep, MultiplicativeNoiseStep, BiasFieldStep, RotationStep, ElasticStep, RingingStep, GhostingStep>;

inline TransformId transform_of(const PlanStep& s) {
    // variant alternatives are declared in TransformId order
    return static_cast<TransformId>(s.index());
}

struct AugmentationPlan {
    std::uint64_t seed = 0;
    Shape shape{};
    std::vector<PlanStep> steps; // in application order

    bool contains(TransformId t) const {
        return std::any_of(steps.begin(), steps.end(), [t](const PlanStep& s) { return transform_of(s) == t; });
    }
};

/// Draws concrete parameters for every scheduled transform, in pipeline
/// order. Continuous values are uniform on the effective range, integer
/// values uniform on the inclusive integer range, axes uniform on {x, y, z}.
inline AugmentationPlan sample_params(const AugmentationConfig& config, const TransformSet& ids, const Shape& shape,
                                      SeededRng& rng) {
    AugmentationPlan plan;
    plan.seed = rng.seed();
    plan.shape = shape;
    auto draw = [&](ParamId p) {
        const Range r = config.effective_range(p);
        return rng.uniform(r.lo, r.hi);
    };
    auto draw_int = [&](ParamId p) {
        const Range r = config.effective_range(p);
        return rng.uniform_int(static_cast<std::int64_t>(r.lo), static_cast<std::int64_t>(r.hi));
    };
    auto draw_axis = [&] { return static_cast<Axis>(rng.uniform_int(0, 2)); };

    for (TransformId t : config.order) {
        if (!ids.test(index_of(t))) continue;
        switch (t) {
        case TransformId::AdditiveNoise: {
            AdditiveNoiseStep s;
            s.sigma = draw(ParamId::AdditiveSigma);
            s.noise_seed = rng.next_u64();
            plan.steps.emplace_back(s);
            break;
        }
        case TransformId::MultiplicativeNoise: {
            MultiplicativeNoiseStep s;
            s.sigma = draw(ParamId::MultiplicativeSigma);
            s.noise_seed = rng.next_u64();
            plan.steps.emplace_back(s);
            break;
        }
        case TransformId::BiasField: {
            BiasFieldStep s;
            s.params.amplitude = draw(ParamId::BiasAmplitude);
            const double longest = static_cast<double>(*std::max_element(shape.begin(), shape.end()));
            s.params.scale = draw(ParamId::BiasScale) * longest;
            for (int a = 0; a < 3; ++a)
                s.params.center[a] = static_cast<double>(rng.uniform_int(0, static_cast<std::int64_t>(shape[a]) - 1));
            plan.steps.emplace_back(s);
            break;
        }
        case TransformId::Rotation: {
            RotationStep s;
            for (int a = 0; a < 3; ++a) s.params.degrees[a] = draw(ParamId::RotationDegrees);
            plan.steps.emplace_back(s);
            break;
        }
        case TransformId::Elastic: {
            ElasticStep s;
            s.kernel_sigma = draw(ParamId::ElasticKernelSigma);
            s.alpha = draw(ParamId::ElasticAlpha);
            s.field_seed = rng.next_u64();
            plan.steps.emplace_back(s);
            break;
        }
        case TransformId::Ringing: {
            RingingStep s;
            s.cutoff = draw_int(ParamId::RingingCutoff);
            s.axis = draw_axis();
            plan.steps.emplace_back(s);
            break;
        }
        case TransformId::Ghosting: {
            GhostingStep s;
            s.n = draw_int(ParamId::GhostingN);
            s.factor = draw(ParamId::GhostingFactor);
            s.axis = draw_axis();
            plan.steps.emplace_back(s);
            break;
        }
        }
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Plan JSON

inline constexpr int plan_schema_version = 1;

inline nlohmann::json to_json(const PlanStep& step) {
    nlohmann::json j;
    j["transform"] = std::string(to_string(transform_of(step)));
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, AdditiveNoiseStep> || std::is_same_v<S, MultiplicativeNoiseStep>) {
                j["sigma"] = s.sigma;
                j["noise_seed"] = s.noise_seed;
            } else if constexpr (std::is_same_v<S, BiasFieldStep>) {
                j["center"] = s.params.center;
                j["scale"] = s.params.scale;
                j["amplitude"] = s.params.amplitude;
            } else if constexpr (std::is_same_v<S, RotationStep>) {
                j["degrees"] = s.params.degrees;
                j["axis_order"] = "xyz";
            } else if constexpr (std::is_same_v<S, ElasticStep>) {
                j["kernel_sigma"] = s.kernel_sigma;
                j["alpha"] = s.alpha;
                j["field_seed"] = s.field_seed;
            } else if constexpr (std::is_same_v<S, RingingStep>) {
                j["cutoff"] = s.cutoff;
                j["axis"] = std::string(to_string(s.axis));
            } else if constexpr (std::is_same_v<S, GhostingStep>) {
                j["n"] = s.n;
                j["factor"] = s.factor;
                j["axis"] = std::string(to_string(s.axis));
            }
        },
        step);
    return j;
}

inline nlohmann::json to_json(const AugmentationPlan& plan) {
    nlohmann::json j;
    j["schema_version"] = plan_schema_version;
    j["seed"] = plan.seed;
    j["shape"] = plan.shape;
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : plan.steps) steps.push_back(to_json(s));
    j["steps"] = steps;
    return j;
}

/// Canonical text form shared by the CLI and the buffer API.
inline std::string plan_to_string(const AugmentationPlan& plan) { return to_json(plan).dump(2) + "\n"; }

inline PlanStep plan_step_from_json(const nlohmann::json& j) {
    const TransformId t = transform_from_string(j.at("transform").get<std::string>());
    switch (t) {
    case TransformId::AdditiveNoise:
        return AdditiveNoiseStep{j.at("sigma").get<double>(), j.at("noise_seed").get<std::uint64_t>()};
    case TransformId::MultiplicativeNoise:
        return MultiplicativeNoiseStep{j.at("sigma").get<double>(), j.at("noise_seed").get<std::uint64_t>()};
    case TransformId::BiasField: {
        BiasFieldStep s;
        s.params.center = j.at("center").get<Vec3>();
        s.params.scale = j.at("scale").get<double>();
        s.params.amplitude = j.at("amplitude").get<double>();
        return s;
    }
    case TransformId::Rotation: {
        if (j.contains("axis_order") && j.at("axis_order").get<std::string>() != "xyz")
            fail(ErrorCode::BadPlan, "unsupported rotation axis order");
        RotationStep s;
        s.params.degrees = j.at("degrees").get<Vec3>();
        return s;
    }
    case TransformId::Elastic:
        return ElasticStep{j.at("kernel_sigma").get<double>(), j.at("alpha").get<double>(),
                           j.at("field_seed").get<std::uint64_t>()};
    case TransformId::Ringing:
        return RingingStep{j.at("cutoff").get<std::int64_t>(), axis_from_string(j.at("axis").get<std::string>())};
    case TransformId::Ghosting:
        return GhostingStep{j.at("n").get<std::int64_t>(), j.at("factor").get<double>(),
                            axis_from_string(j.at("axis").get<std::string>())};
    }
    fail(ErrorCode::BadPlan, "unreachable transform");
}

inline AugmentationPlan plan_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema_version").get<int>() != plan_schema_version) fail(ErrorCode::BadPlan, "unsupported plan schema");
        AugmentationPlan plan;
        plan.seed = j.at("seed").get<std::uint64_t>();
        plan.shape = j.at("shape").get<Shape>();
        for (const auto& s : j.at("steps")) plan.steps.push_back(plan_step_from_json(s));
        return plan;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::BadPlan, e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::BadPlan) throw;
        fail(ErrorCode::BadPlan, e.what());
    }
}

} // namespace mriaug
