#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "mriaug/config.hpp"
#include "mriaug/error.hpp"
#include "mriaug/intensity.hpp"
#include "mriaug/kspace.hpp"
#include "mriaug/rng.hpp"
#include "mriaug/sampler.hpp"
#include "mriaug/spatial.hpp"
#include "mriaug/volume.hpp"

namespace mriaug {

struct Sample {
    Volume image;
    std::optional<LabelVolume> labels;
    std::string id;
};

struct Augmented {
    Sample sample;
    AugmentationPlan plan;
};

/// Applies one plan step. Spatial steps move labels along; intensity and
/// k-space steps leave them untouched.
inline Sample apply_step(const PlanStep& step, Sample s) {
    std::visit(
        [&](const auto& p) {
            using S = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<S, AdditiveNoiseStep>) {
                s.image = additive_gaussian_noise(s.image, p.sigma, p.noise_seed);
            } else if constexpr (std::is_same_v<S, MultiplicativeNoiseStep>) {
                s.image = multiplicative_noise(s.image, p.sigma, p.noise_seed);
            } else if constexpr (std::is_same_v<S, BiasFieldStep>) {
                s.image = bias_field(s.image, p.params);
            } else if constexpr (std::is_same_v<S, RotationStep>) {
                auto r = rotate(s.image, s.labels, p.params);
                s.image = std::move(r.image);
                s.labels = std::move(r.labels);
            } else if constexpr (std::is_same_v<S, ElasticStep>) {
                const auto field = generate_displacement_field(s.image.shape(), p.kernel_sigma, p.alpha, p.field_seed);
                auto r = elastic_deform(s.image, s.labels, field);
                s.image = std::move(r.image);
                s.labels = std::move(r.labels);
            } else if constexpr (std::is_same_v<S, RingingStep>) {
                s.image = gibbs_ringing(s.image, p.cutoff, p.axis);
            } else if constexpr (std::is_same_v<S, GhostingStep>) {
                s.image = motion_ghosting(s.image, p.n, p.factor, p.axis);
            }
        },
        step);
    return s;
}

/// Re-executes a recorded plan; no random draws happen here, so the result is
/// bit-identical to the apply() call that produced the plan.
inline Sample replay(const AugmentationPlan& plan, Sample s) {
    if (plan.shape != s.image.shape())
        fail(ErrorCode::PlanShapeMismatch,
             "plan recorded for " + shape_string(plan.shape) + ", sample is " + shape_string(s.image.shape()));
    if (s.labels && s.labels->shape() != s.image.shape())
        fail(ErrorCode::ShapeMismatch, "labels " + shape_string(s.labels->shape()) + " vs image " +
                                           shape_string(s.image.shape()));
    for (const auto& step : plan.steps) s = apply_step(step, std::move(s));
    return s;
}

class Pipeline {
public:
    explicit Pipeline(AugmentationConfig config = {}) : config_(std::move(config)) { config_.validate(); }

    const AugmentationConfig& config() const noexcept { return config_; }

    /// schedule -> sample_params -> replay, all driven by one seeded stream.
    Augmented apply(const Sample& s, std::uint64_t seed) const {
        if (!orientation_of(s.image.affine()).is_ras())
            fail(ErrorCode::NotRasOriented, "sample '" + s.id + "' is " + orientation_of(s.image.affine()).str());
        if (!is_normalized(s.image)) fail(ErrorCode::NotNormalized, "sample '" + s.id + "' has values outside [0, 1]");
        if (s.labels && s.labels->shape() != s.image.shape())
            fail(ErrorCode::ShapeMismatch, "labels " + shape_string(s.labels->shape()) + " vs image " +
                                               shape_string(s.image.shape()));
        SeededRng rng(seed);
        const TransformSet ids = schedule(config_, rng);
        AugmentationPlan plan = sample_params(config_, ids, s.image.shape(), rng);
        Sample out = replay(plan, s);
        return {std::move(out), std::move(plan)};
    }

private:
    AugmentationConfig config_;
};

struct BatchItem {
    std::optional<Augmented> result;
    std::optional<ErrorCode> error;
    std::string message;

    bool ok() const noexcept { return result.has_value(); }
};

/// Sample i is augmented with stream_seed(base_seed, i). Failures are
/// recorded per item; the rest of the batch still runs. Output does not
/// depend on `workers`.
inline std::vector<BatchItem> apply_batch(const Pipeline& p, const std::vector<Sample>& samples, std::uint64_t base_seed,
                                          std::size_t workers = 1) {
    std::vector<BatchItem> out(samples.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < samples.size(); i = next++) {
            try {
                out[i].result = p.apply(samples[i], stream_seed(base_seed, i));
            } catch (const Error& e) {
                out[i].error = e.code();
                out[i].message = e.what();
            } catch (const std::exception& e) {
                out[i].error = ErrorCode::Internal;
                out[i].message = e.what();
            }
        }
    };
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, samples.size()));
    if (workers == 1) {
        work();
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return out;
}

} // namespace mriaug
