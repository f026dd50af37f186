#include <gtest/gtest.h>

#include <map>
#include <set>

#include "mriaug/mriaug.hpp"

using namespace mriaug;

namespace {

AugmentationConfig with_p(double p) {
    AugmentationConfig c;
    c.p_aug = p;
    return c;
}

TransformSet all_ids() {
    TransformSet s;
    s.set();
    return s;
}

void expect_plan_in_range(const AugmentationConfig& c, const AugmentationPlan& plan) {
    auto in = [&](ParamId p, double v) {
        EXPECT_TRUE(c.effective_range(p).contains(v)) << to_string(p) << " = " << v;
    };
    for (const PlanStep& step : plan.steps)
        std::visit(
            [&](const auto& s) {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, AdditiveNoiseStep>) in(ParamId::AdditiveSigma, s.sigma);
                if constexpr (std::is_same_v<S, MultiplicativeNoiseStep>) in(ParamId::MultiplicativeSigma, s.sigma);
                if constexpr (std::is_same_v<S, BiasFieldStep>) {
                    in(ParamId::BiasAmplitude, s.params.amplitude);
                    for (int a = 0; a < 3; ++a) {
                        EXPECT_GE(s.params.center[a], 0.0);
                        EXPECT_LT(s.params.center[a], static_cast<double>(plan.shape[a]));
                    }
                }
                if constexpr (std::is_same_v<S, RotationStep>)
                    for (double d : s.params.degrees) in(ParamId::RotationDegrees, d);
                if constexpr (std::is_same_v<S, ElasticStep>) {
                    in(ParamId::ElasticKernelSigma, s.kernel_sigma);
                    in(ParamId::ElasticAlpha, s.alpha);
                }
                if constexpr (std::is_same_v<S, RingingStep>) in(ParamId::RingingCutoff, static_cast<double>(s.cutoff));
                if constexpr (std::is_same_v<S, GhostingStep>) {
                    in(ParamId::GhostingN, static_cast<double>(s.n));
                    in(ParamId::GhostingFactor, s.factor);
                }
            },
            step);
}

} // namespace

TEST(Philox, KnownAnswerVectors) {
    EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(SeededRng, SameSeedSameSequence) {
    SeededRng a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    bool differs_stream = false, differs_seed = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs_stream |= x != c.next_u64();
        differs_seed |= x != d.next_u64();
    }
    EXPECT_TRUE(differs_stream);
    EXPECT_TRUE(differs_seed);
}

TEST(SeededRng, UniformIntCoversInclusiveRange) {
    SeededRng r(7);
    std::map<std::int64_t, int> counts;
    for (int i = 0; i < 9000; ++i) counts[r.uniform_int(2, 10)]++;
    EXPECT_EQ(counts.size(), 9u);
    EXPECT_EQ(counts.begin()->first, 2);
    EXPECT_EQ(counts.rbegin()->first, 10);
    for (const auto& [v, n] : counts) {
        EXPECT_GT(n, 850) << v;
        EXPECT_LT(n, 1150) << v;
    }
}

TEST(SeededRng, UniformDegenerateRangeIsExact) {
    SeededRng r(1);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(r.uniform(0.25, 0.25), 0.25);
}

TEST(SeededRng, NormalMoments) {
    SeededRng r(11);
    double s = 0, ss = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        s += x;
        ss += x * x;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(ss / n, 1.0, 0.01);
}

TEST(IndexedNormal, DependsOnlyOnIndex) {
    const IndexedNormal a(5, 1), b(5, 1), c(5, 2);
    EXPECT_EQ(a.normal(1000), b.normal(1000));
    EXPECT_NE(a.normal(1000), c.normal(1000));
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const double u = a.symmetric_uniform(i);
        EXPECT_GE(u, -1.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(StreamSeed, DistinctPerIndex) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(stream_seed(123, i));
    EXPECT_EQ(seen.size(), 10000u);
    EXPECT_NE(stream_seed(1, 0), stream_seed(2, 0));
}

TEST(Schedule, ZeroAndOne) {
    for (std::uint64_t s = 0; s < 200; ++s) {
        SeededRng r0(s), r1(s);
        EXPECT_TRUE(schedule(with_p(0.0), r0).none());
        EXPECT_TRUE(schedule(with_p(1.0), r1).all());
    }
}

TEST(Schedule, DefaultProbabilityFrequency) {
    const AugmentationConfig c; // p_aug = 1/3
    std::array<int, transform_count> counts{};
    const int draws = 10000;
    for (int d = 0; d < draws; ++d) {
        SeededRng r(stream_seed(99, static_cast<std::uint64_t>(d)));
        const auto ids = schedule(c, r);
        for (std::size_t t = 0; t < transform_count; ++t) counts[t] += ids.test(t);
    }
    for (std::size_t t = 0; t < transform_count; ++t) {
        const double f = counts[t] / static_cast<double>(draws);
        EXPECT_GE(f, 0.319) << to_string(static_cast<TransformId>(t));
        EXPECT_LE(f, 0.348) << to_string(static_cast<TransformId>(t));
    }
}

TEST(Schedule, PerTransformOverride) {
    AugmentationConfig c = with_p(1.0);
    c.p_override[index_of(TransformId::Elastic)] = 0.0;
    SeededRng r(3);
    const auto ids = schedule(c, r);
    EXPECT_FALSE(ids.test(index_of(TransformId::Elastic)));
    EXPECT_EQ(ids.count(), 6u);
}

TEST(SampleParams, RotationAnglesInRange) {
    const AugmentationConfig c;
    TransformSet ids;
    ids.set(index_of(TransformId::Rotation));
    for (std::uint64_t s = 0; s < 500; ++s) {
        SeededRng r(s);
        const auto plan = sample_params(c, ids, {32, 32, 32}, r);
        ASSERT_EQ(plan.steps.size(), 1u);
        const auto& rot = std::get<RotationStep>(plan.steps[0]);
        for (double d : rot.params.degrees) {
            EXPECT_GE(d, -30.0);
            EXPECT_LE(d, 30.0);
        }
    }
}

TEST(SampleParams, EmptySetGivesEmptyPlan) {
    SeededRng r(1);
    EXPECT_TRUE(sample_params(AugmentationConfig{}, TransformSet{}, {8, 8, 8}, r).steps.empty());
}

TEST(SampleParams, GhostCountUniform) {
    const AugmentationConfig c;
    TransformSet ids;
    ids.set(index_of(TransformId::Ghosting));
    std::map<std::int64_t, int> counts;
    const int seeds = 1000;
    for (int s = 0; s < seeds; ++s) {
        SeededRng r(static_cast<std::uint64_t>(s));
        const auto plan = sample_params(c, ids, {16, 16, 16}, r);
        counts[std::get<GhostingStep>(plan.steps[0]).n]++;
    }
    EXPECT_EQ(counts.size(), 9u);
    for (const auto& [n, k] : counts) {
        const double f = k / static_cast<double>(seeds);
        EXPECT_GE(f, 0.082) << n;
        EXPECT_LE(f, 0.141) << n;
    }
}

TEST(SampleParams, AxesCoverAllThree) {
    const AugmentationConfig c = with_p(1.0);
    std::set<Axis> ringing, ghosting;
    for (std::uint64_t s = 0; s < 100; ++s) {
        SeededRng r(s);
        const auto plan = sample_params(c, all_ids(), {16, 16, 16}, r);
        for (const auto& step : plan.steps) {
            if (auto* g = std::get_if<GhostingStep>(&step)) ghosting.insert(g->axis);
            if (auto* g = std::get_if<RingingStep>(&step)) ringing.insert(g->axis);
        }
    }
    EXPECT_EQ(ringing.size(), 3u);
    EXPECT_EQ(ghosting.size(), 3u);
}

TEST(SampleParams, StepsFollowPipelineOrder) {
    SeededRng r(5);
    const auto plan = sample_params(with_p(1.0), all_ids(), {16, 16, 16}, r);
    ASSERT_EQ(plan.steps.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(transform_of(plan.steps[i]), default_order[i]);
}

TEST(SampleParams, FuzzedPlansStayInRange) {
    for (int level = 1; level <= 5; ++level) {
        AugmentationConfig c = with_p(1.0);
        c.magnitude_level = level;
        for (std::uint64_t s = 0; s < 2000; ++s) {
            SeededRng r(stream_seed(level, s));
            expect_plan_in_range(c, sample_params(c, schedule(c, r), {20, 30, 40}, r));
        }
    }
}

TEST(SampleParams, Deterministic) {
    const AugmentationConfig c = with_p(0.5);
    for (std::uint64_t s = 0; s < 50; ++s) {
        SeededRng a(s), b(s);
        const auto pa = sample_params(c, schedule(c, a), {9, 9, 9}, a);
        const auto pb = sample_params(c, schedule(c, b), {9, 9, 9}, b);
        EXPECT_EQ(plan_to_string(pa), plan_to_string(pb));
    }
}

TEST(Magnitude, PresetLadder) {
    EXPECT_EQ(magnitude_preset(ParamId::RotationDegrees, 3), (Range{-30, 30}));
    EXPECT_EQ(magnitude_preset(ParamId::RotationDegrees, 5), (Range{-60, 60}));
    EXPECT_EQ(magnitude_preset(ParamId::RotationDegrees, 1), (Range{-7.5, 7.5}));
    EXPECT_EQ(magnitude_preset(ParamId::GhostingFactor, 3), (Range{0.85, 0.95}));
    EXPECT_EQ(magnitude_preset(ParamId::ElasticAlpha, 4), (Range{300, 900}));
    EXPECT_EQ(magnitude_preset(ParamId::AdditiveSigma, 2), (Range{0.0, 0.00005}));
    EXPECT_EQ(magnitude_preset(ParamId::RingingCutoff, 5), (Range{48, 64}));
    EXPECT_EQ(magnitude_preset(ParamId::RingingCutoff, 4), (Range{64, 85}));
    EXPECT_EQ(magnitude_preset(ParamId::RingingCutoff, 1), (Range{256, 256}));
    EXPECT_EQ(magnitude_preset(ParamId::GhostingN, 5), (Range{2, 10}));
    const Range g5 = magnitude_preset(ParamId::GhostingFactor, 5);
    EXPECT_NEAR(g5.lo, 0.7, 1e-12);
    EXPECT_NEAR(g5.hi, 0.9, 1e-12);
    const Range g1 = magnitude_preset(ParamId::GhostingFactor, 1);
    EXPECT_NEAR(g1.lo, 0.9625, 1e-12);
    EXPECT_NEAR(g1.hi, 0.9875, 1e-12);
}

TEST(Magnitude, LevelThreeIsDefaultForEveryParameter) {
    for (ParamId p : all_params) EXPECT_EQ(magnitude_preset(p, 3), default_range(p)) << to_string(p);
}

TEST(Magnitude, BadLevel) {
    for (int level : {0, 6, -1}) {
        try {
            magnitude_preset(ParamId::RotationDegrees, level);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::BadLevel);
        }
    }
}

TEST(ConfigJson, RoundtripAndDefaults) {
    AugmentationConfig c;
    c.p_aug = 0.2;
    c.p_override[index_of(TransformId::Rotation)] = 0.7;
    c.magnitude_level = 4;
    c.range(ParamId::GhostingN) = {3, 5};
    const AugmentationConfig r = config_from_json(to_json(c));
    EXPECT_EQ(to_json(r), to_json(c));
    EXPECT_EQ(to_json(config_from_string("{}")), to_json(AugmentationConfig{}));
    EXPECT_EQ(to_json(c)["schema_version"], config_schema_version);
}

TEST(ConfigJson, Rejections) {
    auto code_of = [](const std::string& text) {
        try {
            config_from_string(text);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Internal;
    };
    EXPECT_EQ(code_of("{"), ErrorCode::BadConfig);
    EXPECT_EQ(code_of(R"({"bogus": 1})"), ErrorCode::BadConfig);
    EXPECT_EQ(code_of(R"({"schema_version": 2})"), ErrorCode::BadConfig);
    EXPECT_EQ(code_of(R"({"p_aug": 1.5})"), ErrorCode::BadConfig);
    EXPECT_EQ(code_of(R"({"magnitude_level": 6})"), ErrorCode::BadLevel);
    EXPECT_EQ(code_of(R"({"additive_noise": {"mu": 0.1}})"), ErrorCode::BadConfig);
    EXPECT_EQ(code_of(R"({"rotation": {"degrees": [10, -10]}})"), ErrorCode::BadConfig);
    EXPECT_EQ(code_of(R"({"ringing": {"cutoff": [96.5, 128]}})"), ErrorCode::BadConfig);
    EXPECT_EQ(code_of(R"({"ghosting": {"n": [1, 4]}})"), ErrorCode::BadConfig);
    EXPECT_EQ(code_of(R"({"ghosting": {"factor": [0.5, 1.2]}})"), ErrorCode::BadConfig);
    EXPECT_EQ(code_of(R"({"elastic": {"sigma": [1, 2]}})"), ErrorCode::BadConfig);
    EXPECT_EQ(code_of(R"({"p": {"warp": 0.5}})"), ErrorCode::BadConfig);
    EXPECT_EQ(code_of(R"({"order": ["rotation"]})"), ErrorCode::BadConfig);
    EXPECT_EQ(code_of(R"({"p_aug": "high"})"), ErrorCode::BadConfig);
}

TEST(ConfigJson, TransformIds) {
    for (TransformId t : all_transforms) EXPECT_EQ(transform_from_string(to_string(t)), t);
    try {
        transform_from_string("sharpen");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BadTransformId);
    }
}

TEST(PlanJson, Roundtrip) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        SeededRng r(s);
        const auto plan = sample_params(with_p(1.0), all_ids(), {10, 11, 12}, r);
        const auto back = plan_from_json(nlohmann::json::parse(plan_to_string(plan)));
        EXPECT_EQ(plan_to_string(back), plan_to_string(plan));
        EXPECT_EQ(back.shape, plan.shape);
    }
}

TEST(PlanJson, Malformed) {
    for (const char* text : {R"({"schema_version": 1})", R"({"schema_version": 9, "seed": 1, "shape": [1,1,1], "steps": []})",
                             R"({"schema_version": 1, "seed": 1, "shape": [1,1,1], "steps": [{"transform": "warp"}]})",
                             R"({"schema_version": 1, "seed": 1, "shape": [1,1,1], "steps": [{"transform": "ringing", "cutoff": 3, "axis": "w"}]})"}) {
        try {
            plan_from_json(nlohmann::json::parse(text));
            ADD_FAILURE() << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::BadPlan) << text;
        }
    }
}
