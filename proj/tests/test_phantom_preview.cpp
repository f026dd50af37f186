#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "mriaug/mriaug.hpp"
#include "oracles.hpp"

using namespace mriaug;
namespace fs = std::filesystem;

namespace {

PhantomSpec single_sphere(double r, const Shape& s = {64, 64, 64}) {
    PhantomSpec spec;
    spec.shape = s;
    spec.structures.push_back(
        {StructureShape::Sphere, {(s[0] - 1) / 2.0, (s[1] - 1) / 2.0, (s[2] - 1) / 2.0}, {r, r, r}, 0.8, 1});
    return spec;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

Sample brain(const Shape& s = {64, 64, 64}) {
    Phantom p = rasterize(brain_phantom_spec(s));
    return {std::move(p.image), std::move(p.labels), "brain"};
}

PreviewOptions half_fov_ghost_options() {
    PreviewOptions opt;
    opt.seed = 4;
    opt.base.range(ParamId::GhostingN) = {2, 2};
    opt.base.range(ParamId::GhostingFactor) = {0.85, 0.85};
    return opt;
}

const Panel& panel_for(const Preview& p, TransformId t) {
    for (const Panel& panel : p.panels)
        if (panel.transform == t) return panel;
    throw std::runtime_error("missing panel");
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("mriaug_test_" + name); }

} // namespace

TEST(Phantom, SphereVolumeMatchesAnalytic) {
    for (double r : {10.0, 16.0, 24.0}) {
        const Phantom p = rasterize(single_sphere(r));
        const auto count = static_cast<double>(std::count(p.labels.data().begin(), p.labels.data().end(), Label{1}));
        const double analytic = 4.0 / 3.0 * std::numbers::pi * r * r * r;
        EXPECT_NEAR(count / analytic, 1.0, 0.02) << r;
    }
}

TEST(Phantom, EmptySpecIsBackground) {
    PhantomSpec spec;
    spec.shape = {5, 6, 7};
    spec.background = 0.25;
    const Phantom p = rasterize(spec);
    for (float v : p.image.data()) EXPECT_EQ(v, 0.25f);
    EXPECT_EQ(label_set(p.labels), std::set<Label>{0});
}

TEST(Phantom, LaterStructuresWin) {
    PhantomSpec spec;
    spec.shape = {16, 16, 16};
    spec.structures.push_back({StructureShape::Box, {7.5, 7.5, 7.5}, {6, 6, 6}, 0.3, 1});
    spec.structures.push_back({StructureShape::Sphere, {7.5, 7.5, 7.5}, {3, 3, 3}, 0.9, 2});
    const Phantom p = rasterize(spec);
    EXPECT_EQ(p.labels.data()(7, 7, 7), 2);
    EXPECT_FLOAT_EQ(p.image.data()(7, 7, 7), 0.9f);
    EXPECT_EQ(p.labels.data()(2, 2, 2), 1);
    EXPECT_EQ(p.labels.data()(0, 0, 0), 0);
}

TEST(Phantom, GradientSpansAmplitude) {
    PhantomSpec spec;
    spec.shape = {11, 3, 3};
    spec.background = 0.1;
    spec.gradient = Gradient{{1, 0, 0}, 0.5};
    const Phantom p = rasterize(spec);
    EXPECT_FLOAT_EQ(p.image.data()(0, 1, 1), 0.1f);
    EXPECT_FLOAT_EQ(p.image.data()(10, 1, 1), 0.6f);
    EXPECT_FLOAT_EQ(p.image.data()(5, 0, 2), 0.35f);
}

TEST(Phantom, RejectsOutOfBoundsAndBadLabels) {
    PhantomSpec spec = single_sphere(40.0);
    EXPECT_EQ(code_of([&] { rasterize(spec); }), ErrorCode::SpecOutOfBounds);
    spec = single_sphere(5.0);
    spec.structures.push_back(spec.structures[0]);
    EXPECT_EQ(code_of([&] { rasterize(spec); }), ErrorCode::BadLabel);
    spec.structures.pop_back();
    spec.structures[0].label = 0;
    EXPECT_EQ(code_of([&] { rasterize(spec); }), ErrorCode::BadLabel);
}

TEST(Phantom, BrainHasSixLabelsAndSpacing) {
    PhantomSpec spec = brain_phantom_spec({48, 56, 40});
    spec.spacing = {1.0, 1.2, 1.5};
    const Phantom p = rasterize(spec);
    EXPECT_EQ(label_set(p.labels), (std::set<Label>{0, 1, 2, 3, 4, 5, 6}));
    EXPECT_TRUE(is_normalized(p.image));
    EXPECT_TRUE(orientation_of(p.image.affine()).is_ras());
    EXPECT_DOUBLE_EQ(p.image.spacing()[2], 1.5);
}

TEST(Phantom, JsonRoundTrip) {
    const PhantomSpec spec = brain_phantom_spec({32, 32, 32});
    const PhantomSpec back = phantom_spec_from_json(to_json(spec));
    const Phantom a = rasterize(spec), b = rasterize(back);
    EXPECT_EQ(a.image.data(), b.image.data());
    EXPECT_EQ(a.labels.data(), b.labels.data());
    EXPECT_EQ(code_of([] { phantom_spec_from_json(nlohmann::json::parse(R"({"structures":[{"shape":"cone"}]})")); }),
              ErrorCode::BadConfig);
}

TEST(Preview, EightPanelsInOrder) {
    const Preview p = make_preview(brain({32, 32, 32}), {});
    ASSERT_EQ(p.panels.size(), 8u);
    EXPECT_EQ(p.panels[0].title, "original");
    EXPECT_FALSE(p.panels[0].transform);
    for (std::size_t i = 0; i < default_order.size(); ++i) {
        EXPECT_EQ(p.panels[i + 1].transform, default_order[i]);
        ASSERT_EQ(p.panels[i + 1].plan.steps.size(), 1u);
        EXPECT_EQ(transform_of(p.panels[i + 1].plan.steps[0]), default_order[i]);
    }
    EXPECT_EQ(p.slice_index, 16u);
}

TEST(Preview, PanelEqualsSingleTransformPipeline) {
    const Sample s = brain({24, 24, 24});
    PreviewOptions opt;
    opt.seed = 31;
    const Preview p = make_preview(s, opt);
    for (TransformId t : default_order) {
        const Augmented a = Pipeline(AugmentationConfig::only(t)).apply(s, 31);
        EXPECT_EQ(panel_for(p, t).volume.data(), a.sample.image.data()) << to_string(t);
    }
}

TEST(Preview, ExaggerateUsesTopLevel) {
    PreviewOptions opt;
    opt.exaggerate = true;
    EXPECT_EQ(panel_config(TransformId::Rotation, opt).magnitude_level, 5);
    EXPECT_EQ(panel_config(TransformId::Rotation, opt).probability(TransformId::Rotation), 1.0);
    EXPECT_EQ(panel_config(TransformId::Rotation, opt).probability(TransformId::Elastic), 0.0);
}

TEST(Preview, RejectsBadSlice) {
    PreviewOptions opt;
    opt.slice_axis = Axis::Y;
    opt.slice_index = 20;
    EXPECT_EQ(code_of([&] { make_preview(brain({16, 20, 24}), opt); }), ErrorCode::BadSliceIndex);
}

TEST(Preview, GhostingPanelShowsHalfFovReplica) {
    const Sample s = brain();
    const Preview p = make_preview(s, half_fov_ghost_options());
    const Panel& ghost = panel_for(p, TransformId::Ghosting);
    const auto& step = std::get<GhostingStep>(ghost.plan.steps[0]);
    ASSERT_EQ(step.n, 2);
    const std::vector<double> sig = oracle::ghost_signature(s.image, ghost.volume, step.axis);
    const auto peaks = oracle::secondary_peaks(sig, 1, 63);
    ASSERT_FALSE(peaks.empty());
    EXPECT_EQ(peaks[0], 32u);
    for (std::size_t i = 1; i < peaks.size(); ++i) EXPECT_LT(sig[peaks[i]], 0.75 * sig[peaks[0]]) << peaks[i];
}

TEST(Preview, HalfFovGhostOnEveryAxis) {
    const Sample s = brain();
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
        const Volume g = motion_ghosting(s.image, 2, 0.85, a);
        const std::vector<double> sig = oracle::ghost_signature(s.image, g, a);
        const auto peaks = oracle::secondary_peaks(sig, 1, 63);
        ASSERT_FALSE(peaks.empty());
        EXPECT_EQ(peaks[0], 32u) << to_string(a);
        for (std::size_t i = 1; i < peaks.size(); ++i) EXPECT_LT(sig[peaks[i]], 0.75 * sig[peaks[0]]);
    }
}

TEST(Preview, KSpacePanelsMatchNaiveOracles) {
    const Sample s = brain({32, 32, 32});
    const Preview p = make_preview(s, half_fov_ghost_options());
    const Panel& ring = panel_for(p, TransformId::Ringing);
    const auto& rs = std::get<RingingStep>(ring.plan.steps[0]);
    const auto keep = effective_cutoff(rs.cutoff, s.image.shape()[static_cast<std::size_t>(rs.axis)]);
    EXPECT_LT(oracle::max_abs_diff(ring.volume.data(), oracle::truncated_reconstruction(s.image, keep, rs.axis)), 1e-5);

    const Panel& ghost = panel_for(p, TransformId::Ghosting);
    const auto& gs = std::get<GhostingStep>(ghost.plan.steps[0]);
    EXPECT_LT(oracle::max_abs_diff(ghost.volume.data(), oracle::comb_reconstruction(s.image, gs.n, gs.factor, gs.axis)),
              1e-5);
}

TEST(Preview, SliceOrientation) {
    Grid3<float> g({3, 4, 5});
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<float>(i);
    const auto rows = extract_slice(Volume(g), Axis::Z, 2);
    ASSERT_EQ(rows.size(), 4u);
    ASSERT_EQ(rows[0].size(), 3u);
    EXPECT_EQ(rows[3][0], g(0, 0, 2)); // bottom-left is (0, 0)
    EXPECT_EQ(rows[0][2], g(2, 3, 2));
    const auto sag = extract_slice(Volume(g), Axis::X, 1);
    ASSERT_EQ(sag.size(), 5u);
    ASSERT_EQ(sag[0].size(), 4u);
    EXPECT_EQ(sag[0][3], g(1, 3, 4));
}

TEST(Preview, MontageGeometryAndWindow) {
    const Preview p = make_preview(brain({32, 32, 32}), {});
    const MontageLayout layout;
    const Gray8 m = render_montage(p, layout);
    EXPECT_EQ(m.height, 2 * (32 + layout.caption_height) + 3 * layout.margin);
    EXPECT_GE(m.width, 4 * 32 + 5 * layout.margin);
    Window w;
    const Gray8 tile = render_slice({{0.2, 0.4}, {0.6, 0.8}}, w);
    EXPECT_DOUBLE_EQ(w.lo, 0.2);
    EXPECT_DOUBLE_EQ(w.hi, 0.8);
    EXPECT_EQ(tile.at(0, 0), 0);
    EXPECT_EQ(tile.at(1, 1), 255);
    EXPECT_EQ(format_window(w), "w=[0.200,0.800]");
}

TEST(Png, RoundTrip) {
    Gray8 img(37, 11);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = static_cast<std::uint8_t>(i * 7);
    font::draw_text(img, 1, 2, "ab 09");
    const fs::path path = temp_path("roundtrip.png");
    write_png(img, path);
    const Gray8 back = read_png(path);
    EXPECT_EQ(back.width, 37u);
    EXPECT_EQ(back.height, 11u);
    EXPECT_EQ(back.pixels, img.pixels);
    fs::remove(path);
}

TEST(Png, ReadErrors) {
    const fs::path path = temp_path("not_a.png");
    nifti::write_file(path, std::vector<std::uint8_t>{1, 2, 3, 4});
    EXPECT_THROW(read_png(path), Error);
    fs::remove(path);
    EXPECT_THROW(read_png(temp_path("missing.png")), Error);
}
