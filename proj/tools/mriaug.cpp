// mriaug command-line tool: augment, preview, sweep, stats, phantom, info.
//
// Exit codes: 0 success, 1 runtime or partial failure, 2 usage or config error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mriaug/mriaug.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mriaug;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string config_path;
    std::optional<std::size_t> threads;
    bool verbose = false;
};

bool is_usage_error(ErrorCode c) {
    switch (c) {
    case ErrorCode::BadConfig:
    case ErrorCode::BadLevel:
    case ErrorCode::BadTransformId:
    case ErrorCode::BadSliceIndex:
    case ErrorCode::BadN:
    case ErrorCode::BadPlan:
    case ErrorCode::SpecOutOfBounds:
    case ErrorCode::BadLabel: return true;
    default: return false;
    }
}

std::uint64_t resolve_seed(const Globals& g) {
    if (g.seed) return *g.seed;
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "seed: " << s << "\n";
    return s;
}

std::size_t resolve_threads(const Globals& g) {
    if (g.threads) return std::max<std::size_t>(1, *g.threads);
    if (const char* env = std::getenv("MRIAUG_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n >= 1) return static_cast<std::size_t>(n);
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring invalid MRIAUG_THREADS='" << env << "'\n";
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    if (!in) fail(ErrorCode::IoError, "cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open " + p.string() + " for writing");
    out << text;
}

AugmentationConfig load_config(const Globals& g) {
    if (g.config_path.empty()) return {};
    return config_from_string(read_text(g.config_path));
}

/// File name without .nii / .nii.gz / .hdr suffixes.
std::string stem_of(const fs::path& p) {
    std::string name = p.filename().string();
    for (const char* ext : {".nii.gz", ".hdr.gz", ".nii", ".hdr", ".img.gz", ".img"}) {
        const std::string e(ext);
        if (name.size() > e.size() && name.compare(name.size() - e.size(), e.size(), e) == 0)
            return name.substr(0, name.size() - e.size());
    }
    return p.stem().string();
}

/// Read, reorient to RAS, normalize to [0, 1].
Sample load_sample(const fs::path& image, const std::optional<fs::path>& labels) {
    const Volume raw = nifti::read_nifti(image).to_volume();
    std::optional<LabelVolume> lab;
    if (labels) lab = nifti::read_nifti(*labels).to_labels();
    Reoriented r = reorient_to_ras(raw, lab);
    return {normalize_intensity(r.image), std::move(r.labels), stem_of(image)};
}

nifti::Datatype label_datatype(const LabelVolume& l) {
    Label hi = 0;
    for (Label v : l.data()) hi = std::max(hi, v);
    if (hi <= 255) return nifti::Datatype::UInt8;
    if (hi <= 32767) return nifti::Datatype::Int16;
    return nifti::Datatype::Int32;
}

void write_sample(const Sample& s, const Mat4& affine, const fs::path& image_path, const std::optional<fs::path>& label_path) {
    nifti::write_nifti(s.image, image_path);
    if (s.labels && label_path) {
        nifti::WriteOptions opt;
        opt.datatype = label_datatype(*s.labels);
        nifti::write_nifti(*s.labels, affine, *label_path, opt);
    }
}

/// Runs f(i) for i in [0, n) on up to `workers` threads.
template <typename F>
void parallel_for(std::size_t n, std::size_t workers, F f) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) f(i);
    };
    if (workers == 1) {
        run();
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
}

json ranges_json(const AugmentationConfig& c, TransformId t) {
    json r = json::object();
    for (ParamId p : all_params)
        if (owner_of(p) == t) {
            const Range e = c.effective_range(p);
            r[std::string(to_string(p))] = {e.lo, e.hi};
        }
    return r;
}

// ---------------------------------------------------------------------------

struct AugmentArgs {
    std::vector<std::string> inputs;
    std::vector<std::string> labels;
    std::string output_dir;
    std::string plan_path;
    std::string only;
    std::optional<int> level;
};

int cmd_augment(const Globals& g, const AugmentArgs& a) {
    if (a.inputs.empty()) {
        std::cerr << "error: no inputs\n";
        return exit_usage;
    }
    if (!a.labels.empty() && a.labels.size() != a.inputs.size()) {
        std::cerr << "error: --labels needs one path per input\n";
        return exit_usage;
    }
    AugmentationConfig config;
    std::optional<AugmentationPlan> plan;
    try {
        config = load_config(g);
        if (!a.only.empty()) config = AugmentationConfig::only(transform_from_string(a.only), config);
        if (a.level) config.magnitude_level = *a.level;
        config.validate();
        if (!a.plan_path.empty()) plan = plan_from_json(json::parse(read_text(a.plan_path)));
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_usage_error(e.code()) || e.code() == ErrorCode::IoError ? exit_usage : exit_failure;
    }
    const std::uint64_t seed = plan ? plan->seed : resolve_seed(g);
    fs::create_directories(a.output_dir);
    const Pipeline pipeline(config);

    std::vector<std::string> errors(a.inputs.size());
    parallel_for(a.inputs.size(), resolve_threads(g), [&](std::size_t i) {
        try {
            const fs::path in(a.inputs[i]);
            std::optional<fs::path> lab;
            if (!a.labels.empty()) lab = a.labels[i];
            Sample s = load_sample(in, lab);
            Sample out;
            AugmentationPlan used;
            if (plan) {
                out = replay(*plan, s);
                used = *plan;
            } else {
                Augmented r = pipeline.apply(s, stream_seed(seed, i));
                out = std::move(r.sample);
                used = std::move(r.plan);
            }
            const std::string stem = stem_of(in);
            const fs::path dir(a.output_dir);
            write_sample(out, out.image.affine(), dir / (stem + ".nii.gz"),
                         out.labels ? std::optional<fs::path>(dir / (stem + ".labels.nii.gz")) : std::nullopt);
            write_text(dir / (stem + ".plan.json"), plan_to_string(used));
            if (g.verbose)
                std::cerr << in.string() << ": " << used.steps.size() << " transform(s), hash "
                          << volume_hash(out.image) << "\n";
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    int rc = exit_ok;
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty()) {
            std::cerr << "error: " << a.inputs[i] << ": " << errors[i] << "\n";
            rc = exit_failure;
        }
    return rc;
}

// ---------------------------------------------------------------------------

struct PreviewArgs {
    std::string input;
    std::string output;
    std::string axis = "z";
    std::optional<std::size_t> slice;
    bool exaggerate = false;
};

int cmd_preview(const Globals& g, const PreviewArgs& a) {
    PreviewOptions opt;
    opt.base = load_config(g);
    opt.slice_axis = axis_from_string(a.axis);
    opt.slice_index = a.slice;
    opt.exaggerate = a.exaggerate;
    opt.seed = stream_seed(resolve_seed(g), 0);
    const Sample s = load_sample(a.input, std::nullopt);
    const Preview p = make_preview(s, opt);
    write_png(render_montage(p), a.output);
    if (g.verbose)
        for (const Panel& panel : p.panels)
            std::cerr << panel.title << ": " << panel.plan.steps.size() << " step(s)\n";
    std::cout << "wrote " << a.output << " (" << p.panels.size() << " panels, " << to_string(p.slice_axis)
              << " slice " << p.slice_index << ")\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string input;
    std::string transform;
    std::string output_dir;
};

int cmd_sweep(const Globals& g, const SweepArgs& a) {
    const TransformId t = transform_from_string(a.transform);
    const AugmentationConfig base = load_config(g);
    const std::uint64_t seed = resolve_seed(g);
    const Sample s = load_sample(a.input, std::nullopt);
    fs::create_directories(a.output_dir);
    json manifest;
    manifest["schema_version"] = config_schema_version;
    manifest["version"] = std::string(version_string);
    manifest["seed"] = seed;
    manifest["sample_seed"] = stream_seed(seed, 0);
    manifest["input"] = a.input;
    manifest["transform"] = std::string(to_string(t));
    manifest["levels"] = json::array();
    for (int level = 1; level <= 5; ++level) {
        AugmentationConfig c = AugmentationConfig::only(t, base);
        c.magnitude_level = level;
        const Augmented r = Pipeline(c).apply(s, stream_seed(seed, 0));
        const std::string file = "level" + std::to_string(level) + ".nii.gz";
        nifti::write_nifti(r.sample.image, fs::path(a.output_dir) / file);
        manifest["levels"].push_back({{"level", level},
                                      {"factor", magnitude_factor(level)},
                                      {"ranges", ranges_json(c, t)},
                                      {"plan", to_json(r.plan)},
                                      {"output", file},
                                      {"hash", volume_hash(r.sample.image)}});
    }
    write_text(fs::path(a.output_dir) / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote 5 levels of " << to_string(t) << " to " << a.output_dir << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
    std::int64_t draws = 10000;
    std::string output;
    std::size_t bins = 10;
};

json run_stats(const AugmentationConfig& config, std::int64_t draws, std::uint64_t seed, std::size_t bins) {
    if (draws < 1000) fail(ErrorCode::BadN, "stats needs at least 1000 draws, got " + std::to_string(draws));
    const Shape nominal{64, 64, 64};
    std::array<std::int64_t, transform_count> counts{};
    std::map<ParamId, std::vector<std::int64_t>> hist;
    std::map<ParamId, std::int64_t> out_of_range;
    for (ParamId p : all_params) hist[p].assign(bins, 0);
    auto record = [&](ParamId p, double v) {
        const Range r = config.effective_range(p);
        if (!r.contains(v)) ++out_of_range[p];
        const double span = r.hi - r.lo;
        std::size_t b = span > 0 ? static_cast<std::size_t>((v - r.lo) / span * static_cast<double>(bins)) : 0;
        hist[p][std::min(b, bins - 1)]++;
    };
    for (std::int64_t d = 0; d < draws; ++d) {
        SeededRng rng(stream_seed(seed, static_cast<std::uint64_t>(d)));
        const TransformSet ids = schedule(config, rng);
        for (TransformId t : all_transforms)
            if (ids.test(index_of(t))) counts[index_of(t)]++;
        const AugmentationPlan plan = sample_params(config, ids, nominal, rng);
        for (const PlanStep& step : plan.steps)
            std::visit(
                [&](const auto& s) {
                    using S = std::decay_t<decltype(s)>;
                    if constexpr (std::is_same_v<S, AdditiveNoiseStep>) record(ParamId::AdditiveSigma, s.sigma);
                    else if constexpr (std::is_same_v<S, MultiplicativeNoiseStep>)
                        record(ParamId::MultiplicativeSigma, s.sigma);
                    else if constexpr (std::is_same_v<S, BiasFieldStep>) {
                        record(ParamId::BiasAmplitude, s.params.amplitude);
                        record(ParamId::BiasScale, s.params.scale / 64.0);
                    } else if constexpr (std::is_same_v<S, RotationStep>) {
                        for (double deg : s.params.degrees) record(ParamId::RotationDegrees, deg);
                    } else if constexpr (std::is_same_v<S, ElasticStep>) {
                        record(ParamId::ElasticKernelSigma, s.kernel_sigma);
                        record(ParamId::ElasticAlpha, s.alpha);
                    } else if constexpr (std::is_same_v<S, RingingStep>) {
                        record(ParamId::RingingCutoff, static_cast<double>(s.cutoff));
                    } else if constexpr (std::is_same_v<S, GhostingStep>) {
                        record(ParamId::GhostingN, static_cast<double>(s.n));
                        record(ParamId::GhostingFactor, s.factor);
                    }
                },
                step);
    }
    json report;
    report["draws"] = draws;
    report["seed"] = seed;
    report["transforms"] = json::object();
    json flags = json::array();
    const double n = static_cast<double>(draws);
    for (TransformId t : all_transforms) {
        const double p = config.probability(t);
        const double freq = static_cast<double>(counts[index_of(t)]) / n;
        const double sd = std::sqrt(p * (1.0 - p) / n);
        const double lo = p - 4.0 * sd, hi = p + 4.0 * sd;
        const bool flagged = freq < lo || freq > hi;
        report["transforms"][std::string(to_string(t))] = {
            {"p", p}, {"frequency", freq}, {"count", counts[index_of(t)]}, {"band", {lo, hi}}, {"flagged", flagged}};
        if (flagged) flags.push_back(std::string(to_string(t)));
    }
    report["params"] = json::object();
    for (ParamId p : all_params) {
        const Range r = config.effective_range(p);
        report["params"][std::string(to_string(p))] = {
            {"range", {r.lo, r.hi}}, {"histogram", hist[p]}, {"out_of_range", out_of_range[p]}};
        if (out_of_range[p] > 0) flags.push_back(std::string(to_string(p)) + " out of range");
    }
    report["flags"] = flags;
    return report;
}

int cmd_stats(const Globals& g, const StatsArgs& a) {
    const AugmentationConfig config = load_config(g);
    const json report = run_stats(config, a.draws, resolve_seed(g), std::max<std::size_t>(1, a.bins));
    const std::string text = report.dump(2) + "\n";
    if (a.output.empty()) std::cout << text;
    else write_text(a.output, text);
    return report["flags"].empty() ? exit_ok : exit_failure;
}

// ---------------------------------------------------------------------------

struct PhantomArgs {
    std::string spec_path;
    std::vector<std::size_t> shape{64, 64, 64};
    std::string output;
    std::string labels_output;
};

int cmd_phantom(const Globals& g, const PhantomArgs& a) {
    PhantomSpec spec;
    if (a.spec_path.empty()) {
        if (a.shape.size() != 3) fail(ErrorCode::BadConfig, "--shape needs three extents");
        spec = brain_phantom_spec({a.shape[0], a.shape[1], a.shape[2]});
    } else {
        try {
            spec = phantom_spec_from_json(json::parse(read_text(a.spec_path)));
        } catch (const json::exception& e) {
            fail(ErrorCode::BadConfig, e.what());
        }
    }
    const Phantom ph = rasterize(spec);
    const fs::path out(a.output);
    const fs::path labels_out = a.labels_output.empty()
                                    ? out.parent_path() / (stem_of(out) + "_labels.nii.gz")
                                    : fs::path(a.labels_output);
    if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
    nifti::write_nifti(ph.image, out);
    nifti::WriteOptions opt;
    opt.datatype = label_datatype(ph.labels);
    nifti::write_nifti(ph.labels, ph.image.affine(), labels_out, opt);
    if (g.verbose) std::cerr << "structures: " << spec.structures.size() << "\n";
    std::cout << "wrote " << out.string() << " and " << labels_out.string() << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------

int cmd_info(const Globals&, const std::string& input) {
    const nifti::Image img = nifti::read_nifti(input);
    const Volume v = img.to_volume();
    const VolumeStats st = volume_stats(v);
    json j;
    j["path"] = input;
    j["shape"] = v.shape();
    j["datatype"] = img.header.datatype;
    j["bitpix"] = img.header.bitpix;
    j["byte_order"] = img.header.big_endian ? "big" : "little";
    j["magic"] = img.header.single_file() ? "n+1" : "ni1";
    j["qform_code"] = img.header.qform_code;
    j["sform_code"] = img.header.sform_code;
    j["spacing"] = v.spacing();
    j["affine"] = v.affine();
    try {
        j["orientation"] = orientation_of(v.affine()).str();
    } catch (const Error&) {
        j["orientation"] = "oblique";
    }
    j["stats"] = {{"min", st.min}, {"max", st.max}, {"mean", st.mean}, {"std", st.std}};
    j["hash"] = volume_hash(v);
    std::cout << j.dump(2) << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mriaug: deterministic 3D MRI augmentation"};
    app.set_version_flag("--version", std::string(version_string));
    app.require_subcommand(1);

    Globals g;
    app.add_option("--seed", g.seed, "64-bit seed (random and printed when omitted)");
    app.add_option("--config", g.config_path, "augmentation config JSON")->check(CLI::ExistingFile);
    app.add_option("--threads", g.threads, "worker threads (overrides MRIAUG_THREADS)")->check(CLI::PositiveNumber);
    app.add_flag("-v,--verbose", g.verbose, "log progress to stderr");

    AugmentArgs aug;
    auto* augment = app.add_subcommand("augment", "augment NIfTI volumes");
    augment->fallthrough();
    augment->add_option("inputs", aug.inputs, "input images")->required();
    augment->add_option("-o,--output-dir", aug.output_dir, "output directory")->required();
    augment->add_option("--labels", aug.labels, "label maps, one per input");
    augment->add_option("--plan", aug.plan_path, "replay a recorded plan instead of sampling")->check(CLI::ExistingFile);
    augment->add_option("--only", aug.only, "enable a single transform with p = 1");
    augment->add_option("--level", aug.level, "magnitude level 1..5");

    PreviewArgs prev;
    auto* preview = app.add_subcommand("preview", "render an 8-panel montage of one slice");
    preview->fallthrough();
    preview->add_option("input", prev.input, "input image")->required()->check(CLI::ExistingFile);
    preview->add_option("-o,--output", prev.output, "output PNG")->required();
    preview->add_option("--axis", prev.axis, "slice axis x|y|z")->check(CLI::IsMember({"x", "y", "z"}));
    preview->add_option("--slice", prev.slice, "slice index (default: middle)");
    preview->add_flag("--exaggerate", prev.exaggerate, "use magnitude level 5");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "apply one transform at magnitude levels 1..5");
    sweep->fallthrough();
    sweep->add_option("input", sw.input, "input image")->required()->check(CLI::ExistingFile);
    sweep->add_option("-t,--transform", sw.transform, "transform id")->required();
    sweep->add_option("-o,--output-dir", sw.output_dir, "output directory")->required();

    StatsArgs st;
    auto* stats = app.add_subcommand("stats", "report empirical scheduling and parameter statistics");
    stats->fallthrough();
    stats->add_option("-n,--draws", st.draws, "number of scheduled draws (>= 1000)");
    stats->add_option("--bins", st.bins, "histogram bins per parameter");
    stats->add_option("-o,--output", st.output, "write the JSON report here instead of stdout");

    PhantomArgs ph;
    auto* phantom = app.add_subcommand("phantom", "rasterize a synthetic phantom");
    phantom->fallthrough();
    phantom->add_option("--spec", ph.spec_path, "phantom spec JSON (default: built-in head phantom)")
        ->check(CLI::ExistingFile);
    phantom->add_option("--shape", ph.shape, "grid shape for the built-in phantom")->expected(3);
    phantom->add_option("-o,--output", ph.output, "output image path")->required();
    phantom->add_option("--labels-output", ph.labels_output, "output label path");

    std::string info_input;
    auto* info = app.add_subcommand("info", "print header, geometry and statistics of a NIfTI file");
    info->fallthrough();
    info->add_option("input", info_input, "input image")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*augment) return cmd_augment(g, aug);
        if (*preview) return cmd_preview(g, prev);
        if (*sweep) return cmd_sweep(g, sw);
        if (*stats) return cmd_stats(g, st);
        if (*phantom) return cmd_phantom(g, ph);
        if (*info) return cmd_info(g, info_input);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_usage_error(e.code()) ? exit_usage : exit_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_usage;
}
