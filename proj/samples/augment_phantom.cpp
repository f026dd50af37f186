// Augments the built-in head phantom a few times and writes the results.
//
//   sample_augment_phantom [output_dir] [seed]

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "mriaug/mriaug.hpp"

int main(int argc, char** argv) {
    namespace fs = std::filesystem;
    const fs::path out = argc > 1 ? argv[1] : "augment_phantom_out";
    const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 42;
    fs::create_directories(out);

    const mriaug::Phantom ph = mriaug::rasterize(mriaug::brain_phantom_spec({64, 64, 64}));
    const mriaug::Sample sample{ph.image, ph.labels, "phantom"};

    mriaug::AugmentationConfig config;
    config.p_aug = 0.5;
    const mriaug::Pipeline pipeline(config);

    for (std::uint64_t i = 0; i < 4; ++i) {
        const mriaug::Augmented a = pipeline.apply(sample, mriaug::stream_seed(seed, i));
        const std::string stem = "phantom_" + std::to_string(i);
        mriaug::nifti::write_nifti(a.sample.image, out / (stem + ".nii.gz"));
        mriaug::nifti::WriteOptions opt;
        opt.datatype = mriaug::nifti::Datatype::UInt8;
        mriaug::nifti::write_nifti(*a.sample.labels, a.sample.image.affine(), out / (stem + "_labels.nii.gz"), opt);
        std::cout << stem << ":";
        for (const auto& step : a.plan.steps) std::cout << " " << mriaug::to_string(mriaug::transform_of(step));
        std::cout << "  dice(brain)=" << mriaug::dice_coefficient(ph.labels, *a.sample.labels, 2) << "\n";
    }
}
