// Shows ringing and ghosting on a 1D-like box phantom and prints profiles.
//
//   sample_kspace_artifacts

#include <cstdio>

#include "mriaug/mriaug.hpp"

int main() {
    using namespace mriaug;
    PhantomSpec spec;
    spec.shape = {64, 8, 8};
    spec.background = 0.0;
    spec.structures = {{StructureShape::Box, {31.5, 3.5, 3.5}, {12.0, 4.0, 4.0}, 1.0, 1}};
    const Volume box = rasterize(spec).image;

    const Grid3<double> ringing = ringing_magnitude(box, 64, Axis::X);
    const Volume ghosted = motion_ghosting(box, 4, 0.5, Axis::X);

    std::printf("  x   input  ringing  ghosting\n");
    for (std::size_t x = 0; x < 64; x += 2)
        std::printf("%3zu  %6.3f  %7.3f  %8.3f\n", x, box.data()(x, 4, 4), ringing(x, 4, 4), ghosted.data()(x, 4, 4));
}
