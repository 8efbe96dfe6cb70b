// Writes a small set of raw iris-on-black frames for trying out the
// preprocess -> encode -> validate chain.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "irisval/png_io.hpp"
#include "irisval/synth.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv)
{
    CLI::App app{"Generate synthetic raw iris frames"};
    fs::path out;
    int count = 10;
    int size = 300;
    double pupil = 60.0;
    double limbic = 125.0;
    std::uint64_t seed = 1;
    int wedged = 1;
    app.add_option("out_dir", out)->required();
    app.add_option("--count", count, "Frames to write")->capture_default_str();
    app.add_option("--size", size)->capture_default_str();
    app.add_option("--pupil", pupil)->capture_default_str();
    app.add_option("--limbic", limbic)->capture_default_str();
    app.add_option("--seed", seed, "Seed of the first frame")->capture_default_str();
    app.add_option("--wedged", wedged, "Trailing frames with a 100 degree gap")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    if (count < 1 || wedged < 0 || wedged > count) {
        std::cerr << "error: need count >= 1 and 0 <= wedged <= count\n";
        return 2;
    }
    try {
        fs::create_directories(out);
        for (int i = 0; i < count; ++i) {
            irisval::SyntheticIrisOptions opts;
            opts.size = size;
            opts.pupil_radius = pupil;
            opts.limbic_radius = limbic;
            opts.specular = true;
            if (i >= count - wedged) {
                // Blanks the rays at 0, 30, 60 and 90 degrees.
                opts.wedge_from_deg = -5.0;
                opts.wedge_to_deg = 95.0;
            }
            char name[32];
            std::snprintf(name, sizeof name, "iris_%03d.png", i);
            irisval::write_png(out / name, irisval::synthetic_iris(seed + static_cast<std::uint64_t>(i), opts));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    std::cout << "wrote " << count << " frames to " << out.string() << '\n';
    return 0;
}
