#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fsochan/geometry.hpp"
#include "fsochan/optics.hpp"
#include "fsochan/turbulence.hpp"

namespace fsochan {

// Low-frequency treatment. `none` is the plain finite FFT screen; `jittered`
// replaces the innermost FFT cells and adds subharmonic cells as explicit
// plane waves at randomly jittered frequencies.
enum class LowOrder { none, jittered };
const char* to_string(LowOrder m);

struct PhaseScreen {
    int N = 0;
    double pixel_scale = 0.0;  // m/px
    double r0 = 0.0;
    double L0 = 0.0;
    double l0 = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;   // time index within the seed
    double aperture = 0.0;     // intended circular aperture diameter, m
    LowOrder low_order = LowOrder::none;
    std::vector<double> grid;  // row-major, grid[i*N + j], i along y
    std::vector<std::string> warnings;

    double at(int i, int j) const { return grid[static_cast<std::size_t>(i) * N + j]; }
};

struct ScreenOptions {
    LowOrder low_order = LowOrder::none;
    int subharmonic_levels = 7;
    std::uint64_t index = 0;
    double aperture = 0.0;  // 0 -> N*pixel_scale
};

PhaseScreen generate_screen(double r0, int N, double pixel_scale, double L0, double l0,
                            std::uint64_t seed, const ScreenOptions& opt = {});

// von Karman phase PSD (rad^2 m^2) at spatial frequency f in cycles/m.
double phase_psd(double f, double r0, double L0, double l0);

struct PassScreenOptions {
    int N = 256;
    int aperture_pixels = 64;  // receiver diameter across the grid
    LowOrder low_order = LowOrder::none;
    int subharmonic_levels = 7;
    std::uint64_t index = 0;
};

PhaseScreen screen_for_pass_point(const PathSample& s, const TurbulenceProfile& profile,
                                  const OpticalSystem& optics, Direction dir, std::uint64_t seed,
                                  const OrbitPass& pass, const PassScreenOptions& opt = {});

// Binary: magic "FSOPSCR1", u32 N, f64 pixel_scale, r0, L0, l0, u64 seed, f64 aperture,
// then N*N little-endian f64.
void write_screen_binary(std::ostream& os, const PhaseScreen& s);
PhaseScreen read_screen_binary(std::istream& is);
void write_screen_text(std::ostream& os, const PhaseScreen& s);

}  // namespace fsochan
