#pragma once

#include <array>
#include <iosfwd>
#include <utility>
#include <vector>

#include "fsochan/phasescreen.hpp"

namespace fsochan {

inline constexpr int kModes = 15;

enum class ZernikeUnits { radians, metres };
const char* to_string(ZernikeUnits u);

// Noll-ordered coefficients, piston = index 0 (mode 1).
struct ZernikeVector {
    std::array<double, kModes> c{};
    ZernikeUnits units = ZernikeUnits::radians;
    double aperture_radius = 0.0;  // m

    double& operator[](int j_noll) { return c.at(j_noll - 1); }
    double operator[](int j_noll) const { return c.at(j_noll - 1); }
};

// (n, m) for a Noll index; m < 0 marks the sine term.
std::pair<int, int> noll_to_nm(int j);

double zernike_radial(int n, int m, double rho);
double zernike_mode(int j, double rho, double psi);

struct Decomposition {
    ZernikeVector v;
    std::vector<double> residual;  // full grid, zero outside the mask
    double residual_rms = 0.0;     // over the mask
    double screen_rms = 0.0;       // over the mask
};

// Least-squares fit of modes 1..15 on the circular mask of diameter
// screen.aperture centred on the grid.
Decomposition decompose(const PhaseScreen& screen);

// Sum of modes on the same grid/mask convention (zero outside the mask).
PhaseScreen synthesize(const ZernikeVector& v, int N, double pixel_scale, double aperture);

// Noll residual variance after J modes, Delta_J * (D/r0)^(5/3).
double noll_residual_variance(int j_max, double D_over_r0);
// Kolmogorov variance of a single mode j >= 2, in units of (D/r0)^(5/3).
double noll_mode_variance(int j);

void write_zernike_csv(std::ostream& os, const std::vector<std::pair<double, ZernikeVector>>& rows,
                       const std::string& header_note);

}  // namespace fsochan
