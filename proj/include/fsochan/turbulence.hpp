#pragma once

#include <functional>

#include "fsochan/geometry.hpp"
#include "fsochan/optics.hpp"

namespace fsochan {

enum class Direction { uplink, downlink };
const char* to_string(Direction d);

// HAP Cn2 profile parameters.
struct TurbulenceProfile {
    double wind_speed = 21.0;       // v_w, m/s
    double ground_cn2 = 1e-12;      // C_N^2(h0), m^-2/3
    double instrument_height = 1.0; // h0, m
    double background = 1.0;        // M
    double power_law = 4.0 / 3.0;   // p
    double inner_scale = 0.01;      // l0, m
    double outer_scale = 25.0;      // L0, m

    void validate() const;  // throws DomainError
};

struct PathTurbulence {
    double integral = 0.0;  // I0, m^1/3
    Direction direction = Direction::downlink;
    double fried_r0 = 0.0;
    double rytov_variance = 0.0;
    double wander_variance = 0.0;  // sigma_TB^2, m^2
};

double cn2_at_altitude(double h, const TurbulenceProfile& profile);

// I0 with the (1 - x/z)^(5/3) weight, x measured from the transmitter.
double path_integral(const PathSample& s, const TurbulenceProfile& profile, Direction dir,
                     const OrbitPass& pass);
// Same with an arbitrary Cn2(h).
double path_integral(const PathSample& s, const std::function<double(double)>& cn2,
                     Direction dir, const OrbitPass& pass);

double fried_parameter(double I0, double wavelength);

double beam_wander_variance(double wavelength, double z, double w0, double r0);

// Weak-fluctuation Rytov variance of log-amplitude-squared (sigma_R^2).
double rytov_variance(const PathSample& s, const TurbulenceProfile& profile, double wavelength,
                      Direction dir, const OrbitPass& pass);

// Aperture-averaging factor for a receiver of diameter D at effective distance L.
double aperture_averaging(double wavelength, double D, double L);

// dB^2 variance of the scintillation loss (pinned value squared if optics sets one).
double scintillation_loss_variance(const PathSample& s, const TurbulenceProfile& profile,
                                   const OpticalSystem& optics, Direction dir,
                                   const OrbitPass& pass);

PathTurbulence path_turbulence(const PathSample& s, const TurbulenceProfile& profile,
                               const OpticalSystem& optics, Direction dir, const OrbitPass& pass);

}  // namespace fsochan
