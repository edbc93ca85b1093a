#pragma once

#include <optional>

namespace fsochan {

// Transmitter/receiver optics for one wavelength. SI units, angles in rad.
struct OpticalSystem {
    double wavelength = 1550e-9;
    double tx_aperture = 0.08;
    double beam_waist = 0.0;          // 0 -> tx_aperture/2
    double rx_aperture = 0.6;         // outer diameter
    double obstruction_ratio = 0.3;   // inner/outer diameter
    double pointing_error = 4e-6;
    // Extinction: alpha0 = ref * (lambda/ref_wavelength)^-exponent unless overridden.
    double extinction_ref = 0.7;
    double extinction_ref_wavelength = 550e-9;
    double extinction_exponent = 1.3;
    std::optional<double> extinction;
    double coupling = 0.4;            // eta_T
    std::optional<double> scintillation_std_db;  // pins the dB std-dev

    double waist() const { return beam_waist > 0 ? beam_waist : tx_aperture / 2; }
    double alpha0() const;
    void validate() const;  // throws DomainError
};

}  // namespace fsochan
