#pragma once

#include <array>
#include <vector>

#include "fsochan/errors.hpp"

namespace fsochan {

enum class EveModel { line_of_sight, full };
const char* to_string(EveModel m);

// GMCS CV-QKD parameters. Variances in shot-noise units.
struct KeyRateParams {
    double modulation_variance = 299.0;  // V_A
    double reconciliation = 0.98;        // beta
    double excess_noise = 0.003;         // xi, channel-input referred
    double detector_efficiency = 0.8;    // eta
    double electronic_noise = 0.0;       // v_el
    double eve_transmittance = 0.01;     // T_E
    double clock_rate = 2e6;             // Hz
    bool include_coupling = true;        // T = T_total (true) or T_total/eta_T
    EveModel eve = EveModel::line_of_sight;

    void validate() const;  // throws DomainError
};

// Eigenvalues outside the physical range.
struct PhysicalityError : NumericalError {
    using NumericalError::NumericalError;
};

double entropy_g(double x);

double mutual_information(double T, const KeyRateParams& p);

struct Holevo {
    double chi = 0.0;
    std::array<double, 5> lambda{1, 1, 1, 1, 1};
};
// Eve's Holevo information for the line-of-sight model (or the full
// collective attack when p.eve == full, which sets T_E = 1 - T).
Holevo holevo_los(double T, const KeyRateParams& p);

struct KeyRate {
    double rate = 0.0;  // bits/use, clamped at 0
    double mutual_information = 0.0;
    double holevo = 0.0;
    bool clamped = false;
    bool zero_transmittance = false;
};
KeyRate key_rate(double T, const KeyRateParams& p);

struct PassKey {
    double bits = 0.0;
    double mean_rate = 0.0;  // bits/use
    double clamped_fraction = 0.0;
};
// Sum of K(T_k) * clock_rate * dt; coupling is eta_T used when
// include_coupling is false.
PassKey key_bits_per_pass(const std::vector<double>& T_total, double dt, double coupling,
                          const KeyRateParams& p);

struct ModulationOptimum {
    bool found = false;
    double modulation_variance = 0.0;
    double mean_rate = 0.0;
};
ModulationOptimum optimize_modulation(const std::vector<double>& T_profile, const KeyRateParams& p);

// Deterministic pairwise summation.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace fsochan
