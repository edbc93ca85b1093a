#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fsochan/geometry.hpp"
#include "fsochan/optics.hpp"
#include "fsochan/rng.hpp"
#include "fsochan/turbulence.hpp"

namespace fsochan {

inline constexpr double kScaleHeight = 6600.0;  // h_bar, m

// g(theta) = integral of exp(-h(x)/h_bar) along the path, m.
double extinction_path(const PathSample& s, const OrbitPass& pass);
// exp(-(alpha0/h_bar) g(theta)); alpha0 is a zenith-scale optical depth.
double atmospheric_transmittance(const PathSample& s, double alpha0, const OrbitPass& pass);

struct BeamWidth {
    double omega = 0.0;     // diffraction-only width
    double omega_st = 0.0;  // short-term width with turbulence
};
BeamWidth effective_beam_width(double z, const OpticalSystem& optics, double r0);
BeamWidth effective_beam_width(const PathSample& s, const OpticalSystem& optics, double r0);

// Fraction of a Gaussian beam (1/e^2 radius w) collected by an annulus of
// outer diameter a_r and inner diameter obstruction*a_r, beam centre offset by d.
double geometric_transmittance(double w, double a_r, double obstruction, double d);

enum class PointingLaw { gaussian, uniform };
const char* to_string(PointingLaw l);

struct Displacement {
    double x = 0.0, y = 0.0;  // receiver plane, m; deterministic part along x
    double d() const;
};

// a_z * tan(t_err/2)
double pointing_offset(double satellite_altitude, double pointing_error);
// Bound used by the uniform law and the steering-mirror plan.
double displacement_bound(double d_det, double sigma2);

Displacement pointing_displacement(double d_det, double sigma2, Rng& rng,
                                   PointingLaw law = PointingLaw::gaussian);
double pointing_offset_sample(const PathSample& s, const OpticalSystem& optics, double sigma2,
                              Rng& rng, const OrbitPass& pass);

// Mean-normalised lognormal intensity factor with loss_dB std-dev sqrt(variance_db2).
double scintillation_loss_sample(double variance_db2, Rng& rng);

double loss_db(double T);

struct LossSample {
    double t = 0.0;
    double zenith = 0.0;  // rad
    double T_atm = 1.0;
    double T_geo = 1.0;    // d = 0
    double T_point = 1.0;  // T_geo(d)/T_geo(0)
    double T_scint = 1.0;
    double T_total = 1.0;
    double d = 0.0, dx = 0.0, dy = 0.0;
};

// Everything about one pass point that does not need random draws.
struct ChannelState {
    double t = 0.0;
    double zenith = 0.0;
    double slant_range = 0.0;
    double T_atm = 1.0;
    double omega_st = 0.0;
    double T_geo = 1.0;
    double wander_variance = 0.0;
    double scint_variance_db2 = 0.0;
    double d_det = 0.0;
    double r0 = 0.0;
};

ChannelState channel_state(const PathSample& s, const TurbulenceProfile& profile,
                           const OpticalSystem& optics, Direction dir, const OrbitPass& pass);

LossSample draw_loss_sample(const ChannelState& st, const OpticalSystem& optics, Rng& rng,
                            PointingLaw law = PointingLaw::gaussian);

LossSample link_budget_sample(const PathSample& s, const TurbulenceProfile& profile,
                              const OpticalSystem& optics, Direction dir, Rng& rng,
                              const OrbitPass& pass);

struct SeriesOptions {
    double sample_rate = 100.0;  // Hz, random draws
    bool device_faithful = false;
    double voa_rate = 1.8;       // Hz, used when device_faithful
    PointingLaw pointing_law = PointingLaw::gaussian;
};

struct LossTimeSeries {
    double wavelength = 0.0;
    double time_step = 0.0;  // spacing of samples
    std::vector<LossSample> samples;
    std::vector<ChannelState> nodes;  // geometry grid
};

LossTimeSeries simulate_losses(const OrbitPass& pass, const TurbulenceProfile& profile,
                               const OpticalSystem& optics, Direction dir, std::uint64_t seed,
                               const SeriesOptions& opt = {});

struct HistogramBin {
    double left = 0.0, right = 0.0, probability = 0.0;
};
std::vector<HistogramBin> histogram(const std::vector<double>& values, int bins);

void write_loss_csv(std::ostream& os, const LossTimeSeries& s, const std::string& header_note);
void write_histogram_csv(std::ostream& os, const std::vector<HistogramBin>& h, const std::string& header_note);

}  // namespace fsochan
