#include "fsochan/turbulence.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fsochan/errors.hpp"
#include "fsochan/quadrature.hpp"

namespace fsochan {

namespace {

constexpr double kTol = 1e-4;

double wavenumber(double wavelength) { return 2.0 * std::numbers::pi / wavelength; }

void check_heights(const TurbulenceProfile& prof, const OrbitPass& pass) {
    if (std::abs(prof.instrument_height - pass.station_height) > 1e-9)
        throw DomainError("turbulence: profile.instrument_height differs from pass.station_height");
}

// Integral over distance u from the ground terminal, with break points near the
// ground where the surface term varies on the scale of h0.
double ground_integral(const std::function<double(double)>& f, double z, double h0) {
    return integrate(f, 0.0, z, kTol, log_breaks(std::max(h0, 0.1), z, 10.0)).value;
}

}  // namespace

const char* to_string(Direction d) { return d == Direction::uplink ? "uplink" : "downlink"; }

void TurbulenceProfile::validate() const {
    std::ostringstream err;
    if (!(wind_speed > 0)) err << "turbulence.wind_speed must be > 0\n";
    if (!(ground_cn2 >= 1e-17 && ground_cn2 <= 1e-10)) err << "turbulence.ground_cn2 must be in [1e-17, 1e-10]\n";
    if (!(instrument_height > 0)) err << "turbulence.instrument_height must be > 0\n";
    if (!(background > 0)) err << "turbulence.background must be > 0\n";
    if (!(power_law >= 0)) err << "turbulence.power_law must be >= 0\n";
    if (!(inner_scale > 0)) err << "turbulence.inner_scale must be > 0\n";
    if (!(outer_scale > 0)) err << "turbulence.outer_scale must be > 0\n";
    if (!(inner_scale < outer_scale)) err << "turbulence.inner_scale must be < outer_scale\n";
    if (!err.str().empty()) throw DomainError(err.str());
}

double cn2_at_altitude(double h, const TurbulenceProfile& p) {
    if (!(h >= p.instrument_height * (1.0 - 1e-12)))
        throw DomainError("cn2_at_altitude: h below instrument height");
    const double v = p.wind_speed / 27.0;
    const double wind = 0.00594 * v * v * std::pow(1e-5 * h, 10.0) * std::exp(-h / 1000.0);
    const double bg = 2.7e-16 * std::exp(-h / 1500.0);
    const double surface = p.ground_cn2 * std::pow(p.instrument_height / h, p.power_law);
    return p.background * (wind + bg + surface);
}

double path_integral(const PathSample& s, const std::function<double(double)>& cn2, Direction dir,
                     const OrbitPass& pass) {
    const double z = s.slant_range;
    // u is the distance from the ground terminal. Uplink transmits from the
    // ground (x = u); downlink transmits from the satellite (x = z - u).
    auto f = [&](double u) {
        const double w = dir == Direction::uplink ? 1.0 - u / z : u / z;
        const double h = altitude_along_path(std::min(u, z), s.zenith, pass);
        return std::pow(std::max(w, 0.0), 5.0 / 3.0) * cn2(h);
    };
    return ground_integral(f, z, pass.station_height);
}

double path_integral(const PathSample& s, const TurbulenceProfile& p, Direction dir,
                     const OrbitPass& pass) {
    check_heights(p, pass);
    return path_integral(s, [&](double h) { return cn2_at_altitude(std::max(h, p.instrument_height), p); },
                         dir, pass);
}

double fried_parameter(double I0, double wavelength) {
    if (!(wavelength > 0)) throw DomainError("fried_parameter: wavelength must be > 0");
    if (!(I0 >= 0)) throw DomainError("fried_parameter: I0 must be >= 0");
    if (I0 == 0) return std::numeric_limits<double>::infinity();
    const double k = wavenumber(wavelength);
    return std::pow(0.423 * k * k * I0, -3.0 / 5.0);
}

double beam_wander_variance(double wavelength, double z, double w0, double r0) {
    if (std::isinf(r0)) return 0.0;
    return 0.1337 * wavelength * wavelength * z * z / (std::cbrt(w0) * std::pow(r0, 5.0 / 3.0));
}

double rytov_variance(const PathSample& s, const TurbulenceProfile& p, double wavelength,
                      Direction dir, const OrbitPass& pass) {
    check_heights(p, pass);
    const double z = s.slant_range;
    const double k = wavenumber(wavelength);
    auto f = [&](double u) {
        // plane wave at a ground receiver; spherical wave from a ground transmitter
        const double w = dir == Direction::downlink ? u : u * std::max(1.0 - u / z, 0.0);
        const double h = altitude_along_path(std::min(u, z), s.zenith, pass);
        return cn2_at_altitude(std::max(h, p.instrument_height), p) * std::pow(w, 5.0 / 6.0);
    };
    return 2.25 * std::pow(k, 7.0 / 6.0) * ground_integral(f, z, pass.station_height);
}

double aperture_averaging(double wavelength, double D, double L) {
    const double k = wavenumber(wavelength);
    return 1.0 / (1.0 + 1.07 * std::pow(k * D * D / (4.0 * L), 7.0 / 6.0));
}

namespace {

// Cn2-weighted receiver distance that makes the large-aperture limit of the
// averaged variance (proportional to D^-7/3 times the integral of Cn2 L^2) exact.
double effective_distance(const PathSample& s, const TurbulenceProfile& p, Direction dir,
                          const OrbitPass& pass) {
    const double z = s.slant_range;
    auto weighted = [&](double power) {
        auto f = [&](double u) {
            const double r = dir == Direction::downlink ? u : z - u;
            const double h = altitude_along_path(std::min(u, z), s.zenith, pass);
            return cn2_at_altitude(std::max(h, p.instrument_height), p) * std::pow(std::max(r, 0.0), power);
        };
        return ground_integral(f, z, pass.station_height);
    };
    return std::pow(weighted(2.0) / weighted(5.0 / 6.0), 6.0 / 7.0);
}

}  // namespace

double scintillation_loss_variance(const PathSample& s, const TurbulenceProfile& p,
                                   const OpticalSystem& optics, Direction dir,
                                   const OrbitPass& pass) {
    if (optics.scintillation_std_db) return *optics.scintillation_std_db * *optics.scintillation_std_db;
    const double sr2 = rytov_variance(s, p, optics.wavelength, dir, pass);
    const double A = aperture_averaging(optics.wavelength, optics.rx_aperture,
                                        effective_distance(s, p, dir, pass));
    const double ln_var = std::log1p(A * sr2);  // variance of ln I
    const double db = 10.0 / std::numbers::ln10;
    return db * db * ln_var;
}

PathTurbulence path_turbulence(const PathSample& s, const TurbulenceProfile& p,
                               const OpticalSystem& optics, Direction dir, const OrbitPass& pass) {
    PathTurbulence out;
    out.direction = dir;
    out.integral = path_integral(s, p, dir, pass);
    out.fried_r0 = fried_parameter(out.integral, optics.wavelength);
    out.rytov_variance = rytov_variance(s, p, optics.wavelength, dir, pass);
    out.wander_variance = beam_wander_variance(optics.wavelength, s.slant_range, optics.waist(), out.fried_r0);
    return out;
}

}  // namespace fsochan
