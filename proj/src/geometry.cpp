#include "fsochan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fsochan/errors.hpp"

namespace fsochan {

namespace {

constexpr double deg = std::numbers::pi / 180.0;

// Station and orbit radii measured from the Earth centre.
double station_radius(const OrbitPass& p) { return p.earth_radius + p.station_height; }
double orbit_radius(const OrbitPass& p) { return p.earth_radius + p.satellite_altitude; }

// Earth-central angle between station and satellite seen at zenith theta.
double central_angle(const OrbitPass& p, double theta) {
    return theta - std::asin(station_radius(p) * std::sin(theta) / orbit_radius(p));
}

double zenith_from_central(const OrbitPass& p, double gamma) {
    const double rs = orbit_radius(p);
    return std::atan2(rs * std::sin(gamma), rs * std::cos(gamma) - station_radius(p));
}

// Fractional pass position in [-1, 1].
double pass_phase(const OrbitPass& p, double t) { return 2.0 * t / p.pass_duration - 1.0; }

struct GreatCircle {
    double beta0;  // cross-track central angle
    double psi_e;  // along-track central angle at the pass edges
};

GreatCircle great_circle(const OrbitPass& p) {
    const double beta0 = central_angle(p, (90.0 - p.max_elevation) * deg);
    const double gamma_e = central_angle(p, p.edge_zenith * deg);
    const double c = std::clamp(std::cos(gamma_e) / std::cos(beta0), -1.0, 1.0);
    return {beta0, std::acos(c)};
}

}  // namespace

const char* to_string(PassMode m) {
    return m == PassMode::great_circle ? "great_circle" : "symmetric_quadratic";
}

void OrbitPass::validate() const {
    std::ostringstream err;
    if (!(satellite_altitude > 0)) err << "pass.satellite_altitude must be > 0\n";
    if (!(pass_duration > 0)) err << "pass.pass_duration must be > 0\n";
    if (!(time_step > 0)) err << "pass.time_step must be > 0\n";
    if (!(max_elevation > 0 && max_elevation <= 90)) err << "pass.max_elevation must be in (0, 90]\n";
    if (!(edge_zenith >= 0 && edge_zenith < 90)) err << "pass.edge_zenith must be in [0, 90)\n";
    if (!(edge_zenith >= 90.0 - max_elevation))
        err << "pass.edge_zenith must be >= 90 - max_elevation\n";
    if (!(earth_radius > 0)) err << "pass.earth_radius must be > 0\n";
    if (!(station_height >= 0 && station_height < satellite_altitude))
        err << "pass.station_height must be in [0, satellite_altitude)\n";
    if (!err.str().empty()) throw DomainError(err.str());
}

double slant_range(double zenith, double altitude, double earth_radius) {
    if (!(zenith >= 0.0 && zenith < std::numbers::pi / 2))
        throw DomainError("slant_range: zenith outside [0, pi/2)");
    if (!(altitude > 0.0)) throw DomainError("slant_range: altitude must be > 0");
    const double r = earth_radius, s = std::sin(zenith), c = std::cos(zenith);
    const double ra = r + altitude;
    // (ra^2 - r^2 s^2) - r^2 c^2 = ra^2 - r^2; rationalised form keeps precision near zenith
    const double root = std::sqrt(ra * ra - r * r * s * s);
    return (altitude * (2.0 * r + altitude)) / (root + r * c);
}

double zenith_at(const OrbitPass& p, double t) {
    const double s = pass_phase(p, t);
    if (p.mode == PassMode::symmetric_quadratic) {
        const double tmin = (90.0 - p.max_elevation) * deg;
        return tmin + (p.edge_zenith * deg - tmin) * s * s;
    }
    const auto gc = great_circle(p);
    const double psi = gc.psi_e * s;
    const double gamma = std::acos(std::clamp(std::cos(psi) * std::cos(gc.beta0), -1.0, 1.0));
    return zenith_from_central(p, gamma);
}

PathSample path_sample(const OrbitPass& p, double t) {
    const double th = zenith_at(p, t);
    return {t, th, slant_range(th, p.satellite_altitude - p.station_height, station_radius(p))};
}

std::vector<PathSample> zenith_profile(const OrbitPass& p) {
    p.validate();
    const auto n = static_cast<std::size_t>(std::ceil(p.pass_duration / p.time_step - 1e-9));
    std::vector<PathSample> out;
    out.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        out.push_back(path_sample(p, std::min(static_cast<double>(k) * p.time_step, p.pass_duration)));
    return out;
}

double altitude_along_path(double x, double zenith, const OrbitPass& p) {
    const double z = slant_range(zenith, p.satellite_altitude - p.station_height, station_radius(p));
    if (!(x >= 0.0 && x <= z * (1.0 + 1e-12)))
        throw DomainError("altitude_along_path: position outside [0, slant_range]");
    if (x >= z) return p.satellite_altitude;
    const double rg = station_radius(p);
    const double r = std::sqrt(rg * rg + x * x + 2.0 * rg * x * std::cos(zenith));
    // r - R_E, written to avoid cancellation for small x
    return p.station_height + (x * x + 2.0 * rg * x * std::cos(zenith)) / (r + rg);
}

std::array<double, 3> line_of_sight(const OrbitPass& p, double t) {
    const double s = pass_phase(p, t);
    if (p.mode == PassMode::symmetric_quadratic) {
        const double th = zenith_at(p, t);
        const double sg = s < 0 ? -1.0 : 1.0;
        return {sg * std::sin(th), 0.0, std::cos(th)};
    }
    const auto gc = great_circle(p);
    const double psi = gc.psi_e * s;
    const double rs = orbit_radius(p);
    std::array<double, 3> v{rs * std::sin(psi), rs * std::sin(gc.beta0) * std::cos(psi),
                            rs * std::cos(gc.beta0) * std::cos(psi) - station_radius(p)};
    const double n = std::hypot(v[0], v[1], v[2]);
    for (auto& c : v) c /= n;
    return v;
}

double angular_separation(const OrbitPass& p, double t1, double t2) {
    const auto a = line_of_sight(p, t1), b = line_of_sight(p, t2);
    const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    const double cx = a[1] * b[2] - a[2] * b[1], cy = a[2] * b[0] - a[0] * b[2],
                 cz = a[0] * b[1] - a[1] * b[0];
    return std::atan2(std::hypot(cx, cy, cz), dot);
}

}  // namespace fsochan
