#pragma once

#include <array>
#include <vector>

namespace fsochan {

inline constexpr double kEarthRadius = 6371.0e3;  // m

enum class PassMode { great_circle, symmetric_quadratic };

// One culminating overpass. Angles in degrees, lengths in metres, time in s.
struct OrbitPass {
    double satellite_altitude = 700e3;
    double pass_duration = 120.0;
    double max_elevation = 90.0;   // deg
    double edge_zenith = 30.0;     // deg, zenith at t=0 and t=duration
    double time_step = 0.5;
    double earth_radius = kEarthRadius;
    double station_height = 1.0;   // h0, height of the ground terminal
    PassMode mode = PassMode::great_circle;

    void validate() const;  // throws DomainError
};

struct PathSample {
    double t = 0.0;
    double zenith = 0.0;       // rad
    double slant_range = 0.0;  // m
};

// z(theta) on a sphere of radius earth_radius; altitude above that sphere.
double slant_range(double zenith, double altitude, double earth_radius);

// Zenith angle (rad) at time t.
double zenith_at(const OrbitPass& pass, double t);

// Sample at time t (slant range measured from the station).
PathSample path_sample(const OrbitPass& pass, double t);

// ceil(duration/time_step)+1 samples; the last one sits at t=duration.
std::vector<PathSample> zenith_profile(const OrbitPass& pass);

// Altitude above the ground sphere at distance x along the station-satellite ray.
double altitude_along_path(double path_position, double zenith, const OrbitPass& pass);

// Unit line-of-sight vector in a station-centred frame (z = local vertical).
std::array<double, 3> line_of_sight(const OrbitPass& pass, double t);

// Angle (rad) between the lines of sight at t1 and t2.
double angular_separation(const OrbitPass& pass, double t1, double t2);

const char* to_string(PassMode m);

}  // namespace fsochan
