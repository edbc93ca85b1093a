#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsochan/deviceplan.hpp"
#include "fsochan/geometry.hpp"
#include "fsochan/keyrate.hpp"
#include "fsochan/losschannels.hpp"
#include "fsochan/optics.hpp"
#include "fsochan/phasescreen.hpp"
#include "fsochan/turbulence.hpp"

namespace fsochan {

inline constexpr const char* kToolVersion = "0.1.0";

struct SamplingConfig {
    double sample_rate = 100.0;  // Hz
    bool device_faithful = false;
    PointingLaw pointing_law = PointingLaw::gaussian;
    int histogram_bins = 60;
};

struct ScreenConfig {
    int N = 256;
    int aperture_pixels = 64;
    LowOrder low_order = LowOrder::none;
    int subharmonic_levels = 7;
    double rate = 10.0;  // screens per second for the DM plan
    int count = 8;       // gen-screens: screens per wavelength
    bool text = false;   // gen-screens: also write text matrices
};

struct Scenario {
    OrbitPass pass;
    TurbulenceProfile profile;
    std::vector<OpticalSystem> optics;
    KeyRateParams keyrate;
    bool optimize_modulation = false;
    ActuatorLimits limits;
    SamplingConfig sampling;
    ScreenConfig screens;
    std::uint64_t seed = 1;
    Direction direction = Direction::downlink;
    std::string output_dir = "out";

    // Config paths that were filled from defaults, for output metadata.
    std::vector<std::string> defaulted;
};

// Parses JSON text. Unknown keys and invariant violations raise ConfigError
// with one "path: message" line per problem.
Scenario parse_scenario(const std::string& json_text);
std::string serialize_scenario(const Scenario& s);  // canonical JSON
void validate_scenario(const Scenario& s);          // throws ConfigError

// FNV-1a 64 of the canonical serialisation, hex.
std::string scenario_hash(const Scenario& s);

}  // namespace fsochan
