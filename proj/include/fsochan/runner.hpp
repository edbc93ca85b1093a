#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fsochan/deviceplan.hpp"
#include "fsochan/keyrate.hpp"
#include "fsochan/losschannels.hpp"
#include "fsochan/scenario.hpp"
#include "fsochan/stats.hpp"

namespace fsochan {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> wavelength_nm;
    std::optional<std::string> out;
    bool device_faithful = false;
    std::optional<Direction> direction;
};
// Applies CLI overrides; unknown wavelength -> ConfigError.
void apply_overrides(Scenario& sc, const Overrides& o);

struct WavelengthRun {
    OpticalSystem optics;
    LossTimeSeries series;
    PassKey key;
    double modulation_variance = 0.0;
    double mean_loss_db = 0.0;
    double loss_std_db = 0.0;
    std::optional<FitResult> pointing_fit;
    std::optional<FitResult> scintillation_fit;
    std::optional<DevicePlan> plan;
};

struct RunParts {
    bool fits = true;
    bool plan = false;
};

WavelengthRun run_wavelength(const Scenario& sc, const OpticalSystem& optics, const RunParts& parts);
// One entry per configured wavelength, in configuration order.
std::vector<WavelengthRun> run_pass(const Scenario& sc, const RunParts& parts = {});

FitResult fit_distributions(const std::vector<double>& samples, Family family);

// Sample extraction used by the fits.
std::vector<double> pointing_loss_db(const LossTimeSeries& s);  // positive entries only
std::vector<double> scintillation_factors(const LossTimeSeries& s);

enum class Subcommand { simulate_pass, gen_screens, keyrate, device_plan, fit_dist, quantization_report };
std::optional<Subcommand> parse_subcommand(const std::string& name);

// Runs a subcommand and writes its files into sc.output_dir. Returns the
// list of files written (relative names).
std::vector<std::string> execute(Subcommand cmd, const Scenario& sc);

std::string metadata_json(const Scenario& sc, const std::string& command);

}  // namespace fsochan
