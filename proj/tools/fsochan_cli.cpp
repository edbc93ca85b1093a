// fsochan command-line front end.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fsochan/errors.hpp"
#include "fsochan/keyrate.hpp"
#include "fsochan/runner.hpp"

using namespace fsochan;

int main(int argc, char** argv) {
    CLI::App app{"Satellite-to-ground optical channel simulator"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::uint64_t seed = 0;
    double wavelength = 0;
    std::string out, direction;
    bool device_faithful = false;

    const char* cmds[][2] = {
        {"simulate-pass", "loss series, histograms, key report and distribution fits"},
        {"gen-screens", "phase screens along the pass and their Zernike vectors"},
        {"keyrate", "secret key bits per pass"},
        {"device-plan", "attenuator, steering-mirror and deformable-mirror schedules"},
        {"fit-dist", "Weibull / lognormal fits of pointing and scintillation samples"},
        {"quantization-report", "attenuator staleness over the pass"}};
    for (const auto& c : cmds) {
        auto* sub = app.add_subcommand(c[0], c[1]);
        sub->add_option("--config", config_path, "scenario JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override scenario seed");
        sub->add_option("--wavelength", wavelength, "only this wavelength (nm)");
        sub->add_option("--out", out, "output directory");
        sub->add_flag("--device-faithful", device_faithful, "quantize attenuator loss at its update rate");
        sub->add_option("--direction", direction, "up or down")->check(CLI::IsMember({"up", "down"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    auto* sub = app.get_subcommands().front();
    try {
        std::ifstream in(config_path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        Scenario sc = parse_scenario(buf.str());

        Overrides ov;
        if (sub->count("--seed")) ov.seed = seed;
        if (sub->count("--wavelength")) ov.wavelength_nm = wavelength;
        if (sub->count("--out")) ov.out = out;
        ov.device_faithful = device_faithful;
        if (!direction.empty()) ov.direction = direction == "up" ? Direction::uplink : Direction::downlink;
        apply_overrides(sc, ov);
        validate_scenario(sc);

        const auto files = execute(*parse_subcommand(sub->get_name()), sc);
        for (const auto& f : files) std::cout << sc.output_dir << "/" << f << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error:\n" << e.what();
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error:\n" << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n" << e.detail << "\n";
        return 3;
    }
}
