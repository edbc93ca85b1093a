#include "fsochan/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "fsochan/errors.hpp"
#include "fsochan/phasescreen.hpp"
#include "fsochan/zernike.hpp"

namespace fsochan {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string nm_tag(double wavelength) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::round(wavelength * 1e10) / 10.0);
    return buf;
}

double round9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

std::string provenance(const Scenario& sc) {
    return std::string("tool=fsochan ") + kToolVersion + ", scenario_hash=" + scenario_hash(sc) +
           ", seed=" + std::to_string(sc.seed);
}

SeriesOptions series_options(const Scenario& sc) {
    SeriesOptions o;
    o.sample_rate = sc.sampling.sample_rate;
    o.device_faithful = sc.sampling.device_faithful;
    o.voa_rate = sc.limits.voa_rate;
    o.pointing_law = sc.sampling.pointing_law;
    return o;
}

std::vector<double> totals(const LossTimeSeries& s) {
    std::vector<double> v;
    v.reserve(s.samples.size());
    for (const auto& x : s.samples) v.push_back(x.T_total);
    return v;
}

std::optional<FitResult> try_fit(const std::vector<double>& x, Family f) {
    if (x.size() < 100) return std::nullopt;
    return fit_distribution(x, f);
}

json fit_json(const std::optional<FitResult>& f) {
    if (!f) return nullptr;
    json j;
    j["family"] = to_string(f->family);
    j["n"] = f->n;
    j["degenerate"] = f->degenerate;
    if (f->family == Family::weibull) {
        j["shape"] = round9(f->p1);
        j["scale"] = round9(f->p2);
    } else {
        j["mu"] = round9(f->p1);
        j["sigma"] = round9(f->p2);
    }
    j["ks_statistic"] = round9(f->ks_statistic);
    j["p_value"] = round9(f->p_value);
    return j;
}

void write_file(const fs::path& p, const std::string& content, std::vector<std::string>& written) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + p.string());
    os << content;
    written.push_back(p.filename().string());
}

template <class F>
std::string to_text(F&& f) {
    std::ostringstream os;
    f(os);
    return os.str();
}

DevicePlan build_plan(const Scenario& sc, const OpticalSystem& optics, const LossTimeSeries& series) {
    DevicePlan plan;
    plan.scenario_hash = scenario_hash(sc);
    plan.seed = sc.seed;
    plan.voa = compile_voa(series, sc.limits);
    std::vector<DisplacementSample> disp;
    disp.reserve(series.samples.size());
    for (const auto& x : series.samples) disp.push_back({x.t, x.dx, x.dy});
    plan.fsm = compile_fsm(disp, sc.pass.pass_duration, sc.limits);

    const std::size_t n = tick_count(sc.pass.pass_duration, sc.screens.rate);
    std::vector<double> times(n);
    for (std::size_t i = 0; i < n; ++i) times[i] = static_cast<double>(i) / sc.screens.rate;
    PassScreenOptions so;
    so.N = sc.screens.N;
    so.aperture_pixels = sc.screens.aperture_pixels;
    so.low_order = sc.screens.low_order;
    so.subharmonic_levels = sc.screens.subharmonic_levels;
    PhaseScreen current;
    plan.dm = compile_dm(
        times,
        [&](std::size_t i) -> const PhaseScreen& {
            so.index = i;
            current = screen_for_pass_point(path_sample(sc.pass, times[i]), sc.profile, optics, sc.direction,
                                            sc.seed, sc.pass, so);
            return current;
        },
        sc.limits);
    return plan;
}

}  // namespace

void apply_overrides(Scenario& sc, const Overrides& o) {
    if (o.seed) sc.seed = *o.seed;
    if (o.out) sc.output_dir = *o.out;
    if (o.device_faithful) sc.sampling.device_faithful = true;
    if (o.direction) sc.direction = *o.direction;
    if (o.wavelength_nm) {
        std::vector<OpticalSystem> keep;
        for (const auto& x : sc.optics)
            if (std::abs(x.wavelength * 1e9 - *o.wavelength_nm) < 0.05) keep.push_back(x);
        if (keep.empty()) throw ConfigError("--wavelength: " + nm_tag(*o.wavelength_nm * 1e-9) + " nm is not configured");
        sc.optics = keep;
    }
}

std::vector<double> pointing_loss_db(const LossTimeSeries& s) {
    std::vector<double> v;
    for (const auto& x : s.samples) {
        const double l = loss_db(x.T_point);
        if (l > 0) v.push_back(l);
    }
    return v;
}

std::vector<double> scintillation_factors(const LossTimeSeries& s) {
    std::vector<double> v;
    for (const auto& x : s.samples) v.push_back(x.T_scint);
    return v;
}

FitResult fit_distributions(const std::vector<double>& samples, Family family) {
    return fit_distribution(samples, family);
}

WavelengthRun run_wavelength(const Scenario& sc, const OpticalSystem& optics, const RunParts& parts) {
    WavelengthRun r;
    r.optics = optics;
    r.series = simulate_losses(sc.pass, sc.profile, optics, sc.direction, sc.seed, series_options(sc));
    const auto T = totals(r.series);

    std::vector<double> db(T.size());
    for (std::size_t i = 0; i < T.size(); ++i) db[i] = loss_db(T[i]);
    r.mean_loss_db = sample_mean(db);
    r.loss_std_db = sample_stddev(db);

    KeyRateParams kp = sc.keyrate;
    if (sc.optimize_modulation) {
        std::vector<double> Tk = T;
        if (!kp.include_coupling)
            for (auto& t : Tk) t = std::min(t / optics.coupling, 1.0);
        const auto opt = optimize_modulation(Tk, kp);
        if (opt.found) kp.modulation_variance = opt.modulation_variance;
    }
    r.modulation_variance = kp.modulation_variance;
    r.key = key_bits_per_pass(T, r.series.time_step, optics.coupling, kp);

    if (parts.fits) {
        r.pointing_fit = try_fit(pointing_loss_db(r.series), Family::weibull);
        r.scintillation_fit = try_fit(scintillation_factors(r.series), Family::lognormal);
    }
    if (parts.plan) r.plan = build_plan(sc, optics, r.series);
    return r;
}

std::vector<WavelengthRun> run_pass(const Scenario& sc, const RunParts& parts) {
    std::vector<std::future<WavelengthRun>> jobs;
    for (const auto& o : sc.optics)
        jobs.push_back(std::async(std::launch::async, [&sc, o, parts] { return run_wavelength(sc, o, parts); }));
    std::vector<WavelengthRun> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

std::optional<Subcommand> parse_subcommand(const std::string& n) {
    if (n == "simulate-pass") return Subcommand::simulate_pass;
    if (n == "gen-screens") return Subcommand::gen_screens;
    if (n == "keyrate") return Subcommand::keyrate;
    if (n == "device-plan") return Subcommand::device_plan;
    if (n == "fit-dist") return Subcommand::fit_dist;
    if (n == "quantization-report") return Subcommand::quantization_report;
    return std::nullopt;
}

std::string metadata_json(const Scenario& sc, const std::string& command) {
    json j;
    j["tool"] = "fsochan";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["config_hash"] = scenario_hash(sc);
    j["seed"] = sc.seed;
    j["direction"] = to_string(sc.direction);
    j["pass_mode"] = to_string(sc.pass.mode);
    j["screen_low_order"] = to_string(sc.screens.low_order);
    j["device_faithful"] = sc.sampling.device_faithful;
    j["eve_model"] = to_string(sc.keyrate.eve);
    j["assumed_defaults"] = sc.defaulted;
    j["scenario"] = json::parse(serialize_scenario(sc));
    return j.dump(2) + "\n";
}

namespace {

json key_report(const Scenario& sc, const std::vector<WavelengthRun>& runs) {
    json rows = json::array();
    for (const auto& r : runs) {
        rows.push_back({{"wavelength", round9(r.optics.wavelength)},
                        {"mean_loss_dB", round9(r.mean_loss_db)},
                        {"bits_per_pass", round9(r.key.bits)},
                        {"V_A_used", round9(r.modulation_variance)},
                        {"clamped_fraction", round9(r.key.clamped_fraction)}});
    }
    json j;
    j["metadata"] = {{"tool", "fsochan"}, {"version", kToolVersion}, {"config_hash", scenario_hash(sc)},
                     {"seed", sc.seed}};
    j["key_rate"] = rows;
    return j;
}

}  // namespace

std::vector<std::string> execute(Subcommand cmd, const Scenario& sc) {
    const fs::path dir(sc.output_dir);
    fs::create_directories(dir);
    std::vector<std::string> written;
    const std::string prov = provenance(sc);
    const int bins = sc.sampling.histogram_bins;

    switch (cmd) {
    case Subcommand::simulate_pass: {
        const auto runs = run_pass(sc, {true, false});
        for (const auto& r : runs) {
            const std::string tag = nm_tag(r.optics.wavelength);
            write_file(dir / ("loss_" + tag + "nm.csv"), to_text([&](std::ostream& os) { write_loss_csv(os, r.series, prov); }), written);
            std::vector<double> total, voa, point, scint;
            for (const auto& x : r.series.samples) {
                total.push_back(loss_db(x.T_total));
                voa.push_back(loss_db(x.T_atm * x.T_geo));
                point.push_back(loss_db(x.T_point));
                scint.push_back(loss_db(x.T_scint));
            }
            const std::pair<const char*, const std::vector<double>*> hs[] = {
                {"total", &total}, {"voa", &voa}, {"pointing", &point}, {"scintillation", &scint}};
            for (const auto& [name, v] : hs)
                write_file(dir / ("hist_" + std::string(name) + "_" + tag + "nm.csv"),
                           to_text([&](std::ostream& os) { write_histogram_csv(os, histogram(*v, bins), std::string(name) + ", " + prov); }),
                           written);
        }
        write_file(dir / "keyrate.json", key_report(sc, runs).dump(2) + "\n", written);
        json fits = json::object();
        for (const auto& r : runs)
            fits[nm_tag(r.optics.wavelength)] = {{"pointing", fit_json(r.pointing_fit)},
                                                 {"scintillation", fit_json(r.scintillation_fit)}};
        write_file(dir / "fits.json", fits.dump(2) + "\n", written);
        break;
    }
    case Subcommand::keyrate: {
        const auto runs = run_pass(sc, {false, false});
        write_file(dir / "keyrate.json", key_report(sc, runs).dump(2) + "\n", written);
        break;
    }
    case Subcommand::fit_dist: {
        const auto runs = run_pass(sc, {true, false});
        json fits = json::object();
        for (const auto& r : runs)
            fits[nm_tag(r.optics.wavelength)] = {{"pointing", fit_json(r.pointing_fit)},
                                                 {"scintillation", fit_json(r.scintillation_fit)}};
        json j;
        j["metadata"] = {{"config_hash", scenario_hash(sc)}, {"seed", sc.seed}};
        j["fits"] = fits;
        write_file(dir / "fits.json", j.dump(2) + "\n", written);
        break;
    }
    case Subcommand::device_plan: {
        const auto runs = run_pass(sc, {false, true});
        for (const auto& r : runs) {
            const std::string tag = nm_tag(r.optics.wavelength);
            const auto& p = *r.plan;
            write_file(dir / ("voa_" + tag + "nm.csv"), to_text([&](std::ostream& os) { write_voa_csv(os, p.voa, prov); }), written);
            write_file(dir / ("fsm_" + tag + "nm.csv"), to_text([&](std::ostream& os) { write_fsm_csv(os, p.fsm, prov); }), written);
            write_file(dir / ("dm_" + tag + "nm.csv"), to_text([&](std::ostream& os) { write_dm_csv(os, p.dm, prov); }), written);
            json clips = json::array();
            for (const auto* v : {&p.voa.clips, &p.fsm.clips})
                for (const auto& c : *v)
                    clips.push_back({{"actuator", c.actuator}, {"t", round9(c.t)}, {"demanded", round9(c.demanded)}, {"applied", round9(c.applied)}});
            write_file(dir / ("clips_" + tag + "nm.json"), clips.dump(2) + "\n", written);
        }
        break;
    }
    case Subcommand::gen_screens: {
        for (const auto& o : sc.optics) {
            const std::string tag = nm_tag(o.wavelength);
            PassScreenOptions so;
            so.N = sc.screens.N;
            so.aperture_pixels = sc.screens.aperture_pixels;
            so.low_order = sc.screens.low_order;
            so.subharmonic_levels = sc.screens.subharmonic_levels;
            std::vector<std::pair<double, ZernikeVector>> rows;
            const int n = sc.screens.count;
            for (int i = 0; i < n; ++i) {
                const double t = n == 1 ? sc.pass.pass_duration / 2 : sc.pass.pass_duration * i / (n - 1);
                so.index = static_cast<std::uint64_t>(i);
                const auto s = screen_for_pass_point(path_sample(sc.pass, t), sc.profile, o, sc.direction, sc.seed, sc.pass, so);
                char name[64];
                std::snprintf(name, sizeof name, "screen_%snm_%03d", tag.c_str(), i);
                write_file(dir / (std::string(name) + ".bin"), to_text([&](std::ostream& os) { write_screen_binary(os, s); }), written);
                if (sc.screens.text)
                    write_file(dir / (std::string(name) + ".txt"), to_text([&](std::ostream& os) { write_screen_text(os, s); }), written);
                rows.emplace_back(t, decompose(s).v);
            }
            write_file(dir / ("zernike_" + tag + "nm.csv"),
                       to_text([&](std::ostream& os) { write_zernike_csv(os, rows, prov); }), written);
        }
        break;
    }
    case Subcommand::quantization_report: {
        for (const auto& o : sc.optics) {
            const std::string tag = nm_tag(o.wavelength);
            auto voa_loss = [&](double t) {
                const auto s = path_sample(sc.pass, t);
                const double I0 = path_integral(s, sc.profile, sc.direction, sc.pass);
                const double w = effective_beam_width(s, o, fried_parameter(I0, o.wavelength)).omega_st;
                return loss_db(atmospheric_transmittance(s, o.alpha0(), sc.pass) *
                               geometric_transmittance(w, o.rx_aperture, o.obstruction_ratio, 0.0));
            };
            const auto rep = quantization_report(sc.pass, sc.limits, voa_loss);
            write_file(dir / ("quantization_" + tag + "nm.csv"),
                       to_text([&](std::ostream& os) { write_quantization_csv(os, rep, prov); }), written);
        }
        break;
    }
    }
    const char* names[] = {"simulate-pass", "gen-screens", "keyrate", "device-plan", "fit-dist", "quantization-report"};
    write_file(dir / "metadata.json", metadata_json(sc, names[static_cast<int>(cmd)]), written);
    return written;
}

}  // namespace fsochan
