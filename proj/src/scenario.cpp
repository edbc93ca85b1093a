#include "fsochan/scenario.hpp"

#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fsochan/errors.hpp"

namespace fsochan {

using nlohmann::json;

namespace {

struct Problems {
    std::vector<std::string> errors;
    std::vector<std::string> defaulted;
};

class Section {
public:
    Section(const json* j, std::string path, Problems& pr) : j_(j), path_(std::move(path)), pr_(pr) {
        if (j_ && !j_->is_object()) {
            pr_.errors.push_back(path_ + ": expected an object");
            j_ = nullptr;
        }
    }
    ~Section() {
        if (!j_) return;
        for (const auto& [k, v] : j_->items())
            if (!used_.count(k)) pr_.errors.push_back(at(k) + ": unknown key");
    }
    Section(const Section&) = delete;
    Section& operator=(const Section&) = delete;

    std::string at(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    const json* child(const char* k) {
        used_.insert(k);
        if (!j_ || !j_->contains(k)) return nullptr;
        return &(*j_)[k];
    }

    template <class T>
    void get(const char* k, T& out) {
        const json* v = child(k);
        if (!v) {
            pr_.defaulted.push_back(at(k));
            return;
        }
        bool ok = true;
        if constexpr (std::is_same_v<T, double>) ok = v->is_number();
        else if constexpr (std::is_same_v<T, bool>) ok = v->is_boolean();
        else if constexpr (std::is_integral_v<T>) ok = v->is_number_integer() && (std::is_signed_v<T> || v->is_number_unsigned());
        else if constexpr (std::is_same_v<T, std::string>) ok = v->is_string();
        if (!ok) {
            pr_.errors.push_back(at(k) + ": wrong type");
            return;
        }
        out = v->get<T>();
    }

    void get(const char* k, std::optional<double>& out) {
        const json* v = child(k);
        if (!v || v->is_null()) return;
        if (!v->is_number()) {
            pr_.errors.push_back(at(k) + ": expected a number or null");
            return;
        }
        out = v->get<double>();
    }

    template <class E>
    void get_enum(const char* k, E& out, std::initializer_list<std::pair<const char*, E>> names) {
        const json* v = child(k);
        if (!v) {
            pr_.defaulted.push_back(at(k));
            return;
        }
        if (v->is_string())
            for (const auto& [n, e] : names)
                if (v->get<std::string>() == n) {
                    out = e;
                    return;
                }
        std::string allowed;
        for (const auto& [n, e] : names) allowed += std::string(allowed.empty() ? "" : ", ") + n;
        pr_.errors.push_back(at(k) + ": expected one of " + allowed);
    }

private:
    const json* j_;
    std::string path_;
    Problems& pr_;
    std::set<std::string> used_;
};

void read_optics(Section& s, OpticalSystem& o) {
    double nm = o.wavelength * 1e9;
    s.get("wavelength_nm", nm);
    o.wavelength = nm * 1e-9;
    s.get("tx_aperture", o.tx_aperture);
    s.get("beam_waist", o.beam_waist);
    s.get("rx_aperture", o.rx_aperture);
    s.get("obstruction_ratio", o.obstruction_ratio);
    double perr = o.pointing_error * 1e6;
    s.get("pointing_error_urad", perr);
    o.pointing_error = perr * 1e-6;
    s.get("extinction_ref", o.extinction_ref);
    double ref_nm = o.extinction_ref_wavelength * 1e9;
    s.get("extinction_ref_wavelength_nm", ref_nm);
    o.extinction_ref_wavelength = ref_nm * 1e-9;
    s.get("extinction_exponent", o.extinction_exponent);
    s.get("extinction", o.extinction);
    s.get("coupling", o.coupling);
    s.get("scintillation_std_db", o.scintillation_std_db);
}

// scaled units print without binary noise (1550.0000000000002 -> 1550)
double tidy(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::strtod(buf, nullptr);
}

json optics_json(const OpticalSystem& o) {
    json j;
    j["wavelength_nm"] = tidy(o.wavelength * 1e9);
    j["tx_aperture"] = o.tx_aperture;
    j["beam_waist"] = o.beam_waist;
    j["rx_aperture"] = o.rx_aperture;
    j["obstruction_ratio"] = o.obstruction_ratio;
    j["pointing_error_urad"] = tidy(o.pointing_error * 1e6);
    j["extinction_ref"] = o.extinction_ref;
    j["extinction_ref_wavelength_nm"] = tidy(o.extinction_ref_wavelength * 1e9);
    j["extinction_exponent"] = o.extinction_exponent;
    if (o.extinction) j["extinction"] = *o.extinction;
    j["coupling"] = o.coupling;
    if (o.scintillation_std_db) j["scintillation_std_db"] = *o.scintillation_std_db;
    return j;
}

void collect(std::vector<std::string>& errs, const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        std::istringstream is(e.what());
        for (std::string line; std::getline(is, line);)
            if (!line.empty()) errs.push_back(line);
    }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    Scenario sc;
    Problems pr;
    {
        Section top(&root, "", pr);
        top.get("seed", sc.seed);
        top.get_enum("direction", sc.direction, {{"downlink", Direction::downlink}, {"uplink", Direction::uplink}});
        top.get("output_dir", sc.output_dir);
        {
            Section s(top.child("pass"), "pass", pr);
            auto& p = sc.pass;
            s.get("satellite_altitude", p.satellite_altitude);
            s.get("pass_duration", p.pass_duration);
            s.get("max_elevation", p.max_elevation);
            s.get("edge_zenith", p.edge_zenith);
            s.get("time_step", p.time_step);
            s.get("earth_radius", p.earth_radius);
            s.get_enum("mode", p.mode, {{"great_circle", PassMode::great_circle},
                                        {"symmetric_quadratic", PassMode::symmetric_quadratic}});
        }
        {
            Section s(top.child("turbulence"), "turbulence", pr);
            auto& t = sc.profile;
            s.get("wind_speed", t.wind_speed);
            s.get("ground_cn2", t.ground_cn2);
            s.get("instrument_height", t.instrument_height);
            s.get("background", t.background);
            s.get("power_law", t.power_law);
            s.get("inner_scale", t.inner_scale);
            s.get("outer_scale", t.outer_scale);
        }
        OpticalSystem common;
        {
            Section s(top.child("optics"), "optics", pr);
            read_optics(s, common);
        }
        const json* wl = top.child("wavelengths");
        if (!wl) {
            pr.defaulted.push_back("wavelengths");
            for (double nm : {1550.0, 850.0, 630.0}) {
                OpticalSystem o = common;
                o.wavelength = nm * 1e-9;
                sc.optics.push_back(o);
            }
        } else if (!wl->is_array()) {
            pr.errors.push_back("wavelengths: expected an array");
        } else {
            for (std::size_t i = 0; i < wl->size(); ++i) {
                OpticalSystem o = common;
                Section s(&(*wl)[i], "wavelengths[" + std::to_string(i) + "]", pr);
                const auto before = pr.defaulted.size();
                read_optics(s, o);
                pr.defaulted.resize(before);  // per-wavelength keys inherit from optics
                sc.optics.push_back(o);
            }
        }
        {
            Section s(top.child("keyrate"), "keyrate", pr);
            auto& k = sc.keyrate;
            s.get("modulation_variance", k.modulation_variance);
            s.get("reconciliation", k.reconciliation);
            s.get("excess_noise", k.excess_noise);
            s.get("detector_efficiency", k.detector_efficiency);
            s.get("electronic_noise", k.electronic_noise);
            s.get("eve_transmittance", k.eve_transmittance);
            s.get("clock_rate", k.clock_rate);
            s.get("include_coupling", k.include_coupling);
            s.get_enum("eve_model", k.eve, {{"line_of_sight", EveModel::line_of_sight}, {"full", EveModel::full}});
            s.get("optimize_modulation", sc.optimize_modulation);
        }
        {
            Section s(top.child("limits"), "limits", pr);
            auto& l = sc.limits;
            s.get("voa_rate", l.voa_rate);
            s.get("voa_od_max", l.voa_od_max);
            s.get("fsm_rate", l.fsm_rate);
            s.get("fsm_range_x", l.fsm_range_x);
            s.get("fsm_range_y", l.fsm_range_y);
            s.get("dm_rate", l.dm_rate);
            s.get("dm_modes", l.dm_modes);
            s.get("lever_arm", l.lever_arm);
        }
        {
            Section s(top.child("sampling"), "sampling", pr);
            auto& m = sc.sampling;
            s.get("sample_rate", m.sample_rate);
            s.get("device_faithful", m.device_faithful);
            s.get_enum("pointing_law", m.pointing_law, {{"gaussian", PointingLaw::gaussian}, {"uniform", PointingLaw::uniform}});
            s.get("histogram_bins", m.histogram_bins);
        }
        {
            Section s(top.child("screens"), "screens", pr);
            auto& c = sc.screens;
            s.get("N", c.N);
            s.get("aperture_pixels", c.aperture_pixels);
            s.get_enum("low_order", c.low_order, {{"none", LowOrder::none}, {"jittered", LowOrder::jittered}});
            s.get("subharmonic_levels", c.subharmonic_levels);
            s.get("rate", c.rate);
            s.get("count", c.count);
            s.get("text", c.text);
        }
    }
    sc.pass.station_height = sc.profile.instrument_height;
    sc.defaulted = pr.defaulted;
    if (!pr.errors.empty()) {
        std::string msg;
        for (const auto& e : pr.errors) msg += e + "\n";
        // mistyped fields kept their defaults, so range checks on the rest still apply
        try {
            validate_scenario(sc);
        } catch (const ConfigError& e) {
            msg += e.what();
        }
        throw ConfigError(msg);
    }
    validate_scenario(sc);
    return sc;
}

void validate_scenario(const Scenario& sc) {
    std::vector<std::string> errs;
    collect(errs, [&] { sc.pass.validate(); });
    collect(errs, [&] { sc.profile.validate(); });
    if (sc.optics.empty()) errs.push_back("wavelengths: at least one wavelength required");
    for (std::size_t i = 0; i < sc.optics.size(); ++i) {
        std::vector<std::string> e;
        collect(e, [&] { sc.optics[i].validate(); });
        for (auto& line : e) {
            if (line.rfind("optics.", 0) == 0) line = "wavelengths[" + std::to_string(i) + "]." + line.substr(7);
            errs.push_back(line);
        }
    }
    collect(errs, [&] { sc.keyrate.validate(); });
    collect(errs, [&] { sc.limits.validate(); });
    if (!(sc.sampling.sample_rate > 0)) errs.push_back("sampling.sample_rate must be > 0");
    if (sc.sampling.histogram_bins < 1) errs.push_back("sampling.histogram_bins must be >= 1");
    const auto& c = sc.screens;
    if (c.N < 64 || (c.N & (c.N - 1)) != 0) errs.push_back("screens.N must be a power of two >= 64");
    if (!(c.aperture_pixels >= 8 && c.aperture_pixels <= c.N)) errs.push_back("screens.aperture_pixels must be in [8, N]");
    if (c.subharmonic_levels < 0 || c.subharmonic_levels > 12) errs.push_back("screens.subharmonic_levels must be in [0, 12]");
    if (!(c.rate > 0 && c.rate <= sc.limits.dm_rate)) errs.push_back("screens.rate must be in (0, limits.dm_rate]");
    if (c.count < 1) errs.push_back("screens.count must be >= 1");
    if (!errs.empty()) {
        std::string msg;
        for (const auto& e : errs) msg += e + "\n";
        throw ConfigError(msg);
    }
}

std::string serialize_scenario(const Scenario& sc) {
    json j;
    j["seed"] = sc.seed;
    j["direction"] = to_string(sc.direction);
    j["output_dir"] = sc.output_dir;
    const auto& p = sc.pass;
    j["pass"] = {{"satellite_altitude", p.satellite_altitude}, {"pass_duration", p.pass_duration},
                 {"max_elevation", p.max_elevation}, {"edge_zenith", p.edge_zenith},
                 {"time_step", p.time_step}, {"earth_radius", p.earth_radius}, {"mode", to_string(p.mode)}};
    const auto& t = sc.profile;
    j["turbulence"] = {{"wind_speed", t.wind_speed}, {"ground_cn2", t.ground_cn2},
                       {"instrument_height", t.instrument_height}, {"background", t.background},
                       {"power_law", t.power_law}, {"inner_scale", t.inner_scale}, {"outer_scale", t.outer_scale}};
    j["optics"] = json::object();
    j["wavelengths"] = json::array();
    for (const auto& o : sc.optics) j["wavelengths"].push_back(optics_json(o));
    const auto& k = sc.keyrate;
    j["keyrate"] = {{"modulation_variance", k.modulation_variance}, {"reconciliation", k.reconciliation},
                    {"excess_noise", k.excess_noise}, {"detector_efficiency", k.detector_efficiency},
                    {"electronic_noise", k.electronic_noise}, {"eve_transmittance", k.eve_transmittance},
                    {"clock_rate", k.clock_rate}, {"include_coupling", k.include_coupling},
                    {"eve_model", to_string(k.eve)}, {"optimize_modulation", sc.optimize_modulation}};
    const auto& l = sc.limits;
    j["limits"] = {{"voa_rate", l.voa_rate}, {"voa_od_max", l.voa_od_max}, {"fsm_rate", l.fsm_rate},
                   {"fsm_range_x", l.fsm_range_x}, {"fsm_range_y", l.fsm_range_y}, {"dm_rate", l.dm_rate},
                   {"dm_modes", l.dm_modes}, {"lever_arm", l.lever_arm}};
    const auto& m = sc.sampling;
    j["sampling"] = {{"sample_rate", m.sample_rate}, {"device_faithful", m.device_faithful},
                     {"pointing_law", to_string(m.pointing_law)}, {"histogram_bins", m.histogram_bins}};
    const auto& c = sc.screens;
    j["screens"] = {{"N", c.N}, {"aperture_pixels", c.aperture_pixels}, {"low_order", to_string(c.low_order)},
                    {"subharmonic_levels", c.subharmonic_levels}, {"rate", c.rate}, {"count", c.count},
                    {"text", c.text}};
    return j.dump(2) + "\n";
}

std::string scenario_hash(const Scenario& sc) {
    Scenario copy = sc;
    copy.output_dir.clear();  // where results land is not part of the physics
    const std::string s = serialize_scenario(copy);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace fsochan
