#include "fsochan/deviceplan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fsochan/errors.hpp"

namespace fsochan {

namespace {

constexpr double rad2deg = 180.0 / std::numbers::pi;

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v + 0.0);
    return buf;
}

double clip(double v, double lo, double hi, const char* name, double t, std::vector<ClipEvent>& ev) {
    if (v >= lo && v <= hi) return v;
    const double a = std::clamp(v, lo, hi);
    ev.push_back({name, t, v, a});
    return a;
}

// Index of the last sample at or before t (zero-order hold).
template <class T, class GetT>
std::size_t hold_index(const std::vector<T>& xs, double t, GetT get_t) {
    auto it = std::upper_bound(xs.begin(), xs.end(), t + 1e-12,
                               [&](double v, const T& x) { return v < get_t(x); });
    return it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
}

}  // namespace

void ActuatorLimits::validate() const {
    std::ostringstream err;
    if (!(voa_rate > 0)) err << "limits.voa_rate must be > 0\n";
    if (!(voa_od_max > 0)) err << "limits.voa_od_max must be > 0\n";
    if (!(fsm_rate > 0)) err << "limits.fsm_rate must be > 0\n";
    if (!(fsm_range_x > 0)) err << "limits.fsm_range_x must be > 0\n";
    if (!(fsm_range_y > 0)) err << "limits.fsm_range_y must be > 0\n";
    if (!(dm_rate > 0)) err << "limits.dm_rate must be > 0\n";
    if (dm_modes != 15) err << "limits.dm_modes must be 15\n";
    if (!(lever_arm > 0)) err << "limits.lever_arm must be > 0\n";
    if (!err.str().empty()) throw ConfigError(err.str());
}

std::size_t tick_count(double duration, double rate) {
    const double n = duration * rate;
    const double r = std::round(n);
    return static_cast<std::size_t>(std::abs(n - r) < 1e-9 * std::max(1.0, n) ? r : std::ceil(n));
}

VoaSchedule compile_voa(const LossTimeSeries& series, const ActuatorLimits& limits) {
    VoaSchedule s;
    if (series.samples.empty()) return s;
    const double duration = static_cast<double>(series.samples.size()) * series.time_step;
    const std::size_t n = tick_count(duration, limits.voa_rate);
    s.commands.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / limits.voa_rate;
        const auto& x = series.samples[hold_index(series.samples, t, [](const LossSample& v) { return v.t; })];
        const double od = loss_db(x.T_atm * x.T_geo) / 10.0;
        s.commands.push_back({t, clip(od, 0.0, limits.voa_od_max, "voa", t, s.clips)});
    }
    return s;
}

double mirror_angle_deg(double d, double lever_arm) {
    if (!(lever_arm > 0)) throw ConfigError("limits.lever_arm must be > 0");
    return std::atan(d / lever_arm) / 2.0 * rad2deg;
}

FsmSchedule compile_fsm(const std::vector<DisplacementSample>& series, double duration, const ActuatorLimits& limits) {
    if (!(limits.lever_arm > 0)) throw ConfigError("limits.lever_arm must be > 0");
    FsmSchedule s;
    if (series.empty()) return s;
    const std::size_t n = tick_count(duration, limits.fsm_rate);
    s.commands.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / limits.fsm_rate;
        const auto& x = series[hold_index(series, t, [](const DisplacementSample& v) { return v.t; })];
        const double ax = mirror_angle_deg(x.dx, limits.lever_arm);
        const double ay = mirror_angle_deg(x.dy, limits.lever_arm);
        s.commands.push_back({t, clip(ax, -limits.fsm_range_x, limits.fsm_range_x, "fsm_x", t, s.clips),
                              clip(ay, -limits.fsm_range_y, limits.fsm_range_y, "fsm_y", t, s.clips)});
    }
    return s;
}

DmSchedule compile_dm(const std::vector<double>& times, const std::function<const PhaseScreen&(std::size_t)>& screen_at,
                      const ActuatorLimits& limits) {
    DmSchedule s;
    s.frames.reserve(times.size());
    const double min_gap = 1.0 / limits.dm_rate;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && times[i] - times[i - 1] < min_gap * (1.0 - 1e-9))
            throw DomainError("compile_dm: screens arrive faster than dm_rate");
        auto d = decompose(screen_at(i));
        // piston is meaningless for intensity; tip and tilt go to the steering mirror
        d.v[1] = d.v[2] = d.v[3] = 0.0;
        s.frames.push_back({times[i], d.v});
    }
    return s;
}

DmSchedule compile_dm(const std::vector<PhaseScreen>& screens, const std::vector<double>& times,
                      const ActuatorLimits& limits) {
    if (screens.size() != times.size()) throw DomainError("compile_dm: screens and times differ in length");
    return compile_dm(times, [&](std::size_t i) -> const PhaseScreen& { return screens[i]; }, limits);
}

QuantizationReport quantization_report(const OrbitPass& pass, const ActuatorLimits& limits,
                                       const std::function<double(double)>& voa_loss_db) {
    pass.validate();
    QuantizationReport r;
    const double dt = 1.0 / limits.voa_rate;
    r.update_interval = dt;
    const double T = pass.pass_duration;
    const double tm = T / 2.0;
    r.zenith_step_deg = angular_separation(pass, tm - dt / 2, tm + dt / 2) * rad2deg;
    const double span = std::min(dt, T);
    r.edge_step_deg = std::max(angular_separation(pass, 0.0, span), angular_separation(pass, T - span, T)) * rad2deg;
    const std::size_t n = tick_count(T, limits.voa_rate);
    for (std::size_t k = 0; k < n; ++k) {
        QuantizationRow row;
        row.t = static_cast<double>(k) * dt;
        const double t1 = std::min(row.t + dt, T);
        row.zenith_deg = zenith_at(pass, row.t) * rad2deg;
        row.step_deg = angular_separation(pass, row.t, t1) * rad2deg;
        if (voa_loss_db) row.loss_change_db = std::abs(voa_loss_db(t1) - voa_loss_db(row.t));
        r.max_loss_change_db = std::max(r.max_loss_change_db, row.loss_change_db);
        r.rows.push_back(row);
    }
    return r;
}

void write_voa_csv(std::ostream& os, const VoaSchedule& s, const std::string& note) {
    os << "# voa schedule, t in s, attenuation in OD (10 dB)";
    if (!note.empty()) os << ", " << note;
    os << "\nt_s,od\n";
    for (const auto& c : s.commands) os << fmt9(c.t) << ',' << fmt9(c.od) << "\n";
}

void write_fsm_csv(std::ostream& os, const FsmSchedule& s, const std::string& note) {
    os << "# fsm schedule, t in s, mirror angles in deg";
    if (!note.empty()) os << ", " << note;
    os << "\nt_s,deg_x,deg_y\n";
    for (const auto& c : s.commands) os << fmt9(c.t) << ',' << fmt9(c.deg_x) << ',' << fmt9(c.deg_y) << "\n";
}

void write_dm_csv(std::ostream& os, const DmSchedule& s, const std::string& note) {
    os << "# dm schedule, t in s, noll zernike coefficients c1..c15 in rad of phase, c1-c3 zeroed";
    if (!note.empty()) os << ", " << note;
    os << "\nt_s";
    for (int j = 1; j <= kModes; ++j) os << ",c" << j;
    os << "\n";
    for (const auto& f : s.frames) {
        os << fmt9(f.t);
        for (double c : f.v.c) os << ',' << fmt9(c);
        os << "\n";
    }
}

void write_quantization_csv(std::ostream& os, const QuantizationReport& r, const std::string& note) {
    os << "# voa staleness, update_interval_s=" << fmt9(r.update_interval)
       << ", zenith_step_deg=" << fmt9(r.zenith_step_deg) << ", edge_step_deg=" << fmt9(r.edge_step_deg)
       << ", max_loss_change_dB=" << fmt9(r.max_loss_change_db);
    if (!note.empty()) os << ", " << note;
    os << "\nt_s,zenith_deg,step_deg,loss_change_dB\n";
    for (const auto& x : r.rows)
        os << fmt9(x.t) << ',' << fmt9(x.zenith_deg) << ',' << fmt9(x.step_deg) << ',' << fmt9(x.loss_change_db) << "\n";
}

}  // namespace fsochan
