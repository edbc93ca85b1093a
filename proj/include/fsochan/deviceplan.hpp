#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fsochan/geometry.hpp"
#include "fsochan/losschannels.hpp"
#include "fsochan/zernike.hpp"

namespace fsochan {

struct ActuatorLimits {
    double voa_rate = 1.8;       // Hz
    double voa_od_max = 4.0;     // OD range is [0, voa_od_max]
    double fsm_rate = 1000.0;    // Hz
    double fsm_range_x = 4.5;    // +- deg
    double fsm_range_y = 2.0;    // +- deg
    double dm_rate = 1000.0;     // Hz
    int dm_modes = 15;
    double lever_arm = 50.0;     // m of receiver-plane displacement per rad of beam deflection

    void validate() const;  // throws ConfigError
};

struct ClipEvent {
    std::string actuator;  // "voa", "fsm_x", "fsm_y"
    double t = 0.0;
    double demanded = 0.0;
    double applied = 0.0;
};

struct VoaCommand { double t, od; };
struct FsmCommand { double t, deg_x, deg_y; };
struct DmFrame { double t; ZernikeVector v; };

struct VoaSchedule {
    std::vector<VoaCommand> commands;
    std::vector<ClipEvent> clips;
};
struct FsmSchedule {
    std::vector<FsmCommand> commands;
    std::vector<ClipEvent> clips;
};
struct DmSchedule {
    std::vector<DmFrame> frames;
};

struct DevicePlan {
    VoaSchedule voa;
    FsmSchedule fsm;
    DmSchedule dm;
    std::string scenario_hash;
    std::uint64_t seed = 0;
};

// Number of update ticks k/rate inside [0, duration).
std::size_t tick_count(double duration, double rate);

VoaSchedule compile_voa(const LossTimeSeries& series, const ActuatorLimits& limits);

struct DisplacementSample { double t, dx, dy; };
FsmSchedule compile_fsm(const std::vector<DisplacementSample>& series, double duration,
                        const ActuatorLimits& limits);
// Mirror angle (deg) that steers a receiver-plane displacement d.
double mirror_angle_deg(double d, double lever_arm);

DmSchedule compile_dm(const std::vector<double>& times,
                      const std::function<const PhaseScreen&(std::size_t)>& screen_at,
                      const ActuatorLimits& limits);
DmSchedule compile_dm(const std::vector<PhaseScreen>& screens, const std::vector<double>& times,
                      const ActuatorLimits& limits);

struct QuantizationRow {
    double t = 0.0;            // start of the update interval
    double zenith_deg = 0.0;
    double step_deg = 0.0;     // line-of-sight change over the interval
    double loss_change_db = 0.0;
};
struct QuantizationReport {
    double update_interval = 0.0;
    double zenith_step_deg = 0.0;  // interval centred on culmination
    double edge_step_deg = 0.0;    // first/last interval, larger of the two
    double max_loss_change_db = 0.0;
    std::vector<QuantizationRow> rows;
};
// voa_loss_db(t) supplies the attenuator-equivalent loss; may be empty.
QuantizationReport quantization_report(const OrbitPass& pass, const ActuatorLimits& limits,
                                       const std::function<double(double)>& voa_loss_db = {});

void write_voa_csv(std::ostream& os, const VoaSchedule& s, const std::string& header_note);
void write_fsm_csv(std::ostream& os, const FsmSchedule& s, const std::string& header_note);
void write_dm_csv(std::ostream& os, const DmSchedule& s, const std::string& header_note);
void write_quantization_csv(std::ostream& os, const QuantizationReport& r, const std::string& header_note);

}  // namespace fsochan
