#include "fsochan/losschannels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fsochan/errors.hpp"
#include "fsochan/quadrature.hpp"

namespace fsochan {

namespace {
constexpr double pi = std::numbers::pi;

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}
}  // namespace

double OpticalSystem::alpha0() const {
    if (extinction) return *extinction;
    return extinction_ref * std::pow(wavelength / extinction_ref_wavelength, -extinction_exponent);
}

void OpticalSystem::validate() const {
    std::ostringstream err;
    if (!(wavelength >= 300e-9 && wavelength <= 2e-6)) err << "optics.wavelength must be in [300 nm, 2 um]\n";
    if (!(tx_aperture > 0)) err << "optics.tx_aperture must be > 0\n";
    if (!(beam_waist >= 0 && beam_waist <= tx_aperture / 2)) err << "optics.beam_waist must be in [0, tx_aperture/2]\n";
    if (!(rx_aperture > 0)) err << "optics.rx_aperture must be > 0\n";
    if (!(obstruction_ratio >= 0 && obstruction_ratio < 1)) err << "optics.obstruction_ratio must be in [0,1)\n";
    if (!(pointing_error >= 0)) err << "optics.pointing_error must be >= 0\n";
    if (!(extinction_ref >= 0)) err << "optics.extinction_ref must be >= 0\n";
    if (!(extinction_ref_wavelength > 0)) err << "optics.extinction_ref_wavelength must be > 0\n";
    if (extinction && !(*extinction >= 0)) err << "optics.extinction must be >= 0\n";
    if (!(coupling > 0 && coupling <= 1)) err << "optics.coupling must be in (0,1]\n";
    if (scintillation_std_db && !(*scintillation_std_db >= 0)) err << "optics.scintillation_std_db must be >= 0\n";
    if (!err.str().empty()) throw DomainError(err.str());
}

double extinction_path(const PathSample& s, const OrbitPass& pass) {
    const double z = s.slant_range;
    auto f = [&](double x) { return std::exp(-altitude_along_path(std::min(x, z), s.zenith, pass) / kScaleHeight); };
    return integrate(f, 0.0, z, 1e-4, {kScaleHeight, 5 * kScaleHeight, 20 * kScaleHeight}).value;
}

double atmospheric_transmittance(const PathSample& s, double alpha0, const OrbitPass& pass) {
    if (!(alpha0 >= 0)) throw DomainError("atmospheric_transmittance: alpha0 must be >= 0");
    if (alpha0 == 0) return 1.0;
    return std::exp(-alpha0 / kScaleHeight * extinction_path(s, pass));
}

BeamWidth effective_beam_width(double z, const OpticalSystem& o, double r0) {
    const double w0 = o.waist(), lam = o.wavelength;
    const double zr = z * lam / (pi * w0 * w0);
    BeamWidth b;
    b.omega = w0 * std::sqrt(1.0 + zr * zr);
    if (std::isinf(r0)) {
        b.omega_st = b.omega;
        return b;
    }
    const double phi = 0.33 * std::cbrt(r0 / w0);
    const double t = lam * z / (pi * r0);
    b.omega_st = std::sqrt(b.omega * b.omega + 2.0 * t * t * (1.0 - phi) * (1.0 - phi));
    return b;
}

BeamWidth effective_beam_width(const PathSample& s, const OpticalSystem& o, double r0) {
    return effective_beam_width(s.slant_range, o, r0);
}

double geometric_transmittance(double w, double a_r, double ob, double d) {
    if (!(w > 0 && a_r > 0 && d >= 0 && ob >= 0 && ob < 1))
        throw DomainError("geometric_transmittance: need w, a_r > 0, d >= 0, obstruction in [0,1)");
    const double r_out = a_r / 2, r_in = ob * a_r / 2;
    const double k = 2.0 / (w * w);
    // Polar coordinates about the aperture centre; the beam centre sits at (d, 0).
    auto radial = [&](double r) {
        auto ang = [&](double phi) {
            const double q = (r - d) * (r - d) + 2.0 * r * d * (1.0 - std::cos(phi));
            return std::exp(-k * q);
        };
        // peak at phi = 0; symmetric about it
        const double inner = integrate(ang, 0.0, pi, 1e-6).value;
        return 2.0 * inner * r;
    };
    std::vector<double> br;
    if (d > r_in && d < r_out) br.push_back(d);
    const double v = integrate(radial, r_in, r_out, 1e-5, br).value;
    return std::min(1.0, v * k / pi);
}

const char* to_string(PointingLaw l) { return l == PointingLaw::gaussian ? "gaussian" : "uniform"; }

double Displacement::d() const { return std::hypot(x, y); }

double pointing_offset(double satellite_altitude, double pointing_error) {
    return satellite_altitude * std::tan(pointing_error / 2.0);
}

double displacement_bound(double d_det, double sigma2) { return d_det + 3.0 * std::sqrt(sigma2); }

Displacement pointing_displacement(double d_det, double sigma2, Rng& rng, PointingLaw law) {
    if (law == PointingLaw::uniform) {
        // uniform over the disc of the displacement bound
        const double R = displacement_bound(d_det, sigma2);
        const double r = R * std::sqrt(rng.uniform());
        const double a = 2.0 * pi * rng.uniform();
        return {r * std::cos(a), r * std::sin(a)};
    }
    const double s = std::sqrt(sigma2);
    const double gx = rng.normal(), gy = rng.normal();
    return {d_det + s * gx, s * gy};
}

double pointing_offset_sample(const PathSample&, const OpticalSystem& optics, double sigma2, Rng& rng,
                              const OrbitPass& pass) {
    return pointing_displacement(pointing_offset(pass.satellite_altitude, optics.pointing_error), sigma2, rng).d();
}

double scintillation_loss_sample(double variance_db2, Rng& rng) {
    if (!(variance_db2 >= 0)) throw DomainError("scintillation_loss_sample: variance must be >= 0");
    const double g = rng.normal();  // always drawn, keeps streams aligned
    if (variance_db2 == 0) return 1.0;
    const double s_chi = std::sqrt(variance_db2) * std::numbers::ln10 / 20.0;
    const double chi = -s_chi * s_chi + s_chi * g;
    return std::exp(2.0 * chi);
}

double loss_db(double T) { return 0.0 - 10.0 * std::log10(T); }

ChannelState channel_state(const PathSample& s, const TurbulenceProfile& profile, const OpticalSystem& optics,
                           Direction dir, const OrbitPass& pass) {
    ChannelState st;
    st.t = s.t;
    st.zenith = s.zenith;
    st.slant_range = s.slant_range;
    st.T_atm = atmospheric_transmittance(s, optics.alpha0(), pass);
    const auto turb = path_turbulence(s, profile, optics, dir, pass);
    st.r0 = turb.fried_r0;
    st.wander_variance = turb.wander_variance;
    st.omega_st = effective_beam_width(s, optics, turb.fried_r0).omega_st;
    st.T_geo = geometric_transmittance(st.omega_st, optics.rx_aperture, optics.obstruction_ratio, 0.0);
    st.scint_variance_db2 = scintillation_loss_variance(s, profile, optics, dir, pass);
    st.d_det = pointing_offset(pass.satellite_altitude, optics.pointing_error);
    return st;
}

LossSample draw_loss_sample(const ChannelState& st, const OpticalSystem& optics, Rng& rng, PointingLaw law) {
    LossSample ls;
    ls.t = st.t;
    ls.zenith = st.zenith;
    ls.T_atm = st.T_atm;
    ls.T_geo = st.T_geo;
    Rng pr = rng.split(stream::pointing, 0);
    Rng sr = rng.split(stream::scintillation, 0);
    const auto disp = pointing_displacement(st.d_det, st.wander_variance, pr, law);
    ls.dx = disp.x;
    ls.dy = disp.y;
    ls.d = disp.d();
    const double Td = ls.d == 0.0 ? st.T_geo
                                  : geometric_transmittance(st.omega_st, optics.rx_aperture, optics.obstruction_ratio, ls.d);
    ls.T_point = std::min(1.0, Td / st.T_geo);
    ls.T_scint = scintillation_loss_sample(st.scint_variance_db2, sr);
    ls.T_total = ls.T_atm * ls.T_geo * ls.T_point * ls.T_scint * optics.coupling;
    return ls;
}

LossSample link_budget_sample(const PathSample& s, const TurbulenceProfile& profile, const OpticalSystem& optics,
                              Direction dir, Rng& rng, const OrbitPass& pass) {
    return draw_loss_sample(channel_state(s, profile, optics, dir, pass), optics, rng);
}

namespace {

ChannelState lerp(const ChannelState& a, const ChannelState& b, double f) {
    auto m = [f](double x, double y) { return x + (y - x) * f; };
    ChannelState c = a;
    c.zenith = m(a.zenith, b.zenith);
    c.slant_range = m(a.slant_range, b.slant_range);
    c.T_atm = m(a.T_atm, b.T_atm);
    c.omega_st = m(a.omega_st, b.omega_st);
    c.wander_variance = m(a.wander_variance, b.wander_variance);
    c.scint_variance_db2 = m(a.scint_variance_db2, b.scint_variance_db2);
    c.r0 = m(a.r0, b.r0);
    return c;
}

ChannelState state_at(const std::vector<ChannelState>& nodes, double t) {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), t,
                               [](double v, const ChannelState& n) { return v < n.t; });
    if (it == nodes.begin()) return nodes.front();
    if (it == nodes.end()) return nodes.back();
    const auto& a = *(it - 1);
    const auto& b = *it;
    return lerp(a, b, (t - a.t) / (b.t - a.t));
}

}  // namespace

LossTimeSeries simulate_losses(const OrbitPass& pass, const TurbulenceProfile& profile, const OpticalSystem& optics,
                               Direction dir, std::uint64_t seed, const SeriesOptions& opt) {
    if (!(opt.sample_rate > 0)) throw DomainError("simulate_losses: sample_rate must be > 0");
    if (opt.device_faithful && !(opt.voa_rate > 0)) throw DomainError("simulate_losses: voa_rate must be > 0");
    LossTimeSeries out;
    out.wavelength = optics.wavelength;
    out.time_step = 1.0 / opt.sample_rate;
    for (const auto& s : zenith_profile(pass)) out.nodes.push_back(channel_state(s, profile, optics, dir, pass));

    const auto n = static_cast<std::size_t>(std::llround(std::floor(pass.pass_duration * opt.sample_rate + 1e-9)));
    out.samples.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / opt.sample_rate;
        ChannelState st = state_at(out.nodes, t);
        st.T_geo = geometric_transmittance(st.omega_st, optics.rx_aperture, optics.obstruction_ratio, 0.0);
        st.t = t;
        if (opt.device_faithful) {
            // attenuator-equivalent loss held since the last update tick
            const double tick = std::floor(t * opt.voa_rate + 1e-9) / opt.voa_rate;
            const ChannelState held = state_at(out.nodes, tick);
            st.T_atm = held.T_atm;
            const double tg_held = geometric_transmittance(held.omega_st, optics.rx_aperture, optics.obstruction_ratio, 0.0);
            Rng rng(seed, 0, k);
            LossSample ls = draw_loss_sample(st, optics, rng, opt.pointing_law);
            ls.T_geo = tg_held;
            ls.T_total = ls.T_atm * ls.T_geo * ls.T_point * ls.T_scint * optics.coupling;
            out.samples.push_back(ls);
            continue;
        }
        Rng rng(seed, 0, k);
        out.samples.push_back(draw_loss_sample(st, optics, rng, opt.pointing_law));
    }
    return out;
}

std::vector<HistogramBin> histogram(const std::vector<double>& values, int bins) {
    if (values.empty() || bins < 1) return {};
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi == lo) return {{lo, hi, 1.0}};
    std::vector<HistogramBin> h(static_cast<std::size_t>(bins));
    const double w = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) h[b] = {lo + b * w, b + 1 == bins ? hi : lo + (b + 1) * w, 0.0};
    for (double v : values) {
        auto b = static_cast<int>((v - lo) / w);
        h[std::clamp(b, 0, bins - 1)].probability += 1.0;
    }
    for (auto& x : h) x.probability /= static_cast<double>(values.size());
    return h;
}

void write_loss_csv(std::ostream& os, const LossTimeSeries& s, const std::string& note) {
    os << "# loss series, wavelength_m=" << fmt9(s.wavelength) << ", losses in dB, t in s, zenith in deg, d in m";
    if (!note.empty()) os << ", " << note;
    os << "\n";
    os << "t_s,zenith_deg,T_atm_dB,T_geo_dB,T_point_dB,T_scint_dB,total_dB,d_m\n";
    for (const auto& x : s.samples) {
        os << fmt9(x.t) << ',' << fmt9(x.zenith * 180.0 / pi) << ',' << fmt9(loss_db(x.T_atm)) << ','
           << fmt9(loss_db(x.T_geo)) << ',' << fmt9(loss_db(x.T_point)) << ',' << fmt9(loss_db(x.T_scint)) << ','
           << fmt9(loss_db(x.T_total)) << ',' << fmt9(x.d) << "\n";
    }
}

void write_histogram_csv(std::ostream& os, const std::vector<HistogramBin>& h, const std::string& note) {
    os << "# histogram of loss in dB";
    if (!note.empty()) os << ", " << note;
    os << "\n";
    os << "bin_left_dB,bin_right_dB,probability\n";
    for (const auto& b : h) os << fmt9(b.left) << ',' << fmt9(b.right) << ',' << fmt9(b.probability) << "\n";
}

}  // namespace fsochan
