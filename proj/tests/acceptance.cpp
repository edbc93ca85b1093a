// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: acceptance <path to fsochan cli> [criterion ids...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fsochan/deviceplan.hpp"
#include "fsochan/keyrate.hpp"
#include "fsochan/losschannels.hpp"
#include "fsochan/runner.hpp"
#include "fsochan/stats.hpp"
#include "fsochan/zernike.hpp"
#include "oracles/closed_forms.hpp"
#include "oracles/gaussian_cm.hpp"

using namespace fsochan;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail, double seconds) {
    std::printf("[%s] C%d %s | %s | %.1f s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
}

void info(const std::string& s) {
    std::printf("[INFO] %s\n", s.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

struct Clock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double s() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

const double kNm[3] = {1550, 850, 630};

Scenario defaults() { return parse_scenario("{}"); }

OpticalSystem optics_nm(const Scenario& sc, double nm) {
    for (const auto& o : sc.optics)
        if (std::abs(o.wavelength * 1e9 - nm) < 0.05) return o;
    OpticalSystem o;
    o.wavelength = nm * 1e-9;
    return o;
}

// 1. max pointing + wander loss over 1e5 samples
void c1() {
    Clock c;
    const auto sc = defaults();
    const double target[3] = {0.2, 0.9, 1.3};
    SeriesOptions so;
    so.sample_rate = 1e5 / sc.pass.pass_duration;
    bool ok = true;
    std::string d;
    for (int i = 0; i < 3; ++i) {
        const auto s = simulate_losses(sc.pass, sc.profile, optics_nm(sc, kNm[i]), sc.direction, sc.seed, so);
        double mx = 0;
        for (const auto& x : s.samples) mx = std::max(mx, loss_db(x.T_point));
        ok = ok && std::abs(mx - target[i]) <= 0.15;
        d += fmt("%.0f nm: ", kNm[i]) + fmt("%.3f dB", mx) + fmt(" (target %.1f) ", target[i]);
    }
    d += fmt("n=%.0f", std::floor(sc.pass.pass_duration * so.sample_rate + 1e-9));
    const double t = c.s();
    report(1, ok && t < 60, "max pointing+wander loss", d, t);
}

// 2. scintillation spread, physics route and pinned route
void c2() {
    Clock c;
    const auto sc = defaults();
    const double target[3] = {0.03, 0.25, 0.5};
    bool ok_phys = true, ok_pin = true;
    std::string d = "physics:";
    const auto mid = path_sample(sc.pass, sc.pass.pass_duration / 2);
    for (int i = 0; i < 3; ++i) {
        const auto o = optics_nm(sc, kNm[i]);
        const double sd = std::sqrt(scintillation_loss_variance(mid, sc.profile, o, sc.direction, sc.pass));
        ok_phys = ok_phys && std::abs(sd - target[i]) <= 0.3 * target[i];
        d += fmt(" %.3f", sd);
    }
    d += " dB; pinned n=1e5:";
    for (int i = 0; i < 3; ++i) {
        std::vector<double> db(100000);
        for (std::size_t k = 0; k < db.size(); ++k) {
            Rng r(sc.seed, 7, k);
            db[k] = loss_db(scintillation_loss_sample(target[i] * target[i], r));
        }
        const double sd = sample_stddev(db);
        ok_pin = ok_pin && std::abs(sd - target[i]) <= 0.02 * target[i];
        d += fmt(" %.4f", sd);
    }
    d += " dB (targets 0.03/0.25/0.5)";
    d += ok_phys ? "; physics ok" : "; physics out of band";
    d += ok_pin ? ", pinned ok" : ", pinned out of band";
    report(2, ok_phys && ok_pin, "scintillation dB std-dev", d, c.s());
}

// 3. key bits per pass
void c3() {
    Clock c;
    const auto sc = defaults();
    const auto runs = run_pass(sc, {false, false});
    const double target[3] = {3.1e7, 1.9e8, 3.6e8};
    bool ok = true;
    std::string d;
    for (int i = 0; i < 3; ++i) {
        const double b = runs[i].key.bits;
        ok = ok && std::abs(b - target[i]) <= 0.25 * target[i];
        d += fmt("%.0f nm: ", kNm[i]) + fmt("%.3g bits", b) + fmt(" (target %.2g) ", target[i]);
    }
    const double t = c.s();
    report(3, ok && t < 300, "key bits per pass", d, t);

    // optimum modulation at one mid-pass transmittance, for the record
    const auto& mid = runs[0].series.samples[runs[0].series.samples.size() / 2];
    const auto o = optimize_modulation({mid.T_total}, sc.keyrate);
    info(fmt("V_opt at T=%.3g", mid.T_total) + fmt(": %.0f SNU (reference 300)", o.modulation_variance) +
         (o.found ? "" : " (no optimum)"));
}

// 4. Noll agreement of Zernike variances
void c4() {
    Clock c;
    // large outer scale so the Kolmogorov table applies; jittered low order
    const double r0 = 0.1, D = 0.6;
    const int N = 256, ap = 64, M = 4000;
    std::vector<std::array<double, kModes>> coeffs(M);
    std::vector<double> res2(M);
    for (int m = 0; m < M; ++m) {
        ScreenOptions o;
        o.low_order = LowOrder::jittered;
        o.index = static_cast<std::uint64_t>(m);
        o.aperture = D * N / ap;
        auto s = generate_screen(r0, N, D / ap, 1e6, 1e-4, 2024, o);
        s.aperture = D;
        const auto d = decompose(s);
        coeffs[m] = d.v.c;
        res2[m] = d.residual_rms * d.residual_rms;
    }
    const double scale = std::pow(D / r0, 5.0 / 3.0);
    std::array<double, kModes> var{};
    for (const auto& v : coeffs)
        for (int j = 0; j < kModes; ++j) var[j] += v[j] * v[j] / (M * scale);
    double res15 = 0;
    for (double r : res2) res15 += r / (M * scale);

    bool ok = true;
    double worst_mode = 0, worst_res = 0;
    for (int j = 2; j <= kModes; ++j) {
        const double e = std::abs(var[j - 1] / noll_mode_variance(j) - 1);
        worst_mode = std::max(worst_mode, e);
    }
    // Delta_J = residual after 15 modes plus the variance of modes J+1..15
    for (int J = 1; J <= kModes; ++J) {
        double dj = res15;
        for (int j = J + 1; j <= kModes; ++j) dj += var[j - 1];
        const double e = std::abs(dj / noll_residual_variance(J, 1.0) - 1);
        worst_res = std::max(worst_res, e);
    }
    ok = worst_mode <= 0.10 && worst_res <= 0.10;
    const double t = c.s();
    report(4, ok && t < 300, "Noll mode and residual variances",
           fmt("worst per-mode error %.3f", worst_mode) + fmt(", worst residual error %.3f", worst_res) +
               fmt(", %.0f screens", M),
           t);
}

// 5. structure function against 6.88 (r/r0)^(5/3)
void c5() {
    Clock c;
    const auto sc = defaults();
    const double r0 = 0.1, L0 = sc.profile.outer_scale, l0 = sc.profile.inner_scale;
    const int N = 256, M = 500;
    const double dx = 0.04;  // grid spans 10 m so L0/10 fits
    const int lags[] = {5, 8, 12, 20, 32, 48, 62};
    std::vector<double> D(std::size(lags));
    for (int m = 0; m < M; ++m) {
        ScreenOptions o;
        o.low_order = LowOrder::jittered;
        o.index = static_cast<std::uint64_t>(m);
        const auto s = generate_screen(r0, N, dx, L0, l0, 55, o);
        for (std::size_t k = 0; k < std::size(lags); ++k) {
            const int L = lags[k];
            double acc = 0;
            for (int i = 0; i < N - L; ++i)
                for (int j = 0; j < N - L; ++j) {
                    const double a = s.at(i, j + L) - s.at(i, j), b = s.at(i + L, j) - s.at(i, j);
                    acc += a * a + b * b;
                }
            D[k] += acc / (2.0 * (N - L) * (N - L) * M);
        }
    }
    double worst = 0, worst_vk = 0;
    std::string d;
    for (std::size_t k = 0; k < std::size(lags); ++k) {
        const double r = lags[k] * dx;
        const double ratio = D[k] / oracle::kolmogorov_sf(r, r0);
        worst = std::max(worst, std::abs(ratio - 1));
        worst_vk = std::max(worst_vk, std::abs(D[k] / oracle::von_karman_sf(r, r0, L0, l0) - 1));
        d += fmt(" r=%.2f:", r) + fmt("%.3f", ratio);
    }
    report(5, worst <= 0.15, "structure function vs Kolmogorov", "D/6.88(r/r0)^5/3 at" + d, c.s());
    info(fmt("C5 same ensemble vs von Karman L0=25 m: worst relative error %.3f", worst_vk) +
         fmt("; von Karman/Kolmogorov at L0/10 = %.3f",
             oracle::von_karman_sf(L0 / 10, r0, L0, l0) / oracle::kolmogorov_sf(L0 / 10, r0)));
}

// 6. geometric transmittance oracle and monotonicity
void c6() {
    Clock c;
    std::mt19937_64 g(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const double w = 0.05 + 10 * u(g), a = 0.05 + 2 * u(g), ob = 0.9 * u(g);
        const double T = geometric_transmittance(w, a, ob, 0.0);
        worst = std::max(worst, std::abs(T / oracle::annulus_capture(w, a, ob) - 1));
    }
    // triples (d, a_r, obstruction); beam at least as wide as the aperture
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const double a = 0.1 + 1.5 * u(g), w = a * (1 + 10 * u(g)), ob = 0.8 * u(g), d = 3 * u(g);
        const double T = geometric_transmittance(w, a, ob, d);
        bad += geometric_transmittance(w, a, ob, d + 0.01 + 0.3 * u(g)) > T * (1 + 1e-3);
        bad += geometric_transmittance(w, a * (1.01 + 0.3 * u(g)), ob, d) < T * (1 - 1e-3);
        bad += geometric_transmittance(w, a, std::min(0.95, ob + 0.01 + 0.1 * u(g)), d) > T * (1 + 1e-3);
    }
    report(6, worst <= 1e-3 && bad == 0, "geometric transmittance oracle",
           fmt("max rel err %.2e on 100 sets", worst) + fmt(", %.0f monotonicity violations in 1000 triples", bad),
           c.s());
}

// 7. attenuator staleness
void c7() {
    Clock c;
    const auto sc = defaults();
    const auto r = quantization_report(sc.pass, sc.limits);
    const bool ok = std::abs(r.zenith_step_deg - 0.35) <= 0.05 && std::abs(r.edge_step_deg - 0.6) <= 0.05;
    report(7, ok, "VOA angular step per update",
           fmt("zenith %.4f deg (target 0.35), ", r.zenith_step_deg) +
               fmt("30 deg edge %.4f deg (target 0.6)", r.edge_step_deg),
           c.s());
}

// 8. distribution shapes
void c8() {
    Clock c;
    const auto sc = defaults();
    SeriesOptions so;
    so.sample_rate = 1e4 / sc.pass.pass_duration;
    const auto s = simulate_losses(sc.pass, sc.profile, optics_nm(sc, 1550), sc.direction, sc.seed, so);
    const auto pf = fit_distribution(pointing_loss_db(s), Family::weibull);
    const auto sf = fit_distribution(scintillation_factors(s), Family::lognormal);
    const bool ok = pf.p_value > 0.01 && sf.p_value > 0.01;
    report(8, ok, "pointing Weibull / scintillation lognormal K-S",
           fmt("Weibull p=%.3g", pf.p_value) + fmt(" (k=%.3f", pf.p1) + fmt(", n=%.0f)", double(pf.n)) +
               fmt(", lognormal p=%.3g", sf.p_value) + fmt(" (n=%.0f)", double(sf.n)),
           c.s());
}

// 9. key-rate physics properties
void c9() {
    Clock c;
    std::mt19937_64 g(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto draw = [&] {
        KeyRateParams p;
        p.modulation_variance = 1 + 500 * u(g);
        p.reconciliation = 0.9 + 0.1 * u(g);
        p.excess_noise = 0.02 * u(g);
        p.detector_efficiency = 0.5 + 0.5 * u(g);
        p.electronic_noise = 0.05 * u(g);
        p.eve_transmittance = 0.05 * u(g);
        return p;
    };
    double chi0 = 0, min_lambda = 1e300, mi_err = 0;
    int mono = 0;
    for (int i = 0; i < 1000; ++i) {
        auto p = draw();
        const double T = std::exp(std::log(1e-5) * u(g));
        p.eve_transmittance = std::min(p.eve_transmittance, 0.5 * (1 - T));
        auto p0 = p;
        p0.eve_transmittance = 0;
        chi0 = std::max(chi0, std::abs(holevo_los(T, p0).chi));
        for (double l : holevo_los(T, p).lambda) min_lambda = std::min(min_lambda, l);
        const double k = key_rate(T, p).rate;
        auto px = p;
        px.excess_noise += 1e-4 + 0.01 * u(g);
        mono += key_rate(T, px).rate > k + 1e-12;
        auto pe = p;
        pe.eve_transmittance = std::min(1 - T, p.eve_transmittance + 1e-4 + 0.05 * u(g));
        mono += key_rate(T, pe).rate > k + 1e-12;
        const double mi = mutual_information(T, p);
        const double ref = oracle::mutual_information(T, p.modulation_variance, p.excess_noise,
                                                      p.detector_efficiency, p.electronic_noise);
        mi_err = std::max(mi_err, std::abs(mi / ref - 1));
    }
    const bool ok = chi0 <= 1e-9 && min_lambda >= 1 - 1e-9 && mono == 0 && mi_err <= 1e-12;
    report(9, ok, "key-rate physics properties",
           fmt("max |chi(T_E=0)| %.1e", chi0) + fmt(", min eigenvalue %.6f", min_lambda) +
               fmt(", %.0f monotonicity violations", mono) + fmt(", I_AB max rel err %.1e", mi_err),
           c.s());
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        out[e.path().filename().string()] = ss.str();
    }
    return out;
}

// 10. byte determinism of every CLI subcommand
void c10(const std::string& cli) {
    Clock c;
    const fs::path root = fs::temp_directory_path() / "fsochan_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg = root / "small.json";
    std::ofstream(cfg) << R"({
  "seed": 11,
  "pass": {"pass_duration": 6.0},
  "sampling": {"sample_rate": 50},
  "screens": {"N": 64, "aperture_pixels": 32, "count": 3, "rate": 2, "low_order": "jittered"},
  "wavelengths": [{"wavelength_nm": 1550}, {"wavelength_nm": 630}]
})";
    const char* cmds[] = {"simulate-pass", "gen-screens", "keyrate", "device-plan", "fit-dist", "quantization-report"};
    int same = 0, n = 0;
    std::string d;
    for (const char* cmd : cmds) {
        const fs::path out = root / cmd;
        std::map<std::string, std::string> runs[2];
        bool ran = true;
        for (auto& r : runs) {
            fs::remove_all(out);
            const std::string line = "\"" + cli + "\" " + cmd + " --config \"" + cfg.string() + "\" --out \"" +
                                     out.string() + "\" > /dev/null";
            ran = ran && std::system(line.c_str()) == 0;
            if (ran) r = snapshot(out);
        }
        ++n;
        const bool ok = ran && runs[0].size() > 1 && runs[0] == runs[1];
        same += ok;
        if (!ok) d += std::string(" ") + cmd + (ran ? " differs" : " failed to run");
    }
    fs::remove_all(root);
    report(10, same == n, "byte-identical reruns", fmt("%.0f/", same) + fmt("%.0f subcommands", n) + d, c.s());
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <fsochan cli>\n");
        return 2;
    }
    std::vector<int> only;
    for (int i = 2; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
    if (want(1)) c1();
    if (want(2)) c2();
    if (want(3)) c3();
    if (want(4)) c4();
    if (want(5)) c5();
    if (want(6)) c6();
    if (want(7)) c7();
    if (want(8)) c8();
    if (want(9)) c9();
    if (want(10)) c10(argv[1]);
    std::printf("%d criteria failed\n", failures);
    return failures ? 1 : 0;
}
