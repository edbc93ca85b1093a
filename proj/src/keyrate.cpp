#include "fsochan/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fsochan {

const char* to_string(EveModel m) { return m == EveModel::line_of_sight ? "line_of_sight" : "full"; }

void KeyRateParams::validate() const {
    std::ostringstream err;
    if (!(modulation_variance > 0)) err << "keyrate.modulation_variance must be > 0\n";
    if (!(reconciliation > 0 && reconciliation <= 1)) err << "keyrate.reconciliation must be in (0,1]\n";
    if (!(excess_noise >= 0)) err << "keyrate.excess_noise must be >= 0\n";
    if (!(detector_efficiency > 0 && detector_efficiency <= 1)) err << "keyrate.detector_efficiency must be in (0,1]\n";
    if (!(electronic_noise >= 0)) err << "keyrate.electronic_noise must be >= 0\n";
    if (!(eve_transmittance >= 0 && eve_transmittance <= 1)) err << "keyrate.eve_transmittance must be in [0,1]\n";
    if (!(clock_rate > 0)) err << "keyrate.clock_rate must be > 0\n";
    if (!err.str().empty()) throw DomainError(err.str());
}

double entropy_g(double x) {
    if (x <= 0.0) return 0.0;
    return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

namespace {

struct Chi {
    double line, hom, tot;
};

Chi noise(double T, const KeyRateParams& p) {
    Chi c;
    c.line = (1.0 - T) / T + p.excess_noise;
    c.hom = (1.0 - p.detector_efficiency) / p.detector_efficiency + p.electronic_noise;
    c.tot = c.line + c.hom / T;
    return c;
}

// Symplectic eigenvalues of a two-mode state from tr(XP) and det X det P.
std::pair<double, double> two_mode_eigs(double A, double B) {
    const double disc = std::sqrt(std::max(A * A - 4.0 * B, 0.0));
    return {std::sqrt(std::max((A + disc) / 2.0, 0.0)), std::sqrt(std::max((A - disc) / 2.0, 0.0))};
}

}  // namespace

double mutual_information(double T, const KeyRateParams& p) {
    if (!(T >= 0 && T <= 1)) throw DomainError("mutual_information: T outside [0,1]");
    if (T == 0) return 0.0;
    const auto c = noise(T, p);
    // (V + chi)/(1 + chi) = 1 + V_A/(1 + chi)
    return 0.5 * std::log1p(p.modulation_variance / (1.0 + c.tot)) / std::numbers::ln2;
}

Holevo holevo_los(double T, const KeyRateParams& p) {
    if (!(T > 0 && T <= 1)) throw DomainError("holevo_los: T outside (0,1]");
    const double TE = p.eve == EveModel::full ? 1.0 - T : p.eve_transmittance;
    if (TE > 1.0 - T + 1e-12) throw DomainError("holevo_los: eve_transmittance exceeds 1 - T");
    Holevo h;
    if (TE <= 0.0) return h;  // Eve holds vacuum

    // Eve taps TE with a beam splitter fed by one arm of a two-mode squeezed
    // vacuum of variance W; the remaining loss is outside her reach.
    const double V = p.modulation_variance + 1.0;
    const double tau = 1.0 - TE;
    const double W = 1.0 + p.excess_noise * tau / TE;
    const double s = std::sqrt(W * W - 1.0);
    const double eta = p.detector_efficiency;

    // x block [[a, c],[c, b]]; p block [[a, -c],[-c, b]]
    const double a = TE * V + tau * W, b = W, c = std::sqrt(tau) * s;
    const double detX = a * b - c * c;
    const double A = a * a + b * b - 2.0 * c * c;
    const double B = detX * detX;

    // conditioning on Bob's x quadrature
    const double VB = eta * T * (V + noise(T, p).tot);
    const double u1 = std::sqrt(eta * T * TE) * (W - V);
    const double u2 = std::sqrt(eta * T * TE / tau) * s;
    const double ac = a - u1 * u1 / VB, bc = b - u2 * u2 / VB, cc = c - u1 * u2 / VB;
    // tr(Xc P) and det Xc det P
    const double C = ac * a + bc * b - 2.0 * cc * c;
    const double D = (ac * bc - cc * cc) * detX;

    const auto [l1, l2] = two_mode_eigs(A, B);
    const auto [l3, l4] = two_mode_eigs(C, D);
    h.lambda = {l1, l2, l3, l4, 1.0};
    for (double l : h.lambda) {
        if (!(l >= 1.0 - 1e-9)) {
            std::ostringstream os;
            os.precision(17);
            os << "T=" << T << " T_E=" << TE << " lambda=";
            for (double x : h.lambda) os << x << ' ';
            throw PhysicalityError("holevo_los: symplectic eigenvalue below 1", os.str());
        }
    }
    auto g = [](double l) { return entropy_g(std::max((l - 1.0) / 2.0, 0.0)); };
    h.chi = g(l1) + g(l2) - g(l3) - g(l4) - g(1.0);
    return h;
}

KeyRate key_rate(double T, const KeyRateParams& p) {
    KeyRate k;
    if (T <= 0.0) {
        k.zero_transmittance = true;
        k.clamped = true;
        return k;
    }
    k.mutual_information = mutual_information(T, p);
    k.holevo = holevo_los(T, p).chi;
    const double raw = p.reconciliation * k.mutual_information - k.holevo;
    k.clamped = raw <= 0.0;
    k.rate = std::max(raw, 0.0);
    return k;
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

namespace {

std::vector<double> rates(const std::vector<double>& T, const KeyRateParams& p, std::size_t* clamped) {
    std::vector<double> r(T.size());
    std::size_t nc = 0;
    for (std::size_t i = 0; i < T.size(); ++i) {
        const auto k = key_rate(T[i], p);
        r[i] = k.rate;
        nc += k.clamped;
    }
    if (clamped) *clamped = nc;
    return r;
}

double mean_rate(const std::vector<double>& T, const KeyRateParams& p) {
    const auto r = rates(T, p, nullptr);
    return pairwise_sum(r.data(), r.size()) / static_cast<double>(r.size());
}

}  // namespace

PassKey key_bits_per_pass(const std::vector<double>& T_total, double dt, double coupling, const KeyRateParams& p) {
    PassKey out;
    if (T_total.empty()) return out;
    std::vector<double> T = T_total;
    if (!p.include_coupling)
        for (auto& t : T) t = std::min(t / coupling, 1.0);
    std::size_t nc = 0;
    const auto r = rates(T, p, &nc);
    const double total = pairwise_sum(r.data(), r.size());
    out.bits = total * p.clock_rate * dt;
    out.mean_rate = total / static_cast<double>(r.size());
    out.clamped_fraction = static_cast<double>(nc) / static_cast<double>(r.size());
    return out;
}

ModulationOptimum optimize_modulation(const std::vector<double>& T_profile, const KeyRateParams& p0) {
    ModulationOptimum out;
    if (T_profile.empty()) return out;
    KeyRateParams p = p0;
    auto f = [&](double va) {
        p.modulation_variance = va;
        return mean_rate(T_profile, p);
    };
    const double lo = 0.1, hi = 1e4;
    // coarse log grid locates the bracket; golden section refines it
    constexpr int n = 81;
    std::vector<double> x(n), y(n);
    int best = 0;
    for (int i = 0; i < n; ++i) {
        x[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
        y[i] = f(x[i]);
        if (y[i] > y[best]) best = i;
    }
    if (y[best] <= 0.0) return out;
    double a = x[std::max(best - 1, 0)], b = x[std::min(best + 1, n - 1)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1.0) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    double xm = (a + b) / 2.0, ym = f(xm);
    if (ym < y[best]) {  // bracket failure: keep the grid point
        xm = x[best];
        ym = y[best];
    }
    out.found = true;
    out.modulation_variance = xm;
    out.mean_rate = ym;
    return out;
}

}  // namespace fsochan
