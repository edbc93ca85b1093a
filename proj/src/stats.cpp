#include "fsochan/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/weibull.hpp>
#include <boost/math/tools/roots.hpp>

#include "fsochan/errors.hpp"

namespace fsochan {

const char* to_string(Family f) { return f == Family::weibull ? "weibull" : "lognormal"; }

double sample_mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double sample_stddev(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = sample_mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double ks_p_value(double D, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lam = (sn + 0.12 + 0.11 / sn) * D;
    if (lam < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lam * lam);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

template <class Cdf>
double ks_statistic(std::vector<double> x, Cdf cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double D = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = cdf(x[i]);
        D = std::max({D, (static_cast<double>(i) + 1.0) / n - F, F - static_cast<double>(i) / n});
    }
    return D;
}

// Weibull shape MLE: 1/k + mean(ln x) - sum(x^k ln x)/sum(x^k) = 0 (on x scaled by max for stability)
double weibull_shape(const std::vector<double>& x) {
    const double xmax = *std::max_element(x.begin(), x.end());
    std::vector<double> lx(x.size());
    double mlx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx[i] = std::log(x[i] / xmax);
        mlx += lx[i];
    }
    mlx /= static_cast<double>(x.size());
    auto score = [&](double k) {
        double s0 = 0.0, s1 = 0.0;
        for (double l : lx) {
            const double e = std::exp(k * l);
            s0 += e;
            s1 += e * l;
        }
        return 1.0 / k + mlx - s1 / s0;
    };
    double lo = 1e-3, hi = 1.0;
    while (score(hi) > 0 && hi < 1e6) hi *= 2.0;
    boost::uintmax_t it = 200;
    const auto r = boost::math::tools::toms748_solve(score, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
    return (r.first + r.second) / 2.0;
}

}  // namespace

FitResult fit_distribution(const std::vector<double>& x, Family family) {
    if (x.size() < 100) throw DomainError("fit_distribution: need at least 100 samples");
    for (double v : x)
        if (!(v > 0) || !std::isfinite(v)) throw DomainError("fit_distribution: samples must be finite and > 0");
    FitResult f;
    f.family = family;
    f.n = x.size();
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    if (*mn == *mx) {
        f.degenerate = true;
        f.p1 = *mn;
        return f;
    }
    if (family == Family::weibull) {
        f.p1 = weibull_shape(x);
        double s = 0.0;
        for (double v : x) s += std::pow(v / *mx, f.p1);
        f.p2 = *mx * std::pow(s / static_cast<double>(x.size()), 1.0 / f.p1);
        boost::math::weibull_distribution<double> d(f.p1, f.p2);
        f.ks_statistic = ks_statistic(x, [&](double v) { return boost::math::cdf(d, v); });
    } else {
        std::vector<double> lx(x.size());
        std::transform(x.begin(), x.end(), lx.begin(), [](double v) { return std::log(v); });
        f.p1 = sample_mean(lx);
        double s = 0.0;
        for (double v : lx) s += (v - f.p1) * (v - f.p1);
        f.p2 = std::sqrt(s / static_cast<double>(lx.size()));
        boost::math::lognormal_distribution<double> d(f.p1, f.p2);
        f.ks_statistic = ks_statistic(x, [&](double v) { return boost::math::cdf(d, v); });
    }
    f.p_value = ks_p_value(f.ks_statistic, f.n);
    return f;
}

}  // namespace fsochan
