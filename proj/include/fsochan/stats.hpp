#pragma once

#include <string>
#include <vector>

namespace fsochan {

enum class Family { weibull, lognormal };
const char* to_string(Family f);

struct FitResult {
    Family family = Family::weibull;
    bool degenerate = false;
    // weibull: shape k, scale lambda. lognormal: mu, sigma of ln x.
    double p1 = 0.0, p2 = 0.0;
    double ks_statistic = 0.0;
    double p_value = 0.0;
    std::size_t n = 0;
};

// Maximum-likelihood fit plus one-sample K-S test against the fitted law.
// Needs >= 100 strictly positive samples; zero spread gives degenerate = true.
FitResult fit_distribution(const std::vector<double>& samples, Family family);

// Asymptotic Kolmogorov tail probability with Stephens' finite-n correction.
double ks_p_value(double D, std::size_t n);

double sample_mean(const std::vector<double>& x);
double sample_stddev(const std::vector<double>& x);  // n-1

}  // namespace fsochan
