#include "fsochan/zernike.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <shared_mutex>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "fsochan/errors.hpp"

namespace fsochan {

const char* to_string(ZernikeUnits u) { return u == ZernikeUnits::radians ? "rad" : "m"; }

std::pair<int, int> noll_to_nm(int j) {
    if (j < 1) throw DomainError("noll_to_nm: j must be >= 1");
    int n = 0;
    while ((n + 1) * (n + 2) / 2 < j) ++n;
    const int k = j - n * (n + 1) / 2 - 1;  // position within radial order n
    int m = (n % 2 == 0) ? 2 * ((k + 1) / 2) : 2 * (k / 2) + 1;
    if (m != 0 && j % 2 == 1) m = -m;  // odd j -> sine
    return {n, m};
}

double zernike_radial(int n, int m, double rho) {
    if (m < 0 || m > n || (n - m) % 2 != 0) throw DomainError("zernike_radial: need 0 <= m <= n, n-m even");
    if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("zernike_radial: rho outside [0,1]");
    const int dp = (n + m) / 2, dm = (n - m) / 2;
    auto fact = [](int x) { return std::tgamma(x + 1.0); };
    double r = 0.0;
    for (int s = 0; s <= dm; ++s) {
        const double c = ((s % 2) ? -1.0 : 1.0) * fact(n - s) / (fact(s) * fact(dp - s) * fact(dm - s));
        r += c * std::pow(rho, n - 2 * s);
    }
    return r;
}

double zernike_mode(int j, double rho, double psi) {
    if (j < 1 || j > kModes) throw DomainError("zernike_mode: j outside [1,15]");
    const auto [n, m] = noll_to_nm(j);
    const int am = std::abs(m);
    const double R = zernike_radial(n, am, rho);
    if (m == 0) return std::sqrt(n + 1.0) * R;
    const double ang = m > 0 ? std::cos(am * psi) : std::sin(am * psi);
    return std::sqrt(2.0 * (n + 1.0)) * R * ang;
}

namespace {

struct Basis {
    int N = 0;
    std::vector<int> mask;     // flat indices inside the aperture
    Eigen::MatrixXd Z;         // npix x 15
    Eigen::MatrixXd pinv;      // 15 x npix
};

struct BasisKey {
    int N;
    double radius_px;
    bool operator<(const BasisKey& o) const {
        return N != o.N ? N < o.N : radius_px < o.radius_px;
    }
};

std::shared_ptr<const Basis> build_basis(int N, double radius_px) {
    auto b = std::make_shared<Basis>();
    b->N = N;
    const double c = N / 2.0 - 0.5;
    std::vector<std::pair<double, double>> polar;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const double x = j - c, y = i - c;
            const double rho = std::hypot(x, y) / radius_px;
            if (rho <= 1.0) {
                b->mask.push_back(i * N + j);
                polar.emplace_back(rho, std::atan2(y, x));
            }
        }
    if (b->mask.size() < static_cast<std::size_t>(kModes))
        throw DomainError("decompose: aperture mask has fewer than 15 pixels");
    b->Z.resize(static_cast<Eigen::Index>(polar.size()), kModes);
    for (std::size_t p = 0; p < polar.size(); ++p)
        for (int j = 1; j <= kModes; ++j)
            b->Z(static_cast<Eigen::Index>(p), j - 1) = zernike_mode(j, polar[p].first, polar[p].second);
    const Eigen::MatrixXd G = b->Z.transpose() * b->Z;
    b->pinv = G.ldlt().solve(b->Z.transpose());
    return b;
}

std::shared_ptr<const Basis> basis_for(int N, double radius_px) {
    static std::shared_mutex mu;
    static std::map<BasisKey, std::shared_ptr<const Basis>> cache;
    const BasisKey key{N, radius_px};
    {
        std::shared_lock lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto b = build_basis(N, radius_px);
    std::unique_lock lock(mu);
    return cache.emplace(key, std::move(b)).first->second;
}

}  // namespace

Decomposition decompose(const PhaseScreen& s) {
    if (s.N <= 0 || s.grid.size() != static_cast<std::size_t>(s.N) * s.N)
        throw DomainError("decompose: malformed screen");
    const double ap = s.aperture > 0 ? s.aperture : s.N * s.pixel_scale;
    const double radius_px = ap / 2.0 / s.pixel_scale;
    const auto b = basis_for(s.N, radius_px);

    Eigen::VectorXd v(static_cast<Eigen::Index>(b->mask.size()));
    for (std::size_t p = 0; p < b->mask.size(); ++p) v(static_cast<Eigen::Index>(p)) = s.grid[b->mask[p]];
    const Eigen::VectorXd a = b->pinv * v;
    const Eigen::VectorXd r = v - b->Z * a;

    Decomposition d;
    for (int j = 0; j < kModes; ++j) d.v.c[j] = a(j);
    d.v.aperture_radius = ap / 2.0;
    d.residual.assign(s.grid.size(), 0.0);
    for (std::size_t p = 0; p < b->mask.size(); ++p) d.residual[b->mask[p]] = r(static_cast<Eigen::Index>(p));
    const double n = static_cast<double>(b->mask.size());
    d.residual_rms = std::sqrt(r.squaredNorm() / n);
    d.screen_rms = std::sqrt(v.squaredNorm() / n);
    return d;
}

PhaseScreen synthesize(const ZernikeVector& v, int N, double pixel_scale, double aperture) {
    PhaseScreen s;
    s.N = N;
    s.pixel_scale = pixel_scale;
    s.aperture = aperture;
    s.grid.assign(static_cast<std::size_t>(N) * N, 0.0);
    const auto b = basis_for(N, aperture / 2.0 / pixel_scale);
    Eigen::VectorXd a(kModes);
    for (int j = 0; j < kModes; ++j) a(j) = v.c[j];
    const Eigen::VectorXd w = b->Z * a;
    for (std::size_t p = 0; p < b->mask.size(); ++p) s.grid[b->mask[p]] = w(static_cast<Eigen::Index>(p));
    return s;
}

namespace {
// Noll (1976) residual table, J = 1..15.
constexpr std::array<double, kModes> kNollDelta = {
    1.0299, 0.582, 0.134, 0.111, 0.0880, 0.0648, 0.0587, 0.0525,
    0.0463, 0.0401, 0.0377, 0.0352, 0.0328, 0.0304, 0.0279};
}  // namespace

double noll_residual_variance(int j_max, double D_over_r0) {
    if (j_max < 1 || j_max > kModes) throw DomainError("noll_residual_variance: J outside [1,15]");
    if (!(D_over_r0 > 0)) throw DomainError("noll_residual_variance: D/r0 must be > 0");
    return kNollDelta[j_max - 1] * std::pow(D_over_r0, 5.0 / 3.0);
}

double noll_mode_variance(int j) {
    if (j < 2) throw DomainError("noll_mode_variance: piston variance is unbounded");
    const int n = noll_to_nm(j).first;
    using boost::math::tgamma;
    const double pi = std::numbers::pi;
    return 0.0072 * (n + 1) * std::pow(pi, 8.0 / 3.0) * tgamma(14.0 / 3.0) * tgamma(n - 5.0 / 6.0) /
           (tgamma(17.0 / 6.0) * tgamma(17.0 / 6.0) * tgamma(n + 23.0 / 6.0));
}

void write_zernike_csv(std::ostream& os, const std::vector<std::pair<double, ZernikeVector>>& rows,
                       const std::string& header_note) {
    const char* units = rows.empty() ? "rad" : to_string(rows.front().second.units);
    os << "# zernike noll modes 1-15, units=" << units;
    if (!header_note.empty()) os << ", " << header_note;
    os << "\n";
    os << "t_s";
    for (int j = 1; j <= kModes; ++j) os << ",c" << j;
    os << "\n";
    char buf[64];
    for (const auto& [t, v] : rows) {
        std::snprintf(buf, sizeof buf, "%.9g", t);
        os << buf;
        for (double c : v.c) {
            std::snprintf(buf, sizeof buf, "%.9g", c);
            os << ',' << buf;
        }
        os << "\n";
    }
}

}  // namespace fsochan
