#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fsochan/errors.hpp"
#include "fsochan/zernike.hpp"

using namespace fsochan;

namespace {
PhaseScreen blank(int N, double aperture_px) {
    PhaseScreen s;
    s.N = N;
    s.pixel_scale = 0.01;
    s.aperture = aperture_px * s.pixel_scale;
    s.grid.assign(static_cast<std::size_t>(N) * N, 0.0);
    return s;
}

double mask_ms(const PhaseScreen& s, const std::vector<double>& g) {
    const double c = s.N / 2.0 - 0.5, R = s.aperture / (2 * s.pixel_scale);
    double acc = 0;
    int n = 0;
    for (int i = 0; i < s.N; ++i)
        for (int j = 0; j < s.N; ++j)
            if (std::hypot(j - c, i - c) <= R) {
                acc += g[static_cast<std::size_t>(i) * s.N + j] * g[static_cast<std::size_t>(i) * s.N + j];
                ++n;
            }
    return acc / n;
}
}  // namespace

TEST_CASE("radial polynomials") {
    for (double r : {0.0, 0.3, 0.77, 1.0}) {
        CHECK(zernike_radial(0, 0, r) == 1.0);
        CHECK(zernike_radial(1, 1, r) == doctest::Approx(r));
    }
    CHECK(zernike_radial(2, 0, 0.5) == doctest::Approx(-0.5));
    CHECK(zernike_radial(4, 0, 0.5) == doctest::Approx(6 * 0.0625 - 6 * 0.25 + 1));
    CHECK_THROWS_AS(zernike_radial(3, 0, 0.5), DomainError);
    CHECK_THROWS_AS(zernike_radial(2, 4, 0.5), DomainError);
    CHECK_THROWS_AS(zernike_radial(2, 0, 1.5), DomainError);
}

TEST_CASE("Noll index mapping") {
    const std::pair<int, int> want[] = {{0, 0}, {1, 1},  {1, -1}, {2, 0}, {2, -2}, {2, 2},  {3, -1}, {3, 1},
                                        {3, -3}, {3, 3}, {4, 0},  {4, 2}, {4, -2}, {4, 4}, {4, -4}};
    for (int j = 1; j <= 15; ++j) CHECK(noll_to_nm(j) == want[j - 1]);
}

TEST_CASE("mode values") {
    CHECK(zernike_mode(1, 0.4, 1.1) == 1.0);
    CHECK(zernike_mode(4, 1.0, 0.2) == doctest::Approx(std::sqrt(3.0)));
    CHECK(zernike_mode(2, 1.0, 0.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(zernike_mode(16, 0.5, 0.0), DomainError);
    CHECK_THROWS_AS(zernike_mode(0, 0.5, 0.0), DomainError);
}

TEST_CASE("orthonormal on a 512 grid") {
    // 4x4 sub-pixel sampling so the disk edge is resolved
    const int N = 512, S = 4;
    const double R = N / 2.0;
    double G[15][15] = {};
    double area = 0;
    double z[15];
    for (int i = 0; i < N * S; ++i)
        for (int j = 0; j < N * S; ++j) {
            const double x = (j + 0.5) / S - R, y = (i + 0.5) / S - R;
            const double rho = std::hypot(x, y) / R;
            if (rho > 1) continue;
            const double psi = std::atan2(y, x);
            for (int a = 0; a < 15; ++a) z[a] = zernike_mode(a + 1, rho, psi);
            for (int a = 0; a < 15; ++a)
                for (int b = a; b < 15; ++b) G[a][b] += z[a] * z[b];
            area += 1;
        }
    for (int a = 0; a < 15; ++a)
        for (int b = a; b < 15; ++b) CHECK(std::abs(G[a][b] / area - (a == b ? 1.0 : 0.0)) < 1e-3);
}

TEST_CASE("decompose a pure mode and a zero screen") {
    ZernikeVector v;
    v[5] = 2.0;
    const auto s = synthesize(v, 128, 0.01, 1.0);
    const auto d = decompose(s);
    for (int j = 1; j <= 15; ++j) CHECK(std::abs(d.v[j] - (j == 5 ? 2.0 : 0.0)) < 1e-6);
    CHECK(d.v.units == ZernikeUnits::radians);
    CHECK(d.v.aperture_radius == doctest::Approx(0.5));

    const auto z = decompose(blank(64, 40));
    for (double c : z.v.c) CHECK(c == 0.0);
    CHECK(z.residual_rms == 0.0);
}

TEST_CASE("round trip of random coefficient vectors on a 256 grid") {
    std::mt19937_64 g(5);
    std::normal_distribution<double> n;
    for (int rep = 0; rep < 20; ++rep) {
        ZernikeVector v;
        for (double& c : v.c) c = n(g);
        const auto d = decompose(synthesize(v, 256, 0.004, 1.0));
        for (int j = 1; j <= 15; ++j) CHECK(std::abs(d.v[j] - v[j]) < 1e-3);
    }
}

TEST_CASE("random screen: projection never increases residual energy, reconstruction identity") {
    std::mt19937_64 g(9);
    std::normal_distribution<double> n;
    auto s = blank(96, 80);
    for (double& x : s.grid) x = n(g);
    const auto d = decompose(s);
    CHECK(d.residual_rms < d.screen_rms);
    const auto rec = synthesize(d.v, s.N, s.pixel_scale, s.aperture);
    const double c = s.N / 2.0 - 0.5, R = 40;
    double worst = 0;
    for (int i = 0; i < s.N; ++i)
        for (int j = 0; j < s.N; ++j) {
            const auto k = static_cast<std::size_t>(i) * s.N + j;
            if (std::hypot(j - c, i - c) <= R)
                worst = std::max(worst, std::abs(rec.grid[k] + d.residual[k] - s.grid[k]));
            else
                CHECK(d.residual[k] == 0.0);
        }
    CHECK(worst < 1e-12);
    CHECK(std::sqrt(mask_ms(s, d.residual)) == doctest::Approx(d.residual_rms).epsilon(1e-12));
}

TEST_CASE("degenerate aperture is rejected") {
    CHECK_THROWS_AS(decompose(blank(32, 3)), DomainError);
    auto bad = blank(32, 20);
    bad.grid.pop_back();
    CHECK_THROWS(decompose(bad));
}

TEST_CASE("Noll residual table") {
    CHECK(noll_residual_variance(1, 1.0) == doctest::Approx(1.0299));
    CHECK(noll_residual_variance(3, 1.0) == doctest::Approx(0.134));
    CHECK(noll_residual_variance(6, 2.0) ==
          doctest::Approx(std::pow(2.0, 5.0 / 3.0) * noll_residual_variance(6, 1.0)).epsilon(1e-14));
    for (int j = 2; j <= 15; ++j) CHECK(noll_residual_variance(j, 1) < noll_residual_variance(j - 1, 1));
    CHECK_THROWS_AS(noll_residual_variance(16, 1.0), DomainError);
    CHECK_THROWS_AS(noll_residual_variance(3, 0.0), DomainError);
}

TEST_CASE("table differences agree with single-mode variances") {
    // Delta_{J-1} - Delta_J is the variance of mode J
    for (int j = 2; j <= 15; ++j) {
        const double diff = noll_residual_variance(j - 1, 1) - noll_residual_variance(j, 1);
        CHECK(noll_mode_variance(j) == doctest::Approx(diff).epsilon(0.03));
    }
}

TEST_CASE("Monte Carlo residual variances against the table") {
    const int N = 128, ap = 32, M = 1000;
    const double D = 0.6, r0 = 0.1;
    double d1 = 0, d3 = 0;
    for (int k = 0; k < M; ++k) {
        ScreenOptions o;
        o.low_order = LowOrder::jittered;
        o.index = static_cast<std::uint64_t>(k);
        o.aperture = D;
        const auto s = generate_screen(r0, N, D / ap, 1e6, 1e-4, 77, o);
        const auto dec = decompose(s);
        auto rest = dec.v;
        rest[1] = 0;
        const auto piston = synthesize(rest, N, s.pixel_scale, D);
        // grid minus piston: residual plus every fitted mode except piston
        std::vector<double> g1(s.grid.size()), g3(s.grid.size());
        auto tt = rest;
        tt[2] = tt[3] = 0;
        const auto hi = synthesize(tt, N, s.pixel_scale, D);
        for (std::size_t i = 0; i < g1.size(); ++i) {
            g1[i] = dec.residual[i] + piston.grid[i];
            g3[i] = dec.residual[i] + hi.grid[i];
        }
        d1 += mask_ms(s, g1);
        d3 += mask_ms(s, g3);
    }
    const double norm = std::pow(D / r0, 5.0 / 3.0) * M;
    MESSAGE("Delta1 " << d1 / norm << " Delta3 " << d3 / norm);
    CHECK(d1 / norm == doctest::Approx(1.0299).epsilon(0.10));
    CHECK(d3 / norm == doctest::Approx(0.134).epsilon(0.10));
}

TEST_CASE("csv writer") {
    ZernikeVector v;
    v[4] = 0.5;
    std::ostringstream os;
    write_zernike_csv(os, {{0.1, v}}, "wavelength_nm=1550");
    CHECK(os.str().find("t_s,c1,c2") != std::string::npos);
    CHECK(os.str().find("0.1,0,0,0,0.5,0") != std::string::npos);
}
