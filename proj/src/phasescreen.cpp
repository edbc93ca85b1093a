#include "fsochan/phasescreen.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fftw3.h>

#include "fsochan/errors.hpp"
#include "fsochan/rng.hpp"

namespace fsochan {

const char* to_string(LowOrder m) { return m == LowOrder::none ? "none" : "jittered"; }

namespace {

constexpr double pi = std::numbers::pi;

// fftw_plan creation is not thread safe; executing a plan on new arrays is.
class PlanCache {
public:
    fftw_plan get(int N) {
        std::lock_guard lock(mu_);
        auto it = plans_.find(N);
        if (it != plans_.end()) return it->second;
        auto* buf = fftw_alloc_complex(static_cast<std::size_t>(N) * N);
        fftw_plan p = fftw_plan_dft_2d(N, N, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_free(buf);
        plans_.emplace(N, p);
        return p;
    }
    ~PlanCache() {
        for (auto& [n, p] : plans_) fftw_destroy_plan(p);
    }

private:
    std::mutex mu_;
    std::map<int, fftw_plan> plans_;
};

PlanCache& plans() {
    static PlanCache c;
    return c;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : p(fftw_alloc_complex(n)) {}
    ~FftwBuffer() { fftw_free(p); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* p;
};

int freq_index(int k, int N) { return k < N / 2 ? k : k - N; }

}  // namespace

double phase_psd(double f, double r0, double L0, double l0) {
    const double fm = 5.92 / l0 / (2.0 * pi);
    const double f0 = 1.0 / L0;
    return 0.023 * std::pow(r0, -5.0 / 3.0) * std::exp(-(f / fm) * (f / fm)) /
           std::pow(f * f + f0 * f0, 11.0 / 6.0);
}

PhaseScreen generate_screen(double r0, int N, double dx, double L0, double l0, std::uint64_t seed,
                            const ScreenOptions& opt) {
    if (!(r0 > 0 && dx > 0 && L0 > 0 && l0 > 0)) throw DomainError("generate_screen: r0, pixel_scale, L0, l0 must be > 0");
    if (!(l0 < L0)) throw DomainError("generate_screen: l0 must be < L0");
    if (N < 64 || !std::has_single_bit(static_cast<unsigned>(N)))
        throw DomainError("generate_screen: N must be a power of two >= 64");

    PhaseScreen s;
    s.N = N;
    s.pixel_scale = dx;
    s.r0 = r0;
    s.L0 = L0;
    s.l0 = l0;
    s.seed = seed;
    s.index = opt.index;
    s.aperture = opt.aperture > 0 ? opt.aperture : N * dx;
    s.low_order = opt.low_order;
    if (s.aperture > N * dx * (1 + 1e-12)) throw DomainError("generate_screen: aperture larger than grid");
    if (N * dx < L0) {
        std::ostringstream w;
        w << "grid extent " << N * dx << " m does not resolve outer scale L0=" << L0 << " m";
        s.warnings.push_back(w.str());
    }

    Rng rng(seed, stream::screen, opt.index);
    const double df = 1.0 / (N * dx);
    const int inner = opt.low_order == LowOrder::jittered ? 2 : 0;
    const std::size_t NN = static_cast<std::size_t>(N) * N;

    FftwBuffer buf(NN);
    for (int i = 0; i < N; ++i) {
        const int b = freq_index(i, N);
        for (int j = 0; j < N; ++j) {
            const int a = freq_index(j, N);
            const double g1 = rng.normal(), g2 = rng.normal();
            double amp = 0.0;
            const bool low = std::abs(a) <= inner && std::abs(b) <= inner;
            if (!(a == 0 && b == 0) && !low) amp = std::sqrt(phase_psd(df * std::hypot(a, b), r0, L0, l0)) * df;
            auto* c = buf.p[static_cast<std::size_t>(i) * N + j];
            c[0] = g1 * amp;
            c[1] = g2 * amp;
        }
    }
    fftw_execute_dft(plans().get(N), buf.p, buf.p);
    s.grid.resize(NN);
    for (std::size_t k = 0; k < NN; ++k) s.grid[k] = buf.p[k][0];

    if (opt.low_order == LowOrder::jittered) {
        // Cells of the FFT lattice removed above, then subharmonic rings.
        struct Cell { double fx, fy, h; };
        std::vector<Cell> cells;
        for (int a = -inner; a <= inner; ++a)
            for (int b = -inner; b <= inner; ++b)
                if (a != 0 || b != 0) cells.push_back({a * df, b * df, df});
        double h = df;
        for (int p = 1; p <= opt.subharmonic_levels; ++p) {
            h /= 3.0;
            for (int a = -1; a <= 1; ++a)
                for (int b = -1; b <= 1; ++b)
                    if (a != 0 || b != 0) cells.push_back({a * h, b * h, h});
        }
        std::vector<std::complex<double>> ex(N), ey(N);
        for (const auto& c : cells) {
            const double ux = c.fx + (rng.uniform() - 0.5) * c.h;
            const double uy = c.fy + (rng.uniform() - 0.5) * c.h;
            const double amp = std::sqrt(phase_psd(std::hypot(ux, uy), r0, L0, l0)) * c.h;
            const std::complex<double> z(rng.normal() * amp, rng.normal() * amp);
            for (int k = 0; k < N; ++k) {
                const double x = (k - N / 2) * dx;
                ex[k] = std::polar(1.0, 2 * pi * ux * x);
                ey[k] = z * std::polar(1.0, 2 * pi * uy * x);
            }
            for (int i = 0; i < N; ++i) {
                double* row = &s.grid[static_cast<std::size_t>(i) * N];
                const std::complex<double> yi = ey[i];
                for (int j = 0; j < N; ++j)
                    row[j] += yi.real() * ex[j].real() - yi.imag() * ex[j].imag();
            }
        }
    }
    return s;
}

PhaseScreen screen_for_pass_point(const PathSample& sample, const TurbulenceProfile& profile,
                                  const OpticalSystem& optics, Direction dir, std::uint64_t seed,
                                  const OrbitPass& pass, const PassScreenOptions& opt) {
    const double I0 = path_integral(sample, profile, dir, pass);
    const double r0 = fried_parameter(I0, optics.wavelength);
    const double dx = optics.rx_aperture / opt.aperture_pixels;
    ScreenOptions so;
    so.low_order = opt.low_order;
    so.subharmonic_levels = opt.subharmonic_levels;
    so.index = opt.index;
    so.aperture = optics.rx_aperture;
    return generate_screen(r0, opt.N, dx, profile.outer_scale, profile.inner_scale, seed, so);
}

namespace {

constexpr char kMagic[8] = {'F', 'S', 'O', 'P', 'S', 'C', 'R', '1'};

template <class T>
void put(std::ostream& os, T v) {
    static_assert(std::endian::native == std::endian::little, "little-endian host assumed");
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw DomainError("read_screen_binary: truncated file");
    return v;
}

}  // namespace

void write_screen_binary(std::ostream& os, const PhaseScreen& s) {
    os.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(s.N));
    put(os, s.pixel_scale);
    put(os, s.r0);
    put(os, s.L0);
    put(os, s.l0);
    put<std::uint64_t>(os, s.seed);
    put(os, s.aperture);
    os.write(reinterpret_cast<const char*>(s.grid.data()),
             static_cast<std::streamsize>(s.grid.size() * sizeof(double)));
}

PhaseScreen read_screen_binary(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) throw DomainError("read_screen_binary: bad magic");
    PhaseScreen s;
    s.N = static_cast<int>(get<std::uint32_t>(is));
    s.pixel_scale = get<double>(is);
    s.r0 = get<double>(is);
    s.L0 = get<double>(is);
    s.l0 = get<double>(is);
    s.seed = get<std::uint64_t>(is);
    s.aperture = get<double>(is);
    s.grid.resize(static_cast<std::size_t>(s.N) * s.N);
    is.read(reinterpret_cast<char*>(s.grid.data()), static_cast<std::streamsize>(s.grid.size() * sizeof(double)));
    if (!is) throw DomainError("read_screen_binary: truncated grid");
    return s;
}

void write_screen_text(std::ostream& os, const PhaseScreen& s) {
    char buf[160];
    os << "# N=" << s.N;
    std::snprintf(buf, sizeof buf, " pixel_scale=%.9g r0=%.9g L0=%.9g l0=%.9g", s.pixel_scale, s.r0, s.L0, s.l0);
    os << buf << " seed=" << s.seed << " index=" << s.index << " units=rad\n";
    for (int i = 0; i < s.N; ++i) {
        for (int j = 0; j < s.N; ++j) {
            std::snprintf(buf, sizeof buf, "%.9g", s.at(i, j));
            os << (j ? " " : "") << buf;
        }
        os << "\n";
    }
}

}  // namespace fsochan
