#include "fsochan/quadrature.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fsochan/errors.hpp"

namespace fsochan {

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, const std::vector<double>& breaks,
                     unsigned max_depth) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    std::vector<double> pts{a};
    for (double x : breaks)
        if (x > pts.back() && x < b) pts.push_back(x);
    pts.push_back(b);

    QuadResult out;
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double err = 0.0, piece_l1 = 0.0;
        const double v = GK::integrate(f, pts[i], pts[i + 1], max_depth,
                                       rel_tol * 0.1, &err, &piece_l1);
        out.value += v;
        out.error += err;
        l1 += piece_l1;
    }
    if (!std::isfinite(out.value) || out.error > rel_tol * std::max(std::abs(out.value), 1e-300)) {
        std::ostringstream os;
        os << "interval [" << a << ", " << b << "] value=" << out.value
           << " err=" << out.error << " L1=" << l1 << " pieces=" << pts.size() - 1;
        if (!(out.error <= rel_tol * l1 && std::isfinite(out.value)))
            throw NumericalError("quadrature did not converge", os.str());
    }
    return out;
}

std::vector<double> log_breaks(double first, double b, double ratio) {
    std::vector<double> v;
    for (double x = first; x < b; x *= ratio) v.push_back(x);
    return v;
}

}  // namespace fsochan
