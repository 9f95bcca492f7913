#include "thetaconf/lobachevsky.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace thetaconf {

using std::numbers::pi;

namespace {

constexpr int kTerms = 40;

// zeta(2n) / (n (2n+1) (2pi)^{2n}) for n = 1..kTerms
const std::array<double, kTerms + 1>& series_coeffs() {
    static const std::array<double, kTerms + 1> c = [] {
        std::array<double, kTerms + 1> out{};
        for (int n = 1; n <= kTerms; ++n) {
            double z;
            if (n == 1) {
                z = pi * pi / 6.0;
            } else if (n == 2) {
                z = std::pow(pi, 4) / 90.0;
            } else {
                z = 0.0;
                for (int k = 1000; k >= 1; --k) z += std::pow(static_cast<double>(k), -2.0 * n);
            }
            out[n] = z / (n * (2.0 * n + 1.0) * std::pow(2.0 * pi, 2.0 * n));
        }
        return out;
    }();
    return c;
}

} // namespace

double clausen2(double t) {
    t = std::remainder(t, 2 * pi);  // [-pi, pi]
    if (t == 0.0) return 0.0;
    const auto& c = series_coeffs();
    double t2 = t * t, p = t, s = 0.0;
    for (int n = 1; n <= kTerms; ++n) {
        p *= t2;
        s += c[n] * p;
    }
    return t - t * std::log(std::abs(t)) + s;
}

double lobachevsky(double x) { return 0.5 * clausen2(2.0 * x); }

} // namespace thetaconf
