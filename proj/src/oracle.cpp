#include "halfinv/oracle.hpp"

#include "halfinv/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace halfinv::oracle {

GammaFamily::GammaFamily(double g) : gamma(g) {
    if (!(g >= 0.0 && g < 2.0)) throw std::invalid_argument("gamma must lie in [0, 2)");
}

double sigma_gamma(double gamma, double x) {
    const double d = 1.0 - gamma * x;
    if (!(d > 0.0)) {
        throw NumericalError(ErrorKind::PoleReached, "gamma * x = " + std::to_string(gamma * x));
    }
    return 2.0 * gamma / d - gamma;
}

double kernel_gamma(double gamma, double x, double /*t*/) { return gamma / (1.0 - gamma * x); }

double inverse_kernel_gamma(double gamma, double /*x*/, double t) { return -gamma / (1.0 - gamma * t); }

double h_gamma(double gamma) {
    if (!(gamma < 1.0)) throw std::invalid_argument("h_gamma needs gamma < 1");
    return -gamma * gamma / (1.0 - gamma);
}

double eigenfunction_gamma(double gamma, std::size_t n, double x) {
    const double d = 1.0 - gamma * x;
    if (n == 0) return 1.0 / d;
    const double k = std::numbers::pi * static_cast<double>(n);
    return std::cos(k * x) + gamma / k * std::sin(k * x) / d;
}

double phi0_gamma(double gamma) { return -0.5 * gamma; }

double trig_defect(double a, double b) { return std::abs(std::cos(a + b) - std::cos(a) + b * std::sin(a)); }

}  // namespace halfinv::oracle
