#pragma once

#include <cstddef>

namespace halfinv::oracle {

/// Closed-form half-inverse family: sigma_0(x) = 2g/(1 - g x) - g on [0, 1/2] with the
/// harmonic spectrum lambda_n = pi n. Solvable exactly when g < 1.
struct GammaFamily {
    double gamma;

    explicit GammaFamily(double g);
    [[nodiscard]] bool solvable() const noexcept { return gamma < 1.0; }
};

/// 2g/(1 - g x) - g. PoleReached if g x >= 1.
[[nodiscard]] double sigma_gamma(double gamma, double x);
/// GLM kernel k(x,t) = g/(1 - g x).
[[nodiscard]] double kernel_gamma(double gamma, double x, double t);
/// Half-interval transformation kernel l(x,t) = -g/(1 - g t).
[[nodiscard]] double inverse_kernel_gamma(double gamma, double x, double t);
/// -g^2/(1 - g); requires g < 1.
[[nodiscard]] double h_gamma(double gamma);
/// w_0 = 1/(1 - g x); w_n = cos(pi n x) + g/(pi n) sin(pi n x)/(1 - g x).
[[nodiscard]] double eigenfunction_gamma(double gamma, std::size_t n, double x);
/// phi0 of the family, constant -g/2.
[[nodiscard]] double phi0_gamma(double gamma);

/// |cos(a+b) - cos a + b sin a|, bounded by b^2/sqrt(3).
[[nodiscard]] double trig_defect(double a, double b);

}  // namespace halfinv::oracle
