#pragma once

#include "halfinv/core.hpp"

#include <variant>

namespace halfinv {

/// y^{[1]}(1) = h y(1).
struct Robin {
    double h;
};
/// y(1) = 0.
struct Dirichlet {};
using BoundaryParam = std::variant<Robin, Dirichlet>;

/// u = y and v = y' - sigma*y on a grid, started from u(0) = 1, v(0) = 0.
struct Trajectory {
    GridSpec grid;
    Vector u;
    Vector v;
};

/// Integrates u' = sigma*u + v, v' = -sigma*(sigma*u + v) - lambda^2*u with classical RK4
/// over `grid`. sigma is sampled at the nodes and half-steps.
[[nodiscard]] Trajectory shoot(const Primitive& sigma, double lambda, const GridSpec& grid);
/// Same system with lambda^2 replaced by an arbitrary (possibly negative) energy.
[[nodiscard]] Trajectory shoot_energy(const Primitive& sigma, double energy, const GridSpec& grid);

/// Robin: v(1) - h*u(1). Dirichlet: u(1). Zero exactly at eigenvalues.
[[nodiscard]] double characteristic(const Primitive& sigma, const BoundaryParam& bc, double lambda,
                                    const GridSpec& grid);
[[nodiscard]] double characteristic_energy(const Primitive& sigma, const BoundaryParam& bc,
                                           double energy, const GridSpec& grid);

/// First `count` eigenvalue square roots. Eigenvalue n is located by its Pruefer angle
/// (the phase of (v, u) at x = 1 equals the boundary angle plus n*pi), so indices stay
/// correct however far the spectrum is displaced from pi*n, then refined by bisection in
/// the signed variable s with energy s*|s|.
///
/// An eigenvalue below -1e-7 raises NegativeEigenvalue; one within that tolerance of zero
/// is returned as 0.
[[nodiscard]] Vector eigenvalues(const Primitive& sigma, const BoundaryParam& bc, std::size_t count,
                                 const GridSpec& grid);

/// alpha_n = 1 / int_0^1 (sqrt(2) u(x, lambda_n))^2 dx. Throws NotAnEigenvalue when
/// |characteristic| > 1e-6*(1 + |lambda|).
[[nodiscard]] Vector norming_constants(const Primitive& sigma, const BoundaryParam& bc,
                                       const Vector& lambdas, const GridSpec& grid);

struct Eigensystem {
    Vector lambdas;
    Vector alphas;
};

[[nodiscard]] Eigensystem eigensystem(const Primitive& sigma, const BoundaryParam& bc,
                                      std::size_t count, const GridSpec& grid);

}  // namespace halfinv
