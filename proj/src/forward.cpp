#include "halfinv/forward.hpp"

#include "halfinv/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

namespace halfinv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZeroEnergyTolerance = 1e-7;

double signed_energy(double s) { return s * std::abs(s); }

// Unwrapped angle of (v, u) at x = 1, starting from pi/2 at (u, v) = (1, 0). It increases
// with the energy and passes each multiple of pi only upwards, so eigenvalue n is where it
// equals the boundary angle plus n*pi. The state is rescaled to avoid overflow.
double pruefer_angle(const Primitive& sigma, double energy, const GridSpec& grid) {
    const double h = grid.step();
    double u = 1.0;
    double v = 0.0;
    double theta = 0.5 * kPi;
    auto rhs = [energy](double s, double uu, double vv, double& du, double& dv) {
        const double w = s * uu + vv;
        du = w;
        dv = -s * w - energy * uu;
    };
    double s0 = sigma(grid.node(0));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double x = grid.node(i);
        const double s_half = sigma(x + 0.5 * h);
        const double s1 = sigma(grid.node(i + 1));
        double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        rhs(s0, u, v, k1u, k1v);
        rhs(s_half, u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v);
        rhs(s_half, u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v);
        rhs(s1, u + h * k3u, v + h * k3v, k4u, k4v);
        const double un = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        const double vn = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        theta += std::atan2(v * un - u * vn, v * vn + u * un);
        const double scale = std::max(std::abs(un), std::abs(vn));
        u = un / scale;
        v = vn / scale;
        s0 = s1;
    }
    return theta;
}

// Angle of (v, u) = (h, 1) for Robin, pi for Dirichlet; both in (0, pi].
double boundary_angle(const BoundaryParam& bc) {
    if (const auto* robin = std::get_if<Robin>(&bc)) return std::atan2(1.0, robin->h);
    return kPi;
}

}  // namespace

Trajectory shoot_energy(const Primitive& sigma, double energy, const GridSpec& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    Trajectory out{grid, Vector(n), Vector(n)};
    const double h = grid.step();
    double u = 1.0;
    double v = 0.0;
    out.u[0] = u;
    out.v[0] = v;
    auto rhs = [energy](double s, double uu, double vv, double& du, double& dv) {
        const double w = s * uu + vv;  // y'
        du = w;
        dv = -s * w - energy * uu;
    };
    double s0 = sigma(grid.node(0));
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double x = grid.node(static_cast<std::size_t>(i));
        const double s_half = sigma(x + 0.5 * h);
        const double s1 = sigma(grid.node(static_cast<std::size_t>(i + 1)));
        double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        rhs(s0, u, v, k1u, k1v);
        rhs(s_half, u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v);
        rhs(s_half, u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v);
        rhs(s1, u + h * k3u, v + h * k3v, k4u, k4v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        out.u[i + 1] = u;
        out.v[i + 1] = v;
        s0 = s1;
    }
    return out;
}

Trajectory shoot(const Primitive& sigma, double lambda, const GridSpec& grid) {
    return shoot_energy(sigma, lambda * lambda, grid);
}

namespace {

double boundary_value(const Trajectory& tr, const BoundaryParam& bc) {
    const auto last = tr.u.size() - 1;
    if (const auto* robin = std::get_if<Robin>(&bc)) return tr.v[last] - robin->h * tr.u[last];
    return tr.u[last];
}

}  // namespace

double characteristic_energy(const Primitive& sigma, const BoundaryParam& bc, double energy,
                             const GridSpec& grid) {
    return boundary_value(shoot_energy(sigma, energy, grid), bc);
}

double characteristic(const Primitive& sigma, const BoundaryParam& bc, double lambda,
                      const GridSpec& grid) {
    return characteristic_energy(sigma, bc, lambda * lambda, grid);
}

Vector eigenvalues(const Primitive& sigma, const BoundaryParam& bc, std::size_t count,
                   const GridSpec& grid) {
    if (count == 0) throw std::invalid_argument("eigenvalue count must be positive");
    const double beta = boundary_angle(bc);
    Vector out(static_cast<Eigen::Index>(count));
    double floor = 0.0;  // the previous root bounds the next one from below
    for (std::size_t n = 0; n < count; ++n) {
        const double target = beta + kPi * static_cast<double>(n);
        auto g = [&](double s) { return pruefer_angle(sigma, signed_energy(s), grid) - target; };

        const double at_zero = g(0.0);
        if (!std::isfinite(at_zero)) {
            throw NumericalError(ErrorKind::BracketFailure, "non-finite trajectory at zero energy");
        }
        if (at_zero > 0.0) {
            // E_n < 0; a root within the tolerance of zero is reported as 0
            if (pruefer_angle(sigma, -kZeroEnergyTolerance, grid) - target > 0.0) {
                throw NumericalError(ErrorKind::NegativeEigenvalue,
                                     "eigenvalue " + std::to_string(n) + " lies below -1e-7; shift the potential");
            }
            out[static_cast<Eigen::Index>(n)] = 0.0;
            continue;
        }
        if (at_zero == 0.0) {
            out[static_cast<Eigen::Index>(n)] = 0.0;
            continue;
        }
        double lo = floor;
        double hi = std::max(floor, kPi * (static_cast<double>(n) + 1.0));
        double g_hi = g(hi);
        for (int expand = 0; !(g_hi > 0.0); ++expand) {
            if (expand == 60 || !std::isfinite(g_hi)) {
                throw NumericalError(ErrorKind::BracketFailure,
                                     "no bracket for eigenvalue " + std::to_string(n) + "; refine the grid");
            }
            lo = hi;
            hi *= 2.0;
            g_hi = g(hi);
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (g(mid) > 0.0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        floor = 0.5 * (lo + hi);
        out[static_cast<Eigen::Index>(n)] = floor;
    }
    return out;
}

Vector norming_constants(const Primitive& sigma, const BoundaryParam& bc, const Vector& lambdas,
                         const GridSpec& grid) {
    Vector alphas(lambdas.size());
    for (Eigen::Index n = 0; n < lambdas.size(); ++n) {
        const double lambda = lambdas[n];
        const Trajectory tr = shoot(sigma, lambda, grid);
        const double residual = boundary_value(tr, bc);
        if (std::abs(residual) > 1e-6 * (1.0 + std::abs(lambda))) {
            throw NumericalError(ErrorKind::NotAnEigenvalue,
                                 "lambda = " + std::to_string(lambda) +
                                     " leaves boundary residual " + std::to_string(residual));
        }
        const SampledFunction density(grid, (2.0 * tr.u.array().square()).matrix());
        alphas[n] = 1.0 / integrate(density);
    }
    return alphas;
}

Eigensystem eigensystem(const Primitive& sigma, const BoundaryParam& bc, std::size_t count,
                        const GridSpec& grid) {
    Vector lambdas = eigenvalues(sigma, bc, count, grid);
    Vector alphas = norming_constants(sigma, bc, lambdas, grid);
    return {std::move(lambdas), std::move(alphas)};
}

}  // namespace halfinv
