#include "halfinv/transform.hpp"

#include "halfinv/errors.hpp"
#include "halfinv/forward.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace halfinv {

KernelTriangle::KernelTriangle(GridSpec grid)
    : grid_(grid), values_(grid.size() * (grid.size() + 1) / 2, 0.0) {}

double KernelTriangle::sup_distance(const KernelTriangle& other) const {
    if (!(grid_ == other.grid_)) throw std::invalid_argument("kernel grids differ");
    double d = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k) d = std::max(d, std::abs(values_[k] - other.values_[k]));
    return d;
}

double KernelTriangle::sup_norm() const {
    double d = 0.0;
    for (double v : values_) d = std::max(d, std::abs(v));
    return d;
}

// ---------------------------------------------------------------------------
// Goursat route. With u = x+t, v = x-t, a(u,v) = l(x,t) and h = sigma(0):
//
//   a(u,v) = d(v) + g(u/2) - g(v/2) - 1/4 int_v^u G(alpha, v) d alpha,
//   G(alpha, v) = int_0^v q0((alpha-beta)/2) a(alpha, beta) d beta,
//   g(s) = -h - 1/2 int_0^s q0,
//   d(v) = e^{-hv} [ -h + int_0^v e^{h alpha} (-q0(alpha/2)/2 - G(alpha,alpha)/2) d alpha ],
//
// which reduces to the classical form when h = 0.

namespace {

class PackedTriangle {
public:
    explicit PackedTriangle(std::size_t n) : data_(n * (n + 1) / 2, 0.0) {}
    double operator()(std::size_t p, std::size_t r) const { return data_[p * (p + 1) / 2 + r]; }
    double& operator()(std::size_t p, std::size_t r) { return data_[p * (p + 1) / 2 + r]; }
    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

private:
    std::vector<double> data_;
};

}  // namespace

KernelTriangle goursat_kernel(const SampledFunction& q0, const GridSpec& grid, double sigma_at_zero) {
    const std::size_t cells = grid.size() - 1;
    const std::size_t size = 2 * cells + 1;  // u, v indices 0..2*cells
    const double delta = grid.step();
    const double h = sigma_at_zero;

    std::vector<double> q_half(size);  // q0(k*delta/2)
    std::vector<double> g_half(size);  // g(k*delta/2)
    for (std::size_t k = 0; k < size; ++k) {
        const double s = grid.lower() + 0.5 * delta * static_cast<double>(k);
        q_half[k] = q0(s);
        g_half[k] = -h - 0.5 * q0.antiderivative(s);
    }

    PackedTriangle a(size);
    PackedTriangle next(size);
    PackedTriangle big_g(size);
    PackedTriangle t1(size);
    std::vector<double> d(size);

    bool converged = false;
    for (int sweep = 0; sweep < 50; ++sweep) {
        for (std::size_t p = 0; p < size; ++p) {
            big_g(p, 0) = 0.0;
            double prev = q_half[p] * a(p, 0);
            for (std::size_t r = 1; r <= p; ++r) {
                const double cur = q_half[p - r] * a(p, r);
                big_g(p, r) = big_g(p, r - 1) + 0.5 * delta * (prev + cur);
                prev = cur;
            }
        }
        for (std::size_t r = 0; r < size; ++r) {
            t1(r, r) = 0.0;
            for (std::size_t p = r + 1; p < size; ++p) {
                t1(p, r) = t1(p - 1, r) + 0.5 * delta * (big_g(p - 1, r) + big_g(p, r));
            }
        }
        double integral = 0.0;
        auto diag_integrand = [&](std::size_t m) {
            return std::exp(h * delta * static_cast<double>(m)) *
                   (-0.5 * q_half[m] - 0.5 * big_g(m, m));
        };
        double prev = diag_integrand(0);
        d[0] = -h;
        for (std::size_t r = 1; r < size; ++r) {
            const double cur = diag_integrand(r);
            integral += 0.5 * delta * (prev + cur);
            prev = cur;
            d[r] = std::exp(-h * delta * static_cast<double>(r)) * (-h + integral);
        }

        double change = 0.0;
        for (std::size_t p = 0; p < size; ++p) {
            for (std::size_t r = 0; r <= p; ++r) {
                const double value = d[r] + g_half[p] - g_half[r] - 0.25 * t1(p, r);
                change = std::max(change, std::abs(value - a(p, r)));
                next(p, r) = value;
            }
        }
        std::swap(a.raw(), next.raw());
        if (change <= 1e-12) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw NumericalError(ErrorKind::NoConvergence,
                             "Picard iteration did not settle in 50 sweeps; use collocation");
    }

    KernelTriangle out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) out(i, j) = a(i + j, i - j);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Collocation route.

namespace {

constexpr double kPhasePerStep = 0.01;

struct FrequencyData {
    Vector deviation;  // y0(t_i, lambda) - cos(lambda t_i)
    Vector left;       // int_cell (t_{c+1} - t)/delta * y0, weight on node c
    Vector right;      // int_cell (t - t_c)/delta * y0, weight on node c+1
};

std::size_t substeps_for(double lambda, double delta) {
    const auto r = static_cast<std::size_t>(std::ceil(lambda * delta / kPhasePerStep));
    return std::max<std::size_t>(2, r + (r % 2));
}

// y0 - cos(lambda x) on `grid`. In the frame of the free propagator
// Phi = [[c, s/lambda], [-lambda s, c]] the quasi-derivative system becomes
// z' = Phi^{-1} B Phi z with B = [[sigma, 0], [-sigma^2, -sigma]], and d = z - (1, 0) is
// integrated by RK4. Its error scales with sigma and vanishes for sigma = 0.
Vector free_deviation(const Primitive& sigma, double lambda, const GridSpec& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double h = grid.step();
    auto rhs = [lambda](double x, double sg, double d1, double d2, double& o1, double& o2) {
        const double c = std::cos(lambda * x);
        const double s = std::sin(lambda * x);
        const double sl = lambda == 0.0 ? x : s / lambda;  // sin(lambda x)/lambda
        const double m11 = sg * (c * c - s * s) + sg * sg * sl * c;
        const double m12 = 2.0 * sg * c * sl + sg * sg * sl * sl;
        const double m21 = 2.0 * sg * lambda * s * c - sg * sg * c * c;
        o1 = m11 * (1.0 + d1) + m12 * d2;
        o2 = m21 * (1.0 + d1) - m11 * d2;
    };
    Vector out(n);
    out[0] = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double s0 = sigma(grid.node(0));
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double x = grid.node(static_cast<std::size_t>(i));
        const double xm = x + 0.5 * h;
        const double x1 = grid.node(static_cast<std::size_t>(i + 1));
        const double sm = sigma(xm);
        const double s1 = sigma(x1);
        double a1, b1, a2, b2, a3, b3, a4, b4;
        rhs(x, s0, d1, d2, a1, b1);
        rhs(xm, sm, d1 + 0.5 * h * a1, d2 + 0.5 * h * b1, a2, b2);
        rhs(xm, sm, d1 + 0.5 * h * a2, d2 + 0.5 * h * b2, a3, b3);
        rhs(x1, s1, d1 + h * a3, d2 + h * b3, a4, b4);
        d1 += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        d2 += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        const double sl = lambda == 0.0 ? x1 : std::sin(lambda * x1) / lambda;
        out[i + 1] = std::cos(lambda * x1) * d1 + sl * d2;
        s0 = s1;
    }
    return out;
}

FrequencyData resolve_frequency(const Primitive& sigma0, const GridSpec& grid, double lambda) {
    const std::size_t cells = grid.size() - 1;
    const std::size_t sub = substeps_for(lambda, grid.step());
    const GridSpec refined = grid.refined(sub);
    const Vector dev = free_deviation(sigma0, lambda, refined);
    FrequencyData out{Vector(static_cast<Eigen::Index>(grid.size())),
                      Vector(static_cast<Eigen::Index>(cells)),
                      Vector(static_cast<Eigen::Index>(cells))};
    const double fine = grid.step() / static_cast<double>(sub);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.deviation[static_cast<Eigen::Index>(i)] = dev[static_cast<Eigen::Index>(i * sub)];
    }
    for (std::size_t c = 0; c < cells; ++c) {
        double left = 0.0;
        double right = 0.0;
        for (std::size_t k = 0; k <= sub; ++k) {
            const double simpson = (k == 0 || k == sub) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
            const auto idx = static_cast<Eigen::Index>(c * sub + k);
            const double y = std::cos(lambda * refined.node(static_cast<std::size_t>(idx))) + dev[idx];
            const double s = static_cast<double>(k) / static_cast<double>(sub);
            left += simpson * (1.0 - s) * y;
            right += simpson * s * y;
        }
        out.left[static_cast<Eigen::Index>(c)] = left * fine / 3.0;
        out.right[static_cast<Eigen::Index>(c)] = right * fine / 3.0;
    }
    return out;
}

double collocation_frequency(const GridSpec& grid, std::size_t j) {
    const double span = grid.upper() - grid.lower();
    return std::numbers::pi * static_cast<double>(j) / (2.0 * span);
}

}  // namespace

std::size_t default_collocation_count(const GridSpec& grid) { return 2 * (grid.size() - 1); }

KernelTriangle collocation_kernel(const Primitive& sigma0, const GridSpec& grid,
                                  std::size_t frequencies) {
    if (frequencies < grid.size()) {
        throw std::invalid_argument("collocation needs at least as many frequencies as nodes");
    }
    if (grid.lower() != 0.0) throw std::invalid_argument("kernel grid must start at 0");
    const std::size_t count = frequencies + 1;
    std::vector<FrequencyData> data(count);
    parallel_for(0, count, [&](std::size_t k) {
        data[k] = resolve_frequency(sigma0, grid, collocation_frequency(grid, k));
    });

    KernelTriangle out(grid);
    out(0, 0) = -sigma0(0.0);
    const auto m = static_cast<Eigen::Index>(count);
    parallel_for(1, grid.size(), [&](std::size_t i) {
        const auto unknowns = static_cast<Eigen::Index>(i + 1);
        Matrix w = Matrix::Zero(m, unknowns);
        Vector rhs(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            const auto& fd = data[static_cast<std::size_t>(k)];
            for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(i); ++c) {
                w(k, c) += fd.left[c];
                w(k, c + 1) += fd.right[c];
            }
            rhs[k] = -fd.deviation[static_cast<Eigen::Index>(i)];
        }
        const Matrix normal = w.transpose() * w;
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(normal);
        const Vector& ev = eig.eigenvalues();
        const double largest = ev[ev.size() - 1];
        const double smallest = ev[0];
        if (!(smallest > 0.0) || std::sqrt(largest / smallest) > 1e8) {
            throw NumericalError(ErrorKind::IllConditioned,
                                 "collocation row " + std::to_string(i) +
                                     " is ill-conditioned; raise M or refine the grid");
        }
        const Vector coeffs = eig.eigenvectors().transpose() * (w.transpose() * rhs);
        const Vector solution = eig.eigenvectors() * coeffs.cwiseQuotient(ev);
        auto row = out.row(i);
        for (Eigen::Index j = 0; j < unknowns; ++j) row[static_cast<std::size_t>(j)] = solution[j];
    });
    return out;
}

SampledFunction phi0(const Primitive& sigma0, const KernelTriangle& kernel) {
    const GridSpec& grid = kernel.grid();
    const GridSpec doubled(grid.size(), 2.0 * grid.lower(), 2.0 * grid.upper());
    const double delta = grid.step();
    Vector values(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto row = kernel.row(i);
        double integral = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            integral += 0.5 * delta * (row[j] * row[j] + row[j + 1] * row[j + 1]);
        }
        values[static_cast<Eigen::Index>(i)] = -0.5 * sigma0(grid.node(i)) + integral;
    }
    return SampledFunction(doubled, std::move(values));
}

double transformation_residual(const Primitive& sigma0, const KernelTriangle& kernel,
                               std::size_t frequencies) {
    const GridSpec& grid = kernel.grid();
    double worst = 0.0;
    for (std::size_t k = 0; k <= frequencies; ++k) {
        const double lambda = collocation_frequency(grid, k);
        // independent resolution: finer than the collocation sweep uses
        const std::size_t sub = 2 * substeps_for(lambda, grid.step());
        const Trajectory tr = shoot(sigma0, lambda, grid.refined(sub));
        const double fine = grid.step() / static_cast<double>(sub);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const auto row = kernel.row(i);
            double integral = 0.0;
            for (std::size_t c = 0; c < i; ++c) {
                for (std::size_t s = 0; s <= sub; ++s) {
                    const double simpson = (s == 0 || s == sub) ? 1.0 : (s % 2 == 1 ? 4.0 : 2.0);
                    const double frac = static_cast<double>(s) / static_cast<double>(sub);
                    const double l = (1.0 - frac) * row[c] + frac * row[c + 1];
                    integral += simpson * fine / 3.0 * l * tr.u[static_cast<Eigen::Index>(c * sub + s)];
                }
            }
            const double y = tr.u[static_cast<Eigen::Index>(i * sub)];
            worst = std::max(worst, std::abs(std::cos(lambda * grid.node(i)) - y - integral));
        }
    }
    return worst;
}

KernelTriangle half_kernel(const Primitive& sigma0, const GridSpec& grid, KernelMethod method) {
    if (method == KernelMethod::Collocation) {
        return collocation_kernel(sigma0, grid, default_collocation_count(grid));
    }
    const auto potential = sigma0.potential(grid);
    if (!potential) {
        throw std::invalid_argument("the Goursat route needs q0 = sigma0'; use collocation");
    }
    return goursat_kernel(potential->q, grid, potential->sigma_at_zero);
}

}  // namespace halfinv
