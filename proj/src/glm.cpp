#include "halfinv/glm.hpp"

#include "halfinv/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace halfinv {

PhiExtension extend_phi(const MembershipReport& report, const SpectralSequence& spectrum,
                        const GridSpec& grid) {
    if (!report.solvable) {
        throw Unsolvable(report, "phi0 is not in Pi_Lambda: min alpha = " + std::to_string(report.min_alpha));
    }
    const SampledFunction psi = psi_lambda(spectrum, grid);
    const SampledFunction series = synthesize(report.beta.head, spectrum, grid);
    Vector values = (psi.values() + series.values()).array() + 0.5;
    return PhiExtension{SampledFunction(grid, std::move(values)), report.beta.head.sum() + 0.5};
}

double f_phi(const PhiExtension& phi, double x, double t) {
    return phi.samples(x + t) + phi.samples(std::abs(x - t));
}

namespace {

Matrix kernel_matrix(const PhiExtension& phi, const GridSpec& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    Matrix f(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            f(i, j) = f(j, i) = f_phi(phi, grid.node(static_cast<std::size_t>(i)),
                                      grid.node(static_cast<std::size_t>(j)));
        }
    }
    return f;
}

void require_unit_grid(const GridSpec& grid) {
    if (grid.lower() != 0.0 || std::abs(grid.upper() - 1.0) > 1e-12) {
        throw std::invalid_argument("GLM grids live on [0, 1]");
    }
}

}  // namespace

double positivity_check(const PhiExtension& phi, const GridSpec& grid) {
    require_unit_grid(grid);
    const Vector sqrt_w = trapezoid_weights(grid.size(), grid.step()).cwiseSqrt();
    const Matrix a = Matrix::Identity(sqrt_w.size(), sqrt_w.size()) +
                     sqrt_w.asDiagonal() * kernel_matrix(phi, grid) * sqrt_w.asDiagonal();
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()[0];
}

KernelTriangle glm_solve(const PhiExtension& phi, const GridSpec& grid) {
    require_unit_grid(grid);
    const Matrix f = kernel_matrix(phi, grid);
    KernelTriangle k(grid);
    k(0, 0) = -f(0, 0);
    parallel_for(1, grid.size(), [&](std::size_t i) {
        const auto m = static_cast<Eigen::Index>(i + 1);
        const Vector w = trapezoid_weights(i + 1, grid.step());
        // A_jm = delta_jm + f(t_m, t_j) w_m
        const Matrix a = Matrix::Identity(m, m) + f.topLeftCorner(m, m) * w.asDiagonal();
        const Vector rhs = -f.row(static_cast<Eigen::Index>(i)).head(m).transpose();
        const Eigen::PartialPivLU<Matrix> lu(a);
        if (!(lu.rcond() > 1e-14)) {
            throw NumericalError(ErrorKind::SingularSystem,
                                 "GLM row " + std::to_string(i) + " is numerically singular");
        }
        const Vector sol = lu.solve(rhs);
        auto row = k.row(i);
        for (Eigen::Index j = 0; j < m; ++j) row[static_cast<std::size_t>(j)] = sol[j];
    });
    return k;
}

double glm_residual(const KernelTriangle& k, const PhiExtension& phi) {
    const GridSpec& grid = k.grid();
    const Matrix f = kernel_matrix(phi, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vector w = trapezoid_weights(i + 1, grid.step());
        const auto row = k.row(i);
        for (std::size_t j = 0; j <= i; ++j) {
            double integral = 0.0;
            for (std::size_t m = 0; m <= i; ++m) {
                integral += w[static_cast<Eigen::Index>(m)] * row[m] *
                            f(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j));
            }
            const double fij = f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            worst = std::max(worst, std::abs(row[j] + fij + integral) / (1.0 + std::abs(fij)));
        }
    }
    return worst;
}

SampledFunction sigma_from_kernel(const KernelTriangle& k, const PhiExtension& phi) {
    const GridSpec& grid = k.grid();
    Vector values(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[static_cast<Eigen::Index>(i)] = 2.0 * k(i, i) + 2.0 * phi.phi_at_zero;
    }
    return SampledFunction(grid, std::move(values));
}

BoundaryEstimate recover_h(const SampledFunction& sigma, const SpectralSequence& spectrum,
                           const GridSpec& grid) {
    const Primitive primitive = Primitive::sampled(sigma);
    std::vector<double> hs;
    for (std::size_t n = 0; n < 3; ++n) {
        const Trajectory tr = shoot(primitive, spectrum[n], grid);
        const double u1 = tr.u[tr.u.size() - 1];
        if (std::abs(u1) < 1e-10) {
            throw NumericalError(ErrorKind::BoundaryDegenerate,
                                 "eigenfunction vanishes at x = 1 for n = " + std::to_string(n));
        }
        hs.push_back(tr.v[tr.v.size() - 1] / u1);
    }
    const auto [lo, hi] = std::minmax_element(hs.begin(), hs.end());
    return {(hs[0] + hs[1] + hs[2]) / 3.0, *hi - *lo};
}

double factorization_defect(const PhiExtension& phi, const GridSpec& grid, std::size_t refinement) {
    require_unit_grid(grid);
    if (refinement == 0) throw std::invalid_argument("refinement must be positive");
    // Compositions are integrated on a finer grid. Each integrand is cut off at a node,
    // so the full trapezoid sums are corrected there to the one-sided rule.
    const GridSpec fine = grid.refined(refinement);
    const KernelTriangle k = glm_solve(phi, fine);
    const auto n = static_cast<Eigen::Index>(fine.size());
    const double half_step = 0.5 * fine.step();
    Matrix lower = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = k.row(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j <= i; ++j) lower(i, j) = row[static_cast<std::size_t>(j)];
    }
    const Matrix f = kernel_matrix(phi, fine);
    const Vector w = trapezoid_weights(fine.size(), fine.step());
    const Matrix upper = lower.transpose();
    const Matrix fw = f * w.asDiagonal();
    const Vector diag = lower.diagonal();

    Matrix fk = fw * lower;   // int_t^1 f(x,s) k(s,t) ds
    Matrix fkt = fw * upper;  // int_0^t f(x,s) k(t,s) ds
    for (Eigen::Index t = 0; t < n; ++t) {
        if (t > 0) fk.col(t) -= half_step * diag[t] * f.col(t);
        if (t < n - 1) fkt.col(t) -= half_step * diag[t] * f.col(t);
    }
    Matrix kk = upper * w.asDiagonal() * lower;  // int_{max(x,t)}^1 k(s,x) k(s,t) ds
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index t = 0; t < n; ++t) {
            const Eigen::Index top = std::max(x, t);
            if (top > 0) kk(x, t) -= half_step * lower(top, x) * lower(top, t);
        }
    }
    Matrix sym = lower + upper;
    sym.diagonal() = diag;
    const Matrix d = f + sym + fkt + fk + kk + fw * kk;

    const auto m = static_cast<Eigen::Index>(grid.size());
    const auto r = static_cast<Eigen::Index>(refinement);
    Matrix coarse(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) coarse(i, j) = d(i * r, j * r);
    }
    const Vector sw = trapezoid_weights(grid.size(), grid.step()).cwiseSqrt();
    const Matrix scaled = sw.asDiagonal() * coarse * sw.asDiagonal();
    const Eigen::JacobiSVD<Matrix> svd(scaled);
    return svd.singularValues()[0];
}

ReconstructionResult reconstruct(const Primitive& sigma0, const SpectralSequence& spectrum,
                                 const ReconstructionConfig& config) {
    const std::size_t n = config.grid_points;
    if (n < 9 || (n - 1) % 4 != 0) {
        throw std::invalid_argument("reconstruction grid needs n = 4m + 1 >= 9 nodes on [0, 1]");
    }
    const GridSpec full(n, 0.0, 1.0);
    const GridSpec half((n + 1) / 2, 0.0, 0.5);

    const KernelTriangle half_l = half_kernel(sigma0, half, config.kernel);
    SampledFunction phi_0 = phi0(sigma0, half_l);
    const std::size_t truncation = config.truncation.value_or(default_truncation(spectrum));
    MembershipReport report = membership_check(phi_0, spectrum, truncation);
    if (!report.solvable) {
        throw Unsolvable(report, "phi0 is not in Pi_Lambda: min alpha = " + std::to_string(report.min_alpha));
    }

    PhiExtension phi = extend_phi(report, spectrum, full.extended(2));
    const double margin = positivity_check(phi, full);
    if (!(margin > kPositivityThreshold)) {
        throw Unsolvable(report, "I + F_phi is not positive: margin = " + std::to_string(margin), margin);
    }
    KernelTriangle k = glm_solve(phi, full);
    SampledFunction sigma = sigma_from_kernel(k, phi);
    const BoundaryEstimate h = recover_h(sigma, spectrum, full);

    ReconstructionDiagnostics diag;
    diag.glm_residual = glm_residual(k, phi);
    diag.positivity_margin = margin;
    diag.h_spread = h.spread;
    diag.expansion_residual = report.expansion_residual;

    std::optional<Vector> lambdas;
    if (config.roundtrip) {
        lambdas = eigenvalues(Primitive::sampled(sigma), Robin{h.h}, spectrum.head_size(), full);
        double worst = 0.0;
        for (std::size_t i = 0; i < spectrum.head_size(); ++i) {
            worst = std::max(worst, std::abs((*lambdas)[static_cast<Eigen::Index>(i)] - spectrum[i]));
        }
        diag.roundtrip_spectrum_error = worst;
    }

    return ReconstructionResult{std::move(sigma), h.h,           diag,          std::move(report),
                                std::move(phi_0), std::move(phi), std::move(k), std::move(lambdas)};
}

}  // namespace halfinv
