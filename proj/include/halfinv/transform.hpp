#pragma once

#include "halfinv/core.hpp"

#include <span>

namespace halfinv {

/// Lower-triangular kernel table l(x_i, t_j), 0 <= j <= i, on a uniform grid over [0, X].
class KernelTriangle {
public:
    explicit KernelTriangle(GridSpec grid);

    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t rows() const noexcept { return grid_.size(); }

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
        return values_[offset(i) + j];
    }
    double& operator()(std::size_t i, std::size_t j) { return values_[offset(i) + j]; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {values_.data() + offset(i), i + 1};
    }
    [[nodiscard]] std::span<double> row(std::size_t i) {
        return {values_.data() + offset(i), i + 1};
    }

    /// Largest |this - other| over common nodes (grids must match).
    [[nodiscard]] double sup_distance(const KernelTriangle& other) const;
    [[nodiscard]] double sup_norm() const;

private:
    static std::size_t offset(std::size_t i) noexcept { return i * (i + 1) / 2; }

    GridSpec grid_;
    std::vector<double> values_;
};

/// Kernel of the transformation operator mapping y0(., lambda) to cos(lambda x), from the
/// potential q0 on [0, X], by successive approximation of the characteristic-variable
/// integral equation. `sigma_at_zero` is the primitive's value at 0; when it is nonzero the
/// kernel satisfies l(x,x) = -(sigma(x) + sigma(0))/2 and l_t(x,0) = sigma(0) l(x,0).
///
/// Iterates until the sup-change is <= 1e-12; NoConvergence after 50 sweeps.
[[nodiscard]] KernelTriangle goursat_kernel(const SampledFunction& q0, const GridSpec& grid,
                                            double sigma_at_zero = 0.0);

/// Same kernel from the identity cos(lambda x) = y0(x, lambda) + int_0^x l(x,t) y0(t, lambda) dt
/// imposed at lambda_j = pi*j/(2X), j = 0..M, row by row in the least-squares sense.
/// Needs only pointwise values of sigma0. Each row's unknowns are the node values of a
/// piecewise-linear l(x_i, .), integrated exactly against a finely resolved y0.
///
/// Requires M >= grid.size(). IllConditioned when a row's condition estimate exceeds 1e8.
[[nodiscard]] KernelTriangle collocation_kernel(const Primitive& sigma0, const GridSpec& grid,
                                                std::size_t frequencies);

/// Default collocation count: twice the number of cells, i.e. up to the grid's Nyquist frequency.
[[nodiscard]] std::size_t default_collocation_count(const GridSpec& grid);

/// phi0(2x) = -sigma0(x)/2 + int_0^x l(x,t)^2 dt on the doubled grid [0, 2X].
[[nodiscard]] SampledFunction phi0(const Primitive& sigma0, const KernelTriangle& kernel);

/// Largest |cos(lambda_j x_i) - y0(x_i, lambda_j) - int_0^{x_i} l y0| over rows and
/// lambda_j = pi*j/(2X), j = 0..frequencies. The integral uses the piecewise-linear kernel
/// against a fine RK4 trajectory with Simpson quadrature.
[[nodiscard]] double transformation_residual(const Primitive& sigma0, const KernelTriangle& kernel,
                                             std::size_t frequencies);

enum class KernelMethod { Collocation, Goursat };

/// Kernel by the requested route. Goursat needs q0 = sigma0' as a function, so it rejects
/// sampled primitives with std::invalid_argument.
[[nodiscard]] KernelTriangle half_kernel(const Primitive& sigma0, const GridSpec& grid,
                                         KernelMethod method);

}  // namespace halfinv
