#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace halfinv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Uniform grid x_i = a + i*(b-a)/(n-1). The node count is odd and at least 5
/// so that composite Simpson applies.
class GridSpec {
public:
    GridSpec(std::size_t n_points, double a, double b);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double lower() const noexcept { return a_; }
    [[nodiscard]] double upper() const noexcept { return b_; }
    [[nodiscard]] double step() const noexcept { return (b_ - a_) / static_cast<double>(n_ - 1); }
    [[nodiscard]] double node(std::size_t i) const noexcept {
        return a_ + static_cast<double>(i) * step();
    }
    [[nodiscard]] Vector nodes() const;

    /// Same spacing, interval scaled by `factor` (factor*(n-1)+1 nodes on [a, a+factor*(b-a)]).
    [[nodiscard]] GridSpec extended(std::size_t factor) const;
    /// Grid refined by an integer factor (same interval).
    [[nodiscard]] GridSpec refined(std::size_t factor) const;

    bool operator==(const GridSpec&) const = default;

private:
    std::size_t n_;
    double a_;
    double b_;
};

/// Samples on a GridSpec; evaluation between nodes is piecewise linear.
class SampledFunction {
public:
    SampledFunction(GridSpec grid, Vector values);

    template <typename F>
    static SampledFunction from(const GridSpec& grid, F&& f) {
        Vector v(static_cast<Eigen::Index>(grid.size()));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            v[static_cast<Eigen::Index>(i)] = f(grid.node(i));
        }
        return SampledFunction(grid, std::move(v));
    }

    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] const Vector& values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const {
        return values_[static_cast<Eigen::Index>(i)];
    }

    /// Piecewise-linear interpolation, constant extrapolation outside the grid.
    [[nodiscard]] double operator()(double x) const;
    /// Four-point Lagrange interpolation (one-sided stencils at the ends).
    [[nodiscard]] double cubic(double x) const;
    /// Exact integral from the left end to x of the piecewise-linear interpolant.
    [[nodiscard]] double antiderivative(double x) const;

private:
    GridSpec grid_;
    Vector values_;
    Vector cumulative_;  // trapezoid partial sums at the nodes
};

/// Composite Simpson over the whole grid.
[[nodiscard]] double integrate(const SampledFunction& f);
[[nodiscard]] double l2_norm(const SampledFunction& f);

/// Composite trapezoid weights for nodes 0..count-1 with spacing `step`.
[[nodiscard]] Vector trapezoid_weights(std::size_t count, double step);

// ---------------------------------------------------------------------------
// Primitive: the coefficient sigma of the quasi-derivative operator.

struct ZeroPrimitive {};

/// Sampled sigma, evaluated with four-point interpolation between nodes.
struct SampledPrimitive {
    SampledFunction sigma;
};

/// sigma(x) = int_0^x q, with q piecewise linear.
struct AntiderivativePrimitive {
    SampledFunction q;
};

/// sigma(x) = 2*gamma/(1 - gamma*x) - gamma.
struct GammaPrimitive {
    double gamma;
};

class Primitive {
public:
    using Representation =
        std::variant<ZeroPrimitive, SampledPrimitive, AntiderivativePrimitive, GammaPrimitive>;

    static Primitive zero() { return Primitive(ZeroPrimitive{}); }
    static Primitive sampled(SampledFunction sigma) {
        return Primitive(SampledPrimitive{std::move(sigma)});
    }
    static Primitive antiderivative_of(SampledFunction q) {
        return Primitive(AntiderivativePrimitive{std::move(q)});
    }
    /// Requires 0 <= gamma < 2.
    static Primitive example_gamma(double gamma);

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] const Representation& representation() const noexcept { return rep_; }

    /// Samples of q = sigma' on the grid plus sigma(0), when q exists as a function
    /// (every representation except Sampled).
    struct Potential {
        SampledFunction q;
        double sigma_at_zero;
    };
    [[nodiscard]] std::optional<Potential> potential(const GridSpec& grid) const;

private:
    explicit Primitive(Representation rep) : rep_(std::move(rep)) {}
    Representation rep_;
};

// ---------------------------------------------------------------------------
// Spectra and coefficient sequences.

struct ExactPiTail {};
struct CoulombTail {
    double c;
};
using SpectrumTail = std::variant<ExactPiTail, CoulombTail>;

/// lambda_n: a finite head lambda_0 < ... < lambda_N, then pi*n (ExactPi) or
/// pi*n + c/n (Coulomb) for n > N.
class SpectralSequence {
public:
    SpectralSequence(std::vector<double> head, SpectrumTail tail = ExactPiTail{});

    /// lambda_n = pi*n for n = 0..last_index.
    static SpectralSequence harmonic(std::size_t last_index);

    [[nodiscard]] double operator[](std::size_t n) const { return lambda_at(n); }
    [[nodiscard]] double lambda_at(std::size_t n) const;
    [[nodiscard]] double mu_at(std::size_t n) const;

    [[nodiscard]] std::span<const double> head() const noexcept { return head_; }
    [[nodiscard]] std::size_t head_size() const noexcept { return head_.size(); }
    [[nodiscard]] const SpectrumTail& tail() const noexcept { return tail_; }
    /// c of the Coulomb tail, 0 for ExactPi.
    [[nodiscard]] double tail_constant() const noexcept;

    /// l2 norm of (mu_n), head plus closed-form tail.
    [[nodiscard]] double mu_l2_norm() const;

private:
    std::vector<double> head_;
    SpectrumTail tail_;
};

[[nodiscard]] inline double lambda_at(const SpectralSequence& spectrum, std::size_t n) {
    return spectrum.lambda_at(n);
}

/// alpha_0..alpha_M followed by alpha_n = 1.
struct CoefficientSequence {
    Vector head;

    [[nodiscard]] double operator[](std::size_t n) const {
        return n < static_cast<std::size_t>(head.size()) ? head[static_cast<Eigen::Index>(n)]
                                                          : 1.0;
    }
};

// ---------------------------------------------------------------------------

/// Worker count from HALFINV_THREADS (0 or unset means hardware concurrency).
[[nodiscard]] std::size_t worker_count();

/// Runs body(i) for i in [begin, end) on up to worker_count() threads.
/// Each index is processed exactly once; results must not depend on order.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace halfinv
