#include "halfinv/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace halfinv {

GridSpec::GridSpec(std::size_t n_points, double a, double b) : n_(n_points), a_(a), b_(b) {
    if (n_points < 5 || n_points % 2 == 0) {
        throw std::invalid_argument("grid needs an odd node count >= 5, got " +
                                    std::to_string(n_points));
    }
    if (!(b > a)) {
        throw std::invalid_argument("grid interval must satisfy b > a");
    }
}

Vector GridSpec::nodes() const {
    Vector x(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) x[static_cast<Eigen::Index>(i)] = node(i);
    return x;
}

GridSpec GridSpec::extended(std::size_t factor) const {
    return GridSpec(factor * (n_ - 1) + 1, a_, a_ + static_cast<double>(factor) * (b_ - a_));
}

GridSpec GridSpec::refined(std::size_t factor) const {
    return GridSpec(factor * (n_ - 1) + 1, a_, b_);
}

// ---------------------------------------------------------------------------

SampledFunction::SampledFunction(GridSpec grid, Vector values)
    : grid_(grid), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
        throw std::invalid_argument("sample count does not match grid");
    }
    cumulative_.resize(values_.size());
    cumulative_[0] = 0.0;
    const double h = grid_.step();
    for (Eigen::Index i = 1; i < values_.size(); ++i) {
        cumulative_[i] = cumulative_[i - 1] + 0.5 * h * (values_[i - 1] + values_[i]);
    }
}

namespace {

// Cell index and local coordinate in [0,1] for x (clamped to the grid).
std::pair<Eigen::Index, double> locate(const GridSpec& g, double x) {
    const double s = (x - g.lower()) / g.step();
    const auto last = static_cast<Eigen::Index>(g.size()) - 1;
    if (s <= 0.0) return {0, 0.0};
    if (s >= static_cast<double>(last)) return {last - 1, 1.0};
    auto i = static_cast<Eigen::Index>(std::floor(s));
    if (i >= last) i = last - 1;
    return {i, s - static_cast<double>(i)};
}

}  // namespace

double SampledFunction::operator()(double x) const {
    const auto [i, r] = locate(grid_, x);
    return (1.0 - r) * values_[i] + r * values_[i + 1];
}

double SampledFunction::cubic(double x) const {
    const auto [i, r] = locate(grid_, x);
    const auto n = values_.size();
    // stencil start, so that the stencil is [s, s+3]
    Eigen::Index s = std::clamp<Eigen::Index>(i - 1, 0, n - 4);
    const double t = static_cast<double>(i - s) + r;  // position inside the stencil
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) {
        double w = 1.0;
        for (int m = 0; m < 4; ++m) {
            if (m != k) w *= (t - m) / static_cast<double>(k - m);
        }
        acc += w * values_[s + k];
    }
    return acc;
}

double SampledFunction::antiderivative(double x) const {
    const auto [i, r] = locate(grid_, x);
    const double h = grid_.step();
    // integral over [x_i, x_i + r h] of the linear interpolant
    const double partial = h * r * (values_[i] + 0.5 * r * (values_[i + 1] - values_[i]));
    return cumulative_[i] + partial;
}

double integrate(const SampledFunction& f) {
    const auto& v = f.values();
    const auto n = v.size();
    double odd = 0.0;
    double even = 0.0;
    for (Eigen::Index i = 1; i < n - 1; ++i) {
        (i % 2 == 1 ? odd : even) += v[i];
    }
    return f.grid().step() / 3.0 * (v[0] + v[n - 1] + 4.0 * odd + 2.0 * even);
}

double l2_norm(const SampledFunction& f) {
    const SampledFunction squared(f.grid(), f.values().array().square().matrix());
    return std::sqrt(std::max(0.0, integrate(squared)));
}

Vector trapezoid_weights(std::size_t count, double step) {
    Vector w = Vector::Constant(static_cast<Eigen::Index>(count), step);
    if (count == 1) {
        w[0] = 0.0;
        return w;
    }
    w[0] *= 0.5;
    w[static_cast<Eigen::Index>(count) - 1] *= 0.5;
    return w;
}

// ---------------------------------------------------------------------------

Primitive Primitive::example_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma < 2.0)) {
        throw std::invalid_argument("example gamma must lie in [0, 2)");
    }
    return Primitive(GammaPrimitive{gamma});
}

double Primitive::operator()(double x) const {
    struct Visitor {
        double x;
        double operator()(const ZeroPrimitive&) const { return 0.0; }
        double operator()(const SampledPrimitive& p) const { return p.sigma.cubic(x); }
        double operator()(const AntiderivativePrimitive& p) const { return p.q.antiderivative(x); }
        double operator()(const GammaPrimitive& p) const {
            return 2.0 * p.gamma / (1.0 - p.gamma * x) - p.gamma;
        }
    };
    return std::visit(Visitor{x}, rep_);
}

std::optional<Primitive::Potential> Primitive::potential(const GridSpec& grid) const {
    struct Visitor {
        const GridSpec& grid;
        std::optional<Potential> operator()(const ZeroPrimitive&) const {
            return Potential{SampledFunction(grid, Vector::Zero(static_cast<Eigen::Index>(grid.size()))),
                             0.0};
        }
        std::optional<Potential> operator()(const SampledPrimitive&) const { return std::nullopt; }
        std::optional<Potential> operator()(const AntiderivativePrimitive& p) const {
            if (p.q.grid() == grid) return Potential{p.q, 0.0};
            return Potential{SampledFunction::from(grid, [&](double x) { return p.q(x); }), 0.0};
        }
        std::optional<Potential> operator()(const GammaPrimitive& p) const {
            const double g = p.gamma;
            auto q = SampledFunction::from(grid, [g](double x) {
                const double d = 1.0 - g * x;
                return 2.0 * g * g / (d * d);
            });
            return Potential{std::move(q), g};
        }
    };
    return std::visit(Visitor{grid}, rep_);
}

// ---------------------------------------------------------------------------

SpectralSequence::SpectralSequence(std::vector<double> head, SpectrumTail tail)
    : head_(std::move(head)), tail_(tail) {
    if (head_.empty()) {
        throw std::invalid_argument("spectrum head must contain at least lambda_0");
    }
    if (!(head_.front() >= 0.0)) {
        throw std::invalid_argument("lambda_0 must be nonnegative");
    }
    for (std::size_t n = 1; n < head_.size(); ++n) {
        if (!(head_[n] > head_[n - 1])) {
            throw std::invalid_argument("spectrum head must be strictly increasing");
        }
    }
    const std::size_t first_tail = head_.size();
    if (!(lambda_at(first_tail) > head_.back())) {
        throw std::invalid_argument("spectrum tail must continue above the head");
    }
    // pi*n + c/n increases for n >= N+1 iff c < pi*(N+1)*(N+2).
    const double c = tail_constant();
    const auto n = static_cast<double>(first_tail);
    if (!(c < std::numbers::pi * n * (n + 1.0))) {
        throw std::invalid_argument("Coulomb tail constant too large for a monotone tail");
    }
}

SpectralSequence SpectralSequence::harmonic(std::size_t last_index) {
    std::vector<double> head(last_index + 1);
    for (std::size_t n = 0; n <= last_index; ++n) head[n] = std::numbers::pi * static_cast<double>(n);
    return SpectralSequence(std::move(head), ExactPiTail{});
}

double SpectralSequence::tail_constant() const noexcept {
    if (const auto* coulomb = std::get_if<CoulombTail>(&tail_)) return coulomb->c;
    return 0.0;
}

double SpectralSequence::lambda_at(std::size_t n) const {
    if (n < head_.size()) return head_[n];
    const auto nn = static_cast<double>(n);
    return std::numbers::pi * nn + tail_constant() / nn;
}

double SpectralSequence::mu_at(std::size_t n) const {
    return lambda_at(n) - std::numbers::pi * static_cast<double>(n);
}

double SpectralSequence::mu_l2_norm() const {
    double sum = 0.0;
    double harmonic_head = 0.0;  // sum_{n=1}^{N} 1/n^2
    for (std::size_t n = 0; n < head_.size(); ++n) {
        const double mu = mu_at(n);
        sum += mu * mu;
        if (n > 0) harmonic_head += 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    }
    const double c = tail_constant();
    const double tail = std::numbers::pi * std::numbers::pi / 6.0 - harmonic_head;
    sum += c * c * std::max(0.0, tail);
    return std::sqrt(sum);
}

// ---------------------------------------------------------------------------

std::size_t worker_count() {
    std::size_t requested = 0;
    if (const char* env = std::getenv("HALFINV_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) requested = static_cast<std::size_t>(v);
    }
    if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
    return requested;
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body) {
    if (end <= begin) return;
    const std::size_t count = end - begin;
    const std::size_t workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = begin; i < end; ++i) body(i);
        return;
    }
    // strided assignment balances triangular workloads
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = begin + w; i < end; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace halfinv
