#pragma once

#include "halfinv/core.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace test {

inline constexpr double pi = std::numbers::pi;

/// Random trig polynomial a_0 + sum a_k cos(2 pi k x) + b_k sin(2 pi k x) on `grid`,
/// rescaled to the requested L2 norm.
inline halfinv::SampledFunction random_trig(std::mt19937_64& rng, const halfinv::GridSpec& grid,
                                            int degree, double norm) {
    std::normal_distribution<double> coef(0.0, 1.0);
    std::vector<double> a(static_cast<std::size_t>(degree) + 1);
    std::vector<double> b(static_cast<std::size_t>(degree) + 1);
    for (int k = 0; k <= degree; ++k) {
        a[static_cast<std::size_t>(k)] = coef(rng) / (1.0 + k);
        b[static_cast<std::size_t>(k)] = k == 0 ? 0.0 : coef(rng) / (1.0 + k);
    }
    auto f = halfinv::SampledFunction::from(grid, [&](double x) {
        double s = 0.0;
        for (int k = 0; k <= degree; ++k) {
            s += a[static_cast<std::size_t>(k)] * std::cos(2 * pi * k * x) +
                 b[static_cast<std::size_t>(k)] * std::sin(2 * pi * k * x);
        }
        return s;
    });
    const double scale = norm / halfinv::l2_norm(f);
    return halfinv::SampledFunction(grid, f.values() * scale);
}

}  // namespace test
