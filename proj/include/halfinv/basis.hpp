#pragma once

#include "halfinv/core.hpp"

namespace halfinv {

/// psi_Lambda(x) = sum_n [cos(lambda_n x) - cos(pi n x)] on a grid inside [0, 2].
///
/// Head terms are summed directly. A Coulomb tail (mu_n = c/n) is expanded in powers of
/// c x / n; the first three orders use the closed forms of sum sin(n t)/n, cos(n t)/n^2 and
/// sin(n t)/n^3 on [0, 2 pi], and the exact remainder is summed until its bound falls
/// below 1e-10.
[[nodiscard]] SampledFunction psi_lambda(const SpectralSequence& spectrum, const GridSpec& grid);
[[nodiscard]] double psi_lambda_at(const SpectralSequence& spectrum, double x);

/// G_ij = int_0^1 cos(lambda_i x) cos(lambda_j x) dx in closed form, i, j < size.
[[nodiscard]] Matrix gram_matrix(const SpectralSequence& spectrum, std::size_t size);

struct Expansion {
    Vector coefficients;
    double residual = 0.0;  // L2 misfit of the truncated series
    double condition = 1.0;
};

/// Coefficients c with g ~ sum_{n<size} c_n cos(lambda_n x) on [0,1], from the Gram system.
/// IllConditioned when the Gram condition estimate exceeds 1e8.
[[nodiscard]] Expansion expand(const SampledFunction& g, const SpectralSequence& spectrum,
                               std::size_t size);

/// sum_n c_n cos(lambda_n x) sampled on `grid`.
[[nodiscard]] SampledFunction synthesize(const Vector& coefficients, const SpectralSequence& spectrum,
                                         const GridSpec& grid);

/// Below this min(alpha) the verdict is reported as marginal.
inline constexpr double kMarginalAlpha = 0.05;

struct MembershipReport {
    CoefficientSequence beta;   // tail 0 (stored head only)
    CoefficientSequence alpha;  // 1 + beta, tail 1
    double min_alpha = 0.0;
    bool solvable = false;
    bool marginal = false;
    double expansion_residual = 0.0;
};

/// Head length + 8, capped at 64 (never below 1).
[[nodiscard]] std::size_t default_truncation(const SpectralSequence& spectrum);

/// beta = expand(phi0 - psi_Lambda - 1/2), alpha = 1 + beta; solvable iff every head alpha > 0.
[[nodiscard]] MembershipReport membership_check(const SampledFunction& phi0,
                                                const SpectralSequence& spectrum,
                                                std::size_t truncation);

/// ||q0||_{L2(0,1/2)} <= 1/2 and ||mu||_{l2} <= 1/4. True guarantees solvability.
[[nodiscard]] bool local_existence_check(const SampledFunction& q0, const SpectralSequence& spectrum);

enum class Regularity { ConsistentWithW21, Inconclusive };

struct RegularityFit {
    Regularity verdict = Regularity::Inconclusive;
    double c = 0.0;          // least-squares fit beta_n ~ c/n, n >= 1
    double residual = 0.0;   // l2 misfit of that fit
    double beta_norm = 0.0;  // l2 norm of beta_n, n >= 1
};

/// Heuristic: consistent when the tail has the c/n form and the fit residual is at most
/// 10% of the beta head norm.
[[nodiscard]] RegularityFit regularity_diagnostic(const MembershipReport& report,
                                                  const SpectralSequence& spectrum);

}  // namespace halfinv
