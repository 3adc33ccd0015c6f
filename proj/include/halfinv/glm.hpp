#pragma once

#include "halfinv/basis.hpp"
#include "halfinv/core.hpp"
#include "halfinv/forward.hpp"
#include "halfinv/transform.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace halfinv {

/// phi on [0, 2] built from the series with the recovered alpha_n.
struct PhiExtension {
    SampledFunction samples;
    double phi_at_zero = 0.0;
};

/// Raised when the mixed data admit no solution. Carries the membership report.
class Unsolvable : public std::runtime_error {
public:
    Unsolvable(MembershipReport report, const std::string& what, double positivity_margin = NAN)
        : std::runtime_error(what), report_(std::move(report)), margin_(positivity_margin) {}

    [[nodiscard]] const MembershipReport& report() const noexcept { return report_; }
    /// NaN when the membership gate failed before positivity was assessed.
    [[nodiscard]] double positivity_margin() const noexcept { return margin_; }

private:
    MembershipReport report_;
    double margin_;
};

/// phi(x) = psi_Lambda(x) + sum_n beta_n cos(lambda_n x) + 1/2 on `grid` (inside [0, 2]).
/// Throws Unsolvable if the report is not solvable.
[[nodiscard]] PhiExtension extend_phi(const MembershipReport& report, const SpectralSequence& spectrum,
                                      const GridSpec& grid);

/// f(x,t) = phi(x+t) + phi(|x-t|), by interpolation on the samples.
[[nodiscard]] double f_phi(const PhiExtension& phi, double x, double t);

/// Smallest eigenvalue of the symmetrized trapezoid Nystrom matrix of I + F_phi on `grid`.
[[nodiscard]] double positivity_check(const PhiExtension& phi, const GridSpec& grid);

/// k(x,t) + f(x,t) + int_0^x k(x,s) f(s,t) ds = 0 on 0 <= t <= x, one trapezoid Nystrom
/// system per row; k(0,0) = -f(0,0). SingularSystem if a row cannot be solved.
[[nodiscard]] KernelTriangle glm_solve(const PhiExtension& phi, const GridSpec& grid);

/// Largest |k + f + int k f| / (1 + |f|) over node pairs, with the same trapezoid rule.
[[nodiscard]] double glm_residual(const KernelTriangle& k, const PhiExtension& phi);

/// sigma(x) = 2 k(x,x) + 2 phi(0).
[[nodiscard]] SampledFunction sigma_from_kernel(const KernelTriangle& k, const PhiExtension& phi);

struct BoundaryEstimate {
    double h = 0.0;
    double spread = 0.0;
};

/// h_n = v(1)/u(1) from shooting the recovered sigma at lambda_0..lambda_2.
/// BoundaryDegenerate if |u(1)| < 1e-10.
[[nodiscard]] BoundaryEstimate recover_h(const SampledFunction& sigma, const SpectralSequence& spectrum,
                                         const GridSpec& grid);

/// || (I+F)(I+K^T)(I+K) - I || in the L2 operator norm, sampled on `grid`. K and the
/// operator products come from a grid `refinement` times finer.
[[nodiscard]] double factorization_defect(const PhiExtension& phi, const GridSpec& grid,
                                          std::size_t refinement = 2);

struct ReconstructionConfig {
    std::size_t grid_points = 257;                 // on [0, 1]
    std::optional<std::size_t> truncation;         // default_truncation() when empty
    KernelMethod kernel = KernelMethod::Collocation;
    bool roundtrip = false;                        // also run the forward problem on the result
};

struct ReconstructionDiagnostics {
    double glm_residual = 0.0;
    double positivity_margin = 0.0;
    double h_spread = 0.0;
    double expansion_residual = 0.0;
    std::optional<double> roundtrip_spectrum_error;
};

struct ReconstructionResult {
    SampledFunction sigma;
    double h = 0.0;
    ReconstructionDiagnostics diagnostics;
    MembershipReport report;
    SampledFunction phi0;
    PhiExtension phi;
    KernelTriangle kernel;
    std::optional<Vector> roundtrip_lambdas;
};

/// Below this margin the positivity gate declares the data numerically unsolvable.
inline constexpr double kPositivityThreshold = 1e-8;

/// Half-inverse reconstruction: kernel on [0, 1/2] -> phi0 -> membership -> phi on [0, 2]
/// -> positivity -> GLM -> sigma on [0, 1] -> h.
[[nodiscard]] ReconstructionResult reconstruct(const Primitive& sigma0, const SpectralSequence& spectrum,
                                               const ReconstructionConfig& config = {});

}  // namespace halfinv
