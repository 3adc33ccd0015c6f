#include "halfinv/basis.hpp"

#include "halfinv/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace halfinv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTailTolerance = 1e-10;

// Closed forms on theta in [0, 2 pi].
// The sawtooth jumps at 2 pi; the GLM kernel only reaches x = 2 from below, so the
// left limit is used there.
double sine_series_1(double theta) {  // sum sin(n t)/n
    if (theta <= 0.0) return 0.0;
    return 0.5 * (kPi - std::min(theta, 2.0 * kPi));
}
double cosine_series_2(double theta) {  // sum cos(n t)/n^2
    return kPi * kPi / 6.0 - 0.5 * kPi * theta + 0.25 * theta * theta;
}
double sine_series_3(double theta) {  // sum sin(n t)/n^3
    return kPi * kPi * theta / 6.0 - 0.25 * kPi * theta * theta + theta * theta * theta / 12.0;
}

// cos b - 1 + b^2/2
double cos_remainder(double b) {
    const double b2 = b * b;
    if (std::abs(b) < 0.1) return b2 * b2 * (1.0 / 24.0 - b2 * (1.0 / 720.0 - b2 / 40320.0));
    return std::cos(b) - 1.0 + 0.5 * b2;
}
// sin b - b + b^3/6
double sin_remainder(double b) {
    const double b2 = b * b;
    if (std::abs(b) < 0.1) return b2 * b2 * b * (1.0 / 120.0 - b2 * (1.0 / 5040.0 - b2 / 362880.0));
    return std::sin(b) - b + b2 * b / 6.0;
}

// sum_{n > N} [cos((pi n + c/n) x) - cos(pi n x)] for N = first - 1 >= 0.
double coulomb_tail(double c, std::size_t first, double x) {
    if (c == 0.0 || x == 0.0) return 0.0;
    const double theta = kPi * x;
    double head1 = 0.0;
    double head2 = 0.0;
    double head3 = 0.0;
    for (std::size_t n = 1; n < first; ++n) {
        const double nn = static_cast<double>(n);
        head1 += std::sin(nn * theta) / nn;
        head2 += std::cos(nn * theta) / (nn * nn);
        head3 += std::sin(nn * theta) / (nn * nn * nn);
    }
    const double cx = c * x;
    double sum = -cx * (sine_series_1(theta) - head1) -
                 0.5 * cx * cx * (cosine_series_2(theta) - head2) +
                 cx * cx * cx / 6.0 * (sine_series_3(theta) - head3);

    // sum_{n > K} |remainder| <= (cx)^4/(72 K^3) + |cx|^5/(480 K^4)
    const double a = std::abs(cx);
    auto bound = [a](double k) {
        return std::pow(a, 4) / (72.0 * k * k * k) + std::pow(a, 5) / (480.0 * k * k * k * k);
    };
    auto last = static_cast<double>(first);
    if (bound(last) > kTailTolerance) {
        last = std::max(last, std::ceil(std::cbrt(std::pow(a, 4) / (72.0 * kTailTolerance))));
        while (bound(last) > kTailTolerance) last *= 1.25;
    }
    const auto stop = static_cast<std::size_t>(last);
    for (std::size_t n = first; n <= stop; ++n) {
        const double nn = static_cast<double>(n);
        const double b = cx / nn;
        sum += std::cos(nn * theta) * cos_remainder(b) - std::sin(nn * theta) * sin_remainder(b);
    }
    return sum;
}

double sinc(double z) {
    if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

}  // namespace

double psi_lambda_at(const SpectralSequence& spectrum, double x) {
    double sum = 0.0;
    for (std::size_t n = 0; n < spectrum.head_size(); ++n) {
        sum += std::cos(spectrum[n] * x) - std::cos(kPi * static_cast<double>(n) * x);
    }
    return sum + coulomb_tail(spectrum.tail_constant(), spectrum.head_size(), x);
}

SampledFunction psi_lambda(const SpectralSequence& spectrum, const GridSpec& grid) {
    if (grid.lower() < 0.0 || grid.upper() > 2.0 + 1e-12) {
        throw std::invalid_argument("psi_Lambda is evaluated on a subinterval of [0, 2]");
    }
    return SampledFunction::from(grid, [&](double x) { return psi_lambda_at(spectrum, x); });
}

Matrix gram_matrix(const SpectralSequence& spectrum, std::size_t size) {
    const auto m = static_cast<Eigen::Index>(size);
    Matrix g(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double li = spectrum[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double lj = spectrum[static_cast<std::size_t>(j)];
            g(i, j) = g(j, i) = 0.5 * (sinc(li - lj) + sinc(li + lj));
        }
    }
    return g;
}

SampledFunction synthesize(const Vector& coefficients, const SpectralSequence& spectrum,
                           const GridSpec& grid) {
    return SampledFunction::from(grid, [&](double x) {
        double s = 0.0;
        for (Eigen::Index n = 0; n < coefficients.size(); ++n) {
            s += coefficients[n] * std::cos(spectrum[static_cast<std::size_t>(n)] * x);
        }
        return s;
    });
}

Expansion expand(const SampledFunction& g, const SpectralSequence& spectrum, std::size_t size) {
    if (size == 0) throw std::invalid_argument("expansion size must be positive");
    const GridSpec& grid = g.grid();
    const Vector x = grid.nodes();
    const auto m = static_cast<Eigen::Index>(size);
    Vector d(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double lambda = spectrum[static_cast<std::size_t>(j)];
        const SampledFunction product(grid, g.values().cwiseProduct((lambda * x).array().cos().matrix()));
        d[j] = integrate(product);
    }
    const Matrix gram = gram_matrix(spectrum, size);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const double smallest = eig.eigenvalues()[0];
    const double largest = eig.eigenvalues()[m - 1];
    const double condition = smallest > 0.0 ? largest / smallest : INFINITY;
    if (!(condition <= 1e8)) {
        throw NumericalError(ErrorKind::IllConditioned,
                             "Gram matrix condition exceeds 1e8; the spectrum is too irregular for "
                             "this truncation");
    }
    Expansion out;
    out.coefficients = gram.ldlt().solve(d);
    out.condition = condition;
    const SampledFunction fit = synthesize(out.coefficients, spectrum, grid);
    out.residual = l2_norm(SampledFunction(grid, g.values() - fit.values()));
    return out;
}

std::size_t default_truncation(const SpectralSequence& spectrum) {
    return std::min<std::size_t>(spectrum.head_size() + 8, 64);
}

MembershipReport membership_check(const SampledFunction& phi0, const SpectralSequence& spectrum,
                                  std::size_t truncation) {
    const GridSpec& grid = phi0.grid();
    if (std::abs(grid.lower()) > 1e-12 || std::abs(grid.upper() - 1.0) > 1e-12) {
        throw std::invalid_argument("phi0 must be sampled on [0, 1]");
    }
    const SampledFunction psi = psi_lambda(spectrum, grid);
    const SampledFunction target(grid, (phi0.values() - psi.values()).array() - 0.5);
    const Expansion e = expand(target, spectrum, truncation);

    MembershipReport report;
    report.beta.head = e.coefficients;
    report.alpha.head = e.coefficients.array() + 1.0;
    report.min_alpha = report.alpha.head.minCoeff();
    report.solvable = report.min_alpha > 0.0;
    report.marginal = report.solvable && report.min_alpha < kMarginalAlpha;
    report.expansion_residual = e.residual;
    return report;
}

bool local_existence_check(const SampledFunction& q0, const SpectralSequence& spectrum) {
    return l2_norm(q0) <= 0.5 && spectrum.mu_l2_norm() <= 0.25;
}

RegularityFit regularity_diagnostic(const MembershipReport& report, const SpectralSequence& spectrum) {
    RegularityFit fit;
    const Vector& beta = report.beta.head;
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index n = 1; n < beta.size(); ++n) {
        const double inv = 1.0 / static_cast<double>(n);
        num += beta[n] * inv;
        den += inv * inv;
    }
    fit.c = den > 0.0 ? num / den : 0.0;
    double misfit = 0.0;
    double norm = 0.0;
    for (Eigen::Index n = 1; n < beta.size(); ++n) {
        const double r = beta[n] - fit.c / static_cast<double>(n);
        misfit += r * r;
        norm += beta[n] * beta[n];
    }
    fit.residual = std::sqrt(misfit);
    fit.beta_norm = std::sqrt(norm);
    // both tail models are of the c/n form (ExactPi is c = 0)
    const bool coulomb_compatible = std::holds_alternative<CoulombTail>(spectrum.tail()) ||
                                    std::holds_alternative<ExactPiTail>(spectrum.tail());
    const bool good_fit = fit.residual <= 0.1 * fit.beta_norm + 1e-9;
    fit.verdict = coulomb_compatible && good_fit ? Regularity::ConsistentWithW21 : Regularity::Inconclusive;
    return fit;
}

}  // namespace halfinv
