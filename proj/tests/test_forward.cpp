#include "support.hpp"

#include "halfinv/errors.hpp"
#include "halfinv/forward.hpp"
#include "halfinv/oracle.hpp"

#include <doctest.h>

using namespace halfinv;
using test::pi;

namespace {

// Independent root finder: sign scan of the characteristic function on a fixed
// lambda step, then plain bisection on each bracket.
std::vector<double> scan_roots(const Primitive& sigma, const BoundaryParam& bc, const GridSpec& grid,
                               double lambda_max, std::size_t wanted) {
    std::vector<double> roots;
    const double step = 1e-3;
    double a = 1e-6;
    double fa = characteristic(sigma, bc, a, grid);
    while (a < lambda_max && roots.size() < wanted) {
        const double b = a + step;
        const double fb = characteristic(sigma, bc, b, grid);
        if ((fa < 0) != (fb < 0)) {
            double lo = a, hi = b, flo = fa;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = characteristic(sigma, bc, mid, grid);
                if ((fm < 0) == (flo < 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    return roots;
}

double max_abs(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("forward") {

TEST_CASE("free trajectories") {
    const GridSpec g(513, 0, 1);
    const Trajectory t = shoot(Primitive::zero(), pi, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.node(i);
        CHECK(std::abs(t.u[static_cast<Eigen::Index>(i)] - std::cos(pi * x)) <= 1e-8);
        CHECK(std::abs(t.v[static_cast<Eigen::Index>(i)] + pi * std::sin(pi * x)) <= 1e-8);
    }
    const Trajectory c = shoot(Primitive::zero(), 0.0, GridSpec(65, 0, 1));
    CHECK(max_abs(c.u.array() - 1.0) == 0.0);
    CHECK(max_abs(c.v) == 0.0);
}

TEST_CASE("gamma trajectories follow the closed form") {
    const double g = 0.5;
    const GridSpec grid(257, 0, 1);
    for (double lambda : {0.7, 3.0, 10.0}) {
        const Trajectory t = shoot(Primitive::example_gamma(g), lambda, grid);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = grid.node(i);
            const double exact = std::cos(lambda * x) + g / lambda * std::sin(lambda * x) / (1 - g * x);
            err = std::max(err, std::abs(t.u[static_cast<Eigen::Index>(i)] - exact));
        }
        CHECK(err <= 1e-6);
    }
}

TEST_CASE("characteristic function zeros") {
    const GridSpec g(2049, 0, 1);
    for (int n = 0; n < 4; ++n) {
        CHECK(std::abs(characteristic(Primitive::zero(), Robin{0.0}, pi * n, g)) <= 1e-8);
        CHECK(std::abs(characteristic(Primitive::example_gamma(0.5), Robin{-0.5}, pi * n, g)) <= 1e-6);
    }
    CHECK(std::abs(characteristic(Primitive::zero(), Dirichlet{}, pi / 2, g)) <= 1e-8);
    // energy form agrees with lambda form for positive energies
    CHECK(characteristic_energy(Primitive::example_gamma(0.3), Robin{0.2}, 4.0, g) ==
          doctest::Approx(characteristic(Primitive::example_gamma(0.3), Robin{0.2}, 2.0, g)));
}

TEST_CASE("free eigenvalues") {
    const GridSpec fine(1025, 0, 1);
    const Vector robin = eigenvalues(Primitive::zero(), Robin{0.0}, 5, fine);
    const Vector dirichlet = eigenvalues(Primitive::zero(), Dirichlet{}, 5, fine);
    for (int n = 0; n < 5; ++n) {
        CHECK(std::abs(robin[n] - pi * n) <= 1e-8);
        CHECK(std::abs(dirichlet[n] - pi * (n + 0.5)) <= 1e-8);
    }
}

TEST_CASE("gamma example spectrum is harmonic") {
    const Vector l = eigenvalues(Primitive::example_gamma(0.5), Robin{-0.5}, 5, GridSpec(257, 0, 1));
    for (int n = 0; n < 5; ++n) CHECK(std::abs(l[n] - pi * n) <= 1e-6);
}

TEST_CASE("constant potential: closed form and brute-force scan") {
    // q = 1, sigma = x. Robin(-1) in quasi-derivative form is y'(1) = 0, so lambda_n^2 = 1 + pi^2 n^2.
    const GridSpec g(257, 0, 1);
    const auto q = SampledFunction::from(GridSpec(257, 0, 1), [](double) { return 1.0; });
    const auto sigma = Primitive::antiderivative_of(q);
    const Vector l = eigenvalues(sigma, Robin{-1.0}, 5, g);
    const auto scanned = scan_roots(sigma, Robin{-1.0}, g, 14.0, 5);
    REQUIRE(scanned.size() == 5);
    for (int n = 0; n < 5; ++n) {
        CHECK(std::abs(l[n] - std::sqrt(1 + pi * pi * n * n)) <= 1e-6);
        CHECK(std::abs(l[n] - scanned[static_cast<std::size_t>(n)]) <= 1e-9);
    }
    // Robin(0) means y'(1) = y(1): the ground state is negative
    try {
        (void)eigenvalues(sigma, Robin{0.0}, 3, g);
        FAIL("expected NegativeEigenvalue");
    } catch (const NumericalError& e) {
        CHECK(e.kind() == ErrorKind::NegativeEigenvalue);
    }
}

TEST_CASE("random smooth potentials agree with the scan oracle") {
    std::mt19937_64 rng(21);
    const GridSpec g(257, 0, 1);
    for (int trial = 0; trial < 4; ++trial) {
        const auto q = test::random_trig(rng, g, 3, 1.5);
        const auto sigma = Primitive::antiderivative_of(q);
        const BoundaryParam bc = trial % 2 ? BoundaryParam{Dirichlet{}} : BoundaryParam{Robin{3.0}};
        std::vector<double> scanned;
        try {
            const Vector l = eigenvalues(sigma, bc, 4, g);
            scanned = scan_roots(sigma, bc, g, l[3] + 0.5, 4);
            REQUIRE(scanned.size() == 4);
            for (int n = 0; n < 4; ++n) CHECK(std::abs(l[n] - scanned[static_cast<std::size_t>(n)]) <= 1e-9);
        } catch (const NumericalError& e) {
            // a negative ground state is a legitimate outcome for random data
            CHECK(e.kind() == ErrorKind::NegativeEigenvalue);
        }
    }
}

TEST_CASE("norming constants") {
    const GridSpec fine(1025, 0, 1);
    const Eigensystem free = eigensystem(Primitive::zero(), Robin{0.0}, 5, fine);
    CHECK(std::abs(free.alphas[0] - 0.5) <= 1e-8);
    for (int n = 1; n < 5; ++n) CHECK(std::abs(free.alphas[n] - 1.0) <= 1e-8);

    // gamma example: quadrature of the closed-form eigenfunctions
    const double g = 0.5;
    const GridSpec grid(257, 0, 1);
    const Eigensystem es = eigensystem(Primitive::example_gamma(g), Robin{-g * g / (1 - g)}, 6, grid);
    const GridSpec quad(4097, 0, 1);
    for (std::size_t n = 0; n < 6; ++n) {
        const auto w2 = SampledFunction::from(quad, [&](double x) {
            const double w = std::sqrt(2.0) * oracle::eigenfunction_gamma(g, n, x);
            return w * w;
        });
        const double alpha = 1.0 / integrate(w2);
        CHECK(std::abs(es.alphas[static_cast<Eigen::Index>(n)] - alpha) <= 1e-6);
        CHECK(es.alphas[static_cast<Eigen::Index>(n)] > 0.0);
    }
    CHECK(std::abs(es.alphas[0] - (1 - g) / 2) <= 1e-6);

    CHECK_THROWS_AS((void)norming_constants(Primitive::zero(), Robin{0.0}, Vector::Constant(1, 1.0), grid),
                    NumericalError);
}

TEST_CASE("eigenfunctions are orthogonal and normalized") {
    std::mt19937_64 rng(3);
    const GridSpec g(513, 0, 1);
    const auto sigma = Primitive::antiderivative_of(test::random_trig(rng, g, 4, 1.0));
    const Eigensystem es = eigensystem(sigma, Dirichlet{}, 6, g);
    std::vector<SampledFunction> w;
    for (Eigen::Index n = 0; n < 6; ++n) {
        const Trajectory t = shoot(sigma, es.lambdas[n], g);
        w.emplace_back(g, std::sqrt(2.0) * t.u);
    }
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double njj = integrate(SampledFunction(g, w[j].values().cwiseAbs2()));
        CHECK(std::abs(njj * es.alphas[static_cast<Eigen::Index>(j)] - 1.0) <= 1e-5);
        for (std::size_t k = j + 1; k < w.size(); ++k) {
            const double njk = integrate(SampledFunction(g, w[j].values().cwiseProduct(w[k].values())));
            const double nkk = integrate(SampledFunction(g, w[k].values().cwiseAbs2()));
            CHECK(std::abs(njk) <= 1e-5 * std::sqrt(njj * nkk));
        }
    }
}

TEST_CASE("fourth-order mesh convergence") {
    const auto sigma = Primitive::example_gamma(0.3);
    const Vector a = eigenvalues(sigma, Robin{-1.0}, 11, GridSpec(129, 0, 1));
    const Vector b = eigenvalues(sigma, Robin{-1.0}, 11, GridSpec(257, 0, 1));
    const Vector c = eigenvalues(sigma, Robin{-1.0}, 11, GridSpec(513, 0, 1));
    for (Eigen::Index n = 1; n < 11; ++n) {
        const double coarse = std::abs(a[n] - b[n]);
        const double finer = std::abs(b[n] - c[n]);
        CHECK(finer <= coarse / 12.0);
        CHECK(finer <= 2e3 * std::pow(1.0 / 256.0, 4) * std::pow(static_cast<double>(n), 5));
    }
}

TEST_CASE("Robin asymptotics: lambda_n - pi n decays") {
    const GridSpec g(513, 0, 1);
    for (double gamma : {0.2, 0.6}) {
        // h below -sigma(1) keeps the spectrum positive
        const Vector l = eigenvalues(Primitive::example_gamma(gamma), Robin{-3.0}, 16, g);
        for (Eigen::Index n = 5; n + 1 < 16; ++n) {
            CHECK(std::abs(l[n + 1] - pi * static_cast<double>(n + 1)) < std::abs(l[n] - pi * static_cast<double>(n)));
        }
    }
}

TEST_CASE("sampled step primitive is handled without smoothing") {
    const GridSpec g(257, 0, 1);
    const auto step = SampledFunction::from(g, [](double x) { return x < 0.25 ? 0.0 : 1.0; });
    const Vector l = eigenvalues(Primitive::sampled(step), Dirichlet{}, 4, g);
    for (Eigen::Index n = 0; n + 1 < 4; ++n) CHECK(l[n] < l[n + 1]);
    CHECK(std::all_of(l.begin(), l.end(), [](double v) { return std::isfinite(v); }));
}

}
