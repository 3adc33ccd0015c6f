#include "support.hpp"

#include "halfinv/errors.hpp"
#include "halfinv/forward.hpp"
#include "halfinv/glm.hpp"
#include "halfinv/oracle.hpp"

#include <doctest.h>

using namespace halfinv;
using namespace halfinv::oracle;
using doctest::Approx;
using test::pi;

TEST_SUITE("oracle") {

TEST_CASE("closed forms") {
    CHECK(sigma_gamma(0.5, 0.0) == 0.5);
    CHECK(sigma_gamma(0.0, 0.7) == 0.0);
    CHECK(sigma_gamma(0.5, 1.0) == Approx((0.5 + 0.25) / 0.5));
    CHECK_THROWS_AS((void)sigma_gamma(1.5, 0.8), NumericalError);

    CHECK(kernel_gamma(0.5, 1.0, 0.0) == 1.0);
    CHECK(kernel_gamma(0.0, 0.3, 0.1) == 0.0);
    CHECK(inverse_kernel_gamma(0.5, 0.5, 0.25) == Approx(-4.0 / 7.0));

    CHECK(h_gamma(0.5) == -0.5);
    CHECK(h_gamma(0.0) == 0.0);
    CHECK(h_gamma(0.75) == Approx(-2.25));

    CHECK(eigenfunction_gamma(0.5, 0, 1.0) == Approx(2.0));
    CHECK(eigenfunction_gamma(0.5, 3, 0.0) == Approx(1.0));
    CHECK(eigenfunction_gamma(0.5, 1, 0.5) == Approx(2.0 / (3.0 * pi)));
    CHECK(phi0_gamma(0.4) == Approx(-0.2));

    CHECK(GammaFamily(0.99).solvable());
    CHECK_FALSE(GammaFamily(1.0).solvable());
}

TEST_CASE("trig defect") {
    CHECK(trig_defect(1.3, 0.0) == 0.0);
    CHECK(trig_defect(0.0, pi) == Approx(2.0));
    CHECK(2.0 <= pi * pi / std::sqrt(3.0));
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 2000; ++i) {
        const double a = u(rng), b = u(rng);
        CHECK(trig_defect(a, b) <= b * b / std::sqrt(3.0) + 1e-12);
    }
}

TEST_CASE("eigenfunctions solve the quasi-derivative system") {
    // compare against the shooting solution at lambda = pi n
    const double g = 0.5;
    const GridSpec grid(513, 0, 1);
    for (std::size_t n = 0; n < 5; ++n) {
        const Trajectory t = shoot(Primitive::example_gamma(g), pi * static_cast<double>(n), grid);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            err = std::max(err, std::abs(t.u[static_cast<Eigen::Index>(i)] - eigenfunction_gamma(g, n, grid.node(i))));
        }
        CHECK(err <= 1e-6);
    }
}

TEST_CASE("the kernel solves the GLM equation with f = -gamma") {
    const double g = 0.5;
    // k(x,t) - g - g int_0^x k(x,s) ds = g/(1-gx) - g - g x g/(1-gx) = 0
    for (double x : {0.0, 0.3, 0.9}) {
        for (double t : {0.0, x / 2, x}) {
            const double residual = kernel_gamma(g, x, t) - g - g * x * kernel_gamma(g, x, 0.0);
            CHECK(std::abs(residual) <= 1e-12);
        }
    }
    const GridSpec grid(129, 0, 1);
    const PhiExtension phi{SampledFunction::from(grid.extended(2), [g](double) { return -g / 2; }), -g / 2};
    KernelTriangle k(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) k(i, j) = kernel_gamma(g, grid.node(i), grid.node(j));
    }
    CHECK(glm_residual(k, phi) <= 1e-12);
}

}
