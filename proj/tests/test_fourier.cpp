#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "incilab/fourier.hpp"
#include "oracles.hpp"

using namespace incilab;

TEST_CASE("total measures at xi = 0") {
    REQUIRE(sphere_fourier_transform(2, 0.0) == Catch::Approx(2.0 * M_PI).epsilon(1e-12));
    REQUIRE(sphere_fourier_transform(3, 0.0) == Catch::Approx(4.0 * M_PI).epsilon(1e-12));
    REQUIRE_THROWS_AS(sphere_fourier_transform(4, 1.0), std::invalid_argument);
}

TEST_CASE("d = 3 quadrature matches the closed form (2/xi) sin(2 pi xi)") {
    REQUIRE(sphere_fourier_transform(3, 0.5) <= 1e-8);  // sin(pi) = 0
    for (double xi : {0.1, 0.3, 0.7, 1.0, 2.5, 5.0, 9.5, 17.0, 26.0, 38.5, 50.0}) {
        double quad = sphere_fourier_transform_signed(3, xi);
        REQUIRE(std::fabs(quad - oracles::sphere3_ft_closed(xi)) <= 1e-8);
    }
}

TEST_CASE("d = 2 quadrature matches the Bessel power series") {
    // the long-double series is trustworthy for 2 pi xi <~ 25, i.e. xi <= ~3.5
    for (double xi : {0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
        double quad = sphere_fourier_transform_signed(2, xi);
        REQUIRE(std::fabs(quad - oracles::circle_ft_closed(xi)) <= 1e-8);
    }
    // spec example: 2 pi J0(2 pi) at |xi| = 1
    REQUIRE(sphere_fourier_transform(2, 1.0) ==
            Catch::Approx(std::fabs(oracles::circle_ft_closed(1.0))).margin(1e-8));
}

TEST_CASE("decay products") {
    SECTION("normalization factor is 1 at |xi| = 1") {
        for (int d : {2, 3}) {
            DecayResult r = check_decay(d, {1.0});
            REQUIRE(r.normalized_products[0] == r.sigma_hat_values[0]);
        }
    }
    SECTION("d = 3: |xi| |sigma_hat| = 2 |sin(2 pi xi)| <= 2") {
        std::vector<double> grid;
        for (int i = 0; i <= 60; ++i) grid.push_back(1.0 + i * (99.0 / 60.0));
        DecayResult r = check_decay(3, grid);
        REQUIRE(r.sup_product <= 2.0 + 1e-6);
        for (std::size_t i = 0; i < grid.size(); ++i)
            REQUIRE(r.normalized_products[i] ==
                    Catch::Approx(2.0 * std::fabs(std::sin(2.0 * M_PI * grid[i]))).margin(1e-6));
    }
    SECTION("d = 2: sqrt(|xi|) |sigma_hat| stays below 3") {
        std::vector<double> grid;
        for (int i = 0; i <= 60; ++i) grid.push_back(std::pow(10.0, 2.0 * i / 60.0));
        DecayResult r = check_decay(2, grid);
        REQUIRE(r.sup_product <= 3.0);
        REQUIRE(r.sup_product >= 1.0);  // the oscillation peaks reach ~2
        REQUIRE(std::isfinite(r.sup_derivative_product));
    }
    SECTION("grid validation") {
        REQUIRE_THROWS_AS(check_decay(2, {0.5}), std::invalid_argument);
        REQUIRE_THROWS_AS(check_decay(2, {2000.0}), std::invalid_argument);
        REQUIRE_THROWS_AS(check_decay(2, {}), std::invalid_argument);
    }
}
