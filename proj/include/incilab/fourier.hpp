#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "incilab/vec.hpp"

namespace incilab {

// Fourier transform of the (unnormalized) surface measure of the unit sphere,
// sigma_hat(xi) = int_{S^{d-1}} exp(-2 pi i x.xi) dsigma(x). By rotational
// symmetry it is real and depends on |xi| only:
//   d = 2: integral over the circle angle,
//   d = 3: 2 pi int_{-1}^{1} cos(2 pi |xi| t) dt.
// Quadrature doubles the node count until the result moves by < tol.
namespace detail {

inline double circle_quadrature(double xi, std::size_t n) {
    // periodic trapezoid rule; spectrally accurate once n exceeds ~2*pi*xi
    double sum = 0.0;
    const double step = 6.283185307179586 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        double theta = step * static_cast<double>(k);
        sum += std::cos(6.283185307179586 * xi * std::cos(theta));
    }
    return sum * step;
}

inline double band_quadrature(double xi, std::size_t n) {
    // composite Simpson on [-1, 1] (n even)
    const double h = 2.0 / static_cast<double>(n);
    const double w = 6.283185307179586 * xi;
    double sum = std::cos(-w) + std::cos(w);
    for (std::size_t k = 1; k < n; ++k) {
        double t = -1.0 + h * static_cast<double>(k);
        sum += std::cos(w * t) * ((k % 2) ? 4.0 : 2.0);
    }
    return 6.283185307179586 * sum * h / 3.0;
}

}  // namespace detail

inline double sphere_fourier_transform_signed(int d, double xi_magnitude,
                                              std::size_t quadrature_points = 64,
                                              double tol = 1e-8) {
    if (d != 2 && d != 3)
        throw std::invalid_argument("sphere_fourier_transform: d must be 2 or 3");
    if (!(xi_magnitude >= 0.0))
        throw std::invalid_argument("sphere_fourier_transform: |xi| must be >= 0");
    std::size_t n = std::max<std::size_t>(quadrature_points, 16);
    if (n % 2) ++n;
    double prev = (d == 2) ? detail::circle_quadrature(xi_magnitude, n)
                           : detail::band_quadrature(xi_magnitude, n);
    const std::size_t cap = 1u << 22;
    while (n <= cap) {
        n *= 2;
        double cur = (d == 2) ? detail::circle_quadrature(xi_magnitude, n)
                              : detail::band_quadrature(xi_magnitude, n);
        if (std::fabs(cur - prev) < tol) return cur;
        prev = cur;
    }
    throw std::runtime_error("sphere_fourier_transform: quadrature did not converge");
}

inline double sphere_fourier_transform(int d, double xi_magnitude,
                                       std::size_t quadrature_points = 64) {
    return std::fabs(sphere_fourier_transform_signed(d, xi_magnitude, quadrature_points));
}

// Stationary-phase decay check: the products |xi|^((d-1)/2) |sigma_hat| stay
// bounded, and so do the analogous products for the radial derivative
// (central differences at relative step 1e-4).
struct DecayResult {
    int d = 0;
    std::vector<double> xi_magnitudes;
    std::vector<double> sigma_hat_values;       // magnitudes
    std::vector<double> normalized_products;    // |xi|^((d-1)/2) * |sigma_hat|
    std::vector<double> derivative_products;    // |xi|^((d-1)/2) * |d sigma_hat / d|xi||
    double sup_product = 0.0;
    double sup_derivative_product = 0.0;
};

inline DecayResult check_decay(int d, const std::vector<double>& xi_grid) {
    if (xi_grid.empty()) throw std::invalid_argument("check_decay: empty grid");
    for (double xi : xi_grid)
        if (!(xi >= 1.0 && xi <= 1000.0))
            throw std::invalid_argument("check_decay: xi_grid must lie in [1, 1000]");

    DecayResult out;
    out.d = d;
    const double expo = (d - 1) / 2.0;
    for (double xi : xi_grid) {
        double v = sphere_fourier_transform_signed(d, xi);
        double h = 1e-4 * xi;
        double vp = sphere_fourier_transform_signed(d, xi + h);
        double vm = sphere_fourier_transform_signed(d, xi - h);
        double deriv = (vp - vm) / (2.0 * h);
        double pw = std::pow(xi, expo);
        out.xi_magnitudes.push_back(xi);
        out.sigma_hat_values.push_back(std::fabs(v));
        out.normalized_products.push_back(pw * std::fabs(v));
        out.derivative_products.push_back(pw * std::fabs(deriv));
        out.sup_product = std::max(out.sup_product, out.normalized_products.back());
        out.sup_derivative_product =
            std::max(out.sup_derivative_product, out.derivative_products.back());
    }
    return out;
}

}  // namespace incilab
