#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "incilab/vec.hpp"

namespace incilab {

// Radius function r(x) on [0,1]^d with certified range and gradient-norm bounds.
struct RadiusField {
    std::function<double(std::span<const double>)> value;
    std::function<Vec(std::span<const double>)> gradient;
    double inf_grad_norm = 0.0;
    double sup_grad_norm = 0.0;
    double min_value = 0.0;  // a
    double max_value = 0.0;  // b
    std::string spec_string;
};

inline RadiusField constant_radius(double r0) {
    if (!(r0 > 0.0)) throw std::invalid_argument("constant_radius: r0 must be positive");
    RadiusField f;
    f.value = [r0](std::span<const double>) { return r0; };
    f.gradient = [](std::span<const double> x) { return Vec(static_cast<int>(x.size())); };
    f.inf_grad_norm = f.sup_grad_norm = 0.0;
    f.min_value = f.max_value = r0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "constant %.17g", r0);
    f.spec_string = buf;
    return f;
}

// r(x) = r0 + slope . x
inline RadiusField affine_radius(double r0, const Vec& slope) {
    RadiusField f;
    double lo = r0, hi = r0;
    for (int i = 0; i < slope.dim(); ++i) {
        lo += std::min(slope[i], 0.0);
        hi += std::max(slope[i], 0.0);
    }
    if (!(lo > 0.0))
        throw std::invalid_argument("affine_radius: radius must stay positive on [0,1]^d");
    Vec g = slope;
    f.value = [r0, g](std::span<const double> x) { return r0 + dot(g, x); };
    f.gradient = [g](std::span<const double>) { return g; };
    f.inf_grad_norm = f.sup_grad_norm = norm(g);
    f.min_value = lo;
    f.max_value = hi;
    std::string s = "affine";
    char buf[64];
    std::snprintf(buf, sizeof(buf), " %.17g", r0);
    s += buf;
    for (int i = 0; i < slope.dim(); ++i) {
        std::snprintf(buf, sizeof(buf), " %.17g", slope[i]);
        s += buf;
    }
    f.spec_string = s;
    return f;
}

// Convex body given by its Minkowski gauge; v1 ships ellipsoids, which have
// closed-form gauge, gradient, Hessian and distance, and nonvanishing Gaussian
// curvature by construction.
struct ConvexBodySpec {
    std::vector<double> semiaxes;
    double m = 0.0;  // min |u| over the surface = min semiaxis
    double M = 0.0;  // max |u| over the surface = max semiaxis

    explicit ConvexBodySpec(std::vector<double> axes) : semiaxes(std::move(axes)) {
        if (semiaxes.size() < 2) throw std::invalid_argument("ConvexBodySpec: need dim >= 2");
        if (semiaxes.size() > kMaxDim)
            throw std::invalid_argument("ConvexBodySpec: dim exceeds supported maximum");
        m = semiaxes[0];
        M = semiaxes[0];
        for (double s : semiaxes) {
            if (!(s > 0.0)) throw std::invalid_argument("ConvexBodySpec: semiaxes must be > 0");
            m = std::min(m, s);
            M = std::max(M, s);
        }
    }

    static ConvexBodySpec unit_ball(int d) {
        return ConvexBodySpec(std::vector<double>(static_cast<std::size_t>(d), 1.0));
    }

    int dim() const { return static_cast<int>(semiaxes.size()); }
    bool is_ball() const { return m == M; }

    // phi_K(u) = sqrt(sum (u_i/s_i)^2); homogeneous of degree 1, equal to 1 on the surface.
    double gauge(std::span<const double> u) const {
        double q = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            double t = u[i] / semiaxes[i];
            q += t * t;
        }
        return std::sqrt(q);
    }

    Vec gauge_grad(std::span<const double> u) const {
        double phi = gauge(u);
        if (!(phi > 0.0)) throw std::invalid_argument("gauge_grad: singular at the origin");
        Vec g(static_cast<int>(u.size()));
        for (int i = 0; i < g.dim(); ++i) {
            double s2 = semiaxes[static_cast<std::size_t>(i)] * semiaxes[static_cast<std::size_t>(i)];
            g[i] = u[static_cast<std::size_t>(i)] / (s2 * phi);
        }
        return g;
    }

    // Hess phi_K = D/phi - (Du)(Du)^T/phi^3 with D = diag(1/s_i^2); annihilates u.
    Mat gauge_hessian(std::span<const double> u) const {
        double phi = gauge(u);
        if (!(phi > 0.0)) throw std::invalid_argument("gauge_hessian: singular at the origin");
        int d = static_cast<int>(u.size());
        Vec du(d);
        for (int i = 0; i < d; ++i) {
            double s2 = semiaxes[static_cast<std::size_t>(i)] * semiaxes[static_cast<std::size_t>(i)];
            du[i] = u[static_cast<std::size_t>(i)] / s2;
        }
        Mat h(d);
        double phi3 = phi * phi * phi;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                double v = -du[r] * du[c] / phi3;
                if (r == c) {
                    double s2 =
                        semiaxes[static_cast<std::size_t>(r)] * semiaxes[static_cast<std::size_t>(r)];
                    v += 1.0 / (s2 * phi);
                }
                h.at(r, c) = v;
            }
        return h;
    }

    // Range of |grad phi_K| on the surface. |grad phi_K(u)| = 1/(|u| cos theta)
    // is the reciprocal of the support distance, so the window is [1/M, 1/m]
    // (it equals [m, M] exactly when m*M = 1, e.g. for the unit ball).
    std::pair<double, double> gauge_grad_window() const { return {1.0 / M, 1.0 / m}; }

    std::string spec_string() const {
        std::string s = "ellipsoid";
        char buf[64];
        for (double a : semiaxes) {
            std::snprintf(buf, sizeof(buf), " %.17g", a);
            s += buf;
        }
        return s;
    }
};

namespace detail {

// Euclidean distance from p to the ellipsoid sum z_i^2/e_i^2 = 1.
// KKT: the nearest point has z_i = e_i^2 p_i / (e_i^2 + lambda). For the
// components with p_i != 0 the multiplier solves the strictly decreasing
// F(lambda) = sum (e_i p_i)^2/(e_i^2+lambda)^2 = 1 on (-min e_i^2, inf).
// Components with p_i = 0 admit extra critical branches (lambda = -e_k^2 with
// the slack placed on axis k); the distance is the minimum over all feasible
// branches. Relative tolerance ~1e-12 documented.
inline double ellipsoid_distance(std::span<const double> p, std::span<const double> e) {
    const std::size_t d = p.size();
    std::vector<std::size_t> J;
    J.reserve(d);
    for (std::size_t i = 0; i < d; ++i)
        if (std::fabs(p[i]) > 1e-13 * e[i]) J.push_back(i);

    double best = std::numeric_limits<double>::infinity();

    if (!J.empty()) {
        double min_e2 = e[J[0]] * e[J[0]];
        double q2 = 0;
        for (std::size_t i : J) {
            min_e2 = std::min(min_e2, e[i] * e[i]);
            q2 += (e[i] * p[i]) * (e[i] * p[i]);
        }
        double q = std::sqrt(q2);

        auto F = [&](double lam) {
            double s = 0;
            for (std::size_t i : J) {
                double t = (e[i] * p[i]) / (e[i] * e[i] + lam);
                s += t * t;
            }
            return s;
        };
        auto dF = [&](double lam) {
            double s = 0;
            for (std::size_t i : J) {
                double den = e[i] * e[i] + lam;
                s += -2.0 * (e[i] * p[i]) * (e[i] * p[i]) / (den * den * den);
            }
            return s;
        };

        // F > 1 just above -min_e2, F(q - min_e2) <= 1: analytic bracket.
        double lo = -min_e2 * (1.0 - 1e-14);
        double hi = q - min_e2;
        if (hi <= lo) hi = lo + 1e-14 * (min_e2 + 1.0);
        double x = 0.0;
        if (x <= lo || x >= hi) x = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            double g = F(x) - 1.0;
            if (g > 0)
                lo = x;
            else
                hi = x;
            double step = dF(x);
            double xn = (step != 0.0) ? x - g / step : 0.5 * (lo + hi);
            if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
            if (std::fabs(xn - x) <= 1e-16 * (std::fabs(x) + min_e2)) {
                x = xn;
                break;
            }
            x = xn;
        }
        double dist2 = 0;
        for (std::size_t i : J) {
            double t = x * p[i] / (e[i] * e[i] + x);
            dist2 += t * t;
        }
        best = std::sqrt(dist2);
    }

    // Degenerate branches for zero components.
    for (std::size_t k = 0; k < d; ++k) {
        if (std::fabs(p[k]) > 1e-13 * e[k]) continue;
        double ek2 = e[k] * e[k];
        bool feasible = true;
        double S = 0, dist2 = 0;
        for (std::size_t i : J) {
            double den = e[i] * e[i] - ek2;
            if (std::fabs(den) < 1e-300) {
                feasible = false;
                break;
            }
            double zi = e[i] * e[i] * p[i] / den;
            S += zi * zi / (e[i] * e[i]);
            double t = p[i] - zi;
            dist2 += t * t;
        }
        if (!feasible || S > 1.0) continue;
        dist2 += ek2 * (1.0 - S);
        best = std::min(best, std::sqrt(dist2));
    }
    return best;
}

inline bool points_equal(std::span<const double> a, std::span<const double> b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

}  // namespace detail

struct ShellBounds {
    double lo = 0.0;
    double hi = 0.0;
};

// A family of hypersurfaces Gamma_x = {y : Phi(x,y) = 0} with analytic first
// derivatives and mixed second derivatives. mixed_hessian reports
// H(j, i) = d^2 Phi / dx_i dy_j (rows indexed by the y-derivative).
struct SurfaceFamily {
    using ScalarFn = std::function<double(std::span<const double>, std::span<const double>)>;
    using VecFn = std::function<Vec(std::span<const double>, std::span<const double>)>;
    using MatFn = std::function<Mat(std::span<const double>, std::span<const double>)>;
    using ShellFn = std::function<ShellBounds(std::span<const double>)>;

    int dim = 0;
    std::string kind;
    std::string spec_string;
    double bounding_radius = 0.0;  // Gamma_x lies in ball(x, bounding_radius); inf for hyperplanes
    double epsilon0 = 0.0;         // certified floor for the zero-set gradient norms (0 if none)

    ScalarFn phi;
    VecFn grad_x;
    VecFn grad_y;
    MatFn mixed_hessian;
    ScalarFn exact_distance;  // Euclidean distance from y to Gamma_x; may be null
    ShellFn shell_bounds;     // |y - x| range over Gamma_x; null for hyperplanes

    std::optional<RadiusField> radius;
    std::optional<ConvexBodySpec> body;

    bool has_exact_distance() const { return static_cast<bool>(exact_distance); }
    bool unbounded() const { return std::isinf(bounding_radius); }
};

// Spheres of varying radius: Phi(x,y) = |x-y|^2 - r(x)^2.
inline SurfaceFamily make_variable_radius_spheres(const RadiusField& r, int d) {
    if (d < 2 || d > kMaxDim) throw std::invalid_argument("make_variable_radius_spheres: bad dim");
    if (!(r.min_value > 0.0))
        throw std::invalid_argument("make_variable_radius_spheres: radius must be positive");

    SurfaceFamily F;
    F.dim = d;
    F.kind = "spheres";
    F.spec_string = "spheres; radius = " + r.spec_string;
    F.bounding_radius = r.max_value;
    F.radius = r;
    F.body = ConvexBodySpec::unit_ball(d);

    const double a = r.min_value, b = r.max_value;
    double floor_y = 2.0 * a, cap_y = 2.0 * b;
    double gap = 0.0;
    if (r.sup_grad_norm < 1.0)
        gap = 1.0 - r.sup_grad_norm;
    else if (r.inf_grad_norm > 1.0)
        gap = r.inf_grad_norm - 1.0;
    double floor_x = 2.0 * a * gap, cap_x = 2.0 * b * (1.0 + r.sup_grad_norm);
    F.epsilon0 = std::min(std::min(floor_y, 1.0 / cap_y),
                          floor_x > 0.0 ? std::min(floor_x, 1.0 / cap_x) : 0.0);
    F.epsilon0 *= 1.0 - 1e-12;  // sampled norms may sit an ulp below the infimum

    RadiusField rf = r;
    F.phi = [rf](std::span<const double> x, std::span<const double> y) {
        double rv = rf.value(x);
        return dist2(x, y) - rv * rv;
    };
    F.grad_x = [rf](std::span<const double> x, std::span<const double> y) {
        double rv = rf.value(x);
        Vec g = rf.gradient(x);
        Vec out(static_cast<int>(x.size()));
        for (int i = 0; i < out.dim(); ++i)
            out[i] = 2.0 * (x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]) -
                     2.0 * rv * g[i];
        return out;
    };
    F.grad_y = [](std::span<const double> x, std::span<const double> y) {
        Vec out(static_cast<int>(x.size()));
        for (int i = 0; i < out.dim(); ++i)
            out[i] = 2.0 * (y[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]);
        return out;
    };
    F.mixed_hessian = [d](std::span<const double>, std::span<const double>) {
        Mat h(d);
        for (int i = 0; i < d; ++i) h.at(i, i) = -2.0;
        return h;
    };
    F.exact_distance = [rf](std::span<const double> x, std::span<const double> y) {
        return std::fabs(dist(x, y) - rf.value(x));
    };
    F.shell_bounds = [rf](std::span<const double> x) {
        double rv = rf.value(x);
        return ShellBounds{rv, rv};
    };
    return F;
}

// Hyperplanes Phi(x,y) = x.y - 1; flat but Phong-Stein (determinant -1 on the zero set).
inline SurfaceFamily make_hyperplane_family(int d) {
    if (d < 2 || d > kMaxDim) throw std::invalid_argument("make_hyperplane_family: bad dim");
    SurfaceFamily F;
    F.dim = d;
    F.kind = "hyperplanes";
    F.spec_string = "hyperplanes";
    F.bounding_radius = std::numeric_limits<double>::infinity();
    F.epsilon0 = 0.2;  // valid for zero-set samples with |x| >= 0.25 (see sample_zero_set)

    F.phi = [](std::span<const double> x, std::span<const double> y) { return dot(x, y) - 1.0; };
    F.grad_x = [](std::span<const double>, std::span<const double> y) { return Vec::from(y); };
    F.grad_y = [](std::span<const double> x, std::span<const double>) { return Vec::from(x); };
    F.mixed_hessian = [d](std::span<const double>, std::span<const double>) {
        Mat h(d);
        for (int i = 0; i < d; ++i) h.at(i, i) = 1.0;
        return h;
    };
    F.exact_distance = [](std::span<const double> x, std::span<const double> y) {
        double nx = norm(x);
        if (nx == 0.0)
            throw std::invalid_argument("hyperplane exact_distance: x = 0 has no surface");
        return std::fabs(dot(x, y) - 1.0) / nx;
    };
    return F;
}

// Translated/dilated convex body: Phi(x,y) = 1 - phi_K((y-x)/r(x)), so
// Gamma_x = x + r(x) * (boundary of K).
inline SurfaceFamily make_dilated_body(const ConvexBodySpec& body, const RadiusField& r, int d) {
    if (d < 2 || d > kMaxDim) throw std::invalid_argument("make_dilated_body: bad dim");
    if (body.dim() != d) throw std::invalid_argument("make_dilated_body: body dim mismatch");
    if (!(r.min_value > 0.0))
        throw std::invalid_argument("make_dilated_body: radius must be positive");

    SurfaceFamily F;
    F.dim = d;
    F.kind = "dilated_ellipsoid";
    F.spec_string = "dilated_ellipsoid; body = " + body.spec_string() + "; radius = " + r.spec_string;
    F.bounding_radius = r.max_value * body.M;
    F.radius = r;
    F.body = body;

    const double a = r.min_value, b = r.max_value;
    auto [gmin, gmax] = body.gauge_grad_window();  // [1/M, 1/m]
    double floor_y = gmin / b, cap_y = gmax / a;
    double gap = 0.0;
    if (r.sup_grad_norm < gmin)
        gap = gmin - r.sup_grad_norm;
    else if (r.inf_grad_norm > gmax)
        gap = r.inf_grad_norm - gmax;
    double floor_x = gap / b, cap_x = (gmax + r.sup_grad_norm) / a;
    F.epsilon0 = std::min(std::min(floor_y, 1.0 / cap_y),
                          floor_x > 0.0 ? std::min(floor_x, 1.0 / cap_x) : 0.0);
    F.epsilon0 *= 1.0 - 1e-12;  // sampled norms may sit an ulp below the infimum

    ConvexBodySpec K = body;
    RadiusField rf = r;

    auto scaled_u = [K, rf](std::span<const double> x, std::span<const double> y, double& rv) {
        rv = rf.value(x);
        Vec u(static_cast<int>(x.size()));
        for (int i = 0; i < u.dim(); ++i)
            u[i] = (y[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]) / rv;
        return u;
    };

    F.phi = [K, scaled_u](std::span<const double> x, std::span<const double> y) {
        double rv;
        Vec u = scaled_u(x, y, rv);
        return 1.0 - K.gauge(u.span());
    };
    F.grad_y = [K, scaled_u](std::span<const double> x, std::span<const double> y) {
        if (detail::points_equal(x, y))
            throw std::invalid_argument("dilated body: gradient rejected at y = x");
        double rv;
        Vec u = scaled_u(x, y, rv);
        Vec g = K.gauge_grad(u.span());
        return g * (-1.0 / rv);
    };
    F.grad_x = [K, rf, scaled_u](std::span<const double> x, std::span<const double> y) {
        if (detail::points_equal(x, y))
            throw std::invalid_argument("dilated body: gradient rejected at y = x");
        double rv;
        Vec u = scaled_u(x, y, rv);
        Vec g = K.gauge_grad(u.span());
        double phi_u = K.gauge(u.span());
        Vec rg = rf.gradient(x);
        Vec out(g.dim());
        for (int i = 0; i < out.dim(); ++i) out[i] = (g[i] + phi_u * rg[i]) / rv;
        return out;
    };
    F.mixed_hessian = [K, rf, scaled_u](std::span<const double> x, std::span<const double> y) {
        if (detail::points_equal(x, y))
            throw std::invalid_argument("dilated body: hessian rejected at y = x");
        double rv;
        Vec u = scaled_u(x, y, rv);
        Vec g = K.gauge_grad(u.span());
        Mat hphi = K.gauge_hessian(u.span());
        Vec rg = rf.gradient(x);
        int d2 = g.dim();
        Mat h(d2);
        double inv_r2 = 1.0 / (rv * rv);
        for (int j = 0; j < d2; ++j)
            for (int i = 0; i < d2; ++i) h.at(j, i) = (hphi.at(j, i) + g[j] * rg[i]) * inv_r2;
        return h;
    };
    F.exact_distance = [K, rf](std::span<const double> x, std::span<const double> y) {
        double rv = rf.value(x);
        Vec p = sub(y, x);
        std::vector<double> e(K.semiaxes.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = rv * K.semiaxes[i];
        return detail::ellipsoid_distance(p.span(), e);
    };
    F.shell_bounds = [K, rf](std::span<const double> x) {
        double rv = rf.value(x);
        return ShellBounds{rv * K.m, rv * K.M};
    };
    return F;
}

}  // namespace incilab
