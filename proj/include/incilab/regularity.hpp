#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "incilab/families.hpp"
#include "incilab/rng.hpp"
#include "incilab/vec.hpp"

namespace incilab {

// A point on the zero set together with the sampler parameters that produced
// it (ray direction, or the pre-projection point for hyperplanes). Keeping the
// parameters lets the verifier walk the zero set continuously.
struct ZeroSetSample {
    Vec x;
    Vec y;
    Vec param;
};

struct ZeroSetResult {
    std::vector<ZeroSetSample> samples;
    std::size_t attempts = 0;
    std::size_t failures = 0;  // rays with no bracketed sign change
};

namespace detail {

// Root of phi(x, x + t*u) for t in (0, t_hi] by bisection; the shipped bounded
// families are monotone enough along rays that 90 halvings pin the root to
// machine precision.
inline std::optional<Vec> root_on_ray(const SurfaceFamily& F, const Vec& x, const Vec& u) {
    double t_hi = F.bounding_radius * 1.5 + 0.25;
    Vec y(x.dim());
    auto eval = [&](double t) {
        for (int i = 0; i < x.dim(); ++i) y[i] = x[i] + t * u[i];
        return F.phi(x.span(), y.span());
    };
    double f_lo = eval(0.0);
    double f_hi = eval(t_hi);
    if (f_lo == 0.0) return std::nullopt;  // x itself on the surface: no bracket direction
    if ((f_lo > 0) == (f_hi > 0)) return std::nullopt;
    double lo = 0.0, hi = t_hi;
    for (int it = 0; it < 90; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = eval(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((fm > 0) == (f_lo > 0))
            lo = mid;
        else
            hi = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int i = 0; i < x.dim(); ++i) y[i] = x[i] + t * u[i];
    if (std::fabs(F.phi(x.span(), y.span())) > 1e-12) return std::nullopt;
    return y;
}

inline std::optional<Vec> project_on_hyperplane(const Vec& x, const Vec& z) {
    double n2 = norm2(x.span());
    if (n2 < 1e-12) return std::nullopt;
    Vec y = z;
    for (int pass = 0; pass < 2; ++pass) {
        double defect = (1.0 - dot(x, y)) / n2;
        for (int i = 0; i < y.dim(); ++i) y[i] += defect * x[i];
    }
    if (std::fabs(dot(x, y) - 1.0) > 1e-12) return std::nullopt;
    return y;
}

// Re-solve a sample from its parameters (used by the refinement walk).
inline std::optional<Vec> solve_sample(const SurfaceFamily& F, const Vec& x, const Vec& param) {
    if (F.unbounded()) return project_on_hyperplane(x, param);
    return root_on_ray(F, x, param);
}

}  // namespace detail

// x uniform in [0,1]^d; y found by bisection along a random ray from x
// (bounded families) or by projecting a random point onto {y : x.y = 1}
// (hyperplanes, with |x| >= 0.25 so the projection stays well conditioned).
// Deterministic in seed; rays without a bracket are skipped and counted.
inline ZeroSetResult sample_zero_set(const SurfaceFamily& F, std::size_t count,
                                     std::uint64_t seed) {
    Rng rng(seed);
    ZeroSetResult out;
    const int d = F.dim;
    std::size_t guard = 0;
    while (out.samples.size() < count && guard < 20 * count + 1000) {
        ++guard;
        ++out.attempts;
        Vec x = rng.point_in_unit_cube(d);
        if (F.unbounded()) {
            if (norm(x) < 0.25) {
                --out.attempts;
                continue;
            }
            Vec z = rng.point_in_unit_cube(d);
            auto y = detail::project_on_hyperplane(x, z);
            if (y)
                out.samples.push_back({x, *y, z});
            else
                ++out.failures;
        } else {
            Vec u = rng.unit_vector(d);
            auto y = detail::root_on_ray(F, x, u);
            if (y)
                out.samples.push_back({x, *y, u});
            else
                ++out.failures;
        }
    }
    return out;
}

// Bordered (d+1)x(d+1) matrix of first and mixed second derivatives:
// [ 0        dPhi/dx_i ]
// [ dPhi/dy_j  d^2 Phi/dx_i dy_j ]
inline Mat monge_ampere_matrix(const SurfaceFamily& F, std::span<const double> x,
                               std::span<const double> y) {
    int d = F.dim;
    Vec gx = F.grad_x(x, y);
    Vec gy = F.grad_y(x, y);
    Mat h = F.mixed_hessian(x, y);
    Mat m(d + 1);
    m.at(0, 0) = 0.0;
    for (int i = 0; i < d; ++i) m.at(0, i + 1) = gx[i];
    for (int j = 0; j < d; ++j) {
        m.at(j + 1, 0) = gy[j];
        for (int i = 0; i < d; ++i) m.at(j + 1, i + 1) = h.at(j, i);
    }
    return m;
}

inline double monge_ampere_det(const SurfaceFamily& F, std::span<const double> x,
                               std::span<const double> y) {
    return determinant(monge_ampere_matrix(F, x, y));
}

// Closed form for sphere families: det = (-1)^d 2^(d+1) D_d with
// D_d = -|x-y|^2 + r(x) (x-y).grad r(x); valid on and off the zero set.
inline double sphere_ma_closed_form(const SurfaceFamily& F, std::span<const double> x,
                                    std::span<const double> y) {
    if (F.kind != "spheres" || !F.radius)
        throw std::invalid_argument("sphere_ma_closed_form: not a sphere family");
    const RadiusField& r = *F.radius;
    Vec diff = sub(x, y);
    double dd = -norm2(diff.span()) + r.value(x) * dot(diff, r.gradient(x));
    double sign = (F.dim % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(2.0, F.dim + 1) * dd;
}

struct MaDetResult {
    double numeric = 0.0;
    std::optional<double> closed_form;
};

// Numeric bordered determinant; for sphere families also the closed form, with
// agreement enforced at 1e-8 relative (absolute below unit scale).
inline MaDetResult monge_ampere_det_full(const SurfaceFamily& F, std::span<const double> x,
                                         std::span<const double> y) {
    MaDetResult r;
    r.numeric = monge_ampere_det(F, x, y);
    if (F.kind == "spheres") {
        r.closed_form = sphere_ma_closed_form(F, x, y);
        double tol = 1e-8 * std::max(1.0, std::fabs(*r.closed_form));
        if (std::fabs(r.numeric - *r.closed_form) > tol)
            throw std::runtime_error("monge_ampere_det: numeric and closed form disagree");
    }
    return r;
}

struct PhongSteinResult {
    bool passed = false;
    double min_abs_det = 0.0;
    ZeroSetSample witness;
    std::size_t evaluations = 0;
};

namespace detail {

inline bool lex_less(const ZeroSetSample& a, const ZeroSetSample& b) {
    for (int i = 0; i < a.x.dim(); ++i) {
        if (a.x[i] != b.x[i]) return a.x[i] < b.x[i];
    }
    for (int i = 0; i < a.y.dim(); ++i) {
        if (a.y[i] != b.y[i]) return a.y[i] < b.y[i];
    }
    return false;
}

inline Vec lerp_normalized(const Vec& a, const Vec& b, double t) {
    Vec v(a.dim());
    for (int i = 0; i < a.dim(); ++i) v[i] = (1.0 - t) * a[i] + t * b[i];
    double n = norm(v);
    if (n < 1e-12) return a;
    return v * (1.0 / n);
}

}  // namespace detail

// Minimum |det M(Phi)| over the zero set. The sampled minimum is refined
// deterministically: a sign change between samples is driven to a vanishing
// witness by bisection along the sampler's parameter path, otherwise a compass
// descent walks downhill from the best sample. Refinement only adds evaluated
// zero-set points, so it can never turn a failing family into a passing one.
inline PhongSteinResult verify_phong_stein(const SurfaceFamily& F, const ZeroSetResult& samples,
                                           double threshold = 1e-6) {
    if (samples.samples.empty())
        throw std::invalid_argument("verify_phong_stein: empty sample list");

    PhongSteinResult res;
    res.min_abs_det = std::numeric_limits<double>::infinity();
    const ZeroSetSample* best_pos = nullptr;
    const ZeroSetSample* best_neg = nullptr;
    double best_pos_det = std::numeric_limits<double>::infinity();
    double best_neg_det = std::numeric_limits<double>::infinity();

    for (const auto& s : samples.samples) {
        double det = monge_ampere_det(F, s.x.span(), s.y.span());
        ++res.evaluations;
        double ad = std::fabs(det);
        if (ad < res.min_abs_det ||
            (ad == res.min_abs_det && detail::lex_less(s, res.witness))) {
            res.min_abs_det = ad;
            res.witness = s;
        }
        if (det >= 0 && ad < best_pos_det) {
            best_pos_det = ad;
            best_pos = &s;
        }
        if (det < 0 && ad < best_neg_det) {
            best_neg_det = ad;
            best_neg = &s;
        }
    }

    auto eval_at = [&](const Vec& x, const Vec& param,
                       ZeroSetSample& out) -> std::optional<double> {
        auto y = detail::solve_sample(F, x, param);
        if (!y) return std::nullopt;
        out = {x, *y, param};
        ++res.evaluations;
        return monge_ampere_det(F, x.span(), y->span());
    };

    if (best_pos && best_neg) {
        // Sign change: bisect along the connecting parameter path.
        Vec xa = best_pos->x, pa = best_pos->param;
        Vec xb = best_neg->x, pb = best_neg->param;
        double fa = best_pos_det;
        bool ok = true;
        for (int it = 0; it < 120 && ok; ++it) {
            Vec xm(xa.dim()), pm(pa.dim());
            for (int i = 0; i < xa.dim(); ++i) xm[i] = 0.5 * (xa[i] + xb[i]);
            if (F.unbounded()) {
                for (int i = 0; i < pa.dim(); ++i) pm[i] = 0.5 * (pa[i] + pb[i]);
            } else {
                pm = detail::lerp_normalized(pa, pb, 0.5);
            }
            ZeroSetSample sm;
            auto det = eval_at(xm, pm, sm);
            if (!det) {
                ok = false;
                break;
            }
            double ad = std::fabs(*det);
            if (ad < res.min_abs_det) {
                res.min_abs_det = ad;
                res.witness = sm;
            }
            if ((*det >= 0) == (fa >= 0)) {
                xa = xm;
                pa = pm;
                fa = *det;
            } else {
                xb = xm;
                pb = pm;
            }
        }
    } else {
        // One-signed: compass descent over (x, param) from the best sample.
        Vec x = res.witness.x;
        Vec param = res.witness.param;
        double cur = res.min_abs_det;
        double step = 0.05;
        const int d = x.dim();
        while (step > 1e-9) {
            bool improved = false;
            for (int axis = 0; axis < 2 * d && !improved; ++axis) {
                for (double s : {step, -step}) {
                    Vec xt = x, pt = param;
                    if (axis < d)
                        xt[axis] = std::clamp(xt[axis] + s, 0.0, 1.0);
                    else {
                        pt[axis - d] += s;
                        if (!F.unbounded()) {
                            double n = norm(pt);
                            if (n < 1e-12) continue;
                            pt = pt * (1.0 / n);
                        }
                    }
                    ZeroSetSample st;
                    auto det = eval_at(xt, pt, st);
                    if (!det) continue;
                    double ad = std::fabs(*det);
                    if (ad < cur) {
                        cur = ad;
                        x = xt;
                        param = pt;
                        res.witness = st;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        res.min_abs_det = std::min(res.min_abs_det, cur);
    }

    res.passed = res.min_abs_det >= threshold;
    return res;
}

enum class Regime { PhongStein, ExpansiveDilate, ContractiveDilate, Indeterminate, Fail };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::PhongStein: return "PhongStein";
        case Regime::ExpansiveDilate: return "ExpansiveDilate";
        case Regime::ContractiveDilate: return "ContractiveDilate";
        case Regime::Indeterminate: return "Indeterminate";
        case Regime::Fail: return "Fail";
    }
    return "?";
}

// Dilate-regime test on certified gradient bounds: contractive if
// sup|grad r| < m, expansive if inf|grad r| > M, otherwise indeterminate.
inline Regime classify_radius_regime(const RadiusField& r, const ConvexBodySpec& body) {
    if (r.sup_grad_norm < body.m) return Regime::ContractiveDilate;
    if (r.inf_grad_norm > body.M) return Regime::ExpansiveDilate;
    return Regime::Indeterminate;
}

struct ExponentPrediction {
    std::optional<std::pair<Rational, Rational>> s_range;  // open interval (lo, hi)
    Rational incidence_exponent;
    bool trivial = false;  // d = 2 dilate fallback 2 - 1/d
};

// Exponent table keyed by regime. A contractive dilate of a ball is a
// varying-radius sphere family, which upgrades to the Phong-Stein numbers.
inline ExponentPrediction predicted_exponent(Regime regime, int d, bool sphere_body = false) {
    if (d < 2) throw std::invalid_argument("predicted_exponent: d must be >= 2");
    if (regime == Regime::Fail || regime == Regime::Indeterminate)
        throw std::invalid_argument("predicted_exponent: no exponent for this regime");

    ExponentPrediction p;
    bool phong_stein =
        regime == Regime::PhongStein || (regime == Regime::ContractiveDilate && sphere_body);
    if (phong_stein) {
        p.s_range = std::make_pair(Rational(d + 1, 2), Rational(d, 1));
        p.incidence_exponent = Rational(2 * d, d + 1);
        return p;
    }
    if (d == 2) {
        // The admissible s-range ((d+2)/2, d) is empty: only the trivial
        // dimensionality bound 2 - 1/d remains.
        p.s_range = std::nullopt;
        p.incidence_exponent = Rational(2 * d - 1, d);
        p.trivial = true;
        return p;
    }
    p.s_range = std::make_pair(Rational(d + 2, 2), Rational(d, 1));
    p.incidence_exponent = Rational(2 * d + 2, d + 2);
    return p;
}

struct RegularityReport {
    double min_grad_x = 0.0;
    double min_grad_y = 0.0;
    double min_abs_ma_det = 0.0;
    ZeroSetSample det_witness;
    Regime regime = Regime::Indeterminate;
    std::optional<Rational> gamma;
    std::size_t sample_count = 0;
    double epsilon0_used = 0.0;
    std::optional<ZeroSetSample> fail_witness;
};

// Full pipeline: sample the zero set, check the gradient floors, run the
// Phong-Stein determinant check, and fall back to the dilate classification
// when the determinant vanishes somewhere.
inline RegularityReport analyze_family(const SurfaceFamily& F, std::size_t sample_count,
                                       std::uint64_t seed, double threshold = 1e-6) {
    ZeroSetResult zs = sample_zero_set(F, sample_count, seed);
    if (zs.samples.empty()) throw std::runtime_error("analyze_family: no zero-set samples found");

    RegularityReport rep;
    rep.sample_count = zs.samples.size();
    rep.epsilon0_used = F.epsilon0;
    rep.min_grad_x = std::numeric_limits<double>::infinity();
    rep.min_grad_y = std::numeric_limits<double>::infinity();
    const ZeroSetSample* grad_witness = nullptr;
    for (const auto& s : zs.samples) {
        double gx = norm(F.grad_x(s.x.span(), s.y.span()));
        double gy = norm(F.grad_y(s.x.span(), s.y.span()));
        if (gx < rep.min_grad_x) {
            rep.min_grad_x = gx;
            if (gx < 1e-9) grad_witness = &s;
        }
        if (gy < rep.min_grad_y) {
            rep.min_grad_y = gy;
            if (gy < 1e-9) grad_witness = &s;
        }
    }
    if (grad_witness) {
        rep.regime = Regime::Fail;
        rep.fail_witness = *grad_witness;
        PhongSteinResult ps = verify_phong_stein(F, zs, threshold);
        rep.min_abs_ma_det = ps.min_abs_det;
        rep.det_witness = ps.witness;
        return rep;
    }

    PhongSteinResult ps = verify_phong_stein(F, zs, threshold);
    rep.min_abs_ma_det = ps.min_abs_det;
    rep.det_witness = ps.witness;

    if (ps.passed) {
        rep.regime = Regime::PhongStein;
        rep.gamma = Rational(F.dim - 1, 2);
        return rep;
    }
    if (F.radius && F.body) {
        Regime reg = classify_radius_regime(*F.radius, *F.body);
        rep.regime = reg;
        if (reg != Regime::Indeterminate) rep.gamma = Rational(F.dim - 2, 2);
        if (reg == Regime::Indeterminate) rep.fail_witness = std::nullopt;
        return rep;
    }
    rep.regime = Regime::Fail;
    rep.fail_witness = ps.witness;
    return rep;
}

inline std::string to_text(const RegularityReport& rep) {
    std::ostringstream os;
    auto put_vec = [&](const char* key, const Vec& v) {
        os << key << ":";
        char buf[32];
        for (int i = 0; i < v.dim(); ++i) {
            std::snprintf(buf, sizeof(buf), " %.17g", v[i]);
            os << buf;
        }
        os << "\n";
    };
    os << "regime: " << regime_name(rep.regime) << "\n";
    os << "gamma: " << (rep.gamma ? rep.gamma->str() : std::string("-")) << "\n";
    os << "sample_count: " << rep.sample_count << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", rep.epsilon0_used);
    os << "epsilon0: " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", rep.min_grad_x);
    os << "min_grad_x: " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", rep.min_grad_y);
    os << "min_grad_y: " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", rep.min_abs_ma_det);
    os << "min_abs_ma_det: " << buf << "\n";
    put_vec("det_witness_x", rep.det_witness.x);
    put_vec("det_witness_y", rep.det_witness.y);
    if (rep.fail_witness) {
        put_vec("fail_witness_x", rep.fail_witness->x);
        put_vec("fail_witness_y", rep.fail_witness->y);
    }
    return os.str();
}

}  // namespace incilab
