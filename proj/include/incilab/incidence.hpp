#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "incilab/families.hpp"
#include "incilab/parallel.hpp"
#include "incilab/point_set.hpp"
#include "incilab/vec.hpp"

namespace incilab {

enum class Engine { brute, grid };

enum class MembershipRule { exact_dist, proxy };

// Counted quantity: ordered pairs (a, b) with b in the closed delta-neighborhood
// of Gamma_a. delta = 0 means exact incidence, tested at tolerance 1e-12 (exact
// real arithmetic is not available in floating point; 1e-12 clears machine noise
// at unit scale and sits far below the distance gaps of the shipped generators).
inline constexpr double kExactIncidenceTol = 1e-12;

struct IncidenceQuery {
    const PointSet* A = nullptr;
    const PointSet* B = nullptr;  // nullptr: count A against itself
    const SurfaceFamily* family = nullptr;
    double delta = 0.0;
    MembershipRule membership = MembershipRule::exact_dist;
    int workers = 1;

    const PointSet& b_set() const { return B ? *B : *A; }
    bool self_query() const { return B == nullptr || B == A; }
};

inline IncidenceQuery make_query(const PointSet& A, const SurfaceFamily& F, double delta,
                                 const PointSet* B = nullptr, int workers = 1) {
    IncidenceQuery q;
    q.A = &A;
    q.B = B;
    q.family = &F;
    q.delta = delta;
    q.membership =
        F.has_exact_distance() ? MembershipRule::exact_dist : MembershipRule::proxy;
    q.workers = workers;
    return q;
}

struct IncidenceCount {
    std::uint64_t count = 0;
    Engine engine = Engine::brute;
    std::uint64_t candidate_pairs_examined = 0;
    std::uint64_t self_incidences = 0;
    std::uint64_t fallback_queries = 0;  // grid queries that reverted to a full scan
    MembershipRule membership_used = MembershipRule::exact_dist;
};

namespace detail {

inline void validate_query(const IncidenceQuery& q) {
    if (!q.A || !q.family) throw std::invalid_argument("incidence query: missing fields");
    if (!(q.delta >= 0.0)) throw std::invalid_argument("incidence query: delta must be >= 0");
    if (q.A->dim() != q.family->dim || q.b_set().dim() != q.family->dim)
        throw std::invalid_argument("incidence query: dimension mismatch");
    if (q.membership == MembershipRule::exact_dist && !q.family->has_exact_distance())
        throw std::invalid_argument("incidence query: family has no exact distance");
}

// Closed membership condition dist(b, Gamma_a) <= delta.
struct Membership {
    const SurfaceFamily* F;
    MembershipRule rule;
    double threshold;

    Membership(const IncidenceQuery& q)
        : F(q.family),
          rule(q.membership),
          threshold(q.delta == 0.0 ? kExactIncidenceTol : q.delta) {}

    bool operator()(std::span<const double> a, std::span<const double> b) const {
        if (rule == MembershipRule::exact_dist) return F->exact_distance(a, b) <= threshold;
        double p = F->phi(a, b);
        double g = norm(F->grad_y(a, b));
        if (g == 0.0) return false;
        return std::fabs(p) / g <= threshold;
    }
};

struct BucketGrid {
    int d = 0;
    int per_axis = 1;
    double cell = 1.0;
    std::vector<std::uint32_t> offsets;  // per_axis^d + 1
    std::vector<std::uint32_t> ids;

    int cell_index(double v) const {
        int k = static_cast<int>(v * per_axis);
        return std::clamp(k, 0, per_axis - 1);
    }
    std::size_t flat(const int* idx) const {
        std::size_t f = 0;
        for (int i = 0; i < d; ++i) f = f * static_cast<std::size_t>(per_axis) + static_cast<std::size_t>(idx[i]);
        return f;
    }
};

inline BucketGrid build_grid(const PointSet& B, double h_request) {
    BucketGrid g;
    g.d = B.dim();
    int per_axis = 1;
    if (h_request < 1.0) per_axis = std::max(1, static_cast<int>(std::floor(1.0 / h_request)));
    // keep the table comfortably in memory whatever delta was requested
    while (std::pow(static_cast<double>(per_axis), g.d) > 4e6 && per_axis > 1) per_axis /= 2;
    g.per_axis = per_axis;
    g.cell = 1.0 / per_axis;

    std::size_t ncells = 1;
    for (int i = 0; i < g.d; ++i) ncells *= static_cast<std::size_t>(per_axis);
    std::vector<std::uint32_t> counts(ncells + 1, 0);
    int idx[kMaxDim];
    for (std::size_t i = 0; i < B.size(); ++i) {
        auto p = B.point(i);
        for (int j = 0; j < g.d; ++j) idx[j] = g.cell_index(p[static_cast<std::size_t>(j)]);
        ++counts[g.flat(idx) + 1];
    }
    for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
    g.offsets = counts;
    g.ids.resize(B.size());
    std::vector<std::uint32_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
    for (std::size_t i = 0; i < B.size(); ++i) {
        auto p = B.point(i);
        for (int j = 0; j < g.d; ++j) idx[j] = g.cell_index(p[static_cast<std::size_t>(j)]);
        g.ids[cursor[g.flat(idx)]++] = static_cast<std::uint32_t>(i);
    }
    return g;
}

}  // namespace detail

// Reference engine: every ordered pair gets the membership predicate.
inline IncidenceCount count_brute(const IncidenceQuery& q) {
    detail::validate_query(q);
    const PointSet& A = *q.A;
    const PointSet& B = q.b_set();
    detail::Membership member(q);
    const bool self = q.self_query();

    std::vector<std::uint64_t> hits((A.size() + 255) / 256, 0);
    std::vector<std::uint64_t> diag(hits.size(), 0);
    detail::parallel_blocks(A.size(), q.workers, 256, [&](std::size_t lo, std::size_t hi) {
        std::uint64_t h = 0, dg = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            auto a = A.point(i);
            for (std::size_t j = 0; j < B.size(); ++j) {
                if (member(a, B.point(j))) {
                    ++h;
                    if (self && i == j) ++dg;
                }
            }
        }
        hits[lo / 256] = h;
        diag[lo / 256] = dg;
    });

    IncidenceCount out;
    out.engine = Engine::brute;
    out.membership_used = q.membership;
    for (auto v : hits) out.count += v;
    for (auto v : diag) out.self_incidences += v;
    out.candidate_pairs_examined = static_cast<std::uint64_t>(A.size()) * B.size();
    return out;
}

// Grid-accelerated engine; exact (same membership predicate, conservative cell
// cover). Cell size h = max(delta, N^(-1/d)); candidate cells are those whose
// center lies within the query's shell (or slab) dilated by delta + h*sqrt(d).
inline IncidenceCount count_grid(const IncidenceQuery& q) {
    detail::validate_query(q);
    const PointSet& A = *q.A;
    const PointSet& B = q.b_set();
    const SurfaceFamily& F = *q.family;
    const int d = F.dim;
    detail::Membership member(q);
    const bool self = q.self_query();

    double h_request = std::max(q.delta, std::pow(static_cast<double>(B.size()), -1.0 / d));
    detail::BucketGrid g = detail::build_grid(B, h_request);
    const double dilate = q.delta + g.cell * std::sqrt(static_cast<double>(d));

    const bool shell_mode = static_cast<bool>(F.shell_bounds);
    const bool slab_mode = !shell_mode && F.unbounded();
    if (!shell_mode && !slab_mode) {
        IncidenceCount out = count_brute(q);
        out.engine = Engine::grid;
        out.fallback_queries = A.size();
        return out;
    }
    if (slab_mode) {
        // reject degenerate query points here rather than inside a worker
        for (std::size_t i = 0; i < A.size(); ++i)
            if (norm2(A.point(i)) == 0.0)
                throw std::invalid_argument("count_grid: hyperplane query point at origin");
    }

    struct Partial {
        std::uint64_t hits = 0, diag = 0, cand = 0, fallback = 0;
    };
    std::vector<Partial> partials((A.size() + 127) / 128);

    detail::parallel_blocks(A.size(), q.workers, 128, [&](std::size_t lo, std::size_t hi) {
        Partial pt;
        std::vector<std::uint32_t> cells;
        int idx[kMaxDim], lo_idx[kMaxDim], hi_idx[kMaxDim];
        for (std::size_t i = lo; i < hi; ++i) {
            auto a = A.point(i);
            cells.clear();
            bool fallback = false;

            if (shell_mode) {
                ShellBounds sb = F.shell_bounds(a);
                double r_lo = std::max(0.0, sb.lo - dilate);
                double r_hi = sb.hi + dilate;
                for (int j = 0; j < d; ++j) {
                    lo_idx[j] = std::clamp(
                        static_cast<int>(std::floor((a[static_cast<std::size_t>(j)] - r_hi) / g.cell)), 0,
                        g.per_axis - 1);
                    hi_idx[j] = std::clamp(
                        static_cast<int>(std::floor((a[static_cast<std::size_t>(j)] + r_hi) / g.cell)), 0,
                        g.per_axis - 1);
                }
                for (int j = 0; j < d; ++j) idx[j] = lo_idx[j];
                for (;;) {
                    double c2 = 0;
                    for (int j = 0; j < d; ++j) {
                        double cc = (idx[j] + 0.5) * g.cell - a[static_cast<std::size_t>(j)];
                        c2 += cc * cc;
                    }
                    double cd = std::sqrt(c2);
                    if (cd >= r_lo && cd <= r_hi) {
                        cells.push_back(static_cast<std::uint32_t>(g.flat(idx)));
                        if (cells.size() > B.size()) {
                            fallback = true;
                            break;
                        }
                    }
                    int ax = d - 1;
                    while (ax >= 0 && ++idx[ax] > hi_idx[ax]) {
                        idx[ax] = lo_idx[ax];
                        --ax;
                    }
                    if (ax < 0) break;
                }
            } else {
                // slab |a.c - 1| <= |a| * (delta + h*sqrt(d)) solved per grid column
                double na = norm(a);
                double w = na * dilate;
                double ad = a[static_cast<std::size_t>(d - 1)];
                for (int j = 0; j + 1 < d; ++j) idx[j] = 0;
                for (;;) {
                    double partial = 0;
                    for (int j = 0; j + 1 < d; ++j)
                        partial += a[static_cast<std::size_t>(j)] * (idx[j] + 0.5) * g.cell;
                    int k_lo = 0, k_hi = -1;
                    if (std::fabs(ad) < 1e-15) {
                        if (std::fabs(partial - 1.0) <= w) {
                            k_lo = 0;
                            k_hi = g.per_axis - 1;
                        }
                    } else {
                        double t_lo = (1.0 - partial - w) / ad;
                        double t_hi = (1.0 - partial + w) / ad;
                        if (t_lo > t_hi) std::swap(t_lo, t_hi);
                        k_lo = std::max(0, static_cast<int>(std::ceil(t_lo / g.cell - 0.5)));
                        k_hi = std::min(g.per_axis - 1,
                                        static_cast<int>(std::floor(t_hi / g.cell - 0.5)));
                    }
                    for (int k = k_lo; k <= k_hi; ++k) {
                        idx[d - 1] = k;
                        cells.push_back(static_cast<std::uint32_t>(g.flat(idx)));
                        if (cells.size() > B.size()) {
                            fallback = true;
                            break;
                        }
                    }
                    if (fallback) break;
                    int ax = d - 2;
                    while (ax >= 0 && ++idx[ax] == g.per_axis) {
                        idx[ax] = 0;
                        --ax;
                    }
                    if (ax < 0) break;
                }
            }

            if (fallback) {
                ++pt.fallback;
                for (std::size_t j = 0; j < B.size(); ++j) {
                    ++pt.cand;
                    if (member(a, B.point(j))) {
                        ++pt.hits;
                        if (self && i == j) ++pt.diag;
                    }
                }
                continue;
            }
            for (std::uint32_t c : cells) {
                for (std::uint32_t o = g.offsets[c]; o < g.offsets[c + 1]; ++o) {
                    std::uint32_t j = g.ids[o];
                    ++pt.cand;
                    if (member(a, B.point(j))) {
                        ++pt.hits;
                        if (self && i == j) ++pt.diag;
                    }
                }
            }
        }
        partials[lo / 128] = pt;
    });

    IncidenceCount out;
    out.engine = Engine::grid;
    out.membership_used = q.membership;
    for (const auto& pt : partials) {
        out.count += pt.hits;
        out.self_incidences += pt.diag;
        out.candidate_pairs_examined += pt.cand;
        out.fallback_queries += pt.fallback;
    }
    return out;
}

// Pairs at exact distance r0: constant-radius spheres with delta = 0.
inline IncidenceCount unit_distance_count(const PointSet& A, double r0, int workers = 1) {
    if (!(r0 > 0.0)) throw std::invalid_argument("unit_distance_count: r0 must be > 0");
    SurfaceFamily F = make_variable_radius_spheres(constant_radius(r0), A.dim());
    IncidenceQuery q = make_query(A, F, 0.0, nullptr, workers);
    return count_brute(q);
}

}  // namespace incilab
