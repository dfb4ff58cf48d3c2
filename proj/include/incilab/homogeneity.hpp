#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "incilab/point_set.hpp"
#include "incilab/vec.hpp"

namespace incilab {

// Packing/covering constants: every cube of side c0*N^(-1/d) holds at most k0
// points, every cube of side C0*N^(-1/d) holds at least one.
struct HomogeneityParams {
    double C0 = 2.0;
    double c0 = 0.9;
    int k0 = 1;
};

struct CubeWitness {
    Vec corner;   // lower corner, cubes are half-open [corner, corner+side)^d
    double side = 0.0;
};

enum class ScanMethod { exact, conservative, automatic };

struct HomogeneityReport {
    bool passed = false;
    int max_small_cube_count = 0;
    CubeWitness max_witness;
    std::optional<CubeWitness> empty_large_cell;
    ScanMethod method_used = ScanMethod::exact;
    // Conservative packing scans only lattice-anchored cubes, so their maximum
    // is a lower bound on the true maximum.
    bool packing_is_lower_bound = false;
};

namespace detail {

// Exact max-count over half-open cubes [t, t+w)^d. A cube achieving the max can
// be translated so each lower face touches a point of the maximising subset
// (replace t_j by min over the subset of coordinate j: no point leaves), so it
// suffices to scan anchors whose coordinate along each axis is a point
// coordinate of a point inside the previous axes' window. Enumeration is in
// ascending lexicographic anchor order and ties keep the first (smallest)
// anchor, which makes the reported witness deterministic.
class ExactPackingScan {
public:
    ExactPackingScan(const PointSet& ps, double w) : ps_(ps), w_(w), d_(ps.dim()) {}

    std::pair<int, Vec> run() {
        best_ = 0;
        best_anchor_ = Vec(d_);
        std::vector<std::size_t> all(ps_.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        Vec anchor(d_);
        scan_axis(0, all, anchor);
        return {best_, best_anchor_};
    }

private:
    void scan_axis(int axis, std::vector<std::size_t>& ids, Vec& anchor) {
        auto coord = [&](std::size_t id) {
            return ps_.point(id)[static_cast<std::size_t>(axis)];
        };
        std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
            return coord(a) < coord(b);
        });
        std::size_t hi = 0;
        double prev_t = -1.0;
        for (std::size_t lo = 0; lo < ids.size(); ++lo) {
            double t = coord(ids[lo]);
            if (t == prev_t) continue;  // identical anchor, identical cube
            prev_t = t;
            if (hi < lo) hi = lo;
            while (hi < ids.size() && coord(ids[hi]) < t + w_) ++hi;
            anchor[axis] = t;
            if (axis + 1 == d_) {
                int count = static_cast<int>(hi - lo);
                if (count > best_) {
                    best_ = count;
                    best_anchor_ = anchor;
                }
            } else {
                if (static_cast<int>(hi - lo) > best_) {
                    std::vector<std::size_t> window(ids.begin() + static_cast<std::ptrdiff_t>(lo),
                                                    ids.begin() + static_cast<std::ptrdiff_t>(hi));
                    scan_axis(axis + 1, window, anchor);
                }
            }
        }
    }

    const PointSet& ps_;
    double w_;
    int d_;
    int best_ = 0;
    Vec best_anchor_;
};

// Flattened cell grid used by the conservative scan and the covering check.
struct CellGrid {
    int d = 0;
    int per_axis = 0;
    double cell = 0.0;
    std::vector<int> counts;

    std::size_t flat(const std::vector<int>& idx) const {
        std::size_t f = 0;
        for (int i = 0; i < d; ++i)
            f = f * static_cast<std::size_t>(per_axis) + static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
        return f;
    }
};

inline CellGrid bucket_points(const PointSet& ps, double cell, int per_axis) {
    CellGrid g;
    g.d = ps.dim();
    g.per_axis = per_axis;
    g.cell = cell;
    double total = std::pow(static_cast<double>(per_axis), g.d);
    if (total > 8e7) throw std::invalid_argument("homogeneity scan: cell grid too large");
    g.counts.assign(static_cast<std::size_t>(total), 0);
    std::vector<int> idx(static_cast<std::size_t>(g.d));
    for (std::size_t i = 0; i < ps.size(); ++i) {
        auto p = ps.point(i);
        bool in_range = true;
        for (int j = 0; j < g.d; ++j) {
            int k = static_cast<int>(std::floor(p[static_cast<std::size_t>(j)] / cell));
            if (k >= per_axis) {
                in_range = false;  // clipped boundary strip
                break;
            }
            idx[static_cast<std::size_t>(j)] = std::max(k, 0);
        }
        if (in_range) ++g.counts[g.flat(idx)];
    }
    return g;
}

}  // namespace detail

// Packing: exact anchored-cube enumeration, or a conservative scan over cubes
// anchored on a half-pitch lattice (a lower bound on the true maximum).
// Covering: partition [0,1]^d into cells of side (C0/2)*N^(-1/d) and require
// every cell that lies fully inside the domain to be nonempty. Any cube of
// side C0*N^(-1/d) contained in [0,1]^d contains such a cell, so this is
// sufficient; cells clipped by the boundary are exempt (no admissible cube
// needs them, and demanding them would wrongly reject boundary-hugging sets).
inline HomogeneityReport check_homogeneity(const PointSet& A, const HomogeneityParams& p,
                                           ScanMethod method = ScanMethod::automatic,
                                           std::size_t work_limit = 50000) {
    if (A.size() < 1) throw std::invalid_argument("check_homogeneity: empty point set");
    if (!(p.c0 > 0.0) || !(p.C0 > 0.0) || p.c0 >= p.C0)
        throw std::invalid_argument("check_homogeneity: need 0 < c0 < C0");
    if (p.k0 < 1) throw std::invalid_argument("check_homogeneity: k0 must be >= 1");

    const int d = A.dim();
    const double N = static_cast<double>(A.size());
    const double inv_scale = std::pow(N, -1.0 / d);
    const double w_pack = p.c0 * inv_scale;

    HomogeneityReport rep;

    std::size_t exact_work = A.size() * static_cast<std::size_t>(d);
    ScanMethod chosen = method;
    if (method == ScanMethod::automatic)
        chosen = exact_work <= work_limit ? ScanMethod::exact : ScanMethod::conservative;
    if (chosen == ScanMethod::exact && exact_work > work_limit)
        throw std::invalid_argument(
            "check_homogeneity: N*d exceeds the exact-scan work limit; use the conservative "
            "method (its maximum is a lower bound)");
    rep.method_used = chosen;

    if (chosen == ScanMethod::exact) {
        detail::ExactPackingScan scan(A, w_pack);
        auto [count, anchor] = scan.run();
        rep.max_small_cube_count = count;
        rep.max_witness = {anchor, w_pack};
        rep.packing_is_lower_bound = false;
    } else {
        // Cubes anchored at multiples of w/2 span exactly two cells per axis.
        const double pitch = w_pack / 2.0;
        int per_axis = static_cast<int>(std::ceil(1.0 / pitch)) + 1;
        detail::CellGrid g = detail::bucket_points(A, pitch, per_axis);
        int best = 0;
        Vec best_anchor(d);
        std::vector<int> idx(static_cast<std::size_t>(d), 0);
        std::vector<int> off(static_cast<std::size_t>(d), 0);
        for (;;) {
            int total = 0;
            // sum of the 2^d cells covered by the cube anchored at idx*pitch
            std::fill(off.begin(), off.end(), 0);
            for (;;) {
                std::vector<int> cellIdx(static_cast<std::size_t>(d));
                bool ok = true;
                for (int j = 0; j < d; ++j) {
                    cellIdx[static_cast<std::size_t>(j)] =
                        idx[static_cast<std::size_t>(j)] + off[static_cast<std::size_t>(j)];
                    if (cellIdx[static_cast<std::size_t>(j)] >= per_axis) ok = false;
                }
                if (ok) total += g.counts[g.flat(cellIdx)];
                int ax = d - 1;
                while (ax >= 0 && ++off[static_cast<std::size_t>(ax)] == 2) {
                    off[static_cast<std::size_t>(ax)] = 0;
                    --ax;
                }
                if (ax < 0) break;
            }
            if (total > best) {
                best = total;
                for (int j = 0; j < d; ++j)
                    best_anchor[j] = idx[static_cast<std::size_t>(j)] * pitch;
            }
            int ax = d - 1;
            while (ax >= 0 && ++idx[static_cast<std::size_t>(ax)] == per_axis) {
                idx[static_cast<std::size_t>(ax)] = 0;
                --ax;
            }
            if (ax < 0) break;
        }
        rep.max_small_cube_count = best;
        rep.max_witness = {best_anchor, w_pack};
        rep.packing_is_lower_bound = true;
    }

    // Covering check.
    const double w_cover = (p.C0 / 2.0) * inv_scale;
    int full_cells;
    {
        double f = 1.0 / w_cover;
        double r = std::round(f);
        full_cells = (std::fabs(f - r) < 1e-9) ? static_cast<int>(r)
                                               : static_cast<int>(std::floor(f));
    }
    if (full_cells >= 1) {
        detail::CellGrid g = detail::bucket_points(A, w_cover, full_cells);
        std::vector<int> idx(static_cast<std::size_t>(d), 0);
        for (;;) {
            if (g.counts[g.flat(idx)] == 0) {
                Vec corner(d);
                for (int j = 0; j < d; ++j) corner[j] = idx[static_cast<std::size_t>(j)] * w_cover;
                rep.empty_large_cell = CubeWitness{corner, w_cover};
                break;
            }
            int ax = d - 1;
            while (ax >= 0 && ++idx[static_cast<std::size_t>(ax)] == full_cells) {
                idx[static_cast<std::size_t>(ax)] = 0;
                --ax;
            }
            if (ax < 0) break;
        }
    }
    // full_cells == 0: the large cube exceeds the domain, no admissible cube to check.

    rep.passed = rep.max_small_cube_count <= p.k0 && !rep.empty_large_cell.has_value();
    return rep;
}

}  // namespace incilab
