#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "incilab/rng.hpp"
#include "incilab/vec.hpp"

namespace incilab {

// Where a point set came from; enough to regenerate it bit-for-bit.
struct Provenance {
    std::string generator;  // "grid", "jittered", "file", "manual"
    std::vector<std::pair<std::string, std::string>> params;

    void set(const std::string& key, const std::string& value) {
        for (auto& kv : params)
            if (kv.first == key) {
                kv.second = value;
                return;
            }
        params.emplace_back(key, value);
    }
};

// Finite point set in [0,1]^d, stored flat (N x d, row major).
class PointSet {
public:
    PointSet(int dim, std::vector<double> coords, Provenance prov = {})
        : dim_(dim), coords_(std::move(coords)), prov_(std::move(prov)) {
        if (dim_ < 2) throw std::invalid_argument("PointSet: dim must be >= 2");
        if (dim_ > kMaxDim) throw std::invalid_argument("PointSet: dim exceeds supported maximum");
        if (coords_.size() % static_cast<std::size_t>(dim_) != 0)
            throw std::invalid_argument("PointSet: coordinate count not a multiple of dim");
        for (double v : coords_)
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("PointSet: coordinate outside [0,1]");
    }

    int dim() const { return dim_; }
    std::size_t size() const { return coords_.size() / static_cast<std::size_t>(dim_); }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * static_cast<std::size_t>(dim_),
                static_cast<std::size_t>(dim_)};
    }
    const std::vector<double>& coords() const { return coords_; }
    const Provenance& provenance() const { return prov_; }

private:
    int dim_;
    std::vector<double> coords_;
    Provenance prov_;
};

// n^d cell centers ((i+1/2)/n, ...): the canonical homogeneous set.
inline PointSet generate_grid(int n, int d) {
    if (n < 1) throw std::invalid_argument("generate_grid: n must be >= 1");
    if (d < 2) throw std::invalid_argument("generate_grid: d must be >= 2");
    if (d > kMaxDim) throw std::invalid_argument("generate_grid: d exceeds supported maximum");
    double count = std::pow(static_cast<double>(n), d);
    if (count > 5e7) throw std::invalid_argument("generate_grid: n^d too large");

    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
    std::vector<double> coords;
    coords.reserve(total * static_cast<std::size_t>(d));

    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
        for (int i = 0; i < d; ++i)
            coords.push_back((static_cast<double>(idx[static_cast<std::size_t>(i)]) + 0.5) / n);
        int axis = d - 1;
        while (axis >= 0 && ++idx[static_cast<std::size_t>(axis)] == n) {
            idx[static_cast<std::size_t>(axis)] = 0;
            --axis;
        }
        if (axis < 0) break;
    }

    Provenance prov{"grid", {}};
    prov.set("n", std::to_string(n));
    prov.set("dim", std::to_string(d));
    return PointSet(d, std::move(coords), std::move(prov));
}

// Grid perturbed per coordinate by uniform noise in [-amplitude/n, amplitude/n].
// amplitude < 0.5 keeps distinct points separated by >= (1-2*amplitude)/n along
// some axis, so homogeneity constants never need per-N retuning.
inline PointSet generate_jittered(int n, int d, double amplitude, std::uint64_t seed) {
    if (!(amplitude >= 0.0))
        throw std::invalid_argument("generate_jittered: amplitude must be >= 0");
    if (amplitude >= 0.5)
        throw std::invalid_argument(
            "generate_jittered: amplitude must be < 0.5 (packing guarantee breaks down)");

    PointSet grid = generate_grid(n, d);
    std::vector<double> coords = grid.coords();
    Rng rng(seed);
    double half_width = amplitude / n;
    for (double& v : coords) {
        v += rng.uniform(-half_width, half_width);
        v = std::clamp(v, 0.0, 1.0);
    }

    Provenance prov{"jittered", {}};
    prov.set("n", std::to_string(n));
    prov.set("dim", std::to_string(d));
    {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", amplitude);
        prov.set("amplitude", buf);
    }
    prov.set("seed", std::to_string(seed));
    return PointSet(d, std::move(coords), std::move(prov));
}

// Text format: "# key=value" provenance lines, then "d N", then one point per
// line with 17 significant digits (doubles round-trip exactly).
inline void save_point_set(const PointSet& ps, std::ostream& out) {
    if (!ps.provenance().generator.empty())
        out << "# generator=" << ps.provenance().generator << "\n";
    for (const auto& kv : ps.provenance().params)
        out << "# " << kv.first << "=" << kv.second << "\n";
    out << ps.dim() << " " << ps.size() << "\n";
    char buf[32];
    for (std::size_t i = 0; i < ps.size(); ++i) {
        auto p = ps.point(i);
        for (int j = 0; j < ps.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", p[static_cast<std::size_t>(j)]);
            out << (j ? " " : "") << buf;
        }
        out << "\n";
    }
}

inline PointSet load_point_set(std::istream& in) {
    Provenance prov{"file", {}};
    std::string line;
    int d = 0;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            std::size_t start = body.find_first_not_of(" \t");
            if (start == std::string::npos) continue;
            body = body.substr(start);
            std::size_t eq = body.find('=');
            if (eq != std::string::npos) {
                std::string key = body.substr(0, eq);
                std::string value = body.substr(eq + 1);
                if (key == "generator")
                    prov.generator = value;
                else
                    prov.set(key, value);
            }
            continue;
        }
        std::istringstream hs(line);
        if (!(hs >> d >> n)) throw std::runtime_error("point set: bad header line");
        break;
    }
    if (d == 0) throw std::runtime_error("point set: missing header");
    std::vector<double> coords;
    coords.reserve(n * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("point set: truncated file");
        std::istringstream ls(line);
        double v;
        for (int j = 0; j < d; ++j) {
            if (!(ls >> v)) throw std::runtime_error("point set: bad point line");
            coords.push_back(v);
        }
    }
    return PointSet(d, std::move(coords), std::move(prov));
}

}  // namespace incilab
