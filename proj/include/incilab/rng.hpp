#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "incilab/vec.hpp"

namespace incilab {

// Deterministic RNG. mt19937_64 output is fully specified by the standard and we
// map to doubles by hand, so identical seeds give identical streams on every
// platform (std::uniform_real_distribution would not guarantee that).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t next_u64() { return gen_(); }

    // Box-Muller, single branch; two uniforms consumed per normal.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    Vec point_in_unit_cube(int d) {
        Vec p(d);
        for (int i = 0; i < d; ++i) p[i] = uniform01();
        return p;
    }

    Vec unit_vector(int d) {
        for (;;) {
            Vec v(d);
            for (int i = 0; i < d; ++i) v[i] = normal();
            double n = norm(v);
            if (n > 1e-12) return v * (1.0 / n);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace incilab
