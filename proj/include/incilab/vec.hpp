#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace incilab {

// Dimensions are runtime values but small; everything is stack-allocated.
inline constexpr int kMaxDim = 8;

struct Vec {
    std::array<double, kMaxDim> c{};
    int d = 0;

    Vec() = default;
    explicit Vec(int dim) : d(dim) {
        if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("Vec: dim out of range");
    }
    Vec(std::initializer_list<double> vals) {
        if (vals.size() > kMaxDim) throw std::invalid_argument("Vec: too many components");
        d = static_cast<int>(vals.size());
        int i = 0;
        for (double v : vals) c[i++] = v;
    }
    static Vec from(std::span<const double> s) {
        Vec v(static_cast<int>(s.size()));
        for (int i = 0; i < v.d; ++i) v.c[i] = s[i];
        return v;
    }

    double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    int dim() const { return d; }
    std::span<const double> span() const { return {c.data(), static_cast<std::size_t>(d)}; }

    Vec operator+(const Vec& o) const {
        Vec r(d);
        for (int i = 0; i < d; ++i) r.c[i] = c[i] + o.c[i];
        return r;
    }
    Vec operator-(const Vec& o) const {
        Vec r(d);
        for (int i = 0; i < d; ++i) r.c[i] = c[i] - o.c[i];
        return r;
    }
    Vec operator*(double s) const {
        Vec r(d);
        for (int i = 0; i < d; ++i) r.c[i] = c[i] * s;
        return r;
    }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline double dot(const Vec& a, const Vec& b) { return dot(a.span(), b.span()); }
inline double dot(const Vec& a, std::span<const double> b) { return dot(a.span(), b); }

inline double norm2(std::span<const double> a) { return dot(a, a); }
inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }
inline double norm(const Vec& a) { return norm(a.span()); }

inline double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}
inline double dist(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(dist2(a, b));
}

inline Vec sub(std::span<const double> a, std::span<const double> b) {
    Vec r(static_cast<int>(a.size()));
    for (int i = 0; i < r.d; ++i) r[i] = a[i] - b[i];
    return r;
}

// Square matrix up to (kMaxDim+1)^2, used for the bordered derivative matrix.
struct Mat {
    static constexpr int kCap = kMaxDim + 1;
    // one spare slot: gcc 11's vectorized aggregate copy trips -Warray-bounds
    // on exactly-sized storage when a Mat is returned through std::function
    std::array<double, kCap * kCap + 1> a{};
    std::int64_t n = 0;

    Mat() = default;
    explicit Mat(int size) : n(size) {
        if (size < 0 || size > kCap) throw std::invalid_argument("Mat: size out of range");
    }
    double& at(int r, int c) { return a[static_cast<std::size_t>(r * kCap + c)]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r * kCap + c)]; }
};

// Determinant by LU with partial pivoting; n is tiny so stability is not a concern,
// but pivoting keeps the hyperplane family's zero diagonal from tripping it.
inline double determinant(const Mat& src) {
    constexpr int cap = Mat::kCap;
    const int n = static_cast<int>(src.n);
    double a[cap * cap];
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) a[r * cap + c] = src.at(r, c);

    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(a[k * cap + k]);
        for (int r = k + 1; r < n; ++r) {
            double v = std::fabs(a[r * cap + k]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (int c = k; c < n; ++c) std::swap(a[k * cap + c], a[piv * cap + c]);
            det = -det;
        }
        det *= a[k * cap + k];
        for (int r = k + 1; r < n; ++r) {
            double f = a[r * cap + k] / a[k * cap + k];
            for (int c = k + 1; c < n; ++c) a[r * cap + c] -= f * a[k * cap + c];
        }
    }
    return det;
}

// Kahan-compensated accumulator for long pairwise sums.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Exact rational exponents from the corollaries (4/3, 8/5, ...).
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) {
        if (d == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = gcd_ll(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }

private:
    static long long gcd_ll(long long a, long long b) {
        while (b) {
            long long t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }
};

}  // namespace incilab
