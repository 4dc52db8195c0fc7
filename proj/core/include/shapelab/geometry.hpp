#pragma once

// Integer lattice points, real direction vectors, and the half-space /
// cube / cylinder predicates shared by every other module.  All norms
// written ||.|| without qualification are l-infinity; directions are
// unit vectors in the Euclidean norm.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "shapelab/errors.hpp"

namespace shapelab {

inline constexpr int kMaxDim = 4;

inline constexpr double kDirectionTol = 1e-12;
inline constexpr double kOrthoTol = 1e-9;

struct LatticePoint {
    std::array<std::int32_t, kMaxDim> c{};
    std::int8_t dim{0};

    LatticePoint() = default;
    LatticePoint(std::initializer_list<std::int32_t> xs) {
        dim = static_cast<std::int8_t>(xs.size());
        int i = 0;
        for (auto v : xs) c[i++] = v;
    }
    static LatticePoint origin(int d) {
        LatticePoint p;
        p.dim = static_cast<std::int8_t>(d);
        return p;
    }

    std::int32_t operator[](int i) const { return c[i]; }
    std::int32_t& operator[](int i) { return c[i]; }

    std::int32_t norm_inf() const {
        std::int32_t m = 0;
        for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(c[i]));
        return m;
    }

    bool operator==(const LatticePoint& o) const {
        if (dim != o.dim) return false;
        for (int i = 0; i < dim; ++i)
            if (c[i] != o.c[i]) return false;
        return true;
    }
    bool operator!=(const LatticePoint& o) const { return !(*this == o); }

    LatticePoint operator+(const LatticePoint& o) const {
        LatticePoint r = *this;
        for (int i = 0; i < dim; ++i) r.c[i] += o.c[i];
        return r;
    }

    std::string to_string() const;
};

struct Vec {
    std::array<double, kMaxDim> v{};
    std::int8_t dim{0};

    Vec() = default;
    Vec(std::initializer_list<double> xs) {
        dim = static_cast<std::int8_t>(xs.size());
        int i = 0;
        for (auto x : xs) v[i++] = x;
    }
    static Vec zero(int d) {
        Vec z;
        z.dim = static_cast<std::int8_t>(d);
        return z;
    }
    static Vec from(const LatticePoint& p) {
        Vec z = zero(p.dim);
        for (int i = 0; i < p.dim; ++i) z.v[i] = p.c[i];
        return z;
    }

    double operator[](int i) const { return v[i]; }
    double& operator[](int i) { return v[i]; }

    double norm2() const {
        double s = 0;
        for (int i = 0; i < dim; ++i) s += v[i] * v[i];
        return std::sqrt(s);
    }
    double norm_inf() const {
        double m = 0;
        for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(v[i]));
        return m;
    }
    double norm1() const {
        double s = 0;
        for (int i = 0; i < dim; ++i) s += std::abs(v[i]);
        return s;
    }

    Vec operator-(const Vec& o) const {
        Vec r = *this;
        for (int i = 0; i < dim; ++i) r.v[i] -= o.v[i];
        return r;
    }
    Vec operator+(const Vec& o) const {
        Vec r = *this;
        for (int i = 0; i < dim; ++i) r.v[i] += o.v[i];
        return r;
    }
    Vec operator*(double a) const {
        Vec r = *this;
        for (int i = 0; i < dim; ++i) r.v[i] *= a;
        return r;
    }
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (int i = 0; i < a.dim; ++i) s += a.v[i] * b.v[i];
    return s;
}
inline double dot(const LatticePoint& a, const Vec& b) {
    double s = 0;
    for (int i = 0; i < a.dim; ++i) s += a.c[i] * b.v[i];
    return s;
}

/// Unit vector in S^{d-1}; normalized on construction.
struct Direction {
    Vec u;

    Direction() = default;
    explicit Direction(Vec raw) {
        double n = raw.norm2();
        if (!(n > 0)) throw ConfigError("Direction: zero vector");
        u = raw * (1.0 / n);
    }
    Direction(std::initializer_list<double> xs) : Direction(Vec(xs)) {}

    int dim() const { return u.dim; }
    double operator[](int i) const { return u.v[i]; }
    Direction negated() const {
        Direction r = *this;
        for (int i = 0; i < r.u.dim; ++i) r.u.v[i] = -r.u.v[i];
        return r;
    }
    bool unit_within_tol() const { return std::abs(u.norm2() - 1.0) <= kDirectionTol; }
};

/// S(u,c) = {x : <x,u> >= c}, closed.
struct HalfSpace {
    Direction u;
    double c{0};

    bool contains(const Vec& x) const { return dot(x, u.u) >= c; }
    bool contains(const LatticePoint& x) const { return dot(x, u.u) >= c; }
};

/// C(r) = [-r,r]^d.
struct Cube {
    double r{0};

    bool contains(const LatticePoint& x) const { return x.norm_inf() <= r; }
    bool contains(const Vec& x) const { return x.norm_inf() <= r; }
};

/// Gamma(alpha,beta,gamma,u) = {x : <x,u> >= alpha, ||xperp - gamma|| <= beta}.
/// gamma must be orthogonal to u (within kOrthoTol).
struct Cylinder {
    double alpha{0};
    double beta{0};
    Vec gamma;
    Direction u;

    Cylinder(double a, double b, Vec g, Direction dir)
        : alpha(a), beta(b), gamma(g), u(dir) {
        if (std::abs(dot(gamma, u.u)) > kOrthoTol)
            throw ConfigError("Cylinder: gamma not orthogonal to axis");
    }
};

/// vperp = v - <v,u> u.
Vec perp_component(const Vec& v, const Direction& u);

/// Strict lexicographic order on lattice points; throws DimensionMismatch.
bool lex_less(const LatticePoint& x, const LatticePoint& y);

/// All sites with ||x||_inf = k, in lex order.  shell_sites(0,d) = [origin].
std::vector<LatticePoint> shell_sites(int k, int d);

bool in_cylinder(const LatticePoint& x, const Cylinder& g);

/// Parse "0.6,0.8"-style text into a normalized Direction.
Direction parse_direction(const std::string& text);

inline LatticePoint unit_step(int dir_index, int d) {
    // index order pinned as (-e1,+e1,...,-ed,+ed)
    LatticePoint s = LatticePoint::origin(d);
    s.c[dir_index / 2] = (dir_index % 2 == 0) ? -1 : 1;
    return s;
}

}  // namespace shapelab
