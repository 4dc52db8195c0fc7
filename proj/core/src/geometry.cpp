#include "shapelab/geometry.hpp"

#include <cstdio>
#include <sstream>

namespace shapelab {

std::string LatticePoint::to_string() const {
    std::string s = "(";
    for (int i = 0; i < dim; ++i) {
        if (i) s += ",";
        s += std::to_string(c[i]);
    }
    s += ")";
    return s;
}

Vec perp_component(const Vec& v, const Direction& u) {
    double a = dot(v, u.u);
    Vec w = v;
    for (int i = 0; i < v.dim; ++i) w.v[i] -= a * u.u.v[i];
    return w;
}

bool lex_less(const LatticePoint& x, const LatticePoint& y) {
    if (x.dim != y.dim) throw DimensionMismatch("lex_less: dimension mismatch");
    for (int i = 0; i < x.dim; ++i) {
        if (x.c[i] != y.c[i]) return x.c[i] < y.c[i];
    }
    return false;
}

std::vector<LatticePoint> shell_sites(int k, int d) {
    std::vector<LatticePoint> out;
    if (k == 0) {
        out.push_back(LatticePoint::origin(d));
        return out;
    }
    // Walk the cube [-k,k]^d in lex order and keep the boundary.  The
    // boundary condition is cheap to test, and lex order falls out of
    // the loop structure for free.
    LatticePoint p = LatticePoint::origin(d);
    for (int i = 0; i < d; ++i) p.c[i] = -k;
    while (true) {
        if (p.norm_inf() == k) out.push_back(p);
        int i = d - 1;
        while (i >= 0 && p.c[i] == k) {
            p.c[i] = -k;
            --i;
        }
        if (i < 0) break;
        ++p.c[i];
    }
    return out;
}

bool in_cylinder(const LatticePoint& x, const Cylinder& g) {
    if (dot(x, g.u.u) < g.alpha) return false;
    Vec perp = perp_component(Vec::from(x), g.u);
    return (perp - g.gamma).norm_inf() <= g.beta;
}

Direction parse_direction(const std::string& text) {
    Vec raw;
    std::stringstream ss(text);
    std::string tok;
    int n = 0;
    while (std::getline(ss, tok, ',')) {
        if (n >= kMaxDim) throw ConfigError("direction: too many components");
        std::size_t used = 0;
        try {
            raw.v[n++] = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw ConfigError("direction: bad component '" + tok + "'");
        }
        if (used != tok.size())
            throw ConfigError("direction: bad component '" + tok + "'");
    }
    if (n == 0) throw ConfigError("direction: empty");
    raw.dim = static_cast<std::int8_t>(n);
    return Direction(raw);
}

}  // namespace shapelab
