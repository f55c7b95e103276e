#ifndef CREASE_VEC2_HPP
#define CREASE_VEC2_HPP

#include <cmath>

namespace crease {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::sqrt(v.x * v.x + v.y * v.y); }

/// Symmetric 2x2 matrix; the off-diagonal entry is stored once.
struct SymMat2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

inline Vec2 mul(const SymMat2& m, Vec2 v) {
    return {m.xx * v.x + m.xy * v.y, m.xy * v.x + m.yy * v.y};
}

} // namespace crease

#endif
