#pragma once

#include <cmath>

namespace rainforge {

struct vec3 {
    double x = 0, y = 0, z = 0;

    constexpr vec3() = default;
    constexpr vec3(double x_, double y_, double z_) : x{x_}, y{y_}, z{z_} {}

    constexpr vec3 operator+(const vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr vec3 operator-(const vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr vec3 operator-() const { return {-x, -y, -z}; }
    constexpr vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr vec3& operator+=(const vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr bool operator==(const vec3&) const = default;
};

constexpr vec3 operator*(double s, const vec3& v) { return v * s; }
constexpr double dot(const vec3& a, const vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr vec3 cross(const vec3& a, const vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(const vec3& v) { return std::sqrt(dot(v, v)); }
inline vec3 normalize(const vec3& v) { return v / length(v); }
inline bool isfinite(const vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Row-major 3x3 matrix.
struct mat3 {
    vec3 rows[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    constexpr vec3 operator*(const vec3& v) const {
        return {dot(rows[0], v), dot(rows[1], v), dot(rows[2], v)};
    }
    constexpr mat3 transposed() const {
        return {{{rows[0].x, rows[1].x, rows[2].x},
                 {rows[0].y, rows[1].y, rows[2].y},
                 {rows[0].z, rows[1].z, rows[2].z}}};
    }
    constexpr vec3 column(int i) const {
        return i == 0 ? vec3{rows[0].x, rows[1].x, rows[2].x}
             : i == 1 ? vec3{rows[0].y, rows[1].y, rows[2].y}
                      : vec3{rows[0].z, rows[1].z, rows[2].z};
    }
};

inline mat3 operator*(const mat3& a, const mat3& b) {
    const mat3 bt = b.transposed();
    mat3 r;
    for (int i = 0; i < 3; ++i)
        r.rows[i] = {dot(a.rows[i], bt.rows[0]), dot(a.rows[i], bt.rows[1]),
                     dot(a.rows[i], bt.rows[2])};
    return r;
}

}  // namespace rainforge
