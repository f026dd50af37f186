#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "mriaug/error.hpp"

namespace mriaug {

using Vec3 = std::array<double, 3>;

/// Row-major 4x4 voxel-to-world matrix; the last row is (0, 0, 0, 1).
using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat4 identity_affine() {
    return {{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
}

inline Mat4 diagonal_affine(const Vec3& spacing) {
    Mat4 m = identity_affine();
    for (int i = 0; i < 3; ++i) m[i][i] = spacing[i];
    return m;
}

inline Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
            r[i][j] = s;
        }
    return r;
}

inline Vec3 transform_point(const Mat4& m, const Vec3& p) {
    Vec3 r{};
    for (int i = 0; i < 3; ++i) r[i] = m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2] + m[i][3];
    return r;
}

/// Determinant of the linear 3x3 block (the affine is invertible iff this is non-zero).
inline double linear_determinant(const Mat4& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline bool is_invertible(const Mat4& m) {
    const double d = linear_determinant(m);
    return std::isfinite(d) && d != 0.0;
}

inline Mat4 inverse(const Mat4& m) {
    if (!is_invertible(m)) fail(ErrorCode::NonInvertibleAffine, "affine has zero determinant");
    // Gauss-Jordan with partial pivoting on the full 4x4.
    Mat4 a = m;
    Mat4 inv = identity_affine();
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double p = a[col][col];
        for (int j = 0; j < 4; ++j) {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (int j = 0; j < 4; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

} // namespace mriaug
