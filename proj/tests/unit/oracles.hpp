#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the operators it is used to check.

#include <array>
#include <cmath>

namespace oracle {

// Metric of the half-plane written out directly: g_ab = y^-2 delta_ab.
inline double g_lower(int a, int b, double y) { return a == b ? 1.0 / (y * y) : 0.0; }
inline double g_upper(int a, int b, double y) { return a == b ? y * y : 0.0; }

// Gamma^a_bc = 1/2 g^ad (d_b g_dc + d_c g_db - d_d g_bc), metric derivatives
// by central differences of g_lower with step h (only d_y is nonzero).
inline std::array<double, 8> christoffel_fd(double y, double h) {
  auto dg = [&](int d, int a, int b) {
    if (d == 0) return 0.0;  // metric independent of x
    return (g_lower(a, b, y + h) - g_lower(a, b, y - h)) / (2.0 * h);
  };
  std::array<double, 8> out{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        double s = 0.0;
        for (int d = 0; d < 2; ++d) s += g_upper(a, d, y) * (dg(b, d, c) + dg(c, d, b) - dg(d, b, c));
        out[static_cast<std::size_t>(4 * a + 2 * b + c)] = 0.5 * s;
      }
  return out;
}

// Rough Laplacian of a vector field on the half-plane, expanded symbolically
// (sympy) from A^{i;k}_{;k} with the exact Christoffel symbols:
//   lap^x = y^2 (Ax_xx + Ax_yy) - 2y Ax_y - 2y Ay_x + Ax
//   lap^y = y^2 (Ay_xx + Ay_yy) + 2y Ax_x - 2y Ay_y + Ay
struct Jet {
  double v, dx, dy, dxx, dyy;
};
inline double laplacian_x(const Jet& ax, const Jet& ay, double y) {
  return y * y * (ax.dxx + ax.dyy) - 2.0 * y * ax.dy - 2.0 * y * ay.dx + ax.v;
}
inline double laplacian_y(const Jet& ax, const Jet& ay, double y) {
  return y * y * (ay.dxx + ay.dyy) + 2.0 * y * ax.dx - 2.0 * y * ay.dy + ay.v;
}

}  // namespace oracle
