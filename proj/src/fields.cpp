#include "hyperdyn/fields.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "hyperdyn/errors.hpp"

namespace hyperdyn {

Grid::Grid(double x_min, double x_max, double y_min, double y_max, std::size_t nx, std::size_t ny)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), nx_(nx), ny_(ny) {
  for (double v : {x_min, x_max, y_min, y_max}) {
    if (!std::isfinite(v)) throw ConfigError("grid bounds must be finite");
  }
  if (!(x_min < x_max)) throw ConfigError("grid requires x_min < x_max");
  if (!(y_min > 0.0)) throw ConfigError("grid requires y_min > 0 (upper half-plane)");
  if (!(y_min < y_max)) throw ConfigError("grid requires y_min < y_max");
  if (nx < 4 || ny < 4) throw ConfigError("grid requires at least 4 nodes per direction");
  hx_ = (x_max - x_min) / static_cast<double>(nx - 1);
  hy_ = (y_max - y_min) / static_cast<double>(ny - 1);
}

bool Grid::contains(double x, double y) const {
  return x >= x_min_ && x <= x_max_ && y >= y_min_ && y <= y_max_;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("scalar field size does not match grid");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw RangeError("scalar field values must be finite");
  }
}

ScalarField ScalarField::zeros(const Grid& grid) {
  return ScalarField(grid, std::vector<double>(grid.size(), 0.0));
}

ScalarField ScalarField::sample(const Grid& grid,
                                const std::function<double(const HalfPlanePoint&)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    for (std::size_t j = 0; j < grid.ny(); ++j) {
      v[grid.index(i, j)] = f(grid.point(i, j));
    }
  }
  return ScalarField(grid, std::move(v));
}

double ScalarField::interpolate(double x, double y) const {
  if (!grid_.contains(x, y)) {
    std::ostringstream msg;
    msg << "point (" << x << ", " << y << ") lies outside the grid";
    throw DomainError(msg.str());
  }
  const double fx = (x - grid_.x_min()) / grid_.hx();
  const double fy = (y - grid_.y_min()) / grid_.hy();
  const std::size_t i = std::min(static_cast<std::size_t>(fx), grid_.nx() - 2);
  const std::size_t j = std::min(static_cast<std::size_t>(fy), grid_.ny() - 2);
  const double tx = fx - static_cast<double>(i);
  const double ty = fy - static_cast<double>(j);
  const auto& f = *this;
  return (1 - tx) * (1 - ty) * f(i, j) + tx * (1 - ty) * f(i + 1, j) + (1 - tx) * ty * f(i, j + 1) +
         tx * ty * f(i + 1, j + 1);
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

ScalarField ScalarField::scaled(double c) const {
  std::vector<double> v(values_);
  for (double& e : v) e *= c;
  return ScalarField(grid_, std::move(v));
}

// ---------------------------------------------------------------------------

VectorPotentialField::VectorPotentialField(ScalarField ax, ScalarField ay)
    : ax_(std::move(ax)), ay_(std::move(ay)) {
  if (!(ax_.grid() == ay_.grid())) {
    throw std::invalid_argument("vector potential components must share a grid");
  }
}

VectorPotentialField VectorPotentialField::zeros(const Grid& grid) {
  return {ScalarField::zeros(grid), ScalarField::zeros(grid)};
}

VectorPotentialField VectorPotentialField::sample(
    const Grid& grid, const std::function<std::pair<double, double>(const HalfPlanePoint&)>& f) {
  std::vector<double> ax(grid.size());
  std::vector<double> ay(grid.size());
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    for (std::size_t j = 0; j < grid.ny(); ++j) {
      const auto [vx, vy] = f(grid.point(i, j));
      ax[grid.index(i, j)] = vx;
      ay[grid.index(i, j)] = vy;
    }
  }
  return {ScalarField(grid, std::move(ax)), ScalarField(grid, std::move(ay))};
}

VectorPotentialField VectorPotentialField::scaled(double c) const {
  return {ax_.scaled(c), ay_.scaled(c)};
}

MagneticTwoForm MagneticTwoForm::uniform_reference(const Grid& grid) {
  return MagneticTwoForm(
      ScalarField::sample(grid, [](const HalfPlanePoint& p) { return metric_at(p).sqrt_g; }));
}

// ---------------------------------------------------------------------------

namespace {

// Derivative along one axis of a strided line of n samples with spacing h.
template <typename Get, typename Put>
void differentiate_line(std::size_t n, double h, Get get, Put put) {
  const double inv2h = 1.0 / (2.0 * h);
  // Differences first, so constant data differentiates to exactly zero.
  put(0, (4.0 * (get(1) - get(0)) - (get(2) - get(0))) * inv2h);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    put(k, (get(k + 1) - get(k - 1)) * inv2h);
  }
  put(n - 1, (4.0 * (get(n - 1) - get(n - 2)) - (get(n - 1) - get(n - 3))) * inv2h);
}

std::vector<double> pointwise(const Grid& grid, const std::function<double(std::size_t)>& f) {
  std::vector<double> out(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) out[n] = f(n);
  return out;
}

}  // namespace

ScalarField partial_x(const ScalarField& f) {
  const Grid& g = f.grid();
  std::vector<double> out(g.size());
  const auto v = f.values();
  for (std::size_t j = 0; j < g.ny(); ++j) {
    differentiate_line(
        g.nx(), g.hx(), [&](std::size_t i) { return v[g.index(i, j)]; },
        [&](std::size_t i, double d) { out[g.index(i, j)] = d; });
  }
  return ScalarField(g, std::move(out));
}

ScalarField partial_y(const ScalarField& f) {
  const Grid& g = f.grid();
  std::vector<double> out(g.size());
  const auto v = f.values();
  for (std::size_t i = 0; i < g.nx(); ++i) {
    differentiate_line(
        g.ny(), g.hy(), [&](std::size_t j) { return v[g.index(i, j)]; },
        [&](std::size_t j, double d) { out[g.index(i, j)] = d; });
  }
  return ScalarField(g, std::move(out));
}

std::pair<double, double> lower_index(const VectorPotentialField& a, const HalfPlanePoint& p) {
  const double ax = a.ax().interpolate(p.x(), p.y());
  const double ay = a.ay().interpolate(p.x(), p.y());
  const MetricSample m = metric_at(p);
  return {m.g11 * ax, m.g22 * ay};
}

MagneticTwoForm exterior_derivative(const VectorPotentialField& a) {
  const Grid& g = a.grid();
  std::vector<double> lx(g.size());
  std::vector<double> ly(g.size());
  for (std::size_t i = 0; i < g.nx(); ++i) {
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const std::size_t n = g.index(i, j);
      const MetricSample m = metric_at(g.point(i, j));
      lx[n] = m.g11 * a.ax().values()[n];
      ly[n] = m.g22 * a.ay().values()[n];
    }
  }
  const ScalarField dx_ay = partial_x(ScalarField(g, std::move(ly)));
  const ScalarField dy_ax = partial_y(ScalarField(g, std::move(lx)));
  return MagneticTwoForm(ScalarField(
      g, pointwise(g, [&](std::size_t n) { return dx_ay.values()[n] - dy_ax.values()[n]; })));
}

ScalarField covariant_divergence(const VectorPotentialField& a) {
  const Grid& g = a.grid();
  std::vector<double> wx(g.size());
  std::vector<double> wy(g.size());
  for (std::size_t i = 0; i < g.nx(); ++i) {
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const std::size_t n = g.index(i, j);
      const double sqrt_g = metric_at(g.point(i, j)).sqrt_g;
      wx[n] = sqrt_g * a.ax().values()[n];
      wy[n] = sqrt_g * a.ay().values()[n];
    }
  }
  const ScalarField dx = partial_x(ScalarField(g, std::move(wx)));
  const ScalarField dy = partial_y(ScalarField(g, std::move(wy)));
  return ScalarField(g,
                     pointwise(g, [&](std::size_t n) { return dx.values()[n] + dy.values()[n]; }));
}

ScalarField covariant_laplacian(const VectorPotentialField& a, int component) {
  if (component != 0 && component != 1) {
    throw std::invalid_argument("component must be 0 (x) or 1 (y)");
  }
  const Grid& g = a.grid();
  const std::size_t count = g.size();
  const int i = component;

  // partial[k][l] = d_l A^k
  const std::array<std::array<ScalarField, 2>, 2> partial{{
      {partial_x(a.ax()), partial_y(a.ax())},
      {partial_x(a.ay()), partial_y(a.ay())},
  }};

  std::vector<double> flux_x(count);
  std::vector<double> flux_y(count);
  std::vector<double> algebraic(count);

  for (std::size_t ix = 0; ix < g.nx(); ++ix) {
    for (std::size_t jy = 0; jy < g.ny(); ++jy) {
      const std::size_t n = g.index(ix, jy);
      const HalfPlanePoint p = g.point(ix, jy);
      const MetricSample m = metric_at(p);
      const ChristoffelSet gam = christoffel_at(p);
      const double g_inv[2][2] = {{m.g_inv11, 0.0}, {0.0, m.g_inv22}};
      const double comp[2] = {a.ax().values()[n], a.ay().values()[n]};

      // cov[k][l] = A^k_{;l}
      double cov[2][2];
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
          double c = partial[k][l].values()[n];
          for (int mm = 0; mm < 2; ++mm) c += gam(k, l, mm) * comp[mm];
          cov[k][l] = c;
        }
      }

      double flux[2] = {0.0, 0.0};
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) flux[j] += g_inv[j][k] * cov[i][k];
      }
      flux_x[n] = flux[0];
      flux_y[n] = flux[1];

      double rest = 0.0;
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
          for (int l = 0; l < 2; ++l) {
            rest += g_inv[j][l] * gam(i, k, j) * cov[k][l];
            rest += g_inv[k][l] * gam(j, k, j) * cov[i][l];
          }
        }
      }
      algebraic[n] = rest;
    }
  }

  const ScalarField div_x = partial_x(ScalarField(g, std::move(flux_x)));
  const ScalarField div_y = partial_y(ScalarField(g, std::move(flux_y)));
  return ScalarField(g, pointwise(g, [&](std::size_t n) {
                       return div_x.values()[n] + div_y.values()[n] + algebraic[n];
                     }));
}

ComponentPair eigenmode_check(const VectorPotentialField& a, double lambda) {
  const double l2 = lambda * lambda;
  auto residual = [&](int c) {
    const ScalarField lap = covariant_laplacian(a, c);
    const auto field = a.component(c).values();
    return ScalarField(a.grid(), pointwise(a.grid(), [&](std::size_t n) {
                         return lap.values()[n] + l2 * field[n];
                       }));
  };
  return {residual(0), residual(1)};
}

double integrate_volume(const ScalarField& f) {
  const Grid& g = f.grid();
  double total = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double wx = (i == 0 || i + 1 == g.nx()) ? 0.5 : 1.0;
    double column = 0.0;
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const double wy = (j == 0 || j + 1 == g.ny()) ? 0.5 : 1.0;
      column += wy * f(i, j) * metric_at(g.point(i, j)).sqrt_g;
    }
    total += wx * column;
  }
  return total * g.hx() * g.hy();
}

void write_csv(std::ostream& out, const ScalarField& f) {
  const Grid& g = f.grid();
  out << "x,y,value\n";
  char line[128];
  for (std::size_t i = 0; i < g.nx(); ++i) {
    for (std::size_t j = 0; j < g.ny(); ++j) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", g.x(i), g.y(j), f(i, j));
      out << line;
    }
  }
}

ScalarField read_csv(std::istream& in, const Grid& grid) {
  std::string line;
  if (!std::getline(in, line) || line != "x,y,value") {
    throw std::invalid_argument("field CSV must start with header x,y,value");
  }
  std::vector<double> values;
  values.reserve(grid.size());
  const double tol_x = 1e-9 * grid.hx();
  const double tol_y = 1e-9 * grid.hy();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double x = 0, y = 0, v = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &v) != 3) {
      throw std::invalid_argument("malformed field CSV row: " + line);
    }
    const std::size_t n = values.size();
    if (n >= grid.size()) throw std::invalid_argument("field CSV has more rows than grid nodes");
    const std::size_t i = n / grid.ny();
    const std::size_t j = n % grid.ny();
    if (std::abs(x - grid.x(i)) > tol_x || std::abs(y - grid.y(j)) > tol_y) {
      throw std::invalid_argument("field CSV node order does not match grid");
    }
    values.push_back(v);
  }
  return ScalarField(grid, std::move(values));
}

}  // namespace hyperdyn
