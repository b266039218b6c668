#pragma once

// Uniform-grid discretization of the unit square, R^3-valued fields, and the
// finite-difference operators and quadrature that every functional uses.
//
// Two node layouts share one set of operators:
//   ZeroTrace  - interior nodes only; the boundary trace is identically zero.
//                This is the H^1_0 discretization used by the flow.
//   WithTrace  - interior plus boundary nodes; used to evaluate fields with a
//                nonzero boundary trace (trapezoid weights, one-sided
//                second-order differences at the boundary).

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hflow/error.hpp"

namespace hflow {

class GridSpec {
 public:
  int n() const noexcept { return n_; }
  double h() const noexcept { return h_; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  explicit GridSpec(int n) : n_(n), h_(1.0 / static_cast<double>(n + 1)) {}

  friend GridSpec make_grid(int n);
  friend struct GridAccess;

  int n_;
  double h_;
};

/// n interior nodes per axis, spacing 1/(n+1). Requires n >= 3.
inline GridSpec make_grid(int n) {
  if (n < 3) {
    throw InvalidGridError("grid needs at least 3 interior nodes per axis, got " +
                           std::to_string(n));
  }
  return GridSpec(n);
}

/// Bypasses the n >= 3 precondition. Only meant for hand-checkable stencil
/// oracles on one- and two-node grids.
struct GridAccess {
  static GridSpec unchecked(int n) { return GridSpec(n); }
};

struct ZeroTrace {
  static int extent(const GridSpec& g) noexcept { return g.n(); }
  static double coord(const GridSpec& g, int i) noexcept { return (i + 1) * g.h(); }
  static double weight(const GridSpec&, int) noexcept { return 1.0; }

  // d/dx along one lattice line; values outside the interior are zero.
  static double diff(const double* line, std::ptrdiff_t stride, int i, int m, double h) noexcept {
    const double hi = i + 1 < m ? line[(i + 1) * stride] : 0.0;
    const double lo = i > 0 ? line[(i - 1) * stride] : 0.0;
    return (hi - lo) / (2.0 * h);
  }
};

struct WithTrace {
  static int extent(const GridSpec& g) noexcept { return g.n() + 2; }
  static double coord(const GridSpec& g, int i) noexcept { return i * g.h(); }
  static double weight(const GridSpec& g, int i) noexcept {
    return (i == 0 || i == extent(g) - 1) ? 0.5 : 1.0;
  }

  static double diff(const double* line, std::ptrdiff_t stride, int i, int m, double h) noexcept {
    auto v = [&](int k) { return line[k * stride]; };
    if (i == 0) return (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
    if (i == m - 1) return (3.0 * v(m - 1) - 4.0 * v(m - 2) + v(m - 3)) / (2.0 * h);
    return (v(i + 1) - v(i - 1)) / (2.0 * h);
  }
};

template <class Layout>
class BasicScalarField {
 public:
  explicit BasicScalarField(const GridSpec& g)
      : grid_(g), m_(Layout::extent(g)), values_(static_cast<std::size_t>(m_) * m_, 0.0) {}

  const GridSpec& grid() const noexcept { return grid_; }
  int extent() const noexcept { return m_; }

  double& operator()(int i, int j) noexcept { return values_[index(i, j)]; }
  double operator()(int i, int j) const noexcept { return values_[index(i, j)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const BasicScalarField&, const BasicScalarField&) = default;

 private:
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * m_ + static_cast<std::size_t>(j);
  }

  GridSpec grid_;
  int m_;
  std::vector<double> values_;
};

template <class Layout>
class BasicVectorField {
 public:
  explicit BasicVectorField(const GridSpec& g) : grid_(g), m_(Layout::extent(g)) {
    for (auto& c : comps_) c.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  }

  const GridSpec& grid() const noexcept { return grid_; }
  int extent() const noexcept { return m_; }
  std::size_t size() const noexcept { return comps_[0].size(); }

  double& operator()(int k, int i, int j) noexcept { return comps_[k][index(i, j)]; }
  double operator()(int k, int i, int j) const noexcept { return comps_[k][index(i, j)]; }

  std::span<double> component(int k) noexcept { return comps_[k]; }
  std::span<const double> component(int k) const noexcept { return comps_[k]; }

  BasicVectorField& operator+=(const BasicVectorField& o) {
    require_same_grid(o);
    for (int k = 0; k < 3; ++k)
      for (std::size_t p = 0; p < size(); ++p) comps_[k][p] += o.comps_[k][p];
    return *this;
  }
  BasicVectorField& operator-=(const BasicVectorField& o) {
    require_same_grid(o);
    for (int k = 0; k < 3; ++k)
      for (std::size_t p = 0; p < size(); ++p) comps_[k][p] -= o.comps_[k][p];
    return *this;
  }
  BasicVectorField& operator*=(double s) noexcept {
    for (auto& c : comps_)
      for (auto& v : c) v *= s;
    return *this;
  }

  friend BasicVectorField operator+(BasicVectorField a, const BasicVectorField& b) { return a += b; }
  friend BasicVectorField operator-(BasicVectorField a, const BasicVectorField& b) { return a -= b; }
  friend BasicVectorField operator*(double s, BasicVectorField a) { return a *= s; }

  friend bool operator==(const BasicVectorField&, const BasicVectorField&) = default;

  void require_same_grid(const BasicVectorField& o) const {
    if (!(grid_ == o.grid_)) throw GridMismatchError("vector fields live on different grids");
  }

  bool all_finite() const noexcept {
    for (const auto& c : comps_)
      for (double v : c)
        if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * m_ + static_cast<std::size_t>(j);
  }

  GridSpec grid_;
  int m_;
  std::array<std::vector<double>, 3> comps_;
};

using VectorField = BasicVectorField<ZeroTrace>;
using ScalarField = BasicScalarField<ZeroTrace>;
using TracedVectorField = BasicVectorField<WithTrace>;
using TracedScalarField = BasicScalarField<WithTrace>;

using Vec3 = std::array<double, 3>;

/// Samples expr(x, y) -> Vec3 at the nodes of the layout. With ZeroTrace only
/// interior nodes are sampled, so nonzero boundary values are clipped.
template <class Layout = ZeroTrace, class Expr>
BasicVectorField<Layout> sample(Expr&& expr, const GridSpec& g) {
  BasicVectorField<Layout> u(g);
  const int m = u.extent();
  for (int i = 0; i < m; ++i) {
    const double x = Layout::coord(g, i);
    for (int j = 0; j < m; ++j) {
      const double y = Layout::coord(g, j);
      const Vec3 v = expr(x, y);
      for (int k = 0; k < 3; ++k) {
        if (!std::isfinite(v[k])) {
          throw SamplingError("non-finite sample at (" + std::to_string(x) + ", " +
                              std::to_string(y) + ")");
        }
        u(k, i, j) = v[k];
      }
    }
  }
  return u;
}

/// Samples a scalar expression s(x, y).
template <class Layout = ZeroTrace, class Expr>
BasicScalarField<Layout> sample_scalar(Expr&& expr, const GridSpec& g) {
  BasicScalarField<Layout> s(g);
  const int m = s.extent();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double v = expr(Layout::coord(g, i), Layout::coord(g, j));
      if (!std::isfinite(v)) throw SamplingError("non-finite scalar sample");
      s(i, j) = v;
    }
  return s;
}

template <class Layout>
struct Gradient {
  BasicVectorField<Layout> ux;
  BasicVectorField<Layout> uy;
};

template <class Layout>
Gradient<Layout> gradient(const BasicVectorField<Layout>& u) {
  Gradient<Layout> g{BasicVectorField<Layout>(u.grid()), BasicVectorField<Layout>(u.grid())};
  const int m = u.extent();
  const double h = u.grid().h();
  for (int k = 0; k < 3; ++k) {
    const double* base = u.component(k).data();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        g.ux(k, i, j) = Layout::diff(base + j, m, i, m, h);
        g.uy(k, i, j) = Layout::diff(base + static_cast<std::ptrdiff_t>(i) * m, 1, j, m, h);
      }
  }
  return g;
}

/// 5-point Laplacian with homogeneous Dirichlet data.
inline VectorField laplacian(const VectorField& u) {
  VectorField out(u.grid());
  const int m = u.extent();
  const double inv_h2 = 1.0 / (u.grid().h() * u.grid().h());
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = -4.0 * u(k, i, j);
        if (i > 0) s += u(k, i - 1, j);
        if (i + 1 < m) s += u(k, i + 1, j);
        if (j > 0) s += u(k, i, j - 1);
        if (j + 1 < m) s += u(k, i, j + 1);
        out(k, i, j) = s * inv_h2;
      }
  return out;
}

/// Pointwise cross product a ^ b.
template <class Layout>
BasicVectorField<Layout> wedge(const BasicVectorField<Layout>& a, const BasicVectorField<Layout>& b) {
  a.require_same_grid(b);
  BasicVectorField<Layout> c(a.grid());
  const auto a0 = a.component(0), a1 = a.component(1), a2 = a.component(2);
  const auto b0 = b.component(0), b1 = b.component(1), b2 = b.component(2);
  auto c0 = c.component(0), c1 = c.component(1), c2 = c.component(2);
  for (std::size_t p = 0; p < a.size(); ++p) {
    c0[p] = a1[p] * b2[p] - a2[p] * b1[p];
    c1[p] = a2[p] * b0[p] - a0[p] * b2[p];
    c2[p] = a0[p] * b1[p] - a1[p] * b0[p];
  }
  return c;
}

template <class Layout>
BasicScalarField<Layout> dot(const BasicVectorField<Layout>& a, const BasicVectorField<Layout>& b) {
  a.require_same_grid(b);
  BasicScalarField<Layout> s(a.grid());
  auto out = s.values();
  for (int k = 0; k < 3; ++k) {
    const auto ak = a.component(k), bk = b.component(k);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += ak[p] * bk[p];
  }
  return s;
}

/// Layout-weighted lattice sum times h^2.
template <class Layout>
double integrate(const BasicScalarField<Layout>& s) {
  const GridSpec& g = s.grid();
  const int m = s.extent();
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    double row = 0.0;
    for (int j = 0; j < m; ++j) row += Layout::weight(g, j) * s(i, j);
    total += Layout::weight(g, i) * row;
  }
  return total * g.h() * g.h();
}

template <class Layout>
double l2_norm_sq(const BasicVectorField<Layout>& u) {
  return integrate(dot(u, u));
}

/// Integral of |ux|^2 + |uy|^2 with central-difference gradients.
template <class Layout>
double h1_seminorm_sq(const BasicVectorField<Layout>& u) {
  const auto g = gradient(u);
  return integrate(dot(g.ux, g.ux)) + integrate(dot(g.uy, g.uy));
}

/// Dirichlet integral from forward differences on the zero-padded lattice.
/// This is the quadratic form of the 5-point Laplacian:
///   integrate(dot(laplacian(u), u)) == -h1_seminorm_sq_forward(u).
/// The h^2 quadrature weight cancels the 1/h^2 of the squared differences.
inline double h1_seminorm_sq_forward(const VectorField& u) {
  const int m = u.extent();
  double s = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j < m; ++j) {
        const double hi = i < m ? u(k, i, j) : 0.0;
        const double lo = i > 0 ? u(k, i - 1, j) : 0.0;
        const double hj = i < m ? u(k, j, i) : 0.0;
        const double lj = i > 0 ? u(k, j, i - 1) : 0.0;
        s += (hi - lo) * (hi - lo) + (hj - lj) * (hj - lj);
      }
  return s;
}

/// Euclidean norm of the raw lattice values (no quadrature weights).
template <class Layout>
double lattice_norm(const BasicVectorField<Layout>& u) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k)
    for (double v : u.component(k)) s += v * v;
  return std::sqrt(s);
}

}  // namespace hflow
