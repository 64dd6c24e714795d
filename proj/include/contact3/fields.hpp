#pragma once

// Vector fields, one-forms, and (1,1)-tensor fields on a three-dimensional
// chart, with the differential-geometric operations built on top of Expr:
// directional derivatives, Lie brackets, Lie derivatives, and the exterior
// derivative of a one-form. Components are taken in the coordinate basis.
//
// Matrix convention: m[i][j] is the i-th component of the image of the j-th
// basis vector, so column j of a (1,1)-tensor is T(d_j) and matrix products
// compose operators left to right.

#include <array>
#include <cmath>

#include "contact3/expr.hpp"

namespace contact3 {

using Vec3 = std::array<Expr, 3>;
using Mat3 = std::array<std::array<Expr, 3>, 3>;

using VectorField = Vec3;   // components X^i
using OneForm = Vec3;       // components w_i
using TensorField11 = Mat3; // operator T^i_j

using NVec3 = std::array<double, 3>;
using NMat3 = std::array<std::array<double, 3>, 3>;

// ---------------------------------------------------------------------------
// Symbolic 3x3 helpers.

inline Mat3 zero_mat() { return Mat3{}; }

inline Mat3 identity_mat() {
  Mat3 m{};
  for (int i = 0; i < 3; ++i) m[i][i] = Expr::constant(1.0);
  return m;
}

inline Mat3 mat_add(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

inline Mat3 mat_sub(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}

inline Mat3 mat_scale(const Expr& s, const Mat3& a) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = s * a[i][j];
  return r;
}

inline Mat3 mat_mul(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Expr s = a[i][0] * b[0][j];
      for (int k = 1; k < 3; ++k) s = s + a[i][k] * b[k][j];
      r[i][j] = s;
    }
  }
  return r;
}

inline Mat3 mat_transpose(const Mat3& a) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[j][i];
  return r;
}

inline Expr mat_trace(const Mat3& a) { return a[0][0] + a[1][1] + a[2][2]; }

inline Vec3 mat_vec(const Mat3& a, const Vec3& v) {
  Vec3 r;
  for (int i = 0; i < 3; ++i) {
    Expr s = a[i][0] * v[0];
    for (int k = 1; k < 3; ++k) s = s + a[i][k] * v[k];
    r[i] = s;
  }
  return r;
}

inline Vec3 vec_add(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec3 vec_sub(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Vec3 vec_scale(const Expr& s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

// v (x) w as a matrix: r[i][j] = v[i] * w[j].
inline Mat3 outer(const Vec3& v, const Vec3& w) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = v[i] * w[j];
  return r;
}

// Pairing of a one-form with a vector field.
inline Expr form_apply(const OneForm& w, const VectorField& x) {
  return w[0] * x[0] + w[1] * x[1] + w[2] * x[2];
}

// g(X, Y) for a (0,2)-tensor g.
inline Expr metric_pair(const Mat3& g, const Vec3& x, const Vec3& y) {
  Expr s = Expr::constant(0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s = s + g[i][j] * x[i] * y[j];
  return s;
}

inline Expr det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline Mat3 adjugate3(const Mat3& m) {
  Mat3 r;
  r[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  r[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
  r[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
  r[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  r[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  r[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
  r[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  r[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
  r[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return r;
}

// Inverse via adjugate over determinant; the determinant subtree is shared
// by all nine entries.
inline Mat3 mat_inverse(const Mat3& m) {
  Expr det = det3(m);
  Mat3 adj = adjugate3(m);
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = adj[i][j] / det;
  return r;
}

// ---------------------------------------------------------------------------
// Numeric 3x3 helpers and pointwise evaluation.

inline NVec3 eval_vec(EvalContext& ctx, const Vec3& v) {
  return {ctx.eval(v[0]), ctx.eval(v[1]), ctx.eval(v[2])};
}

inline NMat3 eval_mat(EvalContext& ctx, const Mat3& m) {
  NMat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = ctx.eval(m[i][j]);
  return r;
}

inline NVec3 nmat_vec(const NMat3& a, const NVec3& v) {
  NVec3 r{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r[i] += a[i][k] * v[k];
  return r;
}

inline NMat3 nmat_mul(const NMat3& a, const NMat3& b) {
  NMat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

inline NVec3 nvec_add(const NVec3& a, const NVec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline NVec3 nvec_sub(const NVec3& a, const NVec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline NVec3 nvec_scale(double s, const NVec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

inline double ndot_g(const NMat3& g, const NVec3& x, const NVec3& y) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += g[i][j] * x[i] * y[j];
  return s;
}

inline double nnorm_g(const NMat3& g, const NVec3& x) {
  return std::sqrt(std::max(0.0, ndot_g(g, x, x)));
}

inline double ndet3(const NMat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline double nmat_abs_max(const NMat3& m) {
  double r = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r = std::max(r, std::abs(m[i][j]));
  return r;
}

inline double nvec_abs_max(const NVec3& v) {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

// ---------------------------------------------------------------------------
// Differential operations.

// X(f) = X^i d_i f.
inline Expr directional_derivative(const VectorField& x, const Expr& f,
                                   DiffCache& dc) {
  Expr s = Expr::constant(0.0);
  for (int i = 0; i < 3; ++i) s = s + x[i] * dc.diff(f, i);
  return s;
}

inline Expr directional_derivative(const VectorField& x, const Expr& f) {
  DiffCache dc;
  return directional_derivative(x, f, dc);
}

// [X, Y]^i = X^j d_j Y^i - Y^j d_j X^i.
inline VectorField lie_bracket(const VectorField& x, const VectorField& y,
                               DiffCache& dc) {
  VectorField r;
  for (int i = 0; i < 3; ++i) {
    r[i] = directional_derivative(x, y[i], dc) - directional_derivative(y, x[i], dc);
  }
  return r;
}

inline VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  DiffCache dc;
  return lie_bracket(x, y, dc);
}

// (L_X T)(Y) = [X, T Y] - T [X, Y] for a (1,1)-tensor T, computed in
// components: (L_X T)^i_j = X^k d_k T^i_j - T^k_j d_k X^i + T^i_k d_j X^k.
inline TensorField11 lie_derivative_11(const VectorField& x, const TensorField11& t,
                                       DiffCache& dc) {
  TensorField11 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Expr s = Expr::constant(0.0);
      for (int k = 0; k < 3; ++k) {
        s = s + x[k] * dc.diff(t[i][j], k);
        s = s - t[k][j] * dc.diff(x[i], k);
        s = s + t[i][k] * dc.diff(x[k], j);
      }
      r[i][j] = s;
    }
  }
  return r;
}

inline TensorField11 lie_derivative_11(const VectorField& x, const TensorField11& t) {
  DiffCache dc;
  return lie_derivative_11(x, t, dc);
}

// Exterior derivative of a one-form, (dw)_ij = d_i w_j - d_j w_i, so that
// dw(X, Y) = X^i Y^j (dw)_ij. With this convention d(f dg) = df ^ dg gives
// dw(d_i, d_j) = (dw)_ij directly, without a 1/2 normalization.
struct TwoForm {
  Mat3 comp;  // antisymmetric

  Expr operator()(const VectorField& x, const VectorField& y) const {
    Expr s = Expr::constant(0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s = s + comp[i][j] * x[i] * y[j];
    return s;
  }

  double at(const VectorField& x, const VectorField& y, const Point& p,
            const CoordNames& coords = kDefaultCoords) const {
    return eval((*this)(x, y), p, coords);
  }
};

inline TwoForm d_oneform(const OneForm& w, DiffCache& dc) {
  TwoForm r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.comp[i][j] = dc.diff(w[j], i) - dc.diff(w[i], j);
  return r;
}

inline TwoForm d_oneform(const OneForm& w) {
  DiffCache dc;
  return d_oneform(w, dc);
}

}  // namespace contact3
