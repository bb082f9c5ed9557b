#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "lipflow/error.hpp"
#include "lipflow/mesh.hpp"

namespace lipflow {

// Time-indexed nodal fields on a shared mesh (or plain sample vectors).
// times[0] = 0; initial is the v_o of the exponential mollification.
struct TimeSeriesField {
  std::vector<double> times;
  std::vector<Field> values;
  Field initial;

  int n_steps() const { return int(times.size()); }
  int n_nodes() const { return values.empty() ? int(initial.size()) : int(values[0].size()); }
};

inline TimeSeriesField scalar_series(const std::vector<double>& times,
                                     const std::vector<double>& vals, double v0) {
  TimeSeriesField s;
  s.times = times;
  for (double v : vals) s.values.push_back(Field{v});
  s.initial = Field{v0};
  return s;
}

namespace detail {

// Evaluates [v]_h anywhere, treating v as linear in time between grid points.
// The kernel integral over each interval has a closed form, so grid values
// satisfy an exact recurrence and the evaluation is quadrature-free.
struct ExpMollifier {
  const TimeSeriesField* v;
  double h;
  std::vector<Field> grid;  // [v]_h at the grid times

  ExpMollifier(const TimeSeriesField& series, double step) : v(&series), h(step) {
    int n = v->n_steps(), m = v->n_nodes();
    grid.assign(n, Field(m, 0.0));
    grid[0] = v->initial;
    for (int k = 0; k + 1 < n; ++k) {
      double dt = v->times[k + 1] - v->times[k];
      double E = std::exp(-dt / h);
      double wa = 1.0 - E;                        // weight of v(t_k)
      double wb = 1.0 - (h / dt) * (1.0 - E);     // extra weight of the slope term
      for (int i = 0; i < m; ++i) {
        double a = v->values[k][i], b = v->values[k + 1][i];
        grid[k + 1][i] = E * grid[k][i] + a * wa + (b - a) * wb;
      }
    }
  }

  void eval(double t, Field& out) const {
    int n = v->n_steps(), m = v->n_nodes();
    out.assign(m, 0.0);
    int k = 0;
    while (k + 1 < n && v->times[k + 1] <= t) ++k;
    if (k + 1 >= n || t <= v->times[k]) { out = grid[std::min(k, n - 1)]; return; }
    double dt = v->times[k + 1] - v->times[k];
    double dtau = t - v->times[k];
    double E = std::exp(-dtau / h);
    double wa = 1.0 - E;
    double slope_w = dtau - h * (1.0 - E);
    for (int i = 0; i < m; ++i) {
      double a = v->values[k][i], b = v->values[k + 1][i];
      out[i] = E * grid[k][i] + a * wa + ((b - a) / dt) * slope_w;
    }
  }
};

inline double nodal_norm(const Field& f) {
  double s = 0.0;
  for (double x : f) s += x * x;
  return std::sqrt(s);
}

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
inline const std::array<double, 8>& gl8_nodes() {
  static const std::array<double, 8> x = {
      -0.9602898564975362, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
      0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975362};
  return x;
}
inline const std::array<double, 8>& gl8_weights() {
  static const std::array<double, 8> w = {
      0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
      0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  return w;
}

}  // namespace detail

// Exponential mollification [v]_h on the grid of v; [v]_h(0) = v_o exactly.
inline TimeSeriesField mollify(const TimeSeriesField& v, double h) {
  if (!(h > 0.0)) throw Error("mollify: h must be positive");
  detail::ExpMollifier m(v, h);
  TimeSeriesField out;
  out.times = v.times;
  out.values = m.grid;
  out.initial = v.initial;
  return out;
}

struct MollifierNormReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

// Checks ||[v]_h||_{L^r(0,t_o;X)} <= ||v|| + [h/r (1 - e^{-t_o r/h})]^{1/r} ||v_o||_X
// with X the nodal l2 norm; the bracket is 1 for r = infinity.
inline MollifierNormReport mollifier_norm_check(const TimeSeriesField& v, double h, double r,
                                                double t_o) {
  detail::ExpMollifier m(v, h);
  Field tmp;
  const bool inf_norm = std::isinf(r);

  double lhs_acc = 0.0, lhs_max = 0.0;
  double vnorm_acc = 0.0, vnorm_max = detail::nodal_norm(v.initial) * 0.0;
  auto v_at = [&](double t, Field& out) {  // piecewise-linear evaluation of v
    int n = v.n_steps();
    int k = 0;
    while (k + 1 < n && v.times[k + 1] <= t) ++k;
    if (k + 1 >= n) { out = v.values[n - 1]; return; }
    double lam = (t - v.times[k]) / (v.times[k + 1] - v.times[k]);
    out.assign(v.n_nodes(), 0.0);
    for (int i = 0; i < v.n_nodes(); ++i)
      out[i] = (1 - lam) * v.values[k][i] + lam * v.values[k + 1][i];
  };

  for (int k = 0; k + 1 < v.n_steps() && v.times[k] < t_o; ++k) {
    double a = v.times[k], b = std::min(v.times[k + 1], t_o);
    for (int q = 0; q < 8; ++q) {
      double t = 0.5 * (a + b) + 0.5 * (b - a) * detail::gl8_nodes()[q];
      double w = 0.5 * (b - a) * detail::gl8_weights()[q];
      m.eval(t, tmp);
      double nm = detail::nodal_norm(tmp);
      Field vt;
      v_at(t, vt);
      double nv = detail::nodal_norm(vt);
      if (inf_norm) {
        lhs_max = std::max(lhs_max, nm);
        vnorm_max = std::max(vnorm_max, nv);
      } else {
        lhs_acc += w * std::pow(nm, r);
        vnorm_acc += w * std::pow(nv, r);
      }
    }
  }

  if (inf_norm) {  // suprema of piecewise profiles are attained at grid times
    Field vt;
    for (int k = 0; k < v.n_steps() && v.times[k] <= t_o; ++k) {
      m.eval(v.times[k], tmp);
      lhs_max = std::max(lhs_max, detail::nodal_norm(tmp));
      vnorm_max = std::max(vnorm_max, detail::nodal_norm(v.values[k]));
    }
  }

  MollifierNormReport rep;
  double v0 = detail::nodal_norm(v.initial);
  if (inf_norm) {
    rep.lhs = std::max(lhs_max, v0);  // [v]_h(0) = v_o contributes to the sup
    rep.rhs = vnorm_max + v0;
  } else {
    rep.lhs = std::pow(lhs_acc, 1.0 / r);
    double bracket = std::pow(h / r * (1.0 - std::exp(-t_o * r / h)), 1.0 / r);
    rep.rhs = std::pow(vnorm_acc, 1.0 / r) + bracket * v0;
  }
  rep.pass = rep.lhs <= rep.rhs + 1e-8;
  return rep;
}

// d/dt [v]_h computed as the mollification of the piecewise-constant slope of
// v with zero initial value; requires v(0) = v_o. The discrete L^2
// contraction against the slope of v is verified on the way out.
inline TimeSeriesField mollify_time_derivative(const TimeSeriesField& v, double h) {
  int n = v.n_steps(), m = v.n_nodes();
  for (int i = 0; i < m; ++i) {
    double scale = std::max(1.0, std::abs(v.initial[i]));
    if (std::abs(v.initial[i] - v.values[0][i]) > 1e-12 * scale)
      throw InitialMismatch("mollify_time_derivative: v_o != v(0)");
  }

  TimeSeriesField out;
  out.times = v.times;
  out.initial.assign(m, 0.0);
  out.values.assign(n, Field(m, 0.0));

  // slope c_k on (t_k, t_{k+1}]; grid recurrence D_{k+1} = E D_k + c_k (1-E)
  std::vector<Field> slope(std::max(0, n - 1), Field(m, 0.0));
  for (int k = 0; k + 1 < n; ++k) {
    double dt = v.times[k + 1] - v.times[k];
    for (int i = 0; i < m; ++i) slope[k][i] = (v.values[k + 1][i] - v.values[k][i]) / dt;
  }
  for (int k = 0; k + 1 < n; ++k) {
    double dt = v.times[k + 1] - v.times[k];
    double E = std::exp(-dt / h);
    for (int i = 0; i < m; ++i)
      out.values[k + 1][i] = E * out.values[k][i] + slope[k][i] * (1.0 - E);
  }

  // L^2(time) contraction; both sides by per-interval quadrature
  double num = 0.0, den = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    double dt = v.times[k + 1] - v.times[k];
    for (int q = 0; q < 8; ++q) {
      double tau = 0.5 * dt * (1.0 + detail::gl8_nodes()[q]);
      double w = 0.5 * dt * detail::gl8_weights()[q];
      double E = std::exp(-tau / h);
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        double d = E * out.values[k][i] + slope[k][i] * (1.0 - E);
        acc += d * d;
      }
      num += w * acc;
    }
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += slope[k][i] * slope[k][i];
    den += dt * acc;
  }
  if (std::sqrt(num) > std::sqrt(den) + 1e-8 * (1.0 + std::sqrt(den)))
    throw Error("mollify_time_derivative: L2 contraction violated");
  return out;
}

}  // namespace lipflow
