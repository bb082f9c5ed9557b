#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lipflow/error.hpp"
#include "lipflow/geometry.hpp"
#include "lipflow/vec.hpp"

namespace lipflow {

// Time-dependent Dirichlet datum on closure(Omega) x [0,T] with its
// essential sup bounds. The analytic gradient closures are optional;
// catalog data always provide them.
struct BoundaryDatum {
  std::function<double(Vec2, double)> g;
  std::function<double(Vec2, double)> dt_g;
  std::function<Vec2(Vec2, double)> grad_g;
  std::function<Vec2(Vec2, double)> dt_grad_g;
  std::function<double(Vec2)> g0;
  double grad_g_sup = 0.0;
  double dt_g_sup = 0.0;
  double dt_grad_sup = 0.0;
  double T = 1.0;
  std::string name;
};

// Supporting-slope certificate of the time-dependent bounded slope condition
// at one boundary point. Slopes are stored on a time grid and interpolated
// linearly in between.
struct SlopeCertificate {
  Vec2 x_o;
  Vec2 nu;  // outward normal at x_o
  std::vector<double> times;
  std::vector<Vec2> w_minus, w_plus;
  double Q = 0.0;
  double Qdot = 0.0;
  std::vector<Vec2> widened_minus, widened_plus;
  double Q1 = 0.0;
  bool widened = false;

  Vec2 interp(const std::vector<Vec2>& w, double t) const {
    if (t <= times.front()) return w.front();
    if (t >= times.back()) return w.back();
    size_t k = 0;
    while (k + 1 < times.size() && times[k + 1] < t) ++k;
    double lam = (t - times[k]) / (times[k + 1] - times[k]);
    return (1.0 - lam) * w[k] + lam * w[k + 1];
  }
  Vec2 lower(double t) const { return interp(w_minus, t); }
  Vec2 upper(double t) const { return interp(w_plus, t); }
  Vec2 widened_lower(double t) const { return interp(widened_minus, t); }
  Vec2 widened_upper(double t) const { return interp(widened_plus, t); }
};

namespace detail {

// Incremental solver for 2-D programs over half-planes a.w <= b.
// min_norm_point: argmin |w - target|^2 (exact, constraints processed
// one at a time; a violated constraint is active at the new optimum and the
// problem restricts to its line). lexicographic_min: argmin c.w first,
// then minimal norm on the (near-)optimal face.
struct HalfplaneSet {
  std::vector<Vec2> a;
  std::vector<double> b;

  void add(Vec2 ai, double bi) { a.push_back(ai); b.push_back(bi); }

  std::optional<Vec2> min_norm_point(Vec2 target) const {
    Vec2 w = target;
    for (size_t j = 0; j < a.size(); ++j) {
      double scale = std::max({1.0, std::abs(b[j]), norm(a[j]) * norm(w)});
      if (dot(a[j], w) <= b[j] + 1e-13 * scale) continue;
      double an2 = norm2(a[j]);
      if (an2 < 1e-300) return std::nullopt;  // 0.w <= b violated
      Vec2 q = target + ((b[j] - dot(a[j], target)) / an2) * a[j];
      Vec2 d = perp(a[j]) / std::sqrt(an2);
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < j; ++k) {
        double coef = dot(a[k], d);
        double rhs = b[k] - dot(a[k], q);
        double sc = std::max({1.0, std::abs(b[k]), norm(a[k]) * (norm(q) + std::abs(rhs))});
        if (std::abs(coef) <= 1e-13 * std::max(1.0, norm(a[k]))) {
          if (rhs < -1e-11 * sc) return std::nullopt;
          continue;
        }
        double s = rhs / coef;
        if (coef > 0) hi = std::min(hi, s);
        else lo = std::max(lo, s);
      }
      if (lo > hi + 1e-11) return std::nullopt;
      double s = std::clamp(0.0, lo, hi);  // q is the foot of the perpendicular
      w = q + s * d;
    }
    return w;
  }

  // Linear phase bounded by a large box; the box constraints go first so
  // every 1-D subproblem along a constraint line stays finite.
  std::optional<double> linear_min_value(Vec2 c, double box, Vec2& arg) const {
    HalfplaneSet full;
    full.add({1, 0}, box);
    full.add({-1, 0}, box);
    full.add({0, 1}, box);
    full.add({0, -1}, box);
    for (size_t j = 0; j < a.size(); ++j) full.add(a[j], b[j]);
    Vec2 w{c.x > 0 ? -box : (c.x < 0 ? box : 0.0), c.y > 0 ? -box : (c.y < 0 ? box : 0.0)};
    for (size_t j = 0; j < full.a.size(); ++j) {
      double scale = std::max({1.0, std::abs(full.b[j]), norm(full.a[j]) * norm(w)});
      if (dot(full.a[j], w) <= full.b[j] + 1e-13 * scale) continue;
      double an2 = norm2(full.a[j]);
      if (an2 < 1e-300) return std::nullopt;
      Vec2 q = (full.b[j] / an2) * full.a[j];
      Vec2 d = perp(full.a[j]) / std::sqrt(an2);
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < j; ++k) {
        double coef = dot(full.a[k], d);
        double rhs = full.b[k] - dot(full.a[k], q);
        double sc = std::max({1.0, std::abs(full.b[k]), norm(full.a[k]) * (norm(q) + std::abs(rhs))});
        if (std::abs(coef) <= 1e-13 * std::max(1.0, norm(full.a[k]))) {
          if (rhs < -1e-11 * sc) return std::nullopt;
          continue;
        }
        double s = rhs / coef;
        if (coef > 0) hi = std::min(hi, s);
        else lo = std::max(lo, s);
      }
      if (lo > hi + 1e-11) return std::nullopt;
      double slope = dot(c, d);
      double s;
      if (slope > 1e-14) s = lo;
      else if (slope < -1e-14) s = hi;
      else s = std::clamp(0.0, lo, hi);
      if (!std::isfinite(s)) return std::nullopt;
      w = q + s * d;
    }
    arg = w;
    return dot(c, w);
  }

  std::optional<Vec2> lexicographic_min(Vec2 c, double box = 1e6) const {
    Vec2 arg;
    auto gamma = linear_min_value(c, box, arg);
    if (!gamma) return std::nullopt;
    HalfplaneSet restricted = *this;
    double slack = 1e-12 * (1.0 + std::abs(*gamma));
    restricted.add(c, *gamma + slack);
    auto w = restricted.min_norm_point({0.0, 0.0});
    if (!w) return arg;  // degenerate slack; keep the LP vertex
    return w;
  }
};

}  // namespace detail

namespace detail {

// Boundary parameter of a point: coarse scan plus golden-section refinement.
inline double boundary_parameter_of(const ConvexDomain& dom, Vec2 x_o) {
  int n = 4096;
  double best_th = 0.0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double th = 2.0 * M_PI * i / n;
    double d = norm2(dom.boundary(th) - x_o);
    if (d < best) { best = d; best_th = th; }
  }
  double a = best_th - 2.0 * M_PI / n, b = best_th + 2.0 * M_PI / n;
  for (int it = 0; it < 80; ++it) {
    double c1 = a + 0.382 * (b - a), c2 = a + 0.618 * (b - a);
    if (norm2(dom.boundary(c1) - x_o) < norm2(dom.boundary(c2) - x_o)) b = c2;
    else a = c1;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Certifies the time-dependent bounded slope condition at x_o on a grid of
// times against sampled lateral-boundary constraints (normalized to
// difference quotients). Two extra samples just next to x_o stand in for the
// tangential limit constraints. Each time slice is a small program over
// half-planes; among all supporting slopes the one with the least integrated
// gap is selected (ties broken by minimal norm), which reproduces the
// canonical slopes of affine-in-space data. Slopes reaching slope_cap are
// indistinguishable from infeasible at the sampling resolution and are
// reported as such.
inline SlopeCertificate certify_tbsc(const BoundaryDatum& g, const ConvexDomain& dom, Vec2 x_o,
                                     int time_samples, int boundary_samples,
                                     double slope_cap = 1e3) {
  SlopeCertificate cert;
  cert.x_o = x_o;
  cert.nu = dom.normal(x_o);

  std::vector<Vec2> pts;
  for (int j = 0; j < boundary_samples; ++j) {
    Vec2 p = dom.boundary(2.0 * M_PI * j / boundary_samples);
    if (norm(p - x_o) > 1e-12) pts.push_back(p);
  }
  double th_o = detail::boundary_parameter_of(dom, x_o);
  for (double dth : {-2e-4 * M_PI, 2e-4 * M_PI}) {
    Vec2 p = dom.boundary(th_o + dth);
    if (norm(p - x_o) > 1e-12) pts.push_back(p);
  }
  Vec2 S{0.0, 0.0};
  for (const Vec2& p : pts) S += p - x_o;

  for (int k = 0; k < time_samples; ++k) {
    double t = g.T * k / std::max(1, time_samples - 1);
    cert.times.push_back(t);
    double go = g.g(x_o, t);

    detail::HalfplaneSet lower, upper;
    for (const Vec2& p : pts) {
      Vec2 d = p - x_o;
      double quot = (g.g(p, t) - go) / norm(d);
      Vec2 dh = normalized(d);
      lower.add(dh, quot);         //  w.(x - x_o) <= g(x) - g(x_o)
      upper.add(-1.0 * dh, -quot); // -w.(x - x_o) <= g(x_o) - g(x)
    }
    auto wm = lower.lexicographic_min(-1.0 * S, slope_cap);
    if (!wm || std::max(std::abs(wm->x), std::abs(wm->y)) >= 0.999 * slope_cap)
      throw Infeasible("certify_tbsc: no lower supporting slope at t", t);
    auto wp = upper.lexicographic_min(S, slope_cap);
    if (!wp || std::max(std::abs(wp->x), std::abs(wp->y)) >= 0.999 * slope_cap)
      throw Infeasible("certify_tbsc: no upper supporting slope at t", t);
    cert.w_minus.push_back(*wm);
    cert.w_plus.push_back(*wp);
  }

  cert.Q = 0.0;
  for (size_t k = 0; k < cert.times.size(); ++k)
    cert.Q = std::max({cert.Q, norm(cert.w_minus[k]), norm(cert.w_plus[k])});
  cert.Qdot = 0.0;
  for (size_t k = 0; k + 1 < cert.times.size(); ++k) {
    double dt = cert.times[k + 1] - cert.times[k];
    cert.Qdot = std::max({cert.Qdot, norm(cert.w_minus[k + 1] - cert.w_minus[k]) / dt,
                          norm(cert.w_plus[k + 1] - cert.w_plus[k]) / dt});
  }
  return cert;
}

// Extends the lateral-boundary certificate to all of closure(Omega) by the
// normal-shift construction: widened = w -+ q nu with q in {0, Q_o}. The
// zero shift is tried first so data whose affine bounds already hold inside
// keep Q1 = Q. Verified against interior samples; failure signals an
// underestimated grad_g_sup.
inline SlopeCertificate widen_slopes(SlopeCertificate cert, const BoundaryDatum& g,
                                     const ConvexDomain& dom, int interior_samples = 40) {
  double Qo = g.grad_g_sup;

  std::vector<Vec2> samples;
  {
    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (int j = 0; j < 64; ++j) {
      Vec2 p = dom.boundary(2.0 * M_PI * j / 64);
      lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
      samples.push_back(p);
    }
    int n = interior_samples;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        Vec2 p{lo.x + (hi.x - lo.x) * i / n, lo.y + (hi.y - lo.y) * j / n};
        if (dom.contains(p)) samples.push_back(p);
      }
  }

  auto lower_ok = [&](double q) {
    for (size_t k = 0; k < cert.times.size(); ++k) {
      double t = cert.times[k];
      Vec2 w = cert.w_minus[k] + q * cert.nu;
      double go = g.g(cert.x_o, t);
      for (const Vec2& p : samples)
        if (go + dot(w, p - cert.x_o) > g.g(p, t) + 1e-9) return false;
    }
    return true;
  };
  auto upper_ok = [&](double q) {
    for (size_t k = 0; k < cert.times.size(); ++k) {
      double t = cert.times[k];
      Vec2 w = cert.w_plus[k] - q * cert.nu;
      double go = g.g(cert.x_o, t);
      for (const Vec2& p : samples)
        if (go + dot(w, p - cert.x_o) < g.g(p, t) - 1e-9) return false;
    }
    return true;
  };

  double qm = lower_ok(0.0) ? 0.0 : Qo;
  if (qm > 0.0 && !lower_ok(qm))
    throw WideningInsufficient("widen_slopes: lower bound fails on interior samples");
  double qp = upper_ok(0.0) ? 0.0 : Qo;
  if (qp > 0.0 && !upper_ok(qp))
    throw WideningInsufficient("widen_slopes: upper bound fails on interior samples");

  cert.widened_minus.clear();
  cert.widened_plus.clear();
  for (size_t k = 0; k < cert.times.size(); ++k) {
    cert.widened_minus.push_back(cert.w_minus[k] + qm * cert.nu);
    cert.widened_plus.push_back(cert.w_plus[k] - qp * cert.nu);
  }
  cert.Q1 = 0.0;
  for (size_t k = 0; k < cert.times.size(); ++k)
    cert.Q1 = std::max({cert.Q1, norm(cert.widened_minus[k]), norm(cert.widened_plus[k])});
  cert.widened = true;
  return cert;
}

// Exponential regularization of the boundary values in time, evaluated by
// composite Gauss-Legendre with the smooth kernel left in place. Satisfies
// g_i(0) = g_o exactly and inherits the spatial gradient bound.
inline BoundaryDatum time_smooth_boundary(const BoundaryDatum& g, double h_i) {
  if (!(h_i > 0.0 && h_i <= g.T)) throw Error("time_smooth_boundary: need h_i in (0, T]");

  auto kernel_avg = [h_i](const std::function<double(double)>& f, double t) {
    if (t <= 0.0) return 0.0;
    int panels = std::max(8, 8 * int(std::ceil(t / h_i)));
    static const std::array<double, 4> xs = {-0.8611363115940526, -0.3399810435848563,
                                             0.3399810435848563, 0.8611363115940526};
    static const std::array<double, 4> ws = {0.3478548451374538, 0.6521451548625461,
                                             0.6521451548625461, 0.3478548451374538};
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
      double a = t * p / panels, b = t * (p + 1) / panels;
      for (int q = 0; q < 4; ++q) {
        double s = 0.5 * (a + b) + 0.5 * (b - a) * xs[q];
        acc += 0.5 * (b - a) * ws[q] * std::exp((s - t) / h_i) * f(s);
      }
    }
    return acc / h_i;
  };

  BoundaryDatum out = g;
  out.name = g.name + "_mollified";
  auto base = g;  // captured by value: the original datum stays alive
  out.g = [base, h_i, kernel_avg](Vec2 x, double t) {
    auto f = [&](double s) { return base.g(x, s); };
    return std::exp(-t / h_i) * base.g0(x) + kernel_avg(f, t);
  };
  auto smoothed = out.g;
  out.dt_g = [base, smoothed, h_i](Vec2 x, double t) {
    return (base.g(x, t) - smoothed(x, t)) / h_i;  // d/dt [g]_h = (g - [g]_h)/h
  };
  if (base.grad_g) {
    out.grad_g = [base, h_i, kernel_avg](Vec2 x, double t) {
      auto fx = [&](double s) { return base.grad_g(x, s).x; };
      auto fy = [&](double s) { return base.grad_g(x, s).y; };
      Vec2 g0 = base.grad_g(x, 0.0);
      return Vec2{std::exp(-t / h_i) * g0.x + kernel_avg(fx, t),
                  std::exp(-t / h_i) * g0.y + kernel_avg(fy, t)};
    };
    auto sg = out.grad_g;
    out.dt_grad_g = [base, sg, h_i](Vec2 x, double t) {
      return (1.0 / h_i) * (base.grad_g(x, t) - sg(x, t));
    };
  }
  return out;
}

// --- datum catalog ----------------------------------------------------------

namespace detail {

inline void estimate_sups(BoundaryDatum& d, const ConvexDomain& dom, int space_n = 48,
                          int time_n = 48) {
  double gs = 0.0, ds = 0.0, dgs = 0.0;
  std::vector<Vec2> pts;
  for (int j = 0; j < space_n; ++j) pts.push_back(dom.boundary(2.0 * M_PI * j / space_n));
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (const Vec2& p : pts) {
    lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
  }
  for (int i = 0; i <= 24; ++i)
    for (int j = 0; j <= 24; ++j) {
      Vec2 p{lo.x + (hi.x - lo.x) * i / 24.0, lo.y + (hi.y - lo.y) * j / 24.0};
      if (dom.contains(p)) pts.push_back(p);
    }
  for (int k = 0; k <= time_n; ++k) {
    double t = d.T * k / time_n;
    for (const Vec2& p : pts) {
      if (d.grad_g) gs = std::max(gs, norm(d.grad_g(p, t)));
      if (d.dt_g) ds = std::max(ds, std::abs(d.dt_g(p, t)));
      if (d.dt_grad_g) dgs = std::max(dgs, norm(d.dt_grad_g(p, t)));
    }
  }
  d.grad_g_sup = gs;
  d.dt_g_sup = ds;
  d.dt_grad_sup = dgs;
}

}  // namespace detail

// g(x,t) = amp (x_1 cos wt + x_2 sin wt): affine in space for each time.
inline BoundaryDatum rotating_datum(const ConvexDomain& dom, double amp = 1.0,
                                    double omega = 1.0, double T = M_PI) {
  BoundaryDatum d;
  d.name = "rotating";
  d.T = T;
  d.g = [=](Vec2 x, double t) {
    return amp * (x.x * std::cos(omega * t) + x.y * std::sin(omega * t));
  };
  d.dt_g = [=](Vec2 x, double t) {
    return amp * omega * (-x.x * std::sin(omega * t) + x.y * std::cos(omega * t));
  };
  d.grad_g = [=](Vec2, double t) {
    return Vec2{amp * std::cos(omega * t), amp * std::sin(omega * t)};
  };
  d.dt_grad_g = [=](Vec2, double t) {
    return Vec2{-amp * omega * std::sin(omega * t), amp * omega * std::cos(omega * t)};
  };
  d.g0 = [=](Vec2 x) { return amp * x.x; };
  detail::estimate_sups(d, dom);
  return d;
}

inline BoundaryDatum constant_datum(const ConvexDomain& dom, double value, double T = 1.0) {
  BoundaryDatum d;
  d.name = "constant";
  d.T = T;
  d.g = [=](Vec2, double) { return value; };
  d.dt_g = [](Vec2, double) { return 0.0; };
  d.grad_g = [](Vec2, double) { return Vec2{0.0, 0.0}; };
  d.dt_grad_g = [](Vec2, double) { return Vec2{0.0, 0.0}; };
  d.g0 = [=](Vec2) { return value; };
  detail::estimate_sups(d, dom);
  return d;
}

// One term of a space-harmonic / time-trigonometric datum:
//   amp * H_k(x) * cos(m t + phase),
// H_k = Re (x_1 + i x_2)^k or Im (x_1 + i x_2)^k. Harmonic polynomials in
// space, so any truncated series is smooth on the whole plane.
struct HarmonicTerm {
  int k = 1;
  bool imaginary = false;
  double m = 0.0;
  double phase = 0.0;
  double amp = 1.0;
};

inline BoundaryDatum fourier_datum(const ConvexDomain& dom, std::vector<HarmonicTerm> terms,
                                   double T = M_PI) {
  BoundaryDatum d;
  d.name = "fourier";
  d.T = T;
  auto H = [](const HarmonicTerm& tm, Vec2 x) {
    std::complex<double> z{x.x, x.y};
    std::complex<double> zk = std::pow(z, tm.k);
    return tm.imaginary ? zk.imag() : zk.real();
  };
  auto gradH = [](const HarmonicTerm& tm, Vec2 x) {
    if (tm.k == 0) return Vec2{0.0, 0.0};
    std::complex<double> z{x.x, x.y};
    std::complex<double> zk1 = double(tm.k) * std::pow(z, tm.k - 1);
    // d/dx Re z^k = k Re z^{k-1}, d/dy Re z^k = -k Im z^{k-1}; swapped for Im
    if (tm.imaginary) return Vec2{zk1.imag(), zk1.real()};
    return Vec2{zk1.real(), -zk1.imag()};
  };
  d.g = [=](Vec2 x, double t) {
    double s = 0.0;
    for (const auto& tm : terms) s += tm.amp * H(tm, x) * std::cos(tm.m * t + tm.phase);
    return s;
  };
  d.dt_g = [=](Vec2 x, double t) {
    double s = 0.0;
    for (const auto& tm : terms) s += -tm.amp * tm.m * H(tm, x) * std::sin(tm.m * t + tm.phase);
    return s;
  };
  d.grad_g = [=](Vec2 x, double t) {
    Vec2 s{0.0, 0.0};
    for (const auto& tm : terms) s += (tm.amp * std::cos(tm.m * t + tm.phase)) * gradH(tm, x);
    return s;
  };
  d.dt_grad_g = [=](Vec2 x, double t) {
    Vec2 s{0.0, 0.0};
    for (const auto& tm : terms)
      s += (-tm.amp * tm.m * std::sin(tm.m * t + tm.phase)) * gradH(tm, x);
    return s;
  };
  d.g0 = [g = d.g](Vec2 x) { return g(x, 0.0); };
  detail::estimate_sups(d, dom);
  return d;
}

// g(x) = amp |x - p|: a static cone; with p on the boundary the graph has a
// corner there and one side of the slope condition is infeasible.
inline BoundaryDatum cusp_datum(const ConvexDomain& dom, Vec2 p, double amp = 1.0,
                                double T = 1.0) {
  BoundaryDatum d;
  d.name = "cusp";
  d.T = T;
  d.g = [=](Vec2 x, double) { return amp * norm(x - p); };
  d.dt_g = [](Vec2, double) { return 0.0; };
  d.grad_g = [=](Vec2 x, double) { return amp * normalized(x - p); };
  d.dt_grad_g = [](Vec2, double) { return Vec2{0.0, 0.0}; };
  d.g0 = [=](Vec2 x) { return amp * norm(x - p); };
  detail::estimate_sups(d, dom);
  d.grad_g_sup = std::abs(amp);
  return d;
}

// g(x) = offset + amp (1 - |x - p|^2): static paraboloid cap (amp > 0) or
// bowl (amp < 0).
inline BoundaryDatum radial_quadratic_datum(const ConvexDomain& dom, Vec2 p, double amp,
                                            double offset = 0.0, double T = 1.0) {
  BoundaryDatum d;
  d.name = "radial_quadratic";
  d.T = T;
  d.g = [=](Vec2 x, double) { return offset + amp * (1.0 - norm2(x - p)); };
  d.dt_g = [](Vec2, double) { return 0.0; };
  d.grad_g = [=](Vec2 x, double) { return (-2.0 * amp) * (x - p); };
  d.dt_grad_g = [](Vec2, double) { return Vec2{0.0, 0.0}; };
  d.g0 = [g = d.g](Vec2 x) { return g(x, 0.0); };
  detail::estimate_sups(d, dom);
  return d;
}

}  // namespace lipflow
