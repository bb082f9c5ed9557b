#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "lipflow/boundary.hpp"
#include "lipflow/error.hpp"
#include "lipflow/geometry.hpp"
#include "lipflow/integrand.hpp"

namespace lipflow {

inline constexpr int kDim = 2;

enum class BarrierSign { lower, upper };

// Barrier of the form v(x,t) = (n/alpha) f*((alpha/n)(x - y(t))) - c(t),
// pinned to the boundary datum at x_o. Its nonlinear spatial divergence is
// the constant alpha wherever the conjugate is smooth, so for |alpha| large
// it is a sub-/super-solution of the flow. All closures are self-contained
// copies; a Barrier outlives the inputs it was built from.
struct Barrier {
  BarrierSign sign = BarrierSign::lower;
  double alpha = 0.0;
  Vec2 x_o;
  Vec2 nu;
  double lambda = 0.0;
  double M = 0.0;
  double Gamma = 0.0;
  double rho0 = 0.0;
  double Q1 = 0.0;
  std::function<Vec2(double)> z_lambda;
  std::function<Vec2(double)> y;
  std::function<double(double)> c;
  std::function<double(Vec2, double)> eval;
  std::function<Vec2(Vec2, double)> grad;
  std::function<double(Vec2, double)> dt;
  std::function<Vec2(double)> affine_slope;  // widened slope of the pinned side
  std::function<double(double)> g_at_xo;
  double lip_budget = 0.0;  // alpha diam/(eps n) + lambda + Q1, or the catalog bound
  double dt_budget = 0.0;   // (1/eps) diam |D^2 f| Qdot + |dt g|
  double T = 0.0;
};

// alpha_o = max{ n, (1/eps) diam ||D^2 f|| Qdot + ||dt g|| }: above this
// threshold the time derivative of the barrier is dominated by alpha.
inline double alpha_min(const ConvexIntegrand& f, const ConvexDomain& dom,
                        const BoundaryDatum& data, const SlopeCertificate& cert) {
  return std::max(double(kDim),
                  dom.diam * f.hess_sup * cert.Qdot / f.epsilon + data.dt_g_sup);
}

struct BarrierParams {
  double M = 0.0;
  double Gamma = 0.0;
  double rho0 = 0.0;
  double lambda = 0.0;
};

namespace detail {

inline double cellina_scale(const ConvexIntegrand& f, double alpha, Vec2 q) {
  return (kDim / alpha) * conjugate(f, (alpha / kDim) * q);
}

struct SweepGrid {
  int dirs = 64;
  int times = 64;
  int radii = 16;
  double radius_span = 4.0;  // test radii in [rho, span*rho]
};

}  // namespace detail

// Parameter selection of the barrier construction: geometric sweeps with
// multiplier 1.25 above the analytic lower bounds, each condition sampled on
// a (radius x time x direction) grid and re-tested at 0.9x the candidate as
// a safety margin. Sub-/superlinearity of f / f* makes each sweep finite;
// running out of budget signals numerically too-weak growth.
inline BarrierParams select_parameters(ConvexIntegrand& f, const ConvexDomain& dom,
                                       const BoundaryDatum& data, const SlopeCertificate& cert,
                                       double alpha, detail::SweepGrid grid = {}) {
  (void)data;
  if (!cert.widened) throw Error("select_parameters: certificate must be widened first");
  if (!f.smoothness_radius) conjugate_growth_report(f);
  double r = *f.smoothness_radius;
  double Q1 = cert.Q1;
  double eps = f.epsilon;

  auto dirvec = [&](int j) {
    double th = 2.0 * M_PI * j / grid.dirs;
    return Vec2{std::cos(th), std::sin(th)};
  };

  BarrierParams out;

  // M: |grad f*| > R/eps + Q1 outside B_M, with M >= r + diam
  {
    double threshold = dom.R / eps + Q1;
    auto holds_from = [&](double m) {
      for (int i = 0; i < grid.radii; ++i) {
        double rho = m * std::pow(grid.radius_span, double(i) / (grid.radii - 1));
        for (int j = 0; j < grid.dirs; ++j) {
          if (norm(grad_conjugate(f, rho * dirvec(j))) <= threshold) return false;
        }
      }
      return true;
    };
    double candidate = std::max(r + dom.diam, 1e-6);
    bool found = false;
    for (int k = 0; k < 60; ++k, candidate *= 1.25) {
      if (holds_from(std::max(r + dom.diam, 0.9 * candidate)) && holds_from(candidate)) {
        out.M = candidate;
        found = true;
        break;
      }
    }
    if (!found) throw SearchExhausted("select_parameters: no M with |grad f*| growth", "M");
  }

  // Gamma: max of (n/alpha) f*((alpha/n) x) - w.x over |x| <= M, |w| <= Q1;
  // the maximum over w is attained at w = -Q1 x/|x|
  {
    double g = detail::cellina_scale(f, alpha, {0.0, 0.0});
    for (int i = 1; i <= grid.radii; ++i) {
      double rho = out.M * i / grid.radii;
      for (int j = 0; j < grid.dirs; ++j) {
        Vec2 x = rho * dirvec(j);
        g = std::max(g, detail::cellina_scale(f, alpha, x) + Q1 * rho);
      }
    }
    out.Gamma = g;
  }

  // rho0: B(t, eta) = (n/alpha) f*((alpha/n) eta) - w^-(t).eta >= Gamma
  // for every |eta| >= rho0
  {
    auto holds_from = [&](double m) {
      for (int i = 0; i < grid.radii; ++i) {
        double rho = m * std::pow(grid.radius_span, double(i) / (grid.radii - 1));
        for (int j = 0; j < grid.dirs; ++j) {
          Vec2 eta = rho * dirvec(j);
          double base = detail::cellina_scale(f, alpha, eta);
          for (int k = 0; k < grid.times; ++k) {
            double t = cert.times.back() * k / grid.times;
            if (base - dot(cert.widened_lower(t), eta) < out.Gamma) return false;
          }
        }
      }
      return true;
    };
    double candidate = out.M;
    bool found = false;
    for (int k = 0; k < 60; ++k, candidate *= 1.25) {
      if (holds_from(std::max(out.M, 0.9 * candidate)) && holds_from(candidate)) {
        out.rho0 = candidate;
        found = true;
        break;
      }
    }
    if (!found) throw SearchExhausted("select_parameters: no rho0 with B >= Gamma", "rho0");
  }

  // lambda: z_lambda(t) = (n/alpha) grad f(w^-(t) + lambda nu) outside B_rho0
  {
    auto holds = [&](double lam) {
      for (int k = 0; k <= grid.times; ++k) {
        double t = cert.times.back() * k / grid.times;
        Vec2 z = (kDim / alpha) * f.grad(cert.widened_lower(t) + lam * cert.nu);
        if (norm(z) < out.rho0) return false;
      }
      return true;
    };
    double candidate = (Q1 + std::max(1.0, r)) * 1.0001;
    bool found = false;
    for (int k = 0; k < 80; ++k, candidate *= 1.25) {
      if (holds(candidate)) {
        out.lambda = candidate;
        found = true;
        break;
      }
    }
    if (!found) throw SearchExhausted("select_parameters: no lambda pushes z outside rho0", "lambda");
  }
  return out;
}

namespace detail {

inline ConvexIntegrand mirrored(const ConvexIntegrand& f) {
  ConvexIntegrand m = f;
  m.name = f.name + "_mirrored";
  auto base = f;
  m.eval = [base](Vec2 xi) { return base.eval(-1.0 * xi); };
  m.grad = [base](Vec2 xi) { return -1.0 * base.grad(-1.0 * xi); };
  if (base.hess) m.hess = [base](Vec2 xi) { return base.hess(-1.0 * xi); };
  if (base.analytic_conjugate)
    m.analytic_conjugate = [base](Vec2 eta) { return base.analytic_conjugate(-1.0 * eta); };
  if (base.analytic_grad_conjugate)
    m.analytic_grad_conjugate = [base](Vec2 eta) {
      return -1.0 * base.analytic_grad_conjugate(-1.0 * eta);
    };
  return m;
}

inline BoundaryDatum negated(const BoundaryDatum& d) {
  BoundaryDatum n = d;
  n.name = d.name + "_negated";
  auto base = d;
  n.g = [base](Vec2 x, double t) { return -base.g(x, t); };
  n.dt_g = [base](Vec2 x, double t) { return -base.dt_g(x, t); };
  if (base.grad_g) n.grad_g = [base](Vec2 x, double t) { return -1.0 * base.grad_g(x, t); };
  if (base.dt_grad_g)
    n.dt_grad_g = [base](Vec2 x, double t) { return -1.0 * base.dt_grad_g(x, t); };
  n.g0 = [base](Vec2 x) { return -base.g0(x); };
  return n;
}

inline SlopeCertificate mirrored_certificate(const SlopeCertificate& cert) {
  SlopeCertificate m = cert;
  for (size_t k = 0; k < cert.times.size(); ++k) {
    m.w_minus[k] = -1.0 * cert.w_plus[k];
    m.w_plus[k] = -1.0 * cert.w_minus[k];
    m.widened_minus[k] = -1.0 * cert.widened_plus[k];
    m.widened_plus[k] = -1.0 * cert.widened_minus[k];
  }
  return m;
}

inline Barrier build_lower(ConvexIntegrand f, const ConvexDomain& dom, BoundaryDatum data,
                           SlopeCertificate cert, double alpha) {
  if (!(alpha > 0.0)) throw Error("build_lower: need alpha > 0");
  BarrierParams params = select_parameters(f, dom, data, cert, alpha);

  Barrier b;
  b.sign = BarrierSign::lower;
  b.alpha = alpha;
  b.x_o = cert.x_o;
  b.nu = cert.nu;
  b.lambda = params.lambda;
  b.M = params.M;
  b.Gamma = params.Gamma;
  b.rho0 = params.rho0;
  b.Q1 = cert.Q1;
  b.T = data.T;
  b.lip_budget = alpha * dom.diam / (f.epsilon * kDim) + params.lambda + cert.Q1;
  b.dt_budget = dom.diam * f.hess_sup * cert.Qdot / f.epsilon + data.dt_g_sup;

  double lambda = params.lambda;
  Vec2 x_o = cert.x_o, nu = cert.nu;
  auto z = [f, cert, lambda, nu, alpha](double t) {
    return (kDim / alpha) * f.grad(cert.widened_lower(t) + lambda * nu);
  };
  b.z_lambda = z;
  b.y = [z, x_o](double t) { return x_o - z(t); };
  auto g_xo = [data, x_o](double t) { return data.g(x_o, t); };
  b.g_at_xo = g_xo;
  auto yfn = b.y;
  b.c = [f, alpha, z, g_xo](double t) {
    return (kDim / alpha) * conjugate(f, (alpha / kDim) * z(t)) - g_xo(t);
  };
  auto cfn = b.c;
  b.eval = [f, alpha, yfn, cfn](Vec2 x, double t) {
    return (kDim / alpha) * conjugate(f, (alpha / kDim) * (x - yfn(t))) - cfn(t);
  };
  b.grad = [f, alpha, yfn](Vec2 x, double t) {
    return grad_conjugate(f, (alpha / kDim) * (x - yfn(t)));
  };
  auto evalfn = b.eval;
  double fd_step = data.T / (4.0 * 64.0);
  b.dt = [evalfn, fd_step, T = data.T](Vec2 x, double t) {
    double lo = std::max(0.0, t - fd_step), hi = std::min(T, t + fd_step);
    return (evalfn(x, hi) - evalfn(x, lo)) / (hi - lo);
  };
  b.affine_slope = [cert](double t) { return cert.widened_lower(t); };
  return b;
}

}  // namespace detail

// Builds a lower (alpha > 0) or upper (alpha < 0) barrier through the
// general pipeline. The upper barrier is the mirror image of a lower one
// for the reflected integrand and the negated datum.
inline Barrier build(const ConvexIntegrand& f, const ConvexDomain& dom, const BoundaryDatum& data,
                     const SlopeCertificate& cert, double alpha, BarrierSign sign) {
  if (sign == BarrierSign::lower) return detail::build_lower(f, dom, data, cert, alpha);
  if (!(alpha < 0.0)) throw Error("build: upper barrier needs alpha < 0");

  Barrier m = detail::build_lower(detail::mirrored(f), dom, detail::negated(data),
                                  detail::mirrored_certificate(cert), -alpha);
  Barrier b;
  b.sign = BarrierSign::upper;
  b.alpha = alpha;
  b.x_o = m.x_o;
  b.nu = m.nu;
  b.lambda = m.lambda;
  b.M = m.M;
  b.Gamma = m.Gamma;
  b.rho0 = m.rho0;
  b.Q1 = m.Q1;
  b.T = m.T;
  b.lip_budget = m.lip_budget;
  b.dt_budget = m.dt_budget;
  b.z_lambda = m.z_lambda;
  b.y = m.y;
  auto mc = m.c;
  b.c = [mc](double t) { return -mc(t); };
  auto me = m.eval;
  b.eval = [me](Vec2 x, double t) { return -me(x, t); };
  auto mg = m.grad;
  b.grad = [mg](Vec2 x, double t) { return -1.0 * mg(x, t); };
  auto md = m.dt;
  b.dt = [md](Vec2 x, double t) { return -md(x, t); };
  auto ms = m.affine_slope;
  b.affine_slope = [ms](double t) { return -1.0 * ms(t); };
  auto mgx = m.g_at_xo;
  b.g_at_xo = [mgx](double t) { return -mgx(t); };
  return b;
}

// The worked scenario in closed form: unit disk, f = |.|^2/2, rotating
// datum, x_o = (-1, 0). y(t) and c(t) are the explicit representatives; the
// general pipeline produces different (y, c) with the same barrier claims.
inline Barrier rotating_disk_barrier(double alpha, double T = M_PI) {
  if (!(alpha > 0.0)) throw Error("rotating_disk_barrier: need alpha > 0");
  Barrier b;
  b.sign = BarrierSign::lower;
  b.alpha = alpha;
  b.x_o = {-1.0, 0.0};
  b.nu = {-1.0, 0.0};
  b.lambda = 1.0 + 0.5 * alpha;  // the value that reproduces the explicit y(t)
  b.Q1 = 1.0;
  b.T = T;
  b.lip_budget = 2.0 + 0.5 * alpha;
  b.dt_budget = 1.0;
  b.y = [alpha](double t) {
    return Vec2{(2.0 / alpha) * (1.0 - std::cos(t)), -(2.0 / alpha) * std::sin(t)};
  };
  auto yfn = b.y;
  b.z_lambda = [yfn](double t) { return Vec2{-1.0, 0.0} - yfn(t); };
  b.c = [alpha](double t) { return 0.25 * alpha + 1.0 + (2.0 / alpha) * (1.0 - std::cos(t)); };
  auto cfn = b.c;
  b.eval = [alpha, yfn, cfn](Vec2 x, double t) {
    return 0.25 * alpha * norm2(x - yfn(t)) - cfn(t);
  };
  b.grad = [alpha, yfn](Vec2 x, double t) { return (0.5 * alpha) * (x - yfn(t)); };
  b.dt = [](Vec2 x, double t) { return -x.x * std::sin(t) + x.y * std::cos(t); };
  b.affine_slope = [](double t) { return Vec2{std::cos(t), std::sin(t)}; };
  b.g_at_xo = [](double t) { return -std::cos(t); };
  return b;
}

struct BarrierReport {
  double pin_err = 0.0;         // max_t |v(x_o,t) - g(x_o,t)|
  double ordering_viol = 0.0;   // signed violation of v <= g (resp. >=)
  double subsol_viol = 0.0;     // signed violation of dt v - div grad f(grad v) <= 0
  double lip_const = 0.0;       // max sampled |grad v|
  double divergence_err = 0.0;  // max |div grad f(grad v) - alpha|
  double dt_max = 0.0;          // max sampled |dt v|
};

// Samples the four barrier claims plus the Cellina divergence identity.
// Reports only; callers decide pass/fail against their budgets.
inline BarrierReport verify(const Barrier& b, const ConvexIntegrand& f, const ConvexDomain& dom,
                            const BoundaryDatum& data, int space_samples, int time_samples) {
  BarrierReport rep;
  double sgn = b.sign == BarrierSign::lower ? 1.0 : -1.0;

  for (int k = 0; k < 2 * time_samples; ++k) {
    double t = data.T * k / (2 * time_samples);
    rep.pin_err = std::max(rep.pin_err, std::abs(b.eval(b.x_o, t) - data.g(b.x_o, t)));
  }

  // sample cloud over the closure: bounding-box grid plus the boundary rim
  std::vector<Vec2> cloud;
  {
    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (int j = 0; j < 128; ++j) {
      Vec2 p = dom.boundary(2.0 * M_PI * j / 128);
      lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
      cloud.push_back(p);
    }
    for (int i = 0; i <= space_samples; ++i)
      for (int j = 0; j <= space_samples; ++j) {
        Vec2 p{lo.x + (hi.x - lo.x) * i / space_samples,
               lo.y + (hi.y - lo.y) * j / space_samples};
        if (dom.contains(p)) cloud.push_back(p);
      }
  }

  double fd = 1e-3 * dom.diam;
  auto flux = [&](Vec2 x, double t) { return f.grad(b.grad(x, t)); };
  // central stencil where it fits, second-order one-sided towards the
  // interior near the boundary; false when an axis has no interior stencil
  auto divergence = [&](Vec2 x, double t, double& div) {
    div = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      Vec2 e = axis == 0 ? Vec2{fd, 0} : Vec2{0, fd};
      auto comp = [&](Vec2 q) { return axis == 0 ? flux(q, t).x : flux(q, t).y; };
      if (dom.contains(x + e) && dom.contains(x - e)) {
        div += (comp(x + e) - comp(x - e)) / (2 * fd);
      } else if (dom.contains(x + e) && dom.contains(x + 2.0 * e)) {
        div += (-3.0 * comp(x) + 4.0 * comp(x + e) - comp(x + 2.0 * e)) / (2 * fd);
      } else if (dom.contains(x - e) && dom.contains(x - 2.0 * e)) {
        div += (3.0 * comp(x) - 4.0 * comp(x - e) + comp(x - 2.0 * e)) / (2 * fd);
      } else {
        return false;
      }
    }
    return true;
  };

  rep.ordering_viol = -1e300;
  rep.subsol_viol = -1e300;
  for (int k = 0; k < time_samples; ++k) {
    double t = data.T * k / time_samples;  // [0, T)
    for (const Vec2& x : cloud) {
      rep.ordering_viol = std::max(rep.ordering_viol, sgn * (b.eval(x, t) - data.g(x, t)));
      rep.lip_const = std::max(rep.lip_const, norm(b.grad(x, t)));
      double dtv = b.dt(x, t);
      rep.dt_max = std::max(rep.dt_max, std::abs(dtv));
      double dv = 0.0;
      if (!divergence(x, t, dv)) continue;  // interior samples only
      rep.divergence_err = std::max(rep.divergence_err, std::abs(dv - b.alpha));
      rep.subsol_viol = std::max(rep.subsol_viol, sgn * (dtv - dv));
    }
  }
  return rep;
}

struct SublevelReport {
  bool x_o_on_boundary = false;
  bool omega_contained = false;
  double x_o_defining_value = 0.0;
  double worst_defining_value = 0.0;  // max over the closure; <= 0 means contained
  Vec2 witness;
};

// Geometry of the comparison set {x : v(x,t) <= pinned affine function}
// (>= for upper barriers): x_o must sit on its boundary, the domain inside.
inline SublevelReport sublevel_geometry(const Barrier& b, const ConvexDomain& dom, double t,
                                        int boundary_samples) {
  SublevelReport rep;
  double sgn = b.sign == BarrierSign::lower ? 1.0 : -1.0;
  auto defining = [&](Vec2 x) {
    double affine = b.g_at_xo(t) + dot(b.affine_slope(t), x - b.x_o);
    return sgn * (b.eval(x, t) - affine);
  };
  rep.x_o_defining_value = defining(b.x_o);
  rep.x_o_on_boundary = std::abs(rep.x_o_defining_value) <= 1e-10;

  rep.worst_defining_value = -1e300;
  for (int j = 0; j < boundary_samples; ++j) {
    Vec2 p = dom.boundary(2.0 * M_PI * j / boundary_samples);
    double s = defining(p);
    if (s > rep.worst_defining_value) {
      rep.worst_defining_value = s;
      rep.witness = p;
    }
  }
  int n = std::max(8, boundary_samples / 8);
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (int j = 0; j < 64; ++j) {
    Vec2 p = dom.boundary(2.0 * M_PI * j / 64);
    lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
  }
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      Vec2 p{lo.x + (hi.x - lo.x) * i / n, lo.y + (hi.y - lo.y) * j / n};
      if (!dom.contains(p)) continue;
      double s = defining(p);
      if (s > rep.worst_defining_value) {
        rep.worst_defining_value = s;
        rep.witness = p;
      }
    }
  rep.omega_contained = rep.worst_defining_value <= 1e-9;
  return rep;
}

// Boundary point of the comparison set along a ray from y(t) (an interior
// point of the set by construction), by bisection on the defining function.
inline Vec2 sublevel_boundary_point(const Barrier& b, double t, Vec2 direction) {
  double sgn = b.sign == BarrierSign::lower ? 1.0 : -1.0;
  Vec2 origin = b.y(t);
  auto defining = [&](double s) {
    Vec2 x = origin + s * direction;
    double affine = b.g_at_xo(t) + dot(b.affine_slope(t), x - b.x_o);
    return sgn * (b.eval(x, t) - affine);
  };
  double hi = 1.0;
  int guard = 0;
  while (defining(hi) <= 0.0 && guard++ < 80) hi *= 1.5;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (defining(mid) <= 0.0 ? lo : hi) = mid;
  }
  return origin + 0.5 * (lo + hi) * direction;
}

}  // namespace lipflow
