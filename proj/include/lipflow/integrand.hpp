#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lipflow/error.hpp"
#include "lipflow/vec.hpp"

namespace lipflow {

// Convex integrand f: R^2 -> R, convex everywhere and, outside the unit
// ball, C^{1,1} with D^2 f >= epsilon (uniform convexity constant).
// hess may be empty; finite differences of grad are used instead.
// analytic_conjugate / analytic_grad_conjugate short-circuit the numeric
// maximization when a closed form is known.
struct ConvexIntegrand {
  std::function<double(Vec2)> eval;
  std::function<Vec2(Vec2)> grad;
  std::function<Mat2(Vec2)> hess;
  double epsilon = 1.0;
  double hess_sup = 1.0;  // ||D^2 f||_{L^inf} outside the unit ball
  std::function<double(Vec2)> analytic_conjugate;
  std::function<Vec2(Vec2)> analytic_grad_conjugate;
  std::optional<double> smoothness_radius;  // radius r beyond which f* is C^{1,1}
  std::string name;
};

namespace detail {

inline Mat2 fd_hessian(const std::function<Vec2(Vec2)>& grad, Vec2 xi, double step) {
  Vec2 ex{step, 0.0}, ey{0.0, step};
  Vec2 gxp = grad(xi + ex), gxm = grad(xi - ex);
  Vec2 gyp = grad(xi + ey), gym = grad(xi - ey);
  Mat2 H{(gxp.x - gxm.x) / (2 * step), (gyp.x - gym.x) / (2 * step),
         (gxp.y - gxm.y) / (2 * step), (gyp.y - gym.y) / (2 * step)};
  return symmetrized(H);
}

inline Mat2 fd_hessian_from_eval(const std::function<double(Vec2)>& f, Vec2 xi, double step) {
  double f0 = f(xi);
  Vec2 ex{step, 0.0}, ey{0.0, step};
  double fxx = (f(xi + ex) - 2 * f0 + f(xi - ex)) / (step * step);
  double fyy = (f(xi + ey) - 2 * f0 + f(xi - ey)) / (step * step);
  double fxy = (f(xi + ex + ey) - f(xi + ex - ey) - f(xi - ex + ey) + f(xi - ex - ey)) /
               (4 * step * step);
  return {fxx, fxy, fxy, fyy};
}

inline Mat2 hessian_of(const ConvexIntegrand& f, Vec2 xi) {
  if (f.hess) return f.hess(xi);
  double step = 1e-4 * std::max(1.0, norm(xi));
  if (f.grad) return fd_hessian(f.grad, xi, step);
  return fd_hessian_from_eval(f.eval, xi, step);
}

// Maximizes phi(xi) = eta.xi - f(xi) by damped Newton with a golden-section
// radial fallback. The objective is strictly concave outside B_1 by (A2).
struct ConjugateResult {
  Vec2 maximizer;
  double value;
  bool converged;
};

inline ConjugateResult maximize_conjugate(const ConvexIntegrand& f, Vec2 eta,
                                          double search_radius) {
  auto phi = [&](Vec2 xi) { return dot(eta, xi) - f.eval(xi); };
  auto phi_grad = [&](Vec2 xi) { return eta - f.grad(xi); };

  const double tol = 1e-10 * std::max(1.0, norm(eta));
  Vec2 xi = eta;  // exact for f = |.|^2/2, a sane scale otherwise
  if (norm(xi) > 0.9 * search_radius) xi = (0.5 * search_radius / norm(xi)) * xi;
  double best_val = phi(xi);
  Vec2 best_xi = xi;

  bool converged = false;
  for (int it = 0; it < 80; ++it) {
    Vec2 g = phi_grad(xi);
    if (norm(g) <= tol) { converged = true; break; }
    Mat2 H = hessian_of(f, xi);
    Vec2 d;
    if (!solve2x2(H, g, d) || dot(d, g) <= 0.0) {
      d = (1.0 / std::max(f.epsilon, 1e-8)) * g;  // gradient ascent fallback step
    }
    double t = 1.0;
    double base = phi(xi);
    Vec2 cand = xi + d;
    while (t > 1e-14 && (norm(cand) > search_radius || phi(cand) < base + 0.25 * t * dot(g, d))) {
      t *= 0.5;
      cand = xi + t * d;
    }
    if (t <= 1e-14) break;
    xi = cand;
    double val = phi(xi);
    if (val > best_val) { best_val = val; best_xi = xi; }
  }

  if (!converged) {
    // Golden-section along the radial direction, then gradient polish.
    Vec2 dir = norm(eta) > 0 ? normalized(eta) : Vec2{1.0, 0.0};
    double a = 0.0, b = search_radius;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = phi(c1 * dir), f2 = phi(c2 * dir);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * std::max(1.0, b); ++it) {
      if (f1 < f2) {
        a = c1; c1 = c2; f1 = f2;
        c2 = a + gr * (b - a); f2 = phi(c2 * dir);
      } else {
        b = c2; c2 = c1; f2 = f1;
        c1 = b - gr * (b - a); f1 = phi(c1 * dir);
      }
    }
    xi = 0.5 * (a + b) * dir;
    if (phi(xi) > best_val) { best_val = phi(xi); best_xi = xi; }
    // Barzilai-Borwein ascent from the best point found so far.
    xi = best_xi;
    Vec2 g = phi_grad(xi);
    double step = 1.0 / std::max(f.epsilon, 1e-8);
    for (int it = 0; it < 500 && norm(g) > tol; ++it) {
      Vec2 cand = xi + step * g;
      if (norm(cand) > search_radius) cand = (search_radius / norm(cand)) * cand;
      if (phi(cand) <= phi(xi)) { step *= 0.5; if (step < 1e-16) break; continue; }
      Vec2 gnew = phi_grad(cand);
      Vec2 dx = cand - xi, dg = gnew - g;
      double denom = -dot(dx, dg);
      step = denom > 0 ? norm2(dx) / denom : step * 2.0;
      xi = cand; g = gnew;
      if (phi(xi) > best_val) { best_val = phi(xi); best_xi = xi; }
    }
    converged = norm(phi_grad(best_xi)) <= 1e3 * tol;
  }

  return {best_xi, best_val, converged};
}

inline double default_search_radius(const ConvexIntegrand& f, Vec2 eta) {
  // |xi*| <= |eta|/eps + O(1) by uniform convexity outside B_1.
  return 10.0 * (1.0 + norm(eta) / std::max(f.epsilon, 1e-8));
}

}  // namespace detail

// Legendre-Fenchel conjugate f*(eta) = sup_xi { eta.xi - f(xi) }.
inline double conjugate(const ConvexIntegrand& f, Vec2 eta, double search_radius = 0.0) {
  if (f.analytic_conjugate) return f.analytic_conjugate(eta);
  if (search_radius <= 0.0) search_radius = detail::default_search_radius(f, eta);
  auto res = detail::maximize_conjugate(f, eta, search_radius);
  if (norm(res.maximizer) >= 0.995 * search_radius)
    throw MaximizerOnBoundary("conjugate: maximizer hit the search boundary");
  if (!res.converged) throw NonConvergence("conjugate: inner maximizer did not converge");
  return res.value;
}

// Maximizer of eta.xi - f(xi); equals grad f*(eta) and inverts grad f.
inline Vec2 grad_conjugate(const ConvexIntegrand& f, Vec2 eta, double search_radius = 0.0) {
  if (f.analytic_grad_conjugate) return f.analytic_grad_conjugate(eta);
  if (search_radius <= 0.0) search_radius = detail::default_search_radius(f, eta);
  auto res = detail::maximize_conjugate(f, eta, search_radius);
  if (norm(res.maximizer) >= 0.995 * search_radius)
    throw MaximizerOnBoundary("grad_conjugate: maximizer hit the search boundary");
  if (!res.converged) throw NonConvergence("grad_conjugate: inner maximizer did not converge");
  if (f.grad && norm(f.grad(res.maximizer) - eta) > 1e-6 * std::max(1.0, norm(eta)))
    throw IdentityViolation("grad_conjugate: grad f(xi*) != eta beyond tolerance");
  return res.maximizer;
}

struct ConvexityReport {
  double min_eigenvalue = 0.0;
  Vec2 witness;
  bool pass = false;
};

// Samples the Hessian quadratic form on 1 < |xi| <= sample_radius and reports
// the smallest eigenvalue found; passes iff it stays above epsilon - tol.
inline ConvexityReport check_uniform_convexity(const ConvexIntegrand& f, int samples,
                                               double sample_radius = 3.0,
                                               double tol = 1e-6) {
  ConvexityReport rep;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  int n_r = std::max(2, samples);
  int n_th = std::max(8, samples);
  for (int i = 1; i <= n_r; ++i) {
    double r = 1.0 + (sample_radius - 1.0) * i / n_r;
    for (int j = 0; j < n_th; ++j) {
      double th = 2.0 * M_PI * j / n_th;
      Vec2 xi{r * std::cos(th), r * std::sin(th)};
      Mat2 H = detail::hessian_of(f, xi);
      double lam = sym_eigenvalues(symmetrized(H)).first;
      if (lam < rep.min_eigenvalue) {
        rep.min_eigenvalue = lam;
        rep.witness = xi;
      }
    }
  }
  rep.pass = rep.min_eigenvalue >= f.epsilon - tol;
  return rep;
}

struct GrowthReport {
  double quadratic_upper_c = 0.0;   // smallest sampled c with f* <= (2/eps)|eta|^2 + c
  double smoothness_radius_r = 0.0; // estimated radius beyond which f* is C^{1,1}
  double conj_hess_bound = 0.0;     // max sampled |D^2 f*| outside that radius
};

// Estimates the conjugate growth constants and stores the smoothness radius
// on the integrand. The radius is an estimate, not a certificate: it is the
// first sampled radius beyond which finite-difference D^2 f* entries are
// stable to 1e-3 under step halving and bounded by 1/eps + tol.
inline GrowthReport conjugate_growth_report(ConvexIntegrand& f, double eta_radius = 5.0,
                                            int radial_samples = 24, int dir_samples = 16) {
  GrowthReport rep;

  auto fstar = [&](Vec2 eta) { return conjugate(f, eta); };
  auto gstar = [&](Vec2 eta) { return grad_conjugate(f, eta); };

  // Geometric radial grid so the small-|eta| region is resolved.
  std::vector<double> radii;
  for (int i = 0; i < 2 * radial_samples; ++i)
    radii.push_back(eta_radius * std::pow(1e-3, 1.0 - double(i) / (2 * radial_samples - 1)));

  double c = -std::numeric_limits<double>::infinity();
  {
    double v0 = fstar({0.0, 0.0});
    if (!std::isfinite(v0)) throw GrowthViolation("conjugate_growth_report: f* not finite");
    c = v0;
  }
  for (double r : radii) {
    for (int j = 0; j < dir_samples; ++j) {
      double th = 2.0 * M_PI * j / dir_samples;
      Vec2 eta{r * std::cos(th), r * std::sin(th)};
      double v = fstar(eta);
      if (!std::isfinite(v)) throw GrowthViolation("conjugate_growth_report: f* not finite");
      c = std::max(c, v - (2.0 / f.epsilon) * norm2(eta));
    }
  }
  rep.quadratic_upper_c = c;
  std::vector<bool> stable(radii.size(), false);
  std::vector<double> hnorm(radii.size(), 0.0);
  for (size_t i = 0; i < radii.size(); ++i) {
    bool ok = true;
    double worst = 0.0;
    for (int j = 0; j < dir_samples && ok; ++j) {
      double th = 2.0 * M_PI * j / dir_samples;
      Vec2 eta{radii[i] * std::cos(th), radii[i] * std::sin(th)};
      double step = 1e-3 * std::max(1.0, norm(eta));
      Mat2 H1 = detail::fd_hessian(gstar, eta, step);
      Mat2 H2 = detail::fd_hessian(gstar, eta, 0.5 * step);
      double drift = std::max({std::abs(H1.a11 - H2.a11), std::abs(H1.a12 - H2.a12),
                               std::abs(H1.a22 - H2.a22)});
      double nrm = sym_spectral_norm(H2);
      worst = std::max(worst, nrm);
      if (drift > 1e-3 || nrm > 1.0 / f.epsilon + 1e-3) ok = false;
    }
    stable[i] = ok;
    hnorm[i] = worst;
  }
  size_t first = radii.size();
  for (size_t i = radii.size(); i-- > 0;) {
    if (!stable[i]) break;
    first = i;
  }
  if (first == radii.size())
    throw NonConvergence("conjugate_growth_report: no stable smoothness radius found");
  rep.smoothness_radius_r = radii[first];
  rep.conj_hess_bound = *std::max_element(hnorm.begin() + first, hnorm.end());
  f.smoothness_radius = rep.smoothness_radius_r;
  return rep;
}

// --- built-in catalog ------------------------------------------------------

inline ConvexIntegrand quadratic_integrand(bool with_analytic = true) {
  ConvexIntegrand f;
  f.name = "quadratic";
  f.eval = [](Vec2 xi) { return 0.5 * norm2(xi); };
  f.grad = [](Vec2 xi) { return xi; };
  f.hess = [](Vec2) { return identity2(); };
  f.epsilon = 1.0;
  f.hess_sup = 1.0;
  if (with_analytic) {
    f.analytic_conjugate = [](Vec2 eta) { return 0.5 * norm2(eta); };
    f.analytic_grad_conjugate = [](Vec2 eta) { return eta; };
  }
  return f;
}

// f = |xi|^4/4. Uniformly convex outside B_1 with eps = 1; the Hessian is
// unbounded at infinity, so hess_sup refers to the stated working radius.
inline ConvexIntegrand quartic_integrand(bool with_analytic = true, double working_radius = 6.0) {
  ConvexIntegrand f;
  f.name = "quartic";
  f.eval = [](Vec2 xi) { return 0.25 * norm2(xi) * norm2(xi); };
  f.grad = [](Vec2 xi) { return norm2(xi) * xi; };
  f.hess = [](Vec2 xi) { return norm2(xi) * identity2() + 2.0 * outer(xi, xi); };
  f.epsilon = 1.0;
  f.hess_sup = 3.0 * working_radius * working_radius;
  if (with_analytic) {
    f.analytic_conjugate = [](Vec2 eta) { return 0.75 * std::pow(norm2(eta), 2.0 / 3.0); };
    f.analytic_grad_conjugate = [](Vec2 eta) {
      double n = norm(eta);
      return n > 0 ? std::pow(n, -2.0 / 3.0) * eta : Vec2{0.0, 0.0};
    };
  }
  return f;
}

// f = |xi|^2/2 + max(0, |xi|-1)^2: C^1 everywhere, C^{1,1} and uniformly
// convex outside B_1, with a second-derivative jump across |xi| = 1.
inline ConvexIntegrand ring_integrand() {
  ConvexIntegrand f;
  f.name = "ring";
  f.eval = [](Vec2 xi) {
    double m = std::max(0.0, norm(xi) - 1.0);
    return 0.5 * norm2(xi) + m * m;
  };
  f.grad = [](Vec2 xi) {
    double n = norm(xi);
    if (n <= 1.0 || n == 0.0) return xi;
    return xi + (2.0 * (n - 1.0) / n) * xi;
  };
  f.hess = [](Vec2 xi) {
    double n = norm(xi);
    if (n <= 1.0) return identity2();
    Mat2 P = outer(xi / n, xi / n);
    Mat2 T = identity2() + (-1.0) * P;
    return identity2() + 2.0 * P + (2.0 * (n - 1.0) / n) * T;
  };
  f.epsilon = 1.0;
  f.hess_sup = 3.0;
  return f;
}

}  // namespace lipflow
