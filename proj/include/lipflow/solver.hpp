#pragma once

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "lipflow/boundary.hpp"
#include "lipflow/error.hpp"
#include "lipflow/integrand.hpp"
#include "lipflow/mesh.hpp"
#include "lipflow/mollify.hpp"

namespace lipflow {

struct SolverConfig {
  double h = 0.1;  // time step; T/h must be an integer
  double L = 1.0;  // gradient constraint
  const Mesh* mesh = nullptr;
  const ConvexIntegrand* integrand = nullptr;
  const BoundaryDatum* data = nullptr;
  double inner_tol = 1e-10;
  int inner_max_iter = 50000;
  enum class ConstraintMode { projection, penalty };
  ConstraintMode constraint_mode = ConstraintMode::projection;

  int steps() const {
    double ell = data->T / h;
    if (std::abs(ell - std::round(ell)) > 1e-9 * std::max(1.0, ell))
      throw InfeasibleConstraint("SolverConfig: h must divide T");
    return int(std::round(ell));
  }
};

// Discrete trajectory u_0..u_l with the piecewise-constant and the linearly
// interpolated time readings.
struct Trajectory {
  std::vector<double> times;
  std::vector<Field> steps;
  std::vector<double> energies;    // integral of f(grad u_i)
  std::vector<double> increments;  // (1/2h) ||u_i - u_{i-1}||^2, increments[0] = 0
  const Mesh* mesh = nullptr;
  double h = 0.0;

  int last_index() const { return int(steps.size()) - 1; }

  // u^{(h)}(t) = u_i for t in ((i-1) h, i h]
  const Field& piecewise_constant(double t) const {
    int i = int(std::ceil(t / h - 1e-12));
    i = std::clamp(i, 0, last_index());
    return steps[i];
  }

  Field interpolant(double t) const {
    if (t <= 0.0) return steps.front();
    int i = std::clamp(int(std::ceil(t / h - 1e-12)), 1, last_index());
    double lam = (t - (i - 1) * h) / h;
    Field out(steps[i].size());
    for (size_t k = 0; k < out.size(); ++k)
      out[k] = (1.0 - lam) * steps[i - 1][k] + lam * steps[i][k];
    return out;
  }
};

namespace detail {

inline double integrand_energy(const Mesh& mesh, const ConvexIntegrand& f, const Field& v) {
  double e = 0.0;
  for (int t = 0; t < mesh.n_elements(); ++t)
    e += mesh.element_measures[t] * f.eval(mesh.element_gradient(v, t));
  return e;
}

// Max |grad f| over the closed ball of the given radius (sampled).
inline double max_grad_norm(const ConvexIntegrand& f, double radius, int dirs = 64,
                            int radii = 8) {
  double m = 0.0;
  for (int i = 1; i <= radii; ++i) {
    double r = radius * i / radii;
    for (int j = 0; j < dirs; ++j) {
      double th = 2.0 * M_PI * j / dirs;
      m = std::max(m, norm(f.grad({r * std::cos(th), r * std::sin(th)})));
    }
  }
  return m;
}

inline double curvature_bound(const ConvexIntegrand& f, double radius) {
  double m = f.epsilon;
  for (int i = 1; i <= 8; ++i) {
    double r = radius * i / 8.0;
    for (int j = 0; j < 16; ++j) {
      double th = 2.0 * M_PI * j / 16;
      m = std::max(m, sym_spectral_norm(symmetrized(hessian_of(f, {r * std::cos(th), r * std::sin(th)}))));
    }
  }
  return m;
}

// Largest eigenvalue of the P1 stiffness operator by power iteration.
inline double stiffness_lambda_max(const Mesh& mesh) {
  int n = mesh.n_vertices();
  Field w(n), Kw(n);
  for (int i = 0; i < n; ++i) w[i] = std::sin(0.7 * i + 0.3) + 0.01;
  double lam = 1.0;
  for (int it = 0; it < 40; ++it) {
    std::fill(Kw.begin(), Kw.end(), 0.0);
    for (int t = 0; t < mesh.n_elements(); ++t) {
      Vec2 p = mesh.element_gradient(w, t);
      const auto& s = mesh.simplices[t];
      const auto& g = mesh.gradient_operators[t];
      for (int k = 0; k < 3; ++k) Kw[s[k]] += mesh.element_measures[t] * dot(p, g[k]);
    }
    double nrm = 0.0;
    for (double x : Kw) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm < 1e-300) break;
    lam = nrm;
    for (int i = 0; i < n; ++i) w[i] = Kw[i] / nrm;
  }
  return lam;
}

// Exact Euclidean projection of the nodal values of one element onto
// { |grad v| <= L }, moving free nodes only. The least-norm nodal correction
// for a gradient target reduces to a 2x2 metric, and the constrained target
// solves a scalar secular equation.
struct ElementProjector {
  const Mesh* mesh;
  const std::vector<char>* fixed;
  double L;

  // returns false if the element cannot be made feasible
  bool project(Field& v, int t, double tol) const {
    const auto& s = mesh->simplices[t];
    const auto& b = mesh->gradient_operators[t];
    Vec2 p = mesh->element_gradient(v, t);
    if (norm(p) <= L * (1.0 + tol)) return true;

    int free_idx[3];
    int nf = 0;
    for (int k = 0; k < 3; ++k)
      if (!(*fixed)[s[k]]) free_idx[nf++] = k;
    if (nf == 0) return false;

    if (nf == 1) {
      Vec2 d = b[free_idx[0]];
      // |p + delta d|^2 = L^2, smallest |delta|
      double A = norm2(d), B = 2.0 * dot(p, d), C = norm2(p) - L * L;
      double disc = B * B - 4 * A * C;
      if (disc < 0.0) return false;
      double r1 = (-B + std::sqrt(disc)) / (2 * A), r2 = (-B - std::sqrt(disc)) / (2 * A);
      double delta = std::abs(r1) < std::abs(r2) ? r1 : r2;
      v[s[free_idx[0]]] += delta;
      return true;
    }

    // Gram of the free directions; W = G^{-1} is the metric of least-norm
    // corrections in gradient space.
    Mat2 G{0, 0, 0, 0};
    for (int k = 0; k < nf; ++k) G = G + outer(b[free_idx[k]], b[free_idx[k]]);
    // eigen-decomposition of G (symmetric 2x2)
    auto [lmin, lmax] = sym_eigenvalues(G);
    Vec2 e1, e2;
    if (std::abs(G.a12) > 1e-300) {
      e1 = normalized({G.a12, lmin - G.a11});
    } else {
      e1 = (G.a11 <= G.a22) ? Vec2{1, 0} : Vec2{0, 1};
    }
    e2 = perp(e1);
    double p1 = dot(p, e1), p2 = dot(p, e2);
    // minimize (g - p)^T G^{-1} (g - p) s.t. |g| = L:
    // in the eigenbasis g_i = p_i * w_i / (w_i + mu), w_i = 1/lambda_i
    double w1 = 1.0 / lmin, w2 = 1.0 / lmax;
    auto glen = [&](double mu) {
      double g1 = p1 * w1 / (w1 + mu), g2 = p2 * w2 / (w2 + mu);
      return std::sqrt(g1 * g1 + g2 * g2);
    };
    double lo = 0.0, hi = std::max(w1, w2) * (norm(p) / L);
    while (glen(hi) > L) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (glen(mid) > L ? lo : hi) = mid;
    }
    double mu = 0.5 * (lo + hi);
    Vec2 g = (p1 * w1 / (w1 + mu)) * e1 + (p2 * w2 / (w2 + mu)) * e2;
    double gn = norm(g);
    if (gn > 0.0) g = (L / gn) * g;  // land exactly on the ball
    Vec2 dg = g - p;
    Vec2 y;
    if (!solve2x2(G, dg, y)) return false;
    for (int k = 0; k < nf; ++k) v[s[free_idx[k]]] += dot(b[free_idx[k]], y);
    return true;
  }
};

// Dykstra alternating projections onto the per-element gradient balls.
// Returns the max relative violation after the sweeps.
inline double project_constraint(Field& v, const Mesh& mesh, const std::vector<char>& fixed,
                                 double L, int max_sweeps = 50, double tol = 1e-10) {
  ElementProjector proj{&mesh, &fixed, L};
  std::unordered_map<int, std::array<double, 3>> memory;

  double viol = 0.0;
  for (int t = 0; t < mesh.n_elements(); ++t)
    viol = std::max(viol, norm(mesh.element_gradient(v, t)) / L - 1.0);
  if (viol <= tol) return viol;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int t = 0; t < mesh.n_elements(); ++t) {
      const auto& s = mesh.simplices[t];
      auto it = memory.find(t);
      bool near = norm(mesh.element_gradient(v, t)) > L * (1.0 - 1e-12);
      if (it == memory.end() && !near) continue;
      std::array<double, 3> mem = it != memory.end() ? it->second : std::array<double, 3>{0, 0, 0};
      double before[3];
      for (int k = 0; k < 3; ++k) {
        v[s[k]] += mem[k];
        before[k] = v[s[k]];
      }
      if (!proj.project(v, t, 0.0))
        throw InfeasibleConstraint("project_constraint: element with fixed vertices infeasible");
      std::array<double, 3> newmem;
      bool nonzero = false;
      for (int k = 0; k < 3; ++k) {
        newmem[k] = before[k] - v[s[k]];
        if (std::abs(newmem[k]) > 0.0) nonzero = true;
      }
      if (nonzero) memory[t] = newmem;
      else if (it != memory.end()) memory.erase(t);
    }
    viol = 0.0;
    for (int t = 0; t < mesh.n_elements(); ++t)
      viol = std::max(viol, norm(mesh.element_gradient(v, t)) / L - 1.0);
    if (viol <= tol) break;
  }
  return viol;
}

struct StepObjective {
  const Mesh* mesh;
  const ConvexIntegrand* f;
  const Field* u_prev;
  double h;
  double penalty_mu = 0.0;
  double L = 0.0;

  double value(const Field& v) const {
    double e = integrand_energy(*mesh, *f, v);
    for (int i = 0; i < mesh->n_vertices(); ++i) {
      double d = v[i] - (*u_prev)[i];
      e += mesh->lumped_mass[i] * d * d / (2.0 * h);
    }
    if (penalty_mu > 0.0) {
      for (int t = 0; t < mesh->n_elements(); ++t) {
        double ex = std::max(0.0, norm2(mesh->element_gradient(v, t)) - L * L);
        e += penalty_mu * ex * ex;
      }
    }
    return e;
  }

  void gradient(const Field& v, Field& g, const std::vector<char>& fixed) const {
    g.assign(v.size(), 0.0);
    for (int t = 0; t < mesh->n_elements(); ++t) {
      Vec2 p = mesh->element_gradient(v, t);
      Vec2 q = f->grad(p);
      if (penalty_mu > 0.0) {
        double ex = std::max(0.0, norm2(p) - L * L);
        if (ex > 0.0) q += (penalty_mu / mesh->element_measures[t]) * (4.0 * ex) * p;
      }
      const auto& s = mesh->simplices[t];
      const auto& b = mesh->gradient_operators[t];
      for (int k = 0; k < 3; ++k) g[s[k]] += mesh->element_measures[t] * dot(q, b[k]);
    }
    for (int i = 0; i < mesh->n_vertices(); ++i)
      g[i] += mesh->lumped_mass[i] * (v[i] - (*u_prev)[i]) / h;
    for (size_t i = 0; i < v.size(); ++i)
      if (fixed[i]) g[i] = 0.0;
  }
};

}  // namespace detail

// One minimizing-movements step: minimizes  int f(grad v) + 1/(2h) |v - u_prev|^2
// over piecewise-linear v with v = g_i at boundary vertices and per-element
// |grad v| <= L. Accelerated projected gradient with function-value restart;
// the returned iterate satisfies the projected-gradient fixed-point residual
// bound inner_tol.
inline Field step(const Field& u_prev, const Field& g_i, const SolverConfig& cfg) {
  const Mesh& mesh = *cfg.mesh;
  const ConvexIntegrand& f = *cfg.integrand;
  std::vector<char> fixed(mesh.is_boundary.begin(), mesh.is_boundary.end());

  // admissibility of the boundary interpolant itself
  for (int t = 0; t < mesh.n_elements(); ++t)
    if (norm(mesh.element_gradient(g_i, t)) > cfg.L * (1.0 + 1e-9))
      throw InfeasibleConstraint("step: boundary interpolant violates the gradient bound");

  detail::StepObjective obj{&mesh, &f, &u_prev, cfg.h, 0.0, cfg.L};
  const bool penalty = cfg.constraint_mode == SolverConfig::ConstraintMode::penalty;

  // gradient Lipschitz estimate: curvature of f on the active range times
  // the stiffness spectrum plus the proximal diagonal
  double curvature = detail::curvature_bound(f, cfg.L + 1.0);
  double lam_K = detail::stiffness_lambda_max(mesh);
  double mass_over_h = 0.0;
  for (double m : mesh.lumped_mass) mass_over_h = std::max(mass_over_h, m / cfg.h);

  Field v = u_prev;
  // start from an admissible point: boundary row forced to g_i
  for (int i = 0; i < mesh.n_vertices(); ++i)
    if (fixed[i]) v[i] = g_i[i];
  detail::project_constraint(v, mesh, fixed, cfg.L, 2000, 1e-13);

  double mu = penalty ? 1.0 : 0.0;
  for (int continuation = 0;; ++continuation) {
    obj.penalty_mu = mu;
    double step_L = curvature * lam_K + mass_over_h +
                    (penalty ? 16.0 * mu * cfg.L * cfg.L * lam_K : 0.0);
    double tau = 1.0 / step_L;

    const double tau0 = tau;
    Field y = v, vnew(v.size()), grad(v.size());
    double theta = 1.0;
    double fv = obj.value(v);
    double residual = std::numeric_limits<double>::infinity();
    int blocked = 0;
    bool converged = false;

    auto project = [&](Field& w, double tol) {
      if (!penalty) detail::project_constraint(w, mesh, fixed, cfg.L, 2000, tol);
    };

    for (int it = 0; it < cfg.inner_max_iter && !converged; ++it) {
      obj.gradient(y, grad, fixed);
      for (size_t i = 0; i < v.size(); ++i) vnew[i] = y[i] - tau * grad[i];
      project(vnew, 1e-13);
      double fnew = obj.value(vnew);

      if (fnew > fv + 1e-12 * (1.0 + std::abs(fv))) {
        // the accelerated candidate overshot: fall back to the plain
        // projected-gradient step from the current iterate
        obj.gradient(v, grad, fixed);
        for (size_t i = 0; i < v.size(); ++i) vnew[i] = v[i] - tau * grad[i];
        project(vnew, 1e-13);
        residual = 0.0;
        for (size_t i = 0; i < v.size(); ++i)
          residual = std::max(residual, std::abs(vnew[i] - v[i]));
        residual /= tau;
        fnew = obj.value(vnew);
        if (residual <= cfg.inner_tol) {
          if (fnew <= fv) v = vnew;
          converged = true;
          break;
        }
        if (fnew > fv + 1e-9 * (1.0 + std::abs(fv))) {
          // a genuine overshoot: the curvature estimate was too low
          tau *= 0.5;
          if (tau < 1e-4 * tau0) {
            tau = tau0;
            if (++blocked >= 3)
              throw InnerNonConvergence("step: descent blocked above inner_tol");
          }
        } else {
          // accept: with tau below the curvature bound the plain step is
          // monotone up to evaluation noise, which this branch absorbs
          std::swap(v, vnew);
          fv = fnew;
        }
        y = v;
        theta = 1.0;
        continue;
      }

      residual = 0.0;
      for (size_t i = 0; i < v.size(); ++i)
        residual = std::max(residual, std::abs(vnew[i] - y[i]));
      residual /= tau;
      tau = std::min(tau0, 1.25 * tau);
      double theta_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      double beta = (theta - 1.0) / theta_new;
      for (size_t i = 0; i < v.size(); ++i) y[i] = vnew[i] + beta * (vnew[i] - v[i]);
      std::swap(v, vnew);
      fv = fnew;
      theta = theta_new;
      if (residual <= cfg.inner_tol) converged = true;
    }
    if (!converged)
      throw InnerNonConvergence("step: projected-gradient residual stalled above inner_tol");

    if (!penalty) break;
    double viol = 0.0;
    for (int t = 0; t < mesh.n_elements(); ++t)
      viol = std::max(viol, norm(mesh.element_gradient(v, t)) - cfg.L);
    if (viol <= 1e-8 || mu > 1e12) {
      detail::project_constraint(v, mesh, fixed, cfg.L, 500, 1e-10);
      break;
    }
    mu *= 2.0;
  }

  if (!penalty) detail::project_constraint(v, mesh, fixed, cfg.L, 500, 1e-10);
  return v;
}

// Runs the full scheme from u_0 = interpolant of g_o.
inline Trajectory solve(const SolverConfig& cfg) {
  const Mesh& mesh = *cfg.mesh;
  const BoundaryDatum& data = *cfg.data;
  int ell = cfg.steps();

  if (!(cfg.L > std::max(data.grad_g_sup,
                         discrete_lipschitz(interpolate(mesh, data.g0), mesh)) - 1e-12))
    throw InfeasibleConstraint("solve: L must exceed the gradient bound of the data");

  Trajectory traj;
  traj.mesh = &mesh;
  traj.h = cfg.h;
  traj.times.push_back(0.0);
  traj.steps.push_back(interpolate(mesh, data.g0));
  traj.energies.push_back(detail::integrand_energy(mesh, *cfg.integrand, traj.steps[0]));
  traj.increments.push_back(0.0);

  for (int i = 1; i <= ell; ++i) {
    double t = i * cfg.h;
    Field gi = interpolate(mesh, [&](Vec2 p) { return data.g(p, t); });
    Field ui;
    try {
      ui = step(traj.steps.back(), gi, cfg);
    } catch (InfeasibleConstraint& e) {
      throw InfeasibleConstraint("solve: step " + std::to_string(i) + ": " + e.what());
    } catch (InnerNonConvergence& e) {
      throw InnerNonConvergence("solve: step " + std::to_string(i) + ": " + e.what());
    }
    traj.times.push_back(t);
    traj.energies.push_back(detail::integrand_energy(mesh, *cfg.integrand, ui));
    double inc = 0.0;
    for (int k = 0; k < mesh.n_vertices(); ++k) {
      double d = ui[k] - traj.steps.back()[k];
      inc += mesh.lumped_mass[k] * d * d;
    }
    traj.increments.push_back(inc / (2.0 * cfg.h));
    traj.steps.push_back(std::move(ui));
  }
  return traj;
}

struct EnergyReport {
  struct Row {
    int i;
    double energy;
    double increment;
    double data_term;
  };
  std::vector<Row> rows;
  std::vector<double> cumulative_lhs;  // E(u_l') + summed increments
  std::vector<double> cumulative_rhs;  // E(u_0) + summed data terms
  double K = 0.0;           // sup of |grad f| on the widened ball
  double worst_slack = 0.0; // min over l' of rhs - lhs
  int worst_index = 0;
};

// Telescoped energy estimate: for every l',
//   E(u_l') + sum increments <= E(u_0) + iint [ |dt g|^2/2 + K |dt grad g| ].
// A violation beyond tol signals an inner-solver failure.
inline EnergyReport energy_report(const Trajectory& traj, const SolverConfig& cfg,
                                  double tol = 1e-7) {
  const Mesh& mesh = *traj.mesh;
  const BoundaryDatum& data = *cfg.data;
  EnergyReport rep;
  rep.K = detail::max_grad_norm(*cfg.integrand, cfg.L + data.dt_grad_sup);

  int ell = traj.last_index();
  std::vector<double> data_terms(ell + 1, 0.0);
  static const std::array<double, 4> xs = {-0.8611363115940526, -0.3399810435848563,
                                           0.3399810435848563, 0.8611363115940526};
  static const std::array<double, 4> ws = {0.3478548451374538, 0.6521451548625461,
                                           0.6521451548625461, 0.3478548451374538};
  for (int i = 1; i <= ell; ++i) {
    double a = (i - 1) * traj.h, b = i * traj.h;
    double acc = 0.0;
    for (int q = 0; q < 4; ++q) {
      double t = 0.5 * (a + b) + 0.5 * (b - a) * xs[q];
      double w = 0.5 * (b - a) * ws[q];
      Field dtg = interpolate(mesh, [&](Vec2 p) { return data.dt_g(p, t); });
      double space = 0.0;
      for (int k = 0; k < mesh.n_vertices(); ++k)
        space += 0.5 * mesh.lumped_mass[k] * dtg[k] * dtg[k];
      for (int e = 0; e < mesh.n_elements(); ++e)
        space += rep.K * mesh.element_measures[e] * norm(mesh.element_gradient(dtg, e));
      acc += w * space;
    }
    data_terms[i] = acc;
  }

  rep.worst_slack = std::numeric_limits<double>::infinity();
  double cum_inc = 0.0, cum_data = 0.0;
  for (int i = 0; i <= ell; ++i) {
    cum_inc += traj.increments[i];
    cum_data += data_terms[i];
    rep.rows.push_back({i, traj.energies[i], traj.increments[i], data_terms[i]});
    rep.cumulative_lhs.push_back(traj.energies[i] + cum_inc);
    rep.cumulative_rhs.push_back(traj.energies[0] + cum_data);
    double slack = rep.cumulative_rhs.back() - rep.cumulative_lhs.back();
    if (slack < rep.worst_slack) {
      rep.worst_slack = slack;
      rep.worst_index = i;
    }
  }
  if (rep.worst_slack < -tol)
    throw EstimateViolated("energy_report: telescoped estimate violated", rep.worst_index);
  return rep;
}

// rhs - lhs of the discrete variational inequality for the comparison map v
// at time tau, with u read as the piecewise-constant trajectory:
//   sum_{i <= K} h ( F_i[v_i] - F_i[u_i] )  +  1/2 ||v(0) - g_o||^2,
// F_i the per-step functional. Testing each slice against the step
// minimality telescopes the inequality, so a nonnegative return (>= -tol,
// inner-solver error budget) certifies it for this (v, tau). The comparison
// map must carry the boundary values of g and respect the gradient bound at
// every grid time.
inline double vi_residual(const Trajectory& traj, const TimeSeriesField& v, double tau,
                          const SolverConfig& cfg) {
  const Mesh& mesh = *traj.mesh;
  const BoundaryDatum& data = *cfg.data;
  if (v.n_nodes() != mesh.n_vertices() || v.n_steps() != int(traj.steps.size()))
    throw GridMismatch("vi_residual: comparison map grid mismatch");

  for (int k = 0; k < v.n_steps(); ++k) {
    double t = traj.times[k];
    for (int i : mesh.boundary_vertices) {
      double gv = data.g(mesh.vertices[i], t);
      if (std::abs(v.values[k][i] - gv) > 1e-8 * (1.0 + std::abs(gv)))
        throw BoundaryMismatch("vi_residual: v != g at a boundary vertex");
    }
    if (discrete_lipschitz(v.values[k], mesh) > cfg.L * (1.0 + 1e-9))
      throw InfeasibleConstraint("vi_residual: comparison map violates the gradient bound");
  }

  int K = std::clamp(int(std::round(tau / traj.h)), 0, traj.last_index());
  double lhs = 0.0, rhs = 0.0;
  for (int i = 1; i <= K; ++i) {
    lhs += traj.h * traj.energies[i];
    rhs += traj.h * detail::integrand_energy(mesh, *cfg.integrand, v.values[i]);
    for (int n = 0; n < mesh.n_vertices(); ++n) {
      double dv = v.values[i][n] - traj.steps[i - 1][n];
      double du = traj.steps[i][n] - traj.steps[i - 1][n];
      rhs += 0.5 * mesh.lumped_mass[n] * (dv * dv - du * du);
    }
  }
  Field g0 = interpolate(mesh, data.g0);
  for (int n = 0; n < mesh.n_vertices(); ++n) {
    double d0 = v.values[0][n] - g0[n];
    rhs += 0.5 * mesh.lumped_mass[n] * d0 * d0;
  }
  return rhs - lhs;
}

// (1/delta) int_0^delta ||g - u||^2 dt with delta = 4h: the initial-datum
// attainment diagnostic; shrinks proportionally to delta under refinement.
inline double initial_attainment(const Trajectory& traj, const SolverConfig& cfg) {
  const Mesh& mesh = *traj.mesh;
  const BoundaryDatum& data = *cfg.data;
  int m = std::min(4, traj.last_index());
  double delta = m * traj.h;
  if (m == 0) return 0.0;
  static const std::array<double, 4> xs = {-0.8611363115940526, -0.3399810435848563,
                                           0.3399810435848563, 0.8611363115940526};
  static const std::array<double, 4> ws = {0.3478548451374538, 0.6521451548625461,
                                           0.6521451548625461, 0.3478548451374538};
  double acc = 0.0;
  for (int i = 1; i <= m; ++i) {
    double a = (i - 1) * traj.h, b = i * traj.h;
    for (int q = 0; q < 4; ++q) {
      double t = 0.5 * (a + b) + 0.5 * (b - a) * xs[q];
      double w = 0.5 * (b - a) * ws[q];
      Field gt = interpolate(mesh, [&](Vec2 p) { return data.g(p, t); });
      double space = 0.0;
      for (int n = 0; n < mesh.n_vertices(); ++n) {
        double d = gt[n] - traj.steps[i][n];
        space += mesh.lumped_mass[n] * d * d;
      }
      acc += w * space;
    }
  }
  return acc / delta;
}

}  // namespace lipflow
