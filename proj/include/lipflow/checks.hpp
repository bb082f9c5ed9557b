#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "lipflow/barrier.hpp"
#include "lipflow/solver.hpp"

namespace lipflow {

namespace detail {

inline void require_same_grid(const Trajectory& a, const Trajectory& b) {
  if (a.mesh != b.mesh || a.steps.size() != b.steps.size() ||
      std::abs(a.h - b.h) > 1e-12 * std::max(1.0, a.h))
    throw GridMismatch("trajectories live on different meshes or time grids");
}

}  // namespace detail

struct ComparisonReport {
  double max_violation = 0.0;  // max of (u_sub - u_super) over all nodes and steps
  double tolerance = 0.0;
  bool pass = false;
};

// Discrete comparison principle: with ordered boundary/initial data the
// sub-solution stays below, up to inner-solver and interpolation error.
inline ComparisonReport comparison_test(const Trajectory& sub, const Trajectory& super,
                                        double inner_tol = 1e-10) {
  detail::require_same_grid(sub, super);
  ComparisonReport rep;
  rep.tolerance = 1e-6 + 10.0 * inner_tol;
  rep.max_violation = -1e300;
  for (size_t i = 0; i < sub.steps.size(); ++i)
    for (size_t k = 0; k < sub.steps[i].size(); ++k)
      rep.max_violation = std::max(rep.max_violation, sub.steps[i][k] - super.steps[i][k]);
  rep.pass = rep.max_violation <= rep.tolerance;
  return rep;
}

struct MaxPrincipleReport {
  double interior_sup = 0.0;  // sup of (u - u~) over interior nodes, t > 0
  double boundary_sup = 0.0;  // sup over the parabolic boundary
  bool pass = false;
};

inline MaxPrincipleReport max_principle_test(const Trajectory& sub, const Trajectory& super,
                                             double tol = 1e-6) {
  detail::require_same_grid(sub, super);
  const Mesh& mesh = *sub.mesh;
  MaxPrincipleReport rep;
  rep.interior_sup = -1e300;
  rep.boundary_sup = -1e300;
  for (int k = 0; k < mesh.n_vertices(); ++k)
    rep.boundary_sup = std::max(rep.boundary_sup, sub.steps[0][k] - super.steps[0][k]);
  for (size_t i = 1; i < sub.steps.size(); ++i) {
    for (int k = 0; k < mesh.n_vertices(); ++k) {
      double d = sub.steps[i][k] - super.steps[i][k];
      if (mesh.is_boundary[k]) rep.boundary_sup = std::max(rep.boundary_sup, d);
      else rep.interior_sup = std::max(rep.interior_sup, d);
    }
  }
  rep.pass = rep.interior_sup <= rep.boundary_sup + tol;
  return rep;
}

struct LipschitzReport {
  double computed_C = 0.0;  // max over steps of the discrete Lipschitz constant
  double bound = 0.0;       // max{ barrier budgets, |grad g_o| }
  bool constraint_active = false;
};

// Quantitative gradient bound: the trajectory's Lipschitz constant against
// the barrier budgets. When L exceeds the bound the gradient constraint is
// expected to sleep, which is the mechanism that removes it.
inline LipschitzReport lipschitz_certificate(
    const Trajectory& traj, const std::vector<std::pair<Barrier, Barrier>>& barriers,
    const BoundaryDatum& data, double L, double tol = 1e-6) {
  const Mesh& mesh = *traj.mesh;
  LipschitzReport rep;
  for (const auto& u : traj.steps)
    rep.computed_C = std::max(rep.computed_C, discrete_lipschitz(u, mesh));
  double budget = 0.0;
  for (const auto& [lo, hi] : barriers)
    budget = std::max({budget, lo.lip_budget, hi.lip_budget});
  Field g0 = interpolate(mesh, data.g0);
  rep.bound = std::max(budget, discrete_lipschitz(g0, mesh));
  rep.constraint_active = rep.computed_C >= L - tol;
  return rep;
}

// Certified barrier pairs at boundary points sampled uniformly in the
// boundary parameter; |alpha| is raised to alpha_min when needed.
inline std::vector<std::pair<Barrier, Barrier>> barrier_pairs(
    const ConvexIntegrand& f, const ConvexDomain& dom, const BoundaryDatum& data, double alpha,
    int n_points = 16, int time_samples = 33, int boundary_samples = 128) {
  std::vector<std::pair<Barrier, Barrier>> out;
  for (int j = 0; j < n_points; ++j) {
    Vec2 x_o = dom.boundary(2.0 * M_PI * j / n_points);
    auto cert =
        widen_slopes(certify_tbsc(data, dom, x_o, time_samples, boundary_samples), data, dom);
    double a = std::max(alpha, alpha_min(f, dom, data, cert));
    out.emplace_back(build(f, dom, data, cert, a, BarrierSign::lower),
                     build(f, dom, data, cert, -a, BarrierSign::upper));
  }
  return out;
}

struct HolderReport {
  double space_lip = 0.0;
  double time_half_holder = 0.0;  // max |u(x,t)-u(x,s)| / sqrt(|t-s|)
};

// Diagnostic quotients only; the parabolic regularity statement itself is
// not asserted.
inline HolderReport holder_quotient(const Trajectory& traj) {
  const Mesh& mesh = *traj.mesh;
  HolderReport rep;
  for (const auto& u : traj.steps)
    rep.space_lip = std::max(rep.space_lip, discrete_lipschitz(u, mesh));
  int ell = traj.last_index();
  for (int i = 0; i <= ell; ++i)
    for (int j = i + 1; j <= ell; ++j) {
      double dt = (j - i) * traj.h;
      for (int k = 0; k < mesh.n_vertices(); ++k) {
        double q = std::abs(traj.steps[j][k] - traj.steps[i][k]) / std::sqrt(dt);
        rep.time_half_holder = std::max(rep.time_half_holder, q);
      }
    }
  return rep;
}

}  // namespace lipflow
