#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "lipflow/error.hpp"
#include "lipflow/geometry.hpp"
#include "lipflow/vec.hpp"

namespace lipflow {

// Nodal values of a continuous piecewise-linear function on a mesh.
using Field = std::vector<double>;

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> simplices;
  std::vector<int> boundary_vertices;
  std::vector<char> is_boundary;  // per-vertex flag
  std::vector<double> element_measures;
  std::vector<std::array<Vec2, 3>> gradient_operators;  // grad of each nodal basis
  std::vector<double> lumped_mass;
  double min_angle_deg = 0.0;
  double max_edge = 0.0;

  int n_vertices() const { return int(vertices.size()); }
  int n_elements() const { return int(simplices.size()); }
  double area() const {
    double a = 0.0;
    for (double m : element_measures) a += m;
    return a;
  }

  Vec2 element_gradient(const Field& v, int t) const {
    const auto& s = simplices[t];
    const auto& g = gradient_operators[t];
    return v[s[0]] * g[0] + v[s[1]] * g[1] + v[s[2]] * g[2];
  }
};

inline Field interpolate(const Mesh& mesh, const std::function<double(Vec2)>& fn) {
  Field v(mesh.vertices.size());
  for (size_t i = 0; i < mesh.vertices.size(); ++i) v[i] = fn(mesh.vertices[i]);
  return v;
}

// Lipschitz constant of the piecewise-linear interpolant (max element
// gradient norm; they coincide on a convex mesh).
inline double discrete_lipschitz(const Field& v, const Mesh& mesh) {
  double lip = 0.0;
  for (int t = 0; t < mesh.n_elements(); ++t) lip = std::max(lip, norm(mesh.element_gradient(v, t)));
  return lip;
}

inline double lumped_l2_norm2(const Mesh& mesh, const Field& v) {
  double s = 0.0;
  for (size_t i = 0; i < v.size(); ++i) s += mesh.lumped_mass[i] * v[i] * v[i];
  return s;
}

namespace detail {

struct Lcg {
  std::uint64_t state;
  explicit Lcg(std::uint64_t seed) : state(seed * 6364136223846793005ull + 1442695040888963407ull) {}
  double uniform() {  // in [-1, 1)
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return 2.0 * (double((state >> 11) & ((1ull << 53) - 1)) / double(1ull << 53)) - 1.0;
  }
};

inline long double incircle_det(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
  long double ax = a.x - p.x, ay = a.y - p.y;
  long double bx = b.x - p.x, by = b.y - p.y;
  long double cx = c.x - p.x, cy = c.y - p.y;
  long double a2 = ax * ax + ay * ay;
  long double b2 = bx * bx + by * by;
  long double c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

// Strict in-circumcircle test with a relative tolerance: exactly cocircular
// points (every boundary sample of a disk) count as outside, which keeps the
// cavity consistent without exact predicates.
inline bool strictly_in_circle(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
  long double det = incircle_det(a, b, c, p);
  double m = std::max({norm(a - p), norm(b - p), norm(c - p)});
  long double tol = 1e-10L * (long double)(m * m) * (long double)(m * m);
  return det > tol;
}

// Incremental Bowyer-Watson Delaunay triangulation. The cavity is grown by
// a BFS from the triangle containing the point, so near-degenerate incircle
// ties cannot produce a disconnected cavity.
inline std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& pts) {
  double span = 0.0;
  for (const Vec2& p : pts) span = std::max({span, std::abs(p.x), std::abs(p.y)});
  span = std::max(span, 1.0);

  std::vector<Vec2> v = pts;
  int n = int(pts.size());
  v.push_back({-40.0 * span, -40.0 * span});
  v.push_back({40.0 * span, -40.0 * span});
  v.push_back({0.0, 40.0 * span});

  std::vector<std::array<int, 3>> tris = {{n, n + 1, n + 2}};
  std::vector<char> alive = {1};

  auto edge_key = [n](int a, int b) {
    long long lo = std::min(a, b), hi = std::max(a, b);
    return lo * (n + 3) + hi;
  };

  for (int ip = 0; ip < n; ++ip) {
    // adjacency over alive triangles
    std::unordered_map<long long, std::pair<int, int>> adj;
    adj.reserve(4 * tris.size());
    for (int t = 0; t < int(tris.size()); ++t) {
      if (!alive[t]) continue;
      for (int k = 0; k < 3; ++k) {
        long long key = edge_key(tris[t][k], tris[t][(k + 1) % 3]);
        auto it = adj.find(key);
        if (it == adj.end()) adj[key] = {t, -1};
        else it->second.second = t;
      }
    }

    // locate: triangle with the largest minimal barycentric coordinate
    int t0 = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < int(tris.size()); ++t) {
      if (!alive[t]) continue;
      Vec2 a = v[tris[t][0]], b = v[tris[t][1]], c = v[tris[t][2]];
      double twice = cross(b - a, c - a);
      if (std::abs(twice) < 1e-300) continue;
      double l0 = cross(b - v[ip], c - v[ip]) / twice;
      double l1 = cross(c - v[ip], a - v[ip]) / twice;
      double l2 = cross(a - v[ip], b - v[ip]) / twice;
      double m = std::min({l0, l1, l2});
      if (m > best) { best = m; t0 = t; }
    }

    // cavity by BFS across edges
    std::vector<int> cavity = {t0};
    std::vector<char> in_cavity(tris.size(), 0);
    in_cavity[t0] = 1;
    for (size_t q = 0; q < cavity.size(); ++q) {
      int t = cavity[q];
      for (int k = 0; k < 3; ++k) {
        auto pr = adj[edge_key(tris[t][k], tris[t][(k + 1) % 3])];
        int s = (pr.first == t) ? pr.second : pr.first;
        if (s < 0 || in_cavity[s] || !alive[s]) continue;
        if (strictly_in_circle(v[tris[s][0]], v[tris[s][1]], v[tris[s][2]], v[ip])) {
          in_cavity[s] = 1;
          cavity.push_back(s);
        }
      }
    }

    // fan the point against the oriented cavity boundary
    for (int t : cavity) alive[t] = 0;
    for (int t : cavity) {
      for (int k = 0; k < 3; ++k) {
        int a = tris[t][k], b = tris[t][(k + 1) % 3];
        auto pr = adj[edge_key(a, b)];
        int s = (pr.first == t) ? pr.second : pr.first;
        if (s >= 0 && in_cavity[s]) continue;
        tris.push_back({a, b, ip});  // (a,b) CCW in t, p inside the cavity
        alive.push_back(1);
      }
    }
    in_cavity.resize(tris.size(), 0);
  }

  std::vector<std::array<int, 3>> out;
  for (size_t t = 0; t < tris.size(); ++t) {
    if (!alive[t]) continue;
    auto [a, b, c] = tris[t];
    if (a >= n || b >= n || c >= n) continue;
    out.push_back(tris[t]);
  }
  return out;
}

inline double point_polyline_distance(Vec2 p, const std::vector<Vec2>& poly) {
  double best = std::numeric_limits<double>::infinity();
  int n = int(poly.size());
  for (int i = 0; i < n; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % n];
    Vec2 ab = b - a;
    double t = std::clamp(dot(p - a, ab) / std::max(norm2(ab), 1e-300), 0.0, 1.0);
    best = std::min(best, norm(p - (a + t * ab)));
  }
  return best;
}

inline double triangle_min_angle_deg(Vec2 a, Vec2 b, Vec2 c) {
  double la = norm(c - b), lb = norm(a - c), lc = norm(b - a);
  auto angle = [](double opp, double s1, double s2) {
    double cosv = std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0);
    return std::acos(cosv) * 180.0 / M_PI;
  };
  return std::min({angle(la, lb, lc), angle(lb, lc, la), angle(lc, la, lb)});
}

inline Mesh build_mesh_attempt(const ConvexDomain& dom, double target_edge, unsigned seed) {
  // boundary polygon, spaced by arc length
  double per = boundary_perimeter(dom);
  int nb = std::max(8, int(std::ceil(per / target_edge)));
  std::vector<Vec2> pts;
  {
    int fine = 64 * nb;
    std::vector<double> cum(fine + 1, 0.0);
    std::vector<Vec2> fine_pts(fine + 1);
    for (int i = 0; i <= fine; ++i) fine_pts[i] = dom.boundary(2.0 * M_PI * i / fine);
    for (int i = 1; i <= fine; ++i) cum[i] = cum[i - 1] + norm(fine_pts[i] - fine_pts[i - 1]);
    int k = 0;
    for (int j = 0; j < nb; ++j) {
      double s = cum[fine] * j / nb;
      while (k < fine && cum[k + 1] < s) ++k;
      pts.push_back(fine_pts[k]);
    }
  }
  std::vector<Vec2> poly = pts;  // inscribed polygon; convex by domain convexity
  int n_boundary = int(pts.size());

  // interior points on a jittered hex lattice, kept away from the boundary
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (const Vec2& p : poly) {
    lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
  }
  Lcg rng(seed + 1);
  double spacing = 0.85 * target_edge;
  double dy = spacing * std::sqrt(3.0) / 2.0;
  int row = 0;
  for (double y = lo.y + 0.5 * dy; y < hi.y; y += dy, ++row) {
    double x0 = lo.x + (row % 2 == 0 ? 0.5 : 1.0) * 0.5 * spacing;
    for (double x = x0; x < hi.x; x += spacing) {
      Vec2 p{x + 0.07 * spacing * rng.uniform(), y + 0.07 * spacing * rng.uniform()};
      if (!dom.contains(p)) continue;
      if (point_polyline_distance(p, poly) < 0.45 * target_edge) continue;
      pts.push_back(p);
    }
  }

  Mesh mesh;
  mesh.vertices = pts;
  mesh.simplices = delaunay(pts);
  mesh.is_boundary.assign(pts.size(), 0);
  for (int i = 0; i < n_boundary; ++i) {
    mesh.is_boundary[i] = 1;
    mesh.boundary_vertices.push_back(i);
  }

  mesh.min_angle_deg = 180.0;
  mesh.lumped_mass.assign(pts.size(), 0.0);
  for (auto& s : mesh.simplices) {
    Vec2 a = pts[s[0]], b = pts[s[1]], c = pts[s[2]];
    double twice = cross(b - a, c - a);
    if (twice < 0) { std::swap(s[1], s[2]); std::swap(b, c); twice = -twice; }
    double area = 0.5 * twice;
    mesh.element_measures.push_back(area);
    // grad of barycentric basis: rotate opposite edge by 90 degrees / (2*area)
    std::array<Vec2, 3> g;
    g[0] = perp(c - b) / twice;
    g[1] = perp(a - c) / twice;
    g[2] = perp(b - a) / twice;
    mesh.gradient_operators.push_back(g);
    for (int k = 0; k < 3; ++k) mesh.lumped_mass[s[k]] += area / 3.0;
    mesh.min_angle_deg = std::min(mesh.min_angle_deg, triangle_min_angle_deg(a, b, c));
    mesh.max_edge = std::max({mesh.max_edge, norm(b - a), norm(c - b), norm(a - c)});
  }
  return mesh;
}

}  // namespace detail

// Conforming triangulation of a polygonal approximation inscribed in the
// domain. Boundary vertices lie exactly on the analytic boundary; interior
// lattice points carry a small seeded jitter (the only use of the seed).
inline Mesh mesh_domain(const ConvexDomain& dom, double target_edge, unsigned seed = 0) {
  if (!(target_edge < dom.diam / 4.0))
    throw MeshFailure("mesh_domain: target_edge must be below diam/4");
  Mesh best;
  for (unsigned attempt = 0; attempt < 3; ++attempt) {
    Mesh m = detail::build_mesh_attempt(dom, target_edge, seed + 1000 * attempt);
    if (attempt == 0 || m.min_angle_deg > best.min_angle_deg) best = std::move(m);
    if (best.min_angle_deg >= 15.0) break;
  }
  if (best.min_angle_deg < 15.0)
    throw MeshFailure("mesh_domain: could not reach 15 degree element quality");
  return best;
}

}  // namespace lipflow
