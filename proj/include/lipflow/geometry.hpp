#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "lipflow/error.hpp"
#include "lipflow/vec.hpp"

namespace lipflow {

// Bounded convex spatial domain with a parametrized boundary sampler and
// outward unit normals. R is the uniform-convexity radius: every boundary
// point admits an enclosing ball of radius R tangent at that point,
// quantified by R nu_{x_o} . (x - x_o) <= -|x - x_o|^2 / 2.
struct ConvexDomain {
  std::function<Vec2(double)> boundary;  // parameter in [0, 2*pi)
  double R = 1.0;
  double diam = 2.0;
  std::function<bool(Vec2)> contains;
  std::function<Vec2(Vec2)> normal;  // boundary point -> unit outward normal
  std::string name;
};

struct DomainReport {
  double worst_slack = 0.0;
  Vec2 worst_xo, worst_x;
  bool pass = false;
};

// Samples boundary pairs and reports the maximum violation of the defining
// inequality of R-uniform convexity. Pass iff worst slack <= 1e-8.
inline DomainReport check_domain(const ConvexDomain& dom, int n_samples) {
  DomainReport rep;
  rep.worst_slack = -std::numeric_limits<double>::infinity();
  std::vector<Vec2> pts(n_samples);
  std::vector<Vec2> nus(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    pts[i] = dom.boundary(2.0 * M_PI * i / n_samples);
    nus[i] = dom.normal(pts[i]);
  }
  for (int i = 0; i < n_samples; ++i) {
    for (int j = 0; j < n_samples; ++j) {
      if (i == j) continue;
      Vec2 d = pts[j] - pts[i];
      double slack = dom.R * dot(nus[i], d) + 0.5 * norm2(d);
      if (slack > rep.worst_slack) {
        rep.worst_slack = slack;
        rep.worst_xo = pts[i];
        rep.worst_x = pts[j];
      }
    }
  }
  rep.pass = rep.worst_slack <= 1e-8;
  return rep;
}

inline ConvexDomain disk_domain(Vec2 center, double radius, double R = 0.0) {
  ConvexDomain dom;
  dom.name = "disk";
  dom.R = R > 0.0 ? R : radius;
  dom.diam = 2.0 * radius;
  dom.boundary = [=](double th) {
    return Vec2{center.x + radius * std::cos(th), center.y + radius * std::sin(th)};
  };
  dom.contains = [=](Vec2 p) { return norm(p - center) <= radius + 1e-12; };
  dom.normal = [=](Vec2 p) { return normalized(p - center); };
  return dom;
}

inline ConvexDomain ellipse_domain(double a, double b, double R = 0.0) {
  ConvexDomain dom;
  dom.name = "ellipse";
  // minimal admissible R equals the largest curvature radius
  dom.R = R > 0.0 ? R : std::max(a * a / b, b * b / a);
  dom.diam = 2.0 * std::max(a, b);
  dom.boundary = [=](double th) { return Vec2{a * std::cos(th), b * std::sin(th)}; };
  dom.contains = [=](Vec2 p) {
    return p.x * p.x / (a * a) + p.y * p.y / (b * b) <= 1.0 + 1e-12;
  };
  dom.normal = [=](Vec2 p) { return normalized({p.x / (a * a), p.y / (b * b)}); };
  return dom;
}

// Axis-aligned square centered at the origin. Not uniformly convex; exists
// to exercise the failure paths of check_domain and the CLI.
inline ConvexDomain square_domain(double side) {
  ConvexDomain dom;
  dom.name = "square";
  double h = 0.5 * side;
  dom.R = side;  // nominal; check_domain fails for every R
  dom.diam = side * std::sqrt(2.0);
  dom.boundary = [=](double th) {
    double s = 4.0 * th / (2.0 * M_PI);  // perimeter parameter in [0,4)
    int edge = int(s) % 4;
    double u = s - std::floor(s);
    switch (edge) {
      case 0: return Vec2{-h + side * u, -h};
      case 1: return Vec2{h, -h + side * u};
      case 2: return Vec2{h - side * u, h};
      default: return Vec2{-h, h - side * u};
    }
  };
  dom.contains = [=](Vec2 p) {
    return std::abs(p.x) <= h + 1e-12 && std::abs(p.y) <= h + 1e-12;
  };
  dom.normal = [=](Vec2 p) {
    double dx = h - std::abs(p.x), dy = h - std::abs(p.y);
    if (dx <= dy) return Vec2{p.x >= 0 ? 1.0 : -1.0, 0.0};
    return Vec2{0.0, p.y >= 0 ? 1.0 : -1.0};
  };
  return dom;
}

// Numeric perimeter of the boundary curve.
inline double boundary_perimeter(const ConvexDomain& dom, int n = 4096) {
  double per = 0.0;
  Vec2 prev = dom.boundary(0.0);
  for (int i = 1; i <= n; ++i) {
    Vec2 p = dom.boundary(2.0 * M_PI * i / n);
    per += norm(p - prev);
    prev = p;
  }
  return per;
}

}  // namespace lipflow
