#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lipflow/barrier.hpp"

using namespace lipflow;

namespace {

struct RotatingScenario {
  ConvexDomain dom = disk_domain({0, 0}, 1.0);
  ConvexIntegrand f = quadratic_integrand();
  BoundaryDatum data;
  SlopeCertificate cert;

  RotatingScenario() {
    data = rotating_datum(dom, 1.0, 1.0, M_PI);
    cert = widen_slopes(certify_tbsc(data, dom, {-1.0, 0.0}, 65, 256), data, dom);
  }
};

}  // namespace

TEST_CASE("alpha_min: worked scenario gives 3, static data reduce to n", "[barrier]") {
  RotatingScenario s;
  // n=2, eps=1, diam=2, |D^2 f|=1, Qdot ~ 1, |dt g| = 1 -> max{2, 2+1} = 3
  CHECK(alpha_min(s.f, s.dom, s.data, s.cert) == Catch::Approx(3.0).margin(1e-3));

  auto cst = constant_datum(s.dom, 0.7, 1.0);
  auto cert0 = widen_slopes(certify_tbsc(cst, s.dom, {-1.0, 0.0}, 9, 128), cst, s.dom);
  CHECK(alpha_min(s.f, s.dom, cst, cert0) == Catch::Approx(2.0).margin(1e-9));

  // doubling diam doubles the product term
  auto dom2 = disk_domain({0, 0}, 2.0);
  auto data2 = rotating_datum(dom2, 1.0, 1.0, M_PI);
  auto cert2 = widen_slopes(certify_tbsc(data2, dom2, {-2.0, 0.0}, 65, 256), data2, dom2);
  double product2 = dom2.diam * s.f.hess_sup * cert2.Qdot / s.f.epsilon;
  CHECK(product2 == Catch::Approx(2.0 * 2.0).margin(5e-3));
  CHECK(alpha_min(s.f, dom2, data2, cert2) ==
        Catch::Approx(product2 + data2.dt_g_sup).margin(1e-9));
}

TEST_CASE("select_parameters: worked scenario closed forms", "[barrier]") {
  RotatingScenario s;
  double alpha = 2.0;
  auto params = select_parameters(s.f, s.dom, s.data, s.cert, alpha);

  // |grad f*| = |eta| > R/eps + Q1 = 2: the sweep lands just above 2
  CHECK(params.M >= 2.0);
  CHECK(params.M <= 2.8);

  // Gamma = max (n/alpha) f*((alpha/n) x) + Q1 |x| = M^2/2 + M for the
  // quadratic at alpha = 2 (radial maximum at |x| = M)
  CHECK(params.Gamma == Catch::Approx(0.5 * params.M * params.M + params.M).margin(1e-9));

  // B(t, eta) >= Gamma needs |eta|^2/2 - |eta| >= Gamma
  double need = 1.0 + std::sqrt(1.0 + 2.0 * params.Gamma);
  CHECK(params.rho0 >= need - 1e-9);
  CHECK(params.rho0 <= 1.3 * need);

  // z_lambda(t) = (2/alpha)((cos t, sin t) + lambda (-1, 0));
  // min_t |z_lambda| = (2/alpha)(lambda - 1) must clear rho0
  CHECK((2.0 / alpha) * (params.lambda - 1.0) >= params.rho0 - 1e-9);
  for (double t : {0.0, 1.0, 2.5}) {
    Vec2 z = (2.0 / alpha) * (Vec2{std::cos(t), std::sin(t)} + params.lambda * Vec2{-1.0, 0.0});
    double closed = (2.0 / alpha) *
                    std::sqrt(params.lambda * params.lambda - 2.0 * params.lambda * std::cos(t) + 1.0);
    CHECK(norm(z) == Catch::Approx(closed).margin(1e-12));
    CHECK(norm(z) >= params.rho0 - 1e-9);
  }

  // spec'd spot value: at M = 2.5, Q1 = 1 the closed form gives 5.625
  CHECK(0.5 * 2.5 * 2.5 + 2.5 == Catch::Approx(5.625));
}

TEST_CASE("rotating_disk_barrier: explicit formulas at alpha = 2", "[barrier]") {
  auto b = rotating_disk_barrier(2.0);
  for (int k = 0; k <= 64; ++k) {
    double t = M_PI * k / 64;
    Vec2 y{1.0 - std::cos(t), -std::sin(t)};
    CHECK(norm(b.y(t) - y) <= 1e-15);
    CHECK(b.c(t) == Catch::Approx(2.5 - std::cos(t)).margin(1e-15));
  }
  // v(x_o, 0) = |(-1,0)-(0,0)|^2/2 - 1.5 = -1 = g(x_o, 0)
  CHECK(b.eval({-1.0, 0.0}, 0.0) == Catch::Approx(-1.0).margin(1e-15));
}

TEST_CASE("verify: worked barrier at alpha = 2 meets all budgets", "[barrier]") {
  RotatingScenario s;
  auto b = rotating_disk_barrier(2.0);
  auto rep = verify(b, s.f, s.dom, s.data, 64, 128);
  CHECK(rep.pin_err <= 1e-12);
  CHECK(rep.ordering_viol <= 1e-10);
  CHECK(rep.divergence_err <= 1e-6);
  CHECK(rep.subsol_viol <= 1e-10);  // dt v - div <= 1 - 2 < 0
  CHECK(rep.lip_const <= 3.0 + 1e-9);
  CHECK(rep.dt_max <= 1.0 + 1e-9);
}

TEST_CASE("verify: alpha below the threshold fails the sub-solution claim", "[barrier]") {
  RotatingScenario s;
  auto b = rotating_disk_barrier(0.5);
  auto rep = verify(b, s.f, s.dom, s.data, 64, 128);
  CHECK(rep.pin_err <= 1e-12);         // pinning is alpha-independent
  CHECK(rep.ordering_viol <= 1e-10);   // so is the ordering
  CHECK(rep.subsol_viol > 0.4);        // max dt v = 1 > alpha = 0.5
}

TEST_CASE("pipeline barrier reproduces the claims (not the representatives)", "[barrier]") {
  RotatingScenario s;
  double alpha = 3.0;  // >= alpha_o, so the sub-solution claim is guaranteed
  auto b = build(s.f, s.dom, s.data, s.cert, alpha, BarrierSign::lower);
  auto rep = verify(b, s.f, s.dom, s.data, 48, 64);
  CHECK(rep.pin_err <= 1e-10);
  CHECK(rep.ordering_viol <= 1e-9);
  CHECK(rep.subsol_viol <= 1e-6);
  CHECK(rep.lip_const <= b.lip_budget + 1e-8);
  CHECK(rep.dt_max <= b.dt_budget + 1e-2);  // dt by finite differences

  // the pipeline picks a different (y, c) than the worked catalog entry
  auto cat = rotating_disk_barrier(alpha);
  CHECK(norm(b.y(0.5) - cat.y(0.5)) > 1e-3);
}

TEST_CASE("upper barrier mirrors the lower one", "[barrier]") {
  RotatingScenario s;
  auto b = build(s.f, s.dom, s.data, s.cert, -2.0, BarrierSign::upper);
  auto rep = verify(b, s.f, s.dom, s.data, 48, 64);
  CHECK(rep.pin_err <= 1e-10);
  CHECK(rep.ordering_viol <= 1e-9);  // v >= g throughout
  CHECK(rep.lip_const <= b.lip_budget + 1e-8);

  auto b3 = build(s.f, s.dom, s.data, s.cert, -3.0, BarrierSign::upper);
  auto rep3 = verify(b3, s.f, s.dom, s.data, 48, 64);
  CHECK(rep3.subsol_viol <= 1e-6);  // super-solution at |alpha| >= alpha_o
}

TEST_CASE("sublevel geometry: the worked set is the ball B_{1+2/alpha}((2/alpha,0))",
          "[barrier]") {
  RotatingScenario s;
  for (double alpha : {2.0, 50.0}) {
    auto b = rotating_disk_barrier(alpha);
    for (double t : {0.0, M_PI / 4, 2.0}) {
      auto rep = sublevel_geometry(b, s.dom, t, 256);
      CHECK(rep.x_o_on_boundary);
      CHECK(rep.omega_contained);

      Vec2 center{2.0 / alpha, 0.0};
      double radius = 1.0 + 2.0 / alpha;
      for (int j = 0; j < 256; ++j) {
        double th = 2.0 * M_PI * j / 256;
        Vec2 p = center + radius * Vec2{std::cos(th), std::sin(th)};
        double affine = b.g_at_xo(t) + dot(b.affine_slope(t), p - b.x_o);
        CHECK(std::abs(b.eval(p, t) - affine) <= 1e-9);
      }
      // ray-traced boundary agrees with the closed form
      for (double th : {0.3, 2.0, 4.4}) {
        Vec2 q = sublevel_boundary_point(b, t, {std::cos(th), std::sin(th)});
        CHECK(norm(q - center) == Catch::Approx(radius).margin(1e-9));
      }
    }
  }
}

TEST_CASE("sublevel boundary curvature stays below 1/R", "[barrier]") {
  RotatingScenario s;
  auto b = build(s.f, s.dom, s.data, s.cert, 3.0, BarrierSign::lower);
  double t = 0.7;
  // circumradius of nearby boundary triples bounds the curvature radius
  for (double th : {0.0, 1.3, 3.9}) {
    Vec2 p0 = sublevel_boundary_point(b, t, {std::cos(th - 0.02), std::sin(th - 0.02)});
    Vec2 p1 = sublevel_boundary_point(b, t, {std::cos(th), std::sin(th)});
    Vec2 p2 = sublevel_boundary_point(b, t, {std::cos(th + 0.02), std::sin(th + 0.02)});
    double a = norm(p1 - p0), bb = norm(p2 - p1), cc = norm(p2 - p0);
    double area = 0.5 * std::abs(cross(p1 - p0, p2 - p0));
    double circumradius = a * bb * cc / (4.0 * area);
    CHECK(circumradius >= s.dom.R * (1.0 - 1e-3));
  }
}
