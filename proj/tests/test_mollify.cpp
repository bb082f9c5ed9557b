#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "lipflow/mollify.hpp"

using namespace lipflow;

namespace {

std::vector<double> uniform_times(double T, int n) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = T * i / n;
  return t;
}

}  // namespace

TEST_CASE("mollify: constants are fixed points", "[mollify]") {
  auto times = uniform_times(2.0, 37);
  TimeSeriesField v = scalar_series(times, std::vector<double>(times.size(), 3.25), 3.25);
  for (double h : {0.05, 0.5, 2.0}) {
    auto w = mollify(v, h);
    for (const auto& f : w.values) CHECK(f[0] == Catch::Approx(3.25).margin(1e-14));
  }
}

TEST_CASE("mollify: v(t) = t has the closed form t - h(1 - e^{-t/h})", "[mollify]") {
  auto times = uniform_times(1.0, 16);
  std::vector<double> vals(times.begin(), times.end());
  auto w = mollify(scalar_series(times, vals, 0.0), 0.5);
  for (size_t k = 0; k < times.size(); ++k) {
    double t = times[k];
    double exact = t - 0.5 * (1.0 - std::exp(-t / 0.5));
    CHECK(w.values[k][0] == Catch::Approx(exact).margin(1e-13));
  }
  CHECK(w.values.back()[0] == Catch::Approx(0.56766764161830635).margin(1e-10));
  CHECK(w.values.front()[0] == 0.0);
}

TEST_CASE("mollify: ODE identity d/dt [v]_h = (v - [v]_h)/h", "[mollify]") {
  auto times = uniform_times(2.0, 64);
  std::vector<double> vals;
  for (double t : times) vals.push_back(std::sin(t));
  auto v = scalar_series(times, vals, 0.0);
  double h = 0.3;
  auto w = mollify(v, h);
  auto d = mollify_time_derivative(v, h);
  for (size_t k = 0; k < times.size(); ++k) {
    double residual = d.values[k][0] - (vals[k] - w.values[k][0]) / h;
    CHECK(std::abs(residual) <= 1e-8);
  }
}

TEST_CASE("mollifier norm bound: pure-initial equality case", "[mollify]") {
  auto times = uniform_times(1.0, 40);
  auto v = scalar_series(times, std::vector<double>(times.size(), 0.0), 2.0);
  for (double r : {1.0, 2.0}) {
    auto rep = mollifier_norm_check(v, 0.3, r, 1.0);
    CHECK(rep.pass);
    CHECK(rep.lhs == Catch::Approx(rep.rhs).margin(1e-8));
  }
  auto repi = mollifier_norm_check(v, 0.3, std::numeric_limits<double>::infinity(), 1.0);
  CHECK(repi.pass);
  CHECK(repi.lhs == Catch::Approx(repi.rhs).margin(1e-12));  // bracket = 1
}

TEST_CASE("mollifier norm bound: zero initial contracts", "[mollify]") {
  auto times = uniform_times(3.0, 60);
  std::vector<double> vals;
  for (double t : times) vals.push_back(std::cos(2.0 * t) + 0.3 * t);
  auto v = scalar_series(times, vals, vals[0]);
  v.initial = Field{0.0};
  for (double r : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    auto rep = mollifier_norm_check(v, 0.4, r, 3.0);
    CHECK(rep.pass);
    CHECK(rep.lhs <= rep.rhs + 1e-10);
  }
}

TEST_CASE("mollify_time_derivative examples", "[mollify]") {
  auto times = uniform_times(1.5, 32);

  // v(t) = t with v_o = 0: derivative of the mollification is 1 - e^{-t/h}
  std::vector<double> ramp(times.begin(), times.end());
  auto d = mollify_time_derivative(scalar_series(times, ramp, 0.0), 0.25);
  for (size_t k = 0; k < times.size(); ++k)
    CHECK(d.values[k][0] == Catch::Approx(1.0 - std::exp(-times[k] / 0.25)).margin(1e-12));

  // constants have zero derivative
  auto d0 = mollify_time_derivative(
      scalar_series(times, std::vector<double>(times.size(), 7.0), 7.0), 0.25);
  for (const auto& f : d0.values) CHECK(f[0] == 0.0);

  // discrete L2 contraction for sin with strict ratio < 1
  std::vector<double> vals;
  for (double t : times) vals.push_back(std::sin(3.0 * t));
  auto ds = mollify_time_derivative(scalar_series(times, vals, 0.0), 0.2);
  double num = 0.0, den = 0.0;
  for (size_t k = 0; k + 1 < times.size(); ++k) {
    double dt = times[k + 1] - times[k];
    double c = (vals[k + 1] - vals[k]) / dt;
    num += dt * ds.values[k + 1][0] * ds.values[k + 1][0];
    den += dt * c * c;
  }
  CHECK(num < den);

  // mismatched initial value is rejected
  CHECK_THROWS_AS(mollify_time_derivative(scalar_series(times, ramp, 0.5), 0.25),
                  InitialMismatch);
}

TEST_CASE("mollify is linear in (v, v_o)", "[mollify]") {
  auto times = uniform_times(1.0, 9);
  TimeSeriesField u, v;
  u.times = v.times = times;
  u.initial = {0.5, -1.0, 2.0};
  v.initial = {1.0, 0.25, -0.5};
  for (double t : times) {
    u.values.push_back({std::sin(t), t * t, 1.0 - t});
    v.values.push_back({std::cos(3 * t), 2.0 * t, t});
  }
  double a = 1.7, b = -0.6;
  TimeSeriesField mix;
  mix.times = times;
  for (size_t k = 0; k < times.size(); ++k) {
    Field f(3);
    for (int i = 0; i < 3; ++i) f[i] = a * u.values[k][i] + b * v.values[k][i];
    mix.values.push_back(f);
  }
  mix.initial.assign(3, 0.0);
  for (int i = 0; i < 3; ++i) mix.initial[i] = a * u.initial[i] + b * v.initial[i];

  auto wu = mollify(u, 0.3), wv = mollify(v, 0.3), wm = mollify(mix, 0.3);
  for (size_t k = 0; k < times.size(); ++k)
    for (int i = 0; i < 3; ++i)
      CHECK(wm.values[k][i] ==
            Catch::Approx(a * wu.values[k][i] + b * wv.values[k][i]).margin(1e-13));
}

TEST_CASE("mollify converges first order in h", "[mollify]") {
  auto times = uniform_times(2.0, 512);
  std::vector<double> vals;
  for (double t : times) vals.push_back(std::cos(t));
  auto v = scalar_series(times, vals, 1.0);
  auto err_at = [&](double h) {
    auto w = mollify(v, h);
    double e = 0.0;
    for (size_t k = 0; k < times.size(); ++k)
      e = std::max(e, std::abs(w.values[k][0] - vals[k]));
    return e;
  };
  double e1 = err_at(0.2), e2 = err_at(0.1), e3 = err_at(0.05);
  CHECK(e1 / e2 >= 2.0 / 1.3);
  CHECK(e1 / e2 <= 2.0 * 1.3);
  CHECK(e2 / e3 >= 2.0 / 1.3);
  CHECK(e2 / e3 <= 2.0 * 1.3);
}
