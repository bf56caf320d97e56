#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "swave/errors.hpp"
#include "swave/regularization.hpp"
#include "swave/serialization.hpp"

using namespace swave;
using std::numbers::pi;

namespace {

// Independent oracle: composite Simpson on a fine uniform mesh.
template <typename F>
double simpson(F&& f, double a, double b, int n = 400000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double bump_integral_oracle() {
  static const double v = simpson([](double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }, -1.0, 1.0);
  return v;
}

double psi0_oracle() { return std::exp(-1.0) / bump_integral_oracle(); }

}  // namespace

TEST_CASE("mollifier kernel is an admissible Friedrichs mollifier") {
  CHECK(MollifierKernel::bump_mass() == doctest::Approx(bump_integral_oracle()).epsilon(1e-12));
  for (double tau : {0.0, 0.3, -0.5}) {
    const MollifierKernel k(tau);
    CHECK(simpson([&](double x) { return k(x); }, -1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(k.support_lo() >= -1.0);
    CHECK(k.support_hi() <= 1.0);
    for (double x = -1.5; x <= 1.5; x += 0.01) CHECK(k(x) >= 0.0);
    CHECK(k(k.support_hi() + 1e-9) == 0.0);
    CHECK(k(k.support_lo() - 1e-9) == 0.0);
    // Scaled kernel keeps unit mass.
    CHECK(simpson([&](double x) { return k.scaled(x, 0.05); }, -0.05, 0.05) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(MollifierKernel(0.0).peak() == doctest::Approx(psi0_oracle()).epsilon(1e-12));
  CHECK_THROWS_AS(MollifierKernel(1.0), InvalidArgument);
  CHECK_THROWS_AS(MollifierKernel(-1.2), InvalidArgument);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(CoefficientSpec::delta(0.0), InvalidArgument);
  CHECK_THROWS_AS(CoefficientSpec::delta(1.0), InvalidArgument);
  CHECK_THROWS_AS(CoefficientSpec::delta_power(0.5, 1), InvalidArgument);
  CHECK_THROWS_AS(CoefficientSpec::sum({}), InvalidArgument);
  CHECK_THROWS_AS(CoefficientSpec::sum({{-1.0, CoefficientSpec::delta(0.5)}}, true), InvalidArgument);
  CHECK_NOTHROW(CoefficientSpec::sum({{-1.0, CoefficientSpec::delta(0.5)}}, false));
  CHECK(CoefficientSpec::sum({{1.0, CoefficientSpec::delta(0.5)}}).is_singular());
  CHECK_FALSE(CoefficientSpec::from_smooth(SmoothFunction::constant(2.0)).is_singular());
}

TEST_CASE("mollify a Dirac delta") {
  const Grid g(4095);
  const MollifierKernel k;
  for (double eps : {0.1, 0.02}) {
    const auto m = mollify(CoefficientSpec::delta(0.5), k, eps, g);
    CHECK(m.values.max_abs() == doctest::Approx(psi0_oracle() / eps).epsilon(1e-12));
    double mass = 0.0;
    for (double v : m.values.values()) mass += v;
    mass *= g.h();
    CHECK(std::abs(mass - 1.0) <= 1e-6);
    CHECK_FALSE(m.support_truncated);
  }
  CHECK(mollify(CoefficientSpec::delta(0.05), k, 0.1, g).support_truncated);
}

TEST_CASE("mollify a delta power") {
  const Grid g(4095);
  const double eps = 0.05;
  const auto m = mollify(CoefficientSpec::delta_power(0.5, 2), MollifierKernel(), eps, g);
  CHECK(m.values.max_abs() == doctest::Approx(std::pow(psi0_oracle() / eps, 2)).epsilon(1e-12));
}

TEST_CASE("mollify a smooth constant") {
  const Grid g(1023);
  const double eps = 0.1;
  const auto m = mollify(CoefficientSpec::from_smooth(SmoothFunction::constant(1.0)), MollifierKernel(), eps, g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.node(j);
    if (x >= eps && x <= 1.0 - eps) CHECK(std::abs(m.values[j] - 1.0) <= 1e-10);
    CHECK(m.values[j] <= 1.0 + 1e-10);
  }
  // Zero extension halves the value at the boundary.
  CHECK(m.values[0] == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("mollify rejects bad epsilon") {
  const Grid g(255);
  const auto spec = CoefficientSpec::delta(0.5);
  CHECK_THROWS_AS(mollify(spec, MollifierKernel(), 0.0, g), InvalidArgument);
  CHECK_THROWS_AS(mollify(spec, MollifierKernel(), 1.5, g), InvalidArgument);
  CHECK_THROWS_AS(mollify(spec, MollifierKernel(), 7.0 * g.h(), g), ResolutionError);
  CHECK_NOTHROW(mollify(spec, MollifierKernel(), 8.0 * g.h(), g));
}

TEST_CASE("build_net for a delta doubles the sup norm per level") {
  const Grid g(8191);
  const auto eps = geometric_epsilons(0.1, 0.5, 7);
  const auto net = build_net(CoefficientSpec::delta(0.5), MollifierKernel(), eps, g);
  REQUIRE(net.members.size() == 7);
  for (std::size_t i = 1; i < 7; ++i) {
    CHECK(net.members[i].max_abs() / net.members[i - 1].max_abs() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(l2_norm(net.members[i]) > l2_norm(net.members[i - 1]));
  }
  for (const auto& m : net.members) CHECK(m.min() >= 0.0);

  CHECK_THROWS_AS(build_net(CoefficientSpec::delta(0.5), MollifierKernel(), {}, g), InvalidArgument);
  CHECK_THROWS_AS(build_net(CoefficientSpec::delta(0.5), MollifierKernel(), {0.1, 0.2}, g), InvalidArgument);
}

TEST_CASE("smooth net converges at second order on compacts") {
  const Grid g(2047);
  const auto eps = geometric_epsilons(0.2, 0.5, 5);
  const auto net = build_net(CoefficientSpec::from_smooth(SmoothFunction::sine(1.0)), MollifierKernel(), eps, g);
  std::vector<double> dev;
  for (const auto& m : net.members) {
    double d = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double x = g.node(j);
      if (x >= 0.25 && x <= 0.75) d = std::max(d, std::abs(m[j] - std::sin(pi * x)));
    }
    dev.push_back(d);
  }
  // Taylor oracle: deviation = eps^2 * m2 * pi^2 sin(pi x) / 2 + O(eps^4).
  CHECK(fit_loglog(eps, dev).slope >= 1.9);
}

TEST_CASE("nonnegativity is enforced and flagged") {
  const Grid g(511);
  // sin(2 pi x) dips below zero on (1/2, 1).
  const auto spec = CoefficientSpec::from_smooth(SmoothFunction::sine(2.0), true);
  const auto net = build_net(spec, MollifierKernel(), {0.2, 0.1}, g);
  CHECK(net.nonnegativity_violated);
  for (const auto& m : net.members) CHECK(m.min() >= 0.0);

  const auto clean = build_net(CoefficientSpec::from_smooth(SmoothFunction::sine(1.0), true), MollifierKernel(), {0.2, 0.1}, g);
  CHECK_FALSE(clean.nonnegativity_violated);
}

TEST_CASE("fit_moderateness recovers power laws") {
  const std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
  std::vector<double> norms;
  for (double e : eps) norms.push_back(3.7 * std::pow(e, -2.5));
  const auto r = fit_moderateness(eps, norms, NormKind::L2);
  CHECK(std::abs(r.fitted_N - 2.5) <= 1e-10);
  CHECK(r.fit_residual >= 0.0);
  CHECK(r.table.size() == 4);

  const std::vector<double> flat(4, 2.0);
  const auto d = fit_moderateness(eps, flat, NormKind::Sup);
  CHECK(d.fitted_N == 0.0);
  CHECK(d.fit_residual == 0.0);

  CHECK_THROWS_AS(fit_moderateness(std::vector<double>{0.2, 0.1}, std::vector<double>{1.0, 2.0}, NormKind::Sup),
                  InvalidArgument);
}

TEST_CASE("moderateness of delta, delta squared and smooth nets") {
  const Grid g(4095);
  const auto eps = geometric_epsilons(0.2, 0.5, 7);
  const MollifierKernel k;
  const auto delta = build_net(CoefficientSpec::delta(0.5), k, eps, g);
  const auto delta2 = build_net(CoefficientSpec::delta_power(0.5, 2), k, eps, g);
  const auto smooth = build_net(CoefficientSpec::from_smooth(SmoothFunction{{1.0, 0.0, 1.0}, {}, {}}), k, eps, g);

  CHECK(fit_moderateness(delta, NormKind::Sup).fitted_N == doctest::Approx(1.0).epsilon(0.05));
  CHECK(fit_moderateness(delta2, NormKind::Sup).fitted_N == doctest::Approx(2.0).epsilon(0.025));
  CHECK(fit_moderateness(smooth, NormKind::Sup).fitted_N <= 0.05);
  // ||psi_eps||_{L2} ~ eps^{-1/2}
  CHECK(fit_moderateness(delta, NormKind::L2).fitted_N == doctest::Approx(0.5).epsilon(0.05));
  CHECK(fit_moderateness(delta, NormKind::H2).fitted_N > 2.0);
}

TEST_CASE("negligibility reports") {
  const Grid g(2047);
  const auto eps = geometric_epsilons(0.2, 0.5, 5);
  const auto smooth = CoefficientSpec::from_smooth(SmoothFunction{{1.0}, {{1.0, 0.5}}, {}});
  const auto a = build_net(smooth, MollifierKernel(0.0), eps, g);
  const auto b = build_net(smooth, MollifierKernel(0.4), eps, g);

  const auto same = check_negligible(a, a, NormKind::Sup);
  CHECK(same.order_is_infinite());
  for (const auto& [e, d] : same.table) CHECK(d == 0.0);
  CHECK(negligibility_label(same) == "negligible-at-order-+inf");

  // Zero extension leaves an O(1) boundary layer of width eps in both nets, so
  // the full-domain difference decays like eps^{1/2} in L2. Away from the
  // boundary the kernels differ only in their first moment.
  const auto full = check_negligible(a, b, NormKind::L2);
  CHECK(full.fitted_order == doctest::Approx(0.5).epsilon(0.25));
  std::vector<double> interior;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double x = g.node(j);
      if (x >= 0.25 && x <= 0.75) d = std::max(d, std::abs(a.members[i][j] - b.members[i][j]));
    }
    interior.push_back(d);
  }
  CHECK(make_decay_report(eps, interior, "sup", "interior").fitted_order >= 1.0);

  const auto d4 = build_net(CoefficientSpec::delta(0.4), MollifierKernel(), eps, g);
  const auto d6 = build_net(CoefficientSpec::delta(0.6), MollifierKernel(), eps, g);
  CHECK(check_negligible(d4, d6, NormKind::Sup).fitted_order <= 0.0 + 1e-9);

  const auto other = build_net(smooth, MollifierKernel(), {0.2, 0.1}, g);
  CHECK_THROWS_AS(check_negligible(a, other, NormKind::Sup), InvalidArgument);
}

TEST_CASE("unregularized samples") {
  const Grid g(63);
  const auto spec = CoefficientSpec::sum({{2.0, CoefficientSpec::from_smooth(SmoothFunction::constant(1.5))},
                                          {1.0, CoefficientSpec::from_smooth(SmoothFunction::sine(1.0))}});
  const auto f = sample_unregularized(spec, g);
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(f[j] == doctest::Approx(3.0 + std::sin(pi * g.node(j))));
  CHECK_THROWS_AS(sample_unregularized(CoefficientSpec::delta(0.5), g), SpecNotSmooth);
}

TEST_CASE("net csv export") {
  const Grid g(511);
  const auto net = build_net(CoefficientSpec::delta_power(0.5, 3), MollifierKernel(0.25), {0.2, 0.1}, g);
  std::ostringstream out;
  write_net_csv(out, net);
  std::istringstream in(out.str());
  std::string header, columns, row;
  std::getline(in, header);
  std::getline(in, columns);
  REQUIRE(header.rfind("# ", 0) == 0);
  const auto j = nlohmann::json::parse(header.substr(2));
  CHECK(j.at("kind") == "delta_power");
  CHECK(j.at("k") == 3);
  CHECK(j.at("x0") == 0.5);
  CHECK(j.at("kernel_offset") == 0.25);
  CHECK(columns == "eps,sup_norm,l2_norm,h2_norm");
  int rows = 0;
  while (std::getline(in, row)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("spec json round trip on random specs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::uniform_int_distribution<int> pick(0, 3);
  std::function<CoefficientSpec(int)> random_spec = [&](int depth) -> CoefficientSpec {
    const int kind = depth > 1 ? pick(rng) % 3 : pick(rng);
    switch (kind) {
      case 0: return CoefficientSpec::from_smooth(SmoothFunction{{u(rng), u(rng)}, {{1.0, u(rng)}}, {{2.0, u(rng)}}}, true);
      case 1: return CoefficientSpec::delta(u(rng));
      case 2: return CoefficientSpec::delta_power(u(rng), 2 + pick(rng));
      default:
        return CoefficientSpec::sum({{u(rng), random_spec(depth + 1)}, {u(rng), random_spec(depth + 1)}}, true);
    }
  };
  for (int i = 0; i < 100; ++i) {
    const auto spec = random_spec(0);
    const auto j = to_json(spec);
    const auto back = spec_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back == spec);
    CHECK(to_json(back).dump() == j.dump());
  }
  CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"kind", "gaussian"}}), InvalidArgument);
}
