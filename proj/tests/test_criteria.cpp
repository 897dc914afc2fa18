#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kscluster/criteria.hpp"
#include "kscluster/errors.hpp"

using namespace kscluster;
using namespace kscluster::criteria;
using models::LatticeShapeModel;
using models::RodSystem;
using models::BallSystem;
using models::RodFlavor;

namespace {

const double kE = std::exp(1.0);

LatticeShapeModel dimer1d() { return LatticeShapeModel(1, {{0}, {1}}); }
LatticeShapeModel dimer2d() { return LatticeShapeModel(2, {{0, 0}, {1, 0}}); }
LatticeShapeModel cube22() { return LatticeShapeModel::cube(2, 2); }
LatticeShapeModel monomer() { return LatticeShapeModel(1, {{0}}); }

RodSystem rods(std::vector<double> lengths, std::vector<double> weights) {
  return RodSystem(RodFlavor::discrete, std::move(lengths), std::move(weights));
}

}  // namespace

TEST_CASE("optimizer on smooth objectives") {
  auto r = optimize_scalar([](double a) { return a * std::exp(-a); });
  CHECK(r.attained);
  CHECK(r.argmax == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.max == doctest::Approx(1.0 / kE).epsilon(1e-12));
  CHECK(r.diagnostics.evaluations > 0);
  CHECK(r.diagnostics.bracket_lo <= r.argmax);
  CHECK(r.argmax <= r.diagnostics.bracket_hi);
  auto s = optimize_scalar([](double a) { return std::expm1(a) * std::exp(-2 * a); });
  CHECK(s.argmax == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  CHECK(s.max == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("optimizer on a plateau and at infinity") {
  auto p = optimize_scalar([](double) { return 0.5; });
  CHECK(p.max == 0.5);
  OptimizerOptions o;
  o.limit_at_infinity = 1.0;
  auto q = optimize_scalar([](double a) { return a / (1 + a); }, o);
  CHECK(!q.attained);
  CHECK(q.max == 1.0);
  CHECK(q.diagnostics.hit_ceiling);
}

TEST_CASE("optimizer finds a second, higher bump") {
  // Small bump near 1e-3 and a larger one near 5.
  auto f = [](double a) { return 0.1 * std::exp(-std::pow(std::log(a / 1e-3), 2)) + std::exp(-std::pow(a - 5, 2)); };
  auto r = optimize_scalar(f);
  CHECK(r.argmax == doctest::Approx(5.0).epsilon(1e-4));
  CHECK(r.max == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("optimizer rejects non-finite objectives and bad options") {
  CHECK_THROWS_AS(optimize_scalar([](double a) { return a > 1 ? NAN : a; }), NumericError);
  OptimizerOptions bad;
  bad.tol = 0;
  CHECK_THROWS_AS(optimize_scalar([](double a) { return a; }, bad), ContractError);
}

TEST_CASE("Kotecky-Preiss") {
  CHECK(kp_bound(dimer1d()).z_max == doctest::Approx(1 / (3 * kE)).epsilon(1e-10));
  CHECK(kp_bound(cube22()).z_max == doctest::Approx(1 / (9 * kE)).epsilon(1e-10));
  CHECK(kp_bound(monomer()).z_max == doctest::Approx(1 / kE).epsilon(1e-10));
  CHECK(kp_bound(dimer1d()).attained);
}

TEST_CASE("Fernandez-Procacci") {
  auto c = fp_bound(cube22());
  CHECK(std::abs(c.z_max - 0.057271) < 5e-6);
  CHECK(fp_bound(dimer1d()).z_max == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(fp_bound(dimer1d()).optimal_param == doctest::Approx(1.0).epsilon(1e-5));
  auto m = fp_bound(monomer());
  CHECK(!m.attained);
  CHECK(m.z_max == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("new condition") {
  auto c = new_bound(cube22());
  CHECK(std::abs(c.z_max - 0.060833) < 5e-6);
  CHECK(c.z_max / fp_bound(cube22()).z_max == doctest::Approx(1.062).epsilon(1e-3));
  // Displayed objective at a fixed mu.
  double mu = 0.1;
  double den = 1 + 9 * std::exp(9 * mu) * mu +
               (6 * std::exp(15 * mu) + 8 * std::exp(16 * mu) + 2 * std::exp(17 * mu)) * mu * mu +
               8 * std::exp(21 * mu) * std::pow(mu, 3) + std::exp(25 * mu) * std::pow(mu, 4);
  double objective = mu * std::exp(9 * mu) / den;
  CHECK(feasibility(cube22(), CriterionId::new_condition, objective * (1 - 1e-9), AnsatzSpec::mu(mu)).holds);
  CHECK(!feasibility(cube22(), CriterionId::new_condition, objective * (1 + 1e-9), AnsatzSpec::mu(mu)).holds);
  CHECK(new_bound(dimer1d()).z_max > fp_bound(dimer1d()).z_max + 1e-6);
}

TEST_CASE("Gruber-Kunz and the lattice criterion") {
  auto g = gk_bound(dimer1d());
  CHECK(g.z_max == doctest::Approx(0.125).epsilon(1e-10));
  CHECK(std::exp(g.optimal_param) == doctest::Approx(2.0).epsilon(1e-5));
  auto gc = gk_bound(cube22());
  CHECK(gc.z_max == doctest::Approx(27.0 / 1024.0).epsilon(1e-10));
  CHECK(std::exp(gc.optimal_param) == doctest::Approx(4.0 / 3.0).epsilon(1e-5));
  auto gm = gk_bound(monomer());
  CHECK(!gm.attained);
  CHECK(gm.z_max == 1.0);
  CHECK(lgoof_bound(dimer1d()).z_max == doctest::Approx(1 / (3 * std::sqrt(3.0))).epsilon(1e-10));
  CHECK(lgoof_bound(cube22()).z_max == doctest::Approx(std::pow(5.0 / 9.0, 1.25) / 9).epsilon(1e-10));
  auto lm = lgoof_bound(monomer());
  CHECK(!lm.attained);
  CHECK(lm.z_max == 1.0);
}

TEST_CASE("hypercube closed form") {
  CHECK(hypercube_closed_form(2, 2) == doctest::Approx(std::pow(5.0 / 9.0, 1.25) / 9).epsilon(1e-12));
  for (int d = 1; d <= 5; ++d) CHECK(hypercube_closed_form(d, 1) == 1.0);
  for (int d = 1; d <= 3; ++d)
    for (int k = 2; k <= 4; ++k)
      CHECK(std::abs(hypercube_closed_form(d, k) - lgoof_bound(LatticeShapeModel::cube(d, k)).z_max) < 1e-9);
  double prev = INFINITY;
  for (int d = 1; d <= 20; ++d) {
    double normalized = std::pow(3.0, d) * hypercube_closed_form(d, 2);
    CHECK(normalized < prev);
    CHECK(normalized > 1 / kE);
    prev = normalized;
  }
}

TEST_CASE("hard spheres") {
  CHECK(hardsphere_closed_form(1, 1) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(hardsphere_closed_form(2, 1) == doctest::Approx(std::pow(0.75, 3) / (4 * M_PI)).epsilon(1e-12));
  double d10 = std::pow(1 - std::pow(2.0, -10), 1023);
  CHECK(d10 > 1 / kE);
  for (int d = 1; d <= 10; ++d)
    for (double r : {0.5, 1.0, 2.0}) {
      auto h = hardsphere_bound(d, r);
      CHECK(h.strict);
      CHECK(std::abs(h.z_max - hardsphere_closed_form(d, r)) <= 1e-9 * std::max(1.0, hardsphere_closed_form(d, r)));
    }
}

TEST_CASE("continuum Gruber-Kunz for balls") {
  auto one = gk_cont_bound(BallSystem(1, {1.5}, {1}));
  CHECK(one.z_max == doctest::Approx(1 / (8 * 1.5)).epsilon(1e-10));
  CHECK(one.z_max == doctest::Approx(hardsphere_bound(1, 1.5).z_max).epsilon(1e-10));
  auto drop = gk_cont_bound(BallSystem(1, {1, 2}, {1, 0}));
  CHECK(drop.z_max == doctest::Approx(gk_cont_bound(BallSystem(1, {1}, {1})).z_max).epsilon(1e-10));
  auto both = gk_cont_bound(BallSystem(1, {1, 2}, {1, 1}));
  CHECK(both.z_max < drop.z_max);
  CHECK(both.strict);
}

TEST_CASE("discrete Tonks gas") {
  auto d = tonks_discrete_bound(rods({2}, {1}));
  CHECK(std::abs(d.z_max - 0.25) < 1e-9);
  auto m = tonks_discrete_bound(rods({1}, {1}));
  CHECK(!m.attained);
  CHECK(m.z_max == doctest::Approx(1.0));
  auto mix = rods({1, 2}, {1, 1});
  double v = tonks_discrete_bound(mix).z_max;
  CHECK(v > 0);
  CHECK(v < 0.25);
  CHECK(std::abs(v - tonks_discrete_tangency(mix)) < 1e-8);
  CHECK(std::abs(tonks_discrete_tangency(rods({2}, {1})) - 0.25) < 1e-9);
}

TEST_CASE("continuous Tonks gas") {
  for (double L : {0.5, 1.0, 2.0}) {
    auto r = tonks_continuous_bound(RodSystem(RodFlavor::continuous, {L}, {1}));
    CHECK(std::abs(r.z_max - 1 / (kE * L)) < 1e-9);
    CHECK(r.optimal_param == doctest::Approx(1 / L).epsilon(1e-5));
    CHECK(r.strict);
  }
  auto two = tonks_continuous_bound(RodSystem(RodFlavor::continuous, {1, 2}, {1, 1}));
  CHECK(two.z_max < 1 / kE);
}

TEST_CASE("ordering on translation-invariant lattice models") {
  for (const auto& m : {dimer1d(), dimer2d(), cube22()}) {
    double kp = kp_bound(m).z_max, fp = fp_bound(m).z_max, nw = new_bound(m).z_max;
    double gk = gk_bound(m).z_max, lg = lgoof_bound(m).z_max;
    CHECK(fp - kp > 1e-6);
    CHECK(nw - fp > 1e-6);
    CHECK(std::max(gk, lg) - kp > 1e-6);
    CHECK(lg <= fp);
  }
}

TEST_CASE("exact radius dominates sufficient conditions on single-length rods") {
  for (int len = 1; len <= 4; ++len) {
    Model rod = rods({static_cast<double>(len)}, {1});
    double exact = evaluate(CriterionId::tonks_discrete, rod).z_max;
    for (auto id : {CriterionId::kp, CriterionId::fp, CriterionId::new_condition, CriterionId::gk, CriterionId::lgoof})
      CHECK(evaluate(id, rod).z_max <= exact + 1e-12);
  }
}

TEST_CASE("dimer criterion chain") {
  Model d = rods({2}, {1});
  std::vector<double> chain;
  for (auto id : {CriterionId::kp, CriterionId::gk, CriterionId::lgoof, CriterionId::fp, CriterionId::tonks_discrete})
    chain.push_back(evaluate(id, d).z_max);
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) CHECK(chain[i + 1] - chain[i] > 1e-3);
}

TEST_CASE("weights scale the bound inversely") {
  double c = 3.5;
  auto base = tonks_discrete_bound(rods({1, 3}, {1, 2})).z_max;
  auto scaled = tonks_discrete_bound(rods({1, 3}, {c, 2 * c})).z_max;
  CHECK(scaled * c == doctest::Approx(base).epsilon(1e-9));
  auto cb = tonks_continuous_bound(RodSystem(RodFlavor::continuous, {1, 2}, {1, 1})).z_max;
  auto cs = tonks_continuous_bound(RodSystem(RodFlavor::continuous, {1, 2}, {c, c})).z_max;
  CHECK(cs * c == doctest::Approx(cb).epsilon(1e-9));
  auto bb = gk_cont_bound(BallSystem(2, {1, 2}, {1, 1})).z_max;
  auto bs = gk_cont_bound(BallSystem(2, {1, 2}, {c, c})).z_max;
  CHECK(bs * c == doctest::Approx(bb).epsilon(1e-9));
}

TEST_CASE("abstract systems use activities as weights") {
  auto sys = models::AbstractPolymerSystem::from_pairs({"a", "b", "c"}, {1, 1, 1}, {{0, 1}, {1, 2}, {0, 2}});
  // Every Gamma is the triangle: independence polynomial 1 + 3 mu.
  auto fp = fp_bound(sys);
  CHECK(!fp.attained);
  CHECK(fp.z_max == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(kp_bound(sys).z_max == doctest::Approx(1 / (3 * kE)).epsilon(1e-9));
  auto doubled = sys.with_activities({2, 2, 2});
  CHECK(kp_bound(doubled).z_max == doctest::Approx(1 / (6 * kE)).epsilon(1e-9));
}

TEST_CASE("feasibility") {
  double mu_star = fp_bound(cube22()).optimal_param;
  CHECK(feasibility(cube22(), CriterionId::fp, 0.05, AnsatzSpec::mu(mu_star)).holds);
  for (int i = 1; i <= 1000; ++i) {
    double mu = 1e-3 * i;
    CHECK(!feasibility(cube22(), CriterionId::fp, 0.06, AnsatzSpec::mu(mu)).holds);
  }
  CHECK(feasibility(cube22(), CriterionId::kp, 0, AnsatzSpec::alpha(1)).holds);
  CHECK(feasibility(cube22(), CriterionId::gk, 0, AnsatzSpec::alpha(1)).holds);
  Model balls = BallSystem(3, {1}, {1});
  CHECK(feasibility(balls, CriterionId::hardsphere, 0, AnsatzSpec::alpha(0.1)).holds);
  // Strict criterion fails exactly at its own threshold.
  auto h = hardsphere_bound(3, 1);
  CHECK(!feasibility(balls, CriterionId::hardsphere, hardsphere_closed_form(3, 1),
                     AnsatzSpec::alpha(h.optimal_param / models::ball_volume(3, 1)))
             .holds);
  CHECK_THROWS_AS(feasibility(cube22(), CriterionId::fp, 0.05, AnsatzSpec::alpha(1)), ContractError);
  CHECK_THROWS_AS(feasibility(cube22(), CriterionId::tonks_continuous, 0.05, AnsatzSpec::alpha(1)), ContractError);
}

TEST_CASE("per-polymer feasibility on abstract systems") {
  auto sys = models::AbstractPolymerSystem::from_pairs({"a", "b"}, {1, 1}, {{0, 1}});
  auto ok = feasibility(sys, CriterionId::fp, 0.1, AnsatzSpec::per_polymer({0.5, 0.5}));
  CHECK(ok.holds);
  auto bad = feasibility(sys, CriterionId::fp, 0.3, AnsatzSpec::per_polymer({0.5, 0.01}));
  CHECK(!bad.holds);
  CHECK(!bad.detail.empty());
  CHECK_THROWS_AS(feasibility(sys, CriterionId::fp, 0.1, AnsatzSpec::per_polymer({0.5})), ContractError);
}

TEST_CASE("applicability and names") {
  Model cont = RodSystem(RodFlavor::continuous, {1}, {1});
  CHECK(applicable(CriterionId::tonks_continuous, cont));
  CHECK(!applicable(CriterionId::kp, cont));
  CHECK_THROWS_AS(evaluate(CriterionId::kp, cont), ContractError);
  CHECK(!applicable(CriterionId::hypercube, Model(dimer2d())));
  CHECK(applicable(CriterionId::hypercube, Model(cube22())));
  for (auto id : all_criteria()) CHECK(parse_criterion(criterion_name(id)) == id);
  CHECK_THROWS_AS(parse_criterion("nope"), ContractError);
}
