#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kscluster/criteria.hpp"
#include "kscluster/errors.hpp"
#include "kscluster/kssolver.hpp"
#include "kscluster/models.hpp"
#include "kscluster/suites.hpp"

using namespace kscluster;
namespace cr = kscluster::criteria;
namespace ks = kscluster::kssolver;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void line(const std::string& id, const std::string& title, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %-3s %s | %s | %.3fs\n", o.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<models::CellSet> window_subsets(int width) {
  std::vector<models::CellSet> out;
  for (int mask = 0; mask < (1 << width); ++mask) {
    std::vector<models::Cell> v;
    for (int i = 0; i < width; ++i)
      if ((mask >> i) & 1) v.push_back({i});
    out.push_back(models::make_cell_set(v));
  }
  return out;
}

const models::LatticeShapeModel kCubes = models::LatticeShapeModel::cube(2, 2);
const models::LatticeShapeModel kDimer(1, {{0}, {1}});

}  // namespace

int main() {
  line("1", "FP bound, 2x2 cubes", [] {
    auto t0 = std::chrono::steady_clock::now();
    double z = cr::fp_bound(kCubes).z_max;
    double secs = seconds_since(t0);
    bool ok = std::abs(z - 0.057271) <= 5e-6 && secs < 1.0;
    return Outcome{ok, fmt("z_max=%.9f", z) + " target 0.057271+-5e-6" + fmt(", eval %.3fs < 1s", secs)};
  });

  line("2", "new-condition bound, 2x2 cubes", [] {
    auto t0 = std::chrono::steady_clock::now();
    double z = cr::new_bound(kCubes).z_max;
    double secs = seconds_since(t0);
    double ratio = z / cr::fp_bound(kCubes).z_max;
    bool ok = std::abs(z - 0.060833) <= 5e-6 && std::abs(ratio - 1.062) < 5e-4 && secs < 1.0;
    return Outcome{ok, fmt("z_max=%.9f", z) + fmt(" ratio to FP=%.5f", ratio) + fmt(", eval %.3fs < 1s", secs)};
  });

  line("3", "2x2 cube neighborhood polynomials", [] {
    auto lat = models::lattice_neighborhood_system(kCubes);
    auto nb = models::neighborhood(lat.system, lat.center);
    std::vector<std::uint64_t> counts{1, 9, 16, 8, 1};
    std::map<std::pair<int, int>, std::uint64_t> closure{{{0, 0}, 1}, {{1, 9}, 9},  {{2, 15}, 6}, {{2, 16}, 8},
                                                         {{2, 17}, 2}, {{3, 21}, 8}, {{4, 25}, 1}};
    bool a = nb.size_counts() == counts, b = nb.closure_multiset() == closure;
    return Outcome{a && b, std::string("independence coefficients ") + (a ? "match" : "differ") + ", closure multiset " +
                               (b ? "match" : "differ")};
  });

  line("4", "hypercube closed form vs lattice optimizer", [] {
    double worst = 0;
    for (int d = 1; d <= 3; ++d)
      for (int k = 2; k <= 4; ++k) {
        auto m = models::LatticeShapeModel::cube(d, k);
        worst = std::max(worst, std::abs(cr::lgoof_bound(m).z_max - cr::hypercube_closed_form(d, k)));
      }
    bool mono = true;
    double prev = INFINITY, last = 0;
    for (int d = 1; d <= 20; ++d) {
      double v = std::pow(3.0, d) * cr::hypercube_closed_form(d, 2);
      mono = mono && v < prev && v > std::exp(-1.0);
      prev = last = v;
    }
    return Outcome{worst <= 1e-9 && mono, fmt("max |diff|=%.2e", worst) + fmt(", 3^d z_max at d=20: %.9f", last) +
                                              (mono ? " decreasing above 1/e" : " NOT decreasing above 1/e")};
  });

  line("5", "hard-sphere closed form vs continuum optimizer", [] {
    double worst = 0;
    for (int d = 1; d <= 10; ++d)
      worst = std::max(worst, std::abs(cr::hardsphere_bound(d, 1.0).z_max - cr::hardsphere_closed_form(d, 1.0)) /
                                  cr::hardsphere_closed_form(d, 1.0));
    double one = cr::hardsphere_bound(1, 1.0).z_max;
    return Outcome{worst <= 1e-9 && std::abs(one - 0.125) <= 1e-9,
                   fmt("max rel diff=%.2e", worst) + fmt(", d=1 R=1: %.12f", one)};
  });

  line("6", "discrete Tonks dimers and ordering chain", [] {
    models::RodSystem rods(models::RodFlavor::discrete, {2}, {1});
    double tonks = cr::tonks_discrete_bound(rods).z_max;
    std::vector<double> chain{cr::kp_bound(kDimer).z_max, cr::gk_bound(kDimer).z_max, cr::lgoof_bound(kDimer).z_max,
                              cr::fp_bound(kDimer).z_max, tonks};
    double margin = INFINITY;
    for (std::size_t i = 1; i < chain.size(); ++i) margin = std::min(margin, chain[i] - chain[i - 1]);
    bool ok = std::abs(tonks - 0.25) <= 1e-9 && margin > 1e-3;
    return Outcome{ok, fmt("Tonks=%.12f", tonks) + fmt(", chain %.5f", chain[0]) + fmt(" < %.5f", chain[1]) +
                           fmt(" < %.5f", chain[2]) + fmt(" < %.5f", chain[3]) + fmt(" < %.5f", chain[4]) +
                           fmt(", min margin %.5f", margin)};
  });

  line("7", "continuous Tonks single length", [] {
    double worst = 0;
    for (double L : {0.5, 1.0, 2.0}) {
      models::RodSystem rods(models::RodFlavor::continuous, {L}, {1});
      worst = std::max(worst, std::abs(cr::tonks_continuous_bound(rods).z_max - 1.0 / (std::exp(1.0) * L)));
    }
    return Outcome{worst <= 1e-9, fmt("max |z_max - 1/(eL)|=%.2e", worst)};
  });

  line("8", "exact identity suites", [] {
    auto t0 = std::chrono::steady_clock::now();
    suites::SuiteOptions opts;
    opts.seed = 20240611;
    opts.trials = 200;
    std::string detail;
    bool ok = true;
    for (const char* name :
         {"forest-graph", "psi-methods", "psi-factorization", "altsign", "phirecurr", "prec", "ks-partial"}) {
      auto r = suites::run_suite(name, opts);
      ok = ok && r.ok && r.checks >= 200 && !r.counterexample;
      detail += std::string(name) + (r.ok ? " ok" : " FAILED") + "(" + std::to_string(r.checks) + ") ";
    }
    double secs = seconds_since(t0);
    ok = ok && secs < 120;
    return Outcome{ok, detail + fmt("total %.2fs < 120s", secs)};
  });

  line("9a", "T~ recursion equals direct cluster sum", [] {
    std::uint64_t compared = 0, mismatches = 0;
    for (int len : {2, 3}) {
      auto fam = ks::SubsetFamily::intervals({len});
      for (Rational z : {Rational(1, 10), Rational(1, 4), Rational(1)}) {
        ks::TnTable<Rational> table(fam, z);
        for (const auto& d : window_subsets(8))
          for (int N = 1; N <= 8; ++N) {
            ++compared;
            if (table.value(d, N) != ks::tn_direct(fam, d, N, z)) ++mismatches;
          }
      }
    }
    return Outcome{mismatches == 0,
                   std::to_string(compared) + " exact comparisons, " + std::to_string(mismatches) + " mismatches"};
  });

  line("9b", "stabilization probe on dimers", [] {
    auto fam = ks::SubsetFamily::intervals({2});
    models::CellSet origin = models::make_cell_set({{0}});
    auto low = ks::stabilization_probe(fam, origin, 0.2);
    auto high = ks::stabilization_probe(fam, origin, 0.3);
    auto name = [](ks::StabilizationResult::Outcome o) {
      switch (o) {
        case ks::StabilizationResult::Outcome::stabilized: return "stabilized";
        case ks::StabilizationResult::Outcome::diverged: return "diverged";
        default: return "ceiling";
      }
    };
    bool ok = low.outcome == ks::StabilizationResult::Outcome::stabilized &&
              high.outcome != ks::StabilizationResult::Outcome::stabilized;
    return Outcome{ok, std::string("z=0.2: ") + name(low.outcome) + " at N=" + std::to_string(low.order) +
                           fmt(" (rel change %.2e)", low.relative_change) + "; z=0.3: " + name(high.outcome) +
                           " at N=" + std::to_string(high.order)};
  });

  line("10", "beta coefficients at least one", [] {
    suites::SuiteOptions opts;
    opts.seed = 20240611;
    opts.trials = 1000;
    auto r = suites::run_suite("beta", opts);
    double lo = r.stats.value("min_beta", 0.0);
    return Outcome{r.ok && r.checks >= 1000 && lo >= 1 - 1e-12,
                   std::to_string(r.checks) + " instances" + fmt(", min beta=%.15f", lo)};
  });

  line("11", "local bfp check with the GK ansatz on dimers", [] {
    auto fam = ks::SubsetFamily::intervals({2});
    ks::Window w{{0}, {5}};
    double alpha = std::log(2.0);
    bool below = true;
    for (double z : {0.05, 0.1, 0.12, 0.1249}) below = below && ks::bfp_condition_check(fam, ks::additive_ansatz(alpha), w, 5, z).holds;
    bool above = true;
    for (double z : {0.126, 0.13, 0.2})
      for (int i = 1; i <= 300; ++i) above = above && !ks::bfp_condition_check(fam, ks::additive_ansatz(0.01 * i), w, 5, z).holds;
    return Outcome{below && above, std::string("z<1/8 with alpha=ln2: ") + (below ? "holds" : "FAILS") +
                                       "; z>1/8 for alpha in (0,3]: " + (above ? "fails" : "HOLDS somewhere")};
  });

  std::printf("%d failing line(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
