#include "kscluster/criteria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>

#include "kscluster/errors.hpp"

namespace kscluster::criteria {

using models::AbstractPolymerSystem;
using models::BallSystem;
using models::LatticeShapeModel;
using models::RodFlavor;
using models::RodSystem;

namespace {

struct LogTerm {
  double log_coef;
  double slope;  // multiplies the parameter
  int power;     // multiplies log of the parameter
};

double log_sum(const std::vector<LogTerm>& terms, double p) {
  double logp = std::log(p);
  double hi = -INFINITY;
  for (const auto& t : terms) hi = std::max(hi, t.log_coef + t.slope * p + t.power * logp);
  if (hi == -INFINITY) return hi;
  double s = 0;
  for (const auto& t : terms) s += std::exp(t.log_coef + t.slope * p + t.power * logp - hi);
  return hi + std::log(s);
}

// log(1 - e^{-x}) for x > 0.
double log_one_minus_exp_neg(double x) { return std::log(-std::expm1(-x)); }

CriterionReport make_report(CriterionId id, const ScalarMaximum& m, const char* param, double param_scale = 1.0) {
  CriterionReport r;
  r.criterion = std::string(criterion_name(id));
  r.z_max = m.max;
  r.optimal_param = m.argmax * param_scale;
  r.param_name = param;
  r.attained = m.attained;
  r.strict = criterion_is_strict(id);
  r.diagnostics = m.diagnostics;
  return r;
}

// Neighbourhood data of one polymer in the form the objectives need.
struct NeighborData {
  double weight;
  int gamma_size;
  double gamma_activity;  // sum of activities over Gamma(x)
  std::vector<std::uint64_t> size_counts;
  std::map<std::pair<int, int>, std::uint64_t> closures;
};

std::vector<NeighborData> neighbor_data(const AbstractPolymerSystem& sys, bool all_polymers, int only = -1) {
  std::vector<NeighborData> out;
  for (int x = 0; x < sys.size(); ++x) {
    if (!all_polymers && x != only) continue;
    double w = all_polymers ? sys.activity_value(x) : 1.0;
    double ga = 0;
    for (int y : sys.gamma(x)) ga += all_polymers ? sys.activity_value(y) : 1.0;
    auto nb = models::neighborhood(sys, x);
    out.push_back({w, static_cast<int>(sys.gamma(x).size()), ga, nb.size_counts(), nb.closure_multiset()});
  }
  return out;
}

std::vector<LogTerm> fp_terms(const NeighborData& d) {
  std::vector<LogTerm> t;
  for (std::size_t j = 0; j < d.size_counts.size(); ++j)
    if (d.size_counts[j] > 0) t.push_back({std::log(static_cast<double>(d.size_counts[j])), 0.0, static_cast<int>(j)});
  return t;
}

std::vector<LogTerm> new_terms(const NeighborData& d) {
  std::vector<LogTerm> t;
  for (const auto& [key, m] : d.closures)
    t.push_back({std::log(static_cast<double>(m)), static_cast<double>(key.second), key.first});
  return t;
}

double fp_limit(const NeighborData& d) {
  return d.size_counts.size() == 2 ? 1.0 / (d.weight * static_cast<double>(d.size_counts[1])) : 0.0;
}

double new_limit(const NeighborData& d) {
  int cmax = 0;
  for (const auto& [key, m] : d.closures) cmax = std::max(cmax, key.second);
  if (cmax > d.gamma_size) return 0.0;
  double singles = 0;
  for (const auto& [key, m] : d.closures) {
    if (key.second != cmax) continue;
    if (key.first >= 2) return 0.0;
    if (key.first == 1) singles += static_cast<double>(m);
  }
  return singles > 0 ? 1.0 / (d.weight * singles) : 0.0;
}

// Objectives for a list of polymers: the admissible scale is the minimum over polymers.
double fp_objective(const std::vector<NeighborData>& data, const std::vector<std::vector<LogTerm>>& terms, double mu) {
  double best = INFINITY;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].weight <= 0) continue;
    best = std::min(best, std::exp(std::log(mu) - std::log(data[i].weight) - log_sum(terms[i], mu)));
  }
  return best;
}

double new_objective(const std::vector<NeighborData>& data, const std::vector<std::vector<LogTerm>>& terms, double mu) {
  double best = INFINITY;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].weight <= 0) continue;
    double num = std::log(mu) + mu * data[i].gamma_size;
    best = std::min(best, std::exp(num - std::log(data[i].weight) - log_sum(terms[i], mu)));
  }
  return best;
}

void require_positive_weights(const std::vector<NeighborData>& data) {
  if (std::none_of(data.begin(), data.end(), [](const NeighborData& d) { return d.weight > 0; }))
    throw ContractError("all activities are zero; the bound is unbounded");
}

CriterionReport kp_impl(const std::vector<NeighborData>& data, const OptimizerOptions& opts) {
  require_positive_weights(data);
  double w = 0;
  for (const auto& d : data) w = std::max(w, d.gamma_activity);
  auto f = [w](double a) { return std::exp(std::log(a) - a - std::log(w)); };
  return make_report(CriterionId::kp, optimize_scalar(f, opts), "a");
}

CriterionReport fp_impl(const std::vector<NeighborData>& data, OptimizerOptions opts) {
  require_positive_weights(data);
  std::vector<std::vector<LogTerm>> terms;
  double limit = INFINITY;
  for (const auto& d : data) {
    terms.push_back(fp_terms(d));
    if (d.weight > 0) limit = std::min(limit, fp_limit(d));
  }
  opts.limit_at_infinity = limit;
  auto f = [&](double mu) { return fp_objective(data, terms, mu); };
  return make_report(CriterionId::fp, optimize_scalar(f, opts), "mu");
}

CriterionReport new_impl(const std::vector<NeighborData>& data, OptimizerOptions opts) {
  require_positive_weights(data);
  std::vector<std::vector<LogTerm>> terms;
  double limit = INFINITY;
  for (const auto& d : data) {
    terms.push_back(new_terms(d));
    if (d.weight > 0) limit = std::min(limit, new_limit(d));
  }
  opts.limit_at_infinity = limit;
  auto f = [&](double mu) { return new_objective(data, terms, mu); };
  return make_report(CriterionId::new_condition, optimize_scalar(f, opts), "mu");
}

std::vector<NeighborData> lattice_data(const LatticeShapeModel& model) {
  auto ls = models::lattice_neighborhood_system(model);
  return neighbor_data(ls.system, false, ls.center);
}

double gk_objective(int s, double a) { return std::exp(log_one_minus_exp_neg(a) - a * (s - 1) - std::log(s)); }

double lgoof_objective(int s, double v, double a) {
  return std::exp(log_one_minus_exp_neg(a * s) - a * (v - s) - std::log(s));
}

// Hard-sphere objective in t = alpha |B_R|.
double hardsphere_objective_t(int d, double radius, double t) {
  double c = std::ldexp(1.0, d);
  return std::exp(log_one_minus_exp_neg(t) - t * (c - 1.0) - models::log_ball_volume(d, radius));
}

struct BallTerms {
  double b1;
  std::vector<LogTerm> terms;  // in t = alpha |B_{r_1}|
};

BallTerms ball_terms(const BallSystem& sys) {
  const auto& r = sys.radii();
  int d = sys.dimension();
  BallTerms bt{models::ball_volume(d, r.front()), {}};
  for (std::size_t l = 0; l < r.size(); ++l) {
    double w = sys.weights()[l];
    if (w <= 0) continue;
    double ratio = std::pow((r[l] + r.front()) / r.front(), d);
    bt.terms.push_back({std::log(w) + models::log_ball_volume(d, r[l]), ratio - 1.0, 0});
  }
  if (bt.terms.empty()) throw ContractError("all ball weights are zero");
  return bt;
}

double gk_cont_objective_t(const BallTerms& bt, double t) {
  return std::exp(log_one_minus_exp_neg(t) - log_sum(bt.terms, t));
}

std::vector<LogTerm> tonks_discrete_terms(const RodSystem& sys) {
  std::vector<LogTerm> t;
  for (std::size_t i = 0; i < sys.lengths().size(); ++i)
    if (sys.weights()[i] > 0) t.push_back({std::log(sys.weights()[i]), sys.lengths()[i] - 1.0, 0});
  if (t.empty()) throw ContractError("all rod weights are zero");
  return t;
}

double tonks_discrete_objective(const std::vector<LogTerm>& terms, double a) {
  return std::exp(log_one_minus_exp_neg(a) - log_sum(terms, a));
}

// In t = alpha * L_1.
std::vector<LogTerm> tonks_continuous_terms(const RodSystem& sys) {
  std::vector<LogTerm> t;
  double l1 = sys.lengths().front();
  for (std::size_t i = 0; i < sys.lengths().size(); ++i)
    if (sys.weights()[i] > 0) t.push_back({std::log(sys.weights()[i]), sys.lengths()[i] / l1, 0});
  if (t.empty()) throw ContractError("all rod weights are zero");
  return t;
}

double tonks_continuous_objective_t(const std::vector<LogTerm>& terms, double l1, double t) {
  return std::exp(std::log(t / l1) - log_sum(terms, t));
}

// Single-length discrete rods and one-dimensional interval shapes are the same model.
std::optional<LatticeShapeModel> as_lattice(const RodSystem& sys) {
  if (sys.flavor() != RodFlavor::discrete) return std::nullopt;
  std::size_t active = 0, idx = 0;
  for (std::size_t i = 0; i < sys.weights().size(); ++i)
    if (sys.weights()[i] > 0) {
      ++active;
      idx = i;
    }
  if (active != 1) return std::nullopt;
  std::vector<models::Cell> cells;
  for (int c = 0; c < static_cast<int>(sys.lengths()[idx]); ++c) cells.push_back({c});
  return LatticeShapeModel(1, std::move(cells), sys.weights()[idx]);
}

std::optional<RodSystem> as_rods(const LatticeShapeModel& m) {
  if (m.dimension() != 1) return std::nullopt;
  const auto& s = m.shape();
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i][0] != static_cast<int>(i)) return std::nullopt;
  return RodSystem(RodFlavor::discrete, {static_cast<double>(s.size())}, {1.0});
}

// Side length when the shape is a full cube anchored at the origin.
std::optional<int> cube_side(const LatticeShapeModel& m) {
  auto span = m.span();
  int k = span.front() + 1;
  for (int s : span)
    if (s + 1 != k) return std::nullopt;
  double expected = std::pow(k, m.dimension());
  if (static_cast<double>(m.cell_count()) != expected) return std::nullopt;
  return k;
}

}  // namespace

std::string_view criterion_name(CriterionId id) {
  switch (id) {
    case CriterionId::kp: return "kp";
    case CriterionId::fp: return "fp";
    case CriterionId::new_condition: return "new";
    case CriterionId::gk: return "gk";
    case CriterionId::lgoof: return "lgoof";
    case CriterionId::hypercube: return "hypercube";
    case CriterionId::hardsphere: return "hardsphere";
    case CriterionId::gk_cont: return "gk-cont";
    case CriterionId::tonks_discrete: return "tonks-discrete";
    case CriterionId::tonks_continuous: return "tonks-continuous";
  }
  return "?";
}

const std::vector<CriterionId>& all_criteria() {
  static const std::vector<CriterionId> ids{CriterionId::kp,         CriterionId::fp,
                                            CriterionId::new_condition, CriterionId::gk,
                                            CriterionId::lgoof,      CriterionId::hypercube,
                                            CriterionId::hardsphere, CriterionId::gk_cont,
                                            CriterionId::tonks_discrete, CriterionId::tonks_continuous};
  return ids;
}

CriterionId parse_criterion(std::string_view name) {
  for (auto id : all_criteria())
    if (criterion_name(id) == name) return id;
  throw ContractError("unknown criterion '" + std::string(name) + "'");
}

bool criterion_is_strict(CriterionId id) {
  return id == CriterionId::hardsphere || id == CriterionId::gk_cont || id == CriterionId::tonks_continuous;
}

CriterionReport kp_bound(const AbstractPolymerSystem& system, const OptimizerOptions& opts) {
  return kp_impl(neighbor_data(system, true), opts);
}

CriterionReport kp_bound(const LatticeShapeModel& model, const OptimizerOptions& opts) {
  return kp_impl(lattice_data(model), opts);
}

CriterionReport fp_bound(const AbstractPolymerSystem& system, const OptimizerOptions& opts) {
  return fp_impl(neighbor_data(system, true), opts);
}

CriterionReport fp_bound(const LatticeShapeModel& model, const OptimizerOptions& opts) {
  return fp_impl(lattice_data(model), opts);
}

CriterionReport new_bound(const AbstractPolymerSystem& system, const OptimizerOptions& opts) {
  return new_impl(neighbor_data(system, true), opts);
}

CriterionReport new_bound(const LatticeShapeModel& model, const OptimizerOptions& opts) {
  return new_impl(lattice_data(model), opts);
}

CriterionReport gk_bound(const LatticeShapeModel& model, const OptimizerOptions& opts) {
  int s = model.cell_count();
  OptimizerOptions o = opts;
  o.limit_at_infinity = s == 1 ? 1.0 : 0.0;
  return make_report(CriterionId::gk, optimize_scalar([s](double a) { return gk_objective(s, a); }, o), "alpha");
}

CriterionReport lgoof_bound(const LatticeShapeModel& model, const OptimizerOptions& opts) {
  int s = model.cell_count();
  double v = static_cast<double>(models::v_count(model, model.shape()));
  OptimizerOptions o = opts;
  o.limit_at_infinity = v == s ? 1.0 / s : 0.0;
  return make_report(CriterionId::lgoof, optimize_scalar([s, v](double a) { return lgoof_objective(s, v, a); }, o),
                     "alpha");
}

double hypercube_closed_form(int d, int k) {
  if (d < 1 || k < 1) throw ContractError("hypercube closed form needs d >= 1 and k >= 1");
  if (k == 1) return 1.0;
  double c = std::pow(2.0 - 1.0 / k, d);
  double log_rhs = (c - 1.0) * std::log1p(-1.0 / c);
  return std::exp(log_rhs - d * std::log(2.0 * k - 1.0));
}

double hardsphere_closed_form(int d, double radius) {
  double c = std::ldexp(1.0, d);
  return std::exp((c - 1.0) * std::log1p(-1.0 / c) - models::log_ball_volume(d, 2.0 * radius));
}

CriterionReport hardsphere_bound(int d, double radius, const OptimizerOptions& opts) {
  if (d < 1 || !(radius > 0)) throw ContractError("hard-sphere bound needs d >= 1 and R > 0");
  OptimizerOptions o = opts;
  o.start = std::min(opts.start, std::ldexp(1e-3, -d));
  auto m = optimize_scalar([d, radius](double t) { return hardsphere_objective_t(d, radius, t); }, o);
  return make_report(CriterionId::hardsphere, m, "alpha", 1.0 / models::ball_volume(d, radius));
}

CriterionReport gk_cont_bound(const BallSystem& system, const OptimizerOptions& opts) {
  BallTerms bt = ball_terms(system);
  OptimizerOptions o = opts;
  double steep = 0;
  for (const auto& t : bt.terms) steep = std::max(steep, t.slope + 1.0);
  o.start = std::min(opts.start, 1e-3 / steep);
  auto m = optimize_scalar([&](double t) { return gk_cont_objective_t(bt, t); }, o);
  return make_report(CriterionId::gk_cont, m, "alpha", 1.0 / bt.b1);
}

CriterionReport tonks_discrete_bound(const RodSystem& system, const OptimizerOptions& opts) {
  if (system.flavor() != RodFlavor::discrete) throw ContractError("tonks-discrete needs discrete rods");
  auto terms = tonks_discrete_terms(system);
  OptimizerOptions o = opts;
  bool only_unit = terms.size() == 1 && terms.front().slope == 0.0;
  o.limit_at_infinity = only_unit ? std::exp(-terms.front().log_coef) : 0.0;
  auto m = optimize_scalar([&](double a) { return tonks_discrete_objective(terms, a); }, o);
  return make_report(CriterionId::tonks_discrete, m, "alpha");
}

double tonks_discrete_tangency(const RodSystem& system) {
  if (system.flavor() != RodFlavor::discrete) throw ContractError("tangency needs discrete rods");
  const auto& l = system.lengths();
  const auto& w = system.weights();
  double lmax = 0, wsum = 0;
  for (std::size_t i = 0; i < l.size(); ++i)
    if (w[i] > 0) {
      lmax = std::max(lmax, l[i]);
      wsum += w[i];
    }
  if (wsum <= 0) throw ContractError("all rod weights are zero");
  if (lmax <= 1.0) return 1.0 / wsum;  // monomers only: supremum as u -> infinity
  // Scaled by u^{-lmax} so large u stays finite: g(u) = (u-1) sum l w u^{l-1} - sum w u^l.
  auto g = [&](double u) {
    double s = 0;
    for (std::size_t i = 0; i < l.size(); ++i)
      if (w[i] > 0) s += w[i] * std::pow(u, l[i] - lmax) * ((u - 1.0) * l[i] / u - 1.0);
    return s;
  };
  double lo = 1.0, hi = 2.0;
  while (g(hi) < 0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  double u = 0.5 * (lo + hi);
  double deriv = 0;
  for (std::size_t i = 0; i < l.size(); ++i)
    if (w[i] > 0) deriv += l[i] * w[i] * std::pow(u, l[i] - 1.0);
  return 1.0 / deriv;
}

CriterionReport tonks_continuous_bound(const RodSystem& system, const OptimizerOptions& opts) {
  if (system.flavor() != RodFlavor::continuous) throw ContractError("tonks-continuous needs continuous rods");
  auto terms = tonks_continuous_terms(system);
  double l1 = system.lengths().front();
  auto m = optimize_scalar([&](double t) { return tonks_continuous_objective_t(terms, l1, t); }, opts);
  return make_report(CriterionId::tonks_continuous, m, "alpha", 1.0 / l1);
}

bool applicable(CriterionId id, const Model& model) {
  return std::visit(
      [id](const auto& m) -> bool {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AbstractPolymerSystem>) {
          return id == CriterionId::kp || id == CriterionId::fp || id == CriterionId::new_condition;
        } else if constexpr (std::is_same_v<T, LatticeShapeModel>) {
          switch (id) {
            case CriterionId::kp:
            case CriterionId::fp:
            case CriterionId::new_condition:
            case CriterionId::gk:
            case CriterionId::lgoof: return true;
            case CriterionId::hypercube: return cube_side(m).has_value();
            case CriterionId::tonks_discrete: return as_rods(m).has_value();
            default: return false;
          }
        } else if constexpr (std::is_same_v<T, RodSystem>) {
          if (m.flavor() == RodFlavor::continuous) return id == CriterionId::tonks_continuous;
          if (id == CriterionId::tonks_discrete) return true;
          bool lattice_like = id == CriterionId::kp || id == CriterionId::fp || id == CriterionId::new_condition ||
                              id == CriterionId::gk || id == CriterionId::lgoof;
          return lattice_like && as_lattice(m).has_value();
        } else {
          if (id == CriterionId::gk_cont) return true;
          return id == CriterionId::hardsphere && m.radii().size() == 1;
        }
      },
      model);
}

CriterionReport evaluate(CriterionId id, const Model& model, const OptimizerOptions& opts) {
  if (!applicable(id, model))
    throw ContractError("criterion '" + std::string(criterion_name(id)) + "' does not apply to this model kind");
  if (auto* a = std::get_if<AbstractPolymerSystem>(&model)) {
    if (id == CriterionId::kp) return kp_bound(*a, opts);
    if (id == CriterionId::fp) return fp_bound(*a, opts);
    return new_bound(*a, opts);
  }
  if (auto* b = std::get_if<BallSystem>(&model)) {
    if (id == CriterionId::hardsphere) return hardsphere_bound(b->dimension(), b->radii().front(), opts);
    return gk_cont_bound(*b, opts);
  }
  std::optional<LatticeShapeModel> lattice;
  std::optional<RodSystem> rods;
  if (auto* l = std::get_if<LatticeShapeModel>(&model)) {
    lattice = *l;
    rods = as_rods(*l);
  } else {
    rods = std::get<RodSystem>(model);
    lattice = as_lattice(*rods);
  }
  switch (id) {
    case CriterionId::kp: {
      auto r = kp_bound(*lattice, opts);
      if (!std::holds_alternative<LatticeShapeModel>(model)) r.z_max /= lattice->activity();
      return r;
    }
    case CriterionId::fp: {
      auto r = fp_bound(*lattice, opts);
      if (!std::holds_alternative<LatticeShapeModel>(model)) r.z_max /= lattice->activity();
      return r;
    }
    case CriterionId::new_condition: {
      auto r = new_bound(*lattice, opts);
      if (!std::holds_alternative<LatticeShapeModel>(model)) r.z_max /= lattice->activity();
      return r;
    }
    case CriterionId::gk: {
      auto r = gk_bound(*lattice, opts);
      if (!std::holds_alternative<LatticeShapeModel>(model)) r.z_max /= lattice->activity();
      return r;
    }
    case CriterionId::lgoof: {
      auto r = lgoof_bound(*lattice, opts);
      if (!std::holds_alternative<LatticeShapeModel>(model)) r.z_max /= lattice->activity();
      return r;
    }
    case CriterionId::hypercube: {
      int k = *cube_side(*lattice);
      CriterionReport r;
      r.criterion = "hypercube";
      r.z_max = hypercube_closed_form(lattice->dimension(), k);
      r.attained = k >= 2;
      r.strict = false;
      if (k >= 2) {
        double c = std::pow(2.0 - 1.0 / k, lattice->dimension());
        r.optimal_param = std::log(c / (c - 1.0)) / std::pow(k, lattice->dimension());
        r.param_name = "alpha";
      }
      return r;
    }
    case CriterionId::tonks_discrete: return tonks_discrete_bound(*rods, opts);
    case CriterionId::tonks_continuous: return tonks_continuous_bound(*rods, opts);
    default: break;
  }
  throw ContractError("criterion does not apply to this model kind");
}

namespace {

Verdict decide(double z, double threshold, double lhs, double rhs, bool strict, std::string detail = "") {
  bool holds = strict ? z < threshold : z <= threshold;
  return {holds, lhs, rhs, strict, std::move(detail)};
}

double constant_param(const AnsatzSpec& a, AnsatzKind want, const char* what) {
  if (a.kind != want || a.values.size() != 1)
    throw ContractError(std::string("criterion expects a constant ") + what + " ansatz");
  if (!(a.values[0] >= 0) || !std::isfinite(a.values[0])) throw ContractError("ansatz values must be non-negative");
  return a.values[0];
}

// Per-polymer sums for Kotecky-Preiss / Fernandez-Procacci / new condition.
Verdict per_polymer_verdict(const AbstractPolymerSystem& sys, CriterionId id, double z, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != sys.size()) throw ContractError("per-polymer ansatz needs one value per polymer");
  for (double v : p)
    if (!(v >= 0) || !std::isfinite(v)) throw ContractError("ansatz values must be non-negative");
  Verdict worst{true, 0, 0, false, ""};
  double worst_gap = -INFINITY;
  for (int x = 0; x < sys.size(); ++x) {
    double unit = 0, rhs = 0;
    double px = p[static_cast<std::size_t>(x)];
    if (id == CriterionId::kp) {
      for (int y : sys.gamma(x)) unit += sys.activity_value(y) * std::exp(p[static_cast<std::size_t>(y)]);
      rhs = px;
    } else {
      auto nb = models::neighborhood(sys, x);
      double gamma_mu = 0;
      for (int y : sys.gamma(x)) gamma_mu += p[static_cast<std::size_t>(y)];
      for (const auto& s : nb.subsets) {
        double term = 1;
        for (int y : s.members) term *= p[static_cast<std::size_t>(y)];
        if (id == CriterionId::new_condition) {
          std::vector<bool> covered(static_cast<std::size_t>(sys.size()), false);
          double e = 0;
          for (int y : s.members)
            for (int w : sys.gamma(y))
              if (!covered[static_cast<std::size_t>(w)]) {
                covered[static_cast<std::size_t>(w)] = true;
                e += p[static_cast<std::size_t>(w)];
              }
          term *= std::exp(e);
        }
        unit += term;
      }
      unit *= sys.activity_value(x);
      rhs = id == CriterionId::new_condition ? px * std::exp(gamma_mu) : px;
    }
    double lhs = z * unit;
    if (lhs > rhs) return {false, lhs, rhs, false, sys.id(x)};
    if (lhs - rhs > worst_gap) {
      worst_gap = lhs - rhs;
      worst = {true, lhs, rhs, false, sys.id(x)};
    }
  }
  return worst;
}

}  // namespace

Verdict feasibility(const Model& model, CriterionId id, double z, const AnsatzSpec& ansatz) {
  if (!(z >= 0) || !std::isfinite(z)) throw ContractError("activity must be finite and non-negative");
  if (!applicable(id, model))
    throw ContractError("criterion '" + std::string(criterion_name(id)) + "' does not apply to this model kind");
  bool strict = criterion_is_strict(id);

  if (auto* a = std::get_if<AbstractPolymerSystem>(&model)) {
    if (ansatz.kind == AnsatzKind::per_polymer) return per_polymer_verdict(*a, id, z, ansatz.values);
    double v = constant_param(ansatz, id == CriterionId::kp ? AnsatzKind::constant_alpha : AnsatzKind::constant_mu,
                              id == CriterionId::kp ? "a" : "mu");
    return per_polymer_verdict(*a, id, z, std::vector<double>(static_cast<std::size_t>(a->size()), v));
  }
  if (ansatz.kind == AnsatzKind::per_polymer)
    throw ContractError("per-polymer ansatz is only supported for abstract systems");

  if (auto* b = std::get_if<BallSystem>(&model)) {
    double alpha = constant_param(ansatz, AnsatzKind::constant_alpha, "alpha");
    int d = b->dimension();
    if (id == CriterionId::hardsphere) {
      double r = b->radii().front();
      double br = models::ball_volume(d, r);
      double lhs = br * std::exp(alpha * models::ball_volume(d, 2 * r)) * z;
      double rhs = std::expm1(alpha * br);
      return decide(z, alpha > 0 ? hardsphere_objective_t(d, r, alpha * br) : 0.0, lhs, rhs, strict);
    }
    BallTerms bt = ball_terms(*b);
    double lhs = 0;
    for (std::size_t l = 0; l < b->radii().size(); ++l)
      lhs += models::ball_volume(d, b->radii()[l]) *
             std::exp(alpha * models::ball_volume(d, b->radii()[l] + b->radii().front())) * z * b->weights()[l];
    double rhs = std::expm1(alpha * bt.b1);
    return decide(z, alpha > 0 ? gk_cont_objective_t(bt, alpha * bt.b1) : 0.0, lhs, rhs, strict);
  }

  std::optional<LatticeShapeModel> lattice;
  std::optional<RodSystem> rods;
  double scale = 1.0;
  if (auto* l = std::get_if<LatticeShapeModel>(&model)) {
    lattice = *l;
    rods = as_rods(*l);
  } else {
    rods = std::get<RodSystem>(model);
    lattice = as_lattice(*rods);
    if (lattice) scale = lattice->activity();
  }
  double zz = z * scale;  // rods: z multiplies the weight profile

  switch (id) {
    case CriterionId::kp: {
      double a = constant_param(ansatz, AnsatzKind::constant_alpha, "a");
      double g = static_cast<double>(lattice_data(*lattice).front().gamma_size);
      double lhs = zz * g * std::exp(a);
      return decide(zz, a > 0 ? std::exp(std::log(a) - a - std::log(g)) : 0.0, lhs, a, strict);
    }
    case CriterionId::fp:
    case CriterionId::new_condition: {
      double mu = constant_param(ansatz, AnsatzKind::constant_mu, "mu");
      auto data = lattice_data(*lattice);
      std::vector<std::vector<LogTerm>> terms{id == CriterionId::fp ? fp_terms(data[0]) : new_terms(data[0])};
      if (mu == 0) return decide(zz, 0.0, zz, 0.0, strict);
      double den = std::exp(log_sum(terms[0], mu));
      double rhs = id == CriterionId::fp ? mu : mu * std::exp(mu * data[0].gamma_size);
      double thr = id == CriterionId::fp ? fp_objective(data, terms, mu) : new_objective(data, terms, mu);
      return decide(zz, thr, zz * den, rhs, strict);
    }
    case CriterionId::gk:
    case CriterionId::lgoof: {
      double a = constant_param(ansatz, AnsatzKind::constant_alpha, "alpha");
      int s = lattice->cell_count();
      double v = static_cast<double>(models::v_count(*lattice, lattice->shape()));
      if (id == CriterionId::gk) {
        double lhs = s * zz * std::exp(a * s);
        return decide(zz, a > 0 ? gk_objective(s, a) : 0.0, lhs, std::expm1(a), strict);
      }
      double lhs = s * std::exp(a * v) * zz;
      return decide(zz, a > 0 ? lgoof_objective(s, v, a) : 0.0, lhs, std::expm1(a * s), strict);
    }
    case CriterionId::hypercube: {
      int k = *cube_side(*lattice);
      double bound = hypercube_closed_form(lattice->dimension(), k);
      return decide(zz, bound, zz, bound, strict);
    }
    case CriterionId::tonks_discrete: {
      double a = constant_param(ansatz, AnsatzKind::constant_alpha, "alpha");
      auto terms = tonks_discrete_terms(*rods);
      double lhs = 0;
      for (std::size_t i = 0; i < rods->lengths().size(); ++i)
        lhs += z * rods->weights()[i] * std::exp(a * rods->lengths()[i]);
      return decide(z, a > 0 ? tonks_discrete_objective(terms, a) : 0.0, lhs, std::expm1(a), strict);
    }
    case CriterionId::tonks_continuous: {
      double a = constant_param(ansatz, AnsatzKind::constant_alpha, "alpha");
      auto terms = tonks_continuous_terms(*rods);
      double l1 = rods->lengths().front();
      double lhs = 0;
      for (std::size_t i = 0; i < rods->lengths().size(); ++i)
        lhs += z * rods->weights()[i] * std::exp(a * rods->lengths()[i]);
      return decide(z, a > 0 ? tonks_continuous_objective_t(terms, l1, a * l1) : 0.0, lhs, a, strict);
    }
    default: break;
  }
  throw ContractError("criterion does not apply to this model kind");
}

}  // namespace kscluster::criteria
