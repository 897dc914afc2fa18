#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kscluster/models.hpp"

namespace kscluster::criteria {

struct OptimizerOptions {
  double tol = 1e-10;      // final bracket width on the parameter
  double start = 1e-6;     // first point of the doubling expansion
  double ceiling = 1e3;    // largest parameter explored
  int grid_points = 1024;  // log-spaced cross-check
  double limit_at_infinity = 0.0;  // supremum reported when the objective keeps growing
};

struct OptimizerDiagnostics {
  int evaluations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double tolerance = 0.0;
  bool hit_ceiling = false;
  bool reseeded = false;
};

struct ScalarMaximum {
  double argmax;
  double max;
  bool attained;
  OptimizerDiagnostics diagnostics;
};

ScalarMaximum optimize_scalar(const std::function<double(double)>& objective, const OptimizerOptions& opts = {});

enum class CriterionId { kp, fp, new_condition, gk, lgoof, hypercube, hardsphere, gk_cont, tonks_discrete, tonks_continuous };

std::string_view criterion_name(CriterionId id);
CriterionId parse_criterion(std::string_view name);
const std::vector<CriterionId>& all_criteria();
bool criterion_is_strict(CriterionId id);

enum class AnsatzKind { constant_alpha, constant_mu, per_polymer };

struct AnsatzSpec {
  AnsatzKind kind;
  std::vector<double> values;  // one value for constant kinds, one per polymer otherwise

  static AnsatzSpec alpha(double a) { return {AnsatzKind::constant_alpha, {a}}; }
  static AnsatzSpec mu(double m) { return {AnsatzKind::constant_mu, {m}}; }
  static AnsatzSpec per_polymer(std::vector<double> v) { return {AnsatzKind::per_polymer, std::move(v)}; }
};

struct Verdict {
  bool holds;
  double lhs;
  double rhs;
  bool strict;
  std::string detail;  // worst polymer for per-polymer checks
};

struct FeasibilityPoint {
  double z;
  Verdict verdict;
};

struct CriterionReport {
  std::string criterion;
  std::string model_id;
  double z_max = 0.0;
  double optimal_param = 0.0;
  std::string param_name;  // "a", "mu", "alpha" or "" for closed forms
  bool attained = true;
  bool strict = false;
  std::optional<FeasibilityPoint> feasible_at;
  std::optional<OptimizerDiagnostics> diagnostics;
};

using Model = std::variant<models::AbstractPolymerSystem, models::LatticeShapeModel, models::RodSystem, models::BallSystem>;

// Abstract systems: activities act as weights and z_max is the largest admissible scale factor.
CriterionReport kp_bound(const models::AbstractPolymerSystem& system, const OptimizerOptions& opts = {});
CriterionReport kp_bound(const models::LatticeShapeModel& model, const OptimizerOptions& opts = {});
CriterionReport fp_bound(const models::AbstractPolymerSystem& system, const OptimizerOptions& opts = {});
CriterionReport fp_bound(const models::LatticeShapeModel& model, const OptimizerOptions& opts = {});
CriterionReport new_bound(const models::AbstractPolymerSystem& system, const OptimizerOptions& opts = {});
CriterionReport new_bound(const models::LatticeShapeModel& model, const OptimizerOptions& opts = {});
CriterionReport gk_bound(const models::LatticeShapeModel& model, const OptimizerOptions& opts = {});
CriterionReport lgoof_bound(const models::LatticeShapeModel& model, const OptimizerOptions& opts = {});
double hypercube_closed_form(int d, int k);
CriterionReport hardsphere_bound(int d, double radius, const OptimizerOptions& opts = {});
double hardsphere_closed_form(int d, double radius);
CriterionReport gk_cont_bound(const models::BallSystem& system, const OptimizerOptions& opts = {});
CriterionReport tonks_discrete_bound(const models::RodSystem& system, const OptimizerOptions& opts = {});
// Independent route through the tangency of h(u) = 1 + z sum w u^l with the diagonal.
double tonks_discrete_tangency(const models::RodSystem& system);
CriterionReport tonks_continuous_bound(const models::RodSystem& system, const OptimizerOptions& opts = {});

// Dispatch by model kind; throws ContractError when the criterion does not apply.
CriterionReport evaluate(CriterionId id, const Model& model, const OptimizerOptions& opts = {});
bool applicable(CriterionId id, const Model& model);

Verdict feasibility(const Model& model, CriterionId id, double z, const AnsatzSpec& ansatz);

}  // namespace kscluster::criteria
