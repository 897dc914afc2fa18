#include <chrono>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kscluster/config.hpp"
#include "kscluster/criteria.hpp"
#include "kscluster/errors.hpp"
#include "kscluster/kssolver.hpp"
#include "kscluster/report.hpp"
#include "kscluster/suites.hpp"

namespace {

using namespace kscluster;
using nlohmann::json;

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kCapacity = 3, kNumeric = 4 };

struct Common {
  std::string config;
  std::string format = "json";
  std::string out;
  bool timings = false;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void emit(const Common& c, const std::string& csv, const json& doc) {
  std::string js = doc.dump(2) + "\n";
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("out", "cannot write " + path);
    f << text;
  };
  if (c.format == "csv") {
    c.out.empty() ? void(std::cout << csv) : write(c.out, csv);
  } else if (c.format == "json") {
    c.out.empty() ? void(std::cout << js) : write(c.out, js);
  } else {
    if (c.out.empty()) {
      std::cout << csv << js;
    } else {
      write(c.out + ".csv", csv);
      write(c.out + ".json", js);
    }
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_criteria(const Common& c, const std::string& selector, double tol, bool parallel) {
  auto doc = config::load_config(c.config);
  bool all = selector.empty() || selector == "all";
  std::vector<criteria::CriterionId> wanted;
  if (all) {
    wanted = criteria::all_criteria();
  } else {
    for (const auto& name : split_list(selector)) {
      try {
        wanted.push_back(criteria::parse_criterion(name));
      } catch (const ContractError& e) {
        throw ConfigError("criterion", e.what());
      }
    }
  }
  criteria::OptimizerOptions opts;
  opts.tol = tol;

  struct Task {
    const config::ModelConfig* model;
    criteria::CriterionId id;
  };
  std::vector<Task> tasks;
  for (const auto& m : doc.models) {
    if (!m.model) continue;
    for (auto id : wanted) {
      if (criteria::applicable(id, *m.model)) {
        tasks.push_back({&m, id});
      } else if (!all) {
        throw ConfigError("criterion", std::string(criteria::criterion_name(id)) + " does not apply to model " + m.id +
                                           " of kind " + std::string(config::kind_name(m.kind)));
      }
    }
  }
  struct Outcome {
    criteria::CriterionReport report;
    double ms;
  };
  auto run = [&](const Task& t) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = criteria::evaluate(t.id, *t.model->model, opts);
    r.model_id = t.model->id;
    return Outcome{r, elapsed_ms(t0)};
  };
  std::vector<Outcome> results;
  if (parallel) {
    std::vector<std::future<Outcome>> futures;
    for (const auto& t : tasks) futures.push_back(std::async(std::launch::async, run, t));
    for (auto& f : futures) results.push_back(f.get());
  } else {
    for (const auto& t : tasks) results.push_back(run(t));
  }

  std::string csv = report::criteria_csv_header() + "\n";
  json out = report::envelope("criteria", doc.digest);
  out["tolerance"] = tol;
  out["results"] = json::array();
  for (const auto& r : results) {
    csv += report::criteria_csv_row(r.report) + "\n";
    json j = report::criterion_json(r.report);
    if (c.timings) j["wall_ms"] = r.ms;
    out["results"].push_back(j);
  }
  emit(c, csv, out);
  return kOk;
}

int cmd_verify(const Common& c, const std::string& selector, std::uint64_t seed, int trials) {
  suites::SuiteOptions opts;
  opts.seed = seed;
  opts.trials = trials;
  std::string digest;
  if (!c.config.empty()) {
    auto doc = config::load_config(c.config);
    digest = doc.digest;
    for (const auto& m : doc.models)
      if (m.points) opts.points.push_back(*m.points);
  }
  std::vector<std::string> names;
  for (const auto& n : split_list(selector.empty() ? "all" : selector)) {
    if (n == "all") {
      names.insert(names.end(), suites::suite_names().begin(), suites::suite_names().end());
    } else if (suites::is_suite(n)) {
      names.push_back(n);
    } else {
      throw ConfigError("suite", "unknown suite \"" + n + "\"");
    }
  }
  json out = report::envelope("verify", digest);
  out["seed"] = seed;
  out["trials"] = trials;
  out["results"] = json::array();
  std::string csv = "suite,ok,checks\n";
  bool ok = true;
  for (const auto& n : names) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = suites::run_suite(n, opts);
    json j = report::suite_json(r);
    if (c.timings) j["wall_ms"] = elapsed_ms(t0);
    out["results"].push_back(j);
    csv += r.name + "," + (r.ok ? "true" : "false") + "," + std::to_string(r.checks) + "\n";
    ok = ok && r.ok;
  }
  out["ok"] = ok;
  emit(c, csv, out);
  return ok ? kOk : kFailed;
}

models::CellSet parse_domain(const std::string& text, int dimension) {
  json j;
  try {
    j = json::parse(text.empty() ? "[]" : text);
  } catch (const json::parse_error& e) {
    throw ConfigError("domain", e.what());
  }
  if (!j.is_array()) throw ConfigError("domain", "expected a JSON array of cells");
  std::vector<models::Cell> cells;
  for (const auto& c : j) {
    models::Cell cell;
    if (c.is_number_integer()) {
      cell.push_back(c.get<int>());
    } else if (c.is_array()) {
      for (const auto& x : c) {
        if (!x.is_number_integer()) throw ConfigError("domain", "cell coordinates must be integers");
        cell.push_back(x.get<int>());
      }
    } else {
      throw ConfigError("domain", "cells must be integers or integer arrays");
    }
    if (static_cast<int>(cell.size()) != dimension) throw ConfigError("domain", "cell dimension differs from the model");
    cells.push_back(std::move(cell));
  }
  return models::make_cell_set(std::move(cells));
}

int cmd_tn(const Common& c, const std::string& model_id, const std::string& domain_text, int N, std::string z_text,
           const std::string& mode, bool probe) {
  auto doc = config::load_config(c.config);
  const config::ModelConfig* chosen = nullptr;
  for (const auto& m : doc.models)
    if ((model_id.empty() && (m.kind == config::ModelKind::lattice_shape || m.kind == config::ModelKind::rods_discrete)) ||
        m.id == model_id) {
      chosen = &m;
      break;
    }
  if (!chosen) throw ConfigError("model", model_id.empty() ? "no lattice-shape or rods-discrete model" : "unknown model " + model_id);
  kssolver::SubsetFamily family;
  if (chosen->kind == config::ModelKind::lattice_shape) {
    family = kssolver::SubsetFamily::from_lattice(std::get<models::LatticeShapeModel>(*chosen->model));
  } else if (chosen->kind == config::ModelKind::rods_discrete) {
    family = kssolver::SubsetFamily::from_rods(std::get<models::RodSystem>(*chosen->model));
  } else {
    throw ConfigError("model", "tn needs a lattice-shape or rods-discrete model");
  }
  Rational z;
  if (!z_text.empty()) {
    try {
      z = parse_rational(z_text);
    } catch (const std::exception& e) {
      throw ConfigError("z", e.what());
    }
  } else if (chosen->exact_z) {
    z = *chosen->exact_z;
  } else {
    throw ConfigError("z", "no activity given on the command line or in the model");
  }
  if (z < 0) throw ConfigError("z", "activity must be non-negative");
  auto domain = parse_domain(domain_text, family.dimension);
  json out = report::envelope("tn", doc.digest);
  out["model_id"] = chosen->id;
  out["z"] = to_string(z);
  json dom = json::array();
  for (const auto& cell : domain) dom.push_back(cell);
  out["domain"] = dom;

  if (probe) {
    auto r = kssolver::stabilization_probe(family, domain, z.get_d());
    const char* names[] = {"stabilized", "diverged", "ceiling"};
    out["probe"] = {{"outcome", names[static_cast<int>(r.outcome)]}, {"order", r.order}, {"period", r.period},
                    {"value", r.value}, {"relative_change", r.relative_change}};
    std::string csv = "outcome,order,period,value,relative_change\n" + std::string(names[static_cast<int>(r.outcome)]) +
                      "," + std::to_string(r.order) + "," + std::to_string(r.period) + "," +
                      report::format_sig9(r.value) + "," + report::format_sig9(r.relative_change) + "\n";
    emit(c, csv, out);
    return kOk;
  }
  if (N < 1) throw ConfigError("N", "truncation order must be at least 1");
  if (mode != "recursive" && mode != "direct" && mode != "both") throw ConfigError("mode", "expected recursive|direct|both");
  kssolver::TnTable<Rational> table(family, z);
  out["mode"] = mode;
  out["rows"] = json::array();
  std::string csv = "N,recursive,direct,value\n";
  bool equal = true;
  for (int n = 1; n <= N; ++n) {
    json row = {{"N", n}};
    std::string rec_s, dir_s;
    Rational shown;
    if (mode != "direct") {
      Rational v = table.value(domain, n);
      row["recursive"] = rec_s = to_string(v);
      shown = v;
    }
    if (mode != "recursive") {
      Rational v = kssolver::tn_direct(family, domain, n, z);
      row["direct"] = dir_s = to_string(v);
      if (mode == "direct") shown = v;
      if (mode == "both" && v != shown) equal = false;
    }
    row["value"] = shown.get_d();
    out["rows"].push_back(row);
    csv += std::to_string(n) + "," + rec_s + "," + dir_s + "," + report::format_sig9(shown.get_d()) + "\n";
  }
  if (mode == "both") out["equal"] = equal;
  emit(c, csv, out);
  return equal ? kOk : kFailed;
}

int cmd_beta(const Common& c, std::uint64_t seed, int trials, const std::string& mu_text, const std::string& edges_text,
             const std::string& exclude_text) {
  json out = report::envelope("beta", "");
  if (!mu_text.empty()) {
    kssolver::QGraph q;
    for (const auto& m : split_list(mu_text)) q.mu.push_back(std::stod(m));
    q.size = static_cast<int>(q.mu.size());
    q.adjacency.assign(q.mu.size(), 0u);
    for (const auto& e : split_list(edges_text)) {
      auto dash = e.find('-');
      if (dash == std::string::npos) throw ConfigError("edges", "expected i-j pairs");
      int i = std::stoi(e.substr(0, dash)), j = std::stoi(e.substr(dash + 1));
      if (i < 0 || j < 0 || i >= q.size || j >= q.size || i == j) throw ConfigError("edges", "vertex out of range: " + e);
      q.adjacency[static_cast<std::size_t>(i)] |= 1u << j;
      q.adjacency[static_cast<std::size_t>(j)] |= 1u << i;
    }
    std::uint32_t u = 0;
    for (const auto& x : split_list(exclude_text)) {
      int v = std::stoi(x);
      if (v < 0 || v >= q.size) throw ConfigError("exclude", "vertex out of range: " + x);
      u |= 1u << v;
    }
    double b = kssolver::beta_coefficient(q, u);
    out["beta"] = b;
    emit(c, "beta\n" + report::format_sig9(b) + "\n", out);
    return kOk;
  }
  suites::SuiteOptions opts;
  opts.seed = seed;
  opts.trials = trials;
  auto r = suites::run_suite("beta", opts);
  out["seed"] = seed;
  out["trials"] = trials;
  out["result"] = report::suite_json(r);
  double min_beta = r.stats["min_beta"].get<double>();
  emit(c, "ok,checks,min_beta\n" + std::string(r.ok ? "true" : "false") + "," + std::to_string(r.checks) + "," +
              report::format_sig9(min_beta) + "\n",
       out);
  return r.ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster-expansion convergence criteria and identity checks for hard-core polymer systems"};
  app.set_version_flag("--version", kscluster::report::version());
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto opt = sub->add_option("--config", common.config, "Model config (JSON)");
    if (config_required) opt->required();
    sub->add_option("--format", common.format, "csv|json|both")->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--out", common.out, "Output path (stdout by default)");
    sub->add_flag("--timings", common.timings, "Include wall-clock per task");
  };

  std::string criterion;
  double tol = 1e-10;
  bool parallel = false;
  auto* crit = app.add_subcommand("criteria", "Evaluate convergence criteria");
  add_common(crit, true);
  crit->add_option("--criterion", criterion, "NAME[,NAME...] or all");
  crit->add_option("--tol", tol, "Optimizer tolerance on the parameter");
  crit->add_flag("--parallel", parallel, "Run model x criterion tasks concurrently");

  std::string suite;
  std::uint64_t seed = 1;
  int trials = 200;
  auto* verify = app.add_subcommand("verify", "Run exact identity suites");
  add_common(verify, false);
  verify->add_option("--suite", suite, "NAME[,NAME...] or all");
  verify->add_option("--seed", seed, "64-bit seed");
  verify->add_option("--trials", trials, "Random instances per suite");

  std::string model_id, domain = "[0]", z_text, mode = "recursive";
  int N = 1;
  bool probe = false;
  auto* tn = app.add_subcommand("tn", "Truncated partial sums for subset polymers");
  add_common(tn, true);
  tn->add_option("--model", model_id, "Model id (defaults to the first eligible model)");
  tn->add_option("--domain", domain, "JSON array of cells, e.g. [0,1] or [[0,0],[1,0]]");
  tn->add_option("--N", N, "Largest truncation order");
  tn->add_option("--z", z_text, "Activity, exact \"p/q\"");
  tn->add_option("--mode", mode, "recursive|direct|both");
  tn->add_flag("--probe", probe, "Run the stabilization probe in floating point");

  std::string mu, edges, exclude;
  auto* beta = app.add_subcommand("beta", "Coefficients beta_U on a finite graph Q");
  add_common(beta, false);
  beta->add_option("--seed", seed, "64-bit seed");
  beta->add_option("--trials", trials, "Random instances");
  beta->add_option("--mu", mu, "Comma-separated mu per vertex (single instance)");
  beta->add_option("--edges", edges, "Comma-separated i-j adjacencies");
  beta->add_option("--exclude", exclude, "Comma-separated vertices of U");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*crit) return cmd_criteria(common, criterion, tol, parallel);
    if (*verify) return cmd_verify(common, suite, seed, trials);
    if (*tn) return cmd_tn(common, model_id, domain, N, z_text, mode, probe);
    if (*beta) return cmd_beta(common, seed, trials, mu, edges, exclude);
  } catch (const kscluster::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kCapacity;
  } catch (const kscluster::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const kscluster::ContractError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kOk;
}
