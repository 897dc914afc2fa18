#include "kscluster/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "kscluster/errors.hpp"

namespace kscluster::config {

using nlohmann::json;

namespace {

const json& require(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + "." + key, "missing field");
  return *it;
}

Rational rational_field(const json& v, const std::string& field) {
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(field, e.what());
    }
  }
  if (v.is_number_integer()) return Rational(static_cast<long>(v.get<std::int64_t>()));
  if (v.is_number()) return Rational(v.get<double>());
  throw ConfigError(field, "expected a number or a \"p/q\" string");
}

double real_field(const json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return rational_field(v, field).get_d();
  throw ConfigError(field, "expected a number");
}

std::vector<double> real_list(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a nonempty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(real_field(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

int int_field(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
  return v.get<int>();
}

std::vector<models::Cell> cell_list(const json& v, int dimension, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a nonempty list of cells");
  std::vector<models::Cell> cells;
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::string f = field + "[" + std::to_string(i) + "]";
    const json& c = v[i];
    models::Cell cell;
    if (c.is_number_integer() && dimension == 1) {
      cell.push_back(c.get<int>());
    } else if (c.is_array()) {
      for (const auto& x : c) cell.push_back(int_field(x, f));
    } else {
      throw ConfigError(f, "expected an integer vector");
    }
    if (static_cast<int>(cell.size()) != dimension) throw ConfigError(f, "cell dimension differs from \"dimension\"");
    cells.push_back(std::move(cell));
  }
  return cells;
}

template <typename Fn>
auto guarded(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const ContractError& e) {
    throw ConfigError(field, e.what());
  }
}

ModelConfig parse_model(const json& m, std::size_t index) {
  std::string where = "models[" + std::to_string(index) + "]";
  if (!m.is_object()) throw ConfigError(where, "expected an object");
  ModelConfig out;
  const json& kind = require(m, "kind", where);
  if (!kind.is_string()) throw ConfigError(where + ".kind", "expected a string");
  std::string k = kind.get<std::string>();
  out.id = m.contains("id") ? m["id"].get<std::string>() : k + "-" + std::to_string(index);

  if (k == "abstract") {
    out.kind = ModelKind::abstract;
    const json& polys = require(m, "polymers", where);
    if (!polys.is_array() || polys.empty()) throw ConfigError(where + ".polymers", "expected a nonempty array");
    std::vector<std::string> ids;
    std::vector<Rational> acts;
    for (std::size_t i = 0; i < polys.size(); ++i) {
      std::string f = where + ".polymers[" + std::to_string(i) + "]";
      const json& p = polys[i];
      if (p.is_string()) {
        ids.push_back(p.get<std::string>());
        acts.emplace_back(1);
      } else if (p.is_object()) {
        ids.push_back(require(p, "id", f).get<std::string>());
        acts.push_back(p.contains("activity") ? rational_field(p["activity"], f + ".activity") : Rational(1));
      } else {
        throw ConfigError(f, "expected a string or {id, activity}");
      }
    }
    std::map<std::string, int> index_of;
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (!index_of.emplace(ids[i], static_cast<int>(i)).second) throw ConfigError(where + ".polymers", "duplicate id " + ids[i]);
    std::vector<std::pair<int, int>> pairs;
    if (m.contains("incompatible")) {
      const json& inc = m["incompatible"];
      if (!inc.is_array()) throw ConfigError(where + ".incompatible", "expected an array of pairs");
      for (std::size_t i = 0; i < inc.size(); ++i) {
        std::string f = where + ".incompatible[" + std::to_string(i) + "]";
        if (!inc[i].is_array() || inc[i].size() != 2) throw ConfigError(f, "expected a pair of polymer ids");
        auto a = index_of.find(inc[i][0].get<std::string>());
        auto b = index_of.find(inc[i][1].get<std::string>());
        if (a == index_of.end() || b == index_of.end()) throw ConfigError(f, "unknown polymer id");
        pairs.emplace_back(a->second, b->second);
      }
    }
    out.model = guarded(where, [&] { return criteria::Model(models::AbstractPolymerSystem::from_pairs(ids, acts, pairs)); });
  } else if (k == "lattice-shape") {
    out.kind = ModelKind::lattice_shape;
    int d = int_field(require(m, "dimension", where), where + ".dimension");
    if (d < 1) throw ConfigError(where + ".dimension", "must be positive");
    auto cells = cell_list(require(m, "shape", where), d, where + ".shape");
    double z = 0;
    if (m.contains("z")) {
      out.exact_z = rational_field(m["z"], where + ".z");
      z = out.exact_z->get_d();
    }
    out.model = guarded(where + ".shape", [&] { return criteria::Model(models::LatticeShapeModel(d, cells, z)); });
  } else if (k == "rods-discrete" || k == "rods-continuous") {
    bool discrete = k == "rods-discrete";
    out.kind = discrete ? ModelKind::rods_discrete : ModelKind::rods_continuous;
    auto lengths = real_list(require(m, "lengths", where), where + ".lengths");
    std::vector<double> weights(lengths.size(), 1.0);
    if (m.contains("weights")) weights = real_list(m["weights"], where + ".weights");
    if (weights.size() != lengths.size()) throw ConfigError(where + ".weights", "needs one weight per length");
    std::optional<double> delta;
    if (m.contains("min_length")) delta = real_field(m["min_length"], where + ".min_length");
    if (m.contains("z")) out.exact_z = rational_field(m["z"], where + ".z");
    out.model = guarded(where + ".lengths", [&] {
      return criteria::Model(models::RodSystem(discrete ? models::RodFlavor::discrete : models::RodFlavor::continuous,
                                               lengths, weights, delta));
    });
  } else if (k == "balls") {
    out.kind = ModelKind::balls;
    int d = int_field(require(m, "dimension", where), where + ".dimension");
    auto radii = real_list(require(m, "radii", where), where + ".radii");
    std::vector<double> weights(radii.size(), 1.0);
    if (m.contains("weights")) weights = real_list(m["weights"], where + ".weights");
    if (weights.size() != radii.size()) throw ConfigError(where + ".weights", "needs one weight per radius");
    out.model = guarded(where + ".radii", [&] { return criteria::Model(models::BallSystem(d, radii, weights)); });
  } else if (k == "points") {
    out.kind = ModelKind::points;
    const json& mat = require(m, "mayer", where);
    if (!mat.is_array() || mat.empty()) throw ConfigError(where + ".mayer", "expected a nonempty square matrix");
    std::vector<std::vector<Rational>> rows;
    for (std::size_t i = 0; i < mat.size(); ++i) {
      if (!mat[i].is_array() || mat[i].size() != mat.size())
        throw ConfigError(where + ".mayer[" + std::to_string(i) + "]", "row length differs from matrix size");
      std::vector<Rational> row;
      for (std::size_t j = 0; j < mat[i].size(); ++j)
        row.push_back(rational_field(mat[i][j], where + ".mayer[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
      rows.push_back(std::move(row));
    }
    out.points = guarded(where + ".mayer", [&] { return graphkit::PointConfig(rows); });
  } else {
    throw ConfigError(where + ".kind", "unknown kind \"" + k + "\"");
  }
  return out;
}

}  // namespace

std::string_view kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::abstract: return "abstract";
    case ModelKind::lattice_shape: return "lattice-shape";
    case ModelKind::rods_discrete: return "rods-discrete";
    case ModelKind::rods_continuous: return "rods-continuous";
    case ModelKind::balls: return "balls";
    case ModelKind::points: return "points";
  }
  return "?";
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ConfigDocument parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("document", e.what());
  }
  if (!doc.is_object()) throw ConfigError("document", "expected a JSON object");
  if (doc.contains("schema") && doc["schema"] != 1) throw ConfigError("schema", "unsupported schema version");
  ConfigDocument out;
  out.digest = fnv1a_hex(text);
  try {
    if (doc.contains("models")) {
      const json& list = doc["models"];
      if (!list.is_array() || list.empty()) throw ConfigError("models", "expected a nonempty array");
      for (std::size_t i = 0; i < list.size(); ++i) out.models.push_back(parse_model(list[i], i));
    } else {
      out.models.push_back(parse_model(doc, 0));
    }
  } catch (const json::exception& e) {
    throw ConfigError("models", e.what());
  }
  std::set<std::string> ids;
  for (const auto& m : out.models)
    if (!ids.insert(m.id).second) throw ConfigError("id", "duplicate model id " + m.id);
  return out;
}

ConfigDocument load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace kscluster::config
