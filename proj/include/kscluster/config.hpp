#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kscluster/criteria.hpp"
#include "kscluster/graphkit.hpp"

namespace kscluster::config {

enum class ModelKind { abstract, lattice_shape, rods_discrete, rods_continuous, balls, points };

std::string_view kind_name(ModelKind kind);

struct ModelConfig {
  std::string id;
  ModelKind kind;
  // Set for every kind except `points`.
  std::optional<criteria::Model> model;
  // Set for `points` only.
  std::optional<graphkit::PointConfig> points;
  // Optional exact activity for lattice and rod models, "p/q" in the document.
  std::optional<Rational> exact_z;
};

struct ConfigDocument {
  std::vector<ModelConfig> models;
  std::string digest;  // FNV-1a 64-bit of the raw bytes, hex
};

// Accepts {"schema": 1, "models": [...]} or a single model object carrying "kind".
ConfigDocument parse_config(const std::string& text);
ConfigDocument load_config(const std::string& path);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace kscluster::config
