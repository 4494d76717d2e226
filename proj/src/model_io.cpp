#include "acr/model_io.hpp"

#include <cmath>
#include <json.hpp>

#include "acr/csv.hpp"
#include "acr/errors.hpp"

namespace acr {

namespace {

using nlohmann::json;

std::string number(double x) {
  if (!std::isfinite(x)) throw ConfigError("model contains a non-finite number");
  return format_number(x);
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError("model JSON: " + where + " must be a number");
  return j.get<double>();
}

const json& field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) throw ConfigError(std::string("model JSON: missing field '") + name + "'");
  return *it;
}

}  // namespace

std::string model_to_json(const TransitionModel& model) {
  const std::size_t n = model.size();
  std::string out = "{\n  \"direction\": " + json(std::string(to_string(model.direction()))).dump() +
                    ",\n  \"f_opt\": " + number(model.f_opt()) + ",\n  \"states\": [";
  for (std::size_t i = 0; i < n; ++i) {
    out += i ? ",\n    " : "\n    ";
    out += "{\"label\": " + json(model.state_labels()[i]).dump() +
           ", \"fitness\": " + number(model.fitness()[i]) + "}";
  }
  out += "\n  ],\n  \"Q\": [";
  for (std::size_t i = 0; i < n; ++i) {
    out += i ? ",\n    [" : "\n    [";
    const auto row = model.transitions().row(i);
    auto it = row.begin();
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      if (it != row.end() && it->col == j) v = (it++)->value;
      if (j) out += ", ";
      out += number(v);
    }
    out += "]";
  }
  out += "\n  ],\n  \"B\": [";
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ", ";
    out += number(model.escape()[i]);
  }
  out += "]\n}\n";
  return out;
}

TransitionModel model_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("model JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("model JSON: top level must be an object");

  const auto& dir = field(doc, "direction");
  if (!dir.is_string()) throw ConfigError("model JSON: 'direction' must be a string");
  const Direction direction = parse_direction(dir.get<std::string>());
  const double f_opt = as_number(field(doc, "f_opt"), "f_opt");

  const auto& states = field(doc, "states");
  if (!states.is_array()) throw ConfigError("model JSON: 'states' must be an array");
  std::vector<std::string> labels;
  std::vector<double> fitness;
  for (const auto& s : states) {
    if (!s.is_object()) throw ConfigError("model JSON: each state must be an object");
    const auto& label = field(s, "label");
    if (!label.is_string()) throw ConfigError("model JSON: state label must be a string");
    labels.push_back(label.get<std::string>());
    fitness.push_back(as_number(field(s, "fitness"), "state fitness"));
  }
  const std::size_t n = labels.size();

  const auto& q = field(doc, "Q");
  if (!q.is_array() || q.size() != n)
    throw ConfigError("model JSON: 'Q' must have one row per state");
  std::vector<std::vector<SparseMatrix::Entry>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!q[i].is_array() || q[i].size() != n)
      throw ConfigError("model JSON: Q row " + std::to_string(i) + " must have " +
                        std::to_string(n) + " entries");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = as_number(q[i][j], "Q entry");
      if (v != 0.0) rows[i].push_back({j, v});
    }
  }

  const auto& b = field(doc, "B");
  if (!b.is_array() || b.size() != n)
    throw ConfigError("model JSON: 'B' must have one entry per state");
  std::vector<double> escape;
  for (const auto& x : b) escape.push_back(as_number(x, "B entry"));

  return TransitionModel(std::move(labels), SparseMatrix(n, rows), std::move(escape),
                         std::move(fitness), f_opt, direction);
}

void save_model(const std::filesystem::path& path, const TransitionModel& model) {
  write_text_file(path, model_to_json(model));
}

TransitionModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_text_file(path));
}

}  // namespace acr
