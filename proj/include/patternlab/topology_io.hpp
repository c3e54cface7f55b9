#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "model.hpp"

namespace patternlab {

struct TopologyParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TopologyValidationError : std::runtime_error {
  explicit TopologyValidationError(std::vector<std::string> found)
      : std::runtime_error(join(found)), violations(std::move(found)) {}

  std::vector<std::string> violations;

 private:
  static std::string join(const std::vector<std::string>& found) {
    std::string message = "topology validation failed:";
    for (const auto& v : found) message += "\n  " + v;
    return message;
  }
};

namespace detail {

inline double require_number(const nlohmann::json& value, const std::string& key) {
  if (!value.is_number())
    throw TopologyParseError("'" + key + "' must be a number");
  return value.get<double>();
}

inline std::string require_string(const nlohmann::json& value, const std::string& key) {
  if (!value.is_string())
    throw TopologyParseError("'" + key + "' must be a string");
  return value.get<std::string>();
}

}  // namespace detail

// Parses a topology config (see README for the schema) into a validated
// PatternModel. Malformed text raises TopologyParseError; a structurally
// broken model raises TopologyValidationError listing every violation.
// Busy-work parity fields (range_complexity, trials) are accepted and
// reported through `warnings`, never executed.
inline PatternModel parse_topology(const std::string& text,
                                   std::vector<std::string>* warnings = nullptr) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw TopologyParseError(std::string("malformed topology config: ") + e.what());
  }
  if (!doc.is_object()) throw TopologyParseError("topology config must be a JSON object");

  auto warn = [&](std::string message) {
    if (warnings) warnings->push_back(std::move(message));
  };

  PatternModel m;
  m.name = doc.contains("name") ? detail::require_string(doc["name"], "name") : "custom";

  if (!doc.contains("request_types") || !doc["request_types"].is_array())
    throw TopologyParseError("missing or invalid 'request_types' (expected an array of labels)");
  int next_id = 0;
  for (const auto& entry : doc["request_types"])
    m.request_types.push_back({next_id++, detail::require_string(entry, "request_types[]")});

  if (!doc.contains("services") || !doc["services"].is_object())
    throw TopologyParseError("missing or invalid 'services' (expected an object)");
  for (const auto& [service_name, body] : doc["services"].items()) {
    if (!body.is_object())
      throw TopologyParseError("service '" + service_name + "' must be an object");
    ServiceSpec s;
    s.name = service_name;
    for (const auto& [key, value] : body.items()) {
      if (key == "cpu") {
        s.cpu_capacity = detail::require_number(value, service_name + ".cpu");
      } else if (key == "overhead") {
        s.overhead = detail::require_number(value, service_name + ".overhead");
      } else if (key == "demand") {
        if (!value.is_object())
          throw TopologyParseError("'" + service_name + ".demand' must be an object");
        for (const auto& [type, amount] : value.items())
          s.demand[type] = detail::require_number(amount, service_name + ".demand." + type);
      } else if (key == "calls") {
        if (!value.is_object())
          throw TopologyParseError("'" + service_name + ".calls' must be an object");
        for (const auto& [type, list] : value.items()) {
          if (!list.is_array())
            throw TopologyParseError("'" + service_name + ".calls." + type + "' must be an array");
          for (const auto& call : list) {
            if (!call.is_object() || !call.contains("to"))
              throw TopologyParseError("'" + service_name + ".calls." + type +
                                       "' entries need a 'to' field");
            ServiceCall parsed;
            parsed.to = detail::require_string(call["to"], service_name + ".calls." + type + ".to");
            std::string mode = call.contains("mode")
                                   ? detail::require_string(call["mode"],
                                                            service_name + ".calls." + type + ".mode")
                                   : "seq";
            if (mode == "seq") {
              parsed.mode = CallMode::Sequential;
            } else if (mode == "par") {
              parsed.mode = CallMode::Parallel;
            } else {
              throw TopologyParseError("'" + service_name + ".calls." + type +
                                       ".mode' must be 'seq' or 'par', got '" + mode + "'");
            }
            s.calls[type].push_back(std::move(parsed));
          }
        }
      } else if (key == "range_complexity" || key == "trials") {
        warn("service '" + service_name + "': ignoring '" + key +
             "' (busy-work parameters are accepted for config parity but never executed)");
      } else {
        warn("service '" + service_name + "': ignoring unknown key '" + key + "'");
      }
    }
    m.services.push_back(std::move(s));
  }

  if (!doc.contains("entry") || !doc["entry"].is_object())
    throw TopologyParseError("missing or invalid 'entry' (expected {type: service})");
  for (const auto& [type, service] : doc["entry"].items())
    m.entry[type] = detail::require_string(service, "entry." + type);

  for (const auto& [key, value] : doc.items())
    if (key != "name" && key != "request_types" && key != "services" && key != "entry")
      warn("ignoring unknown top-level key '" + key + "'");

  auto violations = validate(m);
  if (!violations.empty()) throw TopologyValidationError(std::move(violations));
  return m;
}

// Canonical serialization; parse(serialize(parse(x))) is structurally equal
// to parse(x).
inline std::string serialize_topology(const PatternModel& m) {
  nlohmann::json doc;
  doc["name"] = m.name;
  auto types = nlohmann::json::array();
  for (const auto& t : m.request_types) types.push_back(t.label);
  doc["request_types"] = types;

  auto services = nlohmann::json::object();
  for (const auto& s : m.services) {
    nlohmann::json body;
    body["cpu"] = s.cpu_capacity;
    body["overhead"] = s.overhead;
    if (!s.demand.empty()) {
      nlohmann::json demand;
      for (const auto& [type, amount] : s.demand) demand[type] = amount;
      body["demand"] = demand;
    }
    if (!s.calls.empty()) {
      nlohmann::json calls;
      for (const auto& [type, list] : s.calls) {
        auto arr = nlohmann::json::array();
        for (const auto& call : list)
          arr.push_back({{"to", call.to},
                         {"mode", call.mode == CallMode::Parallel ? "par" : "seq"}});
        calls[type] = arr;
      }
      body["calls"] = calls;
    }
    services[s.name] = body;
  }
  doc["services"] = services;

  auto entry = nlohmann::json::object();
  for (const auto& [type, service] : m.entry) entry[type] = service;
  doc["entry"] = entry;

  return doc.dump(2) + "\n";
}

inline PatternModel load_topology_file(const std::string& path,
                                       std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw TopologyParseError("cannot open topology config '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_topology(buffer.str(), warnings);
}

}  // namespace patternlab
