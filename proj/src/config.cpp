#include "levyld/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "levyld/errors.hpp"

namespace levyld {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw InvalidModel("unknown key '" + key + "' in " + where);
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw InvalidModel("missing key '" + key + "' in " + where);
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw InvalidModel(where + " must be a number");
  return v.get<double>();
}

std::vector<double> number_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw InvalidModel(where + " must be an array of numbers");
  std::vector<double> out;
  for (const json& item : v) out.push_back(number(item, where));
  return out;
}

ChainModel parse_chain(const json& chain, std::vector<std::string>& states) {
  if (!chain.is_object()) throw InvalidModel("'chain' must be an object");
  reject_unknown(chain, {"states", "Q"}, "chain");
  const json& labels = require(chain, "states", "chain");
  if (!labels.is_array() || labels.empty()) throw InvalidModel("chain.states must be a non-empty array");
  std::set<std::string> seen;
  for (const json& l : labels) {
    if (!l.is_string()) throw InvalidModel("chain.states entries must be strings");
    if (!seen.insert(l.get<std::string>()).second) throw InvalidModel("duplicate state label " + l.dump());
    states.push_back(l.get<std::string>());
  }
  const json& rows = require(chain, "Q", "chain");
  const auto n = static_cast<Eigen::Index>(states.size());
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
    throw InvalidModel("chain.Q must have one row per state");
  }
  Matrix q(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::vector<double> row = number_list(rows[static_cast<std::size_t>(r)], "chain.Q row");
    if (static_cast<Eigen::Index>(row.size()) != n) throw InvalidModel("chain.Q is not square");
    for (Eigen::Index c = 0; c < n; ++c) q(r, c) = row[static_cast<std::size_t>(c)];
  }
  return ChainModel(std::move(q));
}

JumpModel parse_jumps(const json& jumps, const std::vector<std::string>& states) {
  if (!jumps.is_object()) throw InvalidModel("'jumps' must be an object keyed by state label");
  for (const auto& [key, _] : jumps.items()) {
    if (std::find(states.begin(), states.end(), key) == states.end()) {
      throw InvalidModel("jumps entry for unknown state '" + key + "'");
    }
  }
  std::vector<StateJumps> out;
  for (const std::string& label : states) {
    const std::string where = "jumps." + label;
    const json& s = require(jumps, label, "jumps");
    if (!s.is_object()) throw InvalidModel(where + " must be an object");
    reject_unknown(s, {"a1", "a", "c", "gamma0"}, where);
    StateJumps sj;
    sj.a1 = number(require(s, "a1", where), where + ".a1");
    sj.a = number(require(s, "a", where), where + ".a");
    sj.c = number(require(s, "c", where), where + ".c");
    if (s.contains("gamma0")) {
      const json& atoms = s.at("gamma0");
      if (!atoms.is_array()) throw InvalidModel(where + ".gamma0 must be an array of [jump, rate] pairs");
      for (const json& pair : atoms) {
        const std::vector<double> p = number_list(pair, where + ".gamma0 entry");
        if (p.size() != 2) throw InvalidModel(where + ".gamma0 entries must be [jump, rate] pairs");
        sj.gamma0.push_back({p[0], p[1]});
      }
    }
    out.push_back(std::move(sj));
  }
  JumpModel model(std::move(out));
  if (!(model.positivity_margin() > 0.0)) {
    std::ostringstream msg;
    msg << "jumps: c - c0 must exceed |a1| in every state (margin " << model.positivity_margin() << ")";
    throw InvalidModel(msg.str());
  }
  return model;
}

RunDefaults parse_defaults(const json& d) {
  RunDefaults out;
  if (!d.is_object()) throw InvalidModel("'defaults' must be an object");
  reject_unknown(d, {"u_grid", "lambda_grid", "eps_list", "delta_rule", "seed"}, "defaults");
  if (d.contains("u_grid")) out.u_grid = number_list(d.at("u_grid"), "defaults.u_grid");
  if (d.contains("lambda_grid")) out.lambda_grid = number_list(d.at("lambda_grid"), "defaults.lambda_grid");
  if (d.contains("eps_list")) out.eps_list = number_list(d.at("eps_list"), "defaults.eps_list");
  if (d.contains("delta_rule")) {
    if (!d.at("delta_rule").is_string()) throw InvalidModel("defaults.delta_rule must be a string");
    out.delta_rule = DeltaRule::parse(d.at("delta_rule").get<std::string>());
  }
  if (d.contains("seed")) {
    if (!d.at("seed").is_number_unsigned()) throw InvalidModel("defaults.seed must be a non-negative integer");
    out.seed = d.at("seed").get<std::uint64_t>();
  }
  if (out.u_grid.empty()) throw InvalidModel("defaults.u_grid must not be empty");
  for (double e : out.eps_list) {
    if (!(e > 0.0)) throw InvalidModel("defaults.eps_list entries must be positive");
  }
  return out;
}

}  // namespace

ModelConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidModel(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw InvalidModel("config root must be an object");
  reject_unknown(root, {"chain", "jumps", "defaults"}, "config root");

  std::vector<std::string> states;
  ChainModel chain = parse_chain(require(root, "chain", "config root"), states);
  JumpModel jumps = parse_jumps(require(root, "jumps", "config root"), states);
  RunDefaults defaults = root.contains("defaults") ? parse_defaults(root.at("defaults")) : RunDefaults{};
  return ModelConfig{std::move(states), std::move(chain), std::move(jumps), std::move(defaults)};
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidModel("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_canonical_json(const ModelConfig& cfg) {
  json root;
  json q = json::array();
  const Matrix& gen = cfg.chain.generator();
  for (Eigen::Index r = 0; r < gen.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < gen.cols(); ++c) row.push_back(gen(r, c));
    q.push_back(row);
  }
  root["chain"] = {{"states", cfg.states}, {"Q", q}};

  json jumps = json::object();
  for (std::size_t x = 0; x < cfg.states.size(); ++x) {
    const StateJumps& s = cfg.jumps.state(x);
    json atoms = json::array();
    for (const Atom& atom : s.gamma0) atoms.push_back({atom.jump, atom.rate});
    jumps[cfg.states[x]] = {{"a1", s.a1}, {"a", s.a}, {"c", s.c}, {"gamma0", atoms}};
  }
  root["jumps"] = jumps;

  root["defaults"] = {{"u_grid", cfg.defaults.u_grid},
                      {"lambda_grid", cfg.defaults.lambda_grid},
                      {"eps_list", cfg.defaults.eps_list},
                      {"delta_rule", cfg.defaults.delta_rule.name()},
                      {"seed", cfg.defaults.seed}};
  return root.dump(2) + "\n";
}

}  // namespace levyld
