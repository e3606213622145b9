#include "delaylab/config.hpp"

#include <fstream>

#include "delaylab/errors.hpp"

namespace delaylab {

namespace {

using nlohmann::json;

const json& require(const json& node, const std::string& field, const std::string& key) {
  if (!node.is_object() || !node.contains(field)) throw ConfigError(key, "missing");
  return node.at(field);
}

double number(const json& node, const std::string& key) {
  if (!node.is_number()) throw ConfigError(key, "expected a number");
  return node.get<double>();
}

std::int64_t integer(const json& node, const std::string& key) {
  if (!node.is_number_integer()) throw ConfigError(key, "expected an integer");
  return node.get<std::int64_t>();
}

std::string text(const json& node, const std::string& key) {
  if (!node.is_string()) throw ConfigError(key, "expected a string");
  return node.get<std::string>();
}

std::vector<double> numbers(const json& node, const std::string& key) {
  if (!node.is_array()) throw ConfigError(key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(number(node[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

template <class F>
auto rethrow_as_config(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

DelayModel parse_delay_model(const json& node, const std::string& key) {
  const std::string kind = text(require(node, "kind", key + ".kind"), key + ".kind");
  return rethrow_as_config(key, [&]() -> DelayModel {
    if (kind == "constant") return DelayModel::constant(integer(require(node, "value", key + ".value"), key + ".value"));
    if (kind == "geometric") return DelayModel::geometric(number(require(node, "mean", key + ".mean"), key + ".mean"));
    if (kind == "uniform") {
      return DelayModel::uniform(integer(require(node, "lo", key + ".lo"), key + ".lo"),
                                 integer(require(node, "hi", key + ".hi"), key + ".hi"));
    }
    if (kind == "empirical") {
      const auto& values = require(node, "values", key + ".values");
      if (!values.is_array()) throw ConfigError(key + ".values", "expected an array of integers");
      std::vector<std::int64_t> list;
      for (std::size_t i = 0; i < values.size(); ++i) {
        list.push_back(integer(values[i], key + ".values[" + std::to_string(i) + "]"));
      }
      return DelayModel::empirical(std::move(list));
    }
    if (kind == "sequence") {
      const auto& values = require(node, "values", key + ".values");
      if (!values.is_array()) throw ConfigError(key + ".values", "expected an array of integers");
      std::vector<std::int64_t> list;
      for (std::size_t i = 0; i < values.size(); ++i) {
        list.push_back(integer(values[i], key + ".values[" + std::to_string(i) + "]"));
      }
      return DelayModel::sequence(std::move(list));
    }
    if (kind == "per_action") {
      const auto& models = require(node, "models", key + ".models");
      if (!models.is_array()) throw ConfigError(key + ".models", "expected an array of delay models");
      std::vector<DelayModel> subs;
      for (std::size_t i = 0; i < models.size(); ++i) {
        subs.push_back(parse_delay_model(models[i], key + ".models[" + std::to_string(i) + "]"));
      }
      return DelayModel::per_action(std::move(subs));
    }
    throw ConfigError(key + ".kind", "unknown delay kind '" + kind + "'");
  });
}

ExperimentConfig parse_config_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("", "top level must be an object");
  ExperimentConfig c;

  const auto& env = require(doc, "environment", "environment");
  const std::string env_kind = text(require(env, "kind", "environment.kind"), "environment.kind");
  if (env_kind == "bernoulli") {
    c.environment.kind = EnvironmentSpec::Kind::bernoulli;
    c.environment.means = numbers(require(env, "means", "environment.means"), "environment.means");
    c.environment.feedback = FeedbackKind::bandit;
  } else if (env_kind == "matrix") {
    c.environment.kind = EnvironmentSpec::Kind::matrix;
    std::filesystem::path p = text(require(env, "path", "environment.path"), "environment.path");
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::exists(p)) throw ConfigError("environment.path", "file not found: " + p.string());
    c.environment.matrix_path = p;
    try {
      c.environment.matrix = load_reward_matrix(p);
    } catch (const std::exception& e) {
      throw ConfigError("environment.path", e.what());
    }
    const std::string fb = env.contains("feedback") ? text(env["feedback"], "environment.feedback") : "bandit";
    if (fb == "bandit") {
      c.environment.feedback = FeedbackKind::bandit;
    } else if (fb == "full") {
      c.environment.feedback = FeedbackKind::full_information;
    } else {
      throw ConfigError("environment.feedback", "expected 'bandit' or 'full'");
    }
  } else {
    throw ConfigError("environment.kind", "unknown environment kind '" + env_kind + "'");
  }

  c.delay = parse_delay_model(require(doc, "delay", "delay"), "delay");

  const auto& learner = require(doc, "learner", "learner");
  const std::string meta = learner.contains("meta") ? text(learner["meta"], "learner.meta") : "none";
  if (meta == "none") {
    c.learner.meta = MetaKind::none;
  } else if (meta == "bold") {
    c.learner.meta = MetaKind::bold;
  } else if (meta == "qpmd") {
    c.learner.meta = MetaKind::qpmd;
  } else {
    throw ConfigError("learner.meta", "expected none, bold or qpmd");
  }
  const std::string base = text(require(learner, "base", "learner.base"), "learner.base");
  if (base == "ucb1") {
    c.learner.base = BaseKind::ucb1;
  } else if (base == "kl-ucb") {
    c.learner.base = BaseKind::kl_ucb;
  } else if (base == "exp3") {
    c.learner.base = BaseKind::exp3;
  } else if (base == "hedge") {
    c.learner.base = BaseKind::hedge;
  } else {
    throw ConfigError("learner.base", "expected ucb1, kl-ucb, exp3 or hedge");
  }
  if (learner.contains("gamma")) c.learner.gamma = number(learner["gamma"], "learner.gamma");
  if (learner.contains("eta")) c.learner.eta = number(learner["eta"], "learner.eta");
  if (learner.contains("kl_tolerance")) c.learner.kl_tolerance = number(learner["kl_tolerance"], "learner.kl_tolerance");

  c.horizon = integer(require(doc, "horizon", "horizon"), "horizon");
  c.runs = integer(require(doc, "runs", "runs"), "runs");
  const auto& seed = require(doc, "seed", "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    throw ConfigError("seed", "expected a nonnegative integer");
  }
  c.seed = seed.get<std::uint64_t>();
  if (doc.contains("jobs")) c.jobs = static_cast<int>(integer(doc["jobs"], "jobs"));

  if (doc.contains("output")) {
    const auto& out = doc["output"];
    if (out.contains("dir")) {
      std::filesystem::path dir = text(out["dir"], "output.dir");
      c.out_dir = dir;
    }
  }
  if (doc.contains("bounds")) {
    const auto& b = doc["bounds"];
    if (!b.is_array()) throw ConfigError("bounds", "expected an array of names");
    for (std::size_t i = 0; i < b.size(); ++i) c.bounds.push_back(text(b[i], "bounds[" + std::to_string(i) + "]"));
  }
  if (doc.contains("bound_params")) {
    const auto& bp = doc["bound_params"];
    if (bp.contains("epsilon")) c.bound_params.epsilon = number(bp["epsilon"], "bound_params.epsilon");
    if (bp.contains("c1")) c.bound_params.klucb.c1 = number(bp["c1"], "bound_params.c1");
    if (bp.contains("c2")) c.bound_params.klucb.c2 = number(bp["c2"], "bound_params.c2");
    if (bp.contains("beta")) c.bound_params.klucb.beta = number(bp["beta"], "bound_params.beta");
  }
  if (doc.contains("qpmd_extended")) {
    if (!doc["qpmd_extended"].is_boolean()) throw ConfigError("qpmd_extended", "expected a boolean");
    c.qpmd_extended = doc["qpmd_extended"].get<bool>();
  }
  if (doc.contains("fault_injection")) {
    const auto& f = doc["fault_injection"];
    if (f.contains("drop_origin")) c.faults.drop_origin = integer(f["drop_origin"], "fault_injection.drop_origin");
  }

  validate_config(c);
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config_json(doc, path.parent_path());
}

}  // namespace delaylab
