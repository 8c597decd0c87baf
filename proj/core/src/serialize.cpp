#include "rescore/serialize.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "rescore/errors.hpp"

namespace rescore {

namespace {

template <typename F>
auto guarded(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw DataError(what + ": " + e.what());
  }
}

void require_type(const Json& doc, const std::string& type) {
  if (!doc.is_object() || doc.value("type", std::string{}) != type) {
    throw DataError("expected a JSON object with \"type\":\"" + type + "\"");
  }
}

Json vec4_to_json(const Vec4& v) { return Json::array({v[0], v[1], v[2], v[3]}); }

Vec4 vec4_from_json(const Json& doc) {
  if (!doc.is_array() || doc.size() != 4) {
    throw DataError("border vectors need 4 entries");
  }
  return {doc[0].get<double>(), doc[1].get<double>(), doc[2].get<double>(), doc[3].get<double>()};
}

Json pairs_to_json(const std::vector<std::pair<double, double>>& pairs) {
  Json out = Json::array();
  for (const auto& [a, b] : pairs) out.push_back(Json::array({a, b}));
  return out;
}

std::vector<std::pair<double, double>> pairs_from_json(const Json& doc, const char* key) {
  std::vector<std::pair<double, double>> out;
  if (!doc.contains(key)) return out;
  const Json& list = doc.at(key);
  if (!list.is_array()) throw DataError(std::string(key) + " must be an array of pairs");
  for (const auto& pair : list) {
    if (!pair.is_array() || pair.size() != 2) {
      throw DataError(std::string(key) + " entries must be [x, y] pairs");
    }
    out.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return out;
}

// Overwrites fields of `target` from the keys present in `doc`.
template <typename T>
void take(const Json& doc, const char* key, T& target) {
  if (doc.contains(key)) target = doc.at(key).get<T>();
}

void reject_unknown(const Json& doc, std::initializer_list<const char*> known, const char* what) {
  if (!doc.is_object()) throw DataError(std::string(what) + " must be a JSON object");
  for (const auto& item : doc.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw DataError(std::string(what) + ": unknown key '" + item.key() + "'");
  }
}

}  // namespace

std::string border_mode_name(BorderMode mode) {
  return mode == BorderMode::kAssign ? "assign" : "precede";
}

BorderMode parse_border_mode(const std::string& name) {
  if (name == "assign") return BorderMode::kAssign;
  if (name == "precede") return BorderMode::kPrecede;
  throw DomainError("unknown border mode '" + name + "'");
}

Json window_to_json(const WindowSpec& window) { return Json::array({window.past, window.future}); }

WindowSpec window_from_json(const Json& doc) {
  return guarded("window", [&] {
    WindowSpec w;
    if (doc.is_string()) {
      w = WindowSpec::parse(doc.get<std::string>());
    } else {
      if (!doc.is_array() || doc.size() != 2) throw DataError("window must be [past, future]");
      w = {doc[0].get<int>(), doc[1].get<int>()};
    }
    w.validate();
    return w;
  });
}

Json glm_to_json(const GlmModel& model, const WindowSpec* window) {
  Json doc;
  doc["type"] = "glm";
  doc["intercept"] = model.intercept;
  doc["weights"] = std::vector<double>(model.weights.data(), model.weights.data() + model.weights.size());
  doc["recipe"] = recipe_name(model.recipe);
  if (window) doc["window"] = window_to_json(*window);
  return doc;
}

GlmModel glm_from_json(const Json& doc) {
  return guarded("glm model", [&] {
    require_type(doc, "glm");
    GlmModel model;
    model.intercept = doc.at("intercept").get<double>();
    const auto w = doc.at("weights").get<std::vector<double>>();
    model.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    model.recipe = doc.contains("recipe") ? parse_recipe(doc.at("recipe").get<std::string>())
                                          : Recipe::kCustom;
    return model;
  });
}

Json tree_to_json(const RuleTree& tree) {
  Json nodes = Json::array();
  for (const auto& n : tree.nodes) {
    Json node;
    node["feature"] = n.feature;
    node["threshold"] = n.threshold;
    node["left"] = n.left;
    node["right"] = n.right;
    node["probability"] = n.probability;
    node["count"] = n.count;
    nodes.push_back(std::move(node));
  }
  Json doc;
  doc["type"] = "tree";
  doc["num_features"] = tree.num_features;
  doc["nodes"] = std::move(nodes);
  return doc;
}

RuleTree tree_from_json(const Json& doc) {
  RuleTree tree = guarded("tree model", [&] {
    require_type(doc, "tree");
    RuleTree t;
    t.num_features = doc.at("num_features").get<int>();
    for (const auto& node : doc.at("nodes")) {
      TreeNode n;
      n.feature = node.at("feature").get<int>();
      n.threshold = node.value("threshold", 0.0);
      n.left = node.value("left", -1);
      n.right = node.value("right", -1);
      n.probability = node.at("probability").get<double>();
      n.count = node.value("count", 0L);
      t.nodes.push_back(n);
    }
    return t;
  });
  try {
    tree.validate();
  } catch (const DomainError& e) {
    throw DataError(std::string("tree model: ") + e.what());
  }
  return tree;
}

Json rules_to_json(const RuleParams& params) {
  Json doc;
  doc["rule1"] = pairs_to_json(params.rule1);
  doc["rule2"] = pairs_to_json(params.rule2);
  return doc;
}

RuleParams rules_from_json(const Json& doc) {
  RuleParams params = guarded("rule set", [&] {
    if (!doc.is_object()) throw DataError("rule set must be a JSON object");
    RuleParams p;
    p.rule1 = pairs_from_json(doc, "rule1");
    p.rule2 = pairs_from_json(doc, "rule2");
    return p;
  });
  try {
    params.validate();
  } catch (const DomainError& e) {
    throw DataError(std::string("rule set: ") + e.what());
  }
  return params;
}

Json rescore_options_to_json(const RescoreOptions& options) {
  Json doc;
  doc["border_first"] = vec4_to_json(options.borders.first);
  doc["border_last"] = vec4_to_json(options.borders.last);
  doc["border_mode"] = border_mode_name(options.border_mode);
  doc["threshold"] = options.threshold;
  doc["with_next"] = options.with_next;
  return doc;
}

RescoreOptions rescore_options_from_json(const Json& doc) {
  return guarded("feature options", [&] {
    reject_unknown(doc, {"border_first", "border_last", "border_mode", "threshold", "with_next"},
                   "feature options");
    RescoreOptions o;
    if (doc.contains("border_first")) o.borders.first = vec4_from_json(doc.at("border_first"));
    if (doc.contains("border_last")) o.borders.last = vec4_from_json(doc.at("border_last"));
    if (doc.contains("border_mode")) o.border_mode = parse_border_mode(doc.at("border_mode").get<std::string>());
    take(doc, "threshold", o.threshold);
    take(doc, "with_next", o.with_next);
    return o;
  });
}

Json joint_to_json(const JointModel& model) {
  Json doc;
  doc["type"] = "joint";
  doc["window"] = window_to_json(model.window);
  doc["features"] = rescore_options_to_json(model.features);
  doc["window_layer"] = glm_to_json(model.window_layer);
  doc["rescore_layer"] = glm_to_json(model.rescore_layer);
  return doc;
}

JointModel joint_from_json(const Json& doc) {
  JointModel model = guarded("joint model", [&] {
    require_type(doc, "joint");
    JointModel m;
    m.window = window_from_json(doc.at("window"));
    m.features = rescore_options_from_json(doc.at("features"));
    m.window_layer = glm_from_json(doc.at("window_layer"));
    m.rescore_layer = glm_from_json(doc.at("rescore_layer"));
    return m;
  });
  try {
    model.validate();
  } catch (const DomainError& e) {
    throw DataError(std::string("joint model: ") + e.what());
  }
  return model;
}

Json sim_config_to_json(const SimConfig& c) {
  Json doc;
  doc["n_participants"] = c.n_participants;
  doc["mean_night_epochs"] = c.mean_night_epochs;
  doc["epoch_len"] = c.epoch_len;
  doc["mean_sleep_bout"] = c.mean_sleep_bout;
  doc["mean_wake_bout"] = c.mean_wake_bout;
  doc["mean_sleep_latency"] = c.mean_sleep_latency;
  doc["wake_shape"] = c.wake_shape;
  doc["wake_scale"] = c.wake_scale;
  doc["sleep_shape"] = c.sleep_shape;
  doc["sleep_scale"] = c.sleep_scale;
  doc["arousal_rate"] = c.arousal_rate;
  doc["twitch_rate"] = c.twitch_rate;
  doc["quiet_wake_rate"] = c.quiet_wake_rate;
  doc["mean_quiet_wake"] = c.mean_quiet_wake;
  doc["lead_in_min"] = c.lead_in_min;
  doc["lead_in_max"] = c.lead_in_max;
  doc["seed"] = c.seed;
  return doc;
}

SimConfig sim_config_from_json(const Json& doc, SimConfig c) {
  return guarded("simulation config", [&] {
    reject_unknown(doc,
                   {"n_participants", "mean_night_epochs", "epoch_len", "mean_sleep_bout",
                    "mean_wake_bout", "mean_sleep_latency", "wake_shape", "wake_scale",
                    "sleep_shape", "sleep_scale", "arousal_rate", "twitch_rate", "quiet_wake_rate",
                    "mean_quiet_wake", "lead_in_min", "lead_in_max", "seed"},
                   "simulation config");
    take(doc, "n_participants", c.n_participants);
    take(doc, "mean_night_epochs", c.mean_night_epochs);
    take(doc, "epoch_len", c.epoch_len);
    take(doc, "mean_sleep_bout", c.mean_sleep_bout);
    take(doc, "mean_wake_bout", c.mean_wake_bout);
    take(doc, "mean_sleep_latency", c.mean_sleep_latency);
    take(doc, "wake_shape", c.wake_shape);
    take(doc, "wake_scale", c.wake_scale);
    take(doc, "sleep_shape", c.sleep_shape);
    take(doc, "sleep_scale", c.sleep_scale);
    take(doc, "arousal_rate", c.arousal_rate);
    take(doc, "twitch_rate", c.twitch_rate);
    take(doc, "quiet_wake_rate", c.quiet_wake_rate);
    take(doc, "mean_quiet_wake", c.mean_quiet_wake);
    take(doc, "lead_in_min", c.lead_in_min);
    take(doc, "lead_in_max", c.lead_in_max);
    take(doc, "seed", c.seed);
    return c;
  });
}

Json train_config_to_json(const TrainConfig& c) {
  Json doc;
  doc["batch_size"] = c.batch_size;
  doc["epochs"] = c.epochs;
  doc["learning_rate"] = c.learning_rate;
  doc["seed"] = c.seed;
  doc["beta1"] = c.beta1;
  doc["beta2"] = c.beta2;
  doc["epsilon"] = c.epsilon;
  return doc;
}

TrainConfig train_config_from_json(const Json& doc, TrainConfig c) {
  return guarded("train config", [&] {
    reject_unknown(doc, {"batch_size", "epochs", "learning_rate", "seed", "beta1", "beta2", "epsilon"},
                   "train config");
    take(doc, "batch_size", c.batch_size);
    take(doc, "epochs", c.epochs);
    take(doc, "learning_rate", c.learning_rate);
    take(doc, "seed", c.seed);
    take(doc, "beta1", c.beta1);
    take(doc, "beta2", c.beta2);
    take(doc, "epsilon", c.epsilon);
    return c;
  });
}

Json pipeline_to_json(const FittedPipeline& p) {
  Json doc;
  doc["type"] = "pipeline";
  doc["method"] = method_name(p.recipe.method);
  doc["window"] = window_to_json(p.recipe.window);
  doc["features"] = rescore_options_to_json(p.recipe.features);
  if (p.recipe.method != Method::kConstant) {
    doc["window_model"] = glm_to_json(p.window_model, &p.recipe.window);
  }
  if (p.recipe.method == Method::kWebster) doc["rules"] = rules_to_json(p.recipe.rules);
  if (p.rescore_model) doc["rescore_model"] = glm_to_json(*p.rescore_model);
  if (p.tree) doc["tree"] = tree_to_json(*p.tree);
  if (p.joint) doc["joint"] = joint_to_json(*p.joint);
  return doc;
}

FittedPipeline pipeline_from_json(const Json& doc) {
  return guarded("pipeline", [&] {
    require_type(doc, "pipeline");
    FittedPipeline p;
    try {
      p.recipe.method = parse_method(doc.at("method").get<std::string>());
    } catch (const DomainError& e) {
      throw DataError(std::string("pipeline: ") + e.what());
    }
    p.recipe.window = window_from_json(doc.at("window"));
    if (doc.contains("features")) p.recipe.features = rescore_options_from_json(doc.at("features"));
    if (doc.contains("window_model")) p.window_model = glm_from_json(doc.at("window_model"));
    if (doc.contains("rules")) p.recipe.rules = rules_from_json(doc.at("rules"));
    if (doc.contains("rescore_model")) p.rescore_model = glm_from_json(doc.at("rescore_model"));
    if (doc.contains("tree")) p.tree = tree_from_json(doc.at("tree"));
    if (doc.contains("joint")) p.joint = joint_from_json(doc.at("joint"));

    const Method m = p.recipe.method;
    const bool missing =
        (m != Method::kConstant && !doc.contains("window_model")) ||
        ((m == Method::kGlmContinuous || m == Method::kGlmBinary) && !p.rescore_model) ||
        (m == Method::kTree && !p.tree) || (m == Method::kRescoreNN && !p.joint);
    if (missing) {
      throw DataError("pipeline '" + method_name(m) + "' lacks its fitted components");
    }
    if (m != Method::kConstant && p.window_model.weights.size() != p.recipe.window.width()) {
      throw DataError("pipeline window model has " + std::to_string(p.window_model.weights.size()) +
                      " weights for window " + p.recipe.window.label());
    }
    return p;
  });
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_feature_csv(std::ostream& out, const FeatureFrame& frame) {
  out << "epoch";
  for (const auto name : feature_names()) out << ',' << name;
  out << '\n';
  for (std::size_t t = 0; t < frame.size(); ++t) {
    out << t + 1;
    for (double v : frame.rows[t].flat()) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_rescore_csv(std::ostream& out, const RescoreResult& result) {
  out << "epoch,original,rescored,rule_id\n";
  for (std::size_t t = 0; t < result.original.size(); ++t) {
    out << t + 1 << ',' << result.original[t] << ',' << result.rescored[t] << ','
        << result.trigger[t].label() << '\n';
  }
}

void write_auc_header(std::ostream& out) { out << "method,window,auc\n"; }

void write_auc_row(std::ostream& out, const CvResult& result) {
  out << method_name(result.method) << ',' << result.window.label() << ','
      << format_double(result.pooled.auc) << '\n';
}

void write_roc_header(std::ostream& out) { out << "method,threshold,fpr,tpr\n"; }

void write_roc_rows(std::ostream& out, const CvResult& result) {
  const std::string name = method_name(result.method) + "[" + result.window.label() + "]";
  for (const auto& p : result.pooled.points) {
    out << name << ',' << format_double(p.threshold) << ',' << format_double(p.fpr) << ','
        << format_double(p.tpr) << '\n';
  }
}

std::string training_log_line(int epoch, double loss) {
  Json doc;
  doc["epoch"] = epoch;
  doc["loss"] = loss;
  return doc.dump();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw DataError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw DataError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace rescore
