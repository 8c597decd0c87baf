#include "rescore/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "rescore/data.hpp"
#include "rescore/errors.hpp"
#include "rescore/eval.hpp"
#include "rescore/features.hpp"
#include "rescore/joint.hpp"
#include "rescore/pipeline.hpp"
#include "rescore/serialize.hpp"
#include "rescore/webster.hpp"

namespace rescore::cli {

namespace fs = std::filesystem;

namespace {

const char* const kCommands[] = {"simulate", "features", "fit", "evaluate", "rescore"};

// Invalid user input detected by a command after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Vec4 parse_vec4(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) {
    throw UsageError("border vectors take four comma-separated values, got '" + text + "'");
  }
  Vec4 v{};
  for (std::size_t i = 0; i < 4; ++i) {
    try {
      std::size_t used = 0;
      v[i] = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
    } catch (const std::exception&) {
      throw UsageError("not a number in border vector: '" + parts[i] + "'");
    }
  }
  return v;
}

// Config documents are flat objects keyed by long flag names (underscores
// and hyphens are interchangeable). Their values are spliced in right after
// the subcommand, so flags given on the command line take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<fs::path> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    }
  }
  if (!config) return args;

  const Json doc = read_json(*config);
  if (!doc.is_object()) throw UsageError("config must be a JSON object");
  std::vector<std::string> injected;
  for (const auto& [key, value] : doc.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    std::string text;
    if (value.is_null()) continue;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else if (value.is_number()) {
      text = value.dump();
    } else if (value.is_array()) {
      for (const auto& item : value) {
        if (!text.empty()) text += ',';
        text += item.is_string() ? item.get<std::string>() : item.dump();
      }
    } else {
      throw UsageError("config key '" + key + "' must be a scalar or a list");
    }
    injected.push_back(flag + "=" + text);
  }
  auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return std::any_of(std::begin(kCommands), std::end(kCommands),
                       [&](const char* c) { return a == c; });
  });
  if (sub == args.end()) return args;
  args.insert(sub + 1, injected.begin(), injected.end());
  return args;
}

// "-5:2" after a flag would otherwise be taken for a short option.
std::vector<std::string> join_negative_values(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const bool takes_window = args[i] == "--window" || args[i] == "--windows";
    if (takes_window && i + 1 < args.size() && args[i + 1].size() > 1 && args[i + 1][0] == '-' &&
        (std::isdigit(static_cast<unsigned char>(args[i + 1][1])) != 0)) {
      out.push_back(args[i] + "=" + args[i + 1]);
      ++i;
    } else {
      out.push_back(args[i]);
    }
  }
  return out;
}

fs::path config_path_for(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".config.json");
  return p;
}

void write_resolved(const fs::path& out, Json resolved, const char* command) {
  resolved["command"] = command;
  write_file_atomic(config_path_for(out), resolved.dump(2) + "\n");
}

std::vector<EpochSeries> load_nights(const std::string& path, double epoch_len) {
  if (path.empty()) throw UsageError("--in is required");
  auto nights = read_nights(fs::path(path), epoch_len);
  if (nights.empty()) throw DataError(path + " holds no nights");
  return nights;
}

const EpochSeries& pick_night(const std::vector<EpochSeries>& nights, const std::string& id) {
  if (id.empty()) return nights.front();
  for (const auto& n : nights) {
    if (n.participant_id == id) return n;
  }
  throw UsageError("participant '" + id + "' not found");
}

// A saved model: a window GLM document, a joint model, or a pipeline.
FittedPipeline load_pipeline(const std::string& path) {
  const Json doc = read_json(fs::path(path));
  const std::string type = doc.is_object() ? doc.value("type", std::string{}) : std::string{};
  FittedPipeline p;
  if (type == "glm") {
    if (!doc.contains("window")) throw DataError(path + ": glm model lacks a window");
    p.recipe.method = Method::kGlmWindow;
    p.recipe.window = window_from_json(doc.at("window"));
    p.window_model = glm_from_json(doc);
    if (p.window_model.weights.size() != p.recipe.window.width()) {
      throw DataError(path + ": weight count does not match the window");
    }
  } else if (type == "joint") {
    p.recipe.method = Method::kRescoreNN;
    p.joint = joint_from_json(doc);
    p.recipe.window = p.joint->window;
    p.recipe.features = p.joint->features;
    p.window_model = p.joint->window_layer;
  } else {
    p = pipeline_from_json(doc);
  }
  return p;
}

// First-stage wake probabilities, the input that rules and features act on.
std::vector<double> first_stage(const FittedPipeline& p, const EpochSeries& night) {
  switch (p.recipe.method) {
    case Method::kConstant:
      return std::vector<double>(night.size(), 0.5);
    case Method::kRescoreNN:
      return window_probabilities(p.joint.value(), night);
    default:
      return window_scores(p.window_model, p.recipe.window, night);
  }
}

std::vector<double> label_scores(const EpochSeries& night) {
  if (!night.has_labels()) {
    throw DataError("night " + night.participant_id + " has no labels to use as scores");
  }
  return {night.labels.begin(), night.labels.end()};
}

// Border flags shared by several commands.
struct BorderFlags {
  std::string first = "0,0,0,0";
  std::string last = "0,0,0,0";
  std::string mode = "assign";

  void add(CLI::App& app) {
    app.add_option("--b1", first, "border vector before the first epoch (lag_wake,lag_sleep,len_wake,len_sleep)")
        ->capture_default_str();
    app.add_option("--bT", last, "border vector after the last epoch")->capture_default_str();
    app.add_option("--border-mode", mode, "assign: l(1)=b1; precede: b1 sits before epoch 1")
        ->check(CLI::IsMember({"assign", "precede"}))
        ->capture_default_str();
  }
  void apply(RescoreOptions& options) const {
    options.borders = {parse_vec4(first), parse_vec4(last)};
    options.border_mode = parse_border_mode(mode);
  }
};

struct TrainFlags {
  TrainConfig config;
  void add(CLI::App& app) {
    app.add_option("--epochs", config.epochs, "training passes for rescore-nn")->capture_default_str();
    app.add_option("--batch-size", config.batch_size, "minimum epochs per mini-batch")
        ->capture_default_str();
    app.add_option("--lr,--learning-rate", config.learning_rate, "Adam step size")->capture_default_str();
    app.add_option("--beta1", config.beta1)->capture_default_str();
    app.add_option("--beta2", config.beta2)->capture_default_str();
    app.add_option("--epsilon", config.epsilon)->capture_default_str();
  }
};

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
  SimConfig config;
  std::string out;

  void add(CLI::App& app) {
    app.add_option("--nights,--n-participants", config.n_participants, "participant-nights to draw")
        ->capture_default_str();
    app.add_option("--seed", config.seed, "night i uses seed + i")->capture_default_str();
    app.add_option("--mean-night-epochs", config.mean_night_epochs)->capture_default_str();
    app.add_option("--epoch-len", config.epoch_len, "minutes per epoch")->capture_default_str();
    app.add_option("--mean-sleep-bout", config.mean_sleep_bout)->capture_default_str();
    app.add_option("--mean-wake-bout", config.mean_wake_bout)->capture_default_str();
    app.add_option("--mean-sleep-latency", config.mean_sleep_latency)->capture_default_str();
    app.add_option("--wake-shape", config.wake_shape)->capture_default_str();
    app.add_option("--wake-scale", config.wake_scale)->capture_default_str();
    app.add_option("--sleep-shape", config.sleep_shape)->capture_default_str();
    app.add_option("--sleep-scale", config.sleep_scale)->capture_default_str();
    app.add_option("--arousal-rate", config.arousal_rate)->capture_default_str();
    app.add_option("--twitch-rate", config.twitch_rate)->capture_default_str();
    app.add_option("--quiet-wake-rate", config.quiet_wake_rate)->capture_default_str();
    app.add_option("--mean-quiet-wake", config.mean_quiet_wake)->capture_default_str();
    app.add_option("--lead-in-min", config.lead_in_min)->capture_default_str();
    app.add_option("--lead-in-max", config.lead_in_max)->capture_default_str();
    app.add_option("--out", out, "output CSV")->required();
  }

  int run(std::ostream& log) const {
    config.validate();
    const auto nights = simulate(config);
    std::ostringstream csv;
    write_nights(csv, nights);
    write_file_atomic(out, csv.str());
    write_resolved(out, sim_config_to_json(config), "simulate");
    log << "wrote " << nights.size() << " nights to " << out << "\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------- features

struct FeaturesCmd {
  std::string in;
  std::string participant;
  double epoch_len = 0.5;
  std::string model;
  std::optional<double> threshold;
  bool oracle = false;
  BorderFlags borders;
  std::string out;

  void add(CLI::App& app) {
    app.add_option("--in", in, "dataset CSV")->required();
    app.add_option("--participant", participant, "participant id (default: first)");
    app.add_option("--epoch-len", epoch_len, "minutes per epoch")->capture_default_str();
    app.add_option("--model", model, "score with this model's first-stage probabilities instead of labels");
    app.add_option("--threshold", threshold, "binarize scores at this threshold");
    app.add_flag("--oracle", oracle, "use the literal bout search (binary scores only)");
    borders.add(app);
    app.add_option("--out", out, "output feature CSV")->required();
  }

  int run(std::ostream& log) const {
    const auto nights = load_nights(in, epoch_len);
    const EpochSeries& night = pick_night(nights, participant);
    std::vector<double> scores = model.empty() ? label_scores(night)
                                               : first_stage(load_pipeline(model), night);
    if (threshold) scores = binarize(scores, *threshold);
    RescoreOptions options;
    borders.apply(options);
    const FeatureFrame frame =
        oracle ? features_by_scan(scores, night.epoch_len, options.borders, options.border_mode)
               : feature_frame(scores, night.epoch_len, options.borders, options.border_mode);
    std::ostringstream csv;
    write_feature_csv(csv, frame);
    write_file_atomic(out, csv.str());

    Json resolved;
    resolved["in"] = in;
    resolved["participant"] = night.participant_id;
    resolved["epoch_len"] = epoch_len;
    resolved["model"] = model;
    resolved["threshold"] = threshold ? Json(*threshold) : Json(nullptr);
    resolved["oracle"] = oracle;
    resolved["b1"] = borders.first;
    resolved["bT"] = borders.last;
    resolved["border_mode"] = borders.mode;
    resolved["out"] = out;
    write_resolved(out, resolved, "features");
    log << "wrote " << frame.size() << " epochs for " << night.participant_id << " to " << out << "\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------- fit

struct FitCmd {
  std::string method;
  std::string in;
  std::string window = "-5:2";
  double epoch_len = 0.5;
  double l2 = GlmOptions{}.l2;
  int tree_depth = 3;
  int min_leaf = 50;
  std::string rules;
  std::string init_from;
  std::string log_path;
  std::uint64_t seed = 1;
  BorderFlags borders;
  TrainFlags train;
  std::string out;

  void add(CLI::App& app) {
    app.add_option("--method", method, "glm-window|glm-continuous|glm-binary|webster|tree|rescore-nn")
        ->required()
        ->check(CLI::IsMember({"glm-window", "glm-continuous", "glm-binary", "webster", "tree",
                               "rescore-nn", "constant"}));
    app.add_option("--in", in, "labeled dataset CSV");
    app.add_option("--window", window, "window past:future, e.g. --window=-5:2")->capture_default_str();
    app.add_option("--epoch-len", epoch_len, "minutes per epoch")->capture_default_str();
    app.add_option("--l2", l2, "ridge penalty on GLM weights")->capture_default_str();
    app.add_option("--tree-depth", tree_depth)->capture_default_str();
    app.add_option("--min-leaf", min_leaf)->capture_default_str();
    app.add_option("--rules", rules, "rule set JSON for webster (default: Webster's constants)");
    app.add_option("--init-from", init_from, "glm-continuous pipeline to initialize rescore-nn");
    app.add_option("--log", log_path, "JSON-lines training log for rescore-nn");
    app.add_option("--seed", seed, "mini-batch shuffling seed")->capture_default_str();
    borders.add(app);
    train.add(app);
    app.add_option("--out", out, "output model JSON")->required();
  }

  PipelineRecipe recipe() const {
    PipelineRecipe r;
    r.method = parse_method(method);
    r.window = WindowSpec::parse(window);
    r.glm.l2 = l2;
    r.tree = {tree_depth, min_leaf};
    r.train = train.config;
    r.train.seed = seed;
    borders.apply(r.features);
    if (!rules.empty()) r.rules = rules_from_json(read_json(rules));
    return r;
  }

  Json resolved(const PipelineRecipe& r) const {
    Json doc;
    doc["method"] = method;
    doc["in"] = in;
    doc["window"] = r.window.label();
    doc["epoch_len"] = epoch_len;
    doc["l2"] = l2;
    doc["tree_depth"] = tree_depth;
    doc["min_leaf"] = min_leaf;
    doc["rules"] = rules;
    doc["init_from"] = init_from;
    doc["log"] = log_path;
    doc["seed"] = seed;
    doc["b1"] = borders.first;
    doc["bT"] = borders.last;
    doc["border_mode"] = borders.mode;
    const Json train_doc = train_config_to_json(r.train);
    for (const auto& [k, v] : train_doc.items()) {
      if (k != "seed") doc[k] = v;
    }
    doc["out"] = out;
    return doc;
  }

  int run(std::ostream& log) const {
    PipelineRecipe r = recipe();
    r.train.validate();
    Json model;
    if (r.method == Method::kWebster) {
      model = rules_to_json(r.rules);
    } else {
      const auto nights = load_nights(in, epoch_len);
      if (r.method == Method::kGlmWindow) {
        model = glm_to_json(fit_window_glm(nights, r.window, r.glm), &r.window);
      } else if (r.method == Method::kRescoreNN) {
        model = fit_joint(r, nights, log);
      } else {
        model = pipeline_to_json(fit_pipeline(r, nights));
      }
    }
    write_file_atomic(out, model.dump(2) + "\n");
    write_resolved(out, resolved(r), "fit");
    log << "wrote " << method << " model to " << out << "\n";
    return kExitOk;
  }

  Json fit_joint(PipelineRecipe& r, const std::vector<EpochSeries>& nights, std::ostream& log) const {
    FittedPipeline sequential;
    if (!init_from.empty()) {
      sequential = load_pipeline(init_from);
      if (sequential.recipe.method != Method::kGlmContinuous) {
        throw UsageError("--init-from needs a glm-continuous pipeline");
      }
      r.window = sequential.recipe.window;
      r.features = sequential.recipe.features;
    } else {
      PipelineRecipe seq = r;
      seq.method = Method::kGlmContinuous;
      sequential = fit_pipeline(seq, nights);
    }
    const JointModel init = init_joint(r.window, sequential.window_model,
                                       sequential.rescore_model.value(), r.features);
    std::string lines;
    const EpochLogger logger = [&](int epoch, double loss) {
      lines += training_log_line(epoch, loss) + "\n";
    };
    TrainResult trained;
    try {
      trained = rescore::train(init, nights, r.train, logger);
    } catch (const TrainingError& e) {
      if (!log_path.empty()) write_file_atomic(log_path, lines);
      throw;
    }
    if (!log_path.empty()) write_file_atomic(log_path, lines);
    log << "rescore-nn loss " << trained.loss_trace.front() << " -> " << trained.loss_trace.back()
        << "\n";
    FittedPipeline fitted;
    fitted.recipe = r;
    fitted.window_model = trained.model.window_layer;
    fitted.joint = trained.model;
    fitted.loss_trace = trained.loss_trace;
    return pipeline_to_json(fitted);
  }
};

// ---------------------------------------------------------------- evaluate

struct EvaluateCmd {
  std::string in;
  int k = 5;
  std::uint64_t seed = 1;
  std::vector<std::string> methods = {"glm-window",  "webster", "glm-continuous",
                                      "glm-binary", "tree",    "rescore-nn"};
  std::vector<std::string> windows = {"-5:2"};
  double epoch_len = 0.5;
  double l2 = GlmOptions{}.l2;
  int tree_depth = 3;
  int min_leaf = 50;
  std::string rules;
  BorderFlags borders;
  TrainFlags train;
  std::string auc_out;
  std::string roc_out;

  void add(CLI::App& app) {
    app.add_option("--in", in, "labeled dataset CSV")->required();
    app.add_option("--k", k, "cross-validation folds")->capture_default_str();
    app.add_option("--seed", seed, "fold assignment and training seed")->capture_default_str();
    app.add_option("--methods", methods, "comma-separated method names")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--windows", windows, "comma-separated windows, e.g. --windows=-5:2,-30:20")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--epoch-len", epoch_len, "minutes per epoch")->capture_default_str();
    app.add_option("--l2", l2, "ridge penalty on GLM weights")->capture_default_str();
    app.add_option("--tree-depth", tree_depth)->capture_default_str();
    app.add_option("--min-leaf", min_leaf)->capture_default_str();
    app.add_option("--rules", rules, "rule set JSON for webster (default: Webster's constants)");
    borders.add(app);
    train.add(app);
    app.add_option("--auc-out", auc_out, "AUC table CSV (method,window,auc)")->required();
    app.add_option("--roc-out", roc_out, "ROC points CSV (method,threshold,fpr,tpr)");
  }

  int run(std::ostream& log) const {
    std::vector<Method> roster;
    for (const auto& m : methods) roster.push_back(parse_method(m));
    if (roster.empty()) throw UsageError("--methods is empty");
    std::vector<WindowSpec> specs;
    for (const auto& w : windows) specs.push_back(WindowSpec::parse(w));
    if (specs.empty()) throw UsageError("--windows is empty");

    PipelineRecipe base;
    base.glm.l2 = l2;
    base.tree = {tree_depth, min_leaf};
    base.train = train.config;
    base.train.seed = seed;
    base.train.validate();
    borders.apply(base.features);
    if (!rules.empty()) base.rules = rules_from_json(read_json(rules));

    const auto nights = load_nights(in, epoch_len);
    std::ostringstream auc;
    std::ostringstream roc_csv;
    write_auc_header(auc);
    write_roc_header(roc_csv);
    for (const auto& spec : specs) {
      base.window = spec;
      const auto results = cross_validate_methods(nights, k, roster, base, seed);
      for (const auto& r : results) {
        write_auc_row(auc, r);
        write_roc_rows(roc_csv, r);
      }
    }
    write_file_atomic(auc_out, auc.str());
    if (!roc_out.empty()) write_file_atomic(roc_out, roc_csv.str());

    Json resolved;
    resolved["in"] = in;
    resolved["k"] = k;
    resolved["seed"] = seed;
    resolved["methods"] = methods;
    resolved["windows"] = windows;
    resolved["epoch_len"] = epoch_len;
    resolved["l2"] = l2;
    resolved["tree_depth"] = tree_depth;
    resolved["min_leaf"] = min_leaf;
    resolved["rules"] = rules;
    resolved["b1"] = borders.first;
    resolved["bT"] = borders.last;
    resolved["border_mode"] = borders.mode;
    const Json train_doc = train_config_to_json(base.train);
    for (const auto& [key, v] : train_doc.items()) {
      if (key != "seed") resolved[key] = v;
    }
    resolved["auc_out"] = auc_out;
    resolved["roc_out"] = roc_out;
    write_resolved(auc_out, resolved, "evaluate");
    log << auc.str();
    return kExitOk;
  }
};

// ---------------------------------------------------------------- rescore

struct RescoreCmd {
  std::string in;
  std::string model;
  std::string rules;
  double threshold = 0.5;
  std::string participant;
  double epoch_len = 0.5;
  BorderFlags borders;
  std::string out;

  void add(CLI::App& app) {
    app.add_option("--in", in, "dataset CSV")->required();
    app.add_option("--model", model, "fitted model JSON");
    app.add_option("--rules", rules, "rule set JSON; applied to thresholded model output or labels");
    app.add_option("--threshold", threshold, "wake threshold on first-stage probabilities")
        ->capture_default_str();
    app.add_option("--participant", participant, "participant id for rule output (default: first)");
    app.add_option("--epoch-len", epoch_len, "minutes per epoch")->capture_default_str();
    borders.add(app);
    app.add_option("--out", out, "output CSV")->required();
  }

  int run(std::ostream& log) const {
    if (model.empty() && rules.empty()) throw UsageError("rescore needs --model, --rules, or both");
    const auto nights = load_nights(in, epoch_len);
    std::optional<FittedPipeline> pipeline;
    if (!model.empty()) pipeline = load_pipeline(model);

    std::ostringstream csv;
    std::string participant_used;
    if (!rules.empty()) {
      const RuleParams params = rules_from_json(read_json(rules));
      RescoreOptions options;
      borders.apply(options);
      const EpochSeries& night = pick_night(nights, participant);
      participant_used = night.participant_id;
      const auto w = pipeline ? binarize(first_stage(*pipeline, night), threshold)
                              : label_scores(night);
      const auto result =
          apply_webster(w, night.epoch_len, params, options.borders, options.border_mode);
      write_rescore_csv(csv, result);
    } else {
      csv << "participant_id,epoch_index,prob\n";
      for (const auto& night : nights) {
        const auto prob = score_night(*pipeline, night);
        for (std::size_t t = 0; t < prob.size(); ++t) {
          csv << night.participant_id << ',' << t + 1 << ',' << format_double(prob[t]) << '\n';
        }
      }
    }
    write_file_atomic(out, csv.str());

    Json resolved;
    resolved["in"] = in;
    resolved["model"] = model;
    resolved["rules"] = rules;
    resolved["threshold"] = threshold;
    resolved["participant"] = participant_used;
    resolved["epoch_len"] = epoch_len;
    resolved["b1"] = borders.first;
    resolved["bT"] = borders.last;
    resolved["border_mode"] = borders.mode;
    resolved["out"] = out;
    write_resolved(out, resolved, "rescore");
    log << "wrote " << out << "\n";
    return kExitOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interpretable rescoring features, Webster rules, and rescoring pipelines", "rescore"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  std::string config_file;
  app.add_option("--config", config_file, "JSON document of flag values (flags override it)");

  SimulateCmd simulate_cmd;
  FeaturesCmd features_cmd;
  FitCmd fit_cmd;
  EvaluateCmd evaluate_cmd;
  RescoreCmd rescore_cmd;

  auto* sim = app.add_subcommand("simulate", "draw labeled synthetic nights");
  simulate_cmd.add(*sim);
  auto* feat = app.add_subcommand("features", "dump the rescoring feature frame of one night");
  feat->add_option("--config", config_file, "JSON document of flag values");
  features_cmd.add(*feat);
  auto* fit = app.add_subcommand("fit", "fit a pipeline and save it as JSON");
  fit->add_option("--config", config_file, "JSON document of flag values");
  fit_cmd.add(*fit);
  auto* evaluate = app.add_subcommand("evaluate", "participant-level cross-validated AUC table");
  evaluate->add_option("--config", config_file, "JSON document of flag values");
  evaluate_cmd.add(*evaluate);
  auto* rescore = app.add_subcommand("rescore", "apply a saved model or rule set to a dataset");
  rescore->add_option("--config", config_file, "JSON document of flag values");
  rescore_cmd.add(*rescore);
  sim->add_option("--config", config_file, "JSON document of SimConfig fields");

  try {
    std::vector<std::string> args = join_negative_values(expand_config(raw_args));
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    if (sim->parsed()) return simulate_cmd.run(out);
    if (feat->parsed()) return features_cmd.run(out);
    if (fit->parsed()) return fit_cmd.run(out);
    if (evaluate->parsed()) return evaluate_cmd.run(out);
    if (rescore->parsed()) return rescore_cmd.run(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const TrainingError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitInvalid;
}

}  // namespace rescore::cli
