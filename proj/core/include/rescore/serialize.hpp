#pragma once

// JSON documents for models, rule sets and configs, plus the CSV tables the
// command-line tool emits. Readers throw DataError on malformed documents.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "rescore/data.hpp"
#include "rescore/features.hpp"
#include "rescore/glm.hpp"
#include "rescore/joint.hpp"
#include "rescore/pipeline.hpp"
#include "rescore/tree.hpp"
#include "rescore/webster.hpp"

namespace rescore {

using Json = nlohmann::ordered_json;

std::string border_mode_name(BorderMode mode);
BorderMode parse_border_mode(const std::string& name);

Json window_to_json(const WindowSpec& window);
WindowSpec window_from_json(const Json& doc);

// {"type":"glm","intercept":..,"weights":[..],"recipe":..[,"window":..]}
Json glm_to_json(const GlmModel& model, const WindowSpec* window = nullptr);
GlmModel glm_from_json(const Json& doc);

// {"type":"tree","num_features":..,"nodes":[..]}
Json tree_to_json(const RuleTree& tree);
RuleTree tree_from_json(const Json& doc);

// {"rule1":[[a,b],..],"rule2":[[c,d],..]}
Json rules_to_json(const RuleParams& params);
RuleParams rules_from_json(const Json& doc);

Json rescore_options_to_json(const RescoreOptions& options);
RescoreOptions rescore_options_from_json(const Json& doc);

Json joint_to_json(const JointModel& model);
JointModel joint_from_json(const Json& doc);

// Missing keys keep their defaults; unknown keys are rejected.
Json sim_config_to_json(const SimConfig& config);
SimConfig sim_config_from_json(const Json& doc, SimConfig base = {});
Json train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const Json& doc, TrainConfig base = {});

Json pipeline_to_json(const FittedPipeline& pipeline);
FittedPipeline pipeline_from_json(const Json& doc);

Json read_json(const std::filesystem::path& path);

// epoch,score,last_lag_wake,...,min_border_wake; epochs numbered from 1.
void write_feature_csv(std::ostream& out, const FeatureFrame& frame);
// epoch,original,rescored,rule_id
void write_rescore_csv(std::ostream& out, const RescoreResult& result);
// method,window,auc
void write_auc_header(std::ostream& out);
void write_auc_row(std::ostream& out, const CvResult& result);
// method,threshold,fpr,tpr
void write_roc_header(std::ostream& out);
void write_roc_rows(std::ostream& out, const CvResult& result);
// {"epoch":k,"loss":..}
std::string training_log_line(int epoch, double loss);

// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace rescore
