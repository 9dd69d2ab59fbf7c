#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "sdergm/adjacency.hpp"
#include "sdergm/dgp.hpp"
#include "sdergm/ergm_pseudo.hpp"
#include "sdergm/eval.hpp"
#include "sdergm/sd_filter.hpp"

namespace sdergm {

// Doubles are serialized with 17 significant digits so reruns are
// byte-comparable.
std::string format_double(double v);

// write-then-rename; partial files are never left at the target path
void atomic_write_text(const std::string& path, const std::string& content);

// --- temporal edge lists ---------------------------------------------------
// CSV with header t,src,dst. Snapshots are the distinct t values in sorted
// order; the registry is the sorted union of node ids; duplicate rows are
// idempotent; self-loops are rejected.
TemporalNetwork load_temporal_edgelist(const std::string& path, bool directed);
void write_temporal_edgelist(const std::string& path, const TemporalNetwork& data);

// Active-node sidecar: CSV with header t,node listing the active nodes of
// each snapshot.
void apply_masks_csv(TemporalNetwork& data, const std::string& path);
void write_masks_csv(const std::string& path, const TemporalNetwork& data);

void write_node_mapping(const std::string& path, const TemporalNetwork& data);

// --- co-voting construction -------------------------------------------------
// CSV with header session,member,ballot,vote and vote in {yea,nay,absent}.
// Two members are linked in a session when they share at least
// min_common_votes ballots (both non-absent) and agree on strictly more
// than `threshold` of them. The mask marks members who cast at least one
// non-absent vote in the session.
TemporalNetwork build_covoting(const std::string& votes_path, double threshold = 0.75,
                               int min_common_votes = 1);

// --- parameter paths ---------------------------------------------------------
// CSV with header t,param,value,scaled_score (one row per time and
// parameter; t is 1-based).
void write_filter_path(const std::string& path, const FilterPath& fp,
                       const std::vector<std::string>& param_names);

std::vector<std::string> beta_param_names(const std::vector<std::string>& node_names);
std::vector<std::string> ergm_param_names(const ErgmSpec& spec);

// --- JSON configs and results -------------------------------------------------
// Unknown keys are rejected so typos fail fast.
void require_keys(const nlohmann::json& j, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional, const std::string& context);

nlohmann::json ergm_spec_to_json(const ErgmSpec& spec);
ErgmSpec ergm_spec_from_json(const nlohmann::json& j);

nlohmann::json dgp_to_json(const DgpSpec& spec);
DgpSpec dgp_from_json(const nlohmann::json& j);

nlohmann::json sd_params_to_json(const SdStaticParams& params);
SdStaticParams sd_params_from_json(const nlohmann::json& j);

nlohmann::json filter_experiment_to_json(const FilterExperimentReport& report);
nlohmann::json lm_experiment_to_json(const LmExperimentReport& report);
nlohmann::json forecast_experiment_to_json(const ForecastExperimentReport& report);
nlohmann::json sparse_dense_to_json(const SparseDenseReport& report);

}  // namespace sdergm
