#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "supres/harness.hpp"
#include "supres/music.hpp"
#include "supres/subspace.hpp"

namespace supres::io {

using nlohmann::json;

json to_json(const SupportSet& support);
json to_json(const ClumpsSpec& spec);
json to_json(const ExperimentConfig& config);

SupportSet support_from_json(const json& j);
ClumpsSpec clumps_from_json(const json& j);

/// Parses and validates a config document. Malformed JSON and schema
/// violations both raise ValidationError; the former carries the parser's
/// line/column.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// One row per sensor, columns re_1,im_1,...,re_L,im_L of the scaled Y_L.
void write_snapshots_csv(std::ostream& os, const SnapshotBatch& batch);
/// omega,value
void write_profile_csv(std::ostream& os, const NscProfile& profile);
/// row,col,re,im
void write_covariance_csv(std::ostream& os, const CovarianceMatrix& cov);
/// metric,parameter,value,sigma_s,mean,std,n,censored
void write_sweep_csv(std::ostream& os, const std::vector<SweepResult>& results);
/// axis1,axis2,cell
void write_phase_csv(std::ostream& os, const PhaseGrid& grid);
/// axis1,axis2 of every located crossing
void write_crossings_csv(std::ostream& os, const PhaseGrid& grid);

json to_json(const SweepResult& result);
json to_json(const PhaseGrid& grid);

} // namespace supres::io
