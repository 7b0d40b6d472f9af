#pragma once

#include "rsirl/driving.hpp"
#include "rsirl/envelope.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace rsirl {

using Json = nlohmann::json;

Json vec_to_json(const Vec& v);
Vec vec_from_json(const Json& j);
Json mat_to_json(const Mat& m);  ///< array of rows
Mat mat_from_json(const Json& j);

/// {dim, halfspaces: [{normal, offset}], vertices}. Vertices are optional on
/// input and re-enumerated when absent.
Json envelope_to_json(const RiskEnvelope& env);
RiskEnvelope envelope_from_json(const Json& j);

Json demos_to_json(const std::vector<Demonstration>& demos);
std::vector<Demonstration> demos_from_json(const Json& j);

/// Array of {start_state, prev_mode, realized_mode, observed_action}.
Json segments_to_json(const std::vector<TrajectorySegment>& segments);
std::vector<TrajectorySegment> segments_from_json(const Json& j);

Json library_to_json(const ActionLibrary& lib);
ActionLibrary library_from_json(const Json& j);

/// {L, N, n_d, T, beta, dt, pmf, maneuver_params, feature_params, bounds}.
/// Missing keys keep the driving defaults.
Json driving_config_to_json(const DrivingConfig& cfg);
DrivingConfig driving_config_from_json(const Json& j);

struct FittedModel {
  std::vector<Vec> normals;
  Vec offsets;
  Vec weights;
  double beta = 1.0;
  Json config;
};

Json model_to_json(const FittedModel& m);
FittedModel model_from_json(const Json& j);

/// 64-bit FNV-1a over the compact JSON dump (keys are sorted by the library).
std::uint64_t config_hash(const Json& j);
std::string hex64(std::uint64_t v);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace rsirl
