#include "rsirl/io.hpp"

#include <cstdio>
#include <fstream>

namespace rsirl {

Json vec_to_json(const Vec& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vec vec_from_json(const Json& j) {
  const auto xs = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

Json mat_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_to_json(m.row(i).transpose()));
  return rows;
}

Mat mat_from_json(const Json& j) {
  if (!j.is_array()) throw Error("json: matrix must be an array of rows");
  if (j.empty()) return Mat(0, 0);
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Mat m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vec row = vec_from_json(j[i]);
    require_dim(row.size(), cols, "json matrix row");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

Json envelope_to_json(const RiskEnvelope& env) {
  Json hs = Json::array();
  for (const auto& h : env.halfspaces()) hs.push_back({{"normal", vec_to_json(h.normal)}, {"offset", h.offset}});
  Json vs = Json::array();
  for (const auto& v : env.vertices()) vs.push_back(vec_to_json(v));
  return {{"dim", env.dim()}, {"halfspaces", hs}, {"vertices", vs}};
}

RiskEnvelope envelope_from_json(const Json& j) {
  const auto dim = j.at("dim").get<Eigen::Index>();
  std::vector<Halfspace> hs;
  for (const auto& h : j.value("halfspaces", Json::array())) {
    hs.push_back({vec_from_json(h.at("normal")), h.at("offset").get<double>()});
  }
  if (j.contains("vertices") && !j["vertices"].empty()) {
    std::vector<Vec> vs;
    for (const auto& v : j["vertices"]) vs.push_back(vec_from_json(v));
    return RiskEnvelope::from_halfspaces(dim, std::move(hs), std::move(vs));
  }
  return RiskEnvelope::from_halfspaces(dim, std::move(hs));
}

Json demos_to_json(const std::vector<Demonstration>& demos) {
  Json out = Json::array();
  for (const auto& d : demos) out.push_back({{"state", vec_to_json(d.state)}, {"control", vec_to_json(d.control)}});
  return out;
}

std::vector<Demonstration> demos_from_json(const Json& j) {
  std::vector<Demonstration> out;
  for (const auto& d : j) out.push_back({vec_from_json(d.at("state")), vec_from_json(d.at("control"))});
  return out;
}

Json segments_to_json(const std::vector<TrajectorySegment>& segments) {
  Json out = Json::array();
  for (const auto& s : segments) {
    out.push_back({{"start_state", vec_to_json(s.start_state)},
                   {"prev_mode", s.prev_mode},
                   {"realized_mode", s.realized_mode},
                   {"observed_action", mat_to_json(s.observed_action)}});
  }
  return out;
}

std::vector<TrajectorySegment> segments_from_json(const Json& j) {
  std::vector<TrajectorySegment> out;
  for (const auto& s : j) {
    out.push_back({vec_from_json(s.at("start_state")), s.at("prev_mode").get<int>(), s.at("realized_mode").get<int>(),
                   mat_from_json(s.at("observed_action"))});
  }
  return out;
}

Json library_to_json(const ActionLibrary& lib) {
  Json first = Json::array(), later = Json::array();
  for (const auto& a : lib.first_stage) first.push_back(mat_to_json(a));
  for (const auto& a : lib.later_stage) later.push_back(mat_to_json(a));
  return {{"first_stage", first}, {"later_stage", later}};
}

ActionLibrary library_from_json(const Json& j) {
  ActionLibrary lib;
  for (const auto& a : j.at("first_stage")) lib.first_stage.push_back(mat_from_json(a));
  for (const auto& a : j.at("later_stage")) lib.later_stage.push_back(mat_from_json(a));
  return lib;
}

Json driving_config_to_json(const DrivingConfig& cfg) {
  const auto& s = cfg.scenario;
  const auto& m = cfg.maneuvers;
  const auto& f = cfg.features;
  return {{"L", s.L},
          {"N", s.N},
          {"n_d", s.n_d},
          {"T", s.T},
          {"beta", s.beta},
          {"dt", s.dt},
          {"pmf", vec_to_json(s.pmf.probs())},
          {"maneuver_params",
           {{"accel", m.accel}, {"lane_offset", m.lane_offset}, {"lane_center", m.lane_center},
            {"v_min", m.v_min}, {"v_max", m.v_max}}},
          {"feature_params",
           {{"r", {f.r1, f.r2, f.r3, f.r4, f.r5, f.r6}},
            {"x_threshold", f.x_threshold},
            {"road_half_width", f.road_half_width}}},
          {"bounds", {{"lower", vec_to_json(cfg.bounds.lower)}, {"upper", vec_to_json(cfg.bounds.upper)}}}};
}

DrivingConfig driving_config_from_json(const Json& j) {
  DrivingConfig cfg = DrivingConfig::defaults();
  auto& s = cfg.scenario;
  s.L = j.value("L", s.L);
  s.N = j.value("N", s.N);
  s.n_d = j.value("n_d", s.n_d);
  s.T = j.value("T", s.T);
  s.beta = j.value("beta", s.beta);
  s.dt = j.value("dt", s.dt);
  if (j.contains("pmf")) s.pmf = Pmf(vec_from_json(j["pmf"]));
  if (j.contains("maneuver_params")) {
    const auto& mp = j["maneuver_params"];
    auto& m = cfg.maneuvers;
    m.accel = mp.value("accel", m.accel);
    m.lane_offset = mp.value("lane_offset", m.lane_offset);
    m.lane_center = mp.value("lane_center", m.lane_center);
    m.v_min = mp.value("v_min", m.v_min);
    m.v_max = mp.value("v_max", m.v_max);
  }
  if (j.contains("feature_params")) {
    const auto& fp = j["feature_params"];
    auto& f = cfg.features;
    if (fp.contains("r")) {
      const auto r = fp["r"].get<std::vector<double>>();
      if (r.size() != 6) throw Error("config: feature_params.r needs 6 entries");
      f.r1 = r[0], f.r2 = r[1], f.r3 = r[2], f.r4 = r[3], f.r5 = r[4], f.r6 = r[5];
    }
    f.x_threshold = fp.value("x_threshold", f.x_threshold);
    f.road_half_width = fp.value("road_half_width", f.road_half_width);
  }
  if (j.contains("bounds")) {
    cfg.bounds = ControlBounds(vec_from_json(j["bounds"].at("lower")), vec_from_json(j["bounds"].at("upper")));
  }
  s.validate();
  return cfg;
}

Json model_to_json(const FittedModel& m) {
  Json normals = Json::array();
  for (const auto& a : m.normals) normals.push_back(vec_to_json(a));
  return {{"normals", normals},
          {"offsets", vec_to_json(m.offsets)},
          {"weights", vec_to_json(m.weights)},
          {"beta", m.beta},
          {"config", m.config}};
}

FittedModel model_from_json(const Json& j) {
  FittedModel m;
  for (const auto& a : j.at("normals")) m.normals.push_back(vec_from_json(a));
  m.offsets = vec_from_json(j.at("offsets"));
  m.weights = vec_from_json(j.at("weights"));
  m.beta = j.value("beta", 1.0);
  m.config = j.value("config", Json::object());
  return m;
}

std::uint64_t config_hash(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace rsirl
