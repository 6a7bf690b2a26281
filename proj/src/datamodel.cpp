// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include "goalpred/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "goalpred/error.hpp"

namespace goalpred {

using nlohmann::json;

const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    case ErrorKind::invariant: return "invariant";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::training: return "training";
  }
  return "unknown";
}

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "head", "torso", "pelvis", "left_hand", "right_hand", "left_shoulder", "right_shoulder"};

bool finite(const Vec3& v) { return v.allFinite(); }

bool unit(const Vec3& v) { return std::abs(v.norm() - 1.0) <= kUnitTolerance; }

[[noreturn]] void invariant_error(const std::string& msg) {
  throw Error(ErrorKind::invariant, msg);
}

std::string seg_locus(std::size_t index) { return "segment " + std::to_string(index); }

// ---- JSON helpers -------------------------------------------------------

class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const json& field(const json& obj, const char* key) {
  if (!obj.is_object()) throw RecordError("expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw RecordError(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw RecordError(std::string("field '") + what + "' must be a number");
  return j.get<double>();
}

std::string string_field(const json& obj, const char* key) {
  const json& j = field(obj, key);
  if (!j.is_string()) throw RecordError(std::string("field '") + key + "' must be a string");
  return j.get<std::string>();
}

Vec3 vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw RecordError(std::string("field '") + what + "' must be a 3-element array");
  }
  return Vec3(number(j[0], what), number(j[1], what), number(j[2], what));
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Frame parse_frame(const json& j) {
  Frame f;
  f.t = number(field(j, "t"), "t");
  f.gaze_origin = vec3(field(j, "gaze_origin"), "gaze_origin");
  f.gaze_dir = vec3(field(j, "gaze_dir"), "gaze_dir");
  const json& joints = field(j, "joints");
  if (!joints.is_object()) throw RecordError("field 'joints' must be an object");
  for (Joint joint : all_joints()) {
    const auto name = std::string(joint_name(joint));
    auto it = joints.find(name);
    if (it == joints.end()) throw RecordError("missing joint '" + name + "'");
    f.joint(joint).position = vec3(field(*it, "p"), "p");
    f.joint(joint).forward = vec3(field(*it, "f"), "f");
  }
  for (auto it = joints.begin(); it != joints.end(); ++it) {
    if (!joint_from_name(it.key())) throw RecordError("unknown joint '" + it.key() + "'");
  }
  return f;
}

json frame_json(const Frame& f) {
  json joints = json::object();
  for (Joint joint : all_joints()) {
    const JointPose& pose = f.joint(joint);
    joints[std::string(joint_name(joint))] = {{"p", to_json(pose.position)},
                                              {"f", to_json(pose.forward)}};
  }
  return {{"t", f.t},
          {"gaze_origin", to_json(f.gaze_origin)},
          {"gaze_dir", to_json(f.gaze_dir)},
          {"joints", std::move(joints)}};
}

bool vec_equal(const Vec3& a, const Vec3& b) { return (a.array() == b.array()).all(); }

}  // namespace

std::string_view joint_name(Joint joint) noexcept {
  return kJointNames[static_cast<std::size_t>(joint)];
}

std::optional<Joint> joint_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (kJointNames[i] == name) return static_cast<Joint>(i);
  }
  return std::nullopt;
}

const std::array<Joint, kJointCount>& all_joints() noexcept {
  static const std::array<Joint, kJointCount> joints = {
      Joint::head,      Joint::torso,         Joint::pelvis,        Joint::left_hand,
      Joint::right_hand, Joint::left_shoulder, Joint::right_shoulder};
  return joints;
}

// ---- GoalSet ------------------------------------------------------------

GoalSet::GoalSet(std::vector<Goal> goals) : goals_(std::move(goals)) {
  if (goals_.size() < 2) {
    invariant_error("goal set needs at least 2 goals, got " + std::to_string(goals_.size()));
  }
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < goals_.size(); ++i) {
    const Goal& g = goals_[i];
    if (g.id.empty()) invariant_error("goal " + std::to_string(i) + ": empty id");
    if (!seen.insert(g.id).second) invariant_error("goal id '" + g.id + "' is not unique");
    if (g.macro_id.empty()) invariant_error("goal '" + g.id + "': empty macro_id");
    if (!finite(g.position)) invariant_error("goal '" + g.id + "': non-finite position");
    for (std::size_t k = 0; k < i; ++k) {
      if (vec_equal(goals_[k].position, g.position)) {
        invariant_error("goals '" + goals_[k].id + "' and '" + g.id + "' share a position");
      }
    }
  }
}

std::optional<std::size_t> GoalSet::index_of(std::string_view id) const noexcept {
  for (std::size_t i = 0; i < goals_.size(); ++i) {
    if (goals_[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t GoalSet::require_index(std::string_view id) const {
  if (auto idx = index_of(id)) return *idx;
  invariant_error("unknown goal id '" + std::string(id) + "'");
}

std::vector<std::string> GoalSet::macro_ids() const {
  std::vector<std::string> out;
  for (const Goal& g : goals_) {
    if (std::find(out.begin(), out.end(), g.macro_id) == out.end()) out.push_back(g.macro_id);
  }
  return out;
}

bool operator==(const GoalSet& a, const GoalSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || a[i].macro_id != b[i].macro_id ||
        !vec_equal(a[i].position, b[i].position)) {
      return false;
    }
  }
  return true;
}

// ---- Segment ------------------------------------------------------------

Segment prefix(const Segment& seg, std::size_t length) {
  Segment out;
  out.frame_rate_hz = seg.frame_rate_hz;
  out.picked_goal = seg.picked_goal;
  out.subject_id = seg.subject_id;
  const std::size_t n = std::min(length, seg.frames.size());
  out.frames.assign(seg.frames.begin(), seg.frames.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

void validate_segment(const Segment& seg, std::size_t index) {
  const std::string locus = seg_locus(index);
  if (seg.frames.empty()) invariant_error(locus + ": field 'frames' is empty");
  if (!(seg.frame_rate_hz > 0.0) || !std::isfinite(seg.frame_rate_hz)) {
    invariant_error(locus + ": field 'frame_rate_hz' must be positive");
  }
  if (seg.picked_goal.empty()) invariant_error(locus + ": field 'picked_goal' is empty");
  const double period = 1.0 / seg.frame_rate_hz;
  for (std::size_t k = 0; k < seg.frames.size(); ++k) {
    const Frame& f = seg.frames[k];
    auto floc = [&] { return locus + ", frame " + std::to_string(k); };
    if (!std::isfinite(f.t)) invariant_error(floc() + ": field 't' is not finite");
    if (!finite(f.gaze_origin)) invariant_error(floc() + ": field 'gaze_origin' is not finite");
    if (!finite(f.gaze_dir) || !unit(f.gaze_dir)) {
      invariant_error(floc() + ": field 'gaze_dir' is not a unit vector");
    }
    for (Joint j : all_joints()) {
      const JointPose& pose = f.joint(j);
      auto name = [&] { return std::string(joint_name(j)); };
      if (!finite(pose.position)) invariant_error(floc() + ": joint '" + name() + "' position is not finite");
      if (!finite(pose.forward) || !unit(pose.forward)) {
        invariant_error(floc() + ": joint '" + name() + "' forward is not a unit vector");
      }
    }
    if (k > 0) {
      const double dt = f.t - seg.frames[k - 1].t;
      if (dt < 0.0) invariant_error(floc() + ": field 't' decreases");
      if (std::abs(dt - period) > 0.1 * period) {
        std::ostringstream msg;
        msg << floc() << ": field 't' spacing " << dt << " s deviates more than 10% from 1/"
            << seg.frame_rate_hz << " Hz";
        invariant_error(msg.str());
      }
    }
  }
}

void validate_dataset(const Dataset& d) {
  for (std::size_t i = 0; i < d.segments.size(); ++i) {
    validate_segment(d.segments[i], i);
    if (!d.goal_set.index_of(d.segments[i].picked_goal)) {
      invariant_error(seg_locus(i) + ": field 'picked_goal' references unknown goal '" +
                      d.segments[i].picked_goal + "'");
    }
  }
}

// ---- I/O ----------------------------------------------------------------

Dataset parse_dataset(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  auto locus = [&] { return std::string(source) + ":" + std::to_string(line_no); };

  // First non-blank line is the header.
  json header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      header = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::parse, locus() + ": header: " + e.what());
    }
    break;
  }
  if (header.is_null()) throw Error(ErrorKind::parse, std::string(source) + ": missing header record");

  Dataset d;
  double rate = kDefaultFrameRateHz;
  try {
    const int version = field(header, "version").get<int>();
    if (version != kDatasetFormatVersion) {
      throw RecordError("unsupported version " + std::to_string(version));
    }
    rate = number(field(header, "frame_rate_hz"), "frame_rate_hz");
    const json& goals = field(header, "goals");
    if (!goals.is_array()) throw RecordError("field 'goals' must be an array");
    std::vector<Goal> parsed;
    for (const json& g : goals) {
      parsed.push_back(Goal{string_field(g, "id"), vec3(field(g, "position"), "position"),
                            string_field(g, "macro_id")});
    }
    d.goal_set = GoalSet(std::move(parsed));
  } catch (const RecordError& e) {
    throw Error(ErrorKind::parse, locus() + ": header: " + e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, locus() + ": header: " + e.what());
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string rec = locus() + ": segment record " + std::to_string(d.segments.size());
    try {
      const json j = json::parse(line);
      Segment seg;
      seg.frame_rate_hz = j.contains("frame_rate_hz") ? number(j["frame_rate_hz"], "frame_rate_hz") : rate;
      seg.subject_id = string_field(j, "subject_id");
      seg.picked_goal = string_field(j, "picked_goal");
      const json& frames = field(j, "frames");
      if (!frames.is_array()) throw RecordError("field 'frames' must be an array");
      seg.frames.reserve(frames.size());
      for (const json& f : frames) seg.frames.push_back(parse_frame(f));
      d.segments.push_back(std::move(seg));
    } catch (const RecordError& e) {
      throw Error(ErrorKind::parse, rec + ": " + e.what());
    } catch (const json::exception& e) {
      throw Error(ErrorKind::parse, rec + ": " + e.what());
    }
  }

  if (d.segments.empty()) {
    std::cerr << "warning: " << source << ": dataset has no segments\n";
  }
  validate_dataset(d);
  return d;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open dataset '" + path.string() + "'");
  return parse_dataset(in, path.string());
}

void write_dataset(std::ostream& out, const Dataset& d) {
  const double rate = d.segments.empty() ? kDefaultFrameRateHz : d.segments.front().frame_rate_hz;
  json goals = json::array();
  for (const Goal& g : d.goal_set) {
    goals.push_back({{"id", g.id}, {"position", to_json(g.position)}, {"macro_id", g.macro_id}});
  }
  json header = {{"version", kDatasetFormatVersion}, {"frame_rate_hz", rate}, {"goals", std::move(goals)}};
  out << header.dump() << '\n';
  for (const Segment& seg : d.segments) {
    json frames = json::array();
    for (const Frame& f : seg.frames) frames.push_back(frame_json(f));
    json rec = {{"subject_id", seg.subject_id}, {"picked_goal", seg.picked_goal}};
    if (seg.frame_rate_hz != rate) rec["frame_rate_hz"] = seg.frame_rate_hz;
    rec["frames"] = std::move(frames);
    out << rec.dump() << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write dataset '" + path.string() + "'");
  write_dataset(out, d);
  if (!out) throw Error(ErrorKind::io, "write failed for '" + path.string() + "'");
}

std::pair<Dataset, Dataset> split_by_subject(const Dataset& d,
                                             const std::set<std::string>& train_subjects,
                                             const std::set<std::string>& test_subjects) {
  for (const auto& s : train_subjects) {
    if (test_subjects.count(s)) {
      throw Error(ErrorKind::usage, "subject '" + s + "' is in both train and test sets");
    }
  }
  std::pair<Dataset, Dataset> out{Dataset{d.goal_set, {}}, Dataset{d.goal_set, {}}};
  for (const Segment& seg : d.segments) {
    if (train_subjects.count(seg.subject_id)) {
      out.first.segments.push_back(seg);
    } else if (test_subjects.count(seg.subject_id)) {
      out.second.segments.push_back(seg);
    }
  }
  return out;
}

bool structurally_equal(const Dataset& a, const Dataset& b) {
  if (!(a.goal_set == b.goal_set) || a.segments.size() != b.segments.size()) return false;
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    const Segment& x = a.segments[i];
    const Segment& y = b.segments[i];
    if (x.subject_id != y.subject_id || x.picked_goal != y.picked_goal ||
        x.frame_rate_hz != y.frame_rate_hz || x.frames.size() != y.frames.size()) {
      return false;
    }
    for (std::size_t k = 0; k < x.frames.size(); ++k) {
      const Frame& f = x.frames[k];
      const Frame& g = y.frames[k];
      if (f.t != g.t || !vec_equal(f.gaze_origin, g.gaze_origin) || !vec_equal(f.gaze_dir, g.gaze_dir)) {
        return false;
      }
      for (Joint j : all_joints()) {
        if (!vec_equal(f.joint(j).position, g.joint(j).position) ||
            !vec_equal(f.joint(j).forward, g.joint(j).forward)) {
          return false;
        }
      }
    }
  }
  return true;
}

namespace {

class Fnv {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= b[i];
      h_ *= 1099511628211ULL;
    }
  }
  void str(const std::string& s) {
    const std::uint64_t n = s.size();
    bytes(&n, sizeof n);
    bytes(s.data(), s.size());
  }
  void f64(double v) { bytes(&v, sizeof v); }
  void vec(const Vec3& v) { bytes(v.data(), 3 * sizeof(double)); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 1469598103934665603ULL;
};

}  // namespace

std::uint64_t dataset_hash(const Dataset& d) {
  Fnv h;
  for (const Goal& g : d.goal_set) {
    h.str(g.id);
    h.str(g.macro_id);
    h.vec(g.position);
  }
  for (const Segment& s : d.segments) {
    h.str(s.subject_id);
    h.str(s.picked_goal);
    h.f64(s.frame_rate_hz);
    const std::uint64_t n = s.frames.size();
    h.bytes(&n, sizeof n);
    for (const Frame& f : s.frames) {
      h.f64(f.t);
      for (const JointPose& j : f.joints) {
        h.vec(j.position);
        h.vec(j.forward);
      }
      h.vec(f.gaze_origin);
      h.vec(f.gaze_dir);
    }
  }
  return h.value();
}

}  // namespace goalpred
