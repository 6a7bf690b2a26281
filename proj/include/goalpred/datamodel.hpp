// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace goalpred {

using Vec3 = Eigen::Vector3d;

/// Tolerance on |v| - 1 for every stored direction vector.
inline constexpr double kUnitTolerance = 1e-6;

/// Nominal recording rate of the canonical format.
inline constexpr double kDefaultFrameRateHz = 120.0;

/// Current version of the line-delimited dataset format.
inline constexpr int kDatasetFormatVersion = 1;

enum class Joint : std::uint8_t {
  head,
  torso,
  pelvis,
  left_hand,
  right_hand,
  left_shoulder,
  right_shoulder,
};

inline constexpr std::size_t kJointCount = 7;

std::string_view joint_name(Joint joint) noexcept;
std::optional<Joint> joint_from_name(std::string_view name) noexcept;
const std::array<Joint, kJointCount>& all_joints() noexcept;

struct JointPose {
  Vec3 position = Vec3::Zero();
  Vec3 forward = Vec3::UnitX();  // unit direction
};

/// One motion-capture sample. Joints are indexed by `Joint`, so the full
/// joint set is always present.
struct Frame {
  double t = 0.0;
  std::array<JointPose, kJointCount> joints{};
  Vec3 gaze_origin = Vec3::Zero();
  Vec3 gaze_dir = Vec3::UnitX();

  const JointPose& joint(Joint j) const { return joints[static_cast<std::size_t>(j)]; }
  JointPose& joint(Joint j) { return joints[static_cast<std::size_t>(j)]; }
};

struct Goal {
  std::string id;
  Vec3 position = Vec3::Zero();
  std::string macro_id;
};

/// Ordered set of candidate goals. The constructor enforces N >= 2, unique
/// ids, non-empty macro ids and pairwise distinct positions.
class GoalSet {
 public:
  GoalSet() = default;
  explicit GoalSet(std::vector<Goal> goals);

  std::size_t size() const noexcept { return goals_.size(); }
  bool empty() const noexcept { return goals_.empty(); }
  const Goal& operator[](std::size_t i) const { return goals_[i]; }
  const std::vector<Goal>& goals() const noexcept { return goals_; }
  auto begin() const noexcept { return goals_.begin(); }
  auto end() const noexcept { return goals_.end(); }

  std::optional<std::size_t> index_of(std::string_view id) const noexcept;
  /// Throws Error(invariant) when the id is unknown.
  std::size_t require_index(std::string_view id) const;

  /// Distinct macro ids in order of first appearance.
  std::vector<std::string> macro_ids() const;

  friend bool operator==(const GoalSet& a, const GoalSet& b);

 private:
  std::vector<Goal> goals_;
};

struct Segment {
  std::vector<Frame> frames;
  double frame_rate_hz = kDefaultFrameRateHz;
  std::string picked_goal;
  std::string subject_id;

  std::size_t size() const noexcept { return frames.size(); }
};

/// Copy of the first `length` frames (clamped to the segment length).
Segment prefix(const Segment& seg, std::size_t length);

struct Dataset {
  GoalSet goal_set;
  std::vector<Segment> segments;
};

/// Checks every Frame and Segment invariant; `index` is used in messages.
void validate_segment(const Segment& seg, std::size_t index);
/// Segment invariants plus goal resolution against the goal set.
void validate_dataset(const Dataset& d);

/// Parses the line-delimited canonical format. `source` names the stream in
/// error messages.
Dataset parse_dataset(std::istream& in, std::string_view source = "<stream>");
Dataset load_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const Dataset& d);
void save_dataset(const std::filesystem::path& path, const Dataset& d);

/// Partitions segments by subject id. Segments whose subject is in neither set
/// are dropped. Throws Error(usage) if the sets overlap.
std::pair<Dataset, Dataset> split_by_subject(const Dataset& d,
                                             const std::set<std::string>& train_subjects,
                                             const std::set<std::string>& test_subjects);

bool structurally_equal(const Dataset& a, const Dataset& b);

/// FNV-1a over ids and raw coordinate bytes; used for report fingerprints.
std::uint64_t dataset_hash(const Dataset& d);

}  // namespace goalpred
