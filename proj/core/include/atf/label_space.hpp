#pragma once
// Label domains for one video frame and the restricted joint support.
//
// A frame carries five categorical variables: activity category, object,
// action, progress (always three phases: before / middle / end) and scene.
// The joint (category, object, action, progress) configurations are
// restricted to the list seen in training data; everything else is treated
// as impossible.  The per-frame support enumerated by inference is the cross
// product  seen configs x scenes.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "atf/common.hpp"

namespace atf {

// One (category, object, action, progress) tuple from the support list.
using SeenConfig = std::array<int, 4>;

struct FrameAssignment {
  int category = 0;
  int object = 0;
  int action = 0;
  int progress = 0;
  int scene = 0;

  friend bool operator==(const FrameAssignment&,
                         const FrameAssignment&) = default;
};

class LabelSpace {
 public:
  // Configs are stored sorted and deduplicated; every tuple must be in
  // range.  Throws std::invalid_argument on any violation.
  LabelSpace(int n_category, int n_object, int n_action, int n_progress,
             int n_scene, int n_intent, std::vector<SeenConfig> seen_configs);

  int n_category() const { return n_category_; }
  int n_object() const { return n_object_; }
  int n_action() const { return n_action_; }
  int n_progress() const { return n_progress_; }
  int n_scene() const { return n_scene_; }
  int n_intent() const { return n_intent_; }

  const std::vector<SeenConfig>& seen_configs() const { return configs_; }
  int n_configs() const { return static_cast<int>(configs_.size()); }

  // Support = seen configs x scenes, indexed  s = config_index * n_scene + scene.
  int support_size() const { return n_configs() * n_scene_; }

  // Index of a config in the sorted list, or -1 when unseen.
  int config_index(int category, int object, int action, int progress) const;

  // Support index of a full assignment; throws std::domain_error when the
  // (c,o,a,p) tuple is not in the support or the scene is out of range.
  int support_index(const FrameAssignment& x) const;

  FrameAssignment support_assignment(int s) const;

  // Per-support-entry lookups used in hot loops.
  int support_object(int s) const { return support_object_[s]; }
  int support_category(int s) const { return support_category_[s]; }
  int support_config(int s) const { return s / n_scene_; }
  int support_scene(int s) const { return s % n_scene_; }

  bool contains(const FrameAssignment& x) const;

  // Stable fingerprint over the canonical serialization; lets a checkpoint
  // detect that it is being applied to a different label space.
  std::uint64_t fingerprint() const;

  // Canonical text block (also embedded in datasets and checkpoints).
  std::string serialize() const;

  friend bool operator==(const LabelSpace&, const LabelSpace&) = default;

 private:
  int n_category_, n_object_, n_action_, n_progress_, n_scene_, n_intent_;
  std::vector<SeenConfig> configs_;
  std::vector<int> support_object_;    // object of each support entry
  std::vector<int> support_category_;  // category of each support entry
};

}  // namespace atf
