#pragma once
// Video dataset container and its line-oriented text serialization.
//
//   atf-dataset 1
//   feature_dim <F>
//   <label-space block: n_* counts + seen_config rows>
//   video <id> <split> <n_frames> <gen_intent|->
//   frame <index> <timestamp> <c> <o> <a> <p> <s> <f0> ... <fF-1>
//   frame <index> <timestamp> - <f0> ... <fF-1>            (unlabeled)
//   end
//
// Floats use the canonical shortest round-trip formatting, so loading and
// re-saving a dataset reproduces it byte for byte.

#include <optional>
#include <string>
#include <vector>

#include "atf/label_space.hpp"

namespace atf {

struct Frame {
  int index = 0;           // original frame number (kernel coordinate)
  double timestamp = 0.0;  // seconds
  std::optional<FrameAssignment> label;
  std::vector<double> features;
};

struct VideoRecord {
  std::string id;
  std::string split;    // "train" / "test" (free-form)
  int gen_intent = -1;  // generating intent for synthetic data, -1 unknown
  std::vector<Frame> frames;
};

struct Dataset {
  LabelSpace space{1, 1, 1, 1, 1, 1, {SeenConfig{0, 0, 0, 0}}};
  int feature_dim = 0;
  std::vector<VideoRecord> videos;

  std::vector<int> video_indices(const std::string& split) const;
  long labeled_frame_count(const std::string& split) const;
  void validate() const;  // labels in support, feature sizes, frame order
};

std::string save_dataset_string(const Dataset& ds);
Dataset load_dataset_string(const std::string& text);
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

// n points spread over [0, length-1] as evenly as possible: the exact
// positions round(i * (length-1) / (n-1)), deduplicated while preserving
// order (so short videos yield fewer points).  n = 1 picks frame 0.
std::vector<int> sample_equidistant(int length, int n);

}  // namespace atf
