#pragma once
// Trained model bundle and its versioned text checkpoint format.
//
//   atf-checkpoint 1
//   <label-space block>
//   space_fingerprint <hex>
//   sigma <v> / kernel_weight <v> / term weights / variant
//   mu row-major floats, then one head block per provider head:
//   head <name> <rows> <cols>
//   w <row floats> / b <floats>
//
// Loading verifies the embedded label-space fingerprint; applying a
// checkpoint to a dataset with a different label space is an error.

#include <string>
#include <vector>

#include "atf/dataset.hpp"
#include "atf/provider.hpp"

namespace atf {

enum class ModelVariant { Full, NoPairwise, NoIntent, SemanticOnly,
                          NoStructure };

std::string to_string(ModelVariant v);
ModelVariant model_variant_from_string(const std::string& s);

struct TrainedModel {
  LabelSpace space{1, 1, 1, 1, 1, 1, {SeenConfig{0, 0, 0, 0}}};
  KernelConfig kernel;
  TermWeights weights;
  ModelVariant variant = ModelVariant::Full;
  AffinityTable mu;
  PotentialProvider provider;

  static TrainedModel fresh(const LabelSpace& space, int feature_dim,
                            KernelConfig kernel,
                            ModelVariant variant = ModelVariant::Full);

  // Realize the per-frame potentials of (a subset of) a video's frames.
  // frame_subset holds indices into video.frames; empty = all frames.
  VideoModel realize_video(const VideoRecord& video,
                           const std::vector<int>& frame_subset = {}) const;
};

std::string save_checkpoint_string(const TrainedModel& model);
TrainedModel load_checkpoint_string(const std::string& text);
void save_checkpoint(const TrainedModel& model, const std::string& path);
TrainedModel load_checkpoint(const std::string& path);

// Throws std::runtime_error when the model and dataset label spaces differ
// (compared by fingerprint).
void check_space_match(const TrainedModel& model, const Dataset& ds);

}  // namespace atf
