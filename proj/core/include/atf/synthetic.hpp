#pragma once
// Synthetic data generation by sampling the field itself.
//
// A generating model is built from a small set of knobs: shared random
// semantic tables, a diagonal-boosted affinity table (temporal coherence of
// objects), and an intent tie that points each intent at its own object
// cluster.  Each video samples an intent uniformly, then a frame labeling
// from the field conditioned on that intent — exactly by enumeration when
// the state space fits the budget, otherwise by Gibbs sweeps — and finally
// per-frame features as noisy one-hot blocks of the sampled labels.

#include <random>

#include "atf/checkpoint.hpp"
#include "atf/config_text.hpp"
#include "atf/dataset.hpp"

namespace atf {

struct GeneratorConfig {
  int train_videos = 200;
  int test_videos = 50;
  int frames_per_video = 25;
  double fps = 24.0;  // timestamps only

  // Generating-field knobs.
  double sigma = 5.0;  // temporal kernel width while sampling
  double kernel_weight = 1.0;
  double sem_scale = 0.3;    // stddev of random semantic table entries
  double mu_diag = 1.0;      // added to the affinity diagonal
  double mu_offdiag = 0.0;   // base affinity everywhere
  double mu_chain = 0.0;     // added to (o, o+1 mod n): ordered progressions
  // Fraction of frames at each end of a video where the intent tie applies
  // (0 = every frame).  A nonzero window separates the intent's long-range
  // footprint from what the kernel-windowed affinity can explain.
  double xi_window = 0.0;
  // Object sets favoured per intent. "round_robin": object o belongs to
  // intent o mod n_intent (disjoint sets — representable by a single global
  // affinity table). "overlap_pair": intent I favours objects {I, I+1}
  // (overlapping sets — a per-video mixture no single affinity table can
  // reproduce).
  std::string xi_pattern = "round_robin";
  double xi_strength = 1.5;  // intent -> object-cluster preference

  // Observation model.
  double feature_gain = 1.0;   // scale of the one-hot blocks
  double feature_noise = 1.0;  // stddev of additive Gaussian noise

  // Sampling strategy.
  double enum_budget = 2000000.0;  // max support^T for exact sampling
  int gibbs_burn_in = 500;         // full sweeps before taking the labeling
  int gibbs_thinning = 10;         // sweeps between samples on a kept chain
};

GeneratorConfig generator_config_from_config(const ConfigText& cfg);
void generator_config_to_config(const GeneratorConfig& g, ConfigText& cfg);

// Feature layout: concatenated one-hot blocks [C | O | A | P | S].
int feature_dim_for(const LabelSpace& space);

struct GeneratedData {
  Dataset dataset;
  TrainedModel generating_model;  // constant tables (zero feature weights)
  bool used_enumeration = false;  // sampling mode actually taken
};

GeneratedData generate_synthetic(const LabelSpace& space,
                                 const GeneratorConfig& cfg,
                                 std::uint64_t seed);

// Ideal decoder for datasets produced above: a provider whose weights read
// the one-hot blocks directly, scoring a config by how many of its labels
// match the observed blocks.  Useful as a known-good checkpoint.
TrainedModel ideal_decoder_model(const LabelSpace& space, KernelConfig kernel,
                                 double gain);

// Draw one labeling from the field conditioned on `intent` (exposed for
// tests; uses enumeration iff support^T <= cfg.enum_budget).
std::vector<FrameAssignment> sample_labeling(const VideoModel& model,
                                             int intent,
                                             const GeneratorConfig& cfg,
                                             std::mt19937_64& rng);

}  // namespace atf
