#pragma once
// Potential tables and scoring for the temporal field.
//
// Per-frame score of an assignment x = (C,O,A,P,S) decomposes into compact
// semantic terms
//     phi_x(x) = w_op*phi(O,P) + w_ap*phi(A,P) + w_os*phi(O,S) + w_coap*phi(C,O,A,P)
// where phi(C,O,A,P) is stored sparsely over the seen-config list.  Frames
// are additionally tied to a video-level intent variable through an
// object-by-intent table, and to each other through an asymmetric
// object-affinity table modulated by a Gaussian kernel over frame distance.
//
// Pairwise convention: every unordered frame pair {i,j} contributes exactly
// one directed term, with the earlier frame supplying the affinity row:
//     i < j   ->   mu[object_i][object_j] * kernel_weight * k(i,j).
// The mean-field updates and the affinity gradients in this library are
// exact coordinate ascent / exact likelihood gradients for this convention.

#include <optional>
#include <vector>

#include "atf/common.hpp"
#include "atf/label_space.hpp"

namespace atf {

struct TermWeights {
  double op = 1.0;
  double ap = 1.0;
  double os = 1.0;
  double coap = 1.0;

  friend bool operator==(const TermWeights&, const TermWeights&) = default;
};

// Per-frame semantic tables. coap is indexed by the label-space config index.
struct SemanticPotentials {
  Table2D op;                // [n_object x n_progress]
  Table2D ap;                // [n_action x n_progress]
  Table2D os;                // [n_object x n_scene]
  std::vector<double> coap;  // [n_configs]
  TermWeights weights;

  static SemanticPotentials zeros(const LabelSpace& space);
};

// Object-by-intent tie of a frame to the video-level intent variable.
using FrameIntentPotential = Table2D;  // [n_object x n_intent]

// Asymmetric object-to-object affinity, shared across all frame pairs.
using AffinityTable = Table2D;  // [n_object x n_object]

struct KernelConfig {
  double sigma = 150.0;  // Gaussian width in frame-index units
  double kernel_weight = 1.0;

  friend bool operator==(const KernelConfig&, const KernelConfig&) = default;
};

// Semantic score of one assignment; throws std::domain_error when the
// assignment is outside the support.
double semantic_potential(const LabelSpace& space,
                          const SemanticPotentials& pots,
                          const FrameAssignment& x);

// Semantic score for every support entry at once (hot-path form).
std::vector<double> support_scores(const LabelSpace& space,
                                   const SemanticPotentials& pots);

// Gaussian frame-distance kernel exp(-(j-i)^2 / (2 sigma^2)).
// Positions are real-valued so subsampled frames keep original distances.
double kernel(double i, double j, const KernelConfig& cfg);

// kernel_weight * kernel(i,j); the factor applied to every pairwise term.
double weighted_kernel(double i, double j, const KernelConfig& cfg);

// Directed pairwise term mu[object_i][object_j] * weighted_kernel(i,j).
// Throws std::domain_error when i == j (no self edges).
double pairwise_potential(const AffinityTable& mu, const FrameAssignment& xi,
                          const FrameAssignment& xj, double i, double j,
                          const KernelConfig& cfg);

// Fully realized potentials of one video: per-frame semantic and intent
// tables plus the shared affinity table and kernel.  Frame positions carry
// the original frame indices of possibly subsampled frames.
struct VideoModel {
  const LabelSpace* space = nullptr;
  KernelConfig kernel;
  AffinityTable mu;                            // [n_object x n_object]
  std::vector<SemanticPotentials> semantic;    // per frame
  std::vector<FrameIntentPotential> intent;    // per frame [n_object x n_intent]
  std::vector<double> positions;               // per frame kernel coordinate

  int n_frames() const { return static_cast<int>(semantic.size()); }

  // Homogeneous model: the same tables at every one of n_frames positions
  // 0..n_frames-1. Convenient for toys and generators.
  static VideoModel homogeneous(const LabelSpace& space, KernelConfig kcfg,
                                AffinityTable mu, SemanticPotentials sem,
                                FrameIntentPotential fi, int n_frames);

  void validate() const;  // shape checks; throws std::invalid_argument
};

// Score of a full joint assignment (all frames + intent):
//   sum_i phi_x(x_i)  +  sum_i phi_xi(object_i, intent)
//   + sum_{i<j} mu[object_i][object_j] * weighted_kernel(i,j).
double joint_score(const VideoModel& model,
                   const std::vector<FrameAssignment>& xs, int intent);

}  // namespace atf
