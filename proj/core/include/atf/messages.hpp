#pragma once
// Per-frame message records exchanged during inference and training.
//
// A frame summarizes its current belief into six small vectors:
//   fa[o]      expected affinity row   sum_o' qobj[o'] * mu[o][o']
//              (o at this side, the *earlier* side of a pair)
//   fb[o]      expected affinity col   sum_o' qobj[o'] * mu[o'][o]
//              (o at the *later* side of a pair)
//   h[I]       expected intent tie     sum_o qobj[o] * fi[o][I]
//   h_star[I]  intent tie at the ground-truth object (training only)
//   k[o]       the object marginal itself
//   k_star[o]  one-hot ground-truth object (training only)
//
// Receivers combine them with the frame-distance kernel: messages from later
// frames enter through fa / k (the receiver acts as the earlier, row side),
// messages from earlier frames through fb / k (receiver on the column side).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atf/marginals.hpp"
#include "atf/potentials.hpp"

namespace atf {

struct OutgoingMessages {
  int frame_index = 0;        // original frame index (kernel coordinate)
  std::int64_t iteration = 0; // stamp assigned by the message store
  bool has_truth = false;

  std::vector<double> fa;      // [n_object]
  std::vector<double> fb;      // [n_object]
  std::vector<double> h;       // [n_intent]
  std::vector<double> h_star;  // [n_intent]  zero unless has_truth
  std::vector<double> k;       // [n_object]
  std::vector<double> k_star;  // [n_object]  zero unless has_truth
};

// Kernel-weighted sums of other frames' messages as seen from one frame.
struct IncomingMessages {
  std::vector<double> fa;      // [n_object] from later frames
  std::vector<double> fb;      // [n_object] from earlier frames
  std::vector<double> h;       // [n_intent] from all other frames
  std::vector<double> h_star;  // [n_intent]
  std::vector<double> ka;      // [n_object] from later frames
  std::vector<double> ka_star; // [n_object]
  std::vector<double> kb;      // [n_object] from earlier frames
  std::vector<double> kb_star; // [n_object]

  static IncomingMessages zeros(const LabelSpace& space);
};

// Summarize one frame's marginal into its outgoing record.  When
// ground_truth is present the starred fields are populated, otherwise they
// stay zero and has_truth is false.
OutgoingMessages compute_outgoing(const LabelSpace& space,
                                  const std::vector<double>& q,
                                  const std::optional<FrameAssignment>& truth,
                                  const FrameIntentPotential& fi,
                                  const AffinityTable& mu, int frame_index);

// Exact kernel-weighted aggregation of a message set for `target_frame`:
//   fa_in[o] = sum_{j > target} fa_j[o] * wk(target, j)      (later frames)
//   fb_in[o] = sum_{j < target} fb_j[o] * wk(j, target)      (earlier frames)
//   h_in[I]  = sum_{j != target} h_j[I]                      (no kernel)
// and the same pattern for the starred and k families.  A record whose
// frame_index equals target_frame is skipped; two records for the same
// frame are a caller error (throws std::invalid_argument).
IncomingMessages aggregate_incoming(const LabelSpace& space,
                                    const std::vector<OutgoingMessages>& msgs,
                                    int target_frame,
                                    const KernelConfig& cfg);

}  // namespace atf
