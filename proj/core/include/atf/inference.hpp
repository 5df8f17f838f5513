#pragma once
// Mean-field inference over one video.
//
// The belief is fully factorized: one distribution per frame over the
// support plus one distribution over the intent.  Updates are exact
// coordinate ascent on the evidence lower bound of the time-ordered field
// (see potentials.hpp), so with damping off every single update is
// monotone in the ELBO.
//
// infer_video runs synchronous rounds: frames are visited in order, each
// visit aggregates the other frames' current messages, alternates the
// frame / intent updates to a fixed point, then republishes the frame's
// outgoing messages so later visits in the same round see fresh values.

#include <functional>
#include <iosfwd>

#include "atf/messages.hpp"

namespace atf {

struct InferenceOptions {
  int max_passes = 10;
  double tol = 1e-6;        // max per-marginal L1 change per pass
  double inner_tol = 1e-8;  // frame/intent alternation fixed point
  int inner_max = 50;
  double damping = 0.0;     // 0 = plain updates; q <- (1-d)*new + d*old
};

// One frame-marginal update given fixed neighbours and intent belief:
//   q(s)  prop.  exp{ phi_x(s) + sum_I q_I(I) fi(obj(s), I)
//                     + fa_in[obj(s)] + fb_in[obj(s)] }
// phi_x is the per-support semantic score vector (support_scores).
std::vector<double> update_frame_marginal(const LabelSpace& space,
                                          const std::vector<double>& phi_x,
                                          const FrameIntentPotential& fi,
                                          const IncomingMessages& in,
                                          const std::vector<double>& q_intent);

// Intent update from the total tie  h_total[I] = sum_all_frames h_j[I]
// (including the frame currently being visited).
std::vector<double> update_intent_marginal(std::vector<double> h_total);

struct UpdateEvent {
  enum class Kind { FrameUpdate, IntentUpdate };
  int pass = 0;
  int frame = 0;  // frame slot of the visit
  Kind kind = Kind::FrameUpdate;
};

// Called after every single coordinate update with the current state.
using InferenceObserver =
    std::function<void(const UpdateEvent&, const MarginalState&)>;

struct InferenceResult {
  MarginalState state;
  bool converged = false;
  int passes_used = 0;
  std::vector<double> pass_deltas;  // max per-marginal L1 change per pass
};

InferenceResult infer_video(const VideoModel& model,
                            const InferenceOptions& opts = {},
                            const InferenceObserver& observer = nullptr);

// Stand-alone visit of a single frame given externally fetched incoming
// messages (the asynchronous training path): both beliefs start uniform
// and alternate to the inner fixed point.
struct FrameVisit {
  std::vector<double> q;
  std::vector<double> q_intent;
  int iterations = 0;
};

FrameVisit solve_frame(const LabelSpace& space,
                       const std::vector<double>& phi_x,
                       const FrameIntentPotential& fi,
                       const IncomingMessages& in,
                       const InferenceOptions& opts = {});

// Most probable assignment per frame (independent argmax per marginal,
// ties resolved to the lowest support index).
std::vector<FrameAssignment> map_labeling(const LabelSpace& space,
                                          const MarginalState& state);

// Line-oriented marginal dump:
//   pass <n> intent <p0> <p1> ...
//   pass <n> frame <frame_index> <c>,<o>,<a>,<p>,<s>=<prob> ...   (top-k)
// Probabilities use the canonical float formatting; assignments are listed
// by descending probability with ties in support order.
void append_marginal_dump(std::ostream& os, const LabelSpace& space,
                          const MarginalState& state,
                          const std::vector<double>& positions, int pass,
                          int top_k);

}  // namespace atf
