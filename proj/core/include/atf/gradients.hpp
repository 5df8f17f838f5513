#pragma once
// Closed-form gradients of the per-frame marginal log-likelihood under the
// mean-field belief, in two stages:
//
//   table space   d l / d (potential table entry)   for one frame
//   weight space  folded through the linear provider by the chain rule
//
// Table-space formulas (q = frame belief, q_intent = intent belief,
// qobj = object marginal of q, x* = ground truth):
//
//   semantic   d(o,p) etc.: truth indicator minus the matching
//              marginalization of q, scaled by the term weight
//   intent tie d(o,I) = 1[o = o*] softmax(h*_in + h*_self)(I)
//                       - qobj(o) q_intent(I)
//   affinity   d(a,b) = 1[a = o*] ka*(b) - qobj(a) ka(b)
//                     + 1[b = o*] kb*(a) - qobj(b) kb(a)
//
// The affinity formula charges each frame pair to both of its endpoint
// frames, so the fold into the single shared table halves the sum; after
// that halving the accumulated gradient matches finite differences of the
// exact likelihood (see the oracle tests).

#include <optional>
#include <span>

#include "atf/messages.hpp"
#include "atf/provider.hpp"

namespace atf {

// Table-space gradient contributions of a single frame.
struct GradientBundle {
  Table2D op, ap, os;
  std::vector<double> coap;
  Table2D xi;  // [n_object x n_intent]
  Table2D mu;  // [n_object x n_object]

  static GradientBundle zeros(const LabelSpace& space);
  bool finite() const;
};

void grad_semantic(const LabelSpace& space, const TermWeights& weights,
                   const std::vector<double>& q, const FrameAssignment& truth,
                   GradientBundle& out);

// h_star_in: starred intent sums from the other frames; h_star_self: this
// frame's own intent row at the truth object, fi[o*, :].
void grad_frame_intent(const LabelSpace& space,
                       const std::vector<double>& h_star_in,
                       const std::vector<double>& h_star_self,
                       const std::vector<double>& q,
                       const std::vector<double>& q_intent,
                       const FrameAssignment& truth, GradientBundle& out);

void grad_mu(const LabelSpace& space, const IncomingMessages& in,
             const std::vector<double>& q, const FrameAssignment& truth,
             GradientBundle& out);

// All three families for one visited frame.
GradientBundle frame_gradients(const LabelSpace& space,
                               const TermWeights& weights,
                               const FrameIntentPotential& fi,
                               const IncomingMessages& in,
                               const std::vector<double>& q,
                               const std::vector<double>& q_intent,
                               const FrameAssignment& truth);

// ---- weight space ----

struct HeadGrads {
  std::vector<double> w, b;
};

struct ParamGrads {
  std::vector<HeadGrads> heads;  // provider head order
  Table2D mu;
  long frames = 0;  // bundles folded in

  static ParamGrads zeros(const LabelSpace& space,
                          const PotentialProvider& provider);
  void merge(const ParamGrads& other);
  bool finite() const;
};

// Every unordered frame pair is charged to both endpoints by grad_mu, so
// only half of each per-frame affinity gradient enters the shared table.
inline constexpr double kPairEndpointShare = 0.5;

// Fold one frame's table-space bundle into weight-space gradients.  The
// intent-tie head additionally receives the weight-decay term
// -decay * w_xi (weights only, not biases).
void backprop_provider(const LabelSpace& space,
                       const PotentialProvider& provider,
                       const GradientBundle& bundle,
                       std::span<const double> features, double intent_decay,
                       ParamGrads& acc);

// One ascent step  param += lr * mean-gradient  (mean over folded frames).
// update_mu = false freezes the affinity table (ablations).  Throws
// std::runtime_error on non-finite gradients.
void apply_sgd_update(PotentialProvider& provider, AffinityTable& mu,
                      const ParamGrads& grads, double lr, bool update_mu);

}  // namespace atf
