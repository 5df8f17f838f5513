#include "atf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace atf {
namespace {

void check_finite(const std::vector<double>& v, const char* what) {
  if (!all_finite(v))
    throw std::invalid_argument(std::string(what) + " is not finite");
}

std::vector<double> damped(std::vector<double> fresh,
                           const std::vector<double>& old, double damping) {
  if (damping != 0.0)
    for (std::size_t i = 0; i < fresh.size(); ++i)
      fresh[i] = (1.0 - damping) * fresh[i] + damping * old[i];
  return fresh;
}

// Intent tie of one frame at its current belief: h_self[I] = qobj . fi[:,I].
std::vector<double> self_intent_tie(const LabelSpace& space,
                                    const std::vector<double>& q,
                                    const FrameIntentPotential& fi) {
  std::vector<double> qobj = object_marginal(space, q);
  std::vector<double> h(space.n_intent(), 0.0);
  for (int o = 0; o < space.n_object(); ++o) {
    if (qobj[o] == 0.0) continue;
    for (int I = 0; I < space.n_intent(); ++I) h[I] += qobj[o] * fi.at(o, I);
  }
  return h;
}

}  // namespace

std::vector<double> update_frame_marginal(const LabelSpace& space,
                                          const std::vector<double>& phi_x,
                                          const FrameIntentPotential& fi,
                                          const IncomingMessages& in,
                                          const std::vector<double>& q_intent) {
  if (static_cast<int>(phi_x.size()) != space.support_size())
    throw std::invalid_argument("update_frame_marginal: phi_x size mismatch");
  check_finite(phi_x, "phi_x");
  check_finite(in.fa, "incoming fa");
  check_finite(in.fb, "incoming fb");
  check_finite(q_intent, "q_intent");

  // Expected intent tie per object under the current intent belief.
  std::vector<double> e_fi(space.n_object(), 0.0);
  for (int o = 0; o < space.n_object(); ++o)
    for (int I = 0; I < space.n_intent(); ++I)
      e_fi[o] += q_intent[I] * fi.at(o, I);

  std::vector<double> q(space.support_size());
  for (int s = 0; s < space.support_size(); ++s) {
    int o = space.support_object(s);
    q[s] = phi_x[s] + e_fi[o] + in.fa[o] + in.fb[o];
  }
  softmax_inplace(q);
  return q;
}

std::vector<double> update_intent_marginal(std::vector<double> h_total) {
  check_finite(h_total, "h_total");
  softmax_inplace(h_total);
  return h_total;
}

FrameVisit solve_frame(const LabelSpace& space,
                       const std::vector<double>& phi_x,
                       const FrameIntentPotential& fi,
                       const IncomingMessages& in,
                       const InferenceOptions& opts) {
  FrameVisit v;
  v.q.assign(space.support_size(), 1.0 / space.support_size());
  v.q_intent.assign(space.n_intent(), 1.0 / space.n_intent());
  for (int it = 0; it < opts.inner_max; ++it) {
    ++v.iterations;
    std::vector<double> q_new =
        damped(update_frame_marginal(space, phi_x, fi, in, v.q_intent), v.q,
               opts.damping);
    std::vector<double> h = self_intent_tie(space, q_new, fi);
    for (std::size_t I = 0; I < h.size(); ++I) h[I] += in.h[I];
    std::vector<double> qi_new =
        damped(update_intent_marginal(std::move(h)), v.q_intent, opts.damping);
    double delta =
        l1_distance(q_new, v.q) + l1_distance(qi_new, v.q_intent);
    v.q = std::move(q_new);
    v.q_intent = std::move(qi_new);
    if (delta < opts.inner_tol) break;
  }
  return v;
}

InferenceResult infer_video(const VideoModel& model,
                            const InferenceOptions& opts,
                            const InferenceObserver& observer) {
  model.validate();
  const LabelSpace& space = *model.space;
  const int T = model.n_frames();

  InferenceResult res;
  res.state = MarginalState::uniform(space, T);

  std::vector<std::vector<double>> phi(T);
  for (int i = 0; i < T; ++i)
    phi[i] = support_scores(space, model.semantic[i]);

  // Outgoing records for every frame at the current belief.
  std::vector<OutgoingMessages> outgoing(T);
  auto publish = [&](int i) {
    outgoing[i] = compute_outgoing(
        space, res.state.frame[i], std::nullopt, model.intent[i], model.mu,
        static_cast<int>(std::llround(model.positions[i])));
  };
  for (int i = 0; i < T; ++i) publish(i);

  for (int pass = 0; pass < opts.max_passes; ++pass) {
    MarginalState before = res.state;
    for (int i = 0; i < T; ++i) {
      int target = static_cast<int>(std::llround(model.positions[i]));
      IncomingMessages in =
          aggregate_incoming(space, outgoing, target, model.kernel);
      // Alternate this frame's belief with the intent belief while the rest
      // of the video stays fixed; both are exact coordinate updates.
      for (int it = 0; it < opts.inner_max; ++it) {
        std::vector<double> q_new =
            damped(update_frame_marginal(space, phi[i], model.intent[i], in,
                                         res.state.intent),
                   res.state.frame[i], opts.damping);
        double dq = l1_distance(q_new, res.state.frame[i]);
        res.state.frame[i] = std::move(q_new);
        if (observer)
          observer(UpdateEvent{pass, i, UpdateEvent::Kind::FrameUpdate},
                   res.state);

        std::vector<double> h =
            self_intent_tie(space, res.state.frame[i], model.intent[i]);
        for (std::size_t I = 0; I < h.size(); ++I) h[I] += in.h[I];
        std::vector<double> qi_new = damped(
            update_intent_marginal(std::move(h)), res.state.intent,
            opts.damping);
        double di = l1_distance(qi_new, res.state.intent);
        res.state.intent = std::move(qi_new);
        if (observer)
          observer(UpdateEvent{pass, i, UpdateEvent::Kind::IntentUpdate},
                   res.state);
        if (dq + di < opts.inner_tol) break;
      }
      publish(i);
    }
    double delta = l1_distance(res.state.intent, before.intent);
    for (int i = 0; i < T; ++i)
      delta = std::max(delta,
                       l1_distance(res.state.frame[i], before.frame[i]));
    res.pass_deltas.push_back(delta);
    res.passes_used = pass + 1;
    if (delta < opts.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

std::vector<FrameAssignment> map_labeling(const LabelSpace& space,
                                          const MarginalState& state) {
  std::vector<FrameAssignment> out;
  out.reserve(state.frame.size());
  for (const std::vector<double>& q : state.frame) {
    // max_element keeps the first maximum -> lowest support index on ties.
    int s = static_cast<int>(
        std::max_element(q.begin(), q.end()) - q.begin());
    out.push_back(space.support_assignment(s));
  }
  return out;
}

void append_marginal_dump(std::ostream& os, const LabelSpace& space,
                          const MarginalState& state,
                          const std::vector<double>& positions, int pass,
                          int top_k) {
  os << "pass " << pass << " intent";
  for (double p : state.intent) os << ' ' << format_double(p);
  os << '\n';
  for (int i = 0; i < state.n_frames(); ++i) {
    const std::vector<double>& q = state.frame[i];
    std::vector<int> order(q.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return q[a] > q[b]; });
    int k = std::min<int>(top_k, static_cast<int>(order.size()));
    os << "pass " << pass << " frame "
       << static_cast<long long>(std::llround(positions[i]));
    for (int r = 0; r < k; ++r) {
      FrameAssignment x = space.support_assignment(order[r]);
      os << ' ' << x.category << ',' << x.object << ',' << x.action << ','
         << x.progress << ',' << x.scene << '=' << format_double(q[order[r]]);
    }
    os << '\n';
  }
}

}  // namespace atf
