#include "atf/messages.hpp"

#include <cmath>
#include <set>

namespace atf {

IncomingMessages IncomingMessages::zeros(const LabelSpace& space) {
  IncomingMessages in;
  in.fa.assign(space.n_object(), 0.0);
  in.fb.assign(space.n_object(), 0.0);
  in.h.assign(space.n_intent(), 0.0);
  in.h_star.assign(space.n_intent(), 0.0);
  in.ka.assign(space.n_object(), 0.0);
  in.ka_star.assign(space.n_object(), 0.0);
  in.kb.assign(space.n_object(), 0.0);
  in.kb_star.assign(space.n_object(), 0.0);
  return in;
}

OutgoingMessages compute_outgoing(const LabelSpace& space,
                                  const std::vector<double>& q,
                                  const std::optional<FrameAssignment>& truth,
                                  const FrameIntentPotential& fi,
                                  const AffinityTable& mu, int frame_index) {
  if (static_cast<int>(q.size()) != space.support_size())
    throw std::invalid_argument("compute_outgoing: marginal size mismatch");
  if (!all_finite(q))
    throw std::invalid_argument("compute_outgoing: non-finite marginal");
  const int O = space.n_object();
  const int M = space.n_intent();

  OutgoingMessages out;
  out.frame_index = frame_index;
  out.k = object_marginal(space, q);

  out.fa.assign(O, 0.0);
  out.fb.assign(O, 0.0);
  for (int o = 0; o < O; ++o) {
    double row = 0.0, col = 0.0;
    for (int o2 = 0; o2 < O; ++o2) {
      row += mu.at(o, o2) * out.k[o2];
      col += mu.at(o2, o) * out.k[o2];
    }
    out.fa[o] = row;
    out.fb[o] = col;
  }

  out.h.assign(M, 0.0);
  for (int o = 0; o < O; ++o) {
    if (out.k[o] == 0.0) continue;
    for (int I = 0; I < M; ++I) out.h[I] += out.k[o] * fi.at(o, I);
  }

  out.h_star.assign(M, 0.0);
  out.k_star.assign(O, 0.0);
  if (truth) {
    if (!space.contains(*truth))
      throw std::domain_error("compute_outgoing: truth outside support");
    out.has_truth = true;
    out.k_star[truth->object] = 1.0;
    for (int I = 0; I < M; ++I) out.h_star[I] = fi.at(truth->object, I);
  }
  return out;
}

IncomingMessages aggregate_incoming(const LabelSpace& space,
                                    const std::vector<OutgoingMessages>& msgs,
                                    int target_frame,
                                    const KernelConfig& cfg) {
  IncomingMessages in = IncomingMessages::zeros(space);
  const int O = space.n_object();
  const int M = space.n_intent();

  std::set<int> seen;
  for (const OutgoingMessages& m : msgs) {
    if (m.frame_index == target_frame) continue;  // no self messages
    if (!seen.insert(m.frame_index).second)
      throw std::invalid_argument(
          "aggregate_incoming: duplicate sender frame " +
          std::to_string(m.frame_index));
    if (static_cast<int>(m.fa.size()) != O ||
        static_cast<int>(m.fb.size()) != O ||
        static_cast<int>(m.k.size()) != O ||
        static_cast<int>(m.k_star.size()) != O ||
        static_cast<int>(m.h.size()) != M ||
        static_cast<int>(m.h_star.size()) != M)
      throw std::invalid_argument("aggregate_incoming: record shape mismatch");

    double wk = weighted_kernel(target_frame, m.frame_index, cfg);
    if (m.frame_index > target_frame) {
      for (int o = 0; o < O; ++o) {
        in.fa[o] += wk * m.fa[o];
        in.ka[o] += wk * m.k[o];
        in.ka_star[o] += wk * m.k_star[o];
      }
    } else {
      for (int o = 0; o < O; ++o) {
        in.fb[o] += wk * m.fb[o];
        in.kb[o] += wk * m.k[o];
        in.kb_star[o] += wk * m.k_star[o];
      }
    }
    for (int I = 0; I < M; ++I) {
      in.h[I] += m.h[I];
      in.h_star[I] += m.h_star[I];
    }
  }
  return in;
}

}  // namespace atf
