#pragma once
// Factorized belief state over one video: a distribution over the support
// for every frame plus one distribution over the video-level intent.

#include <vector>

#include "atf/label_space.hpp"

namespace atf {

struct MarginalState {
  std::vector<std::vector<double>> frame;  // [n_frames][support_size]
  std::vector<double> intent;              // [n_intent]

  static MarginalState uniform(const LabelSpace& space, int n_frames) {
    MarginalState st;
    st.frame.assign(n_frames, std::vector<double>(
                                  space.support_size(),
                                  1.0 / space.support_size()));
    st.intent.assign(space.n_intent(), 1.0 / space.n_intent());
    return st;
  }

  int n_frames() const { return static_cast<int>(frame.size()); }
};

// Object marginal of one frame distribution: sums support mass per object.
inline std::vector<double> object_marginal(const LabelSpace& space,
                                           const std::vector<double>& q) {
  std::vector<double> out(space.n_object(), 0.0);
  for (int s = 0; s < space.support_size(); ++s)
    out[space.support_object(s)] += q[s];
  return out;
}

// Category marginal of one frame distribution.
inline std::vector<double> category_marginal(const LabelSpace& space,
                                             const std::vector<double>& q) {
  std::vector<double> out(space.n_category(), 0.0);
  for (int s = 0; s < space.support_size(); ++s)
    out[space.support_category(s)] += q[s];
  return out;
}

}  // namespace atf
