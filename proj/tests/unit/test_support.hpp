#pragma once
// Shared fixtures for the unit tests: a tiny two-config label space with
// hand-fillable tables, plus helpers to build small random models whose
// joint distribution is still enumerable.

#include <random>

#include "atf/potentials.hpp"

namespace atf::test {

// Two configs (0,0,0,0) and (1,1,1,1) over two scenes: support size 4,
// small enough that every expected value fits on paper.
inline LabelSpace tiny_space() {
  return LabelSpace(2, 2, 2, 2, 2, 2,
                    {SeenConfig{0, 0, 0, 0}, SeenConfig{1, 1, 1, 1}});
}

inline void fill_random(Table2D& t, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  for (double& v : t.values()) v = g(rng);
}

// Homogeneous random model over `space`; every coupling active.
inline VideoModel random_video_model(const LabelSpace& space,
                                     std::mt19937_64& rng, int frames,
                                     double scale = 0.6) {
  std::normal_distribution<double> g(0.0, scale);
  AffinityTable mu(space.n_object(), space.n_object());
  fill_random(mu, rng, scale);
  SemanticPotentials sem = SemanticPotentials::zeros(space);
  fill_random(sem.op, rng, scale);
  fill_random(sem.ap, rng, scale);
  fill_random(sem.os, rng, scale);
  for (double& v : sem.coap) v = g(rng);
  FrameIntentPotential fi(space.n_object(), space.n_intent());
  fill_random(fi, rng, scale);
  return VideoModel::homogeneous(space, KernelConfig{2.0, 1.0},
                                 std::move(mu), std::move(sem),
                                 std::move(fi), frames);
}

}  // namespace atf::test
