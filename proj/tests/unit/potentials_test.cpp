#include <cmath>

#include <doctest.h>

#include "atf/potentials.hpp"
#include "test_support.hpp"

using namespace atf;

TEST_SUITE("potentials") {

TEST_CASE("semantic potential sums its four tables at the assignment") {
  LabelSpace space = test::tiny_space();
  SemanticPotentials sem = SemanticPotentials::zeros(space);
  sem.op.at(0, 0) = 0.5;
  sem.ap.at(0, 0) = 0.25;
  sem.os.at(0, 1) = 0.125;
  sem.coap[0] = 0.0625;  // config (0,0,0,0)

  FrameAssignment a{0, 0, 0, 0, 1};
  CHECK(semantic_potential(space, sem, a) == 0.9375);

  // Per-term weights scale each contribution independently.
  sem.weights = TermWeights{2.0, 4.0, 8.0, 16.0};
  CHECK(semantic_potential(space, sem, a) == 1.0 + 1.0 + 1.0 + 1.0);

  // The scene changes only the os term.
  FrameAssignment b{0, 0, 0, 0, 0};
  sem.weights = TermWeights{};
  CHECK(semantic_potential(space, sem, b) == 0.8125);
}

TEST_CASE("assignments outside the support are rejected") {
  LabelSpace space = test::tiny_space();
  SemanticPotentials sem = SemanticPotentials::zeros(space);
  // (0,1,..) is not a seen config.
  CHECK_THROWS_AS(semantic_potential(space, sem, FrameAssignment{0, 1, 0, 0, 0}),
                  std::domain_error);
}

TEST_CASE("support_scores matches the scalar form on every support state") {
  LabelSpace space = test::tiny_space();
  std::mt19937_64 rng(5);
  SemanticPotentials sem = SemanticPotentials::zeros(space);
  test::fill_random(sem.op, rng, 1.0);
  test::fill_random(sem.ap, rng, 1.0);
  test::fill_random(sem.os, rng, 1.0);
  sem.coap = {0.3, -0.7};
  sem.weights = TermWeights{1.5, 0.5, 2.0, 1.0};

  std::vector<double> scores = support_scores(space, sem);
  REQUIRE(static_cast<int>(scores.size()) == space.support_size());
  for (int s = 0; s < space.support_size(); ++s) {
    FrameAssignment a = space.support_assignment(s);
    CHECK(scores[s] == doctest::Approx(semantic_potential(space, sem, a))
                           .epsilon(1e-15));
  }
}

TEST_CASE("gaussian kernel: unit-sigma neighbours score exp(-1/2)") {
  KernelConfig k{1.0, 1.0};
  CHECK(kernel(0.0, 1.0, k) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(kernel(3.0, 3.0, k) == 1.0);
  CHECK(kernel(0.0, 2.0, k) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  // Symmetric in its arguments; kernel_weight scales linearly.
  KernelConfig k2{1.0, 2.5};
  CHECK(weighted_kernel(4.0, 1.0, k2) ==
        doctest::Approx(2.5 * kernel(1.0, 4.0, k)).epsilon(1e-15));
}

TEST_CASE("joint score counts each frame pair once, in time order") {
  LabelSpace space = test::tiny_space();
  SemanticPotentials sem = SemanticPotentials::zeros(space);
  sem.coap = {0.25, 2.0};
  AffinityTable mu(2, 2);
  mu.at(0, 1) = 4.0;   // object 0 followed by object 1
  mu.at(1, 0) = 64.0;  // would apply only to the reversed order
  FrameIntentPotential fi(2, 2);
  fi.at(0, 1) = 0.5;
  fi.at(1, 1) = 8.0;
  KernelConfig k{1.0, 1.0};
  VideoModel m = VideoModel::homogeneous(space, k, mu, sem, fi, 2);

  // Frames (config 0, scene 0) then (config 1, scene 0) under intent 1:
  //   semantic 0.25 + 2, intent tie 0.5 + 8, pairwise mu(0,1)*wk(0,1) only.
  std::vector<FrameAssignment> xs{{0, 0, 0, 0, 0}, {1, 1, 1, 1, 0}};
  double expected = 0.25 + 2.0 + 0.5 + 8.0 + 4.0 * std::exp(-0.5);
  CHECK(joint_score(m, xs, 1) == doctest::Approx(expected).epsilon(1e-14));

  // Reversing the frame assignment flips which affinity cell applies.
  std::vector<FrameAssignment> rev{xs[1], xs[0]};
  double expected_rev = 0.25 + 2.0 + 0.5 + 8.0 + 64.0 * std::exp(-0.5);
  CHECK(joint_score(m, rev, 1) ==
        doctest::Approx(expected_rev).epsilon(1e-14));
}

TEST_CASE("pairwise potential rejects self pairs") {
  AffinityTable mu(2, 2);
  FrameAssignment a{0, 0, 0, 0, 0};
  CHECK_THROWS_AS(
      pairwise_potential(mu, a, a, 1.0, 1.0, KernelConfig{1.0, 1.0}),
      std::domain_error);
}

}  // TEST_SUITE
