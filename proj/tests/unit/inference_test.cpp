#include <doctest.h>

#include "atf/common.hpp"
#include "atf/inference.hpp"
#include "atf/oracle.hpp"
#include "test_support.hpp"

using namespace atf;

TEST_SUITE("inference") {

TEST_CASE("decoupled model: marginals are exact after the first pass") {
  LabelSpace space = test::tiny_space();
  std::mt19937_64 rng(21);
  VideoModel m = test::random_video_model(space, rng, 3);
  m.mu.fill(0.0);
  for (auto& fi : m.intent) fi.fill(0.0);

  InferenceResult res = infer_video(m);
  ExactMarginals em = exact_marginals(m);

  CHECK(res.converged);
  // The fixed point is reached within the first pass; the second pass only
  // confirms that nothing moves.
  CHECK(res.passes_used <= 2);
  if (res.passes_used == 2) CHECK(res.pass_deltas[1] <= 1e-12);
  for (int i = 0; i < 3; ++i)
    CHECK(l1_distance(res.state.frame[i], em.marginals.frame[i]) <= 1e-12);
  CHECK(l1_distance(res.state.intent, em.marginals.intent) <= 1e-12);
}

TEST_CASE("coupled model: every pass raises the ELBO") {
  LabelSpace space = test::tiny_space();
  std::mt19937_64 rng(22);
  VideoModel m = test::random_video_model(space, rng, 3, 1.0);

  std::vector<double> elbos;
  MarginalState last;
  int last_pass = -1;
  auto observer = [&](const UpdateEvent& e, const MarginalState& s) {
    if (e.pass != last_pass && last_pass >= 0) elbos.push_back(elbo(m, last));
    last_pass = e.pass;
    last = s;
  };
  InferenceResult res = infer_video(m, {}, observer);
  elbos.push_back(elbo(m, res.state));

  REQUIRE(elbos.size() >= 2);
  for (std::size_t p = 1; p < elbos.size(); ++p)
    CHECK(elbos[p] >= elbos[p - 1] - 1e-9);
  CHECK(elbos.back() <= partition_function(m) + 1e-9);
}

TEST_CASE("damped updates reach the same fixed point") {
  LabelSpace space = test::tiny_space();
  std::mt19937_64 rng(23);
  VideoModel m = test::random_video_model(space, rng, 3);

  InferenceOptions plain;
  InferenceOptions damped;
  damped.damping = 0.5;
  damped.max_passes = 60;
  InferenceResult a = infer_video(m, plain);
  InferenceResult b = infer_video(m, damped);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  for (int i = 0; i < 3; ++i)
    CHECK(l1_distance(a.state.frame[i], b.state.frame[i]) <= 1e-4);
}

TEST_CASE("solve_frame agrees with full inference on a one-frame video") {
  LabelSpace space = test::tiny_space();
  std::mt19937_64 rng(24);
  VideoModel m = test::random_video_model(space, rng, 1);

  InferenceResult full = infer_video(m);
  FrameVisit visit = solve_frame(space, support_scores(space, m.semantic[0]),
                                 m.intent[0], IncomingMessages::zeros(space));
  CHECK(l1_distance(full.state.frame[0], visit.q) <= 1e-6);
  CHECK(l1_distance(full.state.intent, visit.q_intent) <= 1e-6);
}

TEST_CASE("map labeling breaks ties toward the lowest support index") {
  LabelSpace space = test::tiny_space();
  MarginalState st = MarginalState::uniform(space, 1);
  std::vector<FrameAssignment> map = map_labeling(space, st);
  REQUIRE(map.size() == 1);
  CHECK(space.support_index(map[0]) == 0);

  st.frame[0] = {0.1, 0.4, 0.4, 0.1};  // tie between entries 1 and 2
  map = map_labeling(space, st);
  CHECK(space.support_index(map[0]) == 1);
}

}  // TEST_SUITE
