#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "atf/gradcheck.hpp"
#include "atf/gradients.hpp"
#include "atf/oracle.hpp"
#include "test_support.hpp"

using namespace atf;

namespace {

// Exact incoming messages for frame `target` built from exact per-frame
// marginals — the converged-belief stand-in used by the finite-difference
// comparisons.
IncomingMessages exact_incoming(const VideoModel& m,
                                const MarginalState& state,
                                const std::vector<FrameAssignment>& truth,
                                int target) {
  const LabelSpace& space = *m.space;
  std::vector<OutgoingMessages> msgs;
  for (int j = 0; j < m.n_frames(); ++j) {
    if (j == target) continue;
    msgs.push_back(compute_outgoing(space, state.frame[j], truth[j],
                                    m.intent[j], m.mu,
                                    static_cast<int>(m.positions[j])));
  }
  return aggregate_incoming(space, msgs,
                            static_cast<int>(m.positions[target]), m.kernel);
}

double fd_of(VideoModel& m, double* entry,
             const std::vector<FrameAssignment>& xs) {
  return finite_diff_grad(m, entry, xs, 1e-5);
}

}  // namespace

TEST_SUITE("gradients") {

TEST_CASE("semantic gradient matches finite differences of the exact "
          "log-likelihood") {
  LabelSpace space = test::tiny_space();
  std::mt19937_64 rng(31);
  VideoModel m = test::random_video_model(space, rng, 2);

  std::vector<FrameAssignment> truth{space.support_assignment(1),
                                     space.support_assignment(2)};
  ExactMarginals em = exact_marginals(m);

  GradientBundle acc = GradientBundle::zeros(space);
  for (int i = 0; i < 2; ++i)
    grad_semantic(space, m.semantic[i].weights, em.marginals.frame[i],
                  truth[i], acc);

  // Shared-table accumulation: both frames use the same op table, so the
  // summed per-frame gradients must equal the derivative of the total.
  for (int o = 0; o < 2; ++o)
    for (int p = 0; p < 2; ++p) {
      double fd = 0.0;
      for (int i = 0; i < 2; ++i)
        fd += fd_of(m, &m.semantic[i].op.at(o, p), truth);
      CHECK(gradcheck_relative_error(acc.op.at(o, p), fd, 1e-3) <= 1e-5);
    }
  for (std::size_t c = 0; c < acc.coap.size(); ++c) {
    double fd = 0.0;
    for (int i = 0; i < 2; ++i) fd += fd_of(m, &m.semantic[i].coap[c], truth);
    CHECK(gradcheck_relative_error(acc.coap[c], fd, 1e-3) <= 1e-5);
  }
}

TEST_CASE("intent-tie gradient is exact where the intent tables vanish") {
  LabelSpace space = test::tiny_space();
  std::mt19937_64 rng(32);
  VideoModel m = test::random_video_model(space, rng, 2);
  for (auto& fi : m.intent) fi.fill(0.0);

  std::vector<FrameAssignment> truth{space.support_assignment(0),
                                     space.support_assignment(3)};
  ExactMarginals em = exact_marginals(m);

  GradientBundle acc = GradientBundle::zeros(space);
  for (int i = 0; i < 2; ++i) {
    // Starred intent sums from the other frame plus this frame's own row.
    std::vector<double> h_star_in(space.n_intent(), 0.0);
    for (int j = 0; j < 2; ++j) {
      if (j == i) continue;
      for (int I = 0; I < space.n_intent(); ++I)
        h_star_in[I] += m.intent[j].at(truth[j].object, I);
    }
    std::vector<double> h_self(space.n_intent(), 0.0);
    for (int I = 0; I < space.n_intent(); ++I)
      h_self[I] = m.intent[i].at(truth[i].object, I);
    grad_frame_intent(space, h_star_in, h_self, em.marginals.frame[i],
                      em.marginals.intent, truth[i], acc);
  }

  bool any_large = false;
  for (int o = 0; o < 2; ++o)
    for (int I = 0; I < space.n_intent(); ++I) {
      double fd = 0.0;
      for (int i = 0; i < 2; ++i)
        fd += fd_of(m, &m.intent[i].at(o, I), truth);
      CHECK(gradcheck_relative_error(acc.xi.at(o, I), fd, 1e-3) <= 1e-5);
      if (std::abs(fd) > 1e-2) any_large = true;
    }
  CHECK(any_large);  // the comparison is not vacuous
}

TEST_CASE("a sign flip in the affinity gradient is caught") {
  LabelSpace space = test::tiny_space();
  std::mt19937_64 rng(33);
  VideoModel m = test::random_video_model(space, rng, 2);
  m.mu.fill(0.0);
  for (auto& fi : m.intent) fi.fill(0.0);  // affinity-exact regime

  std::vector<FrameAssignment> truth{space.support_assignment(0),
                                     space.support_assignment(2)};
  ExactMarginals em = exact_marginals(m);

  GradientBundle acc = GradientBundle::zeros(space);
  for (int i = 0; i < 2; ++i)
    grad_mu(space, exact_incoming(m, em.marginals, truth, i),
            em.marginals.frame[i], truth[i], acc);

  double worst_ok = 0.0, best_flipped = 1e9;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double fd = fd_of(m, &m.mu.at(a, b), truth);
      double folded = kPairEndpointShare * acc.mu.at(a, b);
      worst_ok = std::max(worst_ok,
                          gradcheck_relative_error(folded, fd, 1e-3));
      if (std::abs(fd) > 1e-3)
        best_flipped = std::min(
            best_flipped, gradcheck_relative_error(-folded, fd, 1e-3));
    }
  CHECK(worst_ok <= 1e-5);      // correct gradients pass
  CHECK(best_flipped > 1e-3);   // flipped gradients cannot slip through
}

TEST_CASE("bundle accumulation is order independent") {
  LabelSpace space = test::tiny_space();
  std::mt19937_64 rng(34);
  VideoModel m = test::random_video_model(space, rng, 4);
  std::vector<FrameAssignment> truth;
  for (int i = 0; i < 4; ++i)
    truth.push_back(space.support_assignment(i % space.support_size()));
  ExactMarginals em = exact_marginals(m);

  auto accumulate = [&](const std::vector<int>& order) {
    GradientBundle acc = GradientBundle::zeros(space);
    for (int i : order)
      grad_semantic(space, m.semantic[i].weights, em.marginals.frame[i],
                    truth[i], acc);
    return acc;
  };
  GradientBundle fwd = accumulate({0, 1, 2, 3});
  GradientBundle rev = accumulate({3, 2, 1, 0});
  for (std::size_t i = 0; i < fwd.op.values().size(); ++i)
    CHECK(std::abs(fwd.op.values()[i] - rev.op.values()[i]) <= 1e-12);
  for (std::size_t i = 0; i < fwd.coap.size(); ++i)
    CHECK(std::abs(fwd.coap[i] - rev.coap[i]) <= 1e-12);
}

TEST_CASE("sgd step: mean gradient, optional frozen affinity") {
  LabelSpace space = test::tiny_space();
  PotentialProvider provider(space, 3);
  AffinityTable mu(2, 2);

  ParamGrads grads = ParamGrads::zeros(space, provider);
  grads.frames = 2;  // accumulated over two frames
  grads.heads[0].b.assign(grads.heads[0].b.size(), 2.0);
  grads.mu.fill(4.0);

  apply_sgd_update(provider, mu, grads, 0.5, /*update_mu=*/true);
  CHECK(provider.op().b[0] == doctest::Approx(0.5 * 2.0 / 2).epsilon(1e-15));
  CHECK(mu.at(0, 0) == doctest::Approx(0.5 * 4.0 / 2).epsilon(1e-15));

  apply_sgd_update(provider, mu, grads, 0.5, /*update_mu=*/false);
  CHECK(mu.at(0, 0) == doctest::Approx(1.0).epsilon(1e-15));  // frozen
}

TEST_CASE("relative error floor tames tiny denominators") {
  CHECK(gradcheck_relative_error(1.0, 2.0, 1e-3) == 0.5);
  // Rounding-level noise on a near-zero gradient is not an error.
  CHECK(gradcheck_relative_error(1e-9, 0.0, 1e-3) ==
        doctest::Approx(1e-6).epsilon(1e-12));
}

}  // TEST_SUITE
