#include <cmath>
#include <thread>

#include <doctest.h>

#include "atf/common.hpp"
#include "atf/message_store.hpp"
#include "test_support.hpp"

using namespace atf;

namespace {

// A frame's outgoing record with distinct recognizable values.
OutgoingMessages record(const LabelSpace& space, int frame, double base,
                        bool truth = false) {
  OutgoingMessages m;
  m.frame_index = frame;
  m.has_truth = truth;
  int n_o = space.n_object(), n_i = space.n_intent();
  for (int o = 0; o < n_o; ++o) {
    m.fa.push_back(base + o);
    m.fb.push_back(2 * base + o);
    m.k.push_back(1.0 / n_o);
    m.k_star.push_back(truth && o == 0 ? 1.0 : 0.0);
  }
  for (int i = 0; i < n_i; ++i) {
    m.h.push_back(3 * base + i);
    m.h_star.push_back(truth ? 4 * base + i : 0.0);
  }
  return m;
}

}  // namespace

TEST_SUITE("messages") {

TEST_CASE("outgoing summaries: hand-checked expectations") {
  LabelSpace space = test::tiny_space();
  AffinityTable mu(2, 2);
  mu.at(0, 0) = 1.0;
  mu.at(0, 1) = 2.0;
  mu.at(1, 0) = 3.0;
  mu.at(1, 1) = 4.0;
  FrameIntentPotential fi(2, 2);
  fi.at(0, 0) = 0.5;
  fi.at(1, 1) = 2.0;

  // Support order: (cfg0,sc0) (cfg0,sc1) (cfg1,sc0) (cfg1,sc1); objects
  // 0,0,1,1 — so q below puts 0.75 on object 0.
  std::vector<double> q{0.5, 0.25, 0.125, 0.125};
  FrameAssignment truth{1, 1, 1, 1, 0};
  OutgoingMessages out =
      compute_outgoing(space, q, truth, fi, mu, /*frame_index=*/7);

  CHECK(out.frame_index == 7);
  CHECK(out.has_truth);
  CHECK(out.k[0] == 0.75);
  CHECK(out.k[1] == 0.25);
  // fa[o] = sum_o' qobj[o'] mu(o, o');  fb[o] = sum_o' qobj[o'] mu(o', o).
  CHECK(out.fa[0] == doctest::Approx(0.75 * 1 + 0.25 * 2).epsilon(1e-15));
  CHECK(out.fa[1] == doctest::Approx(0.75 * 3 + 0.25 * 4).epsilon(1e-15));
  CHECK(out.fb[0] == doctest::Approx(0.75 * 1 + 0.25 * 3).epsilon(1e-15));
  CHECK(out.fb[1] == doctest::Approx(0.75 * 2 + 0.25 * 4).epsilon(1e-15));
  // h[I] = sum_o qobj[o] fi(o, I); starred copies read the truth object.
  CHECK(out.h[0] == doctest::Approx(0.75 * 0.5).epsilon(1e-15));
  CHECK(out.h[1] == doctest::Approx(0.25 * 2.0).epsilon(1e-15));
  CHECK(out.h_star[0] == 0.0);
  CHECK(out.h_star[1] == 2.0);
  CHECK(out.k_star[0] == 0.0);
  CHECK(out.k_star[1] == 1.0);

  // Without truth the starred families stay zero.
  OutgoingMessages plain =
      compute_outgoing(space, q, std::nullopt, fi, mu, 7);
  CHECK_FALSE(plain.has_truth);
  CHECK(plain.h_star == std::vector<double>{0.0, 0.0});
  CHECK(plain.k_star == std::vector<double>{0.0, 0.0});
}

TEST_CASE("direct aggregation separates earlier and later senders") {
  LabelSpace space = test::tiny_space();
  KernelConfig kc{1.0, 1.0};
  std::vector<OutgoingMessages> msgs{record(space, 0, 1.0),
                                     record(space, 1, 10.0),
                                     record(space, 2, 100.0)};

  IncomingMessages in = aggregate_incoming(space, msgs, 1, kc);
  double w = std::exp(-0.5);  // both neighbours sit one frame away

  // Later senders feed fa/ka; earlier senders feed fb/kb; h has no kernel.
  for (int o = 0; o < 2; ++o) {
    CHECK(in.fa[o] == doctest::Approx((100.0 + o) * w).epsilon(1e-14));
    CHECK(in.fb[o] == doctest::Approx((2.0 + o) * w).epsilon(1e-14));
    CHECK(in.ka[o] == doctest::Approx(0.5 * w).epsilon(1e-14));
    CHECK(in.kb[o] == doctest::Approx(0.5 * w).epsilon(1e-14));
  }
  for (int i = 0; i < 2; ++i)
    CHECK(in.h[i] == doctest::Approx((3.0 + i) + (300.0 + i)).epsilon(1e-14));

  // The target's own record is skipped; a duplicate sender is an error.
  msgs.push_back(record(space, 2, 5.0));
  CHECK_THROWS_AS(aggregate_incoming(space, msgs, 1, kc),
                  std::invalid_argument);
}

TEST_CASE("store aggregation follows the recency-discount formula") {
  LabelSpace space = test::tiny_space();
  StoreConfig cfg;
  cfg.discount = 0.5;
  MessageStore store(space, cfg);
  KernelConfig kc{1.0, 1.0};

  // Frames 2 and 3 sit after the target; 3 was refreshed last.
  store.send("v", record(space, 2, 1.0));
  store.send("v", record(space, 3, 10.0));
  IncomingMessages in = store.get_approximate_incoming("v", 1, kc);

  // Eligible senders for fa: {2, 3}; ranks by recency: 3 -> d^0, 2 -> d^1.
  // M = (h / sum d^r) * sum d^r * w_j * fa_j  with h = sender count.
  double w2 = std::exp(-0.5), w3 = std::exp(-2.0);
  double norm = 2.0 / (1.0 + 0.5);
  for (int o = 0; o < 2; ++o) {
    double expect = norm * (1.0 * w3 * (10.0 + o) + 0.5 * w2 * (1.0 + o));
    CHECK(in.fa[o] == doctest::Approx(expect).epsilon(1e-13));
    CHECK(in.fb[o] == 0.0);  // nobody sits before the target
  }
  // h family: no kernel factor, same recency weights.
  for (int i = 0; i < 2; ++i) {
    double expect = norm * (1.0 * (30.0 + i) + 0.5 * (3.0 + i));
    CHECK(in.h[i] == doctest::Approx(expect).epsilon(1e-13));
  }

  // Refreshing frame 2 swaps the recency ranks.
  store.send("v", record(space, 2, 1.0));
  in = store.get_approximate_incoming("v", 1, kc);
  for (int o = 0; o < 2; ++o) {
    double expect = norm * (1.0 * w2 * (1.0 + o) + 0.5 * w3 * (10.0 + o));
    CHECK(in.fa[o] == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("kernel weighting can be disabled for the kernel families") {
  LabelSpace space = test::tiny_space();
  StoreConfig cfg;
  cfg.discount = 1.0;
  cfg.kernel_weighting = false;
  MessageStore store(space, cfg);
  store.send("v", record(space, 3, 10.0));
  IncomingMessages in =
      store.get_approximate_incoming("v", 1, KernelConfig{1.0, 1.0});
  // Without the kernel factor the raw message value comes back unscaled.
  CHECK(in.fa[0] == doctest::Approx(10.0).epsilon(1e-13));
}

TEST_CASE("malformed sends leave the store untouched") {
  LabelSpace space = test::tiny_space();
  MessageStore store(space);
  store.send("v", record(space, 0, 1.0));
  IncomingMessages before =
      store.get_approximate_incoming("v", 5, KernelConfig{2.0, 1.0});

  OutgoingMessages bad = record(space, 2, 9.0);
  bad.fa.pop_back();  // wrong width
  CHECK_THROWS_AS(store.send("v", bad), std::invalid_argument);

  IncomingMessages after =
      store.get_approximate_incoming("v", 5, KernelConfig{2.0, 1.0});
  CHECK(before.fa == after.fa);
  CHECK(before.h == after.h);
}

TEST_CASE("reset drops one video and reports the record count") {
  LabelSpace space = test::tiny_space();
  MessageStore store(space);
  store.send("a", record(space, 0, 1.0));
  store.send("a", record(space, 1, 1.0));
  store.send("b", record(space, 0, 1.0));
  CHECK(store.reset_video("a") == 2);
  CHECK(store.reset_video("a") == 0);
  IncomingMessages in =
      store.get_approximate_incoming("b", 3, KernelConfig{2.0, 1.0});
  CHECK(in.fb[0] != 0.0);  // video b survives
}

TEST_CASE("send stamps a per-video monotone iteration counter") {
  LabelSpace space = test::tiny_space();
  MessageStore store(space);
  CHECK(store.send("a", record(space, 0, 1.0)).iteration <
        store.send("a", record(space, 1, 1.0)).iteration);
  // A fresh video starts its own counter.
  auto first_b = store.send("b", record(space, 0, 1.0)).iteration;
  CHECK(first_b <= store.send("b", record(space, 1, 1.0)).iteration);
}

TEST_CASE("concurrent senders on disjoint videos do not interfere") {
  LabelSpace space = test::tiny_space();
  MessageStore store(space);
  constexpr int kSends = 200;
  auto worker = [&](const std::string& vid) {
    for (int i = 0; i < kSends; ++i)
      store.send(vid, record(space, i % 10, 1.0 + i));
  };
  std::thread ta(worker, "a"), tb(worker, "b");
  ta.join();
  tb.join();
  CHECK(store.reset_video("a") == 10);
  CHECK(store.reset_video("b") == 10);
}

}  // TEST_SUITE
