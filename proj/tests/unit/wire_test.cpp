#include <doctest.h>

#include "atf/message_store.hpp"
#include "atf/wire.hpp"
#include "test_support.hpp"

using namespace atf;

namespace {

OutgoingMessages sample_record(const LabelSpace& space, int frame,
                               double base) {
  OutgoingMessages m;
  m.frame_index = frame;
  m.has_truth = true;
  for (int o = 0; o < space.n_object(); ++o) {
    // Values with non-terminating binary fractions exercise the canonical
    // float round-trip on the wire.
    m.fa.push_back(base + o + 0.1);
    m.fb.push_back(base + o + 0.2);
    m.k.push_back(o == 0 ? 0.3 : 0.7);
    m.k_star.push_back(o == 1 ? 1.0 : 0.0);
  }
  for (int i = 0; i < space.n_intent(); ++i) {
    m.h.push_back(base / 3.0 + i);
    m.h_star.push_back(base / 7.0 + i);
  }
  return m;
}

}  // namespace

TEST_SUITE("wire") {

TEST_CASE("wire client reproduces the in-process store bit for bit") {
  LabelSpace space = test::tiny_space();
  StoreConfig cfg;
  cfg.discount = 0.8;
  MessageStore local(space, cfg);   // reference
  MessageStore served(space, cfg);  // behind the server
  WireServer server(served, 0);
  WireClient client("127.0.0.1", server.port());

  KernelConfig kc{1.5, 0.9};
  for (int f : {0, 2, 5, 3}) {
    SendAck a = local.send("vid", sample_record(space, f, f * 1.7));
    SendAck b = client.send("vid", sample_record(space, f, f * 1.7));
    CHECK(a.iteration == b.iteration);
  }
  for (int target : {1, 4, 0}) {
    IncomingMessages want = local.get_approximate_incoming("vid", target, kc);
    IncomingMessages got = client.get_approximate_incoming("vid", target, kc);
    // Bitwise equality: the canonical float format round-trips exactly.
    CHECK(want.fa == got.fa);
    CHECK(want.fb == got.fb);
    CHECK(want.h == got.h);
    CHECK(want.h_star == got.h_star);
    CHECK(want.ka == got.ka);
    CHECK(want.ka_star == got.ka_star);
    CHECK(want.kb == got.kb);
    CHECK(want.kb_star == got.kb_star);
  }
  CHECK(client.reset_video("vid") == local.reset_video("vid"));
}

TEST_CASE("a validation error answers ERR and keeps the connection open") {
  LabelSpace space = test::tiny_space();
  MessageStore served(space);
  WireServer server(served, 0);
  WireClient client("127.0.0.1", server.port());

  OutgoingMessages bad = sample_record(space, 1, 1.0);
  bad.h.pop_back();  // wrong intent width
  CHECK_THROWS(client.send("vid", bad));

  // Same connection, next request succeeds.
  CHECK_NOTHROW(client.send("vid", sample_record(space, 1, 1.0)));
  CHECK(client.reset_video("vid") == 1);
}

TEST_CASE("two clients share one server-side store") {
  LabelSpace space = test::tiny_space();
  MessageStore served(space);
  WireServer server(served, 0);
  WireClient a("127.0.0.1", server.port());
  WireClient b("127.0.0.1", server.port());

  a.send("vid", sample_record(space, 0, 1.0));
  b.send("vid", sample_record(space, 3, 2.0));
  IncomingMessages in =
      a.get_approximate_incoming("vid", 1, KernelConfig{2.0, 1.0});
  CHECK(in.fa[0] != 0.0);  // frame 3 (sent by b) visible to a
  CHECK(in.fb[0] != 0.0);  // frame 0 (sent by a)
  CHECK(b.reset_video("vid") == 2);
}

}  // TEST_SUITE
