#pragma once
// TCP transport for the message service.
//
// A WireServer exposes any MessageService (normally a MessageStore) over a
// line-oriented protocol; a WireClient implements MessageService against a
// remote server, so the trainer runs unchanged in-process or distributed.
//
// All floats travel in the canonical shortest round-trip formatting, which
// parses back to the identical bit pattern; a training run against a wire
// client therefore produces byte-identical results to one against the
// in-process store it wraps (with a serial trainer).
//
// Requests (one per line unless noted; vectors as  <name> <n> <v...>):
//   ATF1 SEND <video_id> <frame_index> <has_truth>
//     fa/fb/h/h_star/k/k_star vector lines, then  end     ->  OK <iteration>
//   ATF1 GET <video_id> <target_frame> <sigma> <kernel_weight>
//     -> OK, then fa/fb/h/h_star/ka/ka_star/kb/kb_star vector lines and end
//   ATF1 RESET <video_id>                                 ->  OK <count>
// Failures answer  ERR <message>  (validation errors keep the connection
// open; framing errors close it).

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "atf/message_store.hpp"

namespace atf {

class WireServer {
 public:
  // Binds `bind_address`:`port` (port 0 picks an ephemeral port, see
  // port()) and serves `service` until stop() or destruction. One thread
  // per connection; `service` must be safe for concurrent calls.
  WireServer(MessageService& service, std::uint16_t port = 0,
             const std::string& bind_address = "127.0.0.1");
  ~WireServer();

  WireServer(const WireServer&) = delete;
  WireServer& operator=(const WireServer&) = delete;

  std::uint16_t port() const { return port_; }
  void stop();

 private:
  void accept_loop();
  void serve_connection(int fd);

  MessageService& service_;
  std::uint16_t port_ = 0;
  int listen_fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex conn_mutex_;
  std::vector<int> open_fds_;
  std::vector<std::thread> conn_threads_;
};

// Blocking client; one connection, requests serialized by an internal lock
// so a multi-worker trainer can share a single client.
class WireClient : public MessageService {
 public:
  WireClient(const std::string& host, std::uint16_t port);
  ~WireClient() override;

  WireClient(const WireClient&) = delete;
  WireClient& operator=(const WireClient&) = delete;

  SendAck send(const std::string& video_id,
               const OutgoingMessages& msg) override;
  IncomingMessages get_approximate_incoming(
      const std::string& video_id, int target_frame,
      const KernelConfig& kernel) override;
  int reset_video(const std::string& video_id) override;

 private:
  std::string request(const std::string& payload, int reply_lines,
                      std::vector<std::string>& extra);

  std::mutex mutex_;
  int fd_ = -1;
  std::string buffer_;
};

}  // namespace atf
