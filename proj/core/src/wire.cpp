#include "atf/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <stdexcept>

#include "atf/common.hpp"

namespace atf {
namespace {

bool read_line(int fd, std::string& buf, std::string& line) {
  for (;;) {
    std::size_t pos = buf.find('\n');
    if (pos != std::string::npos) {
      line.assign(buf, 0, pos);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      buf.erase(0, pos + 1);
      return true;
    }
    char chunk[4096];
    ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return false;
    }
    buf.append(chunk, static_cast<std::size_t>(n));
  }
}

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

void append_vector_line(std::string& out, const char* name,
                        const std::vector<double>& v) {
  out += name;
  out += ' ';
  out += std::to_string(v.size());
  for (double x : v) {
    out += ' ';
    out += format_double(x);
  }
  out += '\n';
}

// Parses "<name> <n> <v...>"; throws std::runtime_error on any mismatch.
std::vector<double> parse_vector_line(const std::string& line,
                                      const char* name) {
  std::vector<std::string> toks = split_tokens(line);
  if (toks.size() < 2 || toks[0] != name)
    throw std::runtime_error(std::string("wire: expected vector line '") +
                             name + "', got '" + line + "'");
  long n = std::stol(toks[1]);
  if (n < 0 || static_cast<std::size_t>(n) != toks.size() - 2)
    throw std::runtime_error(std::string("wire: bad length in '") + name +
                             "' line");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] = parse_double(toks[static_cast<std::size_t>(i) + 2]);
  return v;
}

std::string sanitize(std::string msg) {
  for (char& c : msg)
    if (c == '\n' || c == '\r') c = ' ';
  return msg;
}

void check_video_id(const std::string& id) {
  if (id.empty() || id.find_first_of(" \t\r\n") != std::string::npos)
    throw std::invalid_argument(
        "wire: video id must be non-empty and free of whitespace");
}

int int_token(const std::string& tok) { return std::stoi(tok); }

}  // namespace

// ---- server ----

WireServer::WireServer(MessageService& service, std::uint16_t port,
                       const std::string& bind_address)
    : service_(service) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0)
    throw std::runtime_error(std::string("wire: socket: ") +
                             std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw std::runtime_error("wire: bad bind address: " + bind_address);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) <
          0 ||
      ::listen(listen_fd_, 16) < 0) {
    int err = errno;
    ::close(listen_fd_);
    throw std::runtime_error(std::string("wire: bind/listen: ") +
                             std::strerror(err));
  }
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
  acceptor_ = std::thread(&WireServer::accept_loop, this);
}

WireServer::~WireServer() { stop(); }

void WireServer::stop() {
  bool expected = false;
  if (!stopping_.compare_exchange_strong(expected, true)) {
    if (acceptor_.joinable()) acceptor_.join();
    return;
  }
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard<std::mutex> lock(conn_mutex_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  for (std::thread& t : conn_threads_)
    if (t.joinable()) t.join();
}

void WireServer::accept_loop() {
  for (;;) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR && !stopping_) continue;
      break;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard<std::mutex> lock(conn_mutex_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    open_fds_.push_back(fd);
    conn_threads_.emplace_back(&WireServer::serve_connection, this, fd);
  }
}

void WireServer::serve_connection(int fd) {
  std::string buf, line;
  bool keep_open = true;
  while (keep_open && read_line(fd, buf, line)) {
    std::string reply;
    try {
      std::vector<std::string> toks = split_tokens(line);
      if (toks.size() < 2 || toks[0] != "ATF1")
        throw std::runtime_error("wire: malformed request line");
      if (toks[1] == "SEND") {
        if (toks.size() != 5)
          throw std::runtime_error("wire: SEND wants video, frame, truth");
        OutgoingMessages msg;
        msg.frame_index = int_token(toks[3]);
        msg.has_truth = toks[4] == "1";
        std::string body;
        static const char* kFields[] = {"fa", "fb", "h", "h_star", "k",
                                        "k_star"};
        std::vector<double>* slots[] = {&msg.fa, &msg.fb,     &msg.h,
                                        &msg.h_star, &msg.k, &msg.k_star};
        for (int f = 0; f < 6; ++f) {
          if (!read_line(fd, buf, body))
            throw std::runtime_error("wire: connection closed mid-SEND");
          *slots[f] = parse_vector_line(body, kFields[f]);
        }
        if (!read_line(fd, buf, body) || body != "end")
          throw std::runtime_error("wire: SEND body must finish with 'end'");
        try {
          SendAck ack = service_.send(toks[2], msg);
          reply = "OK " + std::to_string(ack.iteration) + '\n';
        } catch (const std::invalid_argument& e) {
          reply = "ERR " + sanitize(e.what()) + '\n';
        }
      } else if (toks[1] == "GET") {
        if (toks.size() != 6)
          throw std::runtime_error(
              "wire: GET wants video, frame, sigma, kernel_weight");
        KernelConfig kcfg;
        kcfg.sigma = parse_double(toks[4]);
        kcfg.kernel_weight = parse_double(toks[5]);
        try {
          IncomingMessages in = service_.get_approximate_incoming(
              toks[2], int_token(toks[3]), kcfg);
          reply = "OK\n";
          append_vector_line(reply, "fa", in.fa);
          append_vector_line(reply, "fb", in.fb);
          append_vector_line(reply, "h", in.h);
          append_vector_line(reply, "h_star", in.h_star);
          append_vector_line(reply, "ka", in.ka);
          append_vector_line(reply, "ka_star", in.ka_star);
          append_vector_line(reply, "kb", in.kb);
          append_vector_line(reply, "kb_star", in.kb_star);
          reply += "end\n";
        } catch (const std::invalid_argument& e) {
          reply = "ERR " + sanitize(e.what()) + '\n';
        }
      } else if (toks[1] == "RESET") {
        if (toks.size() != 3)
          throw std::runtime_error("wire: RESET wants a video id");
        int dropped = service_.reset_video(toks[2]);
        reply = "OK " + std::to_string(dropped) + '\n';
      } else {
        throw std::runtime_error("wire: unknown request '" + toks[1] + "'");
      }
    } catch (const std::exception& e) {
      // Framing is unrecoverable mid-stream: answer and drop the link.
      reply = "ERR " + sanitize(e.what()) + '\n';
      keep_open = false;
    }
    if (!write_all(fd, reply)) break;
  }
  std::lock_guard<std::mutex> lock(conn_mutex_);
  open_fds_.erase(std::remove(open_fds_.begin(), open_fds_.end(), fd),
                  open_fds_.end());
  ::close(fd);
}

// ---- client ----

WireClient::WireClient(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints,
                         &res);
  if (rc != 0)
    throw std::runtime_error(std::string("wire: resolve ") + host + ": " +
                             ::gai_strerror(rc));
  int fd = -1;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0)
    throw std::runtime_error("wire: cannot connect to " + host + ":" +
                             std::to_string(port));
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  fd_ = fd;
}

WireClient::~WireClient() {
  if (fd_ >= 0) ::close(fd_);
}

// Sends `payload`, reads the status line and `reply_lines` further lines
// into `extra` (0 when the status carries everything). Returns the status
// line; throws on transport failure or an ERR status.
std::string WireClient::request(const std::string& payload, int reply_lines,
                               std::vector<std::string>& extra) {
  if (!write_all(fd_, payload))
    throw std::runtime_error("wire: send failed (connection lost)");
  std::string status;
  if (!read_line(fd_, buffer_, status))
    throw std::runtime_error("wire: connection closed awaiting reply");
  if (status.rfind("ERR", 0) == 0)
    throw std::invalid_argument(status.size() > 4 ? status.substr(4)
                                                  : "wire: remote error");
  if (status.rfind("OK", 0) != 0)
    throw std::runtime_error("wire: unexpected reply '" + status + "'");
  extra.clear();
  for (int i = 0; i < reply_lines; ++i) {
    std::string line;
    if (!read_line(fd_, buffer_, line))
      throw std::runtime_error("wire: connection closed mid-reply");
    extra.push_back(std::move(line));
  }
  return status;
}

SendAck WireClient::send(const std::string& video_id,
                         const OutgoingMessages& msg) {
  check_video_id(video_id);
  std::string req = "ATF1 SEND " + video_id + ' ' +
                    std::to_string(msg.frame_index) + ' ' +
                    (msg.has_truth ? "1" : "0") + '\n';
  append_vector_line(req, "fa", msg.fa);
  append_vector_line(req, "fb", msg.fb);
  append_vector_line(req, "h", msg.h);
  append_vector_line(req, "h_star", msg.h_star);
  append_vector_line(req, "k", msg.k);
  append_vector_line(req, "k_star", msg.k_star);
  req += "end\n";

  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::string> extra;
  std::string status = request(req, 0, extra);
  std::vector<std::string> toks = split_tokens(status);
  if (toks.size() != 2)
    throw std::runtime_error("wire: malformed SEND ack '" + status + "'");
  return SendAck{std::stoll(toks[1])};
}

IncomingMessages WireClient::get_approximate_incoming(
    const std::string& video_id, int target_frame,
    const KernelConfig& kernel) {
  check_video_id(video_id);
  std::string req = "ATF1 GET " + video_id + ' ' +
                    std::to_string(target_frame) + ' ' +
                    format_double(kernel.sigma) + ' ' +
                    format_double(kernel.kernel_weight) + '\n';

  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::string> extra;
  request(req, 9, extra);
  if (extra.back() != "end")
    throw std::runtime_error("wire: GET reply must finish with 'end'");
  IncomingMessages in;
  in.fa = parse_vector_line(extra[0], "fa");
  in.fb = parse_vector_line(extra[1], "fb");
  in.h = parse_vector_line(extra[2], "h");
  in.h_star = parse_vector_line(extra[3], "h_star");
  in.ka = parse_vector_line(extra[4], "ka");
  in.ka_star = parse_vector_line(extra[5], "ka_star");
  in.kb = parse_vector_line(extra[6], "kb");
  in.kb_star = parse_vector_line(extra[7], "kb_star");
  return in;
}

int WireClient::reset_video(const std::string& video_id) {
  check_video_id(video_id);
  std::string req = "ATF1 RESET " + video_id + '\n';
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::string> extra;
  std::string status = request(req, 0, extra);
  std::vector<std::string> toks = split_tokens(status);
  if (toks.size() != 2)
    throw std::runtime_error("wire: malformed RESET ack '" + status + "'");
  return std::stoi(toks[1]);
}

}  // namespace atf
