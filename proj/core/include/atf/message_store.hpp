#pragma once
// Asynchronous message store.
//
// Frames training in parallel publish their outgoing records here instead of
// exchanging messages directly.  The store keeps the latest record per
// (video, frame) and answers approximate incoming sums in which each
// contributing record is weighted by how recently it was written:
//
//   M(z) = (h / sum_j d^rank_j) * sum_j d^rank_j * w_j * f_j(z)
//
// per family, where rank 0 is the newest contributing record (per family,
// after the direction filter), d in [0,1] is the recency discount, w_j is
// the frame-distance kernel for the fa/fb/k families (1 for the intent
// families) and h renormalizes; with h = contributor count and d = 1 the
// result equals the exact synchronous aggregation.
//
// Starred families only draw from records that carry ground truth.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "atf/messages.hpp"

namespace atf {

struct StoreConfig {
  double discount = 0.9;  // d, in [0, 1]

  // h choice: renormalize by contributor count (default) or a fixed value.
  bool h_is_count = true;
  double h_fixed = 1.0;

  // Compatibility switch: drop the kernel factor w_j from the fa/fb/k
  // families and aggregate with recency weights only.
  bool kernel_weighting = true;
};

struct SendAck {
  std::int64_t iteration = 0;
};

// Abstract interface so the trainer can run against the in-process store or
// a remote one over the wire protocol interchangeably.
class MessageService {
 public:
  virtual ~MessageService() = default;
  virtual SendAck send(const std::string& video_id,
                       const OutgoingMessages& msg) = 0;
  virtual IncomingMessages get_approximate_incoming(
      const std::string& video_id, int target_frame,
      const KernelConfig& kernel) = 0;
  // Returns the number of records dropped.
  virtual int reset_video(const std::string& video_id) = 0;
};

class MessageStore : public MessageService {
 public:
  explicit MessageStore(const LabelSpace& space, StoreConfig cfg = {});

  // Validates the record, replaces any previous record for the same frame
  // and stamps it with a per-video monotone iteration counter.  Malformed
  // records throw std::invalid_argument and leave the store unchanged.
  SendAck send(const std::string& video_id,
               const OutgoingMessages& msg) override;

  IncomingMessages get_approximate_incoming(
      const std::string& video_id, int target_frame,
      const KernelConfig& kernel) override;

  int reset_video(const std::string& video_id) override;

  const StoreConfig& config() const { return cfg_; }

 private:
  struct VideoSlot {
    std::shared_mutex mutex;
    std::map<int, OutgoingMessages> by_frame;  // latest record per frame
    std::int64_t next_iteration = 0;
  };

  VideoSlot& slot(const std::string& video_id);
  void validate(const OutgoingMessages& msg) const;

  const LabelSpace* space_;
  StoreConfig cfg_;
  std::mutex slots_mutex_;
  std::map<std::string, std::unique_ptr<VideoSlot>> slots_;
};

}  // namespace atf
