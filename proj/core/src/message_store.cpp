#include "atf/message_store.hpp"

#include <algorithm>
#include <cmath>

namespace atf {
namespace {

// One contributing record view used during aggregation.
struct Contribution {
  std::int64_t iteration;
  double kernel_weight;
  const std::vector<double>* values;
};

// Filtered + recency-ranked weighted sum for one family.
void accumulate_family(std::vector<Contribution>& contribs,
                       const StoreConfig& cfg, std::vector<double>& out) {
  if (contribs.empty()) return;
  // rank 0 = newest stamp within this family's contributor set.
  std::sort(contribs.begin(), contribs.end(),
            [](const Contribution& a, const Contribution& b) {
              return a.iteration > b.iteration;
            });
  double denom = 0.0;
  double weight = 1.0;  // d^rank, starting at d^0 = 1 (also for d = 0)
  std::vector<double> sum(out.size(), 0.0);
  for (const Contribution& c : contribs) {
    denom += weight;
    double w = weight * c.kernel_weight;
    for (std::size_t z = 0; z < sum.size(); ++z)
      sum[z] += w * (*c.values)[z];
    weight *= cfg.discount;
  }
  double h = cfg.h_is_count ? static_cast<double>(contribs.size())
                            : cfg.h_fixed;
  double scale = h / denom;
  for (std::size_t z = 0; z < out.size(); ++z) out[z] = scale * sum[z];
}

}  // namespace

MessageStore::MessageStore(const LabelSpace& space, StoreConfig cfg)
    : space_(&space), cfg_(cfg) {
  if (cfg_.discount < 0.0 || cfg_.discount > 1.0)
    throw std::invalid_argument("message store: discount must be in [0,1]");
}

MessageStore::VideoSlot& MessageStore::slot(const std::string& video_id) {
  std::lock_guard<std::mutex> lock(slots_mutex_);
  std::unique_ptr<VideoSlot>& s = slots_[video_id];
  if (!s) s = std::make_unique<VideoSlot>();
  return *s;
}

void MessageStore::validate(const OutgoingMessages& msg) const {
  const std::size_t O = space_->n_object();
  const std::size_t M = space_->n_intent();
  if (msg.frame_index < 0)
    throw std::invalid_argument("message record: negative frame index");
  if (msg.fa.size() != O || msg.fb.size() != O || msg.k.size() != O ||
      msg.k_star.size() != O || msg.h.size() != M || msg.h_star.size() != M)
    throw std::invalid_argument("message record: family size mismatch");
  auto finite = [](const std::vector<double>& v) { return all_finite(v); };
  if (!finite(msg.fa) || !finite(msg.fb) || !finite(msg.h) ||
      !finite(msg.h_star) || !finite(msg.k) || !finite(msg.k_star))
    throw std::invalid_argument("message record: non-finite values");
  double ksum = 0.0;
  for (double v : msg.k) ksum += v;
  if (std::fabs(ksum - 1.0) > 1e-6)
    throw std::invalid_argument("message record: k is not a distribution");
}

SendAck MessageStore::send(const std::string& video_id,
                           const OutgoingMessages& msg) {
  validate(msg);
  VideoSlot& s = slot(video_id);
  std::unique_lock<std::shared_mutex> lock(s.mutex);
  OutgoingMessages stored = msg;
  stored.iteration = s.next_iteration++;
  std::int64_t stamp = stored.iteration;
  s.by_frame[msg.frame_index] = std::move(stored);  // latest record wins
  return SendAck{stamp};
}

IncomingMessages MessageStore::get_approximate_incoming(
    const std::string& video_id, int target_frame,
    const KernelConfig& kernel_cfg) {
  VideoSlot& s = slot(video_id);
  // Copy the records we need under the shared lock so aggregation sees one
  // consistent snapshot and never a half-replaced record.
  std::vector<OutgoingMessages> snapshot;
  {
    std::shared_lock<std::shared_mutex> lock(s.mutex);
    snapshot.reserve(s.by_frame.size());
    for (const auto& [frame, msg] : s.by_frame) {
      if (frame == target_frame) continue;
      snapshot.push_back(msg);
    }
  }

  IncomingMessages in = IncomingMessages::zeros(*space_);
  auto run = [&](bool later_side, bool starred_only, bool use_kernel,
                 const std::vector<double> OutgoingMessages::*family,
                 std::vector<double>& out) {
    std::vector<Contribution> contribs;
    for (const OutgoingMessages& m : snapshot) {
      bool later = m.frame_index > target_frame;
      if (later != later_side) continue;
      if (starred_only && !m.has_truth) continue;
      double w = 1.0;
      if (use_kernel && cfg_.kernel_weighting)
        w = weighted_kernel(target_frame, m.frame_index, kernel_cfg);
      contribs.push_back(Contribution{m.iteration, w, &(m.*family)});
    }
    accumulate_family(contribs, cfg_, out);
  };
  auto run_both_sides = [&](bool starred_only,
                            const std::vector<double> OutgoingMessages::*family,
                            std::vector<double>& out) {
    std::vector<Contribution> contribs;
    for (const OutgoingMessages& m : snapshot) {
      if (starred_only && !m.has_truth) continue;
      contribs.push_back(Contribution{m.iteration, 1.0, &(m.*family)});
    }
    accumulate_family(contribs, cfg_, out);
  };

  run(true, false, true, &OutgoingMessages::fa, in.fa);
  run(false, false, true, &OutgoingMessages::fb, in.fb);
  run(true, false, true, &OutgoingMessages::k, in.ka);
  run(true, true, true, &OutgoingMessages::k_star, in.ka_star);
  run(false, false, true, &OutgoingMessages::k, in.kb);
  run(false, true, true, &OutgoingMessages::k_star, in.kb_star);
  run_both_sides(false, &OutgoingMessages::h, in.h);
  run_both_sides(true, &OutgoingMessages::h_star, in.h_star);
  return in;
}

int MessageStore::reset_video(const std::string& video_id) {
  VideoSlot& s = slot(video_id);
  std::unique_lock<std::shared_mutex> lock(s.mutex);
  int removed = static_cast<int>(s.by_frame.size());
  s.by_frame.clear();
  s.next_iteration = 0;
  return removed;
}

}  // namespace atf
