#include "atf/label_space.hpp"

#include <algorithm>
#include <sstream>

namespace atf {

LabelSpace::LabelSpace(int n_category, int n_object, int n_action,
                       int n_progress, int n_scene, int n_intent,
                       std::vector<SeenConfig> seen_configs)
    : n_category_(n_category),
      n_object_(n_object),
      n_action_(n_action),
      n_progress_(n_progress),
      n_scene_(n_scene),
      n_intent_(n_intent),
      configs_(std::move(seen_configs)) {
  auto positive = [](int n) { return n >= 1; };
  if (!positive(n_category_) || !positive(n_object_) || !positive(n_action_) ||
      !positive(n_progress_) || !positive(n_scene_) || !positive(n_intent_))
    throw std::invalid_argument("label space: all counts must be >= 1");
  if (configs_.empty())
    throw std::invalid_argument("label space: empty seen-config list");

  for (const SeenConfig& t : configs_) {
    if (t[0] < 0 || t[0] >= n_category_ || t[1] < 0 || t[1] >= n_object_ ||
        t[2] < 0 || t[2] >= n_action_ || t[3] < 0 || t[3] >= n_progress_) {
      std::ostringstream os;
      os << "label space: seen config (" << t[0] << ',' << t[1] << ',' << t[2]
         << ',' << t[3] << ") out of range";
      throw std::invalid_argument(os.str());
    }
  }
  std::sort(configs_.begin(), configs_.end());
  configs_.erase(std::unique(configs_.begin(), configs_.end()),
                 configs_.end());

  support_object_.resize(support_size());
  support_category_.resize(support_size());
  for (int s = 0; s < support_size(); ++s) {
    const SeenConfig& t = configs_[s / n_scene_];
    support_category_[s] = t[0];
    support_object_[s] = t[1];
  }
}

int LabelSpace::config_index(int category, int object, int action,
                             int progress) const {
  SeenConfig key{category, object, action, progress};
  auto it = std::lower_bound(configs_.begin(), configs_.end(), key);
  if (it == configs_.end() || *it != key) return -1;
  return static_cast<int>(it - configs_.begin());
}

int LabelSpace::support_index(const FrameAssignment& x) const {
  if (x.scene < 0 || x.scene >= n_scene_)
    throw std::domain_error("assignment scene out of range");
  int k = config_index(x.category, x.object, x.action, x.progress);
  if (k < 0) {
    std::ostringstream os;
    os << "assignment (" << x.category << ',' << x.object << ',' << x.action
       << ',' << x.progress << ") is outside the seen-config support";
    throw std::domain_error(os.str());
  }
  return k * n_scene_ + x.scene;
}

FrameAssignment LabelSpace::support_assignment(int s) const {
  if (s < 0 || s >= support_size())
    throw std::domain_error("support index out of range");
  const SeenConfig& t = configs_[s / n_scene_];
  return FrameAssignment{t[0], t[1], t[2], t[3], s % n_scene_};
}

bool LabelSpace::contains(const FrameAssignment& x) const {
  return x.scene >= 0 && x.scene < n_scene_ &&
         config_index(x.category, x.object, x.action, x.progress) >= 0;
}

std::string LabelSpace::serialize() const {
  std::ostringstream os;
  os << "n_category " << n_category_ << '\n'
     << "n_object " << n_object_ << '\n'
     << "n_action " << n_action_ << '\n'
     << "n_progress " << n_progress_ << '\n'
     << "n_scene " << n_scene_ << '\n'
     << "n_intent " << n_intent_ << '\n';
  for (const SeenConfig& t : configs_)
    os << "seen_config " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3]
       << '\n';
  return os.str();
}

std::uint64_t LabelSpace::fingerprint() const { return fnv1a(serialize()); }

}  // namespace atf
