#include "atf/potentials.hpp"

#include <cmath>
#include <sstream>

namespace atf {

SemanticPotentials SemanticPotentials::zeros(const LabelSpace& space) {
  SemanticPotentials p;
  p.op = Table2D(space.n_object(), space.n_progress());
  p.ap = Table2D(space.n_action(), space.n_progress());
  p.os = Table2D(space.n_object(), space.n_scene());
  p.coap.assign(space.n_configs(), 0.0);
  return p;
}

static void check_semantic_shapes(const LabelSpace& space,
                                  const SemanticPotentials& pots) {
  if (pots.op.rows() != static_cast<std::size_t>(space.n_object()) ||
      pots.op.cols() != static_cast<std::size_t>(space.n_progress()) ||
      pots.ap.rows() != static_cast<std::size_t>(space.n_action()) ||
      pots.ap.cols() != static_cast<std::size_t>(space.n_progress()) ||
      pots.os.rows() != static_cast<std::size_t>(space.n_object()) ||
      pots.os.cols() != static_cast<std::size_t>(space.n_scene()) ||
      pots.coap.size() != static_cast<std::size_t>(space.n_configs()))
    throw std::invalid_argument("semantic potential tables mismatch space");
}

double semantic_potential(const LabelSpace& space,
                          const SemanticPotentials& pots,
                          const FrameAssignment& x) {
  check_semantic_shapes(space, pots);
  int k = space.config_index(x.category, x.object, x.action, x.progress);
  if (k < 0 || x.scene < 0 || x.scene >= space.n_scene()) {
    std::ostringstream os;
    os << "semantic_potential: assignment (" << x.category << ',' << x.object
       << ',' << x.action << ',' << x.progress << ',' << x.scene
       << ") outside support";
    throw std::domain_error(os.str());
  }
  const TermWeights& w = pots.weights;
  return w.op * pots.op.at(x.object, x.progress) +
         w.ap * pots.ap.at(x.action, x.progress) +
         w.os * pots.os.at(x.object, x.scene) + w.coap * pots.coap[k];
}

std::vector<double> support_scores(const LabelSpace& space,
                                   const SemanticPotentials& pots) {
  check_semantic_shapes(space, pots);
  const TermWeights& w = pots.weights;
  std::vector<double> out(space.support_size());
  int s = 0;
  for (int k = 0; k < space.n_configs(); ++k) {
    const SeenConfig& t = space.seen_configs()[k];
    double base = w.ap * pots.ap.at(t[2], t[3]) +
                  w.op * pots.op.at(t[1], t[3]) + w.coap * pots.coap[k];
    for (int scene = 0; scene < space.n_scene(); ++scene, ++s)
      out[s] = base + w.os * pots.os.at(t[1], scene);
  }
  return out;
}

double kernel(double i, double j, const KernelConfig& cfg) {
  if (!(cfg.sigma > 0.0))
    throw std::invalid_argument("kernel: sigma must be > 0");
  double d = j - i;
  return std::exp(-(d * d) / (2.0 * cfg.sigma * cfg.sigma));
}

double weighted_kernel(double i, double j, const KernelConfig& cfg) {
  return cfg.kernel_weight * kernel(i, j, cfg);
}

double pairwise_potential(const AffinityTable& mu, const FrameAssignment& xi,
                          const FrameAssignment& xj, double i, double j,
                          const KernelConfig& cfg) {
  if (i == j) throw std::domain_error("pairwise_potential: self edge (i == j)");
  return mu.at(xi.object, xj.object) * weighted_kernel(i, j, cfg);
}

VideoModel VideoModel::homogeneous(const LabelSpace& space, KernelConfig kcfg,
                                   AffinityTable mu, SemanticPotentials sem,
                                   FrameIntentPotential fi, int n_frames) {
  VideoModel m;
  m.space = &space;
  m.kernel = kcfg;
  m.mu = std::move(mu);
  m.semantic.assign(n_frames, sem);
  m.intent.assign(n_frames, fi);
  m.positions.resize(n_frames);
  for (int i = 0; i < n_frames; ++i) m.positions[i] = i;
  m.validate();
  return m;
}

void VideoModel::validate() const {
  if (space == nullptr) throw std::invalid_argument("video model: null space");
  if (semantic.empty()) throw std::invalid_argument("video model: no frames");
  if (intent.size() != semantic.size() || positions.size() != semantic.size())
    throw std::invalid_argument("video model: per-frame vectors mismatch");
  if (mu.rows() != static_cast<std::size_t>(space->n_object()) ||
      mu.cols() != static_cast<std::size_t>(space->n_object()))
    throw std::invalid_argument("video model: affinity table shape");
  for (const auto& fi : intent)
    if (fi.rows() != static_cast<std::size_t>(space->n_object()) ||
        fi.cols() != static_cast<std::size_t>(space->n_intent()))
      throw std::invalid_argument("video model: intent table shape");
  for (const auto& sem : semantic) check_semantic_shapes(*space, sem);
  for (std::size_t i = 1; i < positions.size(); ++i)
    if (!(positions[i] > positions[i - 1]))
      throw std::invalid_argument(
          "video model: frame positions must be strictly increasing");
}

double joint_score(const VideoModel& model,
                   const std::vector<FrameAssignment>& xs, int intent) {
  const LabelSpace& space = *model.space;
  if (static_cast<int>(xs.size()) != model.n_frames())
    throw std::invalid_argument("joint_score: frame count mismatch");
  if (intent < 0 || intent >= space.n_intent())
    throw std::domain_error("joint_score: intent out of range");

  double total = 0.0;
  for (int i = 0; i < model.n_frames(); ++i) {
    total += semantic_potential(space, model.semantic[i], xs[i]);
    total += model.intent[i].at(xs[i].object, intent);
  }
  for (int i = 0; i < model.n_frames(); ++i)
    for (int j = i + 1; j < model.n_frames(); ++j)
      total += model.mu.at(xs[i].object, xs[j].object) *
               weighted_kernel(model.positions[i], model.positions[j],
                               model.kernel);
  return total;
}

}  // namespace atf
