#include "atf/gradients.hpp"

#include <cmath>

namespace atf {

GradientBundle GradientBundle::zeros(const LabelSpace& space) {
  GradientBundle g;
  g.op = Table2D(space.n_object(), space.n_progress());
  g.ap = Table2D(space.n_action(), space.n_progress());
  g.os = Table2D(space.n_object(), space.n_scene());
  g.coap.assign(space.n_configs(), 0.0);
  g.xi = Table2D(space.n_object(), space.n_intent());
  g.mu = Table2D(space.n_object(), space.n_object());
  return g;
}

bool GradientBundle::finite() const {
  return all_finite(op.values()) && all_finite(ap.values()) &&
         all_finite(os.values()) && all_finite(coap) &&
         all_finite(xi.values()) && all_finite(mu.values());
}

void grad_semantic(const LabelSpace& space, const TermWeights& weights,
                   const std::vector<double>& q, const FrameAssignment& truth,
                   GradientBundle& out) {
  if (static_cast<int>(q.size()) != space.support_size())
    throw std::invalid_argument("grad_semantic: marginal size mismatch");
  int truth_cfg =
      space.config_index(truth.category, truth.object, truth.action,
                         truth.progress);
  if (truth_cfg < 0 || truth.scene < 0 || truth.scene >= space.n_scene())
    throw std::domain_error("grad_semantic: truth outside support");

  // Expectation side: subtract the matching marginalization of q.
  for (int s = 0; s < space.support_size(); ++s) {
    double p = q[s];
    if (p == 0.0) continue;
    const SeenConfig& t = space.seen_configs()[space.support_config(s)];
    int scene = space.support_scene(s);
    out.op.at(t[1], t[3]) -= weights.op * p;
    out.ap.at(t[2], t[3]) -= weights.ap * p;
    out.os.at(t[1], scene) -= weights.os * p;
    out.coap[space.support_config(s)] -= weights.coap * p;
  }
  // Truth side.
  out.op.at(truth.object, truth.progress) += weights.op;
  out.ap.at(truth.action, truth.progress) += weights.ap;
  out.os.at(truth.object, truth.scene) += weights.os;
  out.coap[truth_cfg] += weights.coap;
}

void grad_frame_intent(const LabelSpace& space,
                       const std::vector<double>& h_star_in,
                       const std::vector<double>& h_star_self,
                       const std::vector<double>& q,
                       const std::vector<double>& q_intent,
                       const FrameAssignment& truth, GradientBundle& out) {
  const int M = space.n_intent();
  if (static_cast<int>(h_star_in.size()) != M ||
      static_cast<int>(h_star_self.size()) != M ||
      static_cast<int>(q_intent.size()) != M)
    throw std::invalid_argument("grad_frame_intent: intent size mismatch");
  if (!space.contains(truth))
    throw std::domain_error("grad_frame_intent: truth outside support");

  // Intent posterior conditioned on the ground-truth labeling.
  std::vector<double> p_star(M);
  for (int I = 0; I < M; ++I) p_star[I] = h_star_in[I] + h_star_self[I];
  softmax_inplace(p_star);

  std::vector<double> qobj = object_marginal(space, q);
  for (int o = 0; o < space.n_object(); ++o)
    for (int I = 0; I < M; ++I) {
      double g = -qobj[o] * q_intent[I];
      if (o == truth.object) g += p_star[I];
      out.xi.at(o, I) += g;
    }
}

void grad_mu(const LabelSpace& space, const IncomingMessages& in,
             const std::vector<double>& q, const FrameAssignment& truth,
             GradientBundle& out) {
  if (!space.contains(truth))
    throw std::domain_error("grad_mu: truth outside support");
  const int O = space.n_object();
  std::vector<double> qobj = object_marginal(space, q);
  for (int a = 0; a < O; ++a)
    for (int b = 0; b < O; ++b) {
      double g = -qobj[a] * in.ka[b] - qobj[b] * in.kb[a];
      if (a == truth.object) g += in.ka_star[b];
      if (b == truth.object) g += in.kb_star[a];
      out.mu.at(a, b) += g;
    }
}

GradientBundle frame_gradients(const LabelSpace& space,
                               const TermWeights& weights,
                               const FrameIntentPotential& fi,
                               const IncomingMessages& in,
                               const std::vector<double>& q,
                               const std::vector<double>& q_intent,
                               const FrameAssignment& truth) {
  GradientBundle g = GradientBundle::zeros(space);
  grad_semantic(space, weights, q, truth, g);
  std::vector<double> h_self(space.n_intent());
  for (int I = 0; I < space.n_intent(); ++I)
    h_self[I] = fi.at(truth.object, I);
  grad_frame_intent(space, in.h_star, h_self, q, q_intent, truth, g);
  grad_mu(space, in, q, truth, g);
  return g;
}

ParamGrads ParamGrads::zeros(const LabelSpace& space,
                             const PotentialProvider& provider) {
  ParamGrads g;
  for (const LinearHead* h : provider.heads())
    g.heads.push_back(HeadGrads{std::vector<double>(h->w.size(), 0.0),
                                std::vector<double>(h->b.size(), 0.0)});
  g.mu = Table2D(space.n_object(), space.n_object());
  return g;
}

void ParamGrads::merge(const ParamGrads& other) {
  if (heads.size() != other.heads.size() ||
      mu.size() != other.mu.size())
    throw std::invalid_argument("ParamGrads::merge: shape mismatch");
  for (std::size_t h = 0; h < heads.size(); ++h) {
    for (std::size_t i = 0; i < heads[h].w.size(); ++i)
      heads[h].w[i] += other.heads[h].w[i];
    for (std::size_t i = 0; i < heads[h].b.size(); ++i)
      heads[h].b[i] += other.heads[h].b[i];
  }
  for (std::size_t i = 0; i < mu.values().size(); ++i)
    mu.values()[i] += other.mu.values()[i];
  frames += other.frames;
}

bool ParamGrads::finite() const {
  for (const HeadGrads& h : heads)
    if (!all_finite(h.w) || !all_finite(h.b)) return false;
  return all_finite(mu.values());
}

namespace {

// w += d (outer) features;  b += d   for one head.
void fold_head(std::span<const double> d, std::span<const double> features,
               HeadGrads& acc) {
  std::size_t cols = features.size();
  for (std::size_t r = 0; r < d.size(); ++r) {
    if (d[r] == 0.0) continue;
    double* wr = &acc.w[r * cols];
    for (std::size_t c = 0; c < cols; ++c) wr[c] += d[r] * features[c];
    acc.b[r] += d[r];
  }
}

}  // namespace

void backprop_provider(const LabelSpace& space,
                       const PotentialProvider& provider,
                       const GradientBundle& bundle,
                       std::span<const double> features, double intent_decay,
                       ParamGrads& acc) {
  if (static_cast<int>(features.size()) != provider.feature_dim())
    throw std::invalid_argument("backprop_provider: feature size mismatch");

  // Head order must match ParamGrads::zeros: op, ap, os, xi, then the
  // joint-config head or the four unary heads.
  fold_head(bundle.op.values(), features, acc.heads[0]);
  fold_head(bundle.ap.values(), features, acc.heads[1]);
  fold_head(bundle.os.values(), features, acc.heads[2]);
  fold_head(bundle.xi.values(), features, acc.heads[3]);

  if (provider.variant() == ProviderVariant::Joint) {
    fold_head(bundle.coap, features, acc.heads[4]);
  } else {
    std::vector<double> dc(space.n_category(), 0.0), dobj(space.n_object(), 0.0),
        da(space.n_action(), 0.0), dp(space.n_progress(), 0.0);
    for (int kidx = 0; kidx < space.n_configs(); ++kidx) {
      const SeenConfig& t = space.seen_configs()[kidx];
      double d = bundle.coap[kidx];
      dc[t[0]] += d;
      dobj[t[1]] += d;
      da[t[2]] += d;
      dp[t[3]] += d;
    }
    fold_head(dc, features, acc.heads[4]);
    fold_head(dobj, features, acc.heads[5]);
    fold_head(da, features, acc.heads[6]);
    fold_head(dp, features, acc.heads[7]);
  }

  if (intent_decay != 0.0) {
    const std::vector<double>& w = provider.xi().w;
    for (std::size_t i = 0; i < w.size(); ++i)
      acc.heads[3].w[i] -= intent_decay * w[i];
  }

  for (std::size_t i = 0; i < bundle.mu.values().size(); ++i)
    acc.mu.values()[i] += kPairEndpointShare * bundle.mu.values()[i];
  acc.frames += 1;
}

void apply_sgd_update(PotentialProvider& provider, AffinityTable& mu,
                      const ParamGrads& grads, double lr, bool update_mu) {
  if (grads.frames <= 0)
    throw std::invalid_argument("apply_sgd_update: empty accumulator");
  if (!grads.finite())
    throw std::runtime_error("apply_sgd_update: non-finite gradient");
  double scale = lr / static_cast<double>(grads.frames);
  std::vector<LinearHead*> heads = provider.heads();
  if (heads.size() != grads.heads.size())
    throw std::invalid_argument("apply_sgd_update: head count mismatch");
  for (std::size_t h = 0; h < heads.size(); ++h) {
    for (std::size_t i = 0; i < heads[h]->w.size(); ++i)
      heads[h]->w[i] += scale * grads.heads[h].w[i];
    for (std::size_t i = 0; i < heads[h]->b.size(); ++i)
      heads[h]->b[i] += scale * grads.heads[h].b[i];
  }
  if (update_mu)
    for (std::size_t i = 0; i < mu.values().size(); ++i)
      mu.values()[i] += scale * grads.mu.values()[i];
}

}  // namespace atf
