#include "atf/oracle.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace atf {
namespace {

// Precomputed per-video scoring context for enumeration.
struct EnumContext {
  const VideoModel* model;
  int n_frames;
  int support;
  int n_intent;
  std::vector<std::vector<double>> phi;  // [frame][support] semantic scores
  std::vector<int> obj;                  // [support] object per support entry
  std::vector<double> wk;                // [i*T+j] weighted kernel, i<j

  explicit EnumContext(const VideoModel& m) : model(&m) {
    m.validate();
    const LabelSpace& space = *m.space;
    n_frames = m.n_frames();
    support = space.support_size();
    n_intent = space.n_intent();
    phi.reserve(n_frames);
    for (int i = 0; i < n_frames; ++i)
      phi.push_back(support_scores(space, m.semantic[i]));
    obj.resize(support);
    for (int s = 0; s < support; ++s) obj[s] = space.support_object(s);
    wk.assign(static_cast<std::size_t>(n_frames) * n_frames, 0.0);
    for (int i = 0; i < n_frames; ++i)
      for (int j = i + 1; j < n_frames; ++j)
        wk[i * n_frames + j] =
            weighted_kernel(m.positions[i], m.positions[j], m.kernel);
  }

  // Score of the frame part (semantic + pairwise) for a support labeling.
  double frame_score(const std::vector<int>& s) const {
    double total = 0.0;
    for (int i = 0; i < n_frames; ++i) total += phi[i][s[i]];
    for (int i = 0; i < n_frames; ++i) {
      int oi = obj[s[i]];
      for (int j = i + 1; j < n_frames; ++j)
        total += model->mu.at(oi, obj[s[j]]) * wk[i * n_frames + j];
    }
    return total;
  }

  // Intent tie sums h[I] = sum_i fi_i(object_i, I) for a support labeling.
  void intent_sums(const std::vector<int>& s, std::vector<double>& h) const {
    h.assign(n_intent, 0.0);
    for (int i = 0; i < n_frames; ++i) {
      int oi = obj[s[i]];
      for (int I = 0; I < n_intent; ++I) h[I] += model->intent[i].at(oi, I);
    }
  }

  // Runs fn over every frame labeling (odometer over support^T).
  void for_each_labeling(
      const std::function<void(const std::vector<int>&)>& fn) const {
    std::vector<int> s(n_frames, 0);
    for (;;) {
      fn(s);
      int i = n_frames - 1;
      while (i >= 0 && ++s[i] == support) s[i--] = 0;
      if (i < 0) break;
    }
  }
};

void check_budget(const VideoModel& model, const EnumerationBudget& budget,
                  const char* op) {
  double count = joint_state_count(model);
  if (count > budget.max_states) {
    std::ostringstream os;
    os << op << ": refusing exact enumeration of " << format_double(count)
       << " joint states (budget " << format_double(budget.max_states) << ")";
    throw BudgetError(os.str(), count);
  }
}

void check_state(const VideoModel& model, const MarginalState& state) {
  const LabelSpace& space = *model.space;
  if (state.n_frames() != model.n_frames())
    throw std::invalid_argument("marginal state: frame count mismatch");
  for (const auto& q : state.frame)
    if (static_cast<int>(q.size()) != space.support_size())
      throw std::invalid_argument("marginal state: support size mismatch");
  if (static_cast<int>(state.intent.size()) != space.n_intent())
    throw std::invalid_argument("marginal state: intent size mismatch");
}

double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

}  // namespace

double joint_state_count(const VideoModel& model) {
  double count = model.space->n_intent();
  for (int i = 0; i < model.n_frames(); ++i)
    count *= model.space->support_size();
  return count;
}

double partition_function(const VideoModel& model,
                          const EnumerationBudget& budget) {
  check_budget(model, budget, "partition_function");
  EnumContext ctx(model);
  // Online log-sum-exp over all (labeling, intent) states.
  double max_seen = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::vector<double> h;
  ctx.for_each_labeling([&](const std::vector<int>& s) {
    double base = ctx.frame_score(s);
    ctx.intent_sums(s, h);
    for (int I = 0; I < ctx.n_intent; ++I) {
      double v = base + h[I];
      if (v <= max_seen) {
        sum += std::exp(v - max_seen);
      } else {
        sum = sum * std::exp(max_seen - v) + 1.0;
        max_seen = v;
      }
    }
  });
  return max_seen + std::log(sum);
}

ExactMarginals exact_marginals(const VideoModel& model,
                               const EnumerationBudget& budget) {
  check_budget(model, budget, "exact_marginals");
  double log_z = partition_function(model, budget);
  EnumContext ctx(model);
  ExactMarginals out;
  out.log_partition = log_z;
  out.marginals.frame.assign(ctx.n_frames,
                             std::vector<double>(ctx.support, 0.0));
  out.marginals.intent.assign(ctx.n_intent, 0.0);
  std::vector<double> h;
  ctx.for_each_labeling([&](const std::vector<int>& s) {
    double base = ctx.frame_score(s);
    ctx.intent_sums(s, h);
    double px = 0.0;  // mass of this labeling with intent summed out
    for (int I = 0; I < ctx.n_intent; ++I) {
      double p = std::exp(base + h[I] - log_z);
      out.marginals.intent[I] += p;
      px += p;
    }
    for (int i = 0; i < ctx.n_frames; ++i) out.marginals.frame[i][s[i]] += px;
  });
  return out;
}

Table2D exact_object_pair_marginal(const VideoModel& model, int i, int j,
                                   const EnumerationBudget& budget) {
  if (i == j) throw std::domain_error("pair marginal needs i != j");
  check_budget(model, budget, "exact_object_pair_marginal");
  double log_z = partition_function(model, budget);
  EnumContext ctx(model);
  Table2D out(model.space->n_object(), model.space->n_object(), 0.0);
  std::vector<double> h;
  ctx.for_each_labeling([&](const std::vector<int>& s) {
    double base = ctx.frame_score(s);
    ctx.intent_sums(s, h);
    double px = 0.0;
    for (int I = 0; I < ctx.n_intent; ++I)
      px += std::exp(base + h[I] - log_z);
    out.at(ctx.obj[s[i]], ctx.obj[s[j]]) += px;
  });
  return out;
}

double exact_loglik(const VideoModel& model,
                    const std::vector<FrameAssignment>& xs,
                    const EnumerationBudget& budget) {
  std::vector<double> scores(model.space->n_intent());
  for (int I = 0; I < model.space->n_intent(); ++I)
    scores[I] = joint_score(model, xs, I);
  return log_sum_exp(scores) - partition_function(model, budget);
}

double finite_diff_grad(VideoModel& model, double* entry,
                        const std::vector<FrameAssignment>& xs, double eps,
                        const EnumerationBudget& budget) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_diff_grad: eps <= 0");
  double saved = *entry;
  *entry = saved + eps;
  double up = exact_loglik(model, xs, budget);
  *entry = saved - eps;
  double down = exact_loglik(model, xs, budget);
  *entry = saved;
  return (up - down) / (2.0 * eps);
}

double elbo(const VideoModel& model, const MarginalState& state) {
  model.validate();
  check_state(model, state);
  const LabelSpace& space = *model.space;
  int T = model.n_frames();

  double value = 0.0;
  std::vector<std::vector<double>> qobj(T);
  for (int i = 0; i < T; ++i) {
    const std::vector<double>& q = state.frame[i];
    std::vector<double> phi = support_scores(space, model.semantic[i]);
    for (int s = 0; s < space.support_size(); ++s) value += q[s] * phi[s];
    qobj[i] = object_marginal(space, q);
    // intent tie: sum_I q_I(I) * sum_o qobj(o) fi(o, I)
    for (int o = 0; o < space.n_object(); ++o) {
      if (qobj[i][o] == 0.0) continue;
      for (int I = 0; I < space.n_intent(); ++I)
        value += qobj[i][o] * state.intent[I] * model.intent[i].at(o, I);
    }
    value += entropy(q);
  }
  value += entropy(state.intent);
  for (int i = 0; i < T; ++i)
    for (int j = i + 1; j < T; ++j) {
      double wk = weighted_kernel(model.positions[i], model.positions[j],
                                  model.kernel);
      if (wk == 0.0) continue;
      double pair = 0.0;
      for (int a = 0; a < space.n_object(); ++a) {
        if (qobj[i][a] == 0.0) continue;
        for (int b = 0; b < space.n_object(); ++b)
          pair += qobj[i][a] * qobj[j][b] * model.mu.at(a, b);
      }
      value += wk * pair;
    }
  return value;
}

double exact_kl(const VideoModel& model, const MarginalState& state,
                const EnumerationBudget& budget) {
  check_budget(model, budget, "exact_kl");
  check_state(model, state);
  double log_z = partition_function(model, budget);
  EnumContext ctx(model);
  double kl = 0.0;
  std::vector<double> h;
  ctx.for_each_labeling([&](const std::vector<int>& s) {
    double qx = 1.0;
    for (int i = 0; i < ctx.n_frames; ++i) qx *= state.frame[i][s[i]];
    if (qx == 0.0) return;
    double base = ctx.frame_score(s);
    ctx.intent_sums(s, h);
    for (int I = 0; I < ctx.n_intent; ++I) {
      double q = qx * state.intent[I];
      if (q == 0.0) continue;
      double log_p = base + h[I] - log_z;
      kl += q * (std::log(q) - log_p);
    }
  });
  return kl;
}

}  // namespace atf
