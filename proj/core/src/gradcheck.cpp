#include "atf/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "atf/gradients.hpp"

namespace atf {
namespace {

struct Toy {
  LabelSpace space{1, 1, 1, 1, 1, 1, {SeenConfig{0, 0, 0, 0}}};
  VideoModel model;
  std::vector<FrameAssignment> truth;
};

LabelSpace random_space(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> two_three(2, 3);
  int n_category = two_three(rng);
  int n_object = two_three(rng);
  int n_action = 2;
  int n_progress = two_three(rng);
  int n_scene = 2;
  int n_intent = two_three(rng);

  // Support = configs * n_scene must stay <= 12.
  std::vector<SeenConfig> all;
  for (int c = 0; c < n_category; ++c)
    for (int o = 0; o < n_object; ++o)
      for (int a = 0; a < n_action; ++a)
        for (int p = 0; p < n_progress; ++p)
          all.push_back(SeenConfig{c, o, a, p});
  std::shuffle(all.begin(), all.end(), rng);
  int max_configs = 12 / n_scene;
  std::uniform_int_distribution<int> n_cfg(
      2, std::min<int>(max_configs, static_cast<int>(all.size())));
  all.resize(n_cfg(rng));
  return LabelSpace(n_category, n_object, n_action, n_progress, n_scene,
                    n_intent, all);
}

void randomize_table(Table2D& t, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  for (double& v : t.values()) v = g(rng);
}

// Fills `toy` in place; the model's space pointer targets the same Toy, so
// the object must not be copied or moved afterwards.
void random_toy(std::mt19937_64& rng, Toy& toy) {
  toy.space = random_space(rng);
  toy.model = VideoModel{};
  toy.truth.clear();
  const LabelSpace& space = toy.space;
  std::uniform_int_distribution<int> t_dist(2, 4);
  int frames = t_dist(rng);
  std::uniform_real_distribution<double> sigma_dist(1.5, 3.0);
  std::uniform_real_distribution<double> kw_dist(0.5, 1.5);
  std::normal_distribution<double> g(0.0, 0.6);

  VideoModel& m = toy.model;
  m.space = &space;
  m.kernel = KernelConfig{sigma_dist(rng), kw_dist(rng)};
  m.mu = Table2D(space.n_object(), space.n_object());
  randomize_table(m.mu, rng, 0.6);
  TermWeights weights{0.8, 1.2, 0.9, 1.1};
  for (int i = 0; i < frames; ++i) {
    SemanticPotentials sem = SemanticPotentials::zeros(space);
    sem.weights = weights;
    randomize_table(sem.op, rng, 0.6);
    randomize_table(sem.ap, rng, 0.6);
    randomize_table(sem.os, rng, 0.6);
    for (double& v : sem.coap) v = g(rng);
    m.semantic.push_back(std::move(sem));
    FrameIntentPotential fi(space.n_object(), space.n_intent());
    randomize_table(fi, rng, 0.6);
    m.intent.push_back(std::move(fi));
    m.positions.push_back(static_cast<double>(i));
  }
  std::uniform_int_distribution<int> s_dist(0, space.support_size() - 1);
  for (int i = 0; i < frames; ++i)
    toy.truth.push_back(space.support_assignment(s_dist(rng)));
}

// Per-frame gradient bundles at exact oracle marginals, the shared setup of
// every family check.
std::vector<GradientBundle> bundles_at_exact(const Toy& toy,
                                             const EnumerationBudget& budget) {
  const LabelSpace& space = toy.space;
  const VideoModel& m = toy.model;
  ExactMarginals exact = exact_marginals(m, budget);

  std::vector<OutgoingMessages> msgs;
  for (int i = 0; i < m.n_frames(); ++i)
    msgs.push_back(compute_outgoing(space, exact.marginals.frame[i],
                                    toy.truth[i], m.intent[i], m.mu,
                                    static_cast<int>(m.positions[i])));
  std::vector<GradientBundle> bundles;
  for (int i = 0; i < m.n_frames(); ++i) {
    IncomingMessages in = aggregate_incoming(
        space, msgs, static_cast<int>(m.positions[i]), m.kernel);
    bundles.push_back(frame_gradients(space, m.semantic[i].weights,
                                      m.intent[i], in,
                                      exact.marginals.frame[i],
                                      exact.marginals.intent, toy.truth[i]));
  }
  return bundles;
}

struct FamilyAccumulator {
  GradcheckFamilyResult result;
  const GradcheckOptions* opts = nullptr;
  int model_index = 0;

  void check(double analytic, double fd) {
    double rel = gradcheck_relative_error(analytic, fd, opts->rel_floor);
    result.entries_checked += 1;
    if (rel > result.worst_rel) {
      result.worst_rel = rel;
      result.worst_model = model_index;
    }
  }
};

void check_semantic_family(Toy& toy, const GradcheckOptions& opts,
                           FamilyAccumulator& acc) {
  std::vector<GradientBundle> bundles = bundles_at_exact(toy, opts.budget);
  VideoModel& m = toy.model;
  for (int i = 0; i < m.n_frames(); ++i) {
    SemanticPotentials& sem = m.semantic[i];
    const GradientBundle& b = bundles[i];
    Table2D* tables[] = {&sem.op, &sem.ap, &sem.os};
    const Table2D* grads[] = {&b.op, &b.ap, &b.os};
    for (int t = 0; t < 3; ++t)
      for (std::size_t k = 0; k < tables[t]->size(); ++k)
        acc.check(grads[t]->values()[k],
                  finite_diff_grad(m, &tables[t]->values()[k], toy.truth,
                                   opts.eps, opts.budget));
    for (std::size_t k = 0; k < sem.coap.size(); ++k)
      acc.check(b.coap[k], finite_diff_grad(m, &sem.coap[k], toy.truth,
                                            opts.eps, opts.budget));
  }
}

void check_intent_family(Toy& toy, const GradcheckOptions& opts,
                         FamilyAccumulator& acc) {
  for (FrameIntentPotential& fi : toy.model.intent) fi.fill(0.0);
  std::vector<GradientBundle> bundles = bundles_at_exact(toy, opts.budget);
  VideoModel& m = toy.model;
  for (int i = 0; i < m.n_frames(); ++i)
    for (std::size_t k = 0; k < m.intent[i].size(); ++k)
      acc.check(bundles[i].xi.values()[k],
                finite_diff_grad(m, &m.intent[i].values()[k], toy.truth,
                                 opts.eps, opts.budget));
}

void check_affinity_family(Toy& toy, const GradcheckOptions& opts,
                           FamilyAccumulator& acc) {
  for (FrameIntentPotential& fi : toy.model.intent) fi.fill(0.0);
  toy.model.mu.fill(0.0);
  std::vector<GradientBundle> bundles = bundles_at_exact(toy, opts.budget);
  VideoModel& m = toy.model;
  // The affinity table is shared: the per-frame bundles each charge both
  // endpoints of a pair, so the folded total halves their sum.
  Table2D total(m.mu.rows(), m.mu.cols());
  for (const GradientBundle& b : bundles)
    for (std::size_t k = 0; k < total.size(); ++k)
      total.values()[k] += kPairEndpointShare * b.mu.values()[k];
  for (std::size_t k = 0; k < m.mu.size(); ++k)
    acc.check(total.values()[k],
              finite_diff_grad(m, &m.mu.values()[k], toy.truth, opts.eps,
                               opts.budget));
}

}  // namespace

double gradcheck_relative_error(double analytic, double fd, double floor) {
  return std::abs(analytic - fd) / std::max(std::abs(fd), floor);
}

GradcheckReport run_gradcheck(const GradcheckOptions& opts) {
  GradcheckReport report;
  report.tol = opts.tol;

  using Checker = void (*)(Toy&, const GradcheckOptions&, FamilyAccumulator&);
  struct Family {
    const char* name;
    Checker run;
  };
  const Family families[] = {{"semantic", &check_semantic_family},
                             {"intent_tie", &check_intent_family},
                             {"affinity", &check_affinity_family}};

  for (const Family& fam : families) {
    FamilyAccumulator acc;
    acc.result.family = fam.name;
    acc.opts = &opts;
    // Every family sees the same toy sequence (fresh generator per family
    // so zeroing in one family cannot shift another's toys).
    std::mt19937_64 rng(opts.seed);
    for (int t = 0; t < opts.models; ++t) {
      Toy toy;
      random_toy(rng, toy);
      acc.model_index = t;
      fam.run(toy, opts, acc);
    }
    report.families.push_back(acc.result);
  }
  report.pass = true;
  for (const GradcheckFamilyResult& f : report.families)
    if (!(f.worst_rel <= opts.tol)) report.pass = false;
  return report;
}

}  // namespace atf
