#include <algorithm>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include "atf/common.hpp"
#include "atf/gradcheck.hpp"
#include "atf/inference.hpp"
#include "atf/oracle.hpp"
#include "commands.hpp"

namespace atf::cli {
namespace {

// ---- gradcheck ----

struct GradcheckOpts {
  int models = 20;
  double eps = 1e-5;
  double tol = 1e-5;
};

void run_gradcheck_cmd(const GradcheckOpts& o, const GlobalArgs& g) {
  GradcheckOptions opts;
  opts.models = o.models;
  opts.eps = o.eps;
  opts.tol = o.tol;
  if (g.has_seed) opts.seed = g.seed;

  GradcheckReport report = run_gradcheck(opts);
  std::ostringstream text;
  write_gradcheck_report(text, report);
  std::cout << text.str();

  if (g.has_out) {
    ArtifactWriter w("gradcheck", g.out_dir);
    w.config().set_int("models", o.models);
    w.config().set_double("eps", o.eps);
    w.config().set_double("tol", o.tol);
    w.config().set_int("seed", static_cast<long>(opts.seed));
    w.write_artifact("gradcheck.txt", text.str());
    w.finish();
  }
  if (!report.pass)
    throw CommandFailure("gradient check failed (see report above)", 2);
}

// ---- oracle-compare ----

struct OracleOpts {
  int models = 25;
  int max_frames = 4;
  double budget = 2000000.0;
};

// Small random model with an enumerable joint space.  The label space must
// outlive the returned VideoModel (it holds a pointer), so the caller keeps
// both in one scope.
LabelSpace small_space(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> two_three(2, 3);
  int n_category = two_three(rng);
  int n_object = two_three(rng);
  int n_progress = two_three(rng);
  int n_intent = two_three(rng);
  std::vector<SeenConfig> all;
  for (int c = 0; c < n_category; ++c)
    for (int o = 0; o < n_object; ++o)
      for (int p = 0; p < n_progress; ++p)
        all.push_back(SeenConfig{c, o, 0, p});
  std::shuffle(all.begin(), all.end(), rng);
  std::uniform_int_distribution<int> n_cfg(
      2, std::min<int>(6, static_cast<int>(all.size())));
  all.resize(n_cfg(rng));
  return LabelSpace(n_category, n_object, 1, n_progress, 2, n_intent, all);
}

void randomize(Table2D& t, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> gauss(0.0, scale);
  for (double& v : t.values()) v = gauss(rng);
}

VideoModel random_model(const LabelSpace& space, std::mt19937_64& rng,
                        int max_frames) {
  std::uniform_int_distribution<int> t_dist(2, max_frames);
  std::uniform_real_distribution<double> sigma_dist(1.5, 3.0);
  std::normal_distribution<double> gauss(0.0, 0.6);

  AffinityTable mu(space.n_object(), space.n_object());
  randomize(mu, rng, 0.6);
  SemanticPotentials sem = SemanticPotentials::zeros(space);
  randomize(sem.op, rng, 0.6);
  randomize(sem.ap, rng, 0.6);
  randomize(sem.os, rng, 0.6);
  for (double& v : sem.coap) v = gauss(rng);
  FrameIntentPotential fi(space.n_object(), space.n_intent());
  randomize(fi, rng, 0.6);

  KernelConfig kernel{sigma_dist(rng), 1.0};
  return VideoModel::homogeneous(space, kernel, std::move(mu), std::move(sem),
                                 std::move(fi), t_dist(rng));
}

void run_oracle_compare(const OracleOpts& o, const GlobalArgs& g) {
  std::mt19937_64 rng(g.has_seed ? g.seed : 42);
  EnumerationBudget budget{o.budget};

  InferenceOptions opts;
  opts.max_passes = 50;
  opts.tol = 1e-10;

  std::ostringstream text;
  double worst_frame_l1 = 0.0, sum_frame_l1 = 0.0;
  double worst_intent_l1 = 0.0, sum_intent_l1 = 0.0;
  double worst_gap = 0.0, sum_gap = 0.0;
  long frames_total = 0, frames_agree = 0;

  for (int m = 0; m < o.models; ++m) {
    LabelSpace space = small_space(rng);
    VideoModel vm = random_model(space, rng, o.max_frames);

    ExactMarginals exact = exact_marginals(vm, budget);
    InferenceResult approx = infer_video(vm, opts);

    double frame_l1 = 0.0;
    int agree = 0;
    for (int i = 0; i < vm.n_frames(); ++i) {
      frame_l1 = std::max(
          frame_l1, l1_distance(exact.marginals.frame[i],
                                approx.state.frame[i]));
      auto arg = [](const std::vector<double>& q) {
        return std::max_element(q.begin(), q.end()) - q.begin();
      };
      if (arg(exact.marginals.frame[i]) == arg(approx.state.frame[i]))
        ++agree;
    }
    double intent_l1 =
        l1_distance(exact.marginals.intent, approx.state.intent);
    double gap = exact.log_partition - elbo(vm, approx.state);

    text << "model " << m << " frames " << vm.n_frames() << " support "
         << space.support_size() << " frame_l1 " << format_double(frame_l1)
         << " intent_l1 " << format_double(intent_l1) << " kl_gap "
         << format_double(gap) << " map_agree " << agree << "/"
         << vm.n_frames() << '\n';

    worst_frame_l1 = std::max(worst_frame_l1, frame_l1);
    sum_frame_l1 += frame_l1;
    worst_intent_l1 = std::max(worst_intent_l1, intent_l1);
    sum_intent_l1 += intent_l1;
    worst_gap = std::max(worst_gap, gap);
    sum_gap += gap;
    frames_total += vm.n_frames();
    frames_agree += agree;
  }

  text << "models " << o.models << '\n'
       << "mean_frame_l1 " << format_double(sum_frame_l1 / o.models)
       << " worst_frame_l1 " << format_double(worst_frame_l1) << '\n'
       << "mean_intent_l1 " << format_double(sum_intent_l1 / o.models)
       << " worst_intent_l1 " << format_double(worst_intent_l1) << '\n'
       << "mean_kl_gap " << format_double(sum_gap / o.models)
       << " worst_kl_gap " << format_double(worst_gap) << '\n'
       << "map_agreement " << frames_agree << "/" << frames_total << '\n';
  std::cout << text.str();

  if (g.has_out) {
    ArtifactWriter w("oracle-compare", g.out_dir);
    w.config().set_int("models", o.models);
    w.config().set_int("max_frames", o.max_frames);
    w.config().set_double("budget", o.budget);
    w.config().set_int("seed",
                       static_cast<long>(g.has_seed ? g.seed : 42));
    w.write_artifact("oracle.txt", text.str());
    w.finish();
  }
}

}  // namespace

void register_gradcheck(CLI::App& app, const GlobalArgs& g) {
  auto o = std::make_shared<GradcheckOpts>();
  CLI::App* sub = app.add_subcommand(
      "gradcheck",
      "Check analytic gradients against exact finite differences");
  sub->fallthrough();
  sub->add_option("--models", o->models, "Toy models per gradient family")
      ->capture_default_str();
  sub->add_option("--eps", o->eps, "Central-difference step")
      ->capture_default_str();
  sub->add_option("--tol", o->tol, "Max allowed relative error")
      ->capture_default_str();
  sub->callback([o, &g] { run_gradcheck_cmd(*o, g); });
}

void register_oracle_compare(CLI::App& app, const GlobalArgs& g) {
  auto o = std::make_shared<OracleOpts>();
  CLI::App* sub = app.add_subcommand(
      "oracle-compare",
      "Report mean-field marginals against exact enumeration on toy models");
  sub->fallthrough();
  sub->add_option("--models", o->models, "Number of random toy models")
      ->capture_default_str();
  sub->add_option("--frames", o->max_frames, "Max frames per toy")
      ->capture_default_str();
  sub->add_option("--budget", o->budget, "Enumeration state budget")
      ->capture_default_str();
  sub->callback([o, &g] { run_oracle_compare(*o, g); });
}

}  // namespace atf::cli
