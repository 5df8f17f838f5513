#include "atf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace atf {
namespace {

// log C(n, k) via lgamma.
double log_choose(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0);
}

double squared_euclidean(const std::vector<double>& p,
                         const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = p[i] - q[i];
    s += d * d;
  }
  return s;
}

// Mean pairwise distance within each group for an arbitrary assignment of
// states to groups; NaN when a group has fewer than two members.
std::vector<double> within_group_means(
    const std::vector<std::vector<double>>& dist,
    const std::vector<int>& group_of, int n_groups) {
  std::size_t n = group_of.size();
  std::vector<double> sum(n_groups, 0.0);
  std::vector<long> cnt(n_groups, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (group_of[i] == group_of[j]) {
        sum[group_of[i]] += dist[i][j];
        cnt[group_of[i]] += 1;
      }
  std::vector<double> out(n_groups);
  for (int g = 0; g < n_groups; ++g)
    out[g] = cnt[g] ? sum[g] / cnt[g]
                    : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace

std::optional<double> average_precision(const std::vector<double>& scores,
                                        const std::vector<char>& positives) {
  if (scores.size() != positives.size())
    throw std::invalid_argument("average_precision: size mismatch");
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  long seen_pos = 0;
  double sum_prec = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (!positives[order[rank]]) continue;
    ++seen_pos;
    sum_prec += static_cast<double>(seen_pos) / static_cast<double>(rank + 1);
  }
  if (seen_pos == 0) return std::nullopt;
  return sum_prec / static_cast<double>(seen_pos);
}

MapResult mean_average_precision(
    const std::vector<std::vector<double>>& scores,
    const std::vector<std::vector<char>>& truth) {
  if (scores.size() != truth.size())
    throw std::invalid_argument("mean_average_precision: row count mismatch");
  MapResult res;
  if (scores.empty()) return res;
  std::size_t n_classes = scores[0].size();
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i].size() != n_classes || truth[i].size() != n_classes)
      throw std::invalid_argument("mean_average_precision: ragged rows");

  double sum = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::vector<double> col(scores.size());
    std::vector<char> pos(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      col[i] = scores[i][c];
      pos[i] = truth[i][c];
    }
    std::optional<double> ap = average_precision(col, pos);
    res.per_class.push_back(ap);
    if (ap) {
      sum += *ap;
      res.classes_evaluated += 1;
    } else {
      res.classes_skipped += 1;
    }
  }
  if (res.classes_evaluated > 0) res.map = sum / res.classes_evaluated;
  return res;
}

double expected_average_precision_random(int positives, int total) {
  if (positives <= 0 || total <= 0 || positives > total)
    throw std::invalid_argument(
        "expected_average_precision_random: need 0 < positives <= total");
  int p = positives, n = total;
  // E[AP] = (1/p) sum_j sum_r (j/r) P(R_j = r) with
  // P(R_j = r) = C(r-1, j-1) C(n-r, p-j) / C(n, p).
  double log_total = log_choose(n, p);
  double acc = 0.0;
  for (int j = 1; j <= p; ++j) {
    for (int r = j; r <= n - (p - j); ++r) {
      double lp = log_choose(r - 1, j - 1) + log_choose(n - r, p - j) -
                  log_total;
      acc += static_cast<double>(j) / r * std::exp(lp);
    }
  }
  return acc / p;
}

RecognitionEval evaluate_recognition(const TrainedModel& model,
                                     const Dataset& ds,
                                     const std::string& split,
                                     const RecognitionOptions& opts) {
  check_space_match(model, ds);
  const LabelSpace& space = model.space;
  RecognitionEval out;
  for (int v : ds.video_indices(split)) {
    const VideoRecord& video = ds.videos[v];
    std::vector<char> truth_row(space.n_category(), 0);
    bool any_label = false;
    for (const Frame& f : video.frames)
      if (f.label) {
        truth_row[f.label->category] = 1;
        any_label = true;
      }
    if (!any_label) continue;

    std::vector<int> picks = sample_equidistant(
        static_cast<int>(video.frames.size()), opts.eval_frames);
    VideoModel vm = model.realize_video(video, picks);
    InferenceResult inf = infer_video(vm, opts.infer);

    std::vector<double> score_row(space.n_category(), 0.0);
    for (const std::vector<double>& q : inf.state.frame) {
      std::vector<double> cat = category_marginal(space, q);
      for (int c = 0; c < space.n_category(); ++c)
        score_row[c] = std::max(score_row[c], cat[c]);
    }
    out.video_ids.push_back(video.id);
    out.scores.push_back(std::move(score_row));
    out.truth.push_back(std::move(truth_row));
  }
  out.map = mean_average_precision(out.scores, out.truth);
  return out;
}

LocalizationEval evaluate_localization(const TrainedModel& model,
                                       const Dataset& ds,
                                       const std::string& split,
                                       const LocalizationOptions& opts) {
  check_space_match(model, ds);
  if (opts.grid_rows <= 0 || opts.select_every <= 0)
    throw std::invalid_argument(
        "evaluate_localization: grid_rows and select_every must be > 0");
  const LabelSpace& space = model.space;
  LocalizationEval out;
  std::vector<std::vector<char>> truth_rows;
  for (int v : ds.video_indices(split)) {
    const VideoRecord& video = ds.videos[v];
    std::vector<int> picks = sample_equidistant(
        static_cast<int>(video.frames.size()), opts.grid_rows);
    VideoModel vm = model.realize_video(video, picks);
    InferenceResult inf = infer_video(vm, opts.infer);

    int rows = static_cast<int>(picks.size());
    std::vector<std::vector<double>> grid(rows);
    for (int r = 0; r < rows; ++r)
      grid[r] = category_marginal(space, inf.state.frame[r]);

    if (opts.smooth && opts.window > 1) {
      // Centered moving average; offsets -w/2 .. w/2-1 clipped to the grid,
      // dividing by the rows actually covered.
      int lo_off = -(opts.window / 2);
      int hi_off = opts.window - 1 + lo_off;
      std::vector<std::vector<double>> smoothed(rows);
      for (int r = 0; r < rows; ++r) {
        int lo = std::max(0, r + lo_off);
        int hi = std::min(rows - 1, r + hi_off);
        std::vector<double> acc(space.n_category(), 0.0);
        for (int s = lo; s <= hi; ++s)
          for (int c = 0; c < space.n_category(); ++c) acc[c] += grid[s][c];
        for (int c = 0; c < space.n_category(); ++c)
          acc[c] /= static_cast<double>(hi - lo + 1);
        smoothed[r] = std::move(acc);
      }
      grid = std::move(smoothed);
    }

    for (int r = 0; r < rows; r += opts.select_every) {
      const Frame& frame = video.frames[picks[r]];
      if (!frame.label) continue;
      out.scores.push_back(grid[r]);
      out.truth_category.push_back(frame.label->category);
      std::vector<char> t(space.n_category(), 0);
      t[frame.label->category] = 1;
      truth_rows.push_back(std::move(t));
    }
  }
  out.map = mean_average_precision(out.scores, truth_rows);
  return out;
}

IntentDistanceReport intent_distances(
    const std::vector<std::vector<double>>& intents,
    const std::vector<int>& groups, const IntentClusterOptions& opts) {
  IntentDistanceReport rep;
  rep.n_states = static_cast<int>(intents.size());
  if (intents.empty()) return rep;
  std::size_t dim = intents[0].size();
  for (const std::vector<double>& q : intents)
    if (q.size() != dim)
      throw std::invalid_argument("intent_distances: dimension mismatch");
  if (!groups.empty() && groups.size() != intents.size())
    throw std::invalid_argument(
        "intent_distances: need one group label per state");

  std::size_t n = intents.size();
  rep.distance.assign(n, std::vector<double>(n, 0.0));
  double pair_sum = 0.0;
  long pair_cnt = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = squared_euclidean(intents[i], intents[j]);
      rep.distance[i][j] = rep.distance[j][i] = d;
      pair_sum += d;
      pair_cnt += 1;
    }
  if (pair_cnt > 0) rep.overall_mean = pair_sum / pair_cnt;
  if (groups.empty()) return rep;

  // Dense group ids in ascending label order.
  std::vector<int> labels = groups;
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  rep.group_labels = labels;
  int n_groups = static_cast<int>(labels.size());
  std::vector<int> group_of(n);
  rep.group_sizes.assign(n_groups, 0);
  for (std::size_t i = 0; i < n; ++i) {
    group_of[i] = static_cast<int>(
        std::lower_bound(labels.begin(), labels.end(), groups[i]) -
        labels.begin());
    rep.group_sizes[group_of[i]] += 1;
  }

  rep.within_mean = within_group_means(rep.distance, group_of, n_groups);

  // One-sided permutation test per group: how often does a random
  // relabeling give a within-group mean at most the observed one? (The
  // overall mean does not depend on labels, so this tests within < overall
  // being luck.) A shared permutation stream serves every group.
  std::vector<long> at_most(n_groups, 0);
  std::mt19937_64 rng(opts.seed);
  std::vector<int> perm = group_of;
  for (int it = 0; it < opts.permutations; ++it) {
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> shuffled =
        within_group_means(rep.distance, perm, n_groups);
    for (int g = 0; g < n_groups; ++g)
      if (!std::isnan(shuffled[g]) && shuffled[g] <= rep.within_mean[g])
        at_most[g] += 1;
  }

  rep.p_values.assign(n_groups, 1.0);
  for (int g = 0; g < n_groups; ++g) {
    if (rep.group_sizes[g] < 2 || std::isnan(rep.within_mean[g])) continue;
    rep.p_values[g] = static_cast<double>(at_most[g] + 1) /
                      static_cast<double>(opts.permutations + 1);
    if (rep.within_mean[g] < rep.overall_mean &&
        rep.p_values[g] <= opts.alpha)
      rep.qualifying += 1;
  }
  return rep;
}

IntentDistanceReport intent_cluster_report(const TrainedModel& model,
                                           const Dataset& ds,
                                           const std::string& split,
                                           const IntentClusterOptions& opts) {
  check_space_match(model, ds);
  std::vector<std::vector<double>> beliefs;
  std::vector<int> gen;
  for (int v : ds.video_indices(split)) {
    const VideoRecord& video = ds.videos[v];
    if (video.gen_intent < 0) continue;
    VideoModel vm = model.realize_video(video);
    InferenceResult inf = infer_video(vm, opts.infer);
    beliefs.push_back(inf.state.intent);
    gen.push_back(video.gen_intent);
  }
  return intent_distances(beliefs, gen, opts);
}

std::vector<AblationResult> ablation_run(
    const Dataset& ds, const TrainConfig& base,
    const std::vector<ModelVariant>& variants,
    const std::vector<std::uint64_t>& seeds, const std::string& eval_split,
    const RecognitionOptions& eval) {
  if (variants.empty() || seeds.empty())
    throw std::invalid_argument("ablation_run: variants and seeds required");
  std::vector<AblationResult> out;
  for (ModelVariant v : variants) {
    AblationResult r;
    r.variant = v;
    for (std::uint64_t seed : seeds) {
      TrainConfig cfg = base;
      cfg.variant = v;
      cfg.seed = seed;
      TrainResult trained = train(ds, cfg);
      r.accuracy_by_seed.push_back(
          trained.epochs.empty() ? 0.0
                                 : trained.epochs.back().train_accuracy);
      r.map_by_seed.push_back(
          evaluate_recognition(trained.model, ds, eval_split, eval).map.map);
    }
    double sum = 0.0;
    for (double m : r.map_by_seed) sum += m;
    r.map_mean = sum / static_cast<double>(r.map_by_seed.size());
    if (r.map_by_seed.size() > 1) {
      double ss = 0.0;
      for (double m : r.map_by_seed)
        ss += (m - r.map_mean) * (m - r.map_mean);
      r.map_sd =
          std::sqrt(ss / static_cast<double>(r.map_by_seed.size() - 1));
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace atf
