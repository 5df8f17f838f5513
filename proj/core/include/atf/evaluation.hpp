#pragma once
// Evaluation: ranking metrics and the three measurement protocols built on
// top of inference.
//
//   recognition   one score vector per video (per-class max of the category
//                 marginals at equidistant frames), ranked per class across
//                 videos, summarized by mean average precision
//   localization  a dense per-video grid of category marginals, optionally
//                 smoothed with a centered window, subsampled to evaluation
//                 timepoints and ranked per class across all timepoints
//   intent use    distances between inferred intent beliefs, grouped by the
//                 generating intent of synthetic videos, with a permutation
//                 test per group
//
// Average precision uses the rank-precision form: sort by descending score
// (stable, so ties keep instance order), AP = mean over positives of
// precision at that positive's rank. Classes without positives are excluded
// from the mean and counted.

#include <cstdint>
#include <optional>
#include <vector>

#include "atf/trainer.hpp"

namespace atf {

struct MapResult {
  double map = 0.0;  // mean AP over evaluated classes
  std::vector<std::optional<double>> per_class;  // nullopt = no positives
  int classes_evaluated = 0;
  int classes_skipped = 0;
};

// AP of one class; scores and positives have one entry per instance.
// Returns nullopt when the class has no positive instances.
std::optional<double> average_precision(const std::vector<double>& scores,
                                        const std::vector<char>& positives);

// scores[i][c], truth[i][c]: instance i, class c.
MapResult mean_average_precision(
    const std::vector<std::vector<double>>& scores,
    const std::vector<std::vector<char>>& truth);

// Exact expectation of average_precision when the ranking is uniformly
// random: positions of the `positives` positive instances among `total`
// are a uniform draw without replacement, and the rank of the j-th positive
// follows the negative hypergeometric law. Analytic floor used to sanity-
// check the metric against uninformative scores.
double expected_average_precision_random(int positives, int total);

// ---- recognition ----

struct RecognitionOptions {
  int eval_frames = 25;  // equidistant frames scored per video
  InferenceOptions infer;
};

struct RecognitionEval {
  std::vector<std::string> video_ids;
  std::vector<std::vector<double>> scores;  // [video][n_category]
  std::vector<std::vector<char>> truth;     // [video][n_category]
  MapResult map;
};

// Scores every video in `split`: per-class max of the category marginal
// over the evaluated frames. A video's truth row marks every category that
// appears among its labeled frames; videos with no labeled frame are
// skipped.
RecognitionEval evaluate_recognition(const TrainedModel& model,
                                     const Dataset& ds,
                                     const std::string& split,
                                     const RecognitionOptions& opts);

// ---- localization ----

struct LocalizationOptions {
  int grid_rows = 75;    // dense prediction grid per video
  bool smooth = true;    // centered moving-average over the grid
  int window = 30;       // smoothing width in rows (offsets -w/2 .. w/2-1)
  int select_every = 3;  // evaluated timepoints: rows 0, k, 2k, ...
  InferenceOptions infer;
};

struct LocalizationEval {
  // One instance per (video, evaluated timepoint) whose frame is labeled.
  std::vector<std::vector<double>> scores;  // [instance][n_category]
  std::vector<int> truth_category;          // [instance]
  MapResult map;
};

LocalizationEval evaluate_localization(const TrainedModel& model,
                                       const Dataset& ds,
                                       const std::string& split,
                                       const LocalizationOptions& opts);

// ---- intent clustering ----

struct IntentClusterOptions {
  int permutations = 10000;
  double alpha = 0.1;
  std::uint64_t seed = 7;
  InferenceOptions infer;
};

struct IntentDistanceReport {
  // Pairwise squared Euclidean distances between intent distributions.
  std::vector<std::vector<double>> distance;  // [n][n], zero diagonal
  double overall_mean = 0.0;                  // mean over unordered pairs
  int n_states = 0;

  // Group analysis, filled when group labels were supplied.
  std::vector<int> group_labels;    // distinct labels, ascending
  std::vector<int> group_sizes;
  std::vector<double> within_mean;  // mean distance inside each group
  std::vector<double> p_values;     // permutation p per group (1 if size<2)
  int qualifying = 0;  // groups with within < overall and p <= alpha
};

// Distance matrix over intent distributions plus, when `groups` is
// non-empty (one label per state), the within-group means and a one-sided
// permutation test per group: the p-value is the fraction of random
// relabelings whose within-group mean is at most the observed one (the
// overall mean is label-invariant). The same permutation stream serves
// every group.
IntentDistanceReport intent_distances(
    const std::vector<std::vector<double>>& intents,
    const std::vector<int>& groups, const IntentClusterOptions& opts);

// Infers the intent belief of every video in `split` that carries a
// generating intent and runs intent_distances grouped by that intent.
IntentDistanceReport intent_cluster_report(const TrainedModel& model,
                                           const Dataset& ds,
                                           const std::string& split,
                                           const IntentClusterOptions& opts);

// ---- ablations ----

struct AblationResult {
  ModelVariant variant = ModelVariant::Full;
  std::vector<double> map_by_seed;       // recognition mAP per seed
  std::vector<double> accuracy_by_seed;  // final-epoch training accuracy
  double map_mean = 0.0;
  double map_sd = 0.0;  // sample standard deviation (0 for one seed)
};

// Trains one model per (variant, seed) with identical data and schedule
// (asynchronous path) and scores each on `eval_split`; seeds are shared
// across variants so rows are paired.
std::vector<AblationResult> ablation_run(
    const Dataset& ds, const TrainConfig& base,
    const std::vector<ModelVariant>& variants,
    const std::vector<std::uint64_t>& seeds, const std::string& eval_split,
    const RecognitionOptions& eval);

}  // namespace atf
