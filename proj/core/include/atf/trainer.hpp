#pragma once
// Training loops.
//
// Asynchronous mode (the default): mini-batches are individual frames drawn
// uniformly across all labeled training frames (shuffled partition per
// epoch).  Each visited frame fetches approximate incoming messages from
// the store, alternates its own and the intent belief to a fixed point,
// computes the closed-form gradients, folds them through the provider, and
// publishes fresh outgoing messages.  Parameters step once per mini-batch.
//
// Synchronous baseline: mini-batches are whole videos; every batch runs
// full mean-field inference per video with exact message aggregation, so
// each gradient is computed at converged beliefs.  Slower wall-clock per
// update and batches are correlated (frames come from few videos).
//
// Both modes share the SGD step, the learning-rate schedule, the variant
// gating and the log format.

#include <cstdint>
#include <iosfwd>

#include "atf/checkpoint.hpp"
#include "atf/config_text.hpp"
#include "atf/gradients.hpp"
#include "atf/inference.hpp"
#include "atf/message_store.hpp"

namespace atf {

struct TrainConfig {
  std::string split = "train";
  int epochs = 5;
  int batch_frames = 75;  // asynchronous mini-batch, in frames
  double learning_rate = 0.05;
  double lr_decay_factor = 0.1;
  long lr_decay_every = 0;  // updates between decays; 0 = constant
  double intent_weight_decay = 4e-4;
  // The intent is latent: with an all-zero intent head every intent state
  // receives identical gradients and the head never differentiates.  A small
  // seeded random bias breaks that symmetry (0 disables; ablations that
  // freeze the intent head are never perturbed).
  double intent_init_scale = 0.1;
  KernelConfig kernel{5.0, 1.0};
  TermWeights term_weights;
  StoreConfig store;        // message recency discount etc.
  InferenceOptions visit;   // inner alternation for frame visits
  int sync_videos_per_batch = 3;
  InferenceOptions sync_infer;  // full-video inference (sync mode + eval)
  ModelVariant variant = ModelVariant::Full;
  std::uint64_t seed = 1;
  int workers = 1;  // >1: parallel frame visits (not byte-deterministic)
  bool log_epoch_accuracy = true;
  std::string heldout_split;  // non-empty: also log accuracy on this split
};

TrainConfig train_config_from_config(const ConfigText& cfg);
void train_config_to_config(const TrainConfig& tc, ConfigText& cfg);

struct UpdateLogRecord {
  long update = 0;         // 1-based update counter
  double objective = 0.0;  // batch mean log q(truth) at the visit belief
  double accuracy = 0.0;   // batch fraction argmax q == truth
  double lr = 0.0;
};

struct EpochLogRecord {
  int epoch = 0;  // 1-based
  long updates = 0;
  double train_accuracy = 0.0;  // synchronous MAP accuracy, labeled frames
  double heldout_accuracy = -1.0;  // < 0 when no held-out split configured
};

struct TrainResult {
  TrainedModel model;
  std::vector<UpdateLogRecord> updates;
  std::vector<EpochLogRecord> epochs;
  long total_updates = 0;
};

// Asynchronous training against `service`, or an internal store when null.
TrainResult train(const Dataset& ds, const TrainConfig& cfg,
                  MessageService* service = nullptr);

TrainResult train_synchronous_baseline(const Dataset& ds,
                                       const TrainConfig& cfg);

// Fraction of labeled frames whose MAP assignment matches the truth under
// full synchronous inference with `opts`.
double evaluate_map_accuracy(const TrainedModel& model, const Dataset& ds,
                             const std::string& split,
                             const InferenceOptions& opts);

// Text log:  update <n> objective <v> accuracy <v> lr <v>
//            epoch <n> updates <n> train_accuracy <v>
void write_training_log(std::ostream& os, const TrainResult& result);

}  // namespace atf
