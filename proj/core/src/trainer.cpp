#include "atf/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <thread>

namespace atf {
namespace {

struct VariantGates {
  bool use_mu = true;
  bool use_intent = true;
  bool use_joint_config = true;  // informational; provider variant decides
};

VariantGates gates_for(ModelVariant v) {
  switch (v) {
    case ModelVariant::Full: return {true, true, true};
    case ModelVariant::NoPairwise: return {false, true, true};
    case ModelVariant::NoIntent: return {true, false, true};
    case ModelVariant::SemanticOnly: return {false, false, true};
    case ModelVariant::NoStructure: return {false, false, false};
  }
  throw std::invalid_argument("unknown variant");
}

void gate_bundle(GradientBundle& b, const VariantGates& g) {
  if (!g.use_mu) b.mu.fill(0.0);
  if (!g.use_intent) b.xi.fill(0.0);
}

double lr_at(const TrainConfig& cfg, long update_index) {
  if (cfg.lr_decay_every <= 0) return cfg.learning_rate;
  double steps =
      static_cast<double>(update_index / cfg.lr_decay_every);
  return cfg.learning_rate * std::pow(cfg.lr_decay_factor, steps);
}

struct BatchStats {
  double objective = 0.0;
  long correct = 0;
  long frames = 0;

  void merge(const BatchStats& o) {
    objective += o.objective;
    correct += o.correct;
    frames += o.frames;
  }
};

// Shared per-frame work of the async path: realize, fetch, solve, grade.
void visit_frame(const Dataset& ds, const TrainedModel& model,
                 const TrainConfig& cfg, const VariantGates& gates,
                 MessageService& service, int video_idx, int frame_idx,
                 ParamGrads& acc, BatchStats& stats) {
  const LabelSpace& space = model.space;
  const VideoRecord& video = ds.videos[video_idx];
  const Frame& frame = video.frames[frame_idx];
  const FrameAssignment& truth = *frame.label;

  FramePotentials pots = model.provider.realize(space, frame.features);
  pots.semantic.weights = model.weights;
  std::vector<double> phi = support_scores(space, pots.semantic);

  IncomingMessages in = service.get_approximate_incoming(
      video.id, frame.index, model.kernel);
  FrameVisit visit = solve_frame(space, phi, pots.intent, in, cfg.visit);

  GradientBundle bundle =
      frame_gradients(space, model.weights, pots.intent, in, visit.q,
                      visit.q_intent, truth);
  gate_bundle(bundle, gates);
  double decay = gates.use_intent ? cfg.intent_weight_decay : 0.0;
  backprop_provider(space, model.provider, bundle, frame.features, decay,
                    acc);

  service.send(video.id,
               compute_outgoing(space, visit.q, truth, pots.intent, model.mu,
                                frame.index));

  int truth_s = space.support_index(truth);
  stats.objective += std::log(std::max(visit.q[truth_s], 1e-300));
  int argmax = static_cast<int>(
      std::max_element(visit.q.begin(), visit.q.end()) - visit.q.begin());
  stats.correct += argmax == truth_s ? 1 : 0;
  stats.frames += 1;
}

void finish_batch(const TrainConfig& cfg, const VariantGates& gates,
                  TrainResult& res, ParamGrads& acc, BatchStats& stats) {
  double lr = lr_at(cfg, res.total_updates);
  apply_sgd_update(res.model.provider, res.model.mu, acc, lr, gates.use_mu);
  res.total_updates += 1;
  res.updates.push_back(UpdateLogRecord{
      res.total_updates, stats.objective / stats.frames,
      static_cast<double>(stats.correct) / stats.frames, lr});
}

void finish_epoch(const Dataset& ds, const TrainConfig& cfg,
                  TrainResult& res, int epoch) {
  EpochLogRecord rec;
  rec.epoch = epoch + 1;
  rec.updates = res.total_updates;
  if (cfg.log_epoch_accuracy)
    rec.train_accuracy =
        evaluate_map_accuracy(res.model, ds, cfg.split, cfg.sync_infer);
  if (!cfg.heldout_split.empty())
    rec.heldout_accuracy =
        evaluate_map_accuracy(res.model, ds, cfg.heldout_split,
                              cfg.sync_infer);
  res.epochs.push_back(rec);
}

// Symmetry breaking for the latent intent: perturb the intent-head bias so
// that intent states start out distinguishable.  Uses its own stream so the
// batch shuffle sequence is unaffected.
void seed_intent_head(TrainedModel& model, const VariantGates& gates,
                      const TrainConfig& cfg) {
  if (!gates.use_intent || cfg.intent_init_scale <= 0.0) return;
  std::mt19937_64 rng(fnv1a("intent-init") ^ cfg.seed);
  std::normal_distribution<double> noise(0.0, cfg.intent_init_scale);
  for (double& b : model.provider.heads()[3]->b) b = noise(rng);
}

std::vector<std::pair<int, int>> labeled_frames(const Dataset& ds,
                                                const std::string& split) {
  std::vector<std::pair<int, int>> out;
  for (int v : ds.video_indices(split))
    for (int f = 0; f < static_cast<int>(ds.videos[v].frames.size()); ++f)
      if (ds.videos[v].frames[f].label) out.emplace_back(v, f);
  return out;
}

}  // namespace

TrainResult train(const Dataset& ds, const TrainConfig& cfg,
                  MessageService* service) {
  ds.validate();
  std::vector<std::pair<int, int>> frames = labeled_frames(ds, cfg.split);
  if (frames.empty())
    throw std::runtime_error("train: no labeled frames in split '" +
                             cfg.split + "'");
  if (cfg.batch_frames <= 0)
    throw std::invalid_argument("train: batch_frames must be > 0");

  TrainResult res;
  res.model = TrainedModel::fresh(ds.space, ds.feature_dim, cfg.kernel,
                                  cfg.variant);
  res.model.weights = cfg.term_weights;
  VariantGates gates = gates_for(cfg.variant);
  seed_intent_head(res.model, gates, cfg);

  MessageStore own_store(res.model.space, cfg.store);
  MessageService& store = service ? *service : own_store;
  for (int v : ds.video_indices(cfg.split)) store.reset_video(ds.videos[v].id);

  std::mt19937_64 rng(cfg.seed);
  int workers = std::max(1, cfg.workers);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(frames.begin(), frames.end(), rng);
    for (std::size_t begin = 0; begin < frames.size();
         begin += cfg.batch_frames) {
      std::size_t end =
          std::min(frames.size(), begin + cfg.batch_frames);
      ParamGrads acc = ParamGrads::zeros(res.model.space, res.model.provider);
      BatchStats stats;
      if (workers == 1) {
        for (std::size_t i = begin; i < end; ++i)
          visit_frame(ds, res.model, cfg, gates, store, frames[i].first,
                      frames[i].second, acc, stats);
      } else {
        // Fixed contiguous chunks merged in thread order; the store is the
        // only cross-thread interaction.
        std::size_t n = end - begin;
        std::size_t chunks = std::min<std::size_t>(workers, n);
        std::vector<ParamGrads> accs;
        std::vector<BatchStats> all_stats(chunks);
        for (std::size_t c = 0; c < chunks; ++c)
          accs.push_back(ParamGrads::zeros(res.model.space,
                                           res.model.provider));
        std::vector<std::thread> pool;
        for (std::size_t c = 0; c < chunks; ++c) {
          std::size_t lo = begin + n * c / chunks;
          std::size_t hi = begin + n * (c + 1) / chunks;
          pool.emplace_back([&, lo, hi, c] {
            for (std::size_t i = lo; i < hi; ++i)
              visit_frame(ds, res.model, cfg, gates, store, frames[i].first,
                          frames[i].second, accs[c], all_stats[c]);
          });
        }
        for (std::thread& t : pool) t.join();
        for (std::size_t c = 0; c < chunks; ++c) {
          acc.merge(accs[c]);
          stats.merge(all_stats[c]);
        }
      }
      finish_batch(cfg, gates, res, acc, stats);
    }
    finish_epoch(ds, cfg, res, epoch);
  }
  return res;
}

TrainResult train_synchronous_baseline(const Dataset& ds,
                                       const TrainConfig& cfg) {
  ds.validate();
  std::vector<int> videos = ds.video_indices(cfg.split);
  std::vector<int> with_labels;
  for (int v : videos)
    for (const Frame& f : ds.videos[v].frames)
      if (f.label) {
        with_labels.push_back(v);
        break;
      }
  if (with_labels.empty())
    throw std::runtime_error("train: no labeled frames in split '" +
                             cfg.split + "'");
  if (cfg.sync_videos_per_batch <= 0)
    throw std::invalid_argument("train: sync_videos_per_batch must be > 0");

  TrainResult res;
  res.model = TrainedModel::fresh(ds.space, ds.feature_dim, cfg.kernel,
                                  cfg.variant);
  res.model.weights = cfg.term_weights;
  VariantGates gates = gates_for(cfg.variant);
  seed_intent_head(res.model, gates, cfg);

  std::mt19937_64 rng(cfg.seed);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(with_labels.begin(), with_labels.end(), rng);
    for (std::size_t begin = 0; begin < with_labels.size();
         begin += cfg.sync_videos_per_batch) {
      std::size_t end = std::min(with_labels.size(),
                                 begin + cfg.sync_videos_per_batch);
      ParamGrads acc = ParamGrads::zeros(res.model.space, res.model.provider);
      BatchStats stats;
      for (std::size_t b = begin; b < end; ++b) {
        const VideoRecord& video = ds.videos[with_labels[b]];
        const LabelSpace& space = res.model.space;
        VideoModel vm = res.model.realize_video(video);
        InferenceResult inf = infer_video(vm, cfg.sync_infer);

        // Fresh truth-bearing messages from every frame at the converged
        // beliefs, aggregated exactly.
        std::vector<OutgoingMessages> outgoing;
        outgoing.reserve(video.frames.size());
        for (std::size_t i = 0; i < video.frames.size(); ++i)
          outgoing.push_back(compute_outgoing(
              space, inf.state.frame[i], video.frames[i].label, vm.intent[i],
              vm.mu, video.frames[i].index));

        for (std::size_t i = 0; i < video.frames.size(); ++i) {
          const Frame& frame = video.frames[i];
          if (!frame.label) continue;
          IncomingMessages in = aggregate_incoming(space, outgoing,
                                                   frame.index, vm.kernel);
          GradientBundle bundle = frame_gradients(
              space, res.model.weights, vm.intent[i], in, inf.state.frame[i],
              inf.state.intent, *frame.label);
          gate_bundle(bundle, gates);
          double decay = gates.use_intent ? cfg.intent_weight_decay : 0.0;
          backprop_provider(space, res.model.provider, bundle,
                            frame.features, decay, acc);

          int truth_s = space.support_index(*frame.label);
          const std::vector<double>& q = inf.state.frame[i];
          stats.objective += std::log(std::max(q[truth_s], 1e-300));
          int argmax = static_cast<int>(
              std::max_element(q.begin(), q.end()) - q.begin());
          stats.correct += argmax == truth_s ? 1 : 0;
          stats.frames += 1;
        }
      }
      finish_batch(cfg, gates, res, acc, stats);
    }
    finish_epoch(ds, cfg, res, epoch);
  }
  return res;
}

double evaluate_map_accuracy(const TrainedModel& model, const Dataset& ds,
                             const std::string& split,
                             const InferenceOptions& opts) {
  long correct = 0, total = 0;
  for (int v : ds.video_indices(split)) {
    const VideoRecord& video = ds.videos[v];
    bool any = false;
    for (const Frame& f : video.frames) any = any || f.label.has_value();
    if (!any) continue;
    VideoModel vm = model.realize_video(video);
    InferenceResult inf = infer_video(vm, opts);
    std::vector<FrameAssignment> map = map_labeling(model.space, inf.state);
    for (std::size_t i = 0; i < video.frames.size(); ++i) {
      if (!video.frames[i].label) continue;
      ++total;
      if (map[i] == *video.frames[i].label) ++correct;
    }
  }
  if (total == 0) return 0.0;
  return static_cast<double>(correct) / static_cast<double>(total);
}

namespace {

void write_epoch_line(std::ostream& os, const EpochLogRecord& e) {
  os << "epoch " << e.epoch << " updates " << e.updates
     << " train_accuracy " << format_double(e.train_accuracy);
  if (e.heldout_accuracy >= 0.0)
    os << " heldout_accuracy " << format_double(e.heldout_accuracy);
  os << '\n';
}

}  // namespace

TrainConfig train_config_from_config(const ConfigText& cfg) {
  TrainConfig t;
  t.split = cfg.get_string("split", t.split);
  t.epochs = static_cast<int>(cfg.get_int("epochs", t.epochs));
  t.batch_frames = static_cast<int>(cfg.get_int("batch_frames", t.batch_frames));
  t.learning_rate = cfg.get_double("learning_rate", t.learning_rate);
  t.lr_decay_factor = cfg.get_double("lr_decay_factor", t.lr_decay_factor);
  t.lr_decay_every = cfg.get_int("lr_decay_every", t.lr_decay_every);
  t.intent_weight_decay =
      cfg.get_double("intent_weight_decay", t.intent_weight_decay);
  t.intent_init_scale =
      cfg.get_double("intent_init_scale", t.intent_init_scale);
  t.kernel.sigma = cfg.get_double("sigma", t.kernel.sigma);
  t.kernel.kernel_weight =
      cfg.get_double("kernel_weight", t.kernel.kernel_weight);
  t.term_weights.op = cfg.get_double("weight_op", t.term_weights.op);
  t.term_weights.ap = cfg.get_double("weight_ap", t.term_weights.ap);
  t.term_weights.os = cfg.get_double("weight_os", t.term_weights.os);
  t.term_weights.coap = cfg.get_double("weight_coap", t.term_weights.coap);
  t.store.discount = cfg.get_double("store_discount", t.store.discount);
  t.store.h_is_count = cfg.get_int("store_h_is_count", t.store.h_is_count) != 0;
  t.store.h_fixed = cfg.get_double("store_h_fixed", t.store.h_fixed);
  t.store.kernel_weighting =
      cfg.get_int("store_kernel_weighting", t.store.kernel_weighting) != 0;
  t.visit.inner_tol = cfg.get_double("visit_inner_tol", t.visit.inner_tol);
  t.visit.inner_max =
      static_cast<int>(cfg.get_int("visit_inner_max", t.visit.inner_max));
  t.sync_videos_per_batch = static_cast<int>(
      cfg.get_int("sync_videos_per_batch", t.sync_videos_per_batch));
  t.sync_infer.max_passes =
      static_cast<int>(cfg.get_int("infer_max_passes", t.sync_infer.max_passes));
  t.sync_infer.tol = cfg.get_double("infer_tol", t.sync_infer.tol);
  t.sync_infer.inner_tol =
      cfg.get_double("infer_inner_tol", t.sync_infer.inner_tol);
  t.sync_infer.inner_max =
      static_cast<int>(cfg.get_int("infer_inner_max", t.sync_infer.inner_max));
  t.sync_infer.damping = cfg.get_double("infer_damping", t.sync_infer.damping);
  t.variant = model_variant_from_string(
      cfg.get_string("variant", to_string(t.variant)));
  t.seed = static_cast<std::uint64_t>(cfg.get_int("seed", (long)t.seed));
  t.workers = static_cast<int>(cfg.get_int("workers", t.workers));
  t.log_epoch_accuracy =
      cfg.get_int("log_epoch_accuracy", t.log_epoch_accuracy) != 0;
  t.heldout_split = cfg.get_string("heldout_split", t.heldout_split);
  return t;
}

void train_config_to_config(const TrainConfig& tc, ConfigText& cfg) {
  cfg.set("split", tc.split);
  cfg.set_int("epochs", tc.epochs);
  cfg.set_int("batch_frames", tc.batch_frames);
  cfg.set_double("learning_rate", tc.learning_rate);
  cfg.set_double("lr_decay_factor", tc.lr_decay_factor);
  cfg.set_int("lr_decay_every", tc.lr_decay_every);
  cfg.set_double("intent_weight_decay", tc.intent_weight_decay);
  cfg.set_double("intent_init_scale", tc.intent_init_scale);
  cfg.set_double("sigma", tc.kernel.sigma);
  cfg.set_double("kernel_weight", tc.kernel.kernel_weight);
  cfg.set_double("weight_op", tc.term_weights.op);
  cfg.set_double("weight_ap", tc.term_weights.ap);
  cfg.set_double("weight_os", tc.term_weights.os);
  cfg.set_double("weight_coap", tc.term_weights.coap);
  cfg.set_double("store_discount", tc.store.discount);
  cfg.set_int("store_h_is_count", tc.store.h_is_count ? 1 : 0);
  cfg.set_double("store_h_fixed", tc.store.h_fixed);
  cfg.set_int("store_kernel_weighting", tc.store.kernel_weighting ? 1 : 0);
  cfg.set_double("visit_inner_tol", tc.visit.inner_tol);
  cfg.set_int("visit_inner_max", tc.visit.inner_max);
  cfg.set_int("sync_videos_per_batch", tc.sync_videos_per_batch);
  cfg.set_int("infer_max_passes", tc.sync_infer.max_passes);
  cfg.set_double("infer_tol", tc.sync_infer.tol);
  cfg.set_double("infer_inner_tol", tc.sync_infer.inner_tol);
  cfg.set_int("infer_inner_max", tc.sync_infer.inner_max);
  cfg.set_double("infer_damping", tc.sync_infer.damping);
  cfg.set("variant", to_string(tc.variant));
  cfg.set_int("seed", static_cast<long>(tc.seed));
  cfg.set_int("workers", tc.workers);
  cfg.set_int("log_epoch_accuracy", tc.log_epoch_accuracy ? 1 : 0);
  if (!tc.heldout_split.empty()) cfg.set("heldout_split", tc.heldout_split);
}

void write_training_log(std::ostream& os, const TrainResult& result) {
  std::size_t next_epoch = 0;
  for (const UpdateLogRecord& u : result.updates) {
    os << "update " << u.update << " objective "
       << format_double(u.objective) << " accuracy "
       << format_double(u.accuracy) << " lr " << format_double(u.lr) << '\n';
    while (next_epoch < result.epochs.size() &&
           result.epochs[next_epoch].updates == u.update) {
      write_epoch_line(os, result.epochs[next_epoch]);
      ++next_epoch;
    }
  }
  for (; next_epoch < result.epochs.size(); ++next_epoch)
    write_epoch_line(os, result.epochs[next_epoch]);
}

}  // namespace atf
