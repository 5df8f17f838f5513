#include <iostream>
#include <memory>
#include <sstream>

#include "atf/message_store.hpp"
#include "atf/trainer.hpp"
#include "atf/wire.hpp"
#include "commands.hpp"

namespace atf::cli {
namespace {

struct TrainOpts {
  std::string data_path;
  std::string variant;
  bool no_pairwise = false;
  bool no_intent = false;
  bool semantic_only = false;
  bool no_structure = false;
  bool sync = false;
  bool distributed = false;
  int port = 0;
  std::string connect;
  int epochs = -1;
  double lr = -1.0;
  int batch_frames = -1;
  std::string heldout;
};

ModelVariant resolve_variant(const TrainOpts& o, ModelVariant fallback) {
  int flags = int(o.no_pairwise) + int(o.no_intent) + int(o.semantic_only) +
              int(o.no_structure) + int(!o.variant.empty());
  if (flags > 1)
    throw std::runtime_error("train: pick at most one model variant");
  if (o.no_pairwise) return ModelVariant::NoPairwise;
  if (o.no_intent) return ModelVariant::NoIntent;
  if (o.semantic_only) return ModelVariant::SemanticOnly;
  if (o.no_structure) return ModelVariant::NoStructure;
  if (!o.variant.empty()) return model_variant_from_string(o.variant);
  return fallback;
}

void run_train(const TrainOpts& o, const GlobalArgs& g) {
  std::string data_bytes = read_file_bytes(o.data_path);
  Dataset ds = load_dataset_string(data_bytes);

  TrainConfig tc;
  std::string cfg_bytes;
  if (g.has_config) {
    cfg_bytes = read_file_bytes(g.config_path);
    ConfigText cfg = ConfigText::parse_string(cfg_bytes);
    require_known_keys(cfg, kTrainKeys, g.config_path);
    tc = train_config_from_config(cfg);
  }
  tc.variant = resolve_variant(o, tc.variant);
  if (o.epochs >= 0) tc.epochs = o.epochs;
  if (o.lr >= 0.0) tc.learning_rate = o.lr;
  if (o.batch_frames > 0) tc.batch_frames = o.batch_frames;
  if (!o.heldout.empty()) tc.heldout_split = o.heldout;
  if (g.has_seed) tc.seed = g.seed;
  if (g.has_workers) tc.workers = g.workers;

  if (o.sync && (o.distributed || !o.connect.empty()))
    throw std::runtime_error(
        "train: --sync uses exact in-process messages; it cannot be "
        "combined with --distributed or --connect");
  if (o.distributed && !o.connect.empty())
    throw std::runtime_error("train: --distributed and --connect conflict");

  std::string mode = "async";
  TrainResult res;
  if (o.sync) {
    mode = "sync";
    res = train_synchronous_baseline(ds, tc);
  } else if (!o.connect.empty()) {
    mode = "remote";
    auto colon = o.connect.rfind(':');
    if (colon == std::string::npos)
      throw std::runtime_error("train: --connect expects host:port");
    std::string host = o.connect.substr(0, colon);
    int port = std::stoi(o.connect.substr(colon + 1));
    WireClient client(host, static_cast<std::uint16_t>(port));
    res = train(ds, tc, &client);
  } else if (o.distributed) {
    mode = "distributed";
    MessageStore store(ds.space, tc.store);
    WireServer server(store, static_cast<std::uint16_t>(o.port));
    WireClient client("127.0.0.1", server.port());
    res = train(ds, tc, &client);
  } else {
    res = train(ds, tc);
  }

  ArtifactWriter w("train", g.has_out ? g.out_dir : "atf-out");
  train_config_to_config(tc, w.config());
  w.config().set("mode", mode);
  w.note_input_bytes("dataset", o.data_path, data_bytes);
  if (g.has_config)
    w.note_input_bytes("train_config", g.config_path, cfg_bytes);
  w.write_artifact("model.ckpt", save_checkpoint_string(res.model));
  std::ostringstream log;
  write_training_log(log, res);
  w.write_artifact("train.log", log.str());
  w.finish();

  std::cout << "trained " << to_string(tc.variant) << " (" << mode << "), "
            << res.total_updates << " updates over " << tc.epochs
            << " epochs\n";
  if (!res.epochs.empty()) {
    const EpochLogRecord& last = res.epochs.back();
    std::cout << "final train accuracy "
              << format_double(last.train_accuracy);
    if (last.heldout_accuracy >= 0.0)
      std::cout << ", heldout accuracy "
                << format_double(last.heldout_accuracy);
    std::cout << '\n';
  }
  std::cout << "wrote " << w.path_of("model.ckpt").string() << '\n'
            << "wrote " << w.path_of("train.log").string() << '\n';
}

}  // namespace

void register_train(CLI::App& app, const GlobalArgs& g) {
  auto o = std::make_shared<TrainOpts>();
  CLI::App* sub = app.add_subcommand(
      "train", "Train a model on a dataset (asynchronous by default)");
  sub->fallthrough();
  sub->add_option("--data", o->data_path, "Dataset file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--variant", o->variant,
                  "Model variant: full, no_pairwise, no_intent, "
                  "semantic_only, no_structure");
  sub->add_flag("--no-pairwise", o->no_pairwise,
                "Ablation: drop the pairwise affinity");
  sub->add_flag("--no-intent", o->no_intent,
                "Ablation: drop the latent intent");
  sub->add_flag("--semantic-only", o->semantic_only,
                "Ablation: per-frame semantic terms only");
  sub->add_flag("--no-structure", o->no_structure,
                "Ablation: independent per-frame classifier");
  sub->add_flag("--sync", o->sync,
                "Synchronous whole-video baseline instead of asynchronous "
                "frame batches");
  sub->add_flag("--distributed", o->distributed,
                "Route messages through an in-process TCP message server");
  sub->add_option("--port", o->port,
                  "Port for --distributed (0 = ephemeral)");
  sub->add_option("--connect", o->connect,
                  "host:port of an external message server");
  sub->add_option("--epochs", o->epochs, "Override training epochs");
  sub->add_option("--lr", o->lr, "Override the learning rate");
  sub->add_option("--batch-frames", o->batch_frames,
                  "Override the asynchronous batch size (frames)");
  sub->add_option("--heldout", o->heldout,
                  "Also log accuracy on this split after each epoch");
  sub->callback([o, &g] { run_train(*o, g); });
}

}  // namespace atf::cli
