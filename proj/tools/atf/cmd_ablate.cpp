#include <iostream>
#include <memory>
#include <sstream>

#include "atf/common.hpp"
#include "atf/evaluation.hpp"
#include "commands.hpp"

namespace atf::cli {
namespace {

struct AblateOpts {
  std::string data_path;
  std::string variants = "full,no_pairwise,no_intent,semantic_only";
  std::string seeds = "1,2,3";
  std::string split = "test";
  int epochs = -1;
  double lr = -1.0;
  int batch_frames = -1;
  int eval_frames = 25;
};

void run_ablate(const AblateOpts& o, const GlobalArgs& g) {
  std::string data_bytes = read_file_bytes(o.data_path);
  Dataset ds = load_dataset_string(data_bytes);

  TrainConfig base;
  std::string cfg_bytes;
  if (g.has_config) {
    cfg_bytes = read_file_bytes(g.config_path);
    ConfigText cfg = ConfigText::parse_string(cfg_bytes);
    require_known_keys(cfg, kTrainKeys, g.config_path);
    base = train_config_from_config(cfg);
  }
  if (o.epochs >= 0) base.epochs = o.epochs;
  if (o.lr >= 0.0) base.learning_rate = o.lr;
  if (o.batch_frames > 0) base.batch_frames = o.batch_frames;
  if (g.has_workers) base.workers = g.workers;

  std::vector<ModelVariant> variants;
  for (const std::string& v : split_csv(o.variants))
    variants.push_back(model_variant_from_string(v));
  std::vector<std::uint64_t> seeds;
  for (const std::string& s : split_csv(o.seeds))
    seeds.push_back(std::stoull(s));
  if (variants.empty() || seeds.empty())
    throw std::runtime_error("ablate: need at least one variant and seed");

  RecognitionOptions ro;
  ro.eval_frames = o.eval_frames;
  ro.infer = base.sync_infer;

  std::vector<AblationResult> rows =
      ablation_run(ds, base, variants, seeds, o.split, ro);

  std::ostringstream text;
  for (const AblationResult& r : rows) {
    text << "variant " << to_string(r.variant) << " map_mean "
         << format_double(r.map_mean) << " map_sd "
         << format_double(r.map_sd) << " maps";
    for (double m : r.map_by_seed) text << ' ' << format_double(m);
    text << '\n';
  }
  // Margins against the full model, the usual reading of the table.
  const AblationResult* full = nullptr;
  for (const AblationResult& r : rows)
    if (r.variant == ModelVariant::Full) full = &r;
  if (full != nullptr) {
    for (const AblationResult& r : rows) {
      if (r.variant == ModelVariant::Full) continue;
      text << "margin full_minus_" << to_string(r.variant) << ' '
           << format_double(full->map_mean - r.map_mean) << '\n';
    }
  }
  std::cout << text.str();

  if (g.has_out) {
    ArtifactWriter w("ablate", g.out_dir);
    train_config_to_config(base, w.config());
    w.config().set("variants", o.variants);
    w.config().set("seeds", o.seeds);
    w.config().set("eval_split", o.split);
    w.config().set_int("eval_frames", o.eval_frames);
    w.note_input_bytes("dataset", o.data_path, data_bytes);
    if (g.has_config)
      w.note_input_bytes("train_config", g.config_path, cfg_bytes);
    w.write_artifact("ablation.txt", text.str());
    w.finish();
    std::cout << "wrote " << w.path_of("ablation.txt").string() << '\n';
  }
}

}  // namespace

void register_ablate(CLI::App& app, const GlobalArgs& g) {
  auto o = std::make_shared<AblateOpts>();
  CLI::App* sub = app.add_subcommand(
      "ablate", "Train and score several model variants over paired seeds");
  sub->fallthrough();
  sub->add_option("--data", o->data_path, "Dataset file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--variants", o->variants, "Comma-separated variants")
      ->capture_default_str();
  sub->add_option("--seeds", o->seeds, "Comma-separated trainer seeds")
      ->capture_default_str();
  sub->add_option("--split", o->split, "Evaluation split")
      ->capture_default_str();
  sub->add_option("--epochs", o->epochs, "Override training epochs");
  sub->add_option("--lr", o->lr, "Override the learning rate");
  sub->add_option("--batch-frames", o->batch_frames,
                  "Override the asynchronous batch size (frames)");
  sub->add_option("--eval-frames", o->eval_frames,
                  "Equidistant frames scored per video")
      ->capture_default_str();
  sub->callback([o, &g] { run_ablate(*o, g); });
}

}  // namespace atf::cli
