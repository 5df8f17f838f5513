#include <iostream>
#include <memory>
#include <sstream>

#include "atf/checkpoint.hpp"
#include "atf/evaluation.hpp"
#include "commands.hpp"

namespace atf::cli {
namespace {

struct EvalOpts {
  std::string data_path;
  std::string model_path;
  std::string split = "test";
  bool recognition = false;
  bool localization = false;
  bool intent = false;
  bool post_process = false;
  int eval_frames = 25;
  int grid_rows = 75;
  int window = 30;
  int select_every = 3;
  int permutations = 10000;
  double alpha = 0.1;
  int passes = -1;
};

void run_eval(const EvalOpts& o, const GlobalArgs& g) {
  std::string data_bytes = read_file_bytes(o.data_path);
  std::string model_bytes = read_file_bytes(o.model_path);
  Dataset ds = load_dataset_string(data_bytes);
  TrainedModel model = load_checkpoint_string(model_bytes);
  check_space_match(model, ds);

  // No protocol selected = run the full report.
  bool all = !o.recognition && !o.localization && !o.intent;

  InferenceOptions infer;
  if (o.passes > 0) infer.max_passes = o.passes;

  std::ostringstream report;
  if (all || o.recognition) {
    RecognitionOptions ro;
    ro.eval_frames = o.eval_frames;
    ro.infer = infer;
    RecognitionEval re = evaluate_recognition(model, ds, o.split, ro);
    write_recognition_report(report, re);
  }
  if (all || o.localization) {
    LocalizationOptions lo;
    lo.grid_rows = o.grid_rows;
    lo.smooth = o.post_process;
    lo.window = o.window;
    lo.select_every = o.select_every;
    lo.infer = infer;
    LocalizationEval le = evaluate_localization(model, ds, o.split, lo);
    write_localization_report(report, le);
  }
  if (all || o.intent) {
    IntentClusterOptions io;
    io.permutations = o.permutations;
    io.alpha = o.alpha;
    io.seed = g.seed;
    io.infer = infer;
    IntentDistanceReport ir = intent_cluster_report(model, ds, o.split, io);
    if (ir.n_states == 0)
      report << "intent_states 0  # no videos carry a generating intent\n";
    else
      write_intent_report(report, ir);
  }

  std::cout << report.str();

  if (g.has_out) {
    ArtifactWriter w("eval", g.out_dir);
    w.config().set("split", o.split);
    w.config().set_int("eval_frames", o.eval_frames);
    w.config().set_int("grid_rows", o.grid_rows);
    w.config().set_int("post_process", o.post_process ? 1 : 0);
    w.config().set_int("window", o.window);
    w.config().set_int("select_every", o.select_every);
    w.config().set_int("permutations", o.permutations);
    w.config().set_double("alpha", o.alpha);
    w.config().set_int("seed", static_cast<long>(g.seed));
    w.config().set_int("infer_max_passes", infer.max_passes);
    w.note_input_bytes("dataset", o.data_path, data_bytes);
    w.note_input_bytes("model", o.model_path, model_bytes);
    w.write_artifact("eval.txt", report.str());
    w.finish();
    std::cout << "wrote " << w.path_of("eval.txt").string() << '\n';
  }
}

}  // namespace

void register_eval(CLI::App& app, const GlobalArgs& g) {
  auto o = std::make_shared<EvalOpts>();
  CLI::App* sub = app.add_subcommand(
      "eval", "Score a checkpoint: video recognition, localization and "
              "intent clustering");
  sub->fallthrough();
  sub->add_option("--data", o->data_path, "Dataset file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--model", o->model_path, "Model checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--split", o->split, "Dataset split to score")
      ->capture_default_str();
  sub->add_flag("--recognition", o->recognition,
                "Video-level recognition mAP only");
  sub->add_flag("--localization", o->localization,
                "Temporal localization mAP only");
  sub->add_flag("--intent", o->intent, "Intent clustering report only");
  sub->add_flag("--post-process", o->post_process,
                "Smooth localization scores with a centered window");
  sub->add_option("--eval-frames", o->eval_frames,
                  "Equidistant frames scored per video (recognition)")
      ->capture_default_str();
  sub->add_option("--grid-rows", o->grid_rows,
                  "Dense grid rows per video (localization)")
      ->capture_default_str();
  sub->add_option("--window", o->window, "Smoothing window in rows")
      ->capture_default_str();
  sub->add_option("--every", o->select_every,
                  "Evaluate every k-th grid row (localization)")
      ->capture_default_str();
  sub->add_option("--permutations", o->permutations,
                  "Permutations for the intent grouping test")
      ->capture_default_str();
  sub->add_option("--alpha", o->alpha,
                  "Significance level for intent grouping")
      ->capture_default_str();
  sub->add_option("--passes", o->passes,
                  "Override inference message passes");
  sub->callback([o, &g] { run_eval(*o, g); });
}

}  // namespace atf::cli
