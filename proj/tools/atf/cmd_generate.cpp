#include <iostream>
#include <memory>

#include "atf/checkpoint.hpp"
#include "atf/dataset.hpp"
#include "atf/synthetic.hpp"
#include "commands.hpp"

namespace atf::cli {
namespace {

struct GenerateOpts {
  std::string space_path;
  int train_videos = -1;
  int test_videos = -1;
  int frames = -1;
};

void run_generate(const GenerateOpts& o, const GlobalArgs& g) {
  std::string space_bytes = read_file_bytes(o.space_path);
  ConfigText space_cfg = ConfigText::parse_string(space_bytes);
  require_known_keys(space_cfg, kSpaceKeys, o.space_path);
  LabelSpace space = label_space_from_config(space_cfg);

  GeneratorConfig gc;
  std::string gen_bytes;
  if (g.has_config) {
    gen_bytes = read_file_bytes(g.config_path);
    ConfigText gen_cfg = ConfigText::parse_string(gen_bytes);
    require_known_keys(gen_cfg, kGeneratorKeys, g.config_path);
    gc = generator_config_from_config(gen_cfg);
  }
  if (o.train_videos >= 0) gc.train_videos = o.train_videos;
  if (o.test_videos >= 0) gc.test_videos = o.test_videos;
  if (o.frames > 0) gc.frames_per_video = o.frames;

  GeneratedData data = generate_synthetic(space, gc, g.seed);

  ArtifactWriter w("generate", g.has_out ? g.out_dir : "atf-out");
  generator_config_to_config(gc, w.config());
  w.config().set_int("seed", static_cast<long>(g.seed));
  w.config().set("space_fingerprint", fingerprint_hex(space.serialize()));
  w.config().set("sampling",
                 data.used_enumeration ? "enumeration" : "gibbs");
  w.note_input_bytes("space", o.space_path, space_bytes);
  if (g.has_config)
    w.note_input_bytes("generator_config", g.config_path, gen_bytes);
  w.write_artifact("dataset.ds", save_dataset_string(data.dataset));
  w.write_artifact("generator.ckpt",
                   save_checkpoint_string(data.generating_model));
  w.finish();

  std::cout << "generated " << data.dataset.videos.size() << " videos ("
            << gc.train_videos << " train / " << gc.test_videos
            << " test), " << data.dataset.labeled_frame_count("train")
            << " labeled train frames, sampling "
            << (data.used_enumeration ? "enumeration" : "gibbs") << '\n'
            << "wrote " << w.path_of("dataset.ds").string() << '\n'
            << "wrote " << w.path_of("generator.ckpt").string() << '\n';
}

}  // namespace

void register_generate(CLI::App& app, const GlobalArgs& g) {
  auto o = std::make_shared<GenerateOpts>();
  CLI::App* sub = app.add_subcommand(
      "generate", "Sample a synthetic dataset from a generating field");
  sub->fallthrough();
  sub->add_option("--space", o->space_path, "Label-space config file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--train-videos", o->train_videos,
                  "Override the number of training videos");
  sub->add_option("--test-videos", o->test_videos,
                  "Override the number of test videos");
  sub->add_option("--frames", o->frames, "Override frames per video");
  sub->callback([o, &g] { run_generate(*o, g); });
}

}  // namespace atf::cli
