#include <iostream>
#include <memory>
#include <sstream>

#include "atf/checkpoint.hpp"
#include "atf/inference.hpp"
#include "commands.hpp"

namespace atf::cli {
namespace {

struct InferOpts {
  std::string data_path;
  std::string model_path;
  std::string video_id;
  std::string split = "test";
  int top_k = 3;
  int passes = -1;
};

const VideoRecord& pick_video(const Dataset& ds, const InferOpts& o) {
  if (!o.video_id.empty()) {
    for (const VideoRecord& v : ds.videos)
      if (v.id == o.video_id) return v;
    throw std::runtime_error("infer: no video with id '" + o.video_id + "'");
  }
  for (const VideoRecord& v : ds.videos)
    if (v.split == o.split) return v;
  throw std::runtime_error("infer: no video in split '" + o.split + "'");
}

void run_infer(const InferOpts& o, const GlobalArgs& g) {
  std::string data_bytes = read_file_bytes(o.data_path);
  std::string model_bytes = read_file_bytes(o.model_path);
  Dataset ds = load_dataset_string(data_bytes);
  TrainedModel model = load_checkpoint_string(model_bytes);
  check_space_match(model, ds);

  const VideoRecord& video = pick_video(ds, o);
  VideoModel vm = model.realize_video(video);

  InferenceOptions io;
  if (o.passes > 0) io.max_passes = o.passes;

  // Snapshot the belief state at the end of every message pass so the dump
  // shows how predictions sharpen from pass to pass.
  std::vector<MarginalState> snapshots;
  MarginalState last;
  int last_pass = -1;
  auto observer = [&](const UpdateEvent& e, const MarginalState& s) {
    if (e.pass != last_pass && last_pass >= 0) snapshots.push_back(last);
    last_pass = e.pass;
    last = s;
  };
  InferenceResult res = infer_video(vm, io, observer);
  snapshots.push_back(res.state);

  std::ostringstream dump;
  dump << "video " << video.id << " split " << video.split << " frames "
       << vm.n_frames() << '\n'
       << "passes " << res.passes_used << " converged "
       << (res.converged ? 1 : 0) << '\n';
  for (std::size_t p = 0; p < snapshots.size(); ++p)
    append_marginal_dump(dump, ds.space, snapshots[p], vm.positions,
                         static_cast<int>(p), o.top_k);

  std::cout << dump.str();

  if (g.has_out) {
    ArtifactWriter w("infer", g.out_dir);
    w.config().set("video", video.id);
    w.config().set("split", o.split);
    w.config().set_int("top_k", o.top_k);
    w.config().set_int("max_passes", io.max_passes);
    w.note_input_bytes("dataset", o.data_path, data_bytes);
    w.note_input_bytes("model", o.model_path, model_bytes);
    w.write_artifact("trace.txt", dump.str());
    w.finish();
    std::cout << "wrote " << w.path_of("trace.txt").string() << '\n';
  }
}

}  // namespace

void register_infer(CLI::App& app, const GlobalArgs& g) {
  auto o = std::make_shared<InferOpts>();
  CLI::App* sub = app.add_subcommand(
      "infer", "Dump per-pass marginals of one video (prediction evolution)");
  sub->fallthrough();
  sub->add_option("--data", o->data_path, "Dataset file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--model", o->model_path, "Model checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--video", o->video_id,
                  "Video id (default: first video of --split)");
  sub->add_option("--split", o->split, "Split to pick the video from")
      ->capture_default_str();
  sub->add_option("--top", o->top_k, "Assignments listed per frame")
      ->capture_default_str();
  sub->add_option("--passes", o->passes, "Override inference passes");
  sub->callback([o, &g] { run_infer(*o, g); });
}

}  // namespace atf::cli
