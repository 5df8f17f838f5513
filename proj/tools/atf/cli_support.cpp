#include "cli_support.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "atf/common.hpp"

namespace atf::cli {

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string fingerprint_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

void require_known_keys(const ConfigText& cfg,
                        const std::vector<std::string>& allowed,
                        const std::string& context) {
  for (const std::string& k : cfg.keys()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw std::runtime_error(context + ": unknown key '" + k + "'");
  }
}

const std::vector<std::string> kSpaceKeys = {
    "n_category", "n_object", "n_action", "n_progress",
    "n_scene",    "n_intent", "seen_config"};

const std::vector<std::string> kGeneratorKeys = {
    "train_videos", "test_videos",  "frames_per_video", "fps",
    "sigma",        "kernel_weight", "sem_scale",       "mu_diag",
    "mu_offdiag",   "mu_chain",      "xi_window",       "xi_pattern",
    "xi_strength",  "feature_gain",  "feature_noise",   "enum_budget",
    "gibbs_burn_in", "gibbs_thinning"};

const std::vector<std::string> kTrainKeys = {
    "split",          "epochs",          "batch_frames",
    "learning_rate",  "lr_decay_factor", "lr_decay_every",
    "intent_weight_decay", "intent_init_scale",
    "sigma",          "kernel_weight",
    "weight_op",      "weight_ap",       "weight_os",      "weight_coap",
    "store_discount", "store_h_is_count", "store_h_fixed",
    "store_kernel_weighting",
    "visit_inner_tol", "visit_inner_max",
    "sync_videos_per_batch",
    "infer_max_passes", "infer_tol", "infer_inner_tol", "infer_inner_max",
    "infer_damping",
    "variant",        "seed",            "workers",
    "log_epoch_accuracy", "heldout_split"};

ArtifactWriter::ArtifactWriter(const std::string& command,
                               std::filesystem::path dir)
    : dir_(std::move(dir)) {
  if (dir_.empty())
    throw std::runtime_error(command + ": no output directory (use --out)");
  std::filesystem::create_directories(dir_);
  cfg_.set("command", command);
}

std::filesystem::path ArtifactWriter::path_of(const std::string& name) const {
  return dir_ / name;
}

void ArtifactWriter::note_input(const std::string& role,
                                const std::string& path) {
  note_input_bytes(role, path, read_file_bytes(path));
}

void ArtifactWriter::note_input_bytes(const std::string& role,
                                      const std::string& path,
                                      const std::string& bytes) {
  cfg_.add_row("input", {role, fingerprint_hex(bytes), path});
}

void ArtifactWriter::write_artifact(const std::string& name,
                                    const std::string& bytes) {
  write_file_atomic(dir_ / name, bytes);
  cfg_.add_row("output", {name, fingerprint_hex(bytes)});
}

void ArtifactWriter::finish() {
  if (finished_) return;
  write_file_atomic(dir_ / "manifest.cfg", cfg_.serialize());
  finished_ = true;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

void write_recognition_report(std::ostream& os, const RecognitionEval& r) {
  os << "recognition_videos " << r.video_ids.size() << '\n'
     << "recognition_classes_evaluated " << r.map.classes_evaluated << '\n'
     << "recognition_classes_skipped " << r.map.classes_skipped << '\n';
  for (std::size_t c = 0; c < r.map.per_class.size(); ++c) {
    os << "recognition_ap " << c << ' ';
    if (r.map.per_class[c]) os << format_double(*r.map.per_class[c]);
    else os << '-';
    os << '\n';
  }
  os << "recognition_map " << format_double(r.map.map) << '\n';
}

void write_localization_report(std::ostream& os, const LocalizationEval& r) {
  os << "localization_instances " << r.scores.size() << '\n'
     << "localization_classes_evaluated " << r.map.classes_evaluated << '\n'
     << "localization_classes_skipped " << r.map.classes_skipped << '\n';
  for (std::size_t c = 0; c < r.map.per_class.size(); ++c) {
    os << "localization_ap " << c << ' ';
    if (r.map.per_class[c]) os << format_double(*r.map.per_class[c]);
    else os << '-';
    os << '\n';
  }
  os << "localization_map " << format_double(r.map.map) << '\n';
}

void write_intent_report(std::ostream& os, const IntentDistanceReport& r) {
  os << "intent_states " << r.n_states << '\n'
     << "intent_overall_mean " << format_double(r.overall_mean) << '\n';
  for (std::size_t g = 0; g < r.group_labels.size(); ++g) {
    os << "intent_group " << r.group_labels[g] << " size " << r.group_sizes[g]
       << " within_mean ";
    if (r.group_sizes[g] < 2) os << '-';  // no within-group pairs
    else os << format_double(r.within_mean[g]);
    os << " p_value " << format_double(r.p_values[g]) << '\n';
  }
  os << "intent_qualifying_groups " << r.qualifying << '\n';
}

void write_gradcheck_report(std::ostream& os, const GradcheckReport& r) {
  for (const GradcheckFamilyResult& f : r.families) {
    os << "family " << f.family << " entries " << f.entries_checked
       << " worst_rel " << format_double(f.worst_rel) << " worst_model "
       << f.worst_model << '\n';
  }
  os << "tolerance " << format_double(r.tol) << '\n'
     << "gradcheck " << (r.pass ? "PASS" : "FAIL") << '\n';
}

}  // namespace atf::cli
