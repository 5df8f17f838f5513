#pragma once
// Shared plumbing for the atf command-line tool: atomic artifact writing,
// run manifests, config-key validation and the text report formats.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "atf/config_text.hpp"
#include "atf/evaluation.hpp"
#include "atf/gradcheck.hpp"

namespace atf::cli {

// Options shared by every subcommand (declared on the parent parser, reach
// the subcommands through fall-through).  The has_* flags record whether
// the user supplied the option, so command defaults stay in charge
// otherwise.
struct GlobalArgs {
  std::uint64_t seed = 1;
  std::string out_dir;
  int workers = 1;
  std::string config_path;
  bool has_seed = false;
  bool has_out = false;
  bool has_workers = false;
  bool has_config = false;
};

// Thrown by command bodies to request a specific nonzero exit code after
// their report has already been printed (e.g. a failed gradient check).
struct CommandFailure : std::runtime_error {
  CommandFailure(const std::string& what, int code)
      : std::runtime_error(what), exit_code(code) {}
  int exit_code;
};

std::string read_file_bytes(const std::string& path);

// Writes via a sibling temp file and rename, so a crash never leaves a
// half-written artifact behind.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

// 16-digit hex of the FNV-1a fingerprint of `bytes`.
std::string fingerprint_hex(const std::string& bytes);

// Rejects config keys outside `allowed` — a typo in a config file should
// fail loudly, not silently fall back to a default.
void require_known_keys(const ConfigText& cfg,
                        const std::vector<std::string>& allowed,
                        const std::string& context);

extern const std::vector<std::string> kSpaceKeys;
extern const std::vector<std::string> kGeneratorKeys;
extern const std::vector<std::string> kTrainKeys;

// Collects the fully resolved parameter record plus a fingerprint of every
// file the run read or wrote, then lands everything in <dir>/manifest.cfg.
// Artifacts go through write_artifact so the manifest is always written
// last: a directory without a manifest is an aborted run.
class ArtifactWriter {
 public:
  ArtifactWriter(const std::string& command, std::filesystem::path dir);

  ConfigText& config() { return cfg_; }
  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_of(const std::string& name) const;

  void note_input(const std::string& role, const std::string& path);
  void note_input_bytes(const std::string& role, const std::string& path,
                        const std::string& bytes);
  void write_artifact(const std::string& name, const std::string& bytes);
  void finish();

 private:
  std::filesystem::path dir_;
  ConfigText cfg_;
  bool finished_ = false;
};

std::vector<std::string> split_csv(const std::string& s);

// ---- report formats (stable key/value text, canonical floats) ----
void write_recognition_report(std::ostream& os, const RecognitionEval& r);
void write_localization_report(std::ostream& os, const LocalizationEval& r);
void write_intent_report(std::ostream& os, const IntentDistanceReport& r);
void write_gradcheck_report(std::ostream& os, const GradcheckReport& r);

}  // namespace atf::cli
