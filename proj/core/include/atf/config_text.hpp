#pragma once
// Line-oriented key/value configuration files.
//
//   # comment
//   key value [value ...]
//
// Keys may repeat (used for seen_config tuple lists).  Values are
// whitespace-separated tokens.  This one format carries label-space presets,
// generator configs and run manifests.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atf/label_space.hpp"

namespace atf {

class ConfigText {
 public:
  ConfigText() = default;

  static ConfigText parse_file(const std::string& path);
  static ConfigText parse_string(const std::string& text);

  bool has(const std::string& key) const;

  // Single-valued accessors; throw std::runtime_error when the key is
  // missing (unless a default is supplied) or not scalar.
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;

  // All value rows recorded for a repeated key, in file order.
  std::vector<std::vector<std::string>> get_rows(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  void set_int(const std::string& key, long value);
  void set_double(const std::string& key, double value);
  void add_row(const std::string& key, const std::vector<std::string>& row);

  // Keys in first-insertion order; serialization is canonical for a given
  // insertion sequence so rewritten files are byte-stable.
  std::string serialize() const;
  void write_file(const std::string& path) const;

  const std::vector<std::string>& keys() const { return order_; }

 private:
  std::vector<std::string> order_;  // first-appearance order
  std::map<std::string, std::vector<std::vector<std::string>>> rows_;
};

// Label-space block shared by presets, datasets and checkpoints.
LabelSpace label_space_from_config(const ConfigText& cfg);
void label_space_to_config(const LabelSpace& space, ConfigText& cfg);

}  // namespace atf
