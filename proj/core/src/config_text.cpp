#include "atf/config_text.hpp"

#include <fstream>
#include <sstream>

#include "atf/common.hpp"

namespace atf {

ConfigText ConfigText::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_string(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

ConfigText ConfigText::parse_string(const std::string& text) {
  ConfigText cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;  // blank or comment-only line
    std::vector<std::string> row;
    std::string tok;
    while (ls >> tok) row.push_back(tok);
    if (row.empty())
      throw ParseError("config key '" + key + "' has no value", line_no);
    cfg.add_row(key, row);
  }
  return cfg;
}

bool ConfigText::has(const std::string& key) const {
  return rows_.count(key) != 0;
}

static const std::vector<std::string>& scalar_row(
    const std::map<std::string, std::vector<std::vector<std::string>>>& rows,
    const std::string& key) {
  auto it = rows.find(key);
  if (it == rows.end())
    throw std::runtime_error("config: missing key '" + key + "'");
  if (it->second.size() != 1 || it->second[0].size() != 1)
    throw std::runtime_error("config: key '" + key + "' is not scalar");
  return it->second[0];
}

std::string ConfigText::get_string(const std::string& key) const {
  return scalar_row(rows_, key)[0];
}

std::string ConfigText::get_string(const std::string& key,
                                   const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

long ConfigText::get_int(const std::string& key) const {
  const std::string& s = get_string(key);
  std::size_t pos = 0;
  long v = std::stol(s, &pos);
  if (pos != s.size())
    throw std::runtime_error("config: key '" + key + "' is not an integer");
  return v;
}

long ConfigText::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double ConfigText::get_double(const std::string& key) const {
  return parse_double(get_string(key));
}

double ConfigText::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::vector<std::vector<std::string>> ConfigText::get_rows(
    const std::string& key) const {
  auto it = rows_.find(key);
  if (it == rows_.end()) return {};
  return it->second;
}

void ConfigText::set(const std::string& key, const std::string& value) {
  if (!rows_.count(key)) order_.push_back(key);
  rows_[key] = {{value}};
}

void ConfigText::set_int(const std::string& key, long value) {
  set(key, std::to_string(value));
}

void ConfigText::set_double(const std::string& key, double value) {
  set(key, format_double(value));
}

void ConfigText::add_row(const std::string& key,
                         const std::vector<std::string>& row) {
  if (!rows_.count(key)) order_.push_back(key);
  rows_[key].push_back(row);
}

std::string ConfigText::serialize() const {
  std::ostringstream os;
  for (const std::string& key : order_) {
    for (const auto& row : rows_.at(key)) {
      os << key;
      for (const std::string& v : row) os << ' ' << v;
      os << '\n';
    }
  }
  return os.str();
}

void ConfigText::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << serialize();
}

LabelSpace label_space_from_config(const ConfigText& cfg) {
  std::vector<SeenConfig> configs;
  for (const auto& row : cfg.get_rows("seen_config")) {
    if (row.size() != 4)
      throw std::runtime_error("config: seen_config rows need 4 integers");
    configs.push_back(SeenConfig{std::stoi(row[0]), std::stoi(row[1]),
                                 std::stoi(row[2]), std::stoi(row[3])});
  }
  return LabelSpace(static_cast<int>(cfg.get_int("n_category")),
                    static_cast<int>(cfg.get_int("n_object")),
                    static_cast<int>(cfg.get_int("n_action")),
                    static_cast<int>(cfg.get_int("n_progress")),
                    static_cast<int>(cfg.get_int("n_scene")),
                    static_cast<int>(cfg.get_int("n_intent")), configs);
}

void label_space_to_config(const LabelSpace& space, ConfigText& cfg) {
  cfg.set_int("n_category", space.n_category());
  cfg.set_int("n_object", space.n_object());
  cfg.set_int("n_action", space.n_action());
  cfg.set_int("n_progress", space.n_progress());
  cfg.set_int("n_scene", space.n_scene());
  cfg.set_int("n_intent", space.n_intent());
  for (const SeenConfig& t : space.seen_configs())
    cfg.add_row("seen_config",
                {std::to_string(t[0]), std::to_string(t[1]),
                 std::to_string(t[2]), std::to_string(t[3])});
}

}  // namespace atf
