#include "atf/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "atf/common.hpp"
#include "atf/config_text.hpp"

namespace atf {

std::string to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::Full: return "full";
    case ModelVariant::NoPairwise: return "no_pairwise";
    case ModelVariant::NoIntent: return "no_intent";
    case ModelVariant::SemanticOnly: return "semantic_only";
    case ModelVariant::NoStructure: return "no_structure";
  }
  throw std::invalid_argument("unknown model variant");
}

ModelVariant model_variant_from_string(const std::string& s) {
  if (s == "full") return ModelVariant::Full;
  if (s == "no_pairwise") return ModelVariant::NoPairwise;
  if (s == "no_intent") return ModelVariant::NoIntent;
  if (s == "semantic_only") return ModelVariant::SemanticOnly;
  if (s == "no_structure") return ModelVariant::NoStructure;
  throw std::invalid_argument("unknown model variant '" + s + "'");
}

TrainedModel TrainedModel::fresh(const LabelSpace& space, int feature_dim,
                                 KernelConfig kernel, ModelVariant variant) {
  TrainedModel m;
  m.space = space;
  m.kernel = kernel;
  m.variant = variant;
  m.mu = Table2D(space.n_object(), space.n_object());
  ProviderVariant pv = variant == ModelVariant::NoStructure
                           ? ProviderVariant::IndependentUnaries
                           : ProviderVariant::Joint;
  m.provider = PotentialProvider(m.space, feature_dim, pv);
  return m;
}

VideoModel TrainedModel::realize_video(
    const VideoRecord& video, const std::vector<int>& frame_subset) const {
  std::vector<int> frames = frame_subset;
  if (frames.empty()) {
    frames.resize(video.frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i)
      frames[i] = static_cast<int>(i);
  }
  VideoModel vm;
  vm.space = &space;
  vm.kernel = kernel;
  vm.mu = mu;
  vm.semantic.reserve(frames.size());
  vm.intent.reserve(frames.size());
  vm.positions.reserve(frames.size());
  for (int fi : frames) {
    const Frame& f = video.frames.at(fi);
    FramePotentials pots = provider.realize(space, f.features);
    pots.semantic.weights = weights;
    vm.semantic.push_back(std::move(pots.semantic));
    vm.intent.push_back(std::move(pots.intent));
    vm.positions.push_back(f.index);
  }
  vm.validate();
  return vm;
}

namespace {

void write_floats(std::ostringstream& os, const char* key,
                  const std::vector<double>& v) {
  os << key;
  for (double x : v) os << ' ' << format_double(x);
  os << '\n';
}

std::vector<double> read_floats(std::istringstream& ls, const char* key,
                                std::size_t expect, int line_no) {
  std::string k;
  if (!(ls >> k) || k != key)
    throw ParseError(std::string("checkpoint: expected '") + key + "' row",
                     line_no);
  std::vector<double> out;
  out.reserve(expect);
  std::string tok;
  while (ls >> tok) out.push_back(parse_double(tok));
  if (out.size() != expect)
    throw ParseError("checkpoint: float row length mismatch", line_no);
  return out;
}

}  // namespace

std::string save_checkpoint_string(const TrainedModel& model) {
  std::ostringstream os;
  os << "atf-checkpoint 1\n";
  os << model.space.serialize();
  char fp[32];
  std::snprintf(fp, sizeof(fp), "%016llx",
                static_cast<unsigned long long>(model.space.fingerprint()));
  os << "space_fingerprint " << fp << '\n';
  os << "sigma " << format_double(model.kernel.sigma) << '\n';
  os << "kernel_weight " << format_double(model.kernel.kernel_weight) << '\n';
  os << "term_weights " << format_double(model.weights.op) << ' '
     << format_double(model.weights.ap) << ' '
     << format_double(model.weights.os) << ' '
     << format_double(model.weights.coap) << '\n';
  os << "variant " << to_string(model.variant) << '\n';
  os << "feature_dim " << model.provider.feature_dim() << '\n';
  write_floats(os, "mu", model.mu.values());

  std::vector<std::string> names =
      PotentialProvider::head_names(model.provider.variant());
  std::vector<const LinearHead*> heads = model.provider.heads();
  for (std::size_t h = 0; h < heads.size(); ++h) {
    os << "head " << names[h] << ' ' << heads[h]->rows << ' '
       << heads[h]->cols << '\n';
    write_floats(os, "w", heads[h]->w);
    write_floats(os, "b", heads[h]->b);
  }
  return os.str();
}

TrainedModel load_checkpoint_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto next = [&]() {
    if (!std::getline(in, line))
      throw ParseError("checkpoint: unexpected end of input", line_no);
    ++line_no;
    return std::istringstream(line);
  };

  {
    std::istringstream ls = next();
    std::string magic;
    int version = 0;
    if (!(ls >> magic >> version) || magic != "atf-checkpoint")
      throw ParseError("checkpoint: missing header", line_no);
    if (version != 1)
      throw ParseError("checkpoint: unsupported version", line_no);
  }

  // Label-space block + scalar fields up to (excluding) the mu row.
  std::string header_block;
  std::string mu_line;
  for (;;) {
    std::istringstream ls = next();
    std::string key;
    ls >> key;
    if (key == "mu") {
      mu_line = line;
      break;
    }
    header_block += line;
    header_block += '\n';
  }
  ConfigText header = ConfigText::parse_string(header_block);

  TrainedModel m;
  m.space = label_space_from_config(header);
  {
    char fp[32];
    std::snprintf(fp, sizeof(fp), "%016llx",
                  static_cast<unsigned long long>(m.space.fingerprint()));
    if (header.get_string("space_fingerprint") != fp)
      throw std::runtime_error(
          "checkpoint: label-space fingerprint mismatch (corrupt file?)");
  }
  m.kernel.sigma = header.get_double("sigma");
  m.kernel.kernel_weight = header.get_double("kernel_weight");
  {
    auto rows = header.get_rows("term_weights");
    if (rows.size() != 1 || rows[0].size() != 4)
      throw std::runtime_error("checkpoint: bad term_weights row");
    m.weights.op = parse_double(rows[0][0]);
    m.weights.ap = parse_double(rows[0][1]);
    m.weights.os = parse_double(rows[0][2]);
    m.weights.coap = parse_double(rows[0][3]);
  }
  m.variant = model_variant_from_string(header.get_string("variant"));
  int feature_dim = static_cast<int>(header.get_int("feature_dim"));

  ProviderVariant pv = m.variant == ModelVariant::NoStructure
                           ? ProviderVariant::IndependentUnaries
                           : ProviderVariant::Joint;
  m.provider = PotentialProvider(m.space, feature_dim, pv);

  {
    std::istringstream ls(mu_line);
    ++line_no;
    std::size_t n = static_cast<std::size_t>(m.space.n_object()) *
                    m.space.n_object();
    m.mu = Table2D(m.space.n_object(), m.space.n_object());
    m.mu.values() = read_floats(ls, "mu", n, line_no);
  }

  std::vector<std::string> names = PotentialProvider::head_names(pv);
  std::vector<LinearHead*> heads = m.provider.heads();
  for (std::size_t h = 0; h < heads.size(); ++h) {
    std::istringstream ls = next();
    std::string key, name;
    std::size_t rows = 0, cols = 0;
    if (!(ls >> key >> name >> rows >> cols) || key != "head")
      throw ParseError("checkpoint: expected head line", line_no);
    if (name != names[h] || rows != heads[h]->rows || cols != heads[h]->cols)
      throw ParseError("checkpoint: head '" + name + "' shape mismatch",
                       line_no);
    std::istringstream ws = next();
    heads[h]->w = read_floats(ws, "w", rows * cols, line_no);
    std::istringstream bs = next();
    heads[h]->b = read_floats(bs, "b", rows, line_no);
  }
  return m;
}

void save_checkpoint(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << save_checkpoint_string(model);
}

TrainedModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return load_checkpoint_string(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

void check_space_match(const TrainedModel& model, const Dataset& ds) {
  if (model.space.fingerprint() != ds.space.fingerprint())
    throw std::runtime_error(
        "label-space mismatch between checkpoint and dataset");
}

}  // namespace atf
