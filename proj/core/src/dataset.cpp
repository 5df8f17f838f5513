#include "atf/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "atf/common.hpp"
#include "atf/config_text.hpp"

namespace atf {

std::vector<int> Dataset::video_indices(const std::string& split) const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(videos.size()); ++v)
    if (split.empty() || videos[v].split == split) out.push_back(v);
  return out;
}

long Dataset::labeled_frame_count(const std::string& split) const {
  long n = 0;
  for (int v : video_indices(split))
    for (const Frame& f : videos[v].frames)
      if (f.label) ++n;
  return n;
}

void Dataset::validate() const {
  for (const VideoRecord& video : videos) {
    if (video.id.empty() ||
        video.id.find_first_of(" \t\n") != std::string::npos)
      throw std::invalid_argument("dataset: bad video id '" + video.id + "'");
    if (video.gen_intent >= space.n_intent())
      throw std::invalid_argument("dataset: gen_intent out of range in " +
                                  video.id);
    int prev = -1;
    for (const Frame& f : video.frames) {
      if (f.index <= prev)
        throw std::invalid_argument(
            "dataset: frame indices must be strictly increasing in " +
            video.id);
      prev = f.index;
      if (static_cast<int>(f.features.size()) != feature_dim)
        throw std::invalid_argument("dataset: feature size mismatch in " +
                                    video.id);
      if (!all_finite(f.features))
        throw std::invalid_argument("dataset: non-finite features in " +
                                    video.id);
      if (f.label && !space.contains(*f.label))
        throw std::invalid_argument(
            "dataset: label outside support in " + video.id);
    }
  }
}

std::string save_dataset_string(const Dataset& ds) {
  std::ostringstream os;
  os << "atf-dataset 1\n";
  os << "feature_dim " << ds.feature_dim << '\n';
  os << ds.space.serialize();
  for (const VideoRecord& video : ds.videos) {
    os << "video " << video.id << ' ' << video.split << ' '
       << video.frames.size() << ' ';
    if (video.gen_intent >= 0)
      os << video.gen_intent;
    else
      os << '-';
    os << '\n';
    for (const Frame& f : video.frames) {
      os << "frame " << f.index << ' ' << format_double(f.timestamp) << ' ';
      if (f.label)
        os << f.label->category << ' ' << f.label->object << ' '
           << f.label->action << ' ' << f.label->progress << ' '
           << f.label->scene;
      else
        os << '-';
      for (double x : f.features) os << ' ' << format_double(x);
      os << '\n';
    }
  }
  os << "end\n";
  return os.str();
}

Dataset load_dataset_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto next_line = [&](std::istringstream& ls) {
    if (!std::getline(in, line))
      throw ParseError("dataset: unexpected end of input", line_no);
    ++line_no;
    ls.clear();
    ls.str(line);
    return true;
  };

  std::istringstream ls;
  next_line(ls);
  std::string magic;
  int version = 0;
  if (!(ls >> magic >> version) || magic != "atf-dataset")
    throw ParseError("dataset: missing atf-dataset header", line_no);
  if (version != 1)
    throw ParseError("dataset: unsupported version " +
                         std::to_string(version),
                     line_no);

  // Header block: feature_dim + label space, terminated by the first
  // video (or end) line.
  std::string header_block;
  std::string pending;
  for (;;) {
    next_line(ls);
    std::string key;
    ls >> key;
    if (key == "video" || key == "end") {
      pending = line;
      break;
    }
    header_block += line;
    header_block += '\n';
  }
  ConfigText header = ConfigText::parse_string(header_block);
  Dataset ds{label_space_from_config(header),
             static_cast<int>(header.get_int("feature_dim")),
             {}};

  // Video blocks.
  for (;;) {
    std::istringstream vs(pending);
    std::string key;
    vs >> key;
    if (key == "end") break;
    if (key != "video")
      throw ParseError("dataset: expected video or end line", line_no);
    VideoRecord video;
    std::string gen;
    std::size_t n_frames = 0;
    if (!(vs >> video.id >> video.split >> n_frames >> gen))
      throw ParseError("dataset: malformed video line", line_no);
    if (gen != "-") video.gen_intent = std::stoi(gen);
    video.frames.reserve(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
      next_line(ls);
      std::string fkey, first;
      Frame f;
      if (!(ls >> fkey >> f.index >> first) || fkey != "frame")
        throw ParseError("dataset: malformed frame line", line_no);
      f.timestamp = parse_double(first);
      std::string tok;
      if (!(ls >> tok))
        throw ParseError("dataset: truncated frame line", line_no);
      if (tok != "-") {
        FrameAssignment x;
        x.category = std::stoi(tok);
        if (!(ls >> x.object >> x.action >> x.progress >> x.scene))
          throw ParseError("dataset: malformed frame label", line_no);
        f.label = x;
      }
      while (ls >> tok) f.features.push_back(parse_double(tok));
      if (static_cast<int>(f.features.size()) != ds.feature_dim)
        throw ParseError("dataset: feature count mismatch", line_no);
      video.frames.push_back(std::move(f));
    }
    ds.videos.push_back(std::move(video));
    if (!std::getline(in, line))
      throw ParseError("dataset: missing end line", line_no);
    ++line_no;
    pending = line;
  }
  ds.validate();
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  out << save_dataset_string(ds);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return load_dataset_string(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

std::vector<int> sample_equidistant(int length, int n) {
  if (length <= 0 || n <= 0)
    throw std::invalid_argument("sample_equidistant: non-positive argument");
  std::vector<int> out;
  if (n == 1) return {0};
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    double pos = static_cast<double>(i) * (length - 1) / (n - 1);
    int idx = static_cast<int>(std::lround(pos));
    if (out.empty() || idx != out.back()) out.push_back(idx);
  }
  return out;
}

}  // namespace atf
