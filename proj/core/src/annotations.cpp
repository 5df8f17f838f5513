#include "atf/annotations.hpp"

#include <sstream>

namespace atf {
namespace {

ActionInterval parse_interval(const std::string& text, int n_category,
                              int line_no) {
  std::istringstream is(text);
  std::string cls, start_tok, end_tok, extra;
  if (!(is >> cls >> start_tok >> end_tok) || (is >> extra))
    throw ParseError("annotation interval needs 'cNNN start end': '" + text +
                         "'",
                     line_no);
  if (cls.size() < 2 || cls[0] != 'c')
    throw ParseError("bad class token '" + cls + "'", line_no);
  ActionInterval iv;
  try {
    std::size_t pos = 0;
    iv.category = std::stoi(cls.substr(1), &pos);
    if (pos != cls.size() - 1) throw std::invalid_argument(cls);
  } catch (const std::exception&) {
    throw ParseError("bad class token '" + cls + "'", line_no);
  }
  if (iv.category < 0 || (n_category > 0 && iv.category >= n_category))
    throw ParseError("class id out of range in '" + cls + "'", line_no);
  try {
    iv.start = parse_double(start_tok);
    iv.end = parse_double(end_tok);
  } catch (const std::exception&) {
    throw ParseError("bad interval bounds in '" + text + "'", line_no);
  }
  if (iv.end < iv.start)
    throw ParseError("inverted interval in '" + text + "'", line_no);
  return iv;
}

}  // namespace

std::vector<VideoAnnotation> parse_annotations(const std::string& text,
                                               int n_category) {
  std::vector<VideoAnnotation> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    std::size_t open = line.find('"');
    if (open == std::string::npos)
      throw ParseError("missing quoted interval field", line_no);
    std::size_t close = line.find('"', open + 1);
    if (close == std::string::npos)
      throw ParseError("unterminated quoted interval field", line_no);

    VideoAnnotation va;
    {
      std::istringstream head(line.substr(0, open));
      if (!(head >> va.video_id))
        throw ParseError("missing video id", line_no);
    }

    std::string field = line.substr(open + 1, close - open - 1);
    std::size_t begin = 0;
    while (begin <= field.size() && !field.empty()) {
      std::size_t semi = field.find(';', begin);
      std::string part = field.substr(
          begin, semi == std::string::npos ? std::string::npos : semi - begin);
      if (part.find_first_not_of(" \t") != std::string::npos)
        va.intervals.push_back(parse_interval(part, n_category, line_no));
      if (semi == std::string::npos) break;
      begin = semi + 1;
    }
    out.push_back(std::move(va));
  }
  return out;
}

int progress_label(double t, double start, double end) {
  if (end < start)
    throw std::invalid_argument("progress_label: inverted interval");
  if (t <= start) return 0;
  if (t >= end) return 2;
  double frac = (t - start) / (end - start);
  int phase = static_cast<int>(frac * 3.0);
  return phase > 2 ? 2 : phase;
}

}  // namespace atf
