#pragma once
// Interval annotation ingestion.
//
// One video per line: a video id, free metadata columns, and one quoted
// field holding semicolon-separated action intervals
//
//   VID1234 subj1 kitchen 1 "c008 11.90 21.20;c110 58.70 66.20" 30.2
//
// Class tokens are 'c' followed by a decimal class number.  An empty quoted
// field means a video without intervals.  All structural problems raise
// ParseError with the offending line number.

#include <string>
#include <vector>

#include "atf/common.hpp"

namespace atf {

struct ActionInterval {
  int category = 0;
  double start = 0.0;  // seconds
  double end = 0.0;
};

struct VideoAnnotation {
  std::string video_id;
  std::vector<ActionInterval> intervals;
};

// n_category > 0 bounds the class ids; 0 disables the check.
std::vector<VideoAnnotation> parse_annotations(const std::string& text,
                                               int n_category = 0);

// Progress phase of a timestamp inside an interval, by thirds of the
// duration: [start, start+d/3) -> 0, [start+d/3, start+2d/3) -> 1, rest -> 2.
// Timestamps at or past the end clamp to 2, at or before the start to 0.
int progress_label(double t, double start, double end);

}  // namespace atf
