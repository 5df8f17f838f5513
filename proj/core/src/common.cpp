#include "atf/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace atf {

std::string format_double(double x) {
  // %.17g always round-trips IEEE doubles; try shorter forms first so common
  // values print compactly (and identically on every run).
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse_double(std::string_view s) {
  std::string tmp(s);
  char* end = nullptr;
  double v = std::strtod(tmp.c_str(), &end);
  if (end == tmp.c_str() || *end != '\0')
    throw std::invalid_argument("bad float literal: '" + tmp + "'");
  return v;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(),
                     [](double x) { return std::isfinite(x); });
}

void softmax_inplace(std::span<double> logits) {
  if (logits.empty()) throw std::invalid_argument("softmax of empty span");
  if (!all_finite(logits))
    throw std::invalid_argument("softmax input is not finite");
  double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& x : logits) {
    x = std::exp(x - m);
    z += x;
  }
  for (double& x : logits) x /= z;
}

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double z = 0.0;
  for (double x : xs) z += std::exp(x - m);
  return m + std::log(z);
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("l1_distance: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::fabs(a[i] - b[i]);
  return d;
}

}  // namespace atf
