#pragma once
// Small shared utilities: dense 2-D tables, deterministic float formatting,
// FNV-1a fingerprints and the error types thrown across the library.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace atf {

// Row-major dense table of doubles. Rows and columns are label-domain sizes,
// so tables stay small (tens to a few thousand entries).
class Table2D {
 public:
  Table2D() = default;
  Table2D(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  double& at(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  void fill(double x) { v_.assign(v_.size(), x); }

  friend bool operator==(const Table2D& a, const Table2D& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.v_ == b.v_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> v_;
};

// Thrown when the exact-enumeration state space exceeds the configured budget.
// Carries the offending state count so callers can report it.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, double state_count)
      : std::runtime_error(what), state_count_(state_count) {}
  double state_count() const { return state_count_; }

 private:
  double state_count_;
};

// Thrown by the text parsers; carries a 1-based line number for diagnostics.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Shortest representation that round-trips a double exactly. All persisted
// floats go through this so rewriting a file is byte-stable.
std::string format_double(double x);

// Parse a double; throws std::invalid_argument on trailing garbage.
double parse_double(std::string_view s);

// 64-bit FNV-1a, used for file and label-space fingerprints.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t seed = 1469598103934665603ull);

bool all_finite(std::span<const double> xs);

// In-place softmax with max subtraction; input holds logits, output a
// normalized distribution. Throws std::invalid_argument on non-finite input.
void softmax_inplace(std::span<double> logits);

// log(sum_i exp(x_i)) with max subtraction; -inf for an empty span.
double log_sum_exp(std::span<const double> xs);

double l1_distance(std::span<const double> a, std::span<const double> b);

}  // namespace atf
