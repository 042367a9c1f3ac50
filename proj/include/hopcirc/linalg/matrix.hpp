#pragma once

#include "hopcirc/fp.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace hopcirc {

/// Dense row-major matrix of FpNum sharing one precision.
class FpMatrix {
 public:
  FpMatrix() = default;
  FpMatrix(std::size_t rows, std::size_t cols, int p)
      : rows_(rows), cols_(cols), p_(p), entries_(rows * cols, FpNum::zero(p)) {
    check_precision(p);
  }
  FpMatrix(std::size_t rows, std::size_t cols, int p, std::vector<FpNum> entries)
      : rows_(rows), cols_(cols), p_(p), entries_(std::move(entries)) {
    check_precision(p);
    if (entries_.size() != rows * cols) throw std::invalid_argument("FpMatrix: entry count");
    for (const FpNum& x : entries_) {
      if (x.p != p || !is_valid(x)) throw std::invalid_argument("FpMatrix: bad entry");
    }
  }

  static FpMatrix identity(std::size_t n, int p) {
    FpMatrix out(n, n, p);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = FpNum::one(p);
    return out;
  }

  // Rounds each double to F_p.
  static FpMatrix from_doubles(std::size_t rows, std::size_t cols, int p,
                               const std::vector<double>& values) {
    if (values.size() != rows * cols) throw std::invalid_argument("from_doubles: size");
    FpMatrix out(rows, cols, p);
    for (std::size_t k = 0; k < values.size(); ++k) out.entries_[k] = from_double(values[k], p);
    return out;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int precision() const { return p_; }
  std::size_t size() const { return entries_.size(); }

  FpNum& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const FpNum& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  const std::vector<FpNum>& entries() const { return entries_; }
  std::vector<FpNum>& entries() { return entries_; }

  std::vector<FpNum> row(std::size_t i) const {
    return {entries_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
            entries_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
  }
  std::vector<FpNum> col(std::size_t j) const {
    std::vector<FpNum> out;
    out.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out.push_back((*this)(i, j));
    return out;
  }

  bool same_shape(const FpMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  std::vector<double> to_doubles() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const FpNum& x : entries_) out.push_back(to_double(x));
    return out;
  }

  friend bool operator==(const FpMatrix&, const FpMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  int p_ = min_precision;
  std::vector<FpNum> entries_;
};

inline std::string shape_string(const FpMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

// Fixture format: "rows cols p" then row-major "m:e" pairs.

inline void write_fixture(std::ostream& os, const FpMatrix& a) {
  os << a.rows() << ' ' << a.cols() << ' ' << a.precision() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) os << ' ';
      os << a(i, j).m << ':' << a(i, j).e;
    }
    os << '\n';
  }
}

inline std::string to_fixture(const FpMatrix& a) {
  std::ostringstream os;
  write_fixture(os, a);
  return os.str();
}

inline FpMatrix read_fixture(std::istream& is) {
  std::size_t rows = 0, cols = 0;
  int p = 0;
  if (!(is >> rows >> cols >> p)) throw std::invalid_argument("fixture: missing header");
  std::vector<FpNum> entries;
  entries.reserve(rows * cols);
  for (std::size_t k = 0; k < rows * cols; ++k) {
    std::string tok;
    if (!(is >> tok)) throw std::invalid_argument("fixture: too few entries");
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("fixture: bad entry '" + tok + "'");
    try {
      entries.push_back(make_fp(std::stoll(tok.substr(0, colon)), std::stoll(tok.substr(colon + 1)), p));
    } catch (const std::logic_error& ex) {
      throw std::invalid_argument("fixture: bad entry '" + tok + "': " + ex.what());
    }
  }
  return FpMatrix(rows, cols, p, std::move(entries));
}

inline FpMatrix parse_fixture(const std::string& text) {
  std::istringstream is(text);
  return read_fixture(is);
}

inline FpMatrix load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture " + path);
  return read_fixture(in);
}

}  // namespace hopcirc
