#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <regex>
#include <stdexcept>
#include <string>

namespace hopcirc {

enum class DepthTerm : int { std_op = 0, sum, prod, exp, sqrt, f, unit };

inline constexpr int depth_term_count = 7;

/// Symbolic depth: nonnegative integer coefficients over
/// {d_std, d_⊕, d_⊗, d_exp, d_sqrt, d_f, 1}.
struct DepthExpr {
  std::array<std::int64_t, depth_term_count> c{};

  static DepthExpr of(DepthTerm t, std::int64_t k = 1) {
    DepthExpr d;
    d.c[static_cast<int>(t)] = k;
    return d;
  }
  static DepthExpr std_op(std::int64_t k = 1) { return of(DepthTerm::std_op, k); }
  static DepthExpr sum(std::int64_t k = 1) { return of(DepthTerm::sum, k); }
  static DepthExpr prod(std::int64_t k = 1) { return of(DepthTerm::prod, k); }
  static DepthExpr exp(std::int64_t k = 1) { return of(DepthTerm::exp, k); }
  static DepthExpr sqrt(std::int64_t k = 1) { return of(DepthTerm::sqrt, k); }
  static DepthExpr f(std::int64_t k = 1) { return of(DepthTerm::f, k); }
  static DepthExpr unit(std::int64_t k = 1) { return of(DepthTerm::unit, k); }

  std::int64_t operator[](DepthTerm t) const { return c[static_cast<int>(t)]; }
  bool is_zero() const { return *this == DepthExpr{}; }

  DepthExpr& operator+=(const DepthExpr& o) {
    for (int i = 0; i < depth_term_count; ++i) c[i] += o.c[i];
    return *this;
  }
  friend DepthExpr operator+(DepthExpr a, const DepthExpr& b) { return a += b; }
  friend DepthExpr operator*(std::int64_t k, DepthExpr a) {
    for (auto& x : a.c) x *= k;
    return a;
  }
  friend bool operator==(const DepthExpr&, const DepthExpr&) = default;
};

/// Coefficientwise maximum: the least linear form bounding both.
inline DepthExpr join(const DepthExpr& a, const DepthExpr& b) {
  DepthExpr out;
  for (int i = 0; i < depth_term_count; ++i) out.c[i] = std::max(a.c[i], b.c[i]);
  return out;
}

inline const char* depth_term_name(int i) {
  static const char* names[] = {"d_std", "d_⊕", "d_⊗", "d_exp", "d_sqrt", "d_f", ""};
  return names[i];
}

/// "4d_std + 3d_⊕ + d_exp"; zero prints as "0".
/// Component depth first, then the arithmetic terms, then the constant.
inline std::string to_string(const DepthExpr& d) {
  static constexpr DepthTerm order[] = {DepthTerm::f,   DepthTerm::std_op, DepthTerm::sum, DepthTerm::prod,
                                        DepthTerm::exp, DepthTerm::sqrt,   DepthTerm::unit};
  std::string out;
  for (const DepthTerm t : order) {
    const int i = static_cast<int>(t);
    const std::int64_t k = d.c[i];
    if (k == 0) continue;
    if (!out.empty()) out += " + ";
    const bool constant = i == static_cast<int>(DepthTerm::unit);
    if (k != 1 || constant) out += std::to_string(k);
    out += depth_term_name(i);
  }
  return out.empty() ? "0" : out;
}

/// Inverse of to_string; also accepts d_sum / d_prod and no spaces.
inline DepthExpr parse_depth(const std::string& text) {
  DepthExpr out;
  std::string s;
  for (char ch : text) {
    if (ch != ' ') s += ch;
  }
  if (s == "0") return out;
  static const std::regex term(R"((\d*)(d_std|d_⊕|d_sum|d_⊗|d_prod|d_exp|d_sqrt|d_f)?)");
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t plus = s.find('+', pos);
    const std::string piece = s.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
    std::smatch m;
    if (piece.empty() || !std::regex_match(piece, m, term) || (m[1].length() == 0 && m[2].length() == 0)) {
      throw std::invalid_argument("malformed depth expression '" + text + "'");
    }
    const std::int64_t k = m[1].length() ? std::stoll(m[1].str()) : 1;
    const std::string name = m[2].str();
    DepthTerm t = DepthTerm::unit;
    if (name == "d_std") t = DepthTerm::std_op;
    else if (name == "d_⊕" || name == "d_sum") t = DepthTerm::sum;
    else if (name == "d_⊗" || name == "d_prod") t = DepthTerm::prod;
    else if (name == "d_exp") t = DepthTerm::exp;
    else if (name == "d_sqrt") t = DepthTerm::sqrt;
    else if (name == "d_f") t = DepthTerm::f;
    out.c[static_cast<int>(t)] += k;
    if (plus == std::string::npos) break;
    pos = plus + 1;
  }
  return out;
}

}  // namespace hopcirc
