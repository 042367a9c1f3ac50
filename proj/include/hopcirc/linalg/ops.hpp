#pragma once

#include "hopcirc/linalg/matrix.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace hopcirc {

namespace detail {

inline void require_same_precision(const FpMatrix& a, const FpMatrix& b, const char* op) {
  if (a.precision() != b.precision()) {
    throw std::invalid_argument(std::string(op) + ": precision mismatch");
  }
}

inline void require_positive(const FpNum& beta, const char* op) {
  if (beta.m <= 0) throw std::invalid_argument(std::string(op) + ": beta must be positive");
}

}  // namespace detail

inline FpMatrix transpose(const FpMatrix& a) {
  FpMatrix out(a.cols(), a.rows(), a.precision());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

/// Each entry: one rounding per product, one for the whole inner-product sum.
inline FpMatrix matmul(const FpMatrix& a, const FpMatrix& b, FpFlags* flags = nullptr) {
  detail::require_same_precision(a, b, "matmul");
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: shape mismatch " + shape_string(a) + " * " +
                                shape_string(b));
  }
  const int p = a.precision();
  FpMatrix out(a.rows(), b.cols(), p);
  std::vector<FpNum> terms(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      for (std::size_t k = 0; k < a.cols(); ++k) terms[k] = fp_mul(a(i, k), b(k, j), flags);
      out(i, j) = iter_add(terms, p, flags);
    }
  }
  return out;
}

/// Entrywise fp_add.
inline FpMatrix add(const FpMatrix& a, const FpMatrix& b, FpFlags* flags = nullptr) {
  detail::require_same_precision(a, b, "add");
  if (!a.same_shape(b)) throw std::invalid_argument("add: shape mismatch");
  FpMatrix out(a.rows(), a.cols(), a.precision());
  for (std::size_t k = 0; k < a.size(); ++k) {
    out.entries()[k] = fp_add(a.entries()[k], b.entries()[k], flags);
  }
  return out;
}

/// Adds the column vector `bias` (cols x 1) to every row of `a`.
inline FpMatrix add_row_bias(const FpMatrix& a, const FpMatrix& bias, FpFlags* flags = nullptr) {
  detail::require_same_precision(a, bias, "add_row_bias");
  if (bias.cols() != 1 || bias.rows() != a.cols()) {
    throw std::invalid_argument("add_row_bias: bias must be " + std::to_string(a.cols()) + "x1");
  }
  FpMatrix out(a.rows(), a.cols(), a.precision());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = fp_add(a(i, j), bias(j, 0), flags);
  }
  return out;
}

/// Entrywise fp_mul by a scalar.
inline FpMatrix scale(const FpNum& s, const FpMatrix& a, FpFlags* flags = nullptr) {
  FpMatrix out(a.rows(), a.cols(), a.precision());
  for (std::size_t k = 0; k < a.size(); ++k) out.entries()[k] = fp_mul(s, a.entries()[k], flags);
  return out;
}

inline FpMatrix relu(const FpMatrix& a) {
  FpMatrix out(a.rows(), a.cols(), a.precision());
  const FpNum zero = FpNum::zero(a.precision());
  for (std::size_t k = 0; k < a.size(); ++k) out.entries()[k] = fp_max(zero, a.entries()[k]);
  return out;
}

/// Row i: fp_exp(beta * M_ij) / iter_add(row i). No max shift.
inline FpMatrix softmax_rows(const FpMatrix& m, const FpNum& beta, FpFlags* flags = nullptr) {
  detail::require_positive(beta, "softmax_rows");
  const int p = m.precision();
  if (beta.p != p) throw std::invalid_argument("softmax_rows: precision mismatch");
  FpMatrix out(m.rows(), m.cols(), p);
  std::vector<FpNum> row(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) row[j] = fp_exp(fp_mul(beta, m(i, j), flags), flags);
    const FpNum sum = iter_add(row, p, flags);
    if (sum.is_zero()) throw std::domain_error("softmax_rows: row " + std::to_string(i) + " sums to zero");
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = fp_div(row[j], sum, flags);
  }
  return out;
}

/// Column-wise counterpart of softmax_rows.
inline FpMatrix softmax_cols(const FpMatrix& m, const FpNum& beta, FpFlags* flags = nullptr) {
  detail::require_positive(beta, "softmax_cols");
  const int p = m.precision();
  if (beta.p != p) throw std::invalid_argument("softmax_cols: precision mismatch");
  FpMatrix out(m.rows(), m.cols(), p);
  std::vector<FpNum> col(m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) col[i] = fp_exp(fp_mul(beta, m(i, j), flags), flags);
    const FpNum sum = iter_add(col, p, flags);
    if (sum.is_zero()) throw std::domain_error("softmax_cols: column " + std::to_string(j) + " sums to zero");
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) = fp_div(col[i], sum, flags);
  }
  return out;
}

using ExtFloat = boost::multiprecision::cpp_bin_float_100;

inline ExtFloat to_ext(const FpNum& x) {
  return ldexp(ExtFloat(x.m), static_cast<int>(x.e));
}

/// Rounds an extended-precision value to F_p (via its exact binary expansion).
inline FpNum from_ext(const ExtFloat& v, int p, FpFlags* flags = nullptr) {
  if (v == 0) return FpNum::zero(p);
  int exp = 0;
  const ExtFloat frac = frexp(v, &exp);
  constexpr int bits = 340;  // covers the ~332-bit significand
  const BigInt mant = static_cast<BigInt>(ldexp(frac, bits));
  return round_integer(mant, static_cast<std::int64_t>(exp) - bits, p, flags);
}

/// log(sum_mu exp(beta z_mu)) / beta for a column vector z, evaluated in
/// ~330-bit arithmetic and rounded once.
inline FpNum lse(const FpNum& beta, const FpMatrix& z, FpFlags* flags = nullptr) {
  detail::require_positive(beta, "lse");
  if (z.cols() != 1 || z.rows() == 0) throw std::invalid_argument("lse: z must be a nonempty column");
  const ExtFloat b = to_ext(beta);
  ExtFloat top = b * to_ext(z(0, 0));
  for (const FpNum& x : z.entries()) top = std::max(top, ExtFloat(b * to_ext(x)));
  ExtFloat sum = 0;
  for (const FpNum& x : z.entries()) sum += exp(b * to_ext(x) - top);
  return from_ext((top + log(sum)) / b, z.precision(), flags);
}

}  // namespace hopcirc
