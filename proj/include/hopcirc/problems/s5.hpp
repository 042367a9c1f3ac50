#pragma once

#include "hopcirc/util/rng.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>
#include <vector>

namespace hopcirc {

/// Permutation of {1..5} as its image list: x -> img[x - 1].
struct Perm5 {
  std::array<std::uint8_t, 5> img{1, 2, 3, 4, 5};

  static Perm5 identity() { return {}; }
  bool is_identity() const { return *this == identity(); }
  std::uint8_t operator()(std::uint8_t x) const { return img[x - 1]; }
  bool operator==(const Perm5&) const = default;

  bool valid() const {
    std::array<std::uint8_t, 5> s = img;
    std::sort(s.begin(), s.end());
    return s == identity().img;
  }
};

/// `first` applied first, then `second`.
inline Perm5 then(const Perm5& first, const Perm5& second) {
  Perm5 out;
  for (std::uint8_t x = 1; x <= 5; ++x) out.img[x - 1] = second(first(x));
  return out;
}

inline Perm5 inverse(const Perm5& f) {
  Perm5 out;
  for (std::uint8_t x = 1; x <= 5; ++x) out.img[f(x) - 1] = x;
  return out;
}

/// Cycle notation, e.g. "(1 2)"; the identity is "()".
inline Perm5 transposition(std::uint8_t a, std::uint8_t b) {
  Perm5 out;
  std::swap(out.img[a - 1], out.img[b - 1]);
  return out;
}

/// Atomic token: the image list as five digits, e.g. "21345".
inline std::string to_token(const Perm5& f) {
  std::string s;
  for (auto x : f.img) s.push_back(static_cast<char>('0' + x));
  return s;
}

inline Perm5 parse_perm5(const std::string& s) {
  Perm5 f;
  if (s.size() != 5) throw std::invalid_argument("S5 element '" + s + "' must be 5 digits");
  for (std::size_t i = 0; i < 5; ++i) {
    if (s[i] < '1' || s[i] > '5') throw std::invalid_argument("S5 element '" + s + "' has a digit outside 1..5");
    f.img[i] = static_cast<std::uint8_t>(s[i] - '0');
  }
  if (!f.valid()) throw std::invalid_argument("S5 element '" + s + "' is not a permutation");
  return f;
}

/// All 120 elements in lexicographic order of their image lists.
inline const std::vector<Perm5>& s5_elements() {
  static const std::vector<Perm5> all = [] {
    std::vector<Perm5> v;
    Perm5 f;
    do v.push_back(f);
    while (std::next_permutation(f.img.begin(), f.img.end()));
    return v;
  }();
  return all;
}

inline std::size_t s5_index(const Perm5& f) {
  const auto& all = s5_elements();
  return static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), f,
                                                   [](const Perm5& a, const Perm5& b) { return a.img < b.img; }) -
                                  all.begin());
}

inline Perm5 random_perm5(SplitMix64& rng) { return s5_elements()[rng.below(120)]; }

/// f_1 applied first, f_n last.
inline Perm5 compose_word(const std::vector<Perm5>& word) {
  Perm5 acc;
  for (const Perm5& f : word) acc = then(acc, f);
  return acc;
}

/// Same product by halving recursion; the cross-check for compose_word.
inline Perm5 compose_word_balanced(const std::vector<Perm5>& word, std::size_t lo, std::size_t hi) {
  if (hi <= lo) return Perm5::identity();
  if (hi - lo == 1) return word[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return then(compose_word_balanced(word, lo, mid), compose_word_balanced(word, mid, hi));
}

inline bool oracle_s5(const std::vector<Perm5>& word) { return compose_word(word).is_identity(); }

/// A word of `length` elements. Identity words are a random word followed by
/// its inverse word (with one identity element in the middle for odd
/// lengths); other words are uniform, with the last letter redrawn while the
/// product is the identity.
inline std::vector<Perm5> gen_s5_word(std::size_t length, bool make_identity, SplitMix64& rng) {
  if (length == 0) throw std::invalid_argument("gen_s5_word: length must be at least 1");
  std::vector<Perm5> w;
  if (make_identity) {
    const std::size_t half = length / 2;
    for (std::size_t i = 0; i < half; ++i) w.push_back(random_perm5(rng));
    if (length % 2) w.push_back(Perm5::identity());
    for (std::size_t i = half; i-- > 0;) w.push_back(inverse(w[i]));
    return w;
  }
  for (std::size_t i = 0; i < length; ++i) w.push_back(random_perm5(rng));
  while (oracle_s5(w)) w.back() = random_perm5(rng);
  return w;
}

}  // namespace hopcirc
