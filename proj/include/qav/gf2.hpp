// Copyright 2026 The qavolume Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAV_GF2_HPP
#define QAV_GF2_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qav::gf2 {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;
inline constexpr std::size_t kNpos = static_cast<std::size_t>(-1);

constexpr std::size_t words_for(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

/// Bit-packed vector over GF(2). Bits at positions >= size() are kept zero.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t len) : len_(len), words_(words_for(len), 0) {}

  static BitVec unit(std::size_t len, std::size_t i);
  /// Parses "0110" / "•∘" style strings; character 0 is bit 0.
  static BitVec from_string(std::string_view bits);

  std::size_t size() const { return len_; }
  std::size_t num_words() const { return words_.size(); }
  std::span<const Word> words() const { return words_; }
  std::span<Word> words() { return words_; }

  bool get(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
  void set(std::size_t i, bool v = true) {
    const Word m = Word{1} << (i % kWordBits);
    if (v) {
      words_[i / kWordBits] |= m;
    } else {
      words_[i / kWordBits] &= ~m;
    }
  }
  void flip(std::size_t i) { words_[i / kWordBits] ^= Word{1} << (i % kWordBits); }

  bool any() const;
  bool none() const { return !any(); }
  std::size_t popcount() const;
  /// Index of the lowest set bit, or kNpos.
  std::size_t first_set() const;
  /// Index of the lowest set bit at or after `from`, or kNpos.
  std::size_t next_set(std::size_t from) const;

  BitVec& operator^=(const BitVec& other);
  BitVec& operator&=(const BitVec& other);
  BitVec& operator|=(const BitVec& other);
  friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
  friend BitVec operator&(BitVec a, const BitVec& b) { return a &= b; }
  friend bool operator==(const BitVec& a, const BitVec& b) = default;

  /// Inner product mod 2.
  bool dot(const BitVec& other) const;
  /// True when no set bit falls inside `mask`.
  bool disjoint(const BitVec& mask) const;
  void clear();

  std::string to_string() const;

 private:
  std::size_t len_ = 0;
  std::vector<Word> words_;
};

/// Row-major GF(2) matrix; every row has length ncols().
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t nrows, std::size_t ncols);
  BitMatrix(std::size_t ncols, std::vector<BitVec> rows);

  static BitMatrix identity(std::size_t n);
  static BitMatrix from_strings(std::initializer_list<std::string_view> rows);

  std::size_t nrows() const { return rows_.size(); }
  std::size_t ncols() const { return ncols_; }
  const BitVec& row(std::size_t i) const { return rows_[i]; }
  BitVec& row(std::size_t i) { return rows_[i]; }
  const std::vector<BitVec>& rows() const { return rows_; }
  bool get(std::size_t r, std::size_t c) const { return rows_[r].get(c); }
  void set(std::size_t r, std::size_t c, bool v = true) { rows_[r].set(c, v); }

  void append_row(BitVec row);
  BitMatrix transpose() const;

  friend bool operator==(const BitMatrix& a, const BitMatrix& b) = default;

 private:
  std::size_t ncols_ = 0;
  std::vector<BitVec> rows_;
};

/// GF(2) rank. The input is not modified.
std::size_t rank2(const BitMatrix& m);

/// Rank of an arbitrary list of equal-length vectors.
std::size_t rank2(std::span<const BitVec> vectors);

/// Mask of `length` consecutive columns starting at `start`. With `wrap` the
/// range may cross the periodic boundary; without it, it must fit in [0, ncols).
BitVec window_mask(std::size_t ncols, std::size_t start, std::size_t length, bool wrap);

struct KernelRestricted {
  BitMatrix survivors;
  std::size_t eliminated = 0;
};

/// Splits the row space of `m` along the columns in `window`. `eliminated` is
/// the rank of m restricted to the window columns; `survivors` are the
/// nrows - eliminated row combinations with no support on the window. Rows that
/// are zero (or become zero) are retained.
KernelRestricted kernel_restricted(const BitMatrix& m, const BitVec& window);

/// Copy of `m` with the columns of a contiguous window cleared.
BitMatrix zero_window(const BitMatrix& m, std::size_t start, std::size_t length, bool wrap);

/// Rows spanning the right kernel {v : m v = 0}.
BitMatrix kernel_basis(const BitMatrix& m);

/// Incrementally built basis. Insertion reduces against the stored rows in
/// insertion order, so every stored row is zero at the pivots of its
/// predecessors.
class Echelon {
 public:
  explicit Echelon(std::size_t len) : len_(len) {}

  /// Returns true when `v` was independent of the current span.
  bool insert(BitVec v);
  /// Reduces `v` against the basis in place; returns true if it ends nonzero.
  bool reduce(BitVec& v) const;
  std::size_t rank() const { return rows_.size(); }
  std::size_t size() const { return len_; }
  const std::vector<BitVec>& rows() const { return rows_; }
  std::span<const std::size_t> pivots() const { return pivots_; }

 private:
  std::size_t len_;
  std::vector<BitVec> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace qav::gf2

#endif  // QAV_GF2_HPP
