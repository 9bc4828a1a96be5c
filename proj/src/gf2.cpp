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

#include "qav/gf2.hpp"

#include <algorithm>
#include <stdexcept>

namespace qav::gf2 {

BitVec BitVec::unit(std::size_t len, std::size_t i) {
  BitVec v(len);
  v.set(i);
  return v;
}

BitVec BitVec::from_string(std::string_view bits) {
  // Accepts 0/1 as well as the occupied/empty glyphs (UTF-8 encoded).
  static constexpr std::string_view kOccupied = "\xE2\x80\xA2";
  static constexpr std::string_view kEmpty = "\xE2\x88\x98";
  std::vector<bool> parsed;
  for (std::size_t i = 0; i < bits.size();) {
    if (bits[i] == '0' || bits[i] == '1') {
      parsed.push_back(bits[i] == '1');
      ++i;
    } else if (bits.substr(i, kOccupied.size()) == kOccupied) {
      parsed.push_back(true);
      i += kOccupied.size();
    } else if (bits.substr(i, kEmpty.size()) == kEmpty) {
      parsed.push_back(false);
      i += kEmpty.size();
    } else {
      throw std::invalid_argument("BitVec::from_string: unexpected character");
    }
  }
  BitVec v(parsed.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) v.set(i, parsed[i]);
  return v;
}

bool BitVec::any() const {
  return std::any_of(words_.begin(), words_.end(), [](Word w) { return w != 0; });
}

std::size_t BitVec::popcount() const {
  std::size_t n = 0;
  for (Word w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t BitVec::first_set() const { return next_set(0); }

std::size_t BitVec::next_set(std::size_t from) const {
  if (from >= len_) return kNpos;
  std::size_t wi = from / kWordBits;
  Word w = words_[wi] & (~Word{0} << (from % kWordBits));
  while (true) {
    if (w != 0) return wi * kWordBits + static_cast<std::size_t>(std::countr_zero(w));
    if (++wi == words_.size()) return kNpos;
    w = words_[wi];
  }
}

BitVec& BitVec::operator^=(const BitVec& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

BitVec& BitVec::operator&=(const BitVec& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

BitVec& BitVec::operator|=(const BitVec& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

bool BitVec::dot(const BitVec& other) const {
  Word acc = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & other.words_[i];
  return (std::popcount(acc) & 1) != 0;
}

bool BitVec::disjoint(const BitVec& mask) const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & mask.words_[i]) != 0) return false;
  }
  return true;
}

void BitVec::clear() { std::fill(words_.begin(), words_.end(), Word{0}); }

std::string BitVec::to_string() const {
  std::string s(len_, '0');
  for (std::size_t i = 0; i < len_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

BitMatrix::BitMatrix(std::size_t nrows, std::size_t ncols) : ncols_(ncols), rows_(nrows, BitVec(ncols)) {}

BitMatrix::BitMatrix(std::size_t ncols, std::vector<BitVec> rows) : ncols_(ncols), rows_(std::move(rows)) {
  for (const auto& r : rows_) {
    if (r.size() != ncols_) throw std::invalid_argument("BitMatrix: row length mismatch");
  }
}

BitMatrix BitMatrix::identity(std::size_t n) {
  BitMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i);
  return m;
}

BitMatrix BitMatrix::from_strings(std::initializer_list<std::string_view> rows) {
  std::vector<BitVec> parsed;
  for (auto r : rows) parsed.push_back(BitVec::from_string(r));
  const std::size_t ncols = parsed.empty() ? 0 : parsed.front().size();
  return BitMatrix(ncols, std::move(parsed));
}

void BitMatrix::append_row(BitVec row) {
  if (row.size() != ncols_) throw std::invalid_argument("BitMatrix::append_row: row length mismatch");
  rows_.push_back(std::move(row));
}

BitMatrix BitMatrix::transpose() const {
  BitMatrix t(ncols_, nrows());
  for (std::size_t r = 0; r < nrows(); ++r) {
    const BitVec& row = rows_[r];
    for (std::size_t c = row.first_set(); c != kNpos; c = row.next_set(c + 1)) t.set(c, r);
  }
  return t;
}

namespace {

// In-place forward elimination; returns the rank. Rows are permuted.
std::size_t eliminate(std::vector<BitVec>& rows, std::size_t ncols) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < ncols && rank < rows.size(); ++c) {
    std::size_t pivot = kNpos;
    for (std::size_t r = rank; r < rows.size(); ++r) {
      if (rows[r].get(c)) {
        pivot = r;
        break;
      }
    }
    if (pivot == kNpos) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (rows[r].get(c)) rows[r] ^= rows[rank];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

std::size_t rank2(const BitMatrix& m) {
  std::vector<BitVec> rows = m.rows();
  return eliminate(rows, m.ncols());
}

std::size_t rank2(std::span<const BitVec> vectors) {
  if (vectors.empty()) return 0;
  std::vector<BitVec> rows(vectors.begin(), vectors.end());
  return eliminate(rows, rows.front().size());
}

BitVec window_mask(std::size_t ncols, std::size_t start, std::size_t length, bool wrap) {
  if (length > ncols) throw std::invalid_argument("window longer than the row");
  if (length > 0 && start >= ncols) throw std::invalid_argument("window start out of range");
  if (!wrap && start + length > ncols) throw std::invalid_argument("window crosses the boundary without wrap");
  BitVec mask(ncols);
  for (std::size_t k = 0; k < length; ++k) mask.set((start + k) % ncols);
  return mask;
}

KernelRestricted kernel_restricted(const BitMatrix& m, const BitVec& window) {
  if (window.size() != m.ncols()) throw std::invalid_argument("kernel_restricted: window size mismatch");
  std::vector<BitVec> rows = m.rows();
  std::size_t eliminated = 0;
  for (std::size_t c = window.first_set(); c != kNpos; c = window.next_set(c + 1)) {
    std::size_t pivot = kNpos;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].get(c)) {
        pivot = r;
        break;
      }
    }
    if (pivot == kNpos) continue;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != pivot && rows[r].get(c)) rows[r] ^= rows[pivot];
    }
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(pivot));
    ++eliminated;
  }
  return {BitMatrix(m.ncols(), std::move(rows)), eliminated};
}

BitMatrix zero_window(const BitMatrix& m, std::size_t start, std::size_t length, bool wrap) {
  const BitVec keep_mask = [&] {
    BitVec mask = window_mask(m.ncols(), start, length, wrap);
    BitVec all(m.ncols());
    for (std::size_t i = 0; i < m.ncols(); ++i) all.set(i);
    return all ^ mask;
  }();
  BitMatrix out = m;
  for (std::size_t r = 0; r < out.nrows(); ++r) out.row(r) &= keep_mask;
  return out;
}

BitMatrix kernel_basis(const BitMatrix& m) {
  const std::size_t n = m.ncols();
  std::vector<BitVec> rows = m.rows();
  // Reduced row echelon form.
  std::vector<std::size_t> pivot_cols;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < n && rank < rows.size(); ++c) {
    std::size_t pivot = kNpos;
    for (std::size_t r = rank; r < rows.size(); ++r) {
      if (rows[r].get(c)) {
        pivot = r;
        break;
      }
    }
    if (pivot == kNpos) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r].get(c)) rows[r] ^= rows[rank];
    }
    pivot_cols.push_back(c);
    ++rank;
  }
  std::vector<bool> is_pivot(n, false);
  for (std::size_t c : pivot_cols) is_pivot[c] = true;

  BitMatrix basis(0, n);
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    BitVec v(n);
    v.set(f);
    for (std::size_t k = 0; k < rank; ++k) {
      if (rows[k].get(f)) v.set(pivot_cols[k]);
    }
    basis.append_row(std::move(v));
  }
  return basis;
}

bool Echelon::reduce(BitVec& v) const {
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    if (v.get(pivots_[k])) v ^= rows_[k];
  }
  return v.any();
}

bool Echelon::insert(BitVec v) {
  if (v.size() != len_) throw std::invalid_argument("Echelon::insert: length mismatch");
  if (!reduce(v)) return false;
  pivots_.push_back(v.first_set());
  rows_.push_back(std::move(v));
  return true;
}

}  // namespace qav::gf2
