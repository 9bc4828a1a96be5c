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

#include "qav/stabilizer.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <utility>

namespace qav::stabilizer {

namespace {

constexpr Word bit_of(std::size_t i) { return Word{1} << (i % 64); }

// Phase exponent (mod 4) contributed by multiplying Pauli (x1, z1) onto
// (x2, z2), as in the CHP rowsum.
int pauli_g(bool x1, bool z1, bool x2, bool z2) {
  if (!x1 && !z1) return 0;
  if (x1 && z1) return static_cast<int>(z2) - static_cast<int>(x2);
  if (x1) return static_cast<int>(z2) * (2 * static_cast<int>(x2) - 1);
  return static_cast<int>(x2) * (1 - 2 * static_cast<int>(z2));
}

// Dense Pauli with a sign, used for the (rare) deterministic-measurement and
// expectation paths.
struct PauliRow {
  std::vector<bool> x;
  std::vector<bool> z;
  int phase = 0;  // exponent of i, always even for Hermitian products

  explicit PauliRow(std::size_t n) : x(n, false), z(n, false) {}

  void multiply(const std::vector<bool>& ox, const std::vector<bool>& oz, bool sign) {
    int sum = phase + (sign ? 2 : 0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      sum += pauli_g(ox[j], oz[j], x[j], z[j]);
      x[j] = x[j] != ox[j];
      z[j] = z[j] != oz[j];
    }
    phase = ((sum % 4) + 4) % 4;
  }
};

}  // namespace

Tableau::Tableau(std::size_t n)
    : n_(n), w_(gf2::words_for(2 * n)), x_(n * w_, 0), z_(n * w_, 0), r_(w_, 0) {
  if (n == 0) throw std::invalid_argument("Tableau: need at least one qubit");
  for (std::size_t i = 0; i < n; ++i) {
    xcol(i)[i / 64] |= bit_of(i);
    zcol(i)[(n + i) / 64] |= bit_of(n + i);
  }
}

void Tableau::check(std::size_t q) const {
  if (q >= n_) throw std::out_of_range("Tableau: qubit index out of range");
}

void Tableau::h(std::size_t q) {
  check(q);
  Word* x = xcol(q);
  Word* z = zcol(q);
  for (std::size_t k = 0; k < w_; ++k) {
    r_[k] ^= x[k] & z[k];
    std::swap(x[k], z[k]);
  }
}

void Tableau::x(std::size_t q) {
  check(q);
  const Word* zq = zcol(q);
  for (std::size_t k = 0; k < w_; ++k) r_[k] ^= zq[k];
}

void Tableau::z(std::size_t q) {
  check(q);
  const Word* xq = xcol(q);
  for (std::size_t k = 0; k < w_; ++k) r_[k] ^= xq[k];
}

void Tableau::cnot(std::size_t c, std::size_t t) {
  check(c);
  check(t);
  if (c == t) throw std::invalid_argument("Tableau::cnot: overlapping sites");
  Word* xc = xcol(c);
  Word* zc = zcol(c);
  Word* xt = xcol(t);
  Word* zt = zcol(t);
  for (std::size_t k = 0; k < w_; ++k) {
    r_[k] ^= xc[k] & zt[k] & ~(xt[k] ^ zc[k]);
    xt[k] ^= xc[k];
    zc[k] ^= zt[k];
  }
}

void Tableau::cz(std::size_t a, std::size_t b) {
  check(a);
  check(b);
  if (a == b) throw std::invalid_argument("Tableau::cz: overlapping sites");
  Word* xa = xcol(a);
  Word* za = zcol(a);
  Word* xb = xcol(b);
  Word* zb = zcol(b);
  for (std::size_t k = 0; k < w_; ++k) {
    r_[k] ^= xa[k] & xb[k] & (za[k] ^ zb[k]);
    za[k] ^= xb[k];
    zb[k] ^= xa[k];
  }
}

void Tableau::cnn(std::size_t c, std::size_t a, std::size_t b) {
  if (a == b) throw std::invalid_argument("Tableau::cnn: overlapping sites");
  cnot(c, a);
  cnot(c, b);
}

void Tableau::rowsum_masked(const std::vector<Word>& mask, std::size_t p) {
  // Every row h in `mask` becomes row_p * row_h. Phases are accumulated as
  // two-bit counters per row, 64 rows per word.
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < w_; ++k) {
    if (mask[k] != 0) active.push_back(k);
  }
  std::vector<Word> c0(w_, 0);
  std::vector<Word> c1(w_, 0);
  const std::size_t pw = p / 64;
  const Word pb = bit_of(p);
  for (std::size_t j = 0; j < n_; ++j) {
    Word* xj = xcol(j);
    Word* zj = zcol(j);
    const bool xp = (xj[pw] & pb) != 0;
    const bool zp = (zj[pw] & pb) != 0;
    if (!xp && !zp) continue;
    for (std::size_t k : active) {
      const Word m = mask[k];
      const Word x = xj[k];
      const Word z = zj[k];
      Word plus;
      Word minus;
      if (xp && !zp) {
        plus = z & x;
        minus = z & ~x;
      } else if (xp) {
        plus = z & ~x;
        minus = x & ~z;
      } else {
        plus = x & ~z;
        minus = x & z;
      }
      plus &= m;
      minus &= m;
      // +1
      c1[k] ^= c0[k] & plus;
      c0[k] ^= plus;
      // -1
      c1[k] ^= ~c0[k] & minus;
      c0[k] ^= minus;
      if (xp) xj[k] ^= m;
      if (zp) zj[k] ^= m;
    }
  }
  const Word rp = rbit(p) ? ~Word{0} : Word{0};
  for (std::size_t k : active) r_[k] ^= (c1[k] ^ rp) & mask[k];
}

bool Tableau::is_deterministic_z(std::size_t q) const {
  check(q);
  const Word* x = xcol(q);
  for (std::size_t row = n_; row < 2 * n_; ++row) {
    if ((x[row / 64] >> (row % 64)) & 1U) return false;
  }
  return true;
}

int Tableau::measure_z(std::size_t q, int forced) {
  check(q);
  const Word* xq = xcol(q);
  std::size_t p = gf2::kNpos;
  for (std::size_t k = n_ / 64; k < w_ && p == gf2::kNpos; ++k) {
    Word word = xq[k];
    if (k == n_ / 64) word &= ~Word{0} << (n_ % 64);
    if (word != 0) p = k * 64 + static_cast<std::size_t>(std::countr_zero(word));
  }
  if (p != gf2::kNpos && p < 2 * n_) {
    std::vector<Word> mask(xq, xq + w_);
    mask[p / 64] &= ~bit_of(p);
    rowsum_masked(mask, p);
    const std::size_t d = p - n_;
    for (std::size_t j = 0; j < n_; ++j) {
      Word* xj = xcol(j);
      Word* zj = zcol(j);
      const bool xb = xbit(j, p);
      const bool zb = zbit(j, p);
      xj[d / 64] = (xj[d / 64] & ~bit_of(d)) | (xb ? bit_of(d) : 0);
      zj[d / 64] = (zj[d / 64] & ~bit_of(d)) | (zb ? bit_of(d) : 0);
      xj[p / 64] &= ~bit_of(p);
      zj[p / 64] &= ~bit_of(p);
    }
    r_[d / 64] = (r_[d / 64] & ~bit_of(d)) | (rbit(p) ? bit_of(d) : 0);
    zcol(q)[p / 64] |= bit_of(p);
    r_[p / 64] = (r_[p / 64] & ~bit_of(p)) | (forced != 0 ? bit_of(p) : 0);
    return forced != 0 ? 1 : 0;
  }
  // Deterministic: Z_q is the product of the stabilizers paired with the
  // destabilizers that anticommute with it.
  PauliRow acc(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (!xbit(q, i)) continue;
    std::vector<bool> ox(n_);
    std::vector<bool> oz(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      ox[j] = xbit(j, n_ + i);
      oz[j] = zbit(j, n_ + i);
    }
    acc.multiply(ox, oz, rbit(n_ + i));
  }
  return acc.phase == 2 ? 1 : 0;
}

void Tableau::composite_measure(std::size_t q) {
  measure_z(q, 0);
  h(q);
}

void Tableau::paired_measure(const circuit::MeasureEvent& event) {
  if (!event.paired()) {
    composite_measure(event.site);
    return;
  }
  measure_z(event.site, 0);
  cnot(event.left, event.right);
  h(event.left);
  cnot(event.left, event.right);
}

void Tableau::measure_z_parity(const BitVec& mask, int outcome) {
  std::vector<std::size_t> sites;
  for (std::size_t i = mask.first_set(); i != gf2::kNpos; i = mask.next_set(i + 1)) sites.push_back(i);
  if (sites.empty()) return;
  const std::size_t last = sites.back();
  sites.pop_back();
  for (std::size_t s : sites) cnot(s, last);
  measure_z(last, outcome);
  for (auto it = sites.rbegin(); it != sites.rend(); ++it) cnot(*it, last);
}

void Tableau::apply(const circuit::Layer& layer) {
  if (const auto* u = std::get_if<circuit::UnitaryLayer>(&layer)) {
    for (const auto& g : u->gates) {
      switch (u->kind) {
        case circuit::GateKind::CNOT: cnot(g.control, g.target); break;
        case circuit::GateKind::CZ: cz(g.control, g.target); break;
        case circuit::GateKind::CNN: cnn(g.control, g.target, g.target2); break;
      }
    }
  } else {
    for (const auto& e : std::get<circuit::MeasureLayer>(layer).events) paired_measure(e);
  }
}

void Tableau::apply(std::span<const circuit::Layer> layers) {
  for (const auto& l : layers) apply(l);
}

int Tableau::expectation(const BitVec& x, const BitVec& z) const {
  // Must commute with every stabilizer; then it equals the product of the
  // stabilizers whose destabilizers anticommute with it.
  auto anticommutes = [&](std::size_t row) {
    bool s = false;
    for (std::size_t j = 0; j < n_; ++j) s ^= (x.get(j) && zbit(j, row)) != (z.get(j) && xbit(j, row));
    return s;
  };
  for (std::size_t i = 0; i < n_; ++i) {
    if (anticommutes(n_ + i)) return 0;
  }
  PauliRow acc(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (!anticommutes(i)) continue;
    std::vector<bool> ox(n_);
    std::vector<bool> oz(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      ox[j] = xbit(j, n_ + i);
      oz[j] = zbit(j, n_ + i);
    }
    acc.multiply(ox, oz, rbit(n_ + i));
  }
  for (std::size_t j = 0; j < n_; ++j) {
    if (acc.x[j] != x.get(j) || acc.z[j] != z.get(j)) throw std::logic_error("Tableau::expectation: inconsistent");
  }
  return acc.phase == 0 ? 1 : -1;
}

BitMatrix Tableau::stabilizers() const {
  BitMatrix m(n_, 2 * n_);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) {
      if (xbit(j, n_ + i)) m.set(i, 2 * j);
      if (zbit(j, n_ + i)) m.set(i, 2 * j + 1);
    }
  }
  return m;
}

BitVec Tableau::stabilizer_signs() const {
  BitVec s(n_);
  for (std::size_t i = 0; i < n_; ++i) s.set(i, rbit(n_ + i));
  return s;
}

Tableau init_plus_x(std::size_t n) {
  Tableau t(n);
  for (std::size_t q = 0; q < n; ++q) t.h(q);
  return t;
}

Tableau init_z2_even(std::size_t n) {
  Tableau t = init_plus_x(n);
  BitVec all(n);
  for (std::size_t i = 0; i < n; ++i) all.set(i);
  t.measure_z_parity(all, 0);
  return t;
}

GraphState::GraphState(std::size_t n) : n_(n), adj_(n, BitVec(n)), lin_(n) {
  if (n == 0) throw std::invalid_argument("GraphState: need at least one qubit");
}

void GraphState::check(std::size_t q) const {
  if (q >= n_) throw std::out_of_range("GraphState: qubit index out of range");
}

void GraphState::cz(std::size_t a, std::size_t b) {
  check(a);
  check(b);
  if (a == b) throw std::invalid_argument("GraphState::cz: overlapping sites");
  adj_[a].flip(b);
  adj_[b].flip(a);
}

void GraphState::cnot(std::size_t c, std::size_t t) {
  check(c);
  check(t);
  if (c == t) throw std::invalid_argument("GraphState::cnot: overlapping sites");
  // psi'(s) = psi(s with s_t ^= s_c): the substitution conjugates the
  // adjacency matrix by the elementary matrix E = 1 + e_t e_c^T.
  if (lin_.get(t) != adj_[t].get(c)) lin_.flip(c);
  adj_[c] ^= adj_[t];
  const BitVec& nt = adj_[t];
  for (std::size_t j = nt.first_set(); j != gf2::kNpos; j = nt.next_set(j + 1)) adj_[j].flip(c);
}

void GraphState::cnn(std::size_t c, std::size_t a, std::size_t b) {
  if (a == b) throw std::invalid_argument("GraphState::cnn: overlapping sites");
  cnot(c, a);
  cnot(c, b);
}

void GraphState::composite_measure(std::size_t q) {
  check(q);
  // psi'(s) = psi(s with s_q = 0).
  BitVec& nq = adj_[q];
  for (std::size_t j = nq.first_set(); j != gf2::kNpos; j = nq.next_set(j + 1)) adj_[j].set(q, false);
  nq.clear();
  lin_.set(q, false);
}

void GraphState::apply(const circuit::Layer& layer) {
  if (const auto* u = std::get_if<circuit::UnitaryLayer>(&layer)) {
    for (const auto& g : u->gates) {
      switch (u->kind) {
        case circuit::GateKind::CNOT: cnot(g.control, g.target); break;
        case circuit::GateKind::CZ: cz(g.control, g.target); break;
        case circuit::GateKind::CNN: cnn(g.control, g.target, g.target2); break;
      }
    }
  } else {
    for (const auto& e : std::get<circuit::MeasureLayer>(layer).events) {
      if (e.paired()) throw std::invalid_argument("GraphState: paired measurements are not supported");
      composite_measure(e.site);
    }
  }
}

void GraphState::apply(std::span<const circuit::Layer> layers) {
  for (const auto& l : layers) apply(l);
}

BitMatrix GraphState::stabilizers() const {
  BitMatrix m(n_, 2 * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    m.set(i, 2 * i);
    const BitVec& ni = adj_[i];
    for (std::size_t j = ni.first_set(); j != gf2::kNpos; j = ni.next_set(j + 1)) m.set(i, 2 * j + 1);
  }
  return m;
}

std::size_t GraphState::entropy(const BitVec& region) const {
  if (region.size() != n_) throw std::invalid_argument("GraphState::entropy: region size mismatch");
  BitVec complement(n_);
  for (std::size_t i = 0; i < n_; ++i) complement.set(i, !region.get(i));
  std::vector<BitVec> rows;
  for (std::size_t i = region.first_set(); i != gf2::kNpos; i = region.next_set(i + 1)) {
    rows.push_back(adj_[i] & complement);
  }
  return gf2::rank2(std::span<const BitVec>(rows));
}

std::size_t entropy(const BitMatrix& generators, const BitVec& region) {
  const std::size_t n = generators.ncols() / 2;
  if (region.size() != n) throw std::invalid_argument("entropy: region size mismatch");
  BitVec cols(2 * n);
  std::size_t size = 0;
  for (std::size_t i = region.first_set(); i != gf2::kNpos; i = region.next_set(i + 1)) {
    cols.set(2 * i);
    cols.set(2 * i + 1);
    ++size;
  }
  std::vector<BitVec> rows;
  rows.reserve(generators.nrows());
  for (const auto& r : generators.rows()) rows.push_back(r & cols);
  return gf2::rank2(std::span<const BitVec>(rows)) - size;
}

std::size_t entropy(const Tableau& t, const BitVec& region) { return entropy(t.stabilizers(), region); }

BitMatrix select_sites(const BitMatrix& generators, std::span<const std::uint32_t> order) {
  BitMatrix out(generators.nrows(), 2 * order.size());
  for (std::size_t r = 0; r < generators.nrows(); ++r) {
    const BitVec& src = generators.row(r);
    BitVec& dst = out.row(r);
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t s = order[k];
      if (src.get(2 * s)) dst.set(2 * k);
      if (src.get(2 * s + 1)) dst.set(2 * k + 1);
    }
  }
  return out;
}

std::vector<std::size_t> prefix_ranks(const BitMatrix& m) {
  std::vector<BitVec> rows = m.rows();
  const std::size_t sites = m.ncols() / 2;
  std::vector<std::size_t> out(sites + 1, 0);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m.ncols(); ++c) {
    std::size_t pivot = gf2::kNpos;
    for (std::size_t r = rank; r < rows.size(); ++r) {
      if (rows[r].get(c)) {
        pivot = r;
        break;
      }
    }
    if (pivot != gf2::kNpos) {
      std::swap(rows[rank], rows[pivot]);
      const BitVec& pr = rows[rank];
      for (std::size_t r = pivot + 1; r < rows.size(); ++r) {
        if (rows[r].get(c)) rows[r] ^= pr;
      }
      ++rank;
    }
    if (c % 2 == 1) out[c / 2 + 1] = rank;
  }
  return out;
}

std::vector<std::size_t> prefix_entropies(const BitMatrix& generators, std::span<const std::uint32_t> order) {
  if (generators.nrows() * 2 != generators.ncols()) {
    throw std::invalid_argument("prefix_entropies: expects a pure state");
  }
  const std::vector<std::size_t> ranks = prefix_ranks(select_sites(generators, order));
  std::vector<std::size_t> s(ranks.size());
  for (std::size_t k = 0; k < ranks.size(); ++k) s[k] = ranks[k] - k;
  return s;
}

std::vector<std::uint32_t> ring_order(std::size_t length, std::size_t start) {
  std::vector<std::uint32_t> order(length);
  for (std::size_t k = 0; k < length; ++k) order[k] = static_cast<std::uint32_t>((start + k) % length);
  return order;
}

PurificationCuts::PurificationCuts(const BitMatrix& generators, std::size_t L) : L_(L) {
  if (generators.ncols() != 4 * L || generators.nrows() != 2 * L) {
    throw std::invalid_argument("PurificationCuts: expects a pure state on 2L qubits");
  }
  // Eliminate on the R columns; pivot rows carry R support, the rest span the
  // subgroup supported on Q.
  std::vector<BitVec> rows = generators.rows();
  std::size_t rank = 0;
  for (std::size_t c = 2 * L; c < 4 * L; ++c) {
    std::size_t pivot = gf2::kNpos;
    for (std::size_t r = rank; r < rows.size(); ++r) {
      if (rows[r].get(c)) {
        pivot = r;
        break;
      }
    }
    if (pivot == gf2::kNpos) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (rows[r].get(c)) rows[r] ^= rows[rank];
    }
    ++rank;
  }
  const std::size_t q_dim = rows.size() - rank;
  s_q_ = L - q_dim;
  full_q_ = BitMatrix(rows.size(), 2 * L);
  q_only_ = BitMatrix(q_dim, 2 * L);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    BitVec restricted(2 * L);
    const auto src = rows[r].words();
    auto dst = restricted.words();
    // Q occupies the first 2L columns.
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = src[k];
    if ((2 * L) % 64 != 0) dst[dst.size() - 1] &= (Word{1} << ((2 * L) % 64)) - 1;
    if (r >= rank) q_only_.row(r - rank) = restricted;
    full_q_.row(r) = std::move(restricted);
  }
}

PurificationCuts::Profile PurificationCuts::windows(std::size_t start, std::size_t max_len) const {
  const std::size_t len = std::min(max_len, L_);
  std::vector<std::uint32_t> order = ring_order(L_, start);
  order.resize(len);
  const std::vector<std::size_t> rg = prefix_ranks(select_sites(full_q_, order));
  const std::vector<std::size_t> rz = prefix_ranks(select_sites(q_only_, order));
  Profile p;
  p.s_a.resize(len + 1);
  p.s_b.resize(len + 1);
  p.mutual.resize(len + 1);
  for (std::size_t k = 0; k <= len; ++k) {
    p.s_a[k] = rg[k] - k;
    p.mutual[k] = rg[k] - rz[k];
    p.s_b[k] = p.s_a[k] + s_q_ - p.mutual[k];
  }
  return p;
}

}  // namespace qav::stabilizer
