#include "ringrep/stabilizer.hpp"

#include <bit>
#include <stdexcept>

namespace ringrep {

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5eedu};
  return Rng(seq);
}

StabilizerTableau::StabilizerTableau(std::size_t n)
    : n_(n), w_((n + 63) / 64), xs_(2 * n * w_, 0), zs_(2 * n * w_, 0), r_(2 * n, 0) {
  for (std::size_t q = 0; q < n; ++q) {
    xr(q)[q >> 6] |= std::uint64_t{1} << (q & 63);
    zr(n + q)[q >> 6] |= std::uint64_t{1} << (q & 63);
  }
}

StabilizerTableau StabilizerTableau::from_graph(const Adjacency& adj) {
  const std::size_t n = adj.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (adj[i].size() != n) throw std::invalid_argument("invalid graph: adjacency not square");
    if (adj[i][i]) throw std::invalid_argument("invalid graph: self loop");
    for (std::size_t j = 0; j < i; ++j)
      if (adj[i][j] != adj[j][i]) throw std::invalid_argument("invalid graph: adjacency not symmetric");
  }
  StabilizerTableau t(n);
  std::fill(t.xs_.begin(), t.xs_.end(), 0);
  std::fill(t.zs_.begin(), t.zs_.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    t.zr(i)[i >> 6] |= bit;
    t.xr(n + i)[i >> 6] |= bit;
    for (std::size_t j = 0; j < n; ++j)
      if (adj[i][j]) t.zr(n + i)[j >> 6] |= std::uint64_t{1} << (j & 63);
  }
  return t;
}

StabilizerTableau graph_state(const Adjacency& adj) { return StabilizerTableau::from_graph(adj); }

void StabilizerTableau::check(std::size_t q) const {
  if (q >= n_) throw std::out_of_range("qubit index out of range");
}

PauliString StabilizerTableau::row(std::size_t r) const {
  PauliString p(n_);
  for (std::size_t w = 0; w < w_; ++w) {
    p.xs()[w] = xr(r)[w];
    p.zs()[w] = zr(r)[w];
  }
  p.set_phase(r_[r] ? 2 : 0);
  return p;
}

std::vector<PauliString> StabilizerTableau::stabilizers() const {
  std::vector<PauliString> out;
  out.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) out.push_back(row(n_ + i));
  return out;
}

bool StabilizerTableau::row_anticommutes(std::size_t r, const PauliString& p) const {
  int c = 0;
  const auto* x = xr(r);
  const auto* z = zr(r);
  for (std::size_t w = 0; w < w_; ++w) c ^= std::popcount((x[w] & p.zs()[w]) ^ (z[w] & p.xs()[w])) & 1;
  return c != 0;
}

void StabilizerTableau::rowmul(std::size_t h, std::size_t i) {
  const int e = (2 * r_[h] + 2 * r_[i] + product_phase(xr(h), zr(h), xr(i), zr(i), w_)) % 4;
  r_[h] = (e >> 1) & 1;
  auto* xh = xr(h);
  auto* zh = zr(h);
  const auto* xi = xr(i);
  const auto* zi = zr(i);
  for (std::size_t w = 0; w < w_; ++w) {
    xh[w] ^= xi[w];
    zh[w] ^= zi[w];
  }
}

void StabilizerTableau::h(std::size_t q) {
  check(q);
  const std::size_t w = q >> 6;
  const std::uint64_t m = std::uint64_t{1} << (q & 63);
  for (std::size_t r = 0; r < 2 * n_; ++r) {
    auto& xw = xr(r)[w];
    auto& zw = zr(r)[w];
    const bool xb = xw & m, zb = zw & m;
    r_[r] ^= static_cast<std::uint8_t>(xb && zb);
    if (xb != zb) {
      xw ^= m;
      zw ^= m;
    }
  }
}

void StabilizerTableau::s(std::size_t q) {
  check(q);
  const std::size_t w = q >> 6;
  const std::uint64_t m = std::uint64_t{1} << (q & 63);
  for (std::size_t r = 0; r < 2 * n_; ++r) {
    auto& xw = xr(r)[w];
    auto& zw = zr(r)[w];
    const bool xb = xw & m, zb = zw & m;
    r_[r] ^= static_cast<std::uint8_t>(xb && zb);
    if (xb) zw ^= m;
  }
}

void StabilizerTableau::s_dag(std::size_t q) {
  check(q);
  const std::size_t w = q >> 6;
  const std::uint64_t m = std::uint64_t{1} << (q & 63);
  for (std::size_t r = 0; r < 2 * n_; ++r) {
    auto& xw = xr(r)[w];
    auto& zw = zr(r)[w];
    const bool xb = xw & m, zb = zw & m;
    r_[r] ^= static_cast<std::uint8_t>(xb && !zb);
    if (xb) zw ^= m;
  }
}

void StabilizerTableau::x(std::size_t q) { apply_pauli(q, Pauli::X); }
void StabilizerTableau::y(std::size_t q) { apply_pauli(q, Pauli::Y); }
void StabilizerTableau::z(std::size_t q) { apply_pauli(q, Pauli::Z); }

void StabilizerTableau::apply_pauli(std::size_t q, Pauli p) {
  check(q);
  if (p == Pauli::I) return;
  for (std::size_t r = 0; r < 2 * n_; ++r)
    if (anticommute(make_pauli(getx(r, q), getz(r, q)), p)) r_[r] ^= 1;
}

void StabilizerTableau::apply_pauli(const PauliString& p) {
  for (std::size_t r = 0; r < 2 * n_; ++r)
    if (row_anticommutes(r, p)) r_[r] ^= 1;
}

void StabilizerTableau::cz(std::size_t a, std::size_t b) {
  check(a);
  check(b);
  if (a == b) throw std::invalid_argument("CZ needs distinct qubits");
  const std::size_t wa = a >> 6, wb = b >> 6;
  const std::uint64_t ma = std::uint64_t{1} << (a & 63), mb = std::uint64_t{1} << (b & 63);
  for (std::size_t r = 0; r < 2 * n_; ++r) {
    auto* x = xr(r);
    auto* z = zr(r);
    const bool xa = x[wa] & ma, xb = x[wb] & mb, za = z[wa] & ma, zb = z[wb] & mb;
    r_[r] ^= static_cast<std::uint8_t>(xa && xb && (za != zb));
    if (xb) z[wa] ^= ma;
    if (xa) z[wb] ^= mb;
  }
}

void StabilizerTableau::cx(std::size_t c, std::size_t t) {
  check(c);
  check(t);
  if (c == t) throw std::invalid_argument("CX needs distinct qubits");
  const std::size_t wc = c >> 6, wt = t >> 6;
  const std::uint64_t mc = std::uint64_t{1} << (c & 63), mt = std::uint64_t{1} << (t & 63);
  for (std::size_t r = 0; r < 2 * n_; ++r) {
    auto* x = xr(r);
    auto* z = zr(r);
    const bool xc = x[wc] & mc, xt = x[wt] & mt, zc = z[wc] & mc, zt = z[wt] & mt;
    r_[r] ^= static_cast<std::uint8_t>(xc && zt && (xt == zc));
    if (xc) x[wt] ^= mt;
    if (zt) z[wc] ^= mc;
  }
}

void StabilizerTableau::apply(const Gate& g) {
  switch (g.kind) {
    case GateKind::H: h(g.a); break;
    case GateKind::S: s(g.a); break;
    case GateKind::Sdg: s_dag(g.a); break;
    case GateKind::X: x(g.a); break;
    case GateKind::Y: y(g.a); break;
    case GateKind::Z: z(g.a); break;
    case GateKind::CZ: cz(g.a, g.b); break;
    case GateKind::CX: cx(g.a, g.b); break;
  }
}

int StabilizerTableau::expectation(const PauliString& p) const {
  if (p.size() != n_) throw std::invalid_argument("Pauli size mismatch");
  if (!p.hermitian()) throw std::invalid_argument("expectation needs a Hermitian Pauli");
  for (std::size_t i = 0; i < n_; ++i)
    if (row_anticommutes(n_ + i, p)) return 0;
  std::vector<std::uint64_t> sx(w_, 0), sz(w_, 0);
  int phase = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (!row_anticommutes(i, p)) continue;
    const std::size_t r = n_ + i;
    phase = (phase + 2 * r_[r] + product_phase(sx.data(), sz.data(), xr(r), zr(r), w_)) % 4;
    for (std::size_t w = 0; w < w_; ++w) {
      sx[w] ^= xr(r)[w];
      sz[w] ^= zr(r)[w];
    }
  }
  const int k = ((p.phase() - phase) % 4 + 4) % 4;
  return k == 0 ? 1 : -1;
}

StabilizerTableau::Result StabilizerTableau::measure(const PauliString& p, Rng& rng, std::optional<int> forced) {
  if (p.size() != n_) throw std::invalid_argument("Pauli size mismatch");
  if (!p.hermitian()) throw std::invalid_argument("measurement needs a Hermitian Pauli");
  std::size_t pivot = 2 * n_;
  for (std::size_t i = n_; i < 2 * n_; ++i)
    if (row_anticommutes(i, p)) {
      pivot = i;
      break;
    }
  if (pivot == 2 * n_) return {expectation(p), true};

  for (std::size_t j = 0; j < 2 * n_; ++j)
    if (j != pivot && row_anticommutes(j, p)) rowmul(j, pivot);
  const std::size_t d = pivot - n_;
  std::copy(xr(pivot), xr(pivot) + w_, xr(d));
  std::copy(zr(pivot), zr(pivot) + w_, zr(d));
  r_[d] = r_[pivot];
  std::copy(p.xs().begin(), p.xs().end(), xr(pivot));
  std::copy(p.zs().begin(), p.zs().end(), zr(pivot));
  const int v = forced ? (*forced >= 0 ? 1 : -1) : ((rng() & 1u) ? -1 : 1);
  r_[pivot] = static_cast<std::uint8_t>((v == -1) != (p.phase() == 2));
  return {v, false};
}

StabilizerTableau::Result StabilizerTableau::measure(std::size_t q, Pauli basis, Rng& rng, std::optional<int> forced) {
  check(q);
  if (basis == Pauli::I) throw std::invalid_argument("cannot measure identity");
  return measure(PauliString::single(n_, q, basis), rng, forced);
}

void StabilizerTableau::trace_out(std::size_t q, Rng& rng) { measure(q, Pauli::Z, rng); }

bool StabilizerTableau::is_valid() const {
  for (std::size_t i = 0; i < 2 * n_; ++i) {
    const PauliString a = row(i);
    for (std::size_t j = i + 1; j < 2 * n_; ++j) {
      const bool anti = row_anticommutes(j, a);
      const bool expect_anti = (i < n_ && j == i + n_);
      if (anti != expect_anti) return false;
    }
  }
  return true;
}

bool StabilizerTableau::same_state(const StabilizerTableau& other, bool signed_compare) const {
  if (other.n_ != n_) return false;
  for (std::size_t i = 0; i < n_; ++i) {
    const PauliString s = other.row(n_ + i);
    const int e = expectation(s);
    if (e == 0) return false;
    if (signed_compare && e != 1) return false;
  }
  return true;
}

PauliFrame& PauliFrame::compose(const PauliFrame& other) {
  if (other.e_.size() != e_.size()) throw std::invalid_argument("frame size mismatch");
  for (std::size_t q = 0; q < e_.size(); ++q) e_[q] = mul_nophase(e_[q], other.e_[q]);
  return *this;
}

MeasurementOutcome measure_pauli(StabilizerTableau& t, std::size_t q, Pauli basis, const PauliFrame& frame,
                                 bool lost, Rng& rng) {
  if (q >= t.num_qubits()) throw std::out_of_range("qubit index out of range");
  if (lost) {
    t.trace_out(q, rng);
    return {MeasurementOutcome::Kind::Erased, 0};
  }
  const auto r = t.measure(q, basis, rng);
  const int v = frame.size() > q && frame.flips(q, basis) ? -r.value : r.value;
  return {r.deterministic ? MeasurementOutcome::Kind::Deterministic : MeasurementOutcome::Kind::Random, v};
}

Pauli conjugate_forward(Pauli p, std::span<const Gate> gates, std::size_t q) {
  for (const auto& g : gates) {
    if (g.a != q) continue;
    switch (g.kind) {
      case GateKind::H: p = make_pauli(z_bit(p), x_bit(p)); break;
      case GateKind::S:
      case GateKind::Sdg: p = make_pauli(x_bit(p), z_bit(p) != x_bit(p)); break;
      default: break;
    }
  }
  return p;
}

FusionEvent fuse(StabilizerTableau& t, std::size_t qa, std::size_t qb, const FusionOptions& opt,
                 const PauliFrame& frame, bool lost_a, bool lost_b, Rng& rng) {
  if (qa == qb) throw std::invalid_argument("fusion needs two distinct qubits");
  if (qa >= t.num_qubits() || qb >= t.num_qubits()) throw std::out_of_range("qubit index out of range");
  FusionEvent ev;
  if (lost_a || lost_b) {
    t.trace_out(qa, rng);
    t.trace_out(qb, rng);
    ev.kind = FusionEvent::Kind::Loss;
    return ev;
  }
  for (const auto& g : opt.rotations) {
    if (g.kind == GateKind::CZ || g.kind == GateKind::CX || (g.a != qa && g.a != qb))
      throw std::invalid_argument("fusion rotations must be single-qubit gates on the fused photons");
    t.apply(g);
  }
  const Pauli ea = frame.size() > qa ? conjugate_forward(frame.get(qa), opt.rotations, qa) : Pauli::I;
  const Pauli eb = frame.size() > qb ? conjugate_forward(frame.get(qb), opt.rotations, qb) : Pauli::I;
  const bool success = opt.forced_success ? *opt.forced_success : ((rng() >> 7) & 1u) == 0;
  if (success) {
    // Bell measurement: CX = H_b CZ H_b, then X on a and Z on b read XX and ZZ.
    t.h(qb);
    t.cz(qa, qb);
    t.h(qb);
    const int xx = t.measure(qa, Pauli::X, rng).value;
    const int zz = t.measure(qb, Pauli::Z, rng).value;
    ev.kind = FusionEvent::Kind::Success;
    ev.xx = (anticommute(ea, Pauli::X) != anticommute(eb, Pauli::X)) ? -xx : xx;
    ev.zz = (anticommute(ea, Pauli::Z) != anticommute(eb, Pauli::Z)) ? -zz : zz;
    return ev;
  }
  const Pauli b = opt.failure_basis;
  int va = t.measure(qa, b, rng).value;
  int vb = t.measure(qb, b, rng).value;
  if (anticommute(ea, b)) va = -va;
  if (anticommute(eb, b)) vb = -vb;
  ev.kind = FusionEvent::Kind::Failure;
  ev.basis = b;
  ev.value_a = va;
  ev.value_b = vb;
  ev.parity = va * vb;
  return ev;
}

}  // namespace ringrep

namespace ringrep {

StabilizerTableau StabilizerTableau::from_generators(std::vector<PauliString> gens) {
  const std::size_t n = gens.size();
  for (const auto& g : gens)
    if (g.size() != n || !g.hermitian()) throw std::invalid_argument("generators must be n Hermitian n-qubit Paulis");
  std::vector<PauliString> destab;
  destab.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // gens[i] already commutes with destab[0..i-1], so any single-qubit Pauli anticommuting with it
    // keeps anticommuting after being cleaned against the earlier pairs.
    std::size_t q = 0;
    while (q < n && gens[i].get(q) == Pauli::I) ++q;
    if (q == n) throw std::invalid_argument("generators are dependent");
    PauliString v = PauliString::single(n, q, x_bit(gens[i].get(q)) ? Pauli::Z : Pauli::X);
    for (std::size_t j = 0; j < i; ++j) {
      const bool a_d = !v.commutes(destab[j]);
      const bool a_s = !v.commutes(gens[j]);
      if (a_d) v *= gens[j];
      if (a_s) v *= destab[j];
    }
    v.set_phase(0);
    destab.push_back(v);
    for (std::size_t k = i + 1; k < n; ++k) {
      if (!gens[k].commutes(gens[i])) throw std::invalid_argument("generators do not commute");
      if (!gens[k].commutes(destab[i])) gens[k] *= gens[i];
    }
  }
  StabilizerTableau t(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t w = 0; w < t.w_; ++w) {
      t.xr(i)[w] = destab[i].xs()[w];
      t.zr(i)[w] = destab[i].zs()[w];
      t.xr(n + i)[w] = gens[i].xs()[w];
      t.zr(n + i)[w] = gens[i].zs()[w];
    }
    t.r_[i] = 0;
    t.r_[n + i] = gens[i].phase() == 2 ? 1 : 0;
  }
  if (!t.is_valid()) throw std::invalid_argument("generators do not define a valid stabilizer state");
  return t;
}

}  // namespace ringrep
