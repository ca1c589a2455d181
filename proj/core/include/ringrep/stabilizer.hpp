#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ringrep/pauli.hpp"

namespace ringrep {

using Rng = std::mt19937_64;

// Independent stream for (seed, stream index); used for deterministic partitioned sampling.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

enum class GateKind : std::uint8_t { H, S, Sdg, X, Y, Z, CZ, CX };

struct Gate {
  GateKind kind;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

using Adjacency = std::vector<std::vector<bool>>;

// Aaronson-Gottesman tableau with destabilizers and exact signs.
// Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers.
class StabilizerTableau {
 public:
  struct Result {
    int value;
    bool deterministic;
  };

  explicit StabilizerTableau(std::size_t n = 0);  // |0...0>

  static StabilizerTableau from_graph(const Adjacency& adj);
  // Independent, mutually commuting Hermitian generators; destabilizers are completed internally.
  static StabilizerTableau from_generators(std::vector<PauliString> gens);

  std::size_t num_qubits() const { return n_; }

  void h(std::size_t q);
  void s(std::size_t q);
  void s_dag(std::size_t q);
  void x(std::size_t q);
  void y(std::size_t q);
  void z(std::size_t q);
  void cz(std::size_t a, std::size_t b);
  void cx(std::size_t c, std::size_t t);
  void apply(const Gate& g);
  void apply_pauli(std::size_t q, Pauli p);
  void apply_pauli(const PauliString& p);

  PauliString stabilizer(std::size_t i) const { return row(n_ + i); }
  PauliString destabilizer(std::size_t i) const { return row(i); }
  std::vector<PauliString> stabilizers() const;

  // +1 / -1 when p (Hermitian) is in the stabilizer group up to sign, 0 otherwise.
  int expectation(const PauliString& p) const;

  // Projective measurement of a Hermitian Pauli product. A random outcome may be forced.
  Result measure(const PauliString& p, Rng& rng, std::optional<int> forced = std::nullopt);
  Result measure(std::size_t q, Pauli basis, Rng& rng, std::optional<int> forced = std::nullopt);

  // Discards the qubit by a Z measurement whose result is forgotten.
  void trace_out(std::size_t q, Rng& rng);

  bool is_valid() const;
  // Same stabilizer group; with signed=false only the unsigned group is compared.
  bool same_state(const StabilizerTableau& other, bool signed_compare = true) const;

 private:
  PauliString row(std::size_t r) const;
  bool row_anticommutes(std::size_t r, const PauliString& p) const;
  void rowmul(std::size_t h, std::size_t i);
  std::uint64_t* xr(std::size_t r) { return xs_.data() + r * w_; }
  std::uint64_t* zr(std::size_t r) { return zs_.data() + r * w_; }
  const std::uint64_t* xr(std::size_t r) const { return xs_.data() + r * w_; }
  const std::uint64_t* zr(std::size_t r) const { return zs_.data() + r * w_; }
  bool getx(std::size_t r, std::size_t q) const { return (xr(r)[q >> 6] >> (q & 63)) & 1u; }
  bool getz(std::size_t r, std::size_t q) const { return (zr(r)[q >> 6] >> (q & 63)) & 1u; }
  void check(std::size_t q) const;

  std::size_t n_ = 0;
  std::size_t w_ = 0;
  std::vector<std::uint64_t> xs_;
  std::vector<std::uint64_t> zs_;
  std::vector<std::uint8_t> r_;
};

StabilizerTableau graph_state(const Adjacency& adj);

class PauliFrame {
 public:
  PauliFrame() = default;
  explicit PauliFrame(std::size_t n) : e_(n, Pauli::I) {}
  std::size_t size() const { return e_.size(); }
  Pauli get(std::size_t q) const { return e_[q]; }
  void set(std::size_t q, Pauli p) { e_[q] = p; }
  void apply(std::size_t q, Pauli p) { e_[q] = mul_nophase(e_[q], p); }
  PauliFrame& compose(const PauliFrame& other);
  bool flips(std::size_t q, Pauli basis) const { return anticommute(e_[q], basis); }
  void clear() { std::fill(e_.begin(), e_.end(), Pauli::I); }
  bool operator==(const PauliFrame& o) const { return e_ == o.e_; }

 private:
  std::vector<Pauli> e_;
};

struct MeasurementOutcome {
  enum class Kind : std::uint8_t { Deterministic, Random, Erased };
  Kind kind = Kind::Erased;
  int value = 0;  // reported value including frame flips; 0 when erased
};

MeasurementOutcome measure_pauli(StabilizerTableau& t, std::size_t q, Pauli basis, const PauliFrame& frame,
                                 bool lost, Rng& rng);

struct FusionEvent {
  enum class Kind : std::uint8_t { Success, Failure, Loss };
  Kind kind = Kind::Loss;
  int xx = 0;
  int zz = 0;
  Pauli basis = Pauli::I;
  int parity = 0;
  // A failed linear-optical fusion still detects both photons, so the two single values are kept.
  int value_a = 0;
  int value_b = 0;
};

struct FusionOptions {
  Pauli failure_basis = Pauli::Z;
  std::span<const Gate> rotations = {};  // single-qubit gates on qA/qB applied before the Bell measurement
  std::optional<bool> forced_success;    // fixes the linear-optics coin
};

FusionEvent fuse(StabilizerTableau& t, std::size_t qa, std::size_t qb, const FusionOptions& opt,
                 const PauliFrame& frame, bool lost_a, bool lost_b, Rng& rng);

// Pushes a single-qubit error forward through single-qubit Clifford gates (phase ignored).
Pauli conjugate_forward(Pauli p, std::span<const Gate> gates, std::size_t q);

}  // namespace ringrep
