#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ringrep {

// Bit layout: bit 0 = x component, bit 1 = z component. Y is (1,1).
enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

char to_char(Pauli p);
Pauli pauli_from_char(char c);

inline bool x_bit(Pauli p) { return (static_cast<unsigned>(p) & 1u) != 0; }
inline bool z_bit(Pauli p) { return (static_cast<unsigned>(p) & 2u) != 0; }
inline Pauli make_pauli(bool x, bool z) {
  return static_cast<Pauli>((x ? 1u : 0u) | (z ? 2u : 0u));
}
inline bool anticommute(Pauli a, Pauli b) {
  return ((x_bit(a) && z_bit(b)) != (z_bit(a) && x_bit(b)));
}
// Product up to phase.
inline Pauli mul_nophase(Pauli a, Pauli b) {
  return static_cast<Pauli>(static_cast<unsigned>(a) ^ static_cast<unsigned>(b));
}

// Pauli operator i^phase * (tensor of single-qubit Paulis), stored as packed bit rows.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n);

  // Accepts an optional sign prefix ("+", "-", "i", "-i") followed by I/X/Y/Z or '_' characters.
  static PauliString parse(std::string_view text);
  static PauliString single(std::size_t n, std::size_t q, Pauli p);

  std::size_t size() const { return n_; }
  std::size_t words() const { return x_.size(); }

  Pauli get(std::size_t q) const;
  void set(std::size_t q, Pauli p);

  int phase() const { return phase_; }
  void set_phase(int k) { phase_ = ((k % 4) + 4) % 4; }
  bool hermitian() const { return (phase_ & 1) == 0; }
  int sign() const { return phase_ == 0 ? 1 : -1; }

  PauliString& operator*=(const PauliString& rhs);
  friend PauliString operator*(PauliString lhs, const PauliString& rhs) {
    lhs *= rhs;
    return lhs;
  }

  bool commutes(const PauliString& other) const;
  std::size_t weight() const;
  bool is_identity_up_to_phase() const;
  bool same_support_ops(const PauliString& other) const { return x_ == other.x_ && z_ == other.z_; }

  std::string str() const;

  const std::vector<std::uint64_t>& xs() const { return x_; }
  const std::vector<std::uint64_t>& zs() const { return z_; }
  std::vector<std::uint64_t>& xs() { return x_; }
  std::vector<std::uint64_t>& zs() { return z_; }

  bool operator==(const PauliString& o) const {
    return n_ == o.n_ && phase_ == o.phase_ && x_ == o.x_ && z_ == o.z_;
  }

 private:
  std::size_t n_ = 0;
  int phase_ = 0;
  std::vector<std::uint64_t> x_;
  std::vector<std::uint64_t> z_;
};

// Phase exponent (power of i) picked up by sigma(x1,z1) * sigma(x2,z2) over packed words.
int product_phase(const std::uint64_t* x1, const std::uint64_t* z1, const std::uint64_t* x2,
                  const std::uint64_t* z2, std::size_t words);

}  // namespace ringrep
