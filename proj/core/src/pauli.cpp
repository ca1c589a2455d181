#include "ringrep/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace ringrep {

char to_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': case '_': return Pauli::I;
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
    default: throw std::invalid_argument(std::string("not a Pauli character: ") + c);
  }
}

PauliString::PauliString(std::size_t n) : n_(n), x_((n + 63) / 64, 0), z_((n + 63) / 64, 0) {}

PauliString PauliString::single(std::size_t n, std::size_t q, Pauli p) {
  PauliString s(n);
  s.set(q, p);
  return s;
}

PauliString PauliString::parse(std::string_view text) {
  int phase = 0;
  std::size_t pos = 0;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    if (text[pos] == '-') phase = 2;
    ++pos;
  }
  if (pos < text.size() && text[pos] == 'i') {
    phase += 1;
    ++pos;
  }
  PauliString s(text.size() - pos);
  for (std::size_t q = 0; pos < text.size(); ++pos, ++q) s.set(q, pauli_from_char(text[pos]));
  s.set_phase(phase);
  return s;
}

Pauli PauliString::get(std::size_t q) const {
  const std::uint64_t m = std::uint64_t{1} << (q & 63);
  return make_pauli((x_[q >> 6] & m) != 0, (z_[q >> 6] & m) != 0);
}

void PauliString::set(std::size_t q, Pauli p) {
  if (q >= n_) throw std::out_of_range("Pauli index out of range");
  const std::uint64_t m = std::uint64_t{1} << (q & 63);
  if (x_bit(p)) x_[q >> 6] |= m; else x_[q >> 6] &= ~m;
  if (z_bit(p)) z_[q >> 6] |= m; else z_[q >> 6] &= ~m;
}

int product_phase(const std::uint64_t* x1, const std::uint64_t* z1, const std::uint64_t* x2,
                  const std::uint64_t* z2, std::size_t words) {
  int e = 0;
  for (std::size_t w = 0; w < words; ++w) {
    const std::uint64_t X1 = x1[w] & ~z1[w], Y1 = x1[w] & z1[w], Z1 = ~x1[w] & z1[w];
    const std::uint64_t X2 = x2[w] & ~z2[w], Y2 = x2[w] & z2[w], Z2 = ~x2[w] & z2[w];
    const std::uint64_t plus = (X1 & Y2) | (Y1 & Z2) | (Z1 & X2);
    const std::uint64_t minus = (Y1 & X2) | (Z1 & Y2) | (X1 & Z2);
    e += std::popcount(plus) - std::popcount(minus);
  }
  return ((e % 4) + 4) % 4;
}

PauliString& PauliString::operator*=(const PauliString& rhs) {
  if (rhs.n_ != n_) throw std::invalid_argument("Pauli size mismatch");
  phase_ = (phase_ + rhs.phase_ + product_phase(x_.data(), z_.data(), rhs.x_.data(), rhs.z_.data(), x_.size())) % 4;
  for (std::size_t w = 0; w < x_.size(); ++w) {
    x_[w] ^= rhs.x_[w];
    z_[w] ^= rhs.z_[w];
  }
  return *this;
}

bool PauliString::commutes(const PauliString& other) const {
  int c = 0;
  for (std::size_t w = 0; w < x_.size(); ++w)
    c ^= std::popcount((x_[w] & other.z_[w]) ^ (z_[w] & other.x_[w])) & 1;
  return c == 0;
}

std::size_t PauliString::weight() const {
  std::size_t c = 0;
  for (std::size_t w = 0; w < x_.size(); ++w) c += std::popcount(x_[w] | z_[w]);
  return c;
}

bool PauliString::is_identity_up_to_phase() const {
  for (std::size_t w = 0; w < x_.size(); ++w)
    if (x_[w] | z_[w]) return false;
  return true;
}

std::string PauliString::str() const {
  static const char* prefix[4] = {"+", "+i", "-", "-i"};
  std::string s = prefix[phase_];
  s.reserve(n_ + 2);
  for (std::size_t q = 0; q < n_; ++q) s.push_back(to_char(get(q)));
  return s;
}

}  // namespace ringrep
