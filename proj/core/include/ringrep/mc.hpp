#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ringrep/pauli.hpp"
#include "ringrep/ring_code.hpp"

namespace ringrep {

struct TrialConfig {
  RingCodeSpec spec;
  double eta = 1.0;
  double lambda = 0.0;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency; results do not depend on it

  void validate() const;
};

// Success / Error / Detected split a successful fusion (or a transmitted Pauli measurement) by
// its decoded parities: all right and unflagged, some wrong and unflagged, some flagged.
enum class McOutcome : std::uint8_t { Success = 0, Error = 1, Detected = 2, FailX = 3, FailZ = 4, Loss = 5 };
inline constexpr int kMcOutcomes = 6;
const char* mc_outcome_name(McOutcome o);

enum class McMode : std::uint8_t { Fusion, Pauli };

struct EmpiricalStats {
  McMode mode = McMode::Fusion;
  Pauli logical = Pauli::I;  // Pauli mode only
  TrialConfig config;
  std::array<std::uint64_t, kMcOutcomes> counts{};
  // Per parity (fusion: XX, ZZ), unflagged and wrong / flagged, counted over successful trials.
  std::array<std::uint64_t, 2> parity_error{}, parity_detected{};

  std::uint64_t count(McOutcome o) const { return counts[static_cast<std::size_t>(o)]; }
  std::uint64_t total() const;
  // Rates over all trials with binomial standard errors.
  double rate(McOutcome o) const;
  double stderr_of(McOutcome o) const;
  // Success + Error + Detected: fusion success (or transmission).
  std::uint64_t succeeded() const;

  EmpiricalStats& operator+=(const EmpiricalStats& o);
};

void to_json(nlohmann::json& j, const EmpiricalStats& s);
void write_csv_header(std::ostream& os);
void write_csv_rows(std::ostream& os, const EmpiricalStats& s);

// Throws std::length_error when the two rings exceed the qubit budget.
EmpiricalStats simulate_logical_fusion(const TrialConfig& cfg);
EmpiricalStats simulate_pauli_measurement(const TrialConfig& cfg, Pauli logical);

struct EnumConfig {
  McMode mode = McMode::Fusion;
  Pauli logical = Pauli::X;
  RingCodeSpec spec;
  double lambda = 0.0;
  // Unset: loss stays symbolic and the distribution can be evaluated at any eta.
  std::optional<double> eta;
  std::size_t max_leaves = 4'000'000;
};

// Exact outcome distribution: weight of every (outcome, parity flags, kept photons, lost photons).
class ExactDistribution {
 public:
  struct Key {
    std::uint8_t outcome = 0;
    std::uint8_t parity_bits = 0;  // bit 2p = parity p wrong and unflagged, bit 2p+1 = flagged
    std::uint32_t kept = 0, lost = 0;
    auto operator<=>(const Key&) const = default;
  };

  void add(const Key& k, double w) { w_[k] += w; }
  std::size_t branches() const { return branches_; }
  void set_branches(std::size_t b) { branches_ = b; }
  const std::map<Key, double>& terms() const { return w_; }

  double probability(McOutcome o, double eta) const;
  double parity_error(int parity, double eta) const;
  double parity_detected(int parity, double eta) const;
  double total(double eta) const;

 private:
  double weight(const Key& k, double w, double eta) const;
  std::map<Key, double> w_;
  std::size_t branches_ = 0;
};

// Exhaustive enumeration over loss patterns, single-photon Pauli errors (merged into the flips
// they cause) and fusion coins. Throws std::length_error when the state space is too large.
ExactDistribution enumerate_small(const EnumConfig& cfg);

}  // namespace ringrep
