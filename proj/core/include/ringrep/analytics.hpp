#pragma once

#include <array>
#include <vector>

#include <nlohmann/json.hpp>

#include "ringrep/strategy.hpp"

namespace ringrep {

// Depth counts ring layers: depth 0 is a bare physical fusion (or a single photon), depth 1 the
// four-qubit ring, depth d a ring whose code qubits are depth d-1 rings.

struct FusionDistribution {
  double p_s = 0, p_x = 0, p_y = 0, p_z = 0, p_l = 0;
  // Depth 0 entries are per-configuration probabilities (the failure basis is chosen), so only
  // depths >= 1 sum to one.
  double sum() const { return p_s + p_x + p_y + p_z + p_l; }
};

struct PauliMeasStats {
  double eta_bar = 1, eps = 0, eps_d = 0, zeta = 1;
};

struct ParityStats {
  double eps = 0;    // wrong and not flagged
  double eps_d = 0;  // flagged
};

struct FtFusionStats {
  double p_s = 0, eps = 0, eps_d = 0, zeta = 1;
  double conditional_error() const;  // eps / (eps + zeta)
};

// Class probabilities and error statistics of the implemented adaptive strategy, computed exactly.
struct StrategyFusionStats {
  FusionDistribution classes;
  ParityStats xx, zz;    // conditional on success
  double detected = 0;   // either parity flagged, conditional on success
  double error = 0;      // no flag and at least one parity wrong, conditional on success
};

double bare_ring_fusion_success(double eta);

// Recursion over layers 0..depth.
std::vector<FusionDistribution> concat_fusion_layers(double eta, int depth);
FusionDistribution concat_fusion_distribution(double eta, int depth);

double logical_transmission(double eta, int depth);

// depth 0 is a single photon: eps = 2 lambda / 3, no detection.
PauliMeasStats pauli_meas_stats(double eta, double lambda, int depth);

// Levels 1..depth all use the adaptive loss-protection trees.
StrategyFusionStats adaptive_fusion_stats(double eta, double lambda, int depth);

FtFusionStats ft_fusion_stats(double eta, double lambda, int depth, int switch_layer);
// Success probability of ft_fusion_stats without the error chains.
double ft_fusion_success(double eta, int depth, int switch_layer);

// Clamps to [0, 1]; reports to stderr if the correction exceeds 1e-9.
double clamp_probability(double p, const char* what);

void to_json(nlohmann::json& j, const FusionDistribution& d);
void to_json(nlohmann::json& j, const PauliMeasStats& s);
void to_json(nlohmann::json& j, const FtFusionStats& s);

}  // namespace ringrep
