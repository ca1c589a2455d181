#pragma once

#include <cmath>
#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "ringrep/rates.hpp"

namespace ringrep {

struct SearchBounds {
  int N_max = 7;
  double L0_min_km = 1.0;
  int m_max = 100000;
  int Ntilde_min = 1;
  int Ntilde_max = 7;  // clipped to N
  double eta_d = 0.95;
  double L_att_km = 20;
  void validate() const;
};

struct OptimizationResult {
  bool feasible = false;
  RateReport best;
  double cost = INFINITY;
  std::size_t evaluated = 0;  // configurations whose error statistics were computed
};

// Cost per secret bit; infinite when R <= 0.
double cost(const RateReport& report, const ChannelParams& channel, const TimingParams& timing);

// Minimal cost over m, N in 1..N_max and N~ in the bounds (ties: smaller N, then m, then N~).
// m = 0 is only admitted when the spacing bound leaves no station to place, because the cost
// vanishes at m = 0 for any positive rate.
OptimizationResult optimize(double L_km, double lambda, const TimingParams& timing, const SearchBounds& bounds);

struct SweepCell {
  double L_km = 0;
  double lambda = 0;
  OptimizationResult result;
};

// One optimize call per (L, lambda); cells run on `threads` workers (0 = hardware concurrency).
std::vector<SweepCell> sweep(const std::vector<double>& L_list, const std::vector<double>& lambda_list,
                             const TimingParams& timing, const SearchBounds& bounds, unsigned threads = 0);

void write_sweep_csv_header(std::ostream& os);
void write_sweep_csv_row(std::ostream& os, const SweepCell& cell);
void to_json(nlohmann::json& j, const OptimizationResult& r);
void to_json(nlohmann::json& j, const SearchBounds& b);

}  // namespace ringrep
