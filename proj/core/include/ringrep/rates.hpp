#pragma once

#include <iosfwd>

#include <nlohmann/json.hpp>

#include "ringrep/ring_code.hpp"

namespace ringrep {

struct ChannelParams {
  double L_km = 1000;
  int m = 0;  // intermediate stations
  double eta_d = 0.95;
  double L_att_km = 20;

  double L0_km() const { return L_km / (m + 1); }
  double eta_t() const;
  double eta() const { return eta_t() * eta_d; }
  void validate() const;  // also requires L0 >= 1 km
};

// Durations in nanoseconds.
struct TimingParams {
  double tau_gen = 1;
  double tau_CZ = 10;
  double tau_M = 10;
  void validate() const;
};

struct RateReport {
  double R = 0;           // secret bits per second, with the detection abort factor
  double R_standard = 0;  // same without the detection factor
  double q = 0;
  double mu = 0;
  double P_B = 0;
  double p_s = 0;
  double eps_s = 0;
  double eps_d = 0;
  double tau0_s = 0;
  double eta = 0;
  double L_km = 0;
  double L0_km = 0;
  int m = 0;
  int N = 0;
  int Ntilde = 0;
  int N_E = 0;
};

double binary_entropy(double x);
double bell_probability(double p_s_link, int m);
// Six-state secret fraction, clamped at 0 where the expression is negative. Throws outside [0, 1).
double secret_fraction(double q);
double end_to_end_error(double eps_s, int m);
// Per-station time to generate the encoded two-qubit line, in seconds.
double generation_time(const RingCodeSpec& spec, const TimingParams& timing);
// Rate without the detection abort factor.
double standard_rate(double mu, double p_s, int m, double tau0_s);

// Station logical fusions use ft_fusion_stats at eta = eta_t * eta_d with N = spec.depth and
// N~ = spec.switch_layer; eps_s is its undetected error.
RateReport ring_rate(const ChannelParams& channel, const TimingParams& timing, const RingCodeSpec& spec,
                     double lambda);

void to_json(nlohmann::json& j, const RateReport& r);
void to_json(nlohmann::json& j, const TimingParams& t);

}  // namespace ringrep
