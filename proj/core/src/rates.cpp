#include "ringrep/rates.hpp"

#include <cmath>
#include <stdexcept>

#include "ringrep/analytics.hpp"

namespace ringrep {

double ChannelParams::eta_t() const { return std::exp(-L0_km() / L_att_km); }

void ChannelParams::validate() const {
  if (!(L_km > 0)) throw std::invalid_argument("distance must be positive");
  if (m < 0) throw std::invalid_argument("station count must be non-negative");
  if (!(eta_d > 0 && eta_d <= 1)) throw std::invalid_argument("eta_d must lie in (0, 1]");
  if (!(L_att_km > 0)) throw std::invalid_argument("attenuation length must be positive");
  if (L0_km() < 1.0) throw std::invalid_argument("station spacing below 1 km");
}

void TimingParams::validate() const {
  if (!(tau_gen > 0 && tau_CZ > 0 && tau_M > 0)) throw std::invalid_argument("durations must be positive");
}

double binary_entropy(double x) {
  if (x <= 0 || x >= 1) return 0.0;
  return -x * std::log2(x) - (1 - x) * std::log2(1 - x);
}

double bell_probability(double p_s_link, int m) {
  if (!(p_s_link >= 0 && p_s_link <= 1)) throw std::invalid_argument("link success must lie in [0, 1]");
  if (m < 0) throw std::invalid_argument("station count must be non-negative");
  return std::pow(p_s_link, m + 1);
}

double secret_fraction(double q) {
  if (!(q >= 0 && q < 1)) throw std::invalid_argument("q must lie in [0, 1)");
  // Beyond q = 2/3 the argument of the second entropy leaves [0, 1]; the fraction is zero well before.
  if (q >= 2.0 / 3.0) return 0.0;
  const double mu = 1 - binary_entropy(q) - q - (1 - q) * binary_entropy((1 - 1.5 * q) / (1 - q));
  return mu > 0 ? mu : 0.0;
}

double end_to_end_error(double eps_s, int m) {
  if (!(eps_s >= 0 && eps_s <= 1)) throw std::invalid_argument("eps_s must lie in [0, 1]");
  if (m < 0) throw std::invalid_argument("station count must be non-negative");
  return -std::expm1((m + 1) * std::log1p(-eps_s));
}

double generation_time(const RingCodeSpec& spec, const TimingParams& timing) {
  timing.validate();
  const auto c = resource_counts(spec);
  const LineJoinCost join;
  const double ring = static_cast<double>(c.photons) * timing.tau_gen + static_cast<double>(c.cz) * timing.tau_CZ +
                      static_cast<double>(c.measurements) * timing.tau_M;
  const double line = join.hadamards * timing.tau_CZ + join.cz * timing.tau_CZ + join.measurements * timing.tau_M;
  return (2 * ring + line) * 1e-9;
}

double standard_rate(double mu, double p_s, int m, double tau0_s) {
  if (!(tau0_s > 0)) throw std::invalid_argument("generation time must be positive");
  return mu * bell_probability(p_s, m) / tau0_s;
}

RateReport ring_rate(const ChannelParams& channel, const TimingParams& timing, const RingCodeSpec& spec,
                     double lambda) {
  channel.validate();
  spec.validate();
  RateReport r;
  r.m = channel.m;
  r.N = spec.depth;
  r.Ntilde = spec.switch_layer;
  r.N_E = spec.depth + 1;
  r.L_km = channel.L_km;
  r.L0_km = channel.L0_km();
  r.eta = channel.eta();
  r.tau0_s = generation_time(spec, timing);
  const auto ft = ft_fusion_stats(r.eta, lambda, spec.depth, spec.switch_layer);
  r.p_s = ft.p_s;
  r.eps_s = ft.eps;
  r.eps_d = ft.eps_d;
  r.P_B = bell_probability(r.p_s, r.m);
  r.q = end_to_end_error(r.eps_s, r.m);
  r.mu = r.q < 1 ? secret_fraction(r.q) : 0.0;
  r.R_standard = standard_rate(r.mu, r.p_s, r.m, r.tau0_s);
  r.R = std::pow(1 - r.eps_d, r.m + 1) * r.R_standard;
  return r;
}

void to_json(nlohmann::json& j, const RateReport& r) {
  j = {{"R_hz", r.R},   {"R_standard_hz", r.R_standard},
       {"q", r.q},      {"mu", r.mu},
       {"P_B", r.P_B},  {"p_s", r.p_s},
       {"eps_s", r.eps_s}, {"eps_d", r.eps_d},
       {"tau0_s", r.tau0_s}, {"eta", r.eta},
       {"L_km", r.L_km}, {"L0_km", r.L0_km},
       {"m", r.m},      {"N", r.N},
       {"Ntilde", r.Ntilde}, {"NE", r.N_E}};
}

void to_json(nlohmann::json& j, const TimingParams& t) {
  j = {{"tau_gen_ns", t.tau_gen}, {"tau_CZ_ns", t.tau_CZ}, {"tau_M_ns", t.tau_M}};
}

}  // namespace ringrep
