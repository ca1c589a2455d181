#include "ringrep/analytics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace ringrep {

namespace {

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 0.75)) throw std::invalid_argument("lambda must lie in [0, 3/4]");
}

void check_depth(int depth, int min) {
  if (depth < min) throw std::invalid_argument("depth out of range");
}

double next_transmission(double e) {
  return std::pow(e, 4) + 4 * (1 - e) * std::pow(e, 3) + 2 * (1 - e) * (1 - e) * e * e;
}

}  // namespace

// Evaluator of the strategy trees; defined in fusion_eval.cpp.
StrategyFusionStats evaluate_adaptive(double eta, double lambda, int depth);

// One all-fuse layer on top of children with distribution d and single-measurement transmission a.
static FusionDistribution all_fuse_layer(const FusionDistribution& d, double a) {
  const double a2 = a * a, a4 = a2 * a2;
  const double s = d.p_s, x = d.p_x, z = d.p_z, l = d.p_l;
  FusionDistribution n;
  n.p_s = std::pow(s, 4) + s * z * std::pow(a2 + 2 * a * (1 - a), 2) + s * x * a2 + s * (x + z + 2 * l) * a4 +
          s * s * ((l + z) * a2 + x) + std::pow(s, 3) * (1 - s);
  n.p_l = 1 - n.p_s;
  return n;
}

double FtFusionStats::conditional_error() const {
  const double d = eps + zeta;
  return d > 0 ? eps / d : 0.0;
}

double clamp_probability(double p, const char* what) {
  const double c = std::clamp(p, 0.0, 1.0);
  if (std::abs(c - p) > 1e-9) std::cerr << "warning: " << what << " = " << p << " clamped to " << c << "\n";
  return c;
}

double bare_ring_fusion_success(double eta) {
  check_eta(eta);
  const double ps = eta * eta / 2, pf = ps, pl = 1 - eta * eta, e = eta;
  return ps * std::pow(e * e * e + 3 * (1 - e) * e * e, 2) + pf * ps * std::pow(e * e + 2 * (1 - e) * e, 2) +
         pl * ps * (std::pow(e, 4) + e * e * pf) + pf * pf * ps * (e * e + pf);
}

std::vector<FusionDistribution> concat_fusion_layers(double eta, int depth) {
  check_eta(eta);
  check_depth(depth, 0);
  std::vector<FusionDistribution> out;
  FusionDistribution d{eta * eta / 2, eta * eta / 2, eta * eta / 2, eta * eta / 2, 1 - eta * eta};
  out.push_back(d);
  double tx = 0, tz = 0, a = eta;
  for (int k = 1; k <= depth; ++k) {
    const double a2 = a * a, a4 = a2 * a2;
    FusionDistribution n;
    n.p_s = d.p_s * std::pow(a * a2 + 3 * (1 - a) * a2, 2) + d.p_x * d.p_s * std::pow(a2 + 2 * (1 - a) * a, 2) +
            (d.p_l + tz) * d.p_s * (a4 + a2 * d.p_y) + d.p_x * d.p_x * d.p_s * (a2 + d.p_z) + tx * d.p_l * d.p_s * a2;
    n.p_x = d.p_l * d.p_s * (1 - a2) * (a2 + d.p_y) + d.p_x * d.p_x * d.p_z * d.p_z;
    n.p_z = d.p_s * a2 * (2 * a2 * (1 - a) * (1 - a) + 4 * a * std::pow(1 - a, 3) + std::pow(1 - a, 4)) +
            d.p_x * d.p_s * (1 - std::pow(a2 + 2 * a * (1 - a), 2)) + d.p_x * d.p_l * a4 + d.p_l * d.p_l * a4;
    n.p_y = 0;
    n.p_l = 1 - n.p_s - n.p_x - n.p_y - n.p_z;
    tx = n.p_x;
    tz = n.p_z;
    d = n;
    out.push_back(d);
    a = next_transmission(a);
  }
  return out;
}

FusionDistribution concat_fusion_distribution(double eta, int depth) {
  auto d = concat_fusion_layers(eta, depth).back();
  d.p_s = clamp_probability(d.p_s, "p_s");
  d.p_x = clamp_probability(d.p_x, "p_x");
  d.p_z = clamp_probability(d.p_z, "p_z");
  d.p_l = clamp_probability(d.p_l, "p_l");
  return d;
}

double logical_transmission(double eta, int depth) {
  check_eta(eta);
  check_depth(depth, 0);
  double e = eta;
  for (int k = 0; k < depth; ++k) e = next_transmission(e);
  return e;
}

PauliMeasStats pauli_meas_stats(double eta, double lambda, int depth) {
  check_eta(eta);
  check_lambda(lambda);
  check_depth(depth, 0);
  double e = 2 * lambda / 3, d = 0, h = eta;
  for (int k = 1; k <= depth; ++k) {
    const double hn = next_transmission(h);
    const double z = 1 - e - d;
    const double h4 = std::pow(h, 4);
    if (hn <= 0) {
      e = 0;
      d = 0;
    } else {
      const double en = (h4 * (4 * e * e * z * z + 2 * (4 * d * (1 - d) + 2 * d * d) * e * z) + (hn - h4) * 2 * e * z) / hn;
      const double dn = ((hn - h4) * (2 * d * (1 - d) + d * d) +
                         h4 * (4 * (e * z * z * z + e * e * e * z) + 4 * (d * d * (1 - d) * (1 - d) + d * d * d * (1 - d)) +
                               std::pow(d, 4))) /
                        hn;
      e = en;
      d = dn;
    }
    h = hn;
  }
  PauliMeasStats s;
  s.eta_bar = clamp_probability(h, "eta_bar");
  s.eps = clamp_probability(e, "eps");
  s.eps_d = clamp_probability(d, "eps_d");
  s.zeta = 1 - s.eps - s.eps_d;
  return s;
}

StrategyFusionStats adaptive_fusion_stats(double eta, double lambda, int depth) {
  check_eta(eta);
  check_lambda(lambda);
  check_depth(depth, 1);
  return evaluate_adaptive(eta, lambda, depth);
}

FtFusionStats ft_fusion_stats(double eta, double lambda, int depth, int switch_layer) {
  check_eta(eta);
  check_lambda(lambda);
  check_depth(depth, 1);
  if (switch_layer < 1 || switch_layer > depth) throw std::invalid_argument("switch layer must lie in [1, depth]");
  const auto seed = evaluate_adaptive(eta, lambda, switch_layer);
  // One chain per parity; the reported statistics belong to the parity with the larger conditional error.
  std::array<ParityStats, 2> chain{seed.xx, seed.zz};
  FusionDistribution d = concat_fusion_layers(eta, switch_layer).back();
  for (int k = switch_layer + 1; k <= depth; ++k) {
    const FusionDistribution n = all_fuse_layer(d, logical_transmission(eta, k - 1));
    const double s4 = std::pow(d.p_s, 4);
    for (auto& c : chain) {
      const double e = c.eps, dd = c.eps_d, zeta = 1 - e - dd;
      if (n.p_s <= 0) {
        c = {};
        continue;
      }
      c.eps_d = s4 *
                (4 * (e * zeta * zeta * zeta + e * e * e * zeta) +
                 4 * (dd * dd * (1 - dd) * (1 - dd) + dd * dd * dd * (1 - dd)) + std::pow(dd, 4)) /
                n.p_s;
      c.eps = s4 * (4 * e * e * zeta * zeta + 2 * (4 * dd * (1 - dd) + 2 * dd * dd) * e * zeta) / n.p_s;
    }
    d = n;
  }
  auto cond = [](const ParityStats& c) { return c.eps_d < 1 ? c.eps / (1 - c.eps_d) : 0.0; };
  const ParityStats& worst = cond(chain[1]) > cond(chain[0]) ? chain[1] : chain[0];
  const double e = worst.eps, dd = worst.eps_d;
  FtFusionStats out;
  out.p_s = clamp_probability(d.p_s, "p_s");
  out.eps = clamp_probability(e, "eps");
  out.eps_d = clamp_probability(dd, "eps_d");
  out.zeta = 1 - out.eps - out.eps_d;
  return out;
}

double ft_fusion_success(double eta, int depth, int switch_layer) {
  check_eta(eta);
  check_depth(depth, 1);
  if (switch_layer < 1 || switch_layer > depth) throw std::invalid_argument("switch layer must lie in [1, depth]");
  FusionDistribution d = concat_fusion_layers(eta, switch_layer).back();
  for (int k = switch_layer + 1; k <= depth; ++k) d = all_fuse_layer(d, logical_transmission(eta, k - 1));
  return clamp_probability(d.p_s, "p_s");
}

void to_json(nlohmann::json& j, const FusionDistribution& d) {
  j = {{"p_s", d.p_s}, {"p_x", d.p_x}, {"p_y", d.p_y}, {"p_z", d.p_z}, {"p_l", d.p_l}};
}

void to_json(nlohmann::json& j, const PauliMeasStats& s) {
  j = {{"eta_bar", s.eta_bar}, {"eps", s.eps}, {"eps_d", s.eps_d}, {"zeta", s.zeta}};
}

void to_json(nlohmann::json& j, const FtFusionStats& s) {
  j = {{"p_s", s.p_s}, {"eps", s.eps}, {"eps_d", s.eps_d}, {"zeta", s.zeta}, {"conditional_error", s.conditional_error()}};
}

}  // namespace ringrep
