#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ringrep/analytics.hpp"
#include "ringrep/mc.hpp"

using namespace ringrep;

namespace {

double ps_of(const ExactDistribution& d, double eta) {
  return d.probability(McOutcome::Success, eta) + d.probability(McOutcome::Error, eta) +
         d.probability(McOutcome::Detected, eta);
}

// Fusion success of the bare ring, written out from the branches of the adaptive tree.
double bare_ring_closed(double e) {
  const double ps = e * e / 2, pf = ps, pl = 1 - e * e;
  return ps * std::pow(e * e * e + 3 * (1 - e) * e * e, 2) + pf * ps * std::pow(e * e + 2 * (1 - e) * e, 2) +
         pl * ps * (std::pow(e, 4) + e * e * pf) + pf * pf * ps * (e * e + pf);
}

double within_sigmas(std::uint64_t hits, std::uint64_t n, double p) {
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
  const double diff = std::abs(static_cast<double>(hits) / static_cast<double>(n) - p);
  if (sigma == 0) return diff == 0 ? 0.0 : INFINITY;
  return diff / sigma;
}

TrialConfig config(int depth, double eta, double lambda, std::uint64_t trials, std::uint64_t seed) {
  TrialConfig c;
  c.spec = {4, depth, depth};
  c.eta = eta;
  c.lambda = lambda;
  c.trials = trials;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Enumerate, ReproducesBareRingOnGrid) {
  EnumConfig c;
  c.spec = {4, 1, 1};
  const auto d = enumerate_small(c);
  for (int i = 0; i < 100; ++i) {
    const double eta = i / 99.0;
    EXPECT_NEAR(ps_of(d, eta), bare_ring_closed(eta), 1e-12) << eta;
    EXPECT_NEAR(d.total(eta), 1.0, 1e-12);
    EXPECT_EQ(d.probability(McOutcome::Error, eta), 0.0);
  }
}

TEST(Enumerate, BareRingFailureClassesFollowTree) {
  EnumConfig c;
  c.spec = {4, 1, 1};
  const auto d = enumerate_small(c);
  for (double e : {0.3, 0.75, 0.95}) {
    const double e2 = e * e, h = e2 / 2, pl = 1 - e2, e4 = e2 * e2;
    // X failures: a first-fusion loss with the X singles lost on pair 2, or failure chains ending in Z failures.
    const double px = pl * h * (1 - e2) * (e2 + h) + h * h * h * h;
    const double pz = h * e2 * (2 * e2 * (1 - e) * (1 - e) + 4 * e * std::pow(1 - e, 3) + std::pow(1 - e, 4)) +
                      h * h * (1 - std::pow(e2 + 2 * e * (1 - e), 2)) + h * pl * e4 + pl * pl * e4;
    EXPECT_NEAR(d.probability(McOutcome::FailX, e), px, 1e-12) << e;
    EXPECT_NEAR(d.probability(McOutcome::FailZ, e), pz, 1e-12) << e;
  }
}

TEST(Enumerate, PauliMatchesClosedFormsWithoutLoss) {
  for (Pauli logical : {Pauli::X, Pauli::Y, Pauli::Z})
    for (double lambda : {0.0, 0.03, 0.15, 0.4, 0.75}) {
      EnumConfig c;
      c.mode = McMode::Pauli;
      c.logical = logical;
      c.spec = {4, 1, 1};
      c.lambda = lambda;
      c.eta = 1.0;
      const auto d = enumerate_small(c);
      const double e = 2 * lambda / 3;
      EXPECT_NEAR(d.probability(McOutcome::Detected, 1), 4 * (e * std::pow(1 - e, 3) + std::pow(e, 3) * (1 - e)), 1e-12);
      EXPECT_NEAR(d.probability(McOutcome::Error, 1), 4 * e * e * (1 - e) * (1 - e), 1e-12);
      EXPECT_NEAR(d.total(1), 1.0, 1e-12);
    }
  EnumConfig c;
  c.mode = McMode::Pauli;
  c.spec = {4, 1, 1};
  c.lambda = 0.15;
  c.eta = 1.0;
  const auto d = enumerate_small(c);
  EXPECT_NEAR(d.probability(McOutcome::Detected, 1), 0.2952, 1e-12);
  EXPECT_NEAR(d.probability(McOutcome::Error, 1), 0.0324, 1e-12);
}

TEST(Enumerate, PauliTransmissionAndLossyErrors) {
  EnumConfig c;
  c.mode = McMode::Pauli;
  c.spec = {4, 1, 1};
  const auto d = enumerate_small(c);
  for (double e : {0.5, 0.9, 1.0}) {
    const double t = std::pow(e, 4) + 4 * (1 - e) * std::pow(e, 3) + 2 * std::pow(1 - e, 2) * e * e;
    EXPECT_NEAR(1 - d.probability(McOutcome::Loss, e), t, 1e-12);
  }
  EXPECT_NEAR(1 - d.probability(McOutcome::Loss, 0.9), 0.9639, 1e-4);
  c.lambda = 0.1;
  c.eta = 0.8;
  const auto n = enumerate_small(c);
  const auto s = pauli_meas_stats(0.8, 0.1, 1);
  const double tx = 1 - n.probability(McOutcome::Loss, 0);
  EXPECT_NEAR(tx, s.eta_bar, 1e-12);
  EXPECT_NEAR(n.probability(McOutcome::Detected, 0) / tx, s.eps_d, 1e-12);
  EXPECT_NEAR(n.probability(McOutcome::Error, 0) / tx, s.eps, 1e-12);
}

TEST(Enumerate, TwoLevelPauliMatchesRecursion) {
  EnumConfig c;
  c.mode = McMode::Pauli;
  c.logical = Pauli::Z;
  c.spec = {4, 2, 2};
  c.lambda = 0.05;
  c.eta = 1.0;
  const auto d = enumerate_small(c);
  const auto s = pauli_meas_stats(1.0, 0.05, 2);
  EXPECT_NEAR(d.probability(McOutcome::Detected, 1), s.eps_d, 1e-12);
  EXPECT_NEAR(d.probability(McOutcome::Error, 1), s.eps, 1e-12);

  c.lambda = 0.0;
  c.eta.reset();
  const auto l = enumerate_small(c);
  for (double e : {0.6, 0.9}) EXPECT_NEAR(1 - l.probability(McOutcome::Loss, e), logical_transmission(e, 2), 1e-12);
}

TEST(Enumerate, FusionErrorsMatchEvaluator) {
  EnumConfig c;
  c.spec = {4, 1, 1};
  c.lambda = 0.05;
  c.eta = 0.9;
  const auto d = enumerate_small(c);
  const auto s = adaptive_fusion_stats(0.9, 0.05, 1);
  const double ps = ps_of(d, 0);
  EXPECT_NEAR(ps, s.classes.p_s, 1e-12);
  EXPECT_NEAR(d.probability(McOutcome::Error, 0) / ps, s.error, 1e-12);
  EXPECT_NEAR(d.probability(McOutcome::Detected, 0) / ps, s.detected, 1e-12);
  EXPECT_NEAR(d.parity_error(0, 0) / ps, s.xx.eps, 1e-12);
  EXPECT_NEAR(d.parity_error(1, 0) / ps, s.zz.eps, 1e-12);
  EXPECT_NEAR(d.probability(McOutcome::FailX, 0), s.classes.p_x, 1e-12);
  EXPECT_NEAR(d.probability(McOutcome::FailZ, 0), s.classes.p_z, 1e-12);
}

TEST(Enumerate, DegenerateNoiselessLosslessCase) {
  EnumConfig c;
  c.mode = McMode::Pauli;
  c.spec = {4, 1, 1};
  c.eta = 1.0;
  const auto d = enumerate_small(c);
  EXPECT_EQ(d.branches(), 1u);
  EXPECT_EQ(d.terms().size(), 1u);
  EXPECT_DOUBLE_EQ(d.probability(McOutcome::Success, 1), 1.0);

  c.mode = McMode::Fusion;
  const auto f = enumerate_small(c);
  EXPECT_NEAR(f.total(1), 1.0, 1e-15);
  for (const auto& [k, w] : f.terms()) EXPECT_EQ(k.lost, 0u);
  EXPECT_EQ(f.probability(McOutcome::Loss, 1), 0.0);
}

TEST(Enumerate, RejectsLargeStateSpaces) {
  EnumConfig c;
  c.spec = {4, 3, 3};
  EXPECT_THROW(enumerate_small(c), std::length_error);
  c.spec = {4, 2, 2};
  c.lambda = 0.05;
  c.max_leaves = 1000;
  EXPECT_THROW(enumerate_small(c), std::length_error);
}

TEST(MonteCarlo, CountsPartitionTrialsAndRepeat) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 6; ++i) {
    auto c = config(1 + i % 2, 0.6 + 0.4 * u(gen), 0.1 * u(gen), 1500 + 700 * static_cast<std::uint64_t>(i), gen());
    c.threads = 1;
    const auto a = simulate_logical_fusion(c);
    c.threads = 4;
    const auto b = simulate_logical_fusion(c);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.parity_error, b.parity_error);
    EXPECT_EQ(a.total(), c.trials);
    const auto p1 = simulate_pauli_measurement(c, Pauli::Y);
    c.threads = 1;
    const auto p2 = simulate_pauli_measurement(c, Pauli::Y);
    EXPECT_EQ(p1.counts, p2.counts);
    EXPECT_EQ(p1.total(), c.trials);
    EXPECT_EQ(p1.count(McOutcome::FailX) + p1.count(McOutcome::FailZ), 0u);
  }
}

TEST(MonteCarlo, NoiselessRunsNeverErr) {
  for (int depth : {1, 2}) {
    const auto f = simulate_logical_fusion(config(depth, 0.85, 0.0, 3000, 11));
    EXPECT_EQ(f.count(McOutcome::Error) + f.count(McOutcome::Detected), 0u);
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      const auto m = simulate_pauli_measurement(config(depth, 0.85, 0.0, 3000, 12), p);
      EXPECT_EQ(m.count(McOutcome::Error) + m.count(McOutcome::Detected), 0u);
    }
  }
}

TEST(MonteCarlo, NoTransmissionMeansLoss) {
  const auto f = simulate_logical_fusion(config(1, 0.0, 0.2, 2000, 3));
  EXPECT_EQ(f.count(McOutcome::Loss), 2000u);
  const auto p = simulate_pauli_measurement(config(1, 0.0, 0.2, 2000, 3), Pauli::X);
  EXPECT_EQ(p.count(McOutcome::Loss), 2000u);
}

TEST(MonteCarlo, BareRingSuccessRate) {
  const auto s = simulate_logical_fusion(config(1, 1.0, 0.0, 200000, 5));
  EXPECT_LE(within_sigmas(s.succeeded(), s.total(), 0.9375), 3.0);
  const auto l = simulate_logical_fusion(config(1, 0.7, 0.0, 100000, 6));
  EXPECT_LE(within_sigmas(l.succeeded(), l.total(), bare_ring_closed(0.7)), 3.0);
}

TEST(MonteCarlo, PauliRatesMatchClosedForms) {
  const auto t = simulate_pauli_measurement(config(1, 0.9, 0.0, 100000, 8), Pauli::X);
  EXPECT_LE(within_sigmas(t.total() - t.count(McOutcome::Loss), t.total(), 0.96390), 3.0);
  const auto n = simulate_pauli_measurement(config(1, 1.0, 0.15, 100000, 9), Pauli::Z);
  EXPECT_LE(within_sigmas(n.count(McOutcome::Detected), n.total(), 0.2952), 3.0);
  EXPECT_LE(within_sigmas(n.count(McOutcome::Error), n.total(), 0.0324), 3.0);
}

TEST(MonteCarlo, TwoLevelFusionMatchesEvaluator) {
  const auto s = simulate_logical_fusion(config(2, 0.9, 0.01, 60000, 10));
  const auto a = adaptive_fusion_stats(0.9, 0.01, 2);
  EXPECT_LE(within_sigmas(s.succeeded(), s.total(), a.classes.p_s), 3.0);
  EXPECT_LE(within_sigmas(s.count(McOutcome::FailX), s.total(), a.classes.p_x), 3.0);
  EXPECT_LE(within_sigmas(s.count(McOutcome::FailZ), s.total(), a.classes.p_z), 3.0);
  EXPECT_LE(within_sigmas(s.count(McOutcome::Detected), s.succeeded(), a.detected), 3.0);
  EXPECT_LE(within_sigmas(s.count(McOutcome::Error), s.succeeded(), a.error), 3.0);
}

TEST(MonteCarlo, RejectsBadConfigs) {
  EXPECT_THROW(simulate_logical_fusion(config(1, 1.2, 0.0, 10, 0)), std::invalid_argument);
  EXPECT_THROW(simulate_logical_fusion(config(1, 1.0, 0.0, 0, 0)), std::invalid_argument);
  EXPECT_THROW(simulate_logical_fusion(config(6, 1.0, 0.0, 10, 0)), std::length_error);
  EXPECT_THROW(simulate_pauli_measurement(config(1, 1.0, 0.0, 10, 0), Pauli::I), std::invalid_argument);
}

TEST(MonteCarlo, CsvAndJsonOutput) {
  const auto s = simulate_logical_fusion(config(1, 0.9, 0.01, 500, 1));
  std::ostringstream os;
  write_csv_header(os);
  write_csv_rows(os, s);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "depth,eta,lambda,trials,outcome,count,rate,stderr");
  int rows = 0;
  std::uint64_t sum = 0;
  while (std::getline(is, line)) {
    ++rows;
    std::stringstream ls(line);
    std::string cell;
    for (int i = 0; i < 6; ++i) std::getline(ls, cell, ',');
    sum += std::stoull(cell);
  }
  EXPECT_EQ(rows, kMcOutcomes);
  EXPECT_EQ(sum, 500u);
  const nlohmann::json j = s;
  EXPECT_EQ(j.at("mode"), "fusion");
  EXPECT_EQ(j.at("trials"), 500);
  EXPECT_EQ(j.at("outcomes").size(), 6u);
  EXPECT_TRUE(j.at("parities").contains("xx"));
}
