#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ringrep/analytics.hpp"
#include "ringrep/rates.hpp"

using namespace ringrep;

namespace {

double h2(double x) { return -x * std::log2(x) - (1 - x) * std::log2(1 - x); }

}  // namespace

TEST(Rates, BellProbability) {
  EXPECT_DOUBLE_EQ(bell_probability(0.9375, 1), 0.87890625);
  EXPECT_DOUBLE_EQ(bell_probability(0.3, 0), 0.3);
  EXPECT_DOUBLE_EQ(bell_probability(1.0, 100), 1.0);
  EXPECT_THROW(bell_probability(1.1, 1), std::invalid_argument);
}

TEST(Rates, SecretFraction) {
  EXPECT_DOUBLE_EQ(secret_fraction(0.0), 1.0);
  const double q = 0.2;
  const double raw = 1 - h2(q) - q - (1 - q) * h2((1 - 1.5 * q) / (1 - q));
  ASSERT_LT(raw, 0.0);
  EXPECT_EQ(secret_fraction(0.2), 0.0);
  const double q1 = 0.01;
  EXPECT_NEAR(secret_fraction(q1), 1 - h2(q1) - q1 - (1 - q1) * h2((1 - 1.5 * q1) / (1 - q1)), 1e-14);
  EXPECT_GT(secret_fraction(q1), 0.0);
  EXPECT_THROW(secret_fraction(-0.1), std::invalid_argument);
  EXPECT_THROW(secret_fraction(1.0), std::invalid_argument);
  EXPECT_EQ(secret_fraction(0.9), 0.0);
}

TEST(Rates, SecretFractionDecreasesUntilClamped) {
  double prev = secret_fraction(0.0);
  bool clamped = false;
  for (int i = 1; i < 2000; ++i) {
    const double mu = secret_fraction(i * 0.3 / 2000);
    if (clamped) {
      EXPECT_EQ(mu, 0.0);
    } else if (mu == 0.0) {
      clamped = true;
    } else {
      EXPECT_LT(mu, prev);
    }
    prev = mu;
  }
  EXPECT_TRUE(clamped);
}

TEST(Rates, EndToEndError) {
  EXPECT_EQ(end_to_end_error(0.0, 40), 0.0);
  EXPECT_NEAR(end_to_end_error(0.07, 0), 0.07, 1e-15);
  EXPECT_NEAR(end_to_end_error(1e-3, 99), 1 - std::pow(0.999, 100), 1e-14);
  EXPECT_NEAR(end_to_end_error(1e-3, 99), 0.0952, 1e-4);
}

TEST(Rates, GenerationTime) {
  const TimingParams t{1, 10, 10};
  // Ring counts (photons, CZ, measurements) = (16, 13, 5) doubled for the line, plus H + 2 CZ + 1 M for the join.
  EXPECT_NEAR(generation_time({4, 2, 2}, t), (2 * (16 * 1 + 13 * 10 + 5 * 10) + (10 + 2 * 10 + 10)) * 1e-9, 1e-18);
  EXPECT_NEAR(generation_time({4, 2, 2}, t), 432e-9, 1e-18);
  // Depth 3: (64, 4*13+5, 4*5+1).
  EXPECT_NEAR(generation_time({4, 3, 3}, t), (2 * (64 + 57 * 10 + 21 * 10) + 40) * 1e-9, 1e-18);
  const TimingParams fast{1, 1e-9, 1e-9};
  EXPECT_NEAR(generation_time({4, 4, 4}, fast), 2 * 256 * 1e-9, 1e-15);
  EXPECT_THROW(generation_time({4, 2, 2}, TimingParams{0, 1, 1}), std::invalid_argument);
}

TEST(Rates, RingRateComposition) {
  const ChannelParams ch{1000, 199, 0.95, 20};
  const TimingParams t{1, 10, 10};
  const auto r = ring_rate(ch, t, {4, 4, 2}, 0.002);
  const double eta = std::exp(-5.0 / 20) * 0.95;
  EXPECT_NEAR(r.eta, eta, 1e-15);
  const auto ft = ft_fusion_stats(eta, 0.002, 4, 2);
  EXPECT_DOUBLE_EQ(r.p_s, ft.p_s);
  EXPECT_EQ(r.N_E, 5);
  const double q = 1 - std::pow(1 - ft.eps, 200);
  EXPECT_NEAR(r.q, q, 1e-12);
  EXPECT_NEAR(r.R, std::pow(1 - ft.eps_d, 200) * secret_fraction(q) * std::pow(ft.p_s, 200) / generation_time({4, 4, 4}, t),
              1e-9 * r.R);
  EXPECT_LE(r.R, r.R_standard);

  const auto clean = ring_rate(ch, t, {4, 4, 2}, 0.0);
  EXPECT_EQ(clean.R, clean.R_standard);
  EXPECT_EQ(clean.mu, 1.0);

  const auto dead = ring_rate({1e5, 0, 0.95, 20}, t, {4, 2, 2}, 0.0);
  EXPECT_EQ(dead.R, 0.0);
  EXPECT_THROW(ring_rate({10, 20, 0.95, 20}, t, {4, 2, 2}, 0.0), std::invalid_argument);
}

TEST(Rates, RateMonotoneInNoiseAndDistance) {
  const TimingParams t{1, 10, 10};
  for (int N = 2; N <= 5; ++N)
    for (int Nt = 1; Nt <= N; ++Nt) {
      double prev = INFINITY;
      for (double lam : {0.0, 5e-4, 1e-3, 2e-3, 4e-3, 8e-3}) {
        const auto r = ring_rate({2000, 999, 0.95, 20}, t, {4, N, Nt}, lam);
        EXPECT_LE(r.R, prev * (1 + 1e-12)) << N << " " << Nt << " " << lam;
        EXPECT_LE(r.R, r.R_standard);
        prev = r.R;
      }
      // In distance the rate can only rise where the shorter link had no key at all and the
      // undetected error fell with the extra loss (non all-fused outcomes count as error free).
      RateReport last;
      last.R = INFINITY;
      for (double L : {500.0, 1000.0, 1500.0, 2000.0, 3000.0}) {
        const auto r = ring_rate({L, 499, 0.95, 20}, t, {4, N, Nt}, 1e-3);
        EXPECT_LE(r.p_s, last.R == INFINITY ? 1.0 : last.p_s);
        if (r.R > last.R) {
          EXPECT_EQ(last.mu, 0.0) << N << " " << Nt << " " << L;
          EXPECT_LT(r.eps_s, last.eps_s) << N << " " << Nt << " " << L;
        }
        last = r;
      }
    }
}

TEST(Rates, UndetectedErrorFallsWithLossAboveSwitchLayer) {
  double prev = 1.0;
  for (double eta : {0.9, 0.8, 0.7, 0.6, 0.5}) {
    const double e = ft_fusion_stats(eta, 1e-3, 4, 2).eps;
    EXPECT_LT(e, prev) << eta;
    prev = e;
  }
}

TEST(Rates, ReportJson) {
  const auto r = ring_rate({100, 9, 0.95, 20}, {}, {4, 3, 2}, 0.001);
  const nlohmann::json j = r;
  for (const char* k : {"R_hz", "q", "mu", "P_B", "tau0_s", "m", "N", "Ntilde", "NE", "eps_s", "eps_d"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j.at("NE"), 4);
}
