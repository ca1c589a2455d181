#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>

#include "oracles/statevector.hpp"
#include "ringrep/strategy.hpp"

using namespace ringrep;

namespace {

// Two unit rings (root + four code qubits each) as ten-qubit state vector.
const oracle::StateVector& two_rings() {
  static const oracle::StateVector sv = [] {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t h = 0; h < 2; ++h)
      for (std::size_t i = 0; i < 5; ++i) e.emplace_back(5 * h + i, 5 * h + (i + 1) % 5);
    return oracle::StateVector::graph(10, e);
  }();
  return sv;
}

std::string text(CodePauli p) {
  std::string s(10, 'I');
  for (int q = 0; q < 10; ++q) s[static_cast<std::size_t>(q)] = to_char(make_pauli((p.bits >> q) & 1u, (p.bits >> (q + 10)) & 1u));
  return s;
}

CodePauli product(const PathContext& ctx, std::uint32_t mask) {
  CodePauli acc;
  for (std::size_t i = 0; i < ctx.ops.size(); ++i)
    if ((mask >> i) & 1u) acc = acc * ctx.ops[i];
  return acc;
}

// target * rep is a stabilizer of the two rings (up to sign).
bool is_rep(const PathContext& ctx, std::uint32_t mask, PairPauli target) {
  return std::abs(std::abs(two_rings().expectation(text(product(ctx, mask) * CodePauli::on_roots(target)))) - 1.0) < 1e-9;
}

struct ClassProbs {
  std::map<FusionClass, double> p;
  double operator[](FusionClass c) const {
    auto it = p.find(c);
    return it == p.end() ? 0.0 : it->second;
  }
};

// Child distribution per class; exposures are the canonical ones.
ClassProbs enumerate_tree(const StrategyTree& tree, TreeKind child_kind, std::map<FusionClass, double> child, double a,
                          int* leaves_checked = nullptr) {
  ClassProbs out;
  std::function<void(int, PathContext, double)> walk = [&](int idx, PathContext ctx, double w) {
    const auto& n = tree.nodes[static_cast<std::size_t>(idx)];
    if (n.kind == NodeKind::Fuse) {
      for (auto [cls, p] : child) {
        if (p == 0.0) continue;
        PathContext next = ctx;
        for (auto e : canonical_exposures(child_kind, cls, n.failure_basis)) {
          next.ops.push_back(CodePauli::on_pair(n.pair, e));
          next.sources.push_back(static_cast<std::uint8_t>(n.pair));
        }
        walk(n.next[static_cast<std::size_t>(cls)], next, w * p);
      }
      return;
    }
    std::uint32_t patterns = 1;
    std::vector<Pauli> bases;
    if (n.kind == NodeKind::Singles) {
      patterns = 1u << (2 * n.single_pairs.size());
      bases = resolve_single_bases(n, ctx);
    }
    for (std::uint32_t det = 0; det < patterns; ++det) {
      PathContext full = ctx;
      double pw = w;
      FusionClass want = n.cls;
      if (n.kind == NodeKind::Singles) {
        for (std::size_t i = 0; i < n.single_pairs.size(); ++i)
          for (int side = 0; side < 2; ++side) {
            const bool d = (det >> (2 * i + side)) & 1u;
            pw *= d ? a : 1.0 - a;
            if (d) {
              full.ops.push_back(CodePauli::single(n.single_pairs[i] + 5 * side, bases[i]));
              full.sources.push_back(static_cast<std::uint8_t>(8 + 2 * i + side));
            }
          }
        want = apply_rules(n, det);
      }
      auto dec = decide_leaf(full, want, n.redundant);
      for (std::size_t e = 0; e < dec.exposes.size(); ++e) {
        EXPECT_TRUE(is_rep(full, dec.reps[e][0], dec.exposes[e]));
        if (dec.reps[e][1] != 0) EXPECT_TRUE(is_rep(full, dec.reps[e][1], dec.exposes[e]));
        if (leaves_checked) ++*leaves_checked;
      }
      out.p[dec.cls] += pw;
    }
  };
  walk(0, {}, 1.0);
  return out;
}

}  // namespace

TEST(CodeAlgebra, KnownRepresentatives) {
  PathContext ctx;
  ctx.ops = {CodePauli::on_pair(1, {Pauli::Z, Pauli::Z}), CodePauli::on_pair(4, {Pauli::Z, Pauli::Z}),
             CodePauli::on_pair(1, {Pauli::X, Pauli::X}), CodePauli::on_pair(2, {Pauli::Z, Pauli::Z})};
  ctx.sources = {1, 4, 1, 2};
  auto xx = find_representatives(ctx.ops, ctx.sources, CodePauli::on_roots({Pauli::X, Pauli::X}), false);
  ASSERT_EQ(xx.size(), 1u);
  EXPECT_EQ(xx[0], 0b0011u);
  auto zz = find_representatives(ctx.ops, ctx.sources, CodePauli::on_roots({Pauli::Z, Pauli::Z}), false);
  ASSERT_EQ(zz.size(), 1u);
  EXPECT_EQ(zz[0], 0b1100u);
  EXPECT_TRUE(is_rep(ctx, xx[0], {Pauli::X, Pauli::X}));
  EXPECT_TRUE(is_rep(ctx, zz[0], {Pauli::Z, Pauli::Z}));
  // A single root operator is not available from parities alone.
  EXPECT_TRUE(find_representatives(ctx.ops, ctx.sources, CodePauli::on_roots({Pauli::X, Pauli::I}), false).empty());
}

TEST(CodeAlgebra, RedundantPairIsSourceDisjoint) {
  PathContext ctx;
  for (int k = 1; k <= 4; ++k)
    for (Pauli b : {Pauli::X, Pauli::Z}) {
      ctx.ops.push_back(CodePauli::on_pair(k, {b, b}));
      ctx.sources.push_back(static_cast<std::uint8_t>(k));
    }
  for (PairPauli t : {PairPauli{Pauli::X, Pauli::X}, PairPauli{Pauli::Z, Pauli::Z}}) {
    auto r = find_representatives(ctx.ops, ctx.sources, CodePauli::on_roots(t), true);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_TRUE(is_rep(ctx, r[0], t));
    EXPECT_TRUE(is_rep(ctx, r[1], t));
    std::uint32_t s0 = 0, s1 = 0;
    for (int i = 0; i < 8; ++i) {
      if ((r[0] >> i) & 1u) s0 |= 1u << ctx.sources[static_cast<std::size_t>(i)];
      if ((r[1] >> i) & 1u) s1 |= 1u << ctx.sources[static_cast<std::size_t>(i)];
    }
    EXPECT_EQ(s0 & s1, 0u);
  }
}

TEST(Strategy, TreesRespectEmissionOrder) {
  for (auto k : {TreeKind::Physical, TreeKind::Upper, TreeKind::AllFuse}) EXPECT_TRUE(respects_emission_order(strategy_tree(k)));
  StrategyTree bad{TreeKind::Upper, {}};
  StrategyNode f;
  f.kind = NodeKind::Fuse;
  f.pair = 2;
  f.next = {1, 1, 1, 1, 1};
  StrategyNode s;
  s.kind = NodeKind::Singles;
  s.single_pairs = {1};
  bad.nodes = {f, s};
  EXPECT_FALSE(respects_emission_order(bad));
}

TEST(Strategy, LayerKindsFollowSwitchLayer) {
  auto s = fusion_strategy({4, 4, 2});
  ASSERT_EQ(s.layers.size(), 4u);
  EXPECT_EQ(s.layers[0], TreeKind::Physical);
  EXPECT_EQ(s.layers[1], TreeKind::Upper);
  EXPECT_EQ(s.layers[2], TreeKind::AllFuse);
  EXPECT_EQ(s.layers[3], TreeKind::AllFuse);
  EXPECT_THROW(fusion_strategy({5, 2, 2}), std::invalid_argument);
  auto j = nlohmann::json(s);
  EXPECT_EQ(j["layers"][2]["kind"], "all_fuse");
}

// Recursion for one level of fusion between rings whose sub-fusions have the given class probabilities.
TEST(Strategy, PhysicalTreeMatchesRecursionAtDepthOne) {
  for (double eta : {1.0, 0.97, 0.9, 0.8, 0.6, 0.3}) {
    const double a = eta, s = eta * eta / 2, x = s, y = s, z = s, l = 1 - eta * eta;
    const double a2 = a * a, a4 = a2 * a2;
    const double ps = s * std::pow(a * a2 + 3 * (1 - a) * a2, 2) + x * s * std::pow(a2 + 2 * (1 - a) * a, 2) +
                      l * s * (a4 + a2 * y) + x * x * s * (a2 + z);
    const double px = l * s * (1 - a2) * (a2 + y) + x * x * z * z;
    const double pz = s * a2 * (2 * a2 * std::pow(1 - a, 2) + 4 * a * std::pow(1 - a, 3) + std::pow(1 - a, 4)) +
                      x * s * (1 - std::pow(a2 + 2 * a * (1 - a), 2)) + x * l * a4 + l * l * a4;
    int checked = 0;
    auto got = enumerate_tree(strategy_tree(TreeKind::Physical), TreeKind::Physical,
                              {{FusionClass::Success, s}, {FusionClass::FailX, s}, {FusionClass::Loss, l}}, a, &checked);
    EXPECT_GT(checked, 0);
    EXPECT_NEAR(got[FusionClass::Success], ps, 1e-12) << eta;
    EXPECT_NEAR(got[FusionClass::FailX], px, 1e-12) << eta;
    EXPECT_NEAR(got[FusionClass::FailZ], pz, 1e-12) << eta;
    EXPECT_NEAR(got[FusionClass::Loss], 1 - ps - px - pz, 1e-12) << eta;
  }
}

// Child classes of a logical layer; the recursion is checked term by term against the realizable tree.
// Two terms of the recursion need a root-X representative that does not exist for the exposures on the path:
// X1 L2 S3 in the adaptive tree and S1 X2 with two singles in the all-fuse tree.
TEST(Strategy, LogicalTreesMatchRecursionUpToUnrealizableTerms) {
  const double s = 0.6, x = 0.15, z = 0.1, l = 0.15;
  const std::map<FusionClass, double> child{
      {FusionClass::Success, s}, {FusionClass::FailX, x}, {FusionClass::FailZ, z}, {FusionClass::Loss, l}};
  for (double a : {1.0, 0.95, 0.9, 0.8, 0.5}) {
    const double a2 = a * a, a4 = a2 * a2;
    const double ps = s * std::pow(a * a2 + 3 * (1 - a) * a2, 2) + x * s * std::pow(a2 + 2 * (1 - a) * a, 2) +
                      (l + z) * s * a4 + x * x * s * (a2 + z) + x * l * s * a2;
    const double px = l * s * (1 - a2) * a2 + x * x * z * z;
    const double pz = s * a2 * (2 * a2 * std::pow(1 - a, 2) + 4 * a * std::pow(1 - a, 3) + std::pow(1 - a, 4)) +
                      x * s * (1 - std::pow(a2 + 2 * a * (1 - a), 2)) + x * l * a4 + l * l * a4;
    auto up = enumerate_tree(strategy_tree(TreeKind::Upper), TreeKind::Upper, child, a);
    EXPECT_NEAR(up[FusionClass::Success], ps - x * l * s * a2, 1e-12) << a;
    EXPECT_NEAR(up[FusionClass::FailX], px, 1e-12) << a;
    EXPECT_NEAR(up[FusionClass::FailZ], pz, 1e-12) << a;

    const double pc = std::pow(s, 4) + s * z * std::pow(a2 + 2 * a * (1 - a), 2) + s * x * a2 +
                      s * (x + z + 2 * l) * a4 + s * s * ((l + z) * a2 + x) + std::pow(s, 3) * (1 - s);
    auto af = enumerate_tree(strategy_tree(TreeKind::AllFuse), TreeKind::Upper, child, a);
    EXPECT_NEAR(af[FusionClass::Success], pc - s * x * (a2 - a4), 1e-12) << a;
    EXPECT_NEAR(af[FusionClass::FailZ], s * x * (a2 - a4), 1e-12) << a;
    EXPECT_NEAR(af[FusionClass::FailX], 0.0, 1e-15) << a;
  }
}
