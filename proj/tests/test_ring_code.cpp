#include <gtest/gtest.h>

#include <functional>

#include "oracles/statevector.hpp"
#include "ringrep/ring_code.hpp"

using namespace ringrep;

namespace {

// Tree of rings with virtual roots; photons first (emission order), virtuals after.
struct OracleTree {
  std::size_t photons = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> virtuals;
  std::size_t total = 0;
};

OracleTree oracle_tree(int n, int depth, std::size_t first_virtual_offset = 0) {
  OracleTree t;
  t.photons = 1;
  for (int i = 0; i < depth; ++i) t.photons *= static_cast<std::size_t>(n);
  std::size_t next_p = 1, next_v = 1 + t.photons + first_virtual_offset;
  std::function<void(std::size_t, int)> rec = [&](std::size_t r, int level) {
    std::vector<std::size_t> ch;
    for (int k = 0; k < n; ++k) {
      if (level == 1) {
        ch.push_back(next_p++);
      } else {
        std::size_t v = next_v++;
        t.virtuals.push_back(v);
        rec(v, level - 1);
        ch.push_back(v);
      }
    }
    t.edges.emplace_back(r, ch.front());
    for (std::size_t k = 0; k + 1 < ch.size(); ++k) t.edges.emplace_back(ch[k], ch[k + 1]);
    t.edges.emplace_back(ch.back(), r);
  };
  rec(0, depth);
  t.total = next_v;
  return t;
}

std::string pauli_text(const PauliString& p, std::size_t width) {
  std::string s(width, 'I');
  for (std::size_t q = 0; q < p.size(); ++q) s[q] = to_char(p.get(q));
  if (p.sign() < 0) s = "-" + s;
  return s;
}

// Every generator of the tableau must have expectation +1 on the oracle state.
void expect_stabilized(const StabilizerTableau& t, const oracle::StateVector& sv) {
  for (const auto& g : t.stabilizers()) EXPECT_NEAR(sv.expectation(pauli_text(g, sv.num_qubits())), 1.0, 1e-9);
}

oracle::StateVector oracle_code_state(int n, int depth) {
  auto tree = oracle_tree(n, depth);
  auto sv = oracle::StateVector::graph(tree.total, tree.edges);
  for (auto v : tree.virtuals) {
    std::string op(tree.total, 'I');
    op[v] = 'X';
    sv.project(op, 1);
  }
  return sv;
}

// Two rings with roots joined by an edge; roots and virtuals X-measured; photons only.
StabilizerTableau line_target(int n, int depth) {
  auto a = oracle_tree(n, depth);
  const std::size_t nph = a.photons;
  std::size_t nv = a.virtuals.size();
  const std::size_t total = 2 * nph + 2 * nv + 2;
  Adjacency adj(total, std::vector<bool>(total, false));
  auto map_a = [&](std::size_t q) { return q == 0 ? 2 * nph : (q <= nph ? q - 1 : 2 * nph + 2 + (q - nph - 1)); };
  auto map_b = [&](std::size_t q) {
    return q == 0 ? 2 * nph + 1 : (q <= nph ? nph + q - 1 : 2 * nph + 2 + nv + (q - nph - 1));
  };
  for (auto [u, v] : a.edges) {
    adj[map_a(u)][map_a(v)] = adj[map_a(v)][map_a(u)] = true;
    adj[map_b(u)][map_b(v)] = adj[map_b(v)][map_b(u)] = true;
  }
  adj[2 * nph][2 * nph + 1] = adj[2 * nph + 1][2 * nph] = true;
  auto t = graph_state(adj);
  Rng rng(3);
  for (std::size_t q = 2 * nph; q < total; ++q) t.measure(q, Pauli::X, rng, 1);
  std::vector<std::size_t> keep(2 * nph);
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
  return restrict_to(t, keep);
}

}  // namespace

TEST(ResourceCounts, MatchRecursion) {
  EXPECT_EQ(resource_counts({4, 1, 1}), (ResourceCounts{2, 1, 4}));
  EXPECT_EQ(resource_counts({4, 2, 2}), (ResourceCounts{13, 5, 16}));
  EXPECT_EQ(resource_counts({4, 3, 3}), (ResourceCounts{57, 21, 64}));
  EXPECT_EQ(resource_counts({5, 2, 2}), (ResourceCounts{16, 6, 25}));
}

TEST(RingCodeSpec, RejectsInvalidParameters) {
  EXPECT_THROW((RingCodeSpec{2, 1, 1}).validate(), std::invalid_argument);
  EXPECT_THROW((RingCodeSpec{4, 0, 1}).validate(), std::invalid_argument);
  EXPECT_THROW((RingCodeSpec{4, 2, 3}).validate(), std::invalid_argument);
  EXPECT_THROW((RingCodeSpec{4, 64, 1}).validate(), std::overflow_error);
}

TEST(Blocks, EmissionOrderLayout) {
  EXPECT_EQ(block_size(4, 2), 16u);
  EXPECT_EQ(block_first_photon(4, {1, 3}), 13u);
  EXPECT_EQ(block_first_photon(4, {2, 0}), 1u);
  auto c = child_block(4, {2, 1}, 2);
  EXPECT_EQ(c.level, 1);
  EXPECT_EQ(c.index, 6u);
  EXPECT_EQ(block_first_photon(4, c), 25u);
  EXPECT_THROW(child_block(4, {0, 0}, 0), std::out_of_range);
}

TEST(CodeState, MatchesStateVectorOracle) {
  for (int depth = 1; depth <= 2; ++depth) {
    auto sv = oracle_code_state(4, depth);
    auto t = code_state({4, depth, depth});
    EXPECT_EQ(t.num_qubits(), 1 + block_size(4, depth));
    expect_stabilized(t, sv);
  }
  auto sv = oracle_code_state(3, 2);
  expect_stabilized(code_state({3, 2, 2}), sv);
}

TEST(CodeState, RefusesOversizedTrees) {
  EXPECT_NO_THROW(code_state({4, 5, 5}));
  EXPECT_THROW(code_state({4, 6, 6}), std::length_error);
}

TEST(GraphSpec, BareRingIsFiveCycle) {
  auto g = build_concatenated_ring({4, 1, 1});
  ASSERT_EQ(g.num_vertices(), 5u);
  EXPECT_EQ(g.num_edges(), 5u);
  for (std::size_t v = 0; v < 5; ++v) {
    EXPECT_TRUE(g.adjacency[v][(v + 1) % 5]);
    EXPECT_TRUE(g.adjacency[v][(v + 4) % 5]);
  }
  EXPECT_TRUE(g.local_ops.empty());
  EXPECT_TRUE(g.virtual_layers.empty());
}

TEST(GraphSpec, LocalOpsRecoverCodeState) {
  for (int depth = 1; depth <= 3; ++depth) {
    RingCodeSpec spec{4, depth, depth};
    auto g = build_concatenated_ring(spec);
    EXPECT_TRUE(g.state().same_state(code_state(spec)));
    ASSERT_EQ(g.virtual_layers.size(), static_cast<std::size_t>(depth - 1));
    for (std::size_t l = 0; l < g.virtual_layers.size(); ++l) {
      EXPECT_EQ(g.virtual_layers[l].size(), block_size(4, depth - 1 - static_cast<int>(l)));
      for (const auto& v : g.virtual_layers[l]) EXPECT_EQ(v.last_photon - v.first_photon + 1, block_size(4, v.level));
    }
  }
  auto two = build_concatenated_ring({4, 2, 2});
  std::size_t root_degree = 0;
  for (std::size_t v = 1; v < two.num_vertices(); ++v) root_degree += two.adjacency[0][v] ? 1 : 0;
  EXPECT_EQ(root_degree, 8u);  // first and last photon of every sub-ring
}

TEST(Generation, CountsMatchResourceRecursion) {
  for (int depth = 1; depth <= 4; ++depth) {
    RingCodeSpec spec{4, depth, depth};
    auto seq = generation_sequence(spec, false);
    EXPECT_EQ(seq.counts(), resource_counts(spec)) << depth;
    auto line = generation_sequence(spec, true);
    auto f = resource_counts(spec);
    EXPECT_EQ(line.counts(), (ResourceCounts{2 * f.cz + 1, 2 * f.measurements + 1, 2 * f.photons}));
    EXPECT_EQ(line.count(GenOpKind::Hadamard), 2 * seq.count(GenOpKind::Hadamard) + 1);
  }
}

TEST(Generation, ProducesExactCodeStateForAllOutcomes) {
  bool saw_correction = false;
  for (int depth = 1; depth <= 3; ++depth) {
    RingCodeSpec spec{4, depth, depth};
    auto target = code_state(spec);
    auto seq = generation_sequence(spec, false);
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      Rng rng(seed);
      auto r = execute_generation(seq, rng);
      EXPECT_TRUE(r.state.same_state(target)) << "depth " << depth << " seed " << seed;
      EXPECT_EQ(r.outcomes.size(), seq.count(GenOpKind::MeasureSpin));
      for (std::size_t q = 0; q < r.byproducts.size(); ++q) saw_correction |= r.byproducts.get(q) != Pauli::I;
    }
  }
  EXPECT_TRUE(saw_correction);
}

TEST(Generation, PhotonsEmittedInOrder) {
  auto seq = generation_sequence({4, 3, 3}, false);
  std::uint32_t expect = 0;
  for (const auto& op : seq.ops)
    if (op.kind == GenOpKind::EmitPhoton) {
      EXPECT_EQ(op.b, expect++);
      EXPECT_EQ(op.a, 3u);
    }
  EXPECT_EQ(expect, 64u);
}

TEST(Generation, LineVariantJoinsTwoRings) {
  for (int depth = 1; depth <= 2; ++depth) {
    auto target = line_target(4, depth);
    auto seq = generation_sequence({4, depth, depth}, true);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      Rng rng(seed);
      EXPECT_TRUE(execute_generation(seq, rng).state.same_state(target)) << depth << " " << seed;
    }
  }
}

TEST(PauliPatterns, MeasureLogicalOperatorsOfBareRing) {
  auto sv = oracle_code_state(4, 1);
  for (Pauli l : {Pauli::X, Pauli::Y, Pauli::Z}) {
    for (const auto& pat : pauli_patterns(l)) {
      // Root-logical operator times the photon pattern is a stabilizer, up to sign.
      std::string op(5, 'I');
      op[0] = to_char(l);
      for (int k = 0; k < 4; ++k) op[k + 1] = to_char(pat[k]);
      EXPECT_NEAR(std::abs(sv.expectation(op)), 1.0, 1e-9) << op;
    }
  }
  EXPECT_THROW(pauli_patterns(Pauli::I), std::invalid_argument);
}

TEST(RingCodeJson, SerializesSequenceAndGraph) {
  auto j = nlohmann::json(generation_sequence({4, 2, 2}, false));
  EXPECT_EQ(j["counts"]["f_cz"], 13);
  EXPECT_EQ(j["counts"]["f_m"], 5);
  EXPECT_EQ(j["photons"], 16);
  EXPECT_EQ(j["ops"][0]["op"], "InitSpin");
  auto g = nlohmann::json(build_concatenated_ring({4, 1, 1}));
  EXPECT_EQ(g["edges"].size(), 5u);
  RingCodeSpec back = nlohmann::json(RingCodeSpec{5, 3, 2}).get<RingCodeSpec>();
  EXPECT_EQ(back.n, 5);
  EXPECT_EQ(back.depth, 3);
  EXPECT_EQ(back.switch_layer, 2);
}
