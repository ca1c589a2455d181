#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ringrep/pauli.hpp"
#include "ringrep/ring_code.hpp"

namespace ringrep {

// Outcome class of a (logical or physical) fusion. FailY only occurs for physical fusions.
enum class FusionClass : std::uint8_t { Success = 0, FailX = 1, FailY = 2, FailZ = 3, Loss = 4 };
inline constexpr int kFusionClasses = 5;
const char* fusion_class_name(FusionClass c);

// Two-qubit Pauli on the (A, B) halves of a fused pair, e.g. {X, X} for the XX parity.
using PairPauli = std::array<Pauli, 2>;

// Pauli on the code level of one logical fusion between two n = 4 unit rings:
// qubit 0 = root A, 1..4 = code qubits A1..A4, 5 = root B, 6..9 = B1..B4.
// Bits 0..9 hold the x part, bits 10..19 the z part; phases are not tracked.
struct CodePauli {
  std::uint32_t bits = 0;
  static CodePauli single(int qubit, Pauli p);
  static CodePauli on_pair(int pair, PairPauli p);  // pair 1..4
  static CodePauli on_roots(PairPauli p);
  CodePauli operator*(CodePauli o) const { return {bits ^ o.bits}; }
  bool operator==(const CodePauli&) const = default;
};

// Products of available exposures that equal `target` up to a stabilizer of the two rings.
// Masks index into `ops`. With `disjoint_pair` the search returns two representatives whose
// sources (per-exposure ids) do not overlap when such a pair exists.
std::vector<std::uint32_t> find_representatives(std::span<const CodePauli> ops, std::span<const std::uint8_t> sources,
                                                CodePauli target, bool disjoint_pair);

struct SinglesRule {
  std::uint8_t pairs = 0;  // bit k-1 set for pair k
  int min_per_side = 1;
  FusionClass cls = FusionClass::Loss;
};

enum class NodeKind : std::uint8_t { Fuse, Singles, Leaf };

struct StrategyNode {
  NodeKind kind = NodeKind::Leaf;
  // Fuse
  int pair = 0;
  Pauli failure_basis = Pauli::Z;  // physical layer only
  std::array<int, kFusionClasses> next{-1, -1, -1, -1, -1};
  // Singles: bases are resolved from the exposures gathered on the path (see resolve_single_bases)
  std::vector<int> single_pairs;
  std::vector<Pauli> canonical_bases;
  std::vector<SinglesRule> rules;
  FusionClass fallback = FusionClass::Loss;
  // Leaf
  FusionClass cls = FusionClass::Loss;
  bool redundant = false;  // each parity decoded from two source-disjoint representatives
};

enum class TreeKind : std::uint8_t { Physical, Upper, AllFuse };
const char* tree_kind_name(TreeKind k);

struct StrategyTree {
  TreeKind kind;
  std::vector<StrategyNode> nodes;  // root = node 0
};

const StrategyTree& strategy_tree(TreeKind kind);

struct FusionStrategy {
  RingCodeSpec spec;
  std::vector<TreeKind> layers;  // layers[0] = level 1 (fuses photons)
  const StrategyTree& tree(int level) const { return strategy_tree(layers.at(static_cast<std::size_t>(level - 1))); }
};

// Requires n = 4. Levels 1..switch_layer use the adaptive loss-protection trees, higher levels fuse all pairs.
FusionStrategy fusion_strategy(const RingCodeSpec& spec);

// Exposures a child fusion of the given class offers to its parent, in its canonical form.
std::vector<PairPauli> canonical_exposures(TreeKind child_layer, FusionClass cls, Pauli failure_basis);

// Context = exposures gathered from fused pairs on the path to a Singles node.
struct PathContext {
  std::vector<CodePauli> ops;
  std::vector<std::uint8_t> sources;
};

// Single-qubit bases for a Singles node; maximizes the probability that the rule classes are realized.
std::vector<Pauli> resolve_single_bases(const StrategyNode& node, const PathContext& ctx);

// Class reached by a Singles node given which sub-blocks were transmitted (bit 2i = A side of
// single_pairs[i], bit 2i+1 = B side).
FusionClass apply_rules(const StrategyNode& node, std::uint32_t detected);

struct LeafDecision {
  FusionClass cls = FusionClass::Loss;
  std::vector<PairPauli> exposes;                 // operators on the two roots offered upward
  std::vector<std::array<std::uint32_t, 2>> reps;  // per exposure, masks over the leaf's exposures (second may be 0)
};

// Verifies the declared class against the available exposures and downgrades it when a
// representative is missing. Results are cached.
LeafDecision decide_leaf(const PathContext& ctx, FusionClass declared, bool redundant);

// Every path fuses pairs in increasing order and measures singles only on pairs after the last fused one.
bool respects_emission_order(const StrategyTree& tree);

void to_json(nlohmann::json& j, const FusionStrategy& s);

}  // namespace ringrep
