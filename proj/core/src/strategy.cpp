#include "ringrep/strategy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace ringrep {

namespace {

constexpr int kCodeQubits = 10;

// Stabilizers of two five-cycles (root + four code qubits) in echelon form keyed by pivot bit.
struct StabilizerBasis {
  std::array<std::uint32_t, 2 * kCodeQubits> row{};

  StabilizerBasis() {
    for (int half = 0; half < 2; ++half) {
      const int off = 5 * half;
      for (int i = 0; i < 5; ++i) {
        CodePauli k = CodePauli::single(off + i, Pauli::X) * CodePauli::single(off + (i + 1) % 5, Pauli::Z) *
                      CodePauli::single(off + (i + 4) % 5, Pauli::Z);
        insert(k.bits);
      }
    }
  }

  void insert(std::uint32_t v) {
    v = reduce(v);
    if (v == 0) throw std::logic_error("dependent ring stabilizer");
    row[static_cast<std::size_t>(std::bit_width(v) - 1)] = v;
  }

  std::uint32_t reduce(std::uint32_t v) const {
    for (int b = 2 * kCodeQubits - 1; b >= 0; --b)
      if (((v >> b) & 1u) != 0 && row[static_cast<std::size_t>(b)] != 0) v ^= row[static_cast<std::size_t>(b)];
    return v;
  }
};

const StabilizerBasis& stabilizer_basis() {
  static const StabilizerBasis basis;
  return basis;
}

std::uint32_t next_same_popcount(std::uint32_t v) {
  const std::uint32_t t = v | (v - 1);
  return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

std::uint32_t source_set(std::uint32_t mask, std::span<const std::uint8_t> sources) {
  std::uint32_t s = 0;
  for (std::uint32_t m = mask; m != 0; m &= m - 1) s |= 1u << sources[static_cast<std::size_t>(std::countr_zero(m))];
  return s;
}

std::uint32_t minimal_rep(const std::vector<std::uint32_t>& residue, std::uint32_t target) {
  const auto e = static_cast<int>(residue.size());
  for (int k = 1; k <= e; ++k) {
    const std::uint32_t last = ((1u << k) - 1) << (e - k);
    for (std::uint32_t m = (1u << k) - 1;; m = next_same_popcount(m)) {
      std::uint32_t acc = 0;
      for (std::uint32_t b = m; b != 0; b &= b - 1) acc ^= residue[static_cast<std::size_t>(std::countr_zero(b))];
      if (acc == target) return m;
      if (m == last) break;
    }
  }
  return 0;
}

PairPauli pp(Pauli a, Pauli b) { return {a, b}; }

Pauli class_basis(FusionClass c) {
  return c == FusionClass::FailX ? Pauli::X : c == FusionClass::FailY ? Pauli::Y : Pauli::Z;
}

// ---- tree construction ----

struct Builder {
  StrategyTree tree;

  explicit Builder(TreeKind k) : tree{k, {}} {}

  int add(StrategyNode n) {
    tree.nodes.push_back(std::move(n));
    return static_cast<int>(tree.nodes.size()) - 1;
  }
  int reserve() { return add({}); }
  int leaf(FusionClass c, bool redundant = false) {
    StrategyNode n;
    n.cls = c;
    n.redundant = redundant;
    return add(std::move(n));
  }
  void leaf_at(int at, FusionClass c) { tree.nodes[static_cast<std::size_t>(at)].cls = c; }
  // next = {S, X, Y, Z, L}
  void fuse(int at, int pair, Pauli fb, std::array<int, kFusionClasses> next) {
    auto& n = tree.nodes[static_cast<std::size_t>(at)];
    n.kind = NodeKind::Fuse;
    n.pair = pair;
    n.failure_basis = fb;
    n.next = next;
  }
  void singles(int at, std::vector<int> pairs, std::vector<SinglesRule> rules, FusionClass fallback) {
    auto& n = tree.nodes[static_cast<std::size_t>(at)];
    n.kind = NodeKind::Singles;
    n.single_pairs = std::move(pairs);
    n.rules = std::move(rules);
    n.fallback = fallback;
  }
};

std::uint8_t pairs_mask(std::initializer_list<int> ps) {
  std::uint8_t m = 0;
  for (int p : ps) m = static_cast<std::uint8_t>(m | (1u << (p - 1)));
  return m;
}

constexpr auto S = FusionClass::Success;
constexpr auto FX = FusionClass::FailX;
constexpr auto FZ = FusionClass::FailZ;
constexpr auto LOSS = FusionClass::Loss;

StrategyTree physical_tree() {
  Builder b(TreeKind::Physical);
  const int n0 = b.reserve();
  const int n1 = b.reserve(), n2 = b.reserve(), n3 = b.reserve(), n4 = b.reserve(), n5 = b.reserve();
  const int n6 = b.reserve(), n9 = b.reserve(), n10 = b.reserve(), n11 = b.reserve(), n12 = b.reserve();
  const int n13 = b.reserve(), n14 = b.reserve();
  const int l = b.leaf(LOSS);
  b.fuse(n0, 1, Pauli::X, {n1, n2, n2, n2, n10});
  b.singles(n1, {2, 3, 4}, {{pairs_mask({2, 3, 4}), 2, S}, {pairs_mask({2}), 1, FZ}}, LOSS);
  b.fuse(n2, 2, Pauli::X, {n3, n4, n4, n4, n9});
  b.singles(n3, {3, 4}, {{pairs_mask({3, 4}), 1, S}}, FZ);
  b.fuse(n4, 3, Pauli::Z, {n5, n6, n6, n6, l});
  b.singles(n5, {4}, {{pairs_mask({4}), 1, S}}, LOSS);
  const int s6 = b.leaf(S), x6 = b.leaf(FX);
  b.fuse(n6, 4, Pauli::Z, {s6, x6, x6, x6, l});
  b.singles(n9, {3, 4}, {{pairs_mask({3, 4}), 2, FZ}}, LOSS);
  b.fuse(n10, 2, Pauli::Y, {n11, n12, n12, n12, n14});
  b.singles(n11, {3, 4}, {{pairs_mask({3, 4}), 2, S}, {pairs_mask({3}), 1, FX}}, LOSS);
  b.fuse(n12, 3, Pauli::Z, {n13, l, l, l, l});
  b.singles(n13, {4}, {{pairs_mask({4}), 1, S}}, FX);
  b.singles(n14, {3, 4}, {{pairs_mask({3, 4}), 2, FZ}}, LOSS);
  return std::move(b.tree);
}

StrategyTree upper_tree() {
  Builder b(TreeKind::Upper);
  const int u0 = b.reserve();
  std::array<int, 14> u{};
  u[0] = u0;
  for (int i = 1; i < 14; ++i) u[static_cast<std::size_t>(i)] = b.reserve();
  const int l = b.leaf(LOSS);
  const auto at = [&](int i) { return u[static_cast<std::size_t>(i)]; };
  b.fuse(at(0), 1, Pauli::Z, {at(1), at(2), l, at(9), at(11)});
  b.singles(at(1), {2, 3, 4}, {{pairs_mask({2, 3, 4}), 2, S}, {pairs_mask({2}), 1, FZ}}, LOSS);
  b.fuse(at(2), 2, Pauli::Z, {at(3), at(4), l, l, at(7)});
  b.singles(at(3), {3, 4}, {{pairs_mask({3, 4}), 1, S}}, FZ);
  b.fuse(at(4), 3, Pauli::Z, {at(5), l, l, at(6), l});
  b.singles(at(5), {4}, {{pairs_mask({4}), 1, S}}, LOSS);
  const int s6 = b.leaf(S), x6 = b.leaf(FX);
  b.fuse(at(6), 4, Pauli::Z, {s6, l, l, x6, l});
  // X1 L2: no root-X representative survives without pair 2, so only the Z parity is recoverable.
  b.singles(at(7), {3, 4}, {{pairs_mask({3, 4}), 2, FZ}}, LOSS);
  b.leaf_at(at(8), LOSS);
  b.fuse(at(9), 2, Pauli::Z, {at(10), l, l, l, l});
  b.singles(at(10), {3, 4}, {{pairs_mask({3, 4}), 2, S}}, LOSS);
  b.fuse(at(11), 2, Pauli::Z, {at(12), l, l, l, at(13)});
  b.singles(at(12), {3, 4}, {{pairs_mask({3, 4}), 2, S}, {pairs_mask({3}), 1, FX}}, LOSS);
  b.singles(at(13), {3, 4}, {{pairs_mask({3, 4}), 2, FZ}}, LOSS);
  return std::move(b.tree);
}

StrategyTree all_fuse_tree() {
  Builder b(TreeKind::AllFuse);
  std::array<int, 10> a{};
  for (auto& x : a) x = b.reserve();
  const auto at = [&](int i) { return a[static_cast<std::size_t>(i)]; };
  const int l = b.leaf(LOSS);
  const int s = b.leaf(S);
  const int sr = b.leaf(S, true);
  b.fuse(at(0), 1, Pauli::Z, {at(1), at(8), at(8), at(8), at(8)});
  b.fuse(at(1), 2, Pauli::Z, {at(2), at(5), l, at(6), at(7)});
  b.fuse(at(2), 3, Pauli::Z, {at(3), s, l, at(4), at(4)});
  b.fuse(at(3), 4, Pauli::Z, {sr, sr, sr, sr, sr});
  b.singles(at(4), {4}, {{pairs_mask({4}), 1, S}}, LOSS);
  b.singles(at(5), {3, 4}, {{pairs_mask({3, 4}), 1, S}}, LOSS);
  b.singles(at(6), {3, 4}, {{pairs_mask({3, 4}), 1, S}}, LOSS);
  b.singles(at(7), {3, 4}, {{pairs_mask({3, 4}), 2, S}}, LOSS);
  b.fuse(at(8), 2, Pauli::Z, {at(9), l, l, l, l});
  b.singles(at(9), {3, 4}, {{pairs_mask({3, 4}), 2, S}}, LOSS);
  return std::move(b.tree);
}

// Canonical path contexts used to give every Singles node a default set of bases.
void fill_canonical_bases(StrategyTree& t) {
  const TreeKind child = t.kind == TreeKind::Physical ? TreeKind::Physical : TreeKind::Upper;
  std::function<void(int, PathContext)> walk = [&](int idx, PathContext ctx) {
    auto& n = t.nodes[static_cast<std::size_t>(idx)];
    if (n.kind == NodeKind::Singles) {
      if (n.canonical_bases.empty()) n.canonical_bases = resolve_single_bases(n, ctx);
      return;
    }
    if (n.kind != NodeKind::Fuse) return;
    for (int c = 0; c < kFusionClasses; ++c) {
      const auto cls = static_cast<FusionClass>(c);
      if (t.kind == TreeKind::Physical && (cls == FX || cls == FusionClass::FailY || cls == FZ) &&
          cls != (n.failure_basis == Pauli::X ? FX : n.failure_basis == Pauli::Y ? FusionClass::FailY : FZ))
        continue;
      if (t.kind != TreeKind::Physical && cls == FusionClass::FailY) continue;
      PathContext next = ctx;
      for (const auto& e : canonical_exposures(child, cls, n.failure_basis)) {
        next.ops.push_back(CodePauli::on_pair(n.pair, e));
        next.sources.push_back(static_cast<std::uint8_t>(n.pair));
      }
      walk(n.next[static_cast<std::size_t>(c)], std::move(next));
    }
  };
  walk(0, {});
}

struct Trees {
  std::array<StrategyTree, 3> t;
  Trees() : t{physical_tree(), upper_tree(), all_fuse_tree()} {
    for (auto& tree : t) fill_canonical_bases(tree);
  }
};

template <class V>
class Memo {
 public:
  template <class F>
  V get(const std::vector<std::uint32_t>& key, F&& compute) {
    {
      std::shared_lock lock(mu_);
      auto it = map_.find(key);
      if (it != map_.end()) return it->second;
    }
    V v = compute();
    std::unique_lock lock(mu_);
    return map_.emplace(key, std::move(v)).first->second;
  }

 private:
  std::shared_mutex mu_;
  std::map<std::vector<std::uint32_t>, V> map_;
};

std::vector<std::uint32_t> context_key(const PathContext& ctx) {
  std::vector<std::uint32_t> key;
  key.reserve(ctx.ops.size() + 4);
  for (std::size_t i = 0; i < ctx.ops.size(); ++i) key.push_back(ctx.ops[i].bits | (std::uint32_t{ctx.sources[i]} << 20));
  return key;
}

}  // namespace

const char* fusion_class_name(FusionClass c) {
  switch (c) {
    case FusionClass::Success:
      return "success";
    case FusionClass::FailX:
      return "fail_x";
    case FusionClass::FailY:
      return "fail_y";
    case FusionClass::FailZ:
      return "fail_z";
    case FusionClass::Loss:
      return "loss";
  }
  return "?";
}

const char* tree_kind_name(TreeKind k) {
  switch (k) {
    case TreeKind::Physical:
      return "physical";
    case TreeKind::Upper:
      return "adaptive";
    case TreeKind::AllFuse:
      return "all_fuse";
  }
  return "?";
}

CodePauli CodePauli::single(int qubit, Pauli p) {
  if (qubit < 0 || qubit >= kCodeQubits) throw std::out_of_range("code qubit");
  std::uint32_t b = 0;
  if (x_bit(p)) b |= 1u << qubit;
  if (z_bit(p)) b |= 1u << (qubit + kCodeQubits);
  return {b};
}

CodePauli CodePauli::on_pair(int pair, PairPauli p) {
  if (pair < 1 || pair > 4) throw std::out_of_range("pair");
  return single(pair, p[0]) * single(5 + pair, p[1]);
}

CodePauli CodePauli::on_roots(PairPauli p) { return single(0, p[0]) * single(5, p[1]); }

std::vector<std::uint32_t> find_representatives(std::span<const CodePauli> ops, std::span<const std::uint8_t> sources,
                                                CodePauli target, bool disjoint_pair) {
  if (ops.size() != sources.size()) throw std::invalid_argument("ops/sources size mismatch");
  if (ops.size() > 24) throw std::length_error("too many exposures");
  const auto& basis = stabilizer_basis();
  std::vector<std::uint32_t> residue(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) residue[i] = basis.reduce(ops[i].bits);
  const std::uint32_t t = basis.reduce(target.bits);
  if (t == 0) throw std::invalid_argument("target is a stabilizer");
  const std::uint32_t best = minimal_rep(residue, t);
  if (best == 0) return {};
  if (!disjoint_pair || ops.size() > 16) return {best};

  // All solutions are a coset of the kernel; enumerate them directly.
  std::vector<std::uint32_t> sols;
  const std::uint32_t all = (1u << ops.size()) - 1;
  for (std::uint32_t m = 1; m <= all; ++m) {
    std::uint32_t acc = 0;
    for (std::uint32_t b = m; b != 0; b &= b - 1) acc ^= residue[static_cast<std::size_t>(std::countr_zero(b))];
    if (acc == t) sols.push_back(m);
  }
  int best_cost = 1 << 30;
  std::pair<std::uint32_t, std::uint32_t> pick{0, 0};
  for (std::size_t i = 0; i < sols.size(); ++i)
    for (std::size_t j = i + 1; j < sols.size(); ++j) {
      if ((source_set(sols[i], sources) & source_set(sols[j], sources)) != 0) continue;
      const int cost = std::popcount(sols[i]) + std::popcount(sols[j]);
      if (cost < best_cost) {
        best_cost = cost;
        pick = {sols[i], sols[j]};
      }
    }
  if (pick.first == 0) return {best};
  return {pick.first, pick.second};
}

const StrategyTree& strategy_tree(TreeKind kind) {
  static const Trees trees;
  return trees.t[static_cast<std::size_t>(kind)];
}

FusionStrategy fusion_strategy(const RingCodeSpec& spec) {
  spec.validate();
  if (spec.n != 4) throw std::invalid_argument("fusion strategies are defined for n = 4 only");
  FusionStrategy s{spec, {}};
  for (int level = 1; level <= spec.depth; ++level)
    s.layers.push_back(level == 1 ? TreeKind::Physical
                                  : (level <= spec.switch_layer ? TreeKind::Upper : TreeKind::AllFuse));
  return s;
}

std::vector<PairPauli> canonical_exposures(TreeKind child_layer, FusionClass cls, Pauli failure_basis) {
  if (cls == FusionClass::Loss) return {};
  if (cls == FusionClass::Success) return {pp(Pauli::X, Pauli::X), pp(Pauli::Z, Pauli::Z)};
  if (child_layer == TreeKind::Physical) return {pp(failure_basis, Pauli::I), pp(Pauli::I, failure_basis)};
  const Pauli b = class_basis(cls);
  return {pp(b, b), pp(b, Pauli::I), pp(Pauli::I, b)};
}

FusionClass apply_rules(const StrategyNode& node, std::uint32_t detected) {
  for (const auto& r : node.rules) {
    int a = 0, b = 0;
    for (std::size_t i = 0; i < node.single_pairs.size(); ++i) {
      if (((r.pairs >> (node.single_pairs[i] - 1)) & 1u) == 0) continue;
      a += static_cast<int>((detected >> (2 * i)) & 1u);
      b += static_cast<int>((detected >> (2 * i + 1)) & 1u);
    }
    if (a >= r.min_per_side && b >= r.min_per_side) return r.cls;
  }
  return node.fallback;
}

LeafDecision decide_leaf(const PathContext& ctx, FusionClass declared, bool redundant) {
  static Memo<LeafDecision> memo;
  auto key = context_key(ctx);
  key.push_back(0xF0000000u | (static_cast<std::uint32_t>(declared) << 1) | (redundant ? 1u : 0u));
  return memo.get(key, [&] {
    auto rep = [&](PairPauli target) -> std::array<std::uint32_t, 2> {
      auto r = find_representatives(ctx.ops, ctx.sources, CodePauli::on_roots(target), redundant);
      if (r.empty()) return {0, 0};
      return {r[0], r.size() > 1 ? r[1] : 0u};
    };
    LeafDecision d;
    if (declared == FusionClass::Loss) return d;
    if (declared == FusionClass::Success) {
      auto xx = rep(pp(Pauli::X, Pauli::X)), zz = rep(pp(Pauli::Z, Pauli::Z));
      if (xx[0] != 0 && zz[0] != 0) {
        d.cls = FusionClass::Success;
        d.exposes = {pp(Pauli::X, Pauli::X), pp(Pauli::Z, Pauli::Z)};
        d.reps = {xx, zz};
        return d;
      }
      if (xx[0] == 0 && zz[0] == 0) return d;
      declared = xx[0] != 0 ? FusionClass::FailX : FusionClass::FailZ;
    }
    const Pauli b = class_basis(declared);
    auto par = rep(pp(b, b));
    if (par[0] == 0) return d;
    d.cls = declared;
    d.exposes = {pp(b, b)};
    d.reps = {par};
    auto ra = rep(pp(b, Pauli::I)), rb = rep(pp(Pauli::I, b));
    if (ra[0] != 0 && rb[0] != 0) {
      d.exposes.push_back(pp(b, Pauli::I));
      d.exposes.push_back(pp(Pauli::I, b));
      d.reps.push_back(ra);
      d.reps.push_back(rb);
    }
    return d;
  });
}

std::vector<Pauli> resolve_single_bases(const StrategyNode& node, const PathContext& ctx) {
  static Memo<std::vector<Pauli>> memo;
  auto key = context_key(ctx);
  key.push_back(0xE0000000u | static_cast<std::uint32_t>(node.fallback));
  for (int p : node.single_pairs) key.push_back(static_cast<std::uint32_t>(p));
  for (const auto& r : node.rules)
    key.push_back(0xD0000000u | (std::uint32_t{r.pairs} << 8) | (static_cast<std::uint32_t>(r.min_per_side) << 4) |
                  static_cast<std::uint32_t>(r.cls));
  return memo.get(key, [&] {
    constexpr double eta = 0.9;
    constexpr std::array<Pauli, 3> choices{Pauli::X, Pauli::Y, Pauli::Z};
    const std::size_t k = node.single_pairs.size();
    std::size_t combos = 1;
    for (std::size_t i = 0; i < k; ++i) combos *= 3;
    std::vector<Pauli> best;
    std::array<double, 2> best_score{-1.0, -1.0};
    for (std::size_t c = 0; c < combos; ++c) {
      std::vector<Pauli> bases(k);
      for (std::size_t i = 0, v = c; i < k; ++i, v /= 3) bases[i] = choices[v % 3];
      std::array<double, 2> score{0.0, 0.0};
      for (std::uint32_t det = 0; det < (1u << (2 * k)); ++det) {
        const int kept = std::popcount(det);
        const double p = std::pow(eta, kept) * std::pow(1.0 - eta, static_cast<int>(2 * k) - kept);
        const FusionClass want = apply_rules(node, det);
        if (want == FusionClass::Loss) continue;
        PathContext full = ctx;
        for (std::size_t i = 0; i < k; ++i)
          for (int side = 0; side < 2; ++side)
            if (((det >> (2 * i + side)) & 1u) != 0) {
              full.ops.push_back(CodePauli::single(node.single_pairs[i] + 5 * side, bases[i]));
              full.sources.push_back(static_cast<std::uint8_t>(8 + 2 * node.single_pairs[i] + side));
            }
        const FusionClass got = decide_leaf(full, want, false).cls;
        if (got == want) (want == FusionClass::Success ? score[0] : score[1]) += p;
      }
      if (score[0] > best_score[0] + 1e-12 ||
          (std::abs(score[0] - best_score[0]) <= 1e-12 && score[1] > best_score[1] + 1e-12)) {
        best_score = score;
        best = bases;
      }
    }
    return best;
  });
}

bool respects_emission_order(const StrategyTree& tree) {
  std::function<bool(int, int)> ok = [&](int idx, int last) -> bool {
    if (idx < 0 || static_cast<std::size_t>(idx) >= tree.nodes.size()) return false;
    const auto& n = tree.nodes[static_cast<std::size_t>(idx)];
    switch (n.kind) {
      case NodeKind::Leaf:
        return true;
      case NodeKind::Singles:
        return std::all_of(n.single_pairs.begin(), n.single_pairs.end(), [&](int p) { return p > last && p <= 4; }) &&
               std::is_sorted(n.single_pairs.begin(), n.single_pairs.end());
      case NodeKind::Fuse:
        if (n.pair <= last || n.pair > 4) return false;
        return std::all_of(n.next.begin(), n.next.end(), [&](int c) { return ok(c, n.pair); });
    }
    return false;
  };
  return ok(0, 0);
}

void to_json(nlohmann::json& j, const FusionStrategy& s) {
  j = nlohmann::json::object();
  j["spec"] = s.spec;
  auto layers = nlohmann::json::array();
  for (std::size_t i = 0; i < s.layers.size(); ++i) {
    const auto& tree = strategy_tree(s.layers[i]);
    nlohmann::json layer{{"level", i + 1}, {"kind", tree_kind_name(tree.kind)}};
    auto nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      nlohmann::json o;
      if (n.kind == NodeKind::Fuse) {
        o = {{"type", "fuse"}, {"pair", n.pair}, {"next", n.next}};
        if (tree.kind == TreeKind::Physical) o["failure_basis"] = std::string(1, to_char(n.failure_basis));
      } else if (n.kind == NodeKind::Singles) {
        std::string bases;
        for (auto b : n.canonical_bases) bases += to_char(b);
        auto rules = nlohmann::json::array();
        for (const auto& r : n.rules)
          rules.push_back({{"pairs", r.pairs}, {"min_per_side", r.min_per_side}, {"class", fusion_class_name(r.cls)}});
        o = {{"type", "singles"},
             {"pairs", n.single_pairs},
             {"bases", bases},
             {"rules", rules},
             {"fallback", fusion_class_name(n.fallback)}};
      } else {
        o = {{"type", "leaf"}, {"class", fusion_class_name(n.cls)}, {"redundant", n.redundant}};
      }
      nodes.push_back(std::move(o));
    }
    layer["nodes"] = std::move(nodes);
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
}

}  // namespace ringrep
