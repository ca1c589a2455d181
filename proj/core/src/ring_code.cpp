#include "ringrep/ring_code.hpp"

#include <functional>
#include <limits>
#include <stdexcept>

namespace ringrep {

void RingCodeSpec::validate() const {
  if (n < 3) throw std::invalid_argument("ring size n must be at least 3");
  if (depth < 1) throw std::invalid_argument("concatenation depth must be at least 1");
  if (switch_layer < 1 || switch_layer > depth) throw std::invalid_argument("switch layer must lie in [1, depth]");
  (void)photon_count();
}

std::size_t RingCodeSpec::photon_count() const {
  std::size_t p = 1;
  for (int i = 0; i < depth; ++i) {
    if (p > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(n))
      throw std::overflow_error("photon count overflows");
    p *= static_cast<std::size_t>(n);
  }
  return p;
}

ResourceCounts resource_counts(const RingCodeSpec& spec) {
  spec.validate();
  const std::uint64_t n = static_cast<std::uint64_t>(spec.n);
  ResourceCounts c{2, 1, n};
  if (spec.depth == 1) return c;
  c = {3 * n + 1, n + 1, n * n};
  for (int N = 3; N <= spec.depth; ++N) {
    c.cz = n * c.cz + n + 1;
    c.measurements = n * c.measurements + 1;
    c.photons *= n;
  }
  return c;
}

std::size_t block_size(int n, int level) {
  std::size_t s = 1;
  for (int i = 0; i < level; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

std::size_t block_first_photon(int n, BlockRef b) { return b.index * block_size(n, b.level) + 1; }

BlockRef child_block(int n, BlockRef b, int k) {
  if (b.level < 1 || k < 0 || k >= n) throw std::out_of_range("child_block: invalid block or child index");
  return {b.level - 1, b.index * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)};
}

namespace {

struct Tree {
  Adjacency adj;
  std::vector<std::size_t> virtuals;  // measurement order: deepest first is not required, X commutes
  std::vector<std::vector<VirtualVertex>> layers;
};

Tree unmeasured_tree(const RingCodeSpec& spec) {
  const std::size_t nph = spec.photon_count();
  std::size_t nvirt = 0;
  for (int l = 1; l < spec.depth; ++l) nvirt += block_size(spec.n, spec.depth - l);
  const std::size_t total = 1 + nph + nvirt;
  if (total > kMaxCodeQubits) throw std::length_error("state space too large for an explicit code tableau");

  Tree t;
  t.adj.assign(total, std::vector<bool>(total, false));
  t.layers.resize(static_cast<std::size_t>(spec.depth > 1 ? spec.depth - 1 : 0));
  auto edge = [&](std::size_t a, std::size_t b) { t.adj[a][b] = t.adj[b][a] = true; };
  std::size_t next_photon = 1, next_virtual = 1 + nph;

  std::function<void(std::size_t, int)> ring = [&](std::size_t root, int level) {
    std::vector<std::size_t> code(static_cast<std::size_t>(spec.n));
    for (int k = 0; k < spec.n; ++k) {
      if (level == 1) {
        code[k] = next_photon++;
      } else {
        const std::size_t v = next_virtual++;
        const std::size_t first = next_photon;
        ring(v, level - 1);
        t.virtuals.push_back(v);
        t.layers[static_cast<std::size_t>(level - 2)].push_back({level - 1, first, next_photon - 1});
        code[k] = v;
      }
    }
    edge(root, code.front());
    for (std::size_t k = 0; k + 1 < code.size(); ++k) edge(code[k], code[k + 1]);
    edge(code.back(), root);
  };
  ring(0, spec.depth);
  return t;
}

}  // namespace

StabilizerTableau code_state(const RingCodeSpec& spec) {
  spec.validate();
  Tree t = unmeasured_tree(spec);
  StabilizerTableau s = graph_state(t.adj);
  Rng rng(0);
  for (std::size_t v : t.virtuals) s.measure(v, Pauli::X, rng, 1);
  std::vector<std::size_t> keep(1 + spec.photon_count());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
  return restrict_to(s, keep);
}

std::size_t GraphSpec::num_edges() const {
  std::size_t e = 0;
  for (std::size_t i = 0; i < adjacency.size(); ++i)
    for (std::size_t j = i + 1; j < adjacency.size(); ++j) e += adjacency[i][j] ? 1 : 0;
  return e;
}

StabilizerTableau GraphSpec::state() const {
  StabilizerTableau t = graph_state(adjacency);
  for (auto it = local_ops.rbegin(); it != local_ops.rend(); ++it) {
    Gate g = *it;
    if (g.kind == GateKind::S) g.kind = GateKind::Sdg;
    else if (g.kind == GateKind::Sdg) g.kind = GateKind::S;
    t.apply(g);
  }
  return t;
}

GraphSpec build_concatenated_ring(const RingCodeSpec& spec) {
  spec.validate();
  GraphSpec g;
  g.spec = spec;
  Tree t = unmeasured_tree(spec);
  g.virtual_layers = std::move(t.layers);
  auto form = to_graph_form(code_state(spec));
  g.adjacency = std::move(form.adjacency);
  g.local_ops = std::move(form.local_ops);
  return g;
}

std::size_t GenerationSequence::count(GenOpKind k) const {
  std::size_t c = 0;
  for (const auto& op : ops) c += op.kind == k ? 1 : 0;
  return c;
}

ResourceCounts GenerationSequence::counts() const {
  return {count(GenOpKind::CZ) + count(GenOpKind::Hadamard), count(GenOpKind::MeasureSpin),
          count(GenOpKind::EmitPhoton)};
}

GenerationSequence generation_sequence(const RingCodeSpec& spec, bool as_two_qubit_line) {
  spec.validate();
  GenerationSequence seq;
  seq.spec = spec;
  seq.line = as_two_qubit_line;
  seq.num_spins = static_cast<std::size_t>(spec.depth) + 1;
  const std::size_t per_ring = spec.photon_count();
  seq.num_photons = as_two_qubit_line ? 2 * per_ring : per_ring;

  const auto active = static_cast<std::uint32_t>(spec.depth);
  auto emitter = [&](int level) -> std::uint32_t {
    return level == 1 ? active : static_cast<std::uint32_t>(spec.depth - level + 1);
  };
  std::uint32_t photon = 0;
  auto push = [&](GenOpKind k, std::uint32_t a, std::uint32_t b = 0, Pauli basis = Pauli::I) {
    seq.ops.push_back({k, a, b, basis});
  };

  std::function<void(int, std::uint32_t)> block = [&](int level, std::uint32_t root) {
    const std::uint32_t e = emitter(level);
    push(GenOpKind::CZ, root, e);
    for (int k = 1; k <= spec.n; ++k) {
      if (level == 1) {
        // Y-measurement byproduct on the last photon, moved onto the emitter before emission.
        if (k == spec.n) push(GenOpKind::PhaseDag, e);
        push(GenOpKind::EmitPhoton, e, photon++);
      } else {
        block(level - 1, e);
        if (k < spec.n) push(GenOpKind::Hadamard, e);
      }
    }
    push(GenOpKind::CZ, root, e);
    if (level > 1) push(GenOpKind::Phase, e);
    push(GenOpKind::MeasureSpin, e, 0, Pauli::Y);
    push(GenOpKind::InitSpin, e);
    if (level == 1) push(GenOpKind::PhaseDag, root);
  };

  for (std::uint32_t s = 0; s < seq.num_spins; ++s) push(GenOpKind::InitSpin, s);
  block(spec.depth, 0);
  if (as_two_qubit_line) {
    push(GenOpKind::Hadamard, 0);
    block(spec.depth, 0);
    push(GenOpKind::MeasureSpin, 0, 0, Pauli::X);
  }
  return seq;
}

GenerationResult execute_generation(const GenerationSequence& seq, Rng& rng) {
  // Tableau layout: 0 = root spin, 1..P = photons, then spins 1..depth.
  const std::size_t P = seq.num_photons;
  const std::size_t total = 1 + P + (seq.num_spins - 1);
  auto spin = [&](std::uint32_t s) -> std::size_t { return s == 0 ? 0 : P + s; };
  StabilizerTableau t(total);
  PauliString corrections(total);
  GenerationResult out;

  for (const auto& op : seq.ops) {
    switch (op.kind) {
      case GenOpKind::InitSpin: {
        const std::size_t q = spin(op.a);
        if (t.measure(q, Pauli::Z, rng).value < 0) t.x(q);
        t.h(q);
        break;
      }
      case GenOpKind::EmitPhoton: {
        const std::size_t a = spin(op.a);
        t.cx(a, 1 + op.b);
        t.h(a);
        break;
      }
      case GenOpKind::CZ: t.cz(spin(op.a), spin(op.b)); break;
      case GenOpKind::Hadamard: t.h(spin(op.a)); break;
      case GenOpKind::Phase: t.s(spin(op.a)); break;
      case GenOpKind::PhaseDag: t.s_dag(spin(op.a)); break;
      case GenOpKind::MeasureSpin: {
        const std::size_t q = spin(op.a);
        const PauliString m = PauliString::single(total, q, op.basis);
        PauliString flip(total);
        bool have_flip = false;
        for (const auto& g : t.stabilizers()) {
          if (!g.commutes(m)) {
            flip = g;
            have_flip = true;
            break;
          }
        }
        auto r = t.measure(q, op.basis, rng);
        out.outcomes.push_back(r.value);
        if (r.value < 0 && have_flip) {
          flip.set_phase(0);
          t.apply_pauli(flip);
          corrections *= flip;
        }
        break;
      }
    }
  }

  std::vector<std::size_t> keep;
  if (!seq.line) keep.push_back(0);
  for (std::size_t p = 1; p <= P; ++p) keep.push_back(p);
  out.state = restrict_to(t, keep);
  out.byproducts = PauliFrame(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) out.byproducts.set(i, corrections.get(keep[i]));
  return out;
}

std::array<MeasurementPattern, 2> pauli_patterns(Pauli logical) {
  using P = Pauli;
  switch (logical) {
    case P::X: return {{{P::Z, P::I, P::I, P::Z}, {P::I, P::Y, P::Y, P::I}}};
    case P::Y: return {{{P::Y, P::I, P::X, P::I}, {P::I, P::X, P::I, P::Y}}};
    case P::Z: return {{{P::X, P::Z, P::I, P::I}, {P::I, P::I, P::Z, P::X}}};
    default: throw std::invalid_argument("pauli_patterns: logical must be X, Y or Z");
  }
}

const char* gen_op_name(GenOpKind k) {
  switch (k) {
    case GenOpKind::InitSpin: return "InitSpin";
    case GenOpKind::EmitPhoton: return "EmitPhoton";
    case GenOpKind::CZ: return "CZ";
    case GenOpKind::Hadamard: return "Hadamard";
    case GenOpKind::Phase: return "Phase";
    case GenOpKind::PhaseDag: return "PhaseDag";
    case GenOpKind::MeasureSpin: return "MeasureSpin";
  }
  return "?";
}

namespace {
const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::Sdg: return "Sdg";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::CZ: return "CZ";
    case GateKind::CX: return "CX";
  }
  return "?";
}
}  // namespace

void to_json(nlohmann::json& j, const RingCodeSpec& s) {
  j = {{"n", s.n}, {"depth", s.depth}, {"switch_layer", s.switch_layer}};
}

void from_json(const nlohmann::json& j, RingCodeSpec& s) {
  s.n = j.value("n", 4);
  s.depth = j.value("depth", 1);
  s.switch_layer = j.value("switch_layer", s.depth);
}

void to_json(nlohmann::json& j, const ResourceCounts& c) {
  j = {{"f_cz", c.cz}, {"f_m", c.measurements}, {"f_p", c.photons}};
}

void to_json(nlohmann::json& j, const GraphSpec& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t a = 0; a < g.adjacency.size(); ++a)
    for (std::size_t b = a + 1; b < g.adjacency.size(); ++b)
      if (g.adjacency[a][b]) edges.push_back({a, b});
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : g.local_ops) ops.push_back({{"gate", gate_name(op.kind)}, {"qubit", op.a}});
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : g.virtual_layers) {
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& v : layer) vs.push_back({{"level", v.level}, {"first_photon", v.first_photon}, {"last_photon", v.last_photon}});
    layers.push_back(vs);
  }
  j = {{"spec", g.spec}, {"vertices", g.num_vertices()}, {"root", 0}, {"edges", edges},
       {"local_ops", ops}, {"virtual_layers", layers}};
}

void to_json(nlohmann::json& j, const GenerationSequence& s) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : s.ops) {
    nlohmann::json o = {{"op", gen_op_name(op.kind)}};
    switch (op.kind) {
      case GenOpKind::EmitPhoton: o["spin"] = op.a; o["photon"] = op.b + 1; break;
      case GenOpKind::CZ: o["spins"] = {op.a, op.b}; break;
      case GenOpKind::MeasureSpin: o["spin"] = op.a; o["basis"] = std::string(1, to_char(op.basis)); break;
      default: o["spin"] = op.a; break;
    }
    ops.push_back(o);
  }
  j = {{"spec", s.spec}, {"line", s.line}, {"spins", s.num_spins}, {"photons", s.num_photons},
       {"counts", s.counts()}, {"ops", ops}};
}

}  // namespace ringrep
