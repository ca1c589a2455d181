#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ringrep/graph_form.hpp"
#include "ringrep/stabilizer.hpp"

namespace ringrep {

// n: unit ring size, depth: concatenation depth (1 = bare ring), switch_layer: first layer of the
// all-fuse strategy is switch_layer + 1, so switch_layer == depth means loss protection everywhere.
struct RingCodeSpec {
  int n = 4;
  int depth = 1;
  int switch_layer = 1;

  void validate() const;
  std::size_t photon_count() const;
};

struct ResourceCounts {
  std::uint64_t cz = 0;  // spin-spin entangling gates, Hadamards on memory spins included
  std::uint64_t measurements = 0;
  std::uint64_t photons = 0;
  bool operator==(const ResourceCounts&) const = default;
};

ResourceCounts resource_counts(const RingCodeSpec& spec);

// Costed overhead for joining two encoded rings into a two-qubit line.
struct LineJoinCost {
  int hadamards = 1;
  int cz = 2;
  int measurements = 1;
};

// Photons are labelled 1..n^depth in emission order; qubit 0 is the encoding root.
// A block at level l (1..depth) with index i covers photons i*n^l + 1 .. (i+1)*n^l.
struct BlockRef {
  int level = 0;
  std::size_t index = 0;
};
std::size_t block_first_photon(int n, BlockRef b);
std::size_t block_size(int n, int level);
BlockRef child_block(int n, BlockRef b, int k);  // k = 0..n-1

// Root + photons of the concatenated code after all virtual X measurements (outcome +1).
// Throws std::length_error beyond kMaxCodeQubits qubits in the unmeasured tree.
inline constexpr std::size_t kMaxCodeQubits = 4096;
StabilizerTableau code_state(const RingCodeSpec& spec);

struct VirtualVertex {
  int level = 0;  // level of the block it roots
  std::size_t first_photon = 0;
  std::size_t last_photon = 0;
};

struct GraphSpec {
  RingCodeSpec spec;
  Adjacency adjacency;           // vertex 0 = root, 1.. = photons
  std::vector<Gate> local_ops;   // L with L |code> = |G>
  std::vector<std::vector<VirtualVertex>> virtual_layers;  // index 0 = level 1

  std::size_t num_vertices() const { return adjacency.size(); }
  std::size_t num_edges() const;
  StabilizerTableau state() const;  // L^dagger |G>
};

GraphSpec build_concatenated_ring(const RingCodeSpec& spec);

enum class GenOpKind : std::uint8_t { InitSpin, EmitPhoton, CZ, Hadamard, Phase, PhaseDag, MeasureSpin };

// Spins: 0 = root memory spin, 1..depth-1 = further memory spins, depth = optically active spin.
// EmitPhoton(a -> p): photon p starts in |0>, then CX(a, p) and H(a).
// Phase / PhaseDag are deterministic byproduct corrections and are not counted as gates.
struct GenOp {
  GenOpKind kind;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  Pauli basis = Pauli::I;
};

struct GenerationSequence {
  RingCodeSpec spec;
  bool line = false;
  std::size_t num_spins = 0;
  std::size_t num_photons = 0;
  std::vector<GenOp> ops;

  // CZ-class operations (CZ + Hadamard), spin measurements, photons.
  ResourceCounts counts() const;
  std::size_t count(GenOpKind k) const;
};

GenerationSequence generation_sequence(const RingCodeSpec& spec, bool as_two_qubit_line);

struct GenerationResult {
  StabilizerTableau state;   // single ring: root + photons; line: photons only
  PauliFrame byproducts;     // Pauli corrections applied for -1 spin outcomes (same indexing as state)
  std::vector<int> outcomes;
};

// Runs the sequence with random spin outcomes; -1 outcomes are corrected by a Pauli byproduct.
GenerationResult execute_generation(const GenerationSequence& seq, Rng& rng);

// Two measurement patterns per logical operator of the bare n = 4 ring; I marks an unmeasured qubit.
using MeasurementPattern = std::array<Pauli, 4>;
std::array<MeasurementPattern, 2> pauli_patterns(Pauli logical);

const char* gen_op_name(GenOpKind k);
void to_json(nlohmann::json& j, const RingCodeSpec& s);
void from_json(const nlohmann::json& j, RingCodeSpec& s);
void to_json(nlohmann::json& j, const ResourceCounts& c);
void to_json(nlohmann::json& j, const GraphSpec& g);
void to_json(nlohmann::json& j, const GenerationSequence& s);

}  // namespace ringrep
