#pragma once

#include <cstddef>
#include <vector>

#include "ringrep/stabilizer.hpp"

namespace ringrep {

// Local operations L (applied in listed order) and graph G with L|psi> = |G> exactly.
struct GraphForm {
  Adjacency adjacency;
  std::vector<Gate> local_ops;
};

GraphForm to_graph_form(const StabilizerTableau& t);

// Reduced state on `keep` when every other qubit is unentangled with them (product across the cut).
// Throws if the cut is entangled.
StabilizerTableau restrict_to(const StabilizerTableau& t, const std::vector<std::size_t>& keep);

}  // namespace ringrep
