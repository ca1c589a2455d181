#include "ringrep/graph_form.hpp"

#include <stdexcept>

namespace ringrep {

namespace {

// Gauss-Jordan on the X block; returns pivot column per reduced row (rows beyond rank have no X part).
std::vector<std::size_t> reduce_x(std::vector<PauliString>& rows) {
  const std::size_t n = rows.empty() ? 0 : rows[0].size();
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < n && rank < rows.size(); ++c) {
    std::size_t p = rank;
    while (p < rows.size() && !x_bit(rows[p].get(c))) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != rank && x_bit(rows[r].get(c))) rows[r] *= rows[rank];
    pivots.push_back(c);
    ++rank;
  }
  return pivots;
}

}  // namespace

GraphForm to_graph_form(const StabilizerTableau& t) {
  const std::size_t n = t.num_qubits();
  StabilizerTableau work = t;
  GraphForm out;

  auto rows = work.stabilizers();
  const auto pivots = reduce_x(rows);
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  for (std::size_t q = 0; q < n; ++q)
    if (!is_pivot[q]) {
      work.h(q);
      out.local_ops.push_back({GateKind::H, static_cast<std::uint32_t>(q), 0});
    }

  rows = work.stabilizers();
  if (reduce_x(rows).size() != n) throw std::logic_error("graph form: X block not invertible");
  for (std::size_t q = 0; q < n; ++q)
    if (z_bit(rows[q].get(q))) {
      work.s_dag(q);
      out.local_ops.push_back({GateKind::Sdg, static_cast<std::uint32_t>(q), 0});
    }

  rows = work.stabilizers();
  reduce_x(rows);
  for (std::size_t q = 0; q < n; ++q)
    if (rows[q].sign() < 0) {
      work.z(q);
      out.local_ops.push_back({GateKind::Z, static_cast<std::uint32_t>(q), 0});
    }

  rows = work.stabilizers();
  reduce_x(rows);
  out.adjacency.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && z_bit(rows[i].get(j))) out.adjacency[i][j] = true;
  if (!work.same_state(graph_state(out.adjacency))) throw std::logic_error("graph form: reduction failed");
  return out;
}

StabilizerTableau restrict_to(const StabilizerTableau& t, const std::vector<std::size_t>& keep) {
  const std::size_t n = t.num_qubits();
  std::vector<bool> kept(n, false);
  for (auto q : keep) {
    if (q >= n) throw std::out_of_range("restrict_to: index out of range");
    kept[q] = true;
  }
  auto rows = t.stabilizers();
  // Eliminate every x and z column outside `keep`; surviving rows live on `keep` only.
  std::size_t rank = 0;
  for (std::size_t q = 0; q < n; ++q) {
    if (kept[q]) continue;
    for (int part = 0; part < 2; ++part) {
      auto has = [&](const PauliString& p) { return part == 0 ? x_bit(p.get(q)) : z_bit(p.get(q)); };
      std::size_t p = rank;
      while (p < rows.size() && !has(rows[p])) ++p;
      if (p == rows.size()) continue;
      std::swap(rows[p], rows[rank]);
      for (std::size_t r = rank + 1; r < rows.size(); ++r)
        if (has(rows[r])) rows[r] *= rows[rank];
      ++rank;
    }
  }
  std::vector<PauliString> gens;
  for (std::size_t r = rank; r < rows.size(); ++r) {
    PauliString g(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) g.set(i, rows[r].get(keep[i]));
    g.set_phase(rows[r].phase());
    gens.push_back(g);
  }
  if (gens.size() != keep.size()) throw std::invalid_argument("restrict_to: kept qubits are entangled with the rest");
  return StabilizerTableau::from_generators(gens);
}

}  // namespace ringrep
