#include "ringrep/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "ringrep/analytics.hpp"

namespace ringrep {

namespace {

struct Candidate {
  double bound;  // cost with mu = 1 and no detection aborts
  int N, m, Ntilde;
  auto key() const { return std::tuple(bound, N, m, Ntilde); }
};

bool better(double c, const RateReport& r, double best_c, const RateReport& best) {
  return std::tuple(c, r.N, r.m, r.Ntilde) < std::tuple(best_c, best.N, best.m, best.Ntilde);
}

int max_stations(double L_km, const SearchBounds& b) {
  int m = static_cast<int>(std::min<double>(b.m_max, std::floor(L_km / b.L0_min_km) - 1));
  while (m >= 0 && L_km / (m + 1) < b.L0_min_km) --m;
  return m;
}

}  // namespace

void SearchBounds::validate() const {
  if (N_max < 1) throw std::invalid_argument("N_max must be at least 1");
  if (!(L0_min_km >= 1.0)) throw std::invalid_argument("minimum station spacing must be at least 1 km");
  if (m_max < 0) throw std::invalid_argument("m_max must be non-negative");
  if (Ntilde_min < 1 || Ntilde_max < Ntilde_min) throw std::invalid_argument("invalid switch-layer range");
  if (!(eta_d > 0 && eta_d <= 1)) throw std::invalid_argument("eta_d must lie in (0, 1]");
  if (!(L_att_km > 0)) throw std::invalid_argument("attenuation length must be positive");
}

double cost(const RateReport& report, const ChannelParams& channel, const TimingParams& timing) {
  if (!(report.R > 0)) return INFINITY;
  return report.N_E * static_cast<double>(channel.m) * channel.L_att_km / (report.R * timing.tau_gen * 1e-9 * channel.L_km);
}

OptimizationResult optimize(double L_km, double lambda, const TimingParams& timing, const SearchBounds& bounds) {
  bounds.validate();
  timing.validate();
  if (!(L_km > 0)) throw std::invalid_argument("distance must be positive");
  if (!(lambda >= 0 && lambda <= 0.75)) throw std::invalid_argument("lambda must lie in [0, 3/4]");
  OptimizationResult out;
  const int m_hi = max_stations(L_km, bounds);
  if (m_hi < 0) return out;
  const int m_lo = m_hi >= 1 ? 1 : 0;

  auto channel = [&](int m) { return ChannelParams{L_km, m, bounds.eta_d, bounds.L_att_km}; };
  std::vector<Candidate> cands;
  for (int N = 1; N <= bounds.N_max; ++N) {
    const double tau0 = generation_time(RingCodeSpec{4, N, N}, timing);
    for (int Nt = bounds.Ntilde_min; Nt <= std::min(N, bounds.Ntilde_max); ++Nt)
      for (int m = m_lo; m <= m_hi; ++m) {
        const auto ch = channel(m);
        const double ps = ft_fusion_success(ch.eta(), N, Nt);
        RateReport ub;
        ub.N_E = N + 1;
        ub.R = bell_probability(ps, m) / tau0;
        const double c = cost(ub, ch, timing);
        if (std::isfinite(c)) cands.push_back({c, N, m, Nt});
      }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.key() < b.key(); });
  for (const auto& c : cands) {
    if (out.feasible && c.bound > out.cost) break;
    const auto ch = channel(c.m);
    const auto r = ring_rate(ch, timing, RingCodeSpec{4, c.N, c.Ntilde}, lambda);
    ++out.evaluated;
    const double cc = cost(r, ch, timing);
    if (!std::isfinite(cc)) continue;
    if (!out.feasible || better(cc, r, out.cost, out.best)) {
      out.feasible = true;
      out.best = r;
      out.cost = cc;
    }
  }
  return out;
}

std::vector<SweepCell> sweep(const std::vector<double>& L_list, const std::vector<double>& lambda_list,
                             const TimingParams& timing, const SearchBounds& bounds, unsigned threads) {
  if (L_list.empty() || lambda_list.empty()) throw std::invalid_argument("sweep needs nonempty lists");
  std::vector<SweepCell> cells;
  for (double lam : lambda_list)
    for (double L : L_list) cells.push_back({L, lam, {}});
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        cells[i].result = optimize(cells[i].L_km, cells[i].lambda, timing, bounds);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  unsigned n = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, cells.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return cells;
}

void write_sweep_csv_header(std::ostream& os) {
  os << "L_km,lambda,m,N,Ntilde,L0_km,R_hz,q,mu,eps_d,tau0_s,NE,cost\n";
}

void write_sweep_csv_row(std::ostream& os, const SweepCell& cell) {
  const auto prec = os.precision(12);
  const auto& r = cell.result.best;
  os << cell.L_km << ',' << cell.lambda << ',';
  if (cell.result.feasible)
    os << r.m << ',' << r.N << ',' << r.Ntilde << ',' << r.L0_km << ',' << r.R << ',' << r.q << ',' << r.mu << ','
       << r.eps_d << ',' << r.tau0_s << ',' << r.N_E << ',' << cell.result.cost << '\n';
  else
    os << ",,,,0,,,,,,inf\n";
  os.precision(prec);
}

void to_json(nlohmann::json& j, const OptimizationResult& r) {
  j = {{"feasible", r.feasible}, {"evaluated", r.evaluated}};
  if (r.feasible) {
    j["best"] = r.best;
    j["cost"] = r.cost;
  } else {
    j["best"] = nullptr;
    j["cost"] = nullptr;
  }
}

void to_json(nlohmann::json& j, const SearchBounds& b) {
  j = {{"N_max", b.N_max},           {"L0_min_km", b.L0_min_km}, {"m_max", b.m_max},
       {"Ntilde_min", b.Ntilde_min}, {"Ntilde_max", b.Ntilde_max}, {"eta_d", b.eta_d},
       {"L_att_km", b.L_att_km}};
}

}  // namespace ringrep
