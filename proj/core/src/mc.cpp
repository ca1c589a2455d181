#include "ringrep/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "ringrep/strategy.hpp"

namespace ringrep {

namespace {

constexpr std::uint64_t kPartition = 1024;

// A decoded logical value: the physical operator product it was read from, its reported value and
// whether a lower level flagged it.
struct LValue {
  PauliString m;
  int o = 1;
  bool flag = false;
};

struct SubResult {
  FusionClass cls = FusionClass::Loss;
  std::vector<PairPauli> exposes;
  std::vector<LValue> vals;
};

struct TrialResult {
  McOutcome outcome = McOutcome::Loss;
  std::uint8_t parity_bits = 0;
};

Pauli flipper(Pauli basis) { return basis == Pauli::Z ? Pauli::X : Pauli::Z; }

StabilizerTableau tensor_square(const StabilizerTableau& a) {
  const std::size_t m = a.num_qubits();
  std::vector<PauliString> gens;
  for (const auto& s : a.stabilizers())
    for (std::size_t off : {std::size_t{0}, m}) {
      PauliString g(2 * m);
      for (std::size_t q = 0; q < m; ++q) g.set(off + q, s.get(q));
      g.set_phase(s.phase());
      gens.push_back(std::move(g));
    }
  return StabilizerTableau::from_generators(std::move(gens));
}

const StabilizerTableau& initial_state(int depth, McMode mode) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<StabilizerTableau>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{depth, static_cast<int>(mode)}];
  if (!slot) {
    const auto one = code_state(RingCodeSpec{4, depth, depth});
    slot = std::make_unique<StabilizerTableau>(mode == McMode::Fusion ? tensor_square(one) : one);
  }
  return *slot;
}

std::size_t qubits_needed(const RingCodeSpec& spec, McMode mode) {
  const std::size_t ring = spec.photon_count() + 1;
  return mode == McMode::Fusion ? 2 * ring : ring;
}

void check_budget(const RingCodeSpec& spec, McMode mode) {
  spec.validate();
  if (spec.n != 4) throw std::invalid_argument("simulation supports n = 4 rings only");
  if (spec.depth > 5 || qubits_needed(spec, mode) > kMaxCodeQubits)
    throw std::length_error("resource bound exceeded: too many qubits for the stabilizer simulation");
}

template <class Chooser>
class Walker {
 public:
  Walker(const RingCodeSpec& spec, const StabilizerTableau& init, Chooser& ch, Rng& rng)
      : spec_(spec),
        strat_(fusion_strategy(spec)),
        init_(init),
        t_(init),
        frame_(init.num_qubits()),
        ch_(ch),
        rng_(rng),
        n_(init.num_qubits()) {}

  TrialResult fusion_trial() {
    const BlockRef top{spec_.depth, 0};
    const std::size_t off_b = spec_.photon_count() + 1;
    auto r = fuse_level(spec_.depth, top, top, off_b);
    TrialResult out;
    switch (r.cls) {
      case FusionClass::Loss: out.outcome = McOutcome::Loss; return out;
      case FusionClass::FailX: out.outcome = McOutcome::FailX; return out;
      case FusionClass::FailZ: out.outcome = McOutcome::FailZ; return out;
      case FusionClass::FailY: throw std::logic_error("logical fusion ended in a Y failure");
      case FusionClass::Success: break;
    }
    bool any_flag = false, any_wrong = false;
    for (int p = 0; p < 2; ++p) {
      const Pauli b = p == 0 ? Pauli::X : Pauli::Z;
      const auto it = std::find(r.exposes.begin(), r.exposes.end(), PairPauli{b, b});
      if (it == r.exposes.end()) throw std::logic_error("success without both parities");
      const LValue& v = r.vals[static_cast<std::size_t>(it - r.exposes.begin())];
      PauliString target(n_);
      target.set(0, b);
      target.set(off_b, b);
      const bool wrong = decode(target, v) != truth(target);
      if (v.flag) {
        out.parity_bits |= static_cast<std::uint8_t>(2u << (2 * p));
        any_flag = true;
      } else if (wrong) {
        out.parity_bits |= static_cast<std::uint8_t>(1u << (2 * p));
        any_wrong = true;
      }
    }
    out.outcome = any_flag ? McOutcome::Detected : (any_wrong ? McOutcome::Error : McOutcome::Success);
    return out;
  }

  TrialResult pauli_trial(Pauli logical) {
    auto v = measure_logical(0, BlockRef{spec_.depth, 0}, logical);
    TrialResult out;
    if (!v) return out;
    PauliString target(n_);
    target.set(0, logical);
    if (v->flag) {
      out.outcome = McOutcome::Detected;
      out.parity_bits = 2;
    } else if (decode(target, *v) != truth(target)) {
      out.outcome = McOutcome::Error;
      out.parity_bits = 1;
    } else {
      out.outcome = McOutcome::Success;
    }
    return out;
  }

 private:
  const RingCodeSpec& spec_;
  FusionStrategy strat_;
  const StabilizerTableau& init_;
  StabilizerTableau t_;
  PauliFrame frame_;
  Chooser& ch_;
  Rng& rng_;
  std::size_t n_;

  int decode(const PauliString& target, const LValue& v) const {
    const int s = init_.expectation(target * v.m);
    if (s == 0) throw std::logic_error("decoded operator is not a representative of the target");
    return s * v.o;
  }

  int truth(const PauliString& target) const {
    const int s = t_.expectation(target);
    if (s == 0) throw std::logic_error("target not fixed by the measurements");
    return s;
  }

  LValue product(const std::vector<LValue>& vals, std::uint32_t mask) const {
    LValue out{PauliString(n_), 1, false};
    for (std::size_t i = 0; i < vals.size(); ++i)
      if ((mask >> i) & 1u) {
        out.m *= vals[i].m;
        out.o *= vals[i].o;
        out.flag = out.flag || vals[i].flag;
      }
    return out;
  }

  // Two representatives of the same operator: agreement needs their product to be a stabilizer
  // with the sign given by the reported values.
  LValue combine(const LValue& a, const LValue& b) const {
    if (a.flag != b.flag) return a.flag ? b : a;
    if (a.flag) return a;
    const int s = init_.expectation(a.m * b.m);
    if (s == 0) throw std::logic_error("representatives do not share a target");
    if (a.o * b.o == s) return a;
    LValue out = a;
    out.flag = true;
    return out;
  }

  std::optional<LValue> measure_photon(std::size_t q, Pauli basis) {
    if (ch_.lost()) {
      measure_pauli(t_, q, basis, frame_, true, rng_);
      return std::nullopt;
    }
    frame_.set(q, ch_.single_error(basis));
    const auto mo = measure_pauli(t_, q, basis, frame_, false, rng_);
    return LValue{PauliString::single(n_, q, basis), mo.value, false};
  }

  std::optional<LValue> measure_logical(std::size_t off, BlockRef blk, Pauli basis) {
    const auto pats = pauli_patterns(basis);
    std::array<std::optional<LValue>, 4> sub;
    const std::size_t first = off + block_first_photon(4, blk);
    for (int k = 0; k < 4; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      const Pauli p = pats[0][uk] != Pauli::I ? pats[0][uk] : pats[1][uk];
      sub[uk] = blk.level == 1 ? measure_photon(first + uk, p) : measure_logical(off, child_block(4, blk, k), p);
    }
    std::array<std::optional<LValue>, 2> rep;
    for (std::size_t j = 0; j < 2; ++j) {
      LValue v{PauliString(n_), 1, false};
      bool ok = true;
      for (std::size_t k = 0; k < 4 && ok; ++k) {
        if (pats[j][k] == Pauli::I) continue;
        if (!sub[k]) {
          ok = false;
          break;
        }
        v.m *= sub[k]->m;
        v.o *= sub[k]->o;
        v.flag = v.flag || sub[k]->flag;
      }
      if (ok) rep[j] = std::move(v);
    }
    if (rep[0] && rep[1]) return combine(*rep[0], *rep[1]);
    if (rep[0]) return rep[0];
    return rep[1];
  }

  SubResult physical_fusion(std::size_t qa, std::size_t qb, Pauli basis) {
    const bool la = ch_.lost();
    const bool lb = ch_.lost();
    FusionOptions opt;
    opt.failure_basis = basis;
    if (!la && !lb) {
      const bool success = ch_.coin();
      opt.forced_success = success;
      const auto [ea, eb] = ch_.fusion_errors(success, basis);
      frame_.set(qa, ea);
      frame_.set(qb, eb);
    }
    const auto ev = fuse(t_, qa, qb, opt, frame_, la, lb, rng_);
    SubResult r;
    if (ev.kind == FusionEvent::Kind::Loss) return r;
    if (ev.kind == FusionEvent::Kind::Success) {
      r.cls = FusionClass::Success;
      r.exposes = {{Pauli::X, Pauli::X}, {Pauli::Z, Pauli::Z}};
      PauliString xx(n_), zz(n_);
      xx.set(qa, Pauli::X);
      xx.set(qb, Pauli::X);
      zz.set(qa, Pauli::Z);
      zz.set(qb, Pauli::Z);
      r.vals = {{xx, ev.xx, false}, {zz, ev.zz, false}};
      return r;
    }
    r.cls = basis == Pauli::X ? FusionClass::FailX : (basis == Pauli::Y ? FusionClass::FailY : FusionClass::FailZ);
    r.exposes = {{basis, Pauli::I}, {Pauli::I, basis}};
    r.vals = {{PauliString::single(n_, qa, basis), ev.value_a, false},
              {PauliString::single(n_, qb, basis), ev.value_b, false}};
    return r;
  }

  SubResult fuse_level(int level, BlockRef a, BlockRef b, std::size_t off_b) {
    const auto& tree = strat_.tree(level);
    PathContext ctx;
    std::vector<LValue> vals;
    int idx = 0;
    FusionClass cls = FusionClass::Loss;
    bool redundant = false;
    while (true) {
      const auto& n = tree.nodes.at(static_cast<std::size_t>(idx));
      if (n.kind == NodeKind::Leaf) {
        cls = n.cls;
        redundant = n.redundant;
        break;
      }
      if (n.kind == NodeKind::Singles) {
        const auto bases = resolve_single_bases(n, ctx);
        std::uint32_t det = 0;
        for (std::size_t i = 0; i < n.single_pairs.size(); ++i) {
          const int pair = n.single_pairs[i];
          for (int side = 0; side < 2; ++side) {
            const BlockRef blk = side == 0 ? a : b;
            const std::size_t off = side == 0 ? 0 : off_b;
            auto v = level == 1
                         ? measure_photon(off + block_first_photon(4, blk) + static_cast<std::size_t>(pair - 1), bases[i])
                         : measure_logical(off, child_block(4, blk, pair - 1), bases[i]);
            if (!v) continue;
            det |= 1u << (2 * i + static_cast<std::size_t>(side));
            ctx.ops.push_back(CodePauli::single(pair + 5 * side, bases[i]));
            ctx.sources.push_back(static_cast<std::uint8_t>(8 + 2 * pair + side));
            vals.push_back(std::move(*v));
          }
        }
        cls = apply_rules(n, det);
        break;
      }
      SubResult child =
          level == 1 ? physical_fusion(block_first_photon(4, a) + static_cast<std::size_t>(n.pair - 1),
                                       off_b + block_first_photon(4, b) + static_cast<std::size_t>(n.pair - 1),
                                       n.failure_basis)
                     : fuse_level(level - 1, child_block(4, a, n.pair - 1), child_block(4, b, n.pair - 1), off_b);
      for (std::size_t e = 0; e < child.exposes.size(); ++e) {
        ctx.ops.push_back(CodePauli::on_pair(n.pair, child.exposes[e]));
        ctx.sources.push_back(static_cast<std::uint8_t>(n.pair));
        vals.push_back(std::move(child.vals[e]));
      }
      idx = n.next[static_cast<std::size_t>(child.cls)];
      if (idx < 0) throw std::logic_error("strategy tree has no branch for a child class");
    }
    const auto dec = decide_leaf(ctx, cls, redundant);
    SubResult out;
    out.cls = dec.cls;
    out.exposes = dec.exposes;
    for (const auto& r : dec.reps) {
      LValue v = product(vals, r[0]);
      if (r[1] != 0) v = combine(v, product(vals, r[1]));
      out.vals.push_back(std::move(v));
    }
    return out;
  }
};

class Sampler {
 public:
  Sampler(Rng& rng, double eta, double lambda) : rng_(rng), eta_(eta), lambda_(lambda) {}
  bool lost() { return u_(rng_) >= eta_; }
  bool coin() { return ((rng_() >> 11) & 1u) != 0; }
  std::pair<Pauli, Pauli> fusion_errors(bool, Pauli) { return {depolarize(), depolarize()}; }
  Pauli single_error(Pauli) { return depolarize(); }

 private:
  Pauli depolarize() {
    const double r = u_(rng_);
    if (r >= lambda_) return Pauli::I;
    return r < lambda_ / 3 ? Pauli::X : (r < 2 * lambda_ / 3 ? Pauli::Y : Pauli::Z);
  }
  Rng& rng_;
  double eta_, lambda_;
  std::uniform_real_distribution<double> u_{0.0, 1.0};
};

// Replays a recorded prefix of choices and extends it with first options.
class Enumerator {
 public:
  struct Slot {
    int choice, count;
  };
  Enumerator(std::vector<Slot>& path, double lambda, std::optional<double> eta)
      : path_(path), lambda_(lambda), eta_(eta) {}

  bool lost() {
    if (eta_) {
      const double e = *eta_;
      if (e == 1.0) return false;
      if (e == 0.0) return true;
      const bool l = pick(2) == 1;
      weight *= l ? 1 - e : e;
      return l;
    }
    const bool l = pick(2) == 1;
    ++(l ? lost_count : kept);
    return l;
  }

  bool coin() {
    weight *= 0.5;
    return pick(2) == 1;
  }

  std::pair<Pauli, Pauli> fusion_errors(bool success, Pauli basis) {
    if (lambda_ == 0.0) return {Pauli::I, Pauli::I};
    if (success) {
      // Net Pauli of two depolarized photons, moved onto the first one.
      const double t = lambda_ / 3;
      const double pi = (1 - lambda_) * (1 - lambda_) + 3 * t * t, pn = 2 * (1 - lambda_) * t + 2 * t * t;
      const int c = pick(4);
      weight *= c == 0 ? pi : pn;
      static constexpr Pauli net[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
      return {net[c], Pauli::I};
    }
    const double q = 2 * lambda_ / 3;
    const int c = pick(4);
    weight *= ((c & 1) ? q : 1 - q) * ((c & 2) ? q : 1 - q);
    return {(c & 1) ? flipper(basis) : Pauli::I, (c & 2) ? flipper(basis) : Pauli::I};
  }

  Pauli single_error(Pauli basis) {
    if (lambda_ == 0.0) return Pauli::I;
    const double q = 2 * lambda_ / 3;
    const bool f = pick(2) == 1;
    weight *= f ? q : 1 - q;
    return f ? flipper(basis) : Pauli::I;
  }

  double weight = 1.0;
  std::uint32_t kept = 0, lost_count = 0;

 private:
  int pick(int count) {
    if (pos_ < path_.size()) {
      if (path_[pos_].count != count) throw std::logic_error("enumeration replay diverged");
      return path_[pos_++].choice;
    }
    path_.push_back({0, count});
    ++pos_;
    return 0;
  }

  std::vector<Slot>& path_;
  std::size_t pos_ = 0;
  double lambda_;
  std::optional<double> eta_;
};

EmpiricalStats run_sampling(const TrialConfig& cfg, McMode mode, Pauli logical) {
  cfg.validate();
  check_budget(cfg.spec, mode);
  if (mode == McMode::Pauli && logical == Pauli::I) throw std::invalid_argument("logical must be X, Y or Z");
  const auto& init = initial_state(cfg.spec.depth, mode);
  const std::uint64_t parts = (cfg.trials + kPartition - 1) / kPartition;
  std::vector<EmpiricalStats> partial(parts);
  std::atomic<std::uint64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    try {
      for (std::uint64_t p = next++; p < parts; p = next++) {
        Rng rng = make_stream(cfg.seed, p);
        Sampler ch(rng, cfg.eta, cfg.lambda);
        auto& acc = partial[p];
        const std::uint64_t end = std::min(cfg.trials, (p + 1) * kPartition);
        for (std::uint64_t i = p * kPartition; i < end; ++i) {
          Walker<Sampler> w(cfg.spec, init, ch, rng);
          const auto r = mode == McMode::Fusion ? w.fusion_trial() : w.pauli_trial(logical);
          ++acc.counts[static_cast<std::size_t>(r.outcome)];
          for (std::size_t q = 0; q < 2; ++q) {
            if ((r.parity_bits >> (2 * q)) & 1u) ++acc.parity_error[q];
            if ((r.parity_bits >> (2 * q + 1)) & 1u) ++acc.parity_detected[q];
          }
        }
      }
    } catch (...) {
      std::lock_guard lock(err_mu);
      if (!err) err = std::current_exception();
      next = parts;
    }
  };
  unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, parts));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  EmpiricalStats out;
  out.mode = mode;
  out.logical = mode == McMode::Pauli ? logical : Pauli::I;
  out.config = cfg;
  for (const auto& p : partial) out += p;
  return out;
}

}  // namespace

void TrialConfig::validate() const {
  spec.validate();
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 0.75)) throw std::invalid_argument("lambda must lie in [0, 3/4]");
}

const char* mc_outcome_name(McOutcome o) {
  switch (o) {
    case McOutcome::Success: return "success";
    case McOutcome::Error: return "error";
    case McOutcome::Detected: return "detected";
    case McOutcome::FailX: return "fail_x";
    case McOutcome::FailZ: return "fail_z";
    case McOutcome::Loss: return "loss";
  }
  return "?";
}

std::uint64_t EmpiricalStats::total() const {
  std::uint64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

std::uint64_t EmpiricalStats::succeeded() const {
  return count(McOutcome::Success) + count(McOutcome::Error) + count(McOutcome::Detected);
}

double EmpiricalStats::rate(McOutcome o) const {
  const auto n = total();
  return n == 0 ? 0.0 : static_cast<double>(count(o)) / static_cast<double>(n);
}

double EmpiricalStats::stderr_of(McOutcome o) const {
  const auto n = total();
  if (n == 0) return 0.0;
  const double p = rate(o);
  return std::sqrt(p * (1 - p) / static_cast<double>(n));
}

EmpiricalStats& EmpiricalStats::operator+=(const EmpiricalStats& o) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
  for (std::size_t i = 0; i < 2; ++i) {
    parity_error[i] += o.parity_error[i];
    parity_detected[i] += o.parity_detected[i];
  }
  return *this;
}

void to_json(nlohmann::json& j, const EmpiricalStats& s) {
  j = nlohmann::json::object();
  j["mode"] = s.mode == McMode::Fusion ? "fusion" : "pauli";
  if (s.mode == McMode::Pauli) j["logical"] = std::string(1, to_char(s.logical));
  j["depth"] = s.config.spec.depth;
  j["switch_layer"] = s.config.spec.switch_layer;
  j["eta"] = s.config.eta;
  j["lambda"] = s.config.lambda;
  j["trials"] = s.config.trials;
  j["seed"] = s.config.seed;
  auto& oc = j["outcomes"];
  oc = nlohmann::json::object();
  for (int i = 0; i < kMcOutcomes; ++i) {
    const auto o = static_cast<McOutcome>(i);
    oc[mc_outcome_name(o)] = {{"count", s.count(o)}, {"rate", s.rate(o)}, {"stderr", s.stderr_of(o)}};
  }
  const char* names[2] = {"xx", "zz"};
  const std::size_t np = s.mode == McMode::Fusion ? 2 : 1;
  for (std::size_t p = 0; p < np; ++p)
    j["parities"][s.mode == McMode::Fusion ? names[p] : "value"] = {{"error", s.parity_error[p]},
                                                                    {"detected", s.parity_detected[p]}};
}

void write_csv_header(std::ostream& os) { os << "depth,eta,lambda,trials,outcome,count,rate,stderr\n"; }

void write_csv_rows(std::ostream& os, const EmpiricalStats& s) {
  const auto prec = os.precision(12);
  for (int i = 0; i < kMcOutcomes; ++i) {
    const auto o = static_cast<McOutcome>(i);
    os << s.config.spec.depth << ',' << s.config.eta << ',' << s.config.lambda << ',' << s.config.trials << ','
       << mc_outcome_name(o) << ',' << s.count(o) << ',' << s.rate(o) << ',' << s.stderr_of(o) << '\n';
  }
  os.precision(prec);
}

EmpiricalStats simulate_logical_fusion(const TrialConfig& cfg) { return run_sampling(cfg, McMode::Fusion, Pauli::I); }

EmpiricalStats simulate_pauli_measurement(const TrialConfig& cfg, Pauli logical) {
  return run_sampling(cfg, McMode::Pauli, logical);
}

double ExactDistribution::weight(const Key& k, double w, double eta) const {
  return w * std::pow(eta, k.kept) * std::pow(1 - eta, k.lost);
}

double ExactDistribution::probability(McOutcome o, double eta) const {
  double s = 0;
  for (const auto& [k, w] : w_)
    if (k.outcome == static_cast<std::uint8_t>(o)) s += weight(k, w, eta);
  return s;
}

double ExactDistribution::parity_error(int parity, double eta) const {
  double s = 0;
  for (const auto& [k, w] : w_)
    if ((k.parity_bits >> (2 * parity)) & 1u) s += weight(k, w, eta);
  return s;
}

double ExactDistribution::parity_detected(int parity, double eta) const {
  double s = 0;
  for (const auto& [k, w] : w_)
    if ((k.parity_bits >> (2 * parity + 1)) & 1u) s += weight(k, w, eta);
  return s;
}

double ExactDistribution::total(double eta) const {
  double s = 0;
  for (const auto& [k, w] : w_) s += weight(k, w, eta);
  return s;
}

ExactDistribution enumerate_small(const EnumConfig& cfg) {
  if (cfg.spec.depth > 2) throw std::length_error("state space too large: enumeration supports depth <= 2");
  check_budget(cfg.spec, cfg.mode);
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 0.75)) throw std::invalid_argument("lambda must lie in [0, 3/4]");
  if (cfg.eta && !(*cfg.eta >= 0.0 && *cfg.eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
  if (cfg.mode == McMode::Pauli && cfg.logical == Pauli::I) throw std::invalid_argument("logical must be X, Y or Z");
  const auto& init = initial_state(cfg.spec.depth, cfg.mode);
  ExactDistribution out;
  std::vector<Enumerator::Slot> path;
  std::size_t leaves = 0;
  while (true) {
    if (++leaves > cfg.max_leaves) throw std::length_error("state space too large");
    Enumerator ch(path, cfg.lambda, cfg.eta);
    // Classification does not depend on the random measurement outcomes, so a fixed stream suffices.
    Rng rng(leaves);
    Walker<Enumerator> w(cfg.spec, init, ch, rng);
    const auto r = cfg.mode == McMode::Fusion ? w.fusion_trial() : w.pauli_trial(cfg.logical);
    out.add({static_cast<std::uint8_t>(r.outcome), r.parity_bits, ch.kept, ch.lost_count}, ch.weight);
    while (!path.empty() && path.back().choice + 1 == path.back().count) path.pop_back();
    if (path.empty()) break;
    ++path.back().choice;
  }
  out.set_branches(leaves);
  return out;
}

}  // namespace ringrep
