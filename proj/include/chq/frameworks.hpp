// Consistent families (frameworks): certification, Boolean event algebras,
// common refinement and compatibility.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chq/event.hpp"
#include "chq/histories.hpp"

namespace chq {

/// Nonzero atoms of the Boolean algebra generated by commuting projectors,
/// ordered by sign pattern with the first generator's "yes" branch first.
/// No generators yields {I}.
inline std::vector<Projector> boolean_atoms(const SpacePtr& space, const std::vector<Projector>& generators,
                                            double eps = Tolerances{}.eps) {
  for (std::size_t i = 0; i < generators.size(); ++i)
    for (std::size_t j = i + 1; j < generators.size(); ++j)
      if (!commutes(generators[i], generators[j], eps))
        throw Error(Errc::NonCommutingSlot, "generators '" + generators[i].label() + "' and '" +
                                                generators[j].label() + "' do not commute");
  std::vector<Projector> atoms{Projector::identity(space)};
  bool first = true;
  for (const auto& g : generators) {
    const Projector not_g = complement(g);
    std::vector<Projector> next;
    for (const auto& a : atoms) {
      for (const Projector* side : {&g, &not_g}) {
        Projector m = first ? *side : meet(a, *side, eps);
        if (!m.is_zero(eps)) next.push_back(std::move(m));
      }
    }
    atoms = std::move(next);
    first = false;
  }
  return atoms;
}

/// Elementary histories initial ⊙ p_1 ⊙ ... ⊙ p_n for every choice of one
/// projector per slot; the first slot varies slowest.
inline std::vector<History> product_histories(const DynamicsPtr& dynamics, const Projector& initial,
                                              const std::vector<std::vector<Projector>>& slots) {
  if (slots.size() + 1 != dynamics->num_times())
    throw Error(Errc::InvalidHistory, "one slot per later time required");
  std::vector<std::vector<Projector>> rows{{}};
  for (const auto& slot : slots) {
    if (slot.empty()) throw Error(Errc::InvalidHistory, "empty slot");
    std::vector<std::vector<Projector>> next;
    for (const auto& r : rows)
      for (const auto& p : slot) {
        auto row = r;
        row.push_back(p);
        next.push_back(std::move(row));
      }
    rows = std::move(next);
  }
  std::vector<History> out;
  out.reserve(rows.size());
  for (auto& r : rows) out.emplace_back(dynamics, initial, std::move(r));
  return out;
}

namespace detail {

// Distinct projectors used at one later-time slot and which one each history uses.
struct SlotAlgebra {
  std::vector<Projector> projectors;
  std::vector<std::size_t> of_history;
};

inline std::vector<SlotAlgebra> slot_algebras(const std::vector<History>& hs, double eps) {
  std::vector<SlotAlgebra> slots;
  if (hs.empty()) return slots;
  const std::size_t n = hs.front().events().size();
  slots.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    auto& s = slots[t];
    for (const auto& h : hs) {
      const Projector& e = h.events()[t];
      std::size_t idx = s.projectors.size();
      for (std::size_t k = 0; k < s.projectors.size(); ++k)
        if (s.projectors[k].approx_equal(e, eps)) {
          idx = k;
          break;
        }
      if (idx == s.projectors.size()) s.projectors.push_back(e);
      s.of_history.push_back(idx);
    }
  }
  return slots;
}

}  // namespace detail

/// Adds the complement events per time slot: each slot's projectors generate
/// a Boolean algebra whose atoms, combined over slots, form the completed
/// sample space. Candidate histories reappear as (sums of) its members.
inline std::vector<History> complete_candidate(const std::vector<History>& candidate, double eps = Tolerances{}.eps) {
  if (candidate.empty()) throw Error(Errc::InvalidArgument, "empty candidate");
  const auto& dyn = candidate.front().dynamics();
  std::vector<std::vector<Projector>> slots;
  for (const auto& s : detail::slot_algebras(candidate, eps))
    slots.push_back(boolean_atoms(dyn->space(), s.projectors, eps));
  return product_histories(dyn, candidate.front().initial(), slots);
}

struct CertificationReport {
  enum class Verdict { Consistent, Inconsistent, NotExhaustive, NonOrthogonal, NonCommutingSlot };

  std::string family;
  Consistency condition = Consistency::Medium;
  double eps_c = 0;
  std::vector<std::string> histories;
  std::vector<double> weights;
  std::vector<bool> zero_weight;
  Eigen::MatrixXd re_residual;   // |Re D(h_i, h_j)|, zero diagonal
  Eigen::MatrixXd abs_residual;  // |D(h_i, h_j)|, zero diagonal
  double max_re_residual = 0;
  double max_abs_residual = 0;
  Verdict verdict = Verdict::Consistent;
  std::string detail;
  std::optional<std::pair<std::size_t, std::size_t>> offending_pair;
  std::optional<std::size_t> offending_time;

  bool ok() const noexcept { return verdict == Verdict::Consistent; }
};

inline std::string_view to_string(CertificationReport::Verdict v) {
  using V = CertificationReport::Verdict;
  switch (v) {
    case V::Consistent: return "Consistent";
    case V::Inconsistent: return "Inconsistent";
    case V::NotExhaustive: return "NotExhaustive";
    case V::NonOrthogonal: return "NonOrthogonal";
    case V::NonCommutingSlot: return "NonCommutingSlot";
  }
  return "Unknown";
}

class FamilyError : public Error {
 public:
  explicit FamilyError(CertificationReport r)
      : Error(code_of(r.verdict), r.family + ": " + r.detail), report_(std::move(r)) {}
  const CertificationReport& report() const noexcept { return report_; }

 private:
  static Errc code_of(CertificationReport::Verdict v) {
    using V = CertificationReport::Verdict;
    switch (v) {
      case V::NotExhaustive: return Errc::NotExhaustive;
      case V::NonOrthogonal: return Errc::NonOrthogonal;
      case V::NonCommutingSlot: return Errc::NonCommutingSlot;
      default: return Errc::Inconsistent;
    }
  }
  CertificationReport report_;
};

class Family;
inline Family validate_family(const std::vector<History>&, std::string, const Tolerances&);

/// A certified consistent family. Only obtainable through validate_family or
/// refine, so every instance satisfies exhaustiveness, orthogonality and the
/// configured consistency condition.
class Family {
 public:
  const std::string& name() const noexcept { return name_; }
  const DynamicsPtr& dynamics() const noexcept { return histories_.front().dynamics(); }
  const Projector& initial() const noexcept { return histories_.front().initial(); }
  const std::vector<History>& histories() const noexcept { return histories_; }
  std::size_t size() const noexcept { return histories_.size(); }
  const CertificationReport& certificate() const noexcept { return report_; }
  const std::vector<double>& weights() const noexcept { return report_.weights; }
  const Tolerances& tolerances() const noexcept { return tol_; }

  double total_weight() const {
    double s = 0;
    for (double w : report_.weights) s += w;
    return s;
  }

  /// Distinct projectors used at later-time slot t (1-based time index).
  const std::vector<Projector>& slot_projectors(std::size_t t) const { return slots_.at(t - 1).projectors; }

  /// Truth value of atom (t, P) on each elementary history, or nullopt when
  /// P is not in the family's event algebra at t.
  std::optional<std::vector<char>> atom_truth(std::size_t t, const Projector& p) const {
    require_same_space(dynamics()->space(), p.space(), "event '" + p.label() + "' on another space");
    const double eps = tol_.eps;
    if (t == 0) {
      char v;
      if (is_subprojector(initial(), p, eps)) v = 1;
      else if (orthogonal(initial(), p, eps)) v = 0;
      else return std::nullopt;
      return std::vector<char>(size(), v);
    }
    if (t >= dynamics()->num_times()) throw Error(Errc::UnknownTime, "time index out of range");
    const auto& slot = slots_[t - 1];
    std::vector<char> per_projector;
    for (const auto& e : slot.projectors) {
      if (is_subprojector(e, p, eps)) per_projector.push_back(1);
      else if (orthogonal(e, p, eps)) per_projector.push_back(0);
      else return std::nullopt;
    }
    std::vector<char> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = per_projector[slot.of_history[i]];
    return out;
  }

  bool in_algebra(std::size_t t, const Projector& p) const { return atom_truth(t, p).has_value(); }

  /// Truth of `e` on each elementary history, or nullopt if some atom is
  /// outside the algebra.
  std::optional<std::vector<char>> evaluate(const EventExpr& e) const {
    using Op = EventExpr::Op;
    switch (e.op()) {
      case Op::Atom: return atom_truth(dynamics()->time_index(e.time()), e.projector());
      case Op::Not: {
        auto v = evaluate(e.children()[0]);
        if (!v) return std::nullopt;
        for (auto& x : *v) x = !x;
        return v;
      }
      case Op::And:
      case Op::Or: {
        auto a = evaluate(e.children()[0]);
        auto b = evaluate(e.children()[1]);
        if (!a || !b) return std::nullopt;
        for (std::size_t i = 0; i < a->size(); ++i)
          (*a)[i] = e.op() == Op::And ? ((*a)[i] && (*b)[i]) : ((*a)[i] || (*b)[i]);
        return a;
      }
    }
    return std::nullopt;
  }

  /// Normalized weight of the elementary histories flagged true.
  double probability(const std::vector<char>& truth) const {
    double num = 0;
    for (std::size_t i = 0; i < size(); ++i)
      if (truth[i]) num += report_.weights[i];
    return num / total_weight();
  }

 private:
  Family(std::string name, std::vector<History> hs, CertificationReport report, Tolerances tol)
      : name_(std::move(name)), histories_(std::move(hs)), report_(std::move(report)), tol_(tol) {
    slots_ = detail::slot_algebras(histories_, tol_.eps);
  }

  friend Family validate_family(const std::vector<History>&, std::string, const Tolerances&);

  std::string name_;
  std::vector<History> histories_;
  CertificationReport report_;
  Tolerances tol_;
  std::vector<detail::SlotAlgebra> slots_;
};

inline bool contains_event(const Family& f, const EventExpr& e) { return f.evaluate(e).has_value(); }

/// Checks a candidate sample space and reports weights and off-diagonal
/// decoherence residuals. Never throws for a bad family; the verdict says
/// what failed and where. Malformed input (mixed dynamics or initial events)
/// does throw.
inline CertificationReport certify(const std::vector<History>& hs, std::string name = {},
                                   const Tolerances& tol = {}) {
  using V = CertificationReport::Verdict;
  if (hs.empty()) throw Error(Errc::InvalidArgument, "empty family candidate");
  const auto& dyn = hs.front().dynamics();
  for (const auto& h : hs) {
    if (!same_dynamics(dyn, h.dynamics()))
      throw Error(Errc::DynamicsMismatch, "candidate histories use different dynamics");
    if (!h.initial().approx_equal(hs.front().initial(), tol.eps))
      throw Error(Errc::InvalidHistory, "candidate histories have different initial events");
  }

  CertificationReport r;
  r.family = std::move(name);
  r.condition = tol.condition;
  r.eps_c = tol.eps_c;
  for (const auto& h : hs) r.histories.push_back(h.label());
  const std::size_t m = hs.size();

  const auto slots = detail::slot_algebras(hs, tol.eps);
  for (std::size_t t = 0; t < slots.size(); ++t) {
    const auto& ps = slots[t].projectors;
    for (std::size_t a = 0; a < ps.size(); ++a)
      for (std::size_t b = a + 1; b < ps.size(); ++b)
        if (!commutes(ps[a], ps[b], tol.eps)) {
          r.verdict = V::NonCommutingSlot;
          r.offending_time = t + 1;
          r.detail = "projectors '" + ps[a].label() + "' and '" + ps[b].label() + "' at " +
                     dyn->times()[t + 1] + " do not commute";
          return r;
        }
  }

  // orth[t][a][b]: distinct projectors a, b at slot t are orthogonal
  std::vector<std::vector<std::vector<char>>> orth(slots.size());
  for (std::size_t t = 0; t < slots.size(); ++t) {
    const auto& ps = slots[t].projectors;
    orth[t].assign(ps.size(), std::vector<char>(ps.size(), 0));
    for (std::size_t a = 0; a < ps.size(); ++a)
      for (std::size_t b = 0; b < ps.size(); ++b) orth[t][a][b] = orthogonal(ps[a], ps[b], tol.eps);
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      bool separated = false;
      for (std::size_t t = 0; t < slots.size() && !separated; ++t)
        separated = orth[t][slots[t].of_history[i]][slots[t].of_history[j]];
      if (!separated) {
        r.verdict = V::NonOrthogonal;
        r.offending_pair = {i, j};
        r.detail = "histories " + r.histories[i] + " and " + r.histories[j] + " overlap at every time";
        return r;
      }
    }

  std::vector<Matrix> chains;
  chains.reserve(m);
  for (const auto& h : hs) chains.push_back(chain_operator(h));

  // Orthogonal elementary histories cover Ψ0 ⊙ I ⊙ ... ⊙ I iff their ranks add up to dim^n.
  double rank_sum = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double prod = 1;
    for (const auto& e : hs[i].events()) prod *= static_cast<double>(e.rank());
    rank_sum += prod;
  }
  double full = 1;
  for (std::size_t t = 0; t < slots.size(); ++t) full *= static_cast<double>(dyn->space()->dim());
  Matrix sum = Matrix::Zero(chains.front().rows(), chains.front().cols());
  for (const auto& k : chains) sum += k;
  const Matrix target = dyn->evolution(0, dyn->num_times() - 1) * hs.front().initial().matrix();
  const double k_residual = max_abs(Matrix(sum - target));
  if (rank_sum != full || k_residual > tol.eps * static_cast<double>(std::max<std::size_t>(m, 1))) {
    r.verdict = V::NotExhaustive;
    r.detail = "elementary histories do not sum to the initial event times identities (rank " +
               std::to_string(static_cast<std::uint64_t>(rank_sum)) + " of " +
               std::to_string(static_cast<std::uint64_t>(full)) + ", chain residual " +
               std::to_string(k_residual) + ")";
    return r;
  }

  r.weights.resize(m);
  r.zero_weight.resize(m);
  r.re_residual = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  r.abs_residual = r.re_residual;
  for (std::size_t i = 0; i < m; ++i) {
    r.weights[i] = chains[i].squaredNorm();
    r.zero_weight[i] = r.weights[i] <= tol.eps;
  }
  std::pair<std::size_t, std::size_t> worst{0, 0};
  double worst_value = -1;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const cplx d = decoherence(chains[i], chains[j]);
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      r.re_residual(ii, jj) = r.re_residual(jj, ii) = std::abs(d.real());
      r.abs_residual(ii, jj) = r.abs_residual(jj, ii) = std::abs(d);
      r.max_re_residual = std::max(r.max_re_residual, std::abs(d.real()));
      r.max_abs_residual = std::max(r.max_abs_residual, std::abs(d));
      const double v = tol.condition == Consistency::Medium ? std::abs(d.real()) : std::abs(d);
      if (v > worst_value) {
        worst_value = v;
        worst = {i, j};
      }
    }
  const double governing = tol.condition == Consistency::Medium ? r.max_re_residual : r.max_abs_residual;
  if (governing > tol.eps_c) {
    r.verdict = V::Inconsistent;
    r.offending_pair = worst;
    r.detail = "decoherence between " + r.histories[worst.first] + " and " + r.histories[worst.second] +
               " is " + std::to_string(worst_value) + " (" + std::string(to_string(tol.condition)) +
               " condition)";
    return r;
  }
  r.verdict = V::Consistent;
  return r;
}

/// Certifies and returns the family, or throws FamilyError carrying the report.
inline Family validate_family(const std::vector<History>& hs, std::string name = {}, const Tolerances& tol = {}) {
  CertificationReport r = certify(hs, name, tol);
  if (!r.ok()) throw FamilyError(std::move(r));
  return Family(std::move(name), hs, std::move(r), tol);
}

struct NonCommuting {
  std::size_t time = 0;
  std::string time_label;
  std::string p;
  std::string q;
};

struct ConsistencyFailure {
  std::size_t i = 0;
  std::size_t j = 0;
  std::string first;
  std::string second;
  double residual = 0;
};

struct Incompatible {
  std::variant<NonCommuting, ConsistencyFailure> reason;

  bool non_commuting() const noexcept { return std::holds_alternative<NonCommuting>(reason); }
  bool consistency_failure() const noexcept { return std::holds_alternative<ConsistencyFailure>(reason); }

  std::string explain() const {
    if (const auto* nc = std::get_if<NonCommuting>(&reason))
      return "projectors '" + nc->p + "' and '" + nc->q + "' at " + nc->time_label + " do not commute";
    const auto& cf = std::get<ConsistencyFailure>(reason);
    return "common refinement violates consistency: D(" + cf.first + ", " + cf.second +
           ") residual " + std::to_string(cf.residual);
  }
};

using RefineResult = std::variant<Family, Incompatible>;

/// Common refinement of two families with the same dynamics and initial
/// event: elementary histories are slotwise products of one history from each.
inline RefineResult refine(const Family& f, const Family& g, const Tolerances& tol = {}) {
  if (!same_dynamics(f.dynamics(), g.dynamics()))
    throw Error(Errc::DynamicsMismatch, "refine across different dynamics");
  if (!f.initial().approx_equal(g.initial(), tol.eps))
    throw Error(Errc::InvalidArgument, "refine across different initial events");
  const auto& dyn = f.dynamics();
  const std::size_t n = dyn->num_times();
  for (std::size_t t = 1; t < n; ++t)
    for (const auto& p : f.slot_projectors(t))
      for (const auto& q : g.slot_projectors(t))
        if (!commutes(p, q, tol.eps)) return Incompatible{NonCommuting{t, dyn->times()[t], p.label(), q.label()}};

  std::vector<History> candidate;
  for (const auto& hf : f.histories())
    for (const auto& hg : g.histories()) {
      std::vector<Projector> events;
      bool vanishes = false;
      for (std::size_t t = 0; t + 1 < n && !vanishes; ++t) {
        Projector m = meet(hf.events()[t], hg.events()[t], tol.eps);
        vanishes = m.is_zero(tol.eps);
        events.push_back(std::move(m));
      }
      if (!vanishes) candidate.emplace_back(dyn, f.initial(), std::move(events));
    }

  std::string name = f.name() + "^" + g.name();
  CertificationReport r = certify(candidate, name, tol);
  if (r.verdict == CertificationReport::Verdict::Inconsistent) {
    const auto [i, j] = *r.offending_pair;
    const double res = tol.condition == Consistency::Medium
                           ? r.re_residual(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                           : r.abs_residual(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return Incompatible{ConsistencyFailure{i, j, r.histories[i], r.histories[j], res}};
  }
  return validate_family(candidate, std::move(name), tol);
}

}  // namespace chq
