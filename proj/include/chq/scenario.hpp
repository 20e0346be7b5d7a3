// Compiles a ScenarioSpec into spaces, dynamics, projectors and certified
// families, and answers queries written in the event grammar.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chq/frameworks.hpp"
#include "chq/inference.hpp"
#include "chq/lexer.hpp"
#include "chq/scenario_spec.hpp"

namespace chq {

struct CompiledState {
  std::vector<std::size_t> factor_ids;  // factors the state lives on, in order
  StateVector vector;
};

class Scenario;
inline Scenario compile(ScenarioSpec spec, const Tolerances& tol);

class Scenario {
 public:
  const ScenarioSpec& spec() const noexcept { return spec_; }
  const std::string& name() const noexcept { return spec_.name; }
  const Tolerances& tolerances() const noexcept { return tol_; }
  const SpacePtr& space() const noexcept { return space_; }
  const DynamicsPtr& dynamics() const noexcept { return dynamics_; }

  /// Family names in declaration order.
  const std::vector<std::string>& family_names() const noexcept { return family_order_; }

  bool has_family(std::string_view name) const { return reports_.count(std::string(name)) != 0; }

  const CertificationReport& certification(std::string_view name) const {
    auto it = reports_.find(std::string(name));
    if (it == reports_.end()) throw Error(Errc::UnknownLabel, "unknown family '" + std::string(name) + "'");
    return it->second;
  }

  /// The certified family; throws FamilyError when certification failed.
  const Family& family(std::string_view name) const {
    const auto& rep = certification(name);
    const auto& f = families_.at(std::string(name));
    if (!f) throw FamilyError(rep);
    return *f;
  }

  const Projector& projector(std::string_view label) const {
    auto it = projectors_.find(std::string(label));
    if (it == projectors_.end()) throw Error(Errc::UnknownLabel, "unknown projector '" + std::string(label) + "'");
    return it->second;
  }
  bool has_projector(std::string_view label) const { return projectors_.count(std::string(label)) != 0; }

  const CompiledState& state(std::string_view label) const {
    auto it = states_.find(std::string(label));
    if (it == states_.end()) throw Error(Errc::UnknownLabel, "unknown state '" + std::string(label) + "'");
    return it->second;
  }

  /// Parses `label@time` atoms joined by NOT / AND / OR (also ~ & |) with
  /// parentheses. Unknown projector labels throw Errc::UnknownLabel; syntax
  /// errors and unknown times throw ParseError.
  EventExpr parse_event(std::string_view text) const {
    text::Cursor c(text::tokenize(text, 1), 1);
    EventExpr e = parse_or(c);
    c.expect_end();
    return e;
  }

  /// Pr(target) or Pr(target | data) in the named family. A label with no
  /// projector makes the query meaningless rather than an error.
  QueryResult query(std::string_view family_name, std::string_view target,
                    const std::optional<std::string>& data = std::nullopt) const {
    const Family& f = family(family_name);
    try {
      EventExpr t = parse_event(target);
      if (!data) return prob(f, t);
      return cond_prob(f, t, parse_event(*data));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      if (e.code() != Errc::UnknownLabel) throw;
      return QueryResult::meaningless(MeaninglessReason::NotAProjector, e.what(), f.name());
    }
  }

  TruthVerdict truth(std::string_view family_name, std::string_view target, std::string_view data) const {
    const Family& f = family(family_name);
    try {
      return is_true(f, parse_event(target), parse_event(data));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      if (e.code() != Errc::UnknownLabel) throw;
      auto r = QueryResult::meaningless(MeaninglessReason::NotAProjector, e.what(), f.name());
      return {TruthVerdict::Kind::Meaningless, 0, r};
    }
  }

  const QueryDef& named_query(std::string_view name) const {
    for (const auto& q : spec_.queries)
      if (q.name == name) return q;
    throw Error(Errc::UnknownLabel, "unknown query '" + std::string(name) + "'");
  }

  QueryResult run(const QueryDef& q) const { return query(q.family, q.target, q.data); }

 private:
  friend Scenario compile(ScenarioSpec spec, const Tolerances& tol);
  Scenario() = default;

  EventExpr parse_or(text::Cursor& c) const {
    EventExpr e = parse_and(c);
    while (c.accept_word("OR") || c.accept_sym("|")) e = e | parse_and(c);
    return e;
  }
  EventExpr parse_and(text::Cursor& c) const {
    EventExpr e = parse_not(c);
    while (c.accept_word("AND") || c.accept_sym("&")) e = e & parse_not(c);
    return e;
  }
  EventExpr parse_not(text::Cursor& c) const {
    if (c.accept_word("NOT") || c.accept_sym("~")) return !parse_not(c);
    if (c.accept_sym("(")) {
      EventExpr e = parse_or(c);
      c.expect_sym(")");
      return e;
    }
    const std::string label = c.expect_ident("event label");
    c.expect_sym("@");
    const std::size_t time_col = c.peek().column;
    const std::string t = c.expect_ident("time");
    bool known = false;
    for (const auto& x : dynamics_->times()) known = known || x == t;
    if (!known) throw ParseError("unknown time '" + t + "'", 1, time_col);
    if (label == "I") return EventExpr::atom(t, Projector::identity(space_));
    return EventExpr::atom(t, projector(label));
  }

  ScenarioSpec spec_;
  Tolerances tol_;
  SpacePtr space_;
  DynamicsPtr dynamics_;
  std::map<std::string, CompiledState> states_;
  std::map<std::string, Projector> projectors_;
  std::vector<std::string> projector_order_;
  std::map<std::string, CertificationReport> reports_;
  std::map<std::string, std::optional<Family>> families_;
  std::vector<std::string> family_order_;
};

namespace detail {

inline std::vector<std::size_t> resolve_factors(const HilbertSpace& full, const std::vector<std::string>& on) {
  std::vector<std::size_t> ids;
  if (on.empty()) {
    for (std::size_t i = 0; i < full.factors().size(); ++i) ids.push_back(i);
    return ids;
  }
  for (const auto& name : on) {
    const std::size_t id = full.factor_index(name);
    for (auto x : ids)
      if (x == id) throw Error(Errc::InvalidArgument, "factor '" + name + "' listed twice");
    ids.push_back(id);
  }
  return ids;
}

inline Vector eval_terms(const HilbertSpace& sub, const std::vector<Term>& terms) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(sub.dim()));
  const auto& fs = sub.factors();
  for (const auto& t : terms) {
    if (t.ket.size() != fs.size())
      throw Error(Errc::SpaceMismatch, "ket has " + std::to_string(t.ket.size()) + " labels for " +
                                           std::to_string(fs.size()) + " factors");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const auto& labels = fs[k].labels;
      auto it = std::find(labels.begin(), labels.end(), t.ket[k]);
      if (it == labels.end())
        throw Error(Errc::UnknownLabel, "'" + t.ket[k] + "' is not a basis label of factor " + fs[k].name);
      idx = idx * labels.size() + static_cast<std::size_t>(it - labels.begin());
    }
    v(static_cast<Eigen::Index>(idx)) += t.coef.value();
  }
  return v;
}

}  // namespace detail

/// Builds the numeric scenario. Families that fail certification are kept
/// with their report; asking for them via family() throws FamilyError.
inline Scenario compile(ScenarioSpec spec, const Tolerances& tol = {}) {
  Scenario s;
  s.tol_ = tol;
  if (spec.factors.empty()) throw Error(Errc::InvalidArgument, "scenario has no factors");
  if (spec.times.size() < 2) throw Error(Errc::InvalidArgument, "scenario needs at least two times");
  const HilbertSpace full = HilbertSpace::from_factors(spec.factors);
  s.space_ = make_space(full);

  for (const auto& st : spec.states) {
    if (s.states_.count(st.label)) throw Error(Errc::InvalidArgument, "state '" + st.label + "' defined twice");
    auto ids = detail::resolve_factors(full, st.on);
    auto sub = make_space(subspace_of_factors(full, ids));
    StateVector v(sub, detail::eval_terms(*sub, st.terms));
    if (std::abs(v.norm() - 1.0) > tol.eps)
      throw Error(Errc::NotNormalized, "state '" + st.label + "' has norm " + std::to_string(v.norm()));
    s.states_.emplace(st.label, CompiledState{std::move(ids), std::move(v)});
  }

  auto time_index = [&](const std::string& t) {
    for (std::size_t i = 0; i < spec.times.size(); ++i)
      if (spec.times[i] == t) return i;
    throw Error(Errc::UnknownTime, "unknown time '" + t + "'");
  };

  const auto n = static_cast<Eigen::Index>(full.dim());
  std::vector<Matrix> steps(spec.times.size() - 1, Matrix::Identity(n, n));
  for (const auto& st : spec.steps) {
    const std::size_t from = time_index(st.from), to = time_index(st.to);
    if (to != from + 1)
      throw Error(Errc::InvalidArgument, "step " + st.from + " -> " + st.to + " must join consecutive times");
    auto ids = detail::resolve_factors(full, st.on);
    auto sub = make_space(subspace_of_factors(full, ids));
    auto vec = [&](const VecRef& r) {
      if (r.state.empty()) return StateVector(sub, detail::eval_terms(*sub, r.terms));
      const auto it = s.states_.find(r.state);
      if (it == s.states_.end()) throw Error(Errc::UnknownLabel, "unknown state '" + r.state + "'");
      if (it->second.factor_ids != ids)
        throw Error(Errc::SpaceMismatch, "state '" + r.state + "' is not on the step's factors");
      return StateVector(sub, it->second.vector.amplitudes());
    };
    std::vector<std::pair<StateVector, StateVector>> pairs;
    for (const auto& [in, out] : st.map) pairs.emplace_back(vec(in), vec(out));
    const UnitaryOp u = complete_unitary(sub, pairs, tol);
    steps[from] = Matrix(embed(full, ids, u.matrix()) * steps[from]);
  }
  std::vector<UnitaryOp> unitaries;
  for (auto& m : steps) unitaries.emplace_back(s.space_, std::move(m), 1e-9);
  s.dynamics_ = make_dynamics(Dynamics(s.space_, spec.times, std::move(unitaries)));

  std::function<Matrix(const ProjExpr&)> eval = [&](const ProjExpr& e) -> Matrix {
    using K = ProjExpr::Kind;
    switch (e.kind) {
      case K::Identity: return Matrix::Identity(n, n);
      case K::Ref: return s.projector(e.name).matrix();
      case K::Ket: {
        const auto it = s.states_.find(e.name);
        if (it == s.states_.end()) throw Error(Errc::UnknownLabel, "unknown state '" + e.name + "'");
        const Vector& a = it->second.vector.amplitudes();
        return embed(full, it->second.factor_ids, Matrix(a * a.adjoint()));
      }
      case K::Basis: {
        const std::size_t id = full.factor_index(e.name);
        const auto& labels = full.factors()[id].labels;
        const auto d = static_cast<Eigen::Index>(labels.size());
        Matrix m = Matrix::Zero(d, d);
        for (const auto& l : e.labels) {
          auto it = std::find(labels.begin(), labels.end(), l);
          if (it == labels.end()) throw Error(Errc::UnknownLabel, "'" + l + "' is not a basis label of " + e.name);
          const auto k = static_cast<Eigen::Index>(it - labels.begin());
          m(k, k) = 1.0;
        }
        return embed(full, {id}, m);
      }
      case K::Sum: return eval(e.args[0]) + eval(e.args[1]);
      case K::Diff: return eval(e.args[0]) - eval(e.args[1]);
      case K::Prod: return eval(e.args[0]) * eval(e.args[1]);
    }
    return {};
  };
  for (const auto& p : spec.projectors) {
    if (p.label == "I" || s.projectors_.count(p.label))
      throw Error(Errc::InvalidArgument, "projector '" + p.label + "' defined twice");
    s.projectors_.emplace(p.label, Projector(s.space_, eval(p.expr), p.label, tol.eps));
    s.projector_order_.push_back(p.label);
  }

  auto lookup = [&](const std::string& label) {
    return label == "I" ? Projector::identity(s.space_) : s.projector(label);
  };
  // Atoms produced by meets get the name of an equal declared projector.
  auto relabel = [&](const Projector& p) {
    if (p.approx_equal(Projector::identity(s.space_), tol.eps)) return p.with_label("I");
    for (const auto& l : s.projector_order_)
      if (s.projectors_.at(l).approx_equal(p, tol.eps)) return p.with_label(l);
    return p;
  };

  for (const auto& fd : spec.families) {
    if (s.reports_.count(fd.name)) throw Error(Errc::InvalidArgument, "family '" + fd.name + "' defined twice");
    const Projector initial = lookup(fd.initial);
    std::vector<History> hs;
    CertificationReport rep;
    bool built = true;
    try {
      if (!fd.histories.empty()) {
        for (const auto& row : fd.histories) {
          if (row.size() + 1 != spec.times.size())
            throw Error(Errc::InvalidHistory, "history in family '" + fd.name + "' needs one event per later time");
          std::vector<Projector> events;
          for (const auto& l : row) events.push_back(lookup(l));
          hs.emplace_back(s.dynamics_, initial, std::move(events));
        }
        if (fd.complete) {
          hs = complete_candidate(hs, tol.eps);
          for (auto& h : hs) {
            std::vector<Projector> events;
            for (const auto& e : h.events()) events.push_back(relabel(e));
            h = History(s.dynamics_, initial, std::move(events));
          }
        }
      } else {
        std::vector<std::vector<Projector>> slots(spec.times.size() - 1);
        std::vector<bool> seen(slots.size(), false);
        for (const auto& sd : fd.slots) {
          const std::size_t k = time_index(sd.time);
          if (k == 0) throw Error(Errc::InvalidArgument, "slot at the initial time in family '" + fd.name + "'");
          if (seen[k - 1]) throw Error(Errc::InvalidArgument, "two slots at " + sd.time + " in family '" + fd.name + "'");
          seen[k - 1] = true;
          std::vector<Projector> ps;
          for (const auto& l : sd.projectors) ps.push_back(lookup(l));
          if (sd.mode == SlotDef::Mode::Generate) {
            for (const auto& a : boolean_atoms(s.space_, ps, tol.eps)) slots[k - 1].push_back(relabel(a));
          } else {
            slots[k - 1] = std::move(ps);
          }
        }
        for (std::size_t k = 0; k < slots.size(); ++k)
          if (!seen[k]) slots[k] = {Projector::identity(s.space_)};
        hs = product_histories(s.dynamics_, initial, slots);
      }
    } catch (const Error& e) {
      if (e.code() != Errc::NonCommutingSlot) throw;
      built = false;
      rep.family = fd.name;
      rep.condition = tol.condition;
      rep.eps_c = tol.eps_c;
      rep.verdict = CertificationReport::Verdict::NonCommutingSlot;
      rep.detail = e.what();
    }
    if (built) rep = certify(hs, fd.name, tol);
    std::optional<Family> fam;
    if (rep.ok()) fam = validate_family(hs, fd.name, tol);
    s.reports_.emplace(fd.name, std::move(rep));
    s.families_.emplace(fd.name, std::move(fam));
    s.family_order_.push_back(fd.name);
  }

  for (const auto& q : spec.queries)
    if (!s.reports_.count(q.family))
      throw Error(Errc::UnknownLabel, "query '" + q.name + "' names unknown family '" + q.family + "'");

  s.spec_ = std::move(spec);
  return s;
}

}  // namespace chq
