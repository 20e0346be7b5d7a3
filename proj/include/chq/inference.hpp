// Probabilities, probability-one truth, pair classification and the
// single-framework rule. Every answer is relative to one named family.
#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chq/frameworks.hpp"

namespace chq {

enum class MeaninglessReason {
  IncompatibleEvent,         // an expression is outside the family's event algebra
  SingleFrameworkViolation,  // combining results from families with no common refinement
  NotAProjector,             // a proposition with no projector (e.g. "quasiclassical")
};

inline std::string_view to_string(MeaninglessReason r) {
  switch (r) {
    case MeaninglessReason::IncompatibleEvent: return "incompatible-event";
    case MeaninglessReason::SingleFrameworkViolation: return "single-framework-violation";
    case MeaninglessReason::NotAProjector: return "not-a-projector";
  }
  return "unknown";
}

struct QueryResult {
  enum class Kind { Value, Meaningless, UndefinedConditional };

  Kind kind = Kind::Value;
  double value = 0;
  std::optional<MeaninglessReason> reason;
  std::string explanation;
  std::string framework;

  bool is_value() const noexcept { return kind == Kind::Value; }
  bool is_meaningless() const noexcept { return kind == Kind::Meaningless; }
  bool is_undefined() const noexcept { return kind == Kind::UndefinedConditional; }

  static QueryResult of_value(double v, std::string framework) {
    return QueryResult{Kind::Value, std::clamp(v, 0.0, 1.0), std::nullopt, {}, std::move(framework)};
  }
  static QueryResult meaningless(MeaninglessReason r, std::string why, std::string framework) {
    return QueryResult{Kind::Meaningless, 0, r, std::move(why), std::move(framework)};
  }
  static QueryResult undefined(std::string why, std::string framework) {
    return QueryResult{Kind::UndefinedConditional, 0, std::nullopt, std::move(why), std::move(framework)};
  }
};

inline std::string_view to_string(QueryResult::Kind k) {
  switch (k) {
    case QueryResult::Kind::Value: return "Value";
    case QueryResult::Kind::Meaningless: return "Meaningless";
    case QueryResult::Kind::UndefinedConditional: return "UndefinedConditional";
  }
  return "Unknown";
}

namespace detail {
inline QueryResult not_in_algebra(const Family& f, const EventExpr& e) {
  return QueryResult::meaningless(MeaninglessReason::IncompatibleEvent,
                                  "'" + e.to_string() + "' is not in the event algebra of family " + f.name(),
                                  f.name());
}
}  // namespace detail

inline QueryResult prob(const Family& f, const EventExpr& e) {
  auto truth = f.evaluate(e);
  if (!truth) return detail::not_in_algebra(f, e);
  return QueryResult::of_value(f.probability(*truth), f.name());
}

/// Pr(target | data) = Pr(target ∧ data) / Pr(data) inside one family.
inline QueryResult cond_prob(const Family& f, const EventExpr& target, const EventExpr& data) {
  auto t = f.evaluate(target);
  if (!t) return detail::not_in_algebra(f, target);
  auto d = f.evaluate(data);
  if (!d) return detail::not_in_algebra(f, data);
  const double pd = f.probability(*d);
  if (pd <= f.tolerances().eps)
    return QueryResult::undefined("Pr(" + data.to_string() + ") = 0 in family " + f.name(), f.name());
  std::vector<char> both(t->size());
  for (std::size_t i = 0; i < both.size(); ++i) both[i] = (*t)[i] && (*d)[i];
  return QueryResult::of_value(f.probability(both) / pd, f.name());
}

struct TruthVerdict {
  enum class Kind { True, False, Contingent, Meaningless, Undefined };
  Kind kind = Kind::Contingent;
  double probability = 0;
  QueryResult result;
};

inline std::string_view to_string(TruthVerdict::Kind k) {
  switch (k) {
    case TruthVerdict::Kind::True: return "True";
    case TruthVerdict::Kind::False: return "False";
    case TruthVerdict::Kind::Contingent: return "Contingent";
    case TruthVerdict::Kind::Meaningless: return "Meaningless";
    case TruthVerdict::Kind::Undefined: return "Undefined";
  }
  return "Unknown";
}

/// "True" means conditional probability one within the family.
inline TruthVerdict is_true(const Family& f, const EventExpr& target, const EventExpr& data) {
  QueryResult r = cond_prob(f, target, data);
  using K = TruthVerdict::Kind;
  if (r.is_meaningless()) return {K::Meaningless, 0, r};
  if (r.is_undefined()) return {K::Undefined, 0, r};
  const double eps = f.tolerances().eps_c;
  if (std::abs(r.value - 1.0) <= eps) return {K::True, 1.0, r};
  if (std::abs(r.value) <= eps) return {K::False, 0.0, r};
  return {K::Contingent, r.value, r};
}

enum class PairRelation { Incomparable, Contradictory, Contrary, Compatible };

inline std::string_view to_string(PairRelation r) {
  switch (r) {
    case PairRelation::Incomparable: return "Incomparable";
    case PairRelation::Contradictory: return "Contradictory";
    case PairRelation::Contrary: return "Contrary";
    case PairRelation::Compatible: return "Compatible";
  }
  return "Unknown";
}

/// Contrary and contradictory pairs are both mutually exclusive.
inline bool mutually_exclusive(PairRelation r) {
  return r == PairRelation::Contrary || r == PairRelation::Contradictory;
}

/// Logical relation of two events at time `t` judged inside family `f`.
/// There is deliberately no family-free variant.
inline PairRelation classify_pair(const Family& f, const std::string& t, const Projector& p, const Projector& q) {
  const std::size_t k = f.dynamics()->time_index(t);
  if (!f.in_algebra(k, p) || !f.in_algebra(k, q)) return PairRelation::Incomparable;
  const double eps = f.tolerances().eps;
  if (q.approx_equal(complement(p), eps)) return PairRelation::Contradictory;
  if (orthogonal(p, q, eps)) return PairRelation::Contrary;
  return PairRelation::Compatible;
}

/// Conjunction of claims made in (possibly) different families, optionally
/// conditioned on `data`. Answers only when all the families share a common
/// refinement; otherwise the combination is meaningless.
inline QueryResult cross_framework_guard(const std::vector<std::pair<Family, EventExpr>>& claims,
                                         const std::optional<EventExpr>& data = std::nullopt,
                                         const Tolerances& tol = {}) {
  if (claims.empty()) throw Error(Errc::InvalidArgument, "no claims to combine");
  for (std::size_t i = 0; i < claims.size(); ++i)
    for (std::size_t j = i + 1; j < claims.size(); ++j) {
      auto r = refine(claims[i].first, claims[j].first, tol);
      if (auto* inc = std::get_if<Incompatible>(&r))
        return QueryResult::meaningless(MeaninglessReason::SingleFrameworkViolation,
                                        "families " + claims[i].first.name() + " and " +
                                            claims[j].first.name() + " are incompatible: " + inc->explain(),
                                        claims[i].first.name() + "," + claims[j].first.name());
    }
  Family common = claims.front().first;
  for (std::size_t i = 1; i < claims.size(); ++i) {
    auto r = refine(common, claims[i].first, tol);
    if (auto* inc = std::get_if<Incompatible>(&r))
      return QueryResult::meaningless(MeaninglessReason::SingleFrameworkViolation,
                                      "no common refinement of all families: " + inc->explain(), common.name());
    common = std::get<Family>(std::move(r));
  }
  EventExpr conj = claims.front().second;
  for (std::size_t i = 1; i < claims.size(); ++i) conj = conj & claims[i].second;
  return data ? cond_prob(common, conj, *data) : prob(common, conj);
}

}  // namespace chq
