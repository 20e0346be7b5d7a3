// Event expressions: atoms (time, projector) combined with NOT / AND / OR.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chq/hilbert.hpp"

namespace chq {

class EventExpr {
 public:
  enum class Op { Atom, Not, And, Or };

  static EventExpr atom(std::string time, Projector p) {
    auto n = std::make_shared<Node>(Node{Op::Atom, std::move(time), std::move(p), {}});
    return EventExpr(std::move(n));
  }

  Op op() const noexcept { return node_->op; }
  const std::string& time() const noexcept { return node_->time; }
  const Projector& projector() const { return *node_->projector; }
  const std::vector<EventExpr>& children() const noexcept { return node_->children; }

  friend EventExpr operator!(const EventExpr& e) { return EventExpr(make(Op::Not, {e})); }
  friend EventExpr operator&(const EventExpr& a, const EventExpr& b) { return EventExpr(make(Op::And, {a, b})); }
  friend EventExpr operator|(const EventExpr& a, const EventExpr& b) { return EventExpr(make(Op::Or, {a, b})); }

  /// Rendering in the query grammar: `label@t`, NOT, AND, OR, parentheses.
  std::string to_string() const {
    switch (op()) {
      case Op::Atom: return projector().label() + "@" + time();
      case Op::Not: return "NOT " + wrap(children()[0]);
      case Op::And: return wrap(children()[0]) + " AND " + wrap(children()[1]);
      case Op::Or: return wrap(children()[0]) + " OR " + wrap(children()[1]);
    }
    return {};
  }

  /// Visits every atom, left to right.
  template <class F>
  void for_each_atom(F&& f) const {
    if (op() == Op::Atom) {
      f(*this);
      return;
    }
    for (const auto& c : children()) c.for_each_atom(f);
  }

 private:
  struct Node {
    Op op;
    std::string time;
    std::optional<Projector> projector;
    std::vector<EventExpr> children;
  };

  explicit EventExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<const Node> make(Op op, std::vector<EventExpr> children) {
    return std::make_shared<Node>(Node{op, {}, std::nullopt, std::move(children)});
  }

  static std::string wrap(const EventExpr& e) {
    return e.op() == Op::Atom || e.op() == Op::Not ? e.to_string() : "(" + e.to_string() + ")";
  }

  std::shared_ptr<const Node> node_;
};

}  // namespace chq
