// Multi-time histories over a unitary schedule: chain operators, weights and
// the decoherence functional.
#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chq/hilbert.hpp"

namespace chq {

/// Ordered time labels t_0 < ... < t_n with one unitary per interval;
/// steps[k] evolves t_k -> t_{k+1}. Labels are opaque tokens.
class Dynamics {
 public:
  Dynamics(SpacePtr space, std::vector<std::string> times, std::vector<UnitaryOp> steps)
      : space_(std::move(space)), times_(std::move(times)), steps_(std::move(steps)) {
    if (times_.empty()) throw Error(Errc::InvalidArgument, "dynamics needs at least one time");
    if (steps_.size() + 1 != times_.size())
      throw Error(Errc::InvalidArgument, std::to_string(times_.size()) + " times need " +
                                             std::to_string(times_.size() - 1) + " step unitaries");
    for (std::size_t i = 0; i < times_.size(); ++i)
      for (std::size_t j = i + 1; j < times_.size(); ++j)
        if (times_[i] == times_[j]) throw Error(Errc::InvalidArgument, "duplicate time '" + times_[i] + "'");
    for (const auto& u : steps_) require_same_space(space_, u.space(), "step unitary on another space");
  }

  /// Identity evolution over the given times.
  static Dynamics trivial(SpacePtr space, std::vector<std::string> times) {
    std::vector<UnitaryOp> steps;
    for (std::size_t i = 1; i < times.size(); ++i) steps.push_back(UnitaryOp::identity(space));
    return Dynamics(std::move(space), std::move(times), std::move(steps));
  }

  const SpacePtr& space() const noexcept { return space_; }
  const std::vector<std::string>& times() const noexcept { return times_; }
  const std::vector<UnitaryOp>& steps() const noexcept { return steps_; }
  std::size_t num_times() const noexcept { return times_.size(); }

  std::size_t time_index(std::string_view t) const {
    for (std::size_t i = 0; i < times_.size(); ++i)
      if (times_[i] == t) return i;
    throw Error(Errc::UnknownTime, "no time '" + std::string(t) + "'");
  }

  /// U(t_to, t_from), from <= to.
  Matrix evolution(std::size_t from, std::size_t to) const {
    const auto n = static_cast<Eigen::Index>(space_->dim());
    Matrix u = Matrix::Identity(n, n);
    for (std::size_t k = from; k < to; ++k) u = steps_[k].matrix() * u;
    return u;
  }

  bool approx_equal(const Dynamics& o, double eps = Tolerances{}.eps) const {
    if (!same_space(space_, o.space_) || times_ != o.times_) return false;
    for (std::size_t k = 0; k < steps_.size(); ++k)
      if (max_abs(Matrix(steps_[k].matrix() - o.steps_[k].matrix())) > eps) return false;
    return true;
  }

 private:
  SpacePtr space_;
  std::vector<std::string> times_;
  std::vector<UnitaryOp> steps_;
};

using DynamicsPtr = std::shared_ptr<const Dynamics>;

inline DynamicsPtr make_dynamics(Dynamics d) { return std::make_shared<const Dynamics>(std::move(d)); }

inline bool same_dynamics(const DynamicsPtr& a, const DynamicsPtr& b) {
  return a == b || (a && b && a->approx_equal(*b));
}

/// initial ⊙ events[0] ⊙ ... ⊙ events[n-1], one event per later time.
class History {
 public:
  History(DynamicsPtr dynamics, Projector initial, std::vector<Projector> events)
      : dyn_(std::move(dynamics)), initial_(std::move(initial)), events_(std::move(events)) {
    if (!dyn_) throw Error(Errc::InvalidHistory, "history without dynamics");
    if (events_.size() + 1 != dyn_->num_times())
      throw Error(Errc::InvalidHistory, std::to_string(events_.size()) + " events for " +
                                            std::to_string(dyn_->num_times() - 1) + " later times");
    require_same_space(dyn_->space(), initial_.space(), "initial event on another space");
    for (const auto& e : events_) require_same_space(dyn_->space(), e.space(), "event on another space");
  }

  const DynamicsPtr& dynamics() const noexcept { return dyn_; }
  const Projector& initial() const noexcept { return initial_; }
  const std::vector<Projector>& events() const noexcept { return events_; }

  /// Event at time index k; k = 0 is the initial event.
  const Projector& event_at(std::size_t k) const { return k == 0 ? initial_ : events_.at(k - 1); }

  std::string label() const {
    std::string s = "[" + initial_.label();
    for (const auto& e : events_) s += ", " + e.label();
    return s + "]";
  }

  /// Same history with the event at time index k replaced.
  History with_event(std::size_t k, Projector p) const {
    if (k == 0) return History(dyn_, std::move(p), events_);
    auto ev = events_;
    ev.at(k - 1) = std::move(p);
    return History(dyn_, initial_, std::move(ev));
  }

 private:
  DynamicsPtr dyn_;
  Projector initial_;
  std::vector<Projector> events_;
};

/// K(h) = P_n U(t_n,t_{n-1}) ... P_1 U(t_1,t_0) P_0.
inline Matrix chain_operator(const History& h) {
  Matrix k = h.initial().matrix();
  const auto& steps = h.dynamics()->steps();
  for (std::size_t i = 0; i < steps.size(); ++i) k = h.events()[i].matrix() * (steps[i].matrix() * k);
  return k;
}

/// D(h1, h2) = Tr[K(h1)^† K(h2)] from precomputed chain operators.
inline cplx decoherence(const Matrix& k1, const Matrix& k2) {
  return (k1.conjugate().cwiseProduct(k2)).sum();
}

/// W(h) = Tr[K^† K].
inline double weight(const History& h) { return chain_operator(h).squaredNorm(); }

inline cplx decoherence(const History& h1, const History& h2) {
  if (!same_dynamics(h1.dynamics(), h2.dynamics()))
    throw Error(Errc::DynamicsMismatch, "decoherence of histories with different dynamics");
  return decoherence(chain_operator(h1), chain_operator(h2));
}

}  // namespace chq
