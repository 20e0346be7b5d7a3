// Finite-dimensional complex Hilbert spaces: labeled bases, kets, projectors,
// unitaries, tensor products and completion of partially specified dynamics.
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "chq/core.hpp"

namespace chq {

struct Factor {
  std::string name;
  std::vector<std::string> labels;

  bool operator==(const Factor&) const = default;
};

/// A space with named basis vectors. Product spaces remember their factors;
/// their labels are the comma-joined factor labels, left factor varying slowest.
class HilbertSpace {
 public:
  explicit HilbertSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    check_labels();
  }

  explicit HilbertSpace(Factor factor) : labels_(factor.labels), factors_{std::move(factor)} {
    check_labels();
  }

  static HilbertSpace product(const std::vector<HilbertSpace>& parts) {
    if (parts.empty()) throw Error(Errc::InvalidArgument, "tensor product of zero spaces");
    std::vector<Factor> factors;
    for (const auto& p : parts) {
      if (p.factors_.empty()) {
        factors.push_back(Factor{"", p.labels_});
      } else {
        factors.insert(factors.end(), p.factors_.begin(), p.factors_.end());
      }
    }
    return from_factors(std::move(factors));
  }

  static HilbertSpace from_factors(std::vector<Factor> factors) {
    if (factors.empty()) throw Error(Errc::InvalidArgument, "space needs at least one factor");
    std::vector<std::string> labels{""};
    for (std::size_t f = 0; f < factors.size(); ++f) {
      if (factors[f].labels.empty())
        throw Error(Errc::InvalidArgument, "factor '" + factors[f].name + "' has no basis labels");
      std::vector<std::string> next;
      next.reserve(labels.size() * factors[f].labels.size());
      for (const auto& head : labels)
        for (const auto& l : factors[f].labels) next.push_back(f == 0 ? l : head + "," + l);
      labels = std::move(next);
    }
    HilbertSpace s(std::move(labels), std::move(factors));
    return s;
  }

  std::size_t dim() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<Factor>& factors() const noexcept { return factors_; }

  std::size_t index_of(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
      throw Error(Errc::UnknownLabel, "no basis vector '" + std::string(label) + "'");
    return static_cast<std::size_t>(it - labels_.begin());
  }

  std::size_t factor_index(std::string_view name) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
      if (factors_[i].name == name) return i;
    throw Error(Errc::UnknownLabel, "no factor '" + std::string(name) + "'");
  }

  bool operator==(const HilbertSpace& o) const {
    return labels_ == o.labels_ && factors_ == o.factors_;
  }

 private:
  HilbertSpace(std::vector<std::string> labels, std::vector<Factor> factors)
      : labels_(std::move(labels)), factors_(std::move(factors)) {
    check_labels();
  }

  void check_labels() const {
    if (labels_.empty()) throw Error(Errc::InvalidArgument, "space of dimension zero");
    std::set<std::string_view> seen;
    for (const auto& l : labels_)
      if (!seen.insert(l).second) throw Error(Errc::InvalidArgument, "duplicate basis label '" + l + "'");
    for (const auto& f : factors_) {
      std::set<std::string_view> fs(f.labels.begin(), f.labels.end());
      if (fs.size() != f.labels.size())
        throw Error(Errc::InvalidArgument, "duplicate basis label in factor '" + f.name + "'");
    }
  }

  std::vector<std::string> labels_;
  std::vector<Factor> factors_;
};

using SpacePtr = std::shared_ptr<const HilbertSpace>;

inline SpacePtr make_space(HilbertSpace s) { return std::make_shared<const HilbertSpace>(std::move(s)); }

inline bool same_space(const SpacePtr& a, const SpacePtr& b) {
  return a == b || (a && b && *a == *b);
}

inline void require_same_space(const SpacePtr& a, const SpacePtr& b, std::string_view what) {
  if (!same_space(a, b)) throw Error(Errc::SpaceMismatch, std::string(what));
}

class StateVector {
 public:
  StateVector(SpacePtr space, Vector amplitudes)
      : space_(std::move(space)), amps_(std::move(amplitudes)) {
    if (!space_) throw Error(Errc::InvalidArgument, "state without a space");
    if (static_cast<std::size_t>(amps_.size()) != space_->dim())
      throw Error(Errc::SpaceMismatch, "amplitude count " + std::to_string(amps_.size()) +
                                           " != dim " + std::to_string(space_->dim()));
  }

  static StateVector basis(SpacePtr space, std::string_view label) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(space->dim()));
    v(static_cast<Eigen::Index>(space->index_of(label))) = 1.0;
    return StateVector(std::move(space), std::move(v));
  }

  const SpacePtr& space() const noexcept { return space_; }
  const Vector& amplitudes() const noexcept { return amps_; }
  double norm() const { return amps_.norm(); }
  cplx inner(const StateVector& other) const {
    require_same_space(space_, other.space_, "inner product across spaces");
    return amps_.dot(other.amps_);
  }

 private:
  SpacePtr space_;
  Vector amps_;
};

/// Orthogonal projector. Construction checks hermiticity, idempotence and
/// integral trace; the label is metadata and never enters equality.
class Projector {
 public:
  Projector(SpacePtr space, Matrix m, std::string label = {}, double eps = Tolerances{}.eps)
      : space_(std::move(space)), m_(std::move(m)), label_(std::move(label)) {
    check_shape();
    if (max_abs(Matrix(m_ - m_.adjoint())) > eps)
      throw Error(Errc::NotAProjector, "'" + label_ + "' is not Hermitian");
    if (max_abs(Matrix(m_ * m_ - m_)) > eps)
      throw Error(Errc::NotAProjector, "'" + label_ + "' is not idempotent");
    const double tr = m_.trace().real();
    if (std::abs(tr - std::round(tr)) > eps * static_cast<double>(space_->dim()) + eps)
      throw Error(Errc::NotAProjector, "'" + label_ + "' has non-integral trace");
  }

  static Projector identity(SpacePtr space, std::string label = "I") {
    const auto n = static_cast<Eigen::Index>(space->dim());
    return Projector(unchecked, std::move(space), Matrix::Identity(n, n), std::move(label));
  }

  static Projector zero(SpacePtr space, std::string label = "0") {
    const auto n = static_cast<Eigen::Index>(space->dim());
    return Projector(unchecked, std::move(space), Matrix::Zero(n, n), std::move(label));
  }

  const SpacePtr& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return m_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t rank() const { return static_cast<std::size_t>(std::llround(m_.trace().real())); }
  bool is_zero(double eps = Tolerances{}.eps) const { return max_abs(m_) <= eps; }

  Projector with_label(std::string label) const {
    return Projector(unchecked, space_, m_, std::move(label));
  }

  bool approx_equal(const Projector& o, double eps = Tolerances{}.eps) const {
    return same_space(space_, o.space_) && max_abs(Matrix(m_ - o.m_)) <= eps;
  }

 private:
  struct unchecked_t {};
  static constexpr unchecked_t unchecked{};
  Projector(unchecked_t, SpacePtr space, Matrix m, std::string label)
      : space_(std::move(space)), m_(std::move(m)), label_(std::move(label)) {}

  void check_shape() const {
    if (!space_) throw Error(Errc::InvalidArgument, "projector without a space");
    const auto n = static_cast<Eigen::Index>(space_->dim());
    if (m_.rows() != n || m_.cols() != n) throw Error(Errc::SpaceMismatch, "projector shape mismatch");
  }

  friend Projector complement(const Projector& p);

  SpacePtr space_;
  Matrix m_;
  std::string label_;
};

class UnitaryOp {
 public:
  UnitaryOp(SpacePtr space, Matrix m, double eps = Tolerances{}.eps)
      : space_(std::move(space)), m_(std::move(m)) {
    if (!space_) throw Error(Errc::InvalidArgument, "unitary without a space");
    const auto n = static_cast<Eigen::Index>(space_->dim());
    if (m_.rows() != n || m_.cols() != n) throw Error(Errc::SpaceMismatch, "unitary shape mismatch");
    if (max_abs(Matrix(m_ * m_.adjoint() - Matrix::Identity(n, n))) > eps)
      throw Error(Errc::NotUnitary, "matrix is not unitary");
  }

  static UnitaryOp identity(SpacePtr space) {
    const auto n = static_cast<Eigen::Index>(space->dim());
    return UnitaryOp(std::move(space), Matrix::Identity(n, n));
  }

  const SpacePtr& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return m_; }

  StateVector apply(const StateVector& v) const {
    require_same_space(space_, v.space(), "unitary applied to state of another space");
    return StateVector(space_, m_ * v.amplitudes());
  }

 private:
  SpacePtr space_;
  Matrix m_;
};

/// `later` after `earlier`.
inline UnitaryOp compose(const UnitaryOp& later, const UnitaryOp& earlier) {
  require_same_space(later.space(), earlier.space(), "composing unitaries on different spaces");
  return UnitaryOp(later.space(), later.matrix() * earlier.matrix(), 1e-9);
}

inline Projector projector_from_state(const StateVector& v, std::string label = {},
                                      const Tolerances& tol = {}) {
  if (std::abs(v.norm() - 1.0) > tol.eps)
    throw Error(Errc::NotNormalized, "state norm " + std::to_string(v.norm()));
  const Vector& a = v.amplitudes();
  return Projector(v.space(), a * a.adjoint(), std::move(label), tol.eps);
}

inline std::string negated_label(const std::string& label) {
  if (label.empty()) return {};
  if (label.front() == '~' && label.find_first_of("&|") == std::string::npos) return label.substr(1);
  if (label.find_first_of("&|") != std::string::npos) return "~(" + label + ")";
  return "~" + label;
}

/// I - P.
inline Projector complement(const Projector& p) {
  const auto n = static_cast<Eigen::Index>(p.space()->dim());
  return Projector(Projector::unchecked, p.space(), Matrix(Matrix::Identity(n, n) - p.matrix()),
                   negated_label(p.label()));
}

inline bool commutes(const Projector& p, const Projector& q, double eps = Tolerances{}.eps) {
  require_same_space(p.space(), q.space(), "commutes: '" + p.label() + "' vs '" + q.label() + "'");
  return max_abs(Matrix(p.matrix() * q.matrix() - q.matrix() * p.matrix())) <= eps;
}

/// P Q = 0.
inline bool orthogonal(const Projector& p, const Projector& q, double eps = Tolerances{}.eps) {
  require_same_space(p.space(), q.space(), "orthogonal: projectors on different spaces");
  return max_abs(Matrix(p.matrix() * q.matrix())) <= eps;
}

/// P <= Q, i.e. Q P = P.
inline bool is_subprojector(const Projector& p, const Projector& q, double eps = Tolerances{}.eps) {
  require_same_space(p.space(), q.space(), "subprojector: projectors on different spaces");
  return max_abs(Matrix(q.matrix() * p.matrix() - p.matrix())) <= eps;
}

/// Product of commuting projectors (the meet in their common Boolean algebra).
inline Projector meet(const Projector& p, const Projector& q, double eps = Tolerances{}.eps) {
  if (!commutes(p, q, eps))
    throw Error(Errc::NotAProjector, "product of non-commuting '" + p.label() + "' and '" + q.label() + "'");
  if (is_subprojector(p, q, eps)) return p;
  if (is_subprojector(q, p, eps)) return q;
  std::string label = p.label().empty() || q.label().empty() ? std::string{} : p.label() + "&" + q.label();
  return Projector(p.space(), p.matrix() * q.matrix(), std::move(label), eps * 10);
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline HilbertSpace tensor(const std::vector<HilbertSpace>& spaces) { return HilbertSpace::product(spaces); }

inline StateVector tensor(const std::vector<StateVector>& states) {
  if (states.empty()) throw Error(Errc::InvalidArgument, "tensor of zero states");
  std::vector<HilbertSpace> spaces;
  Matrix acc = Matrix::Ones(1, 1);
  for (const auto& s : states) {
    spaces.push_back(*s.space());
    acc = kron(acc, Matrix(s.amplitudes()));
  }
  return StateVector(make_space(HilbertSpace::product(spaces)), Vector(acc.col(0)));
}

namespace detail {
template <class Op>
std::pair<SpacePtr, Matrix> tensor_ops(const std::vector<Op>& ops) {
  if (ops.empty()) throw Error(Errc::InvalidArgument, "tensor of zero operators");
  std::vector<HilbertSpace> spaces;
  Matrix acc = Matrix::Ones(1, 1);
  for (const auto& op : ops) {
    spaces.push_back(*op.space());
    acc = kron(acc, op.matrix());
  }
  return {make_space(HilbertSpace::product(spaces)), std::move(acc)};
}
}  // namespace detail

inline Projector tensor(const std::vector<Projector>& ps) {
  auto [space, m] = detail::tensor_ops(ps);
  std::string label;
  for (const auto& p : ps) label += (label.empty() ? "" : "x") + p.label();
  return Projector(std::move(space), std::move(m), std::move(label), 1e-9);
}

inline UnitaryOp tensor(const std::vector<UnitaryOp>& us) {
  auto [space, m] = detail::tensor_ops(us);
  return UnitaryOp(std::move(space), std::move(m), 1e-9);
}

using Tensorable = std::variant<HilbertSpace, StateVector, Projector, UnitaryOp>;

/// Dynamically typed tensor product; every factor must be of the same kind.
inline Tensorable tensor(const std::vector<Tensorable>& items) {
  if (items.empty()) throw Error(Errc::InvalidArgument, "tensor of nothing");
  const auto kind = items.front().index();
  for (const auto& it : items)
    if (it.index() != kind) throw Error(Errc::MixedKinds, "tensor factors of different kinds");
  return std::visit(
      [&](const auto& first) -> Tensorable {
        using T = std::decay_t<decltype(first)>;
        std::vector<T> typed;
        for (const auto& it : items) typed.push_back(std::get<T>(it));
        return tensor(typed);
      },
      items.front());
}

/// Lifts an operator acting on the listed factors (in the listed order) of a
/// product space to the whole space, acting as identity on the other factors.
inline Matrix embed(const HilbertSpace& full, const std::vector<std::size_t>& factor_ids, const Matrix& op) {
  const auto& factors = full.factors();
  if (factors.empty()) throw Error(Errc::InvalidArgument, "embed needs a space with factor structure");
  std::vector<std::size_t> dims;
  for (const auto& f : factors) dims.push_back(f.labels.size());
  std::vector<bool> selected(factors.size(), false);
  std::size_t sub_dim = 1;
  for (auto id : factor_ids) {
    if (id >= factors.size() || selected[id]) throw Error(Errc::InvalidArgument, "bad factor list for embedding");
    selected[id] = true;
    sub_dim *= dims[id];
  }
  if (static_cast<std::size_t>(op.rows()) != sub_dim || static_cast<std::size_t>(op.cols()) != sub_dim)
    throw Error(Errc::SpaceMismatch, "embedded operator has wrong dimension");

  const std::size_t n = full.dim();
  std::vector<std::size_t> sub_index(n), rest_index(n);
  std::vector<std::size_t> digits(factors.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rem = i;
    for (std::size_t f = factors.size(); f-- > 0;) {
      digits[f] = rem % dims[f];
      rem /= dims[f];
    }
    std::size_t s = 0;
    for (auto id : factor_ids) s = s * dims[id] + digits[id];
    std::size_t r = 0;
    for (std::size_t f = 0; f < factors.size(); ++f)
      if (!selected[f]) r = r * dims[f] + digits[f];
    sub_index[i] = s;
    rest_index[i] = r;
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (rest_index[i] == rest_index[j])
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            op(static_cast<Eigen::Index>(sub_index[i]), static_cast<Eigen::Index>(sub_index[j]));
  return out;
}

/// Space spanned by the listed factors of `full`, in the listed order.
inline HilbertSpace subspace_of_factors(const HilbertSpace& full, const std::vector<std::size_t>& factor_ids) {
  std::vector<Factor> fs;
  for (auto id : factor_ids) {
    if (id >= full.factors().size()) throw Error(Errc::InvalidArgument, "factor index out of range");
    fs.push_back(full.factors()[id]);
  }
  return HilbertSpace::from_factors(std::move(fs));
}

namespace detail {

// Modified Gram-Schmidt (two passes) of `v` against the first `k` columns of `basis`.
inline Vector orthogonalize(Vector v, const Matrix& basis, Eigen::Index k) {
  for (int pass = 0; pass < 2; ++pass)
    for (Eigen::Index j = 0; j < k; ++j) v -= basis.col(j).dot(v) * basis.col(j);
  return v;
}

// Extends orthonormal columns to a full orthonormal basis, scanning the
// standard basis in label order. Any residual above 0.5/sqrt(n) is accepted;
// some standard vector always has residual >= 1/sqrt(n) while the span is
// incomplete, so one scan suffices.
inline Matrix complete_basis(const Matrix& cols) {
  const Eigen::Index n = cols.rows();
  Matrix basis = Matrix::Zero(n, n);
  Eigen::Index k = cols.cols();
  basis.leftCols(k) = cols;
  const double threshold = 0.5 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index i = 0; i < n && k < n; ++i) {
    Vector e = Vector::Zero(n);
    e(i) = 1.0;
    Vector r = orthogonalize(e, basis, k);
    const double norm = r.norm();
    if (norm > threshold) basis.col(k++) = r / norm;
  }
  return basis;
}

inline bool orthonormal_columns(const Matrix& m, double eps) {
  const Eigen::Index k = m.cols();
  return max_abs(Matrix(m.adjoint() * m - Matrix::Identity(k, k))) <= eps;
}

}  // namespace detail

/// Builds a unitary that maps each input ket to its paired output ket. The
/// complement is filled deterministically: both orthonormal sets are extended
/// to bases by Gram-Schmidt over the standard basis, and the i-th extra input
/// vector is sent to the i-th extra output vector. An empty map gives I.
inline UnitaryOp complete_unitary(const SpacePtr& space,
                                  const std::vector<std::pair<StateVector, StateVector>>& partial_map,
                                  const Tolerances& tol = {}) {
  const auto n = static_cast<Eigen::Index>(space->dim());
  const auto k = static_cast<Eigen::Index>(partial_map.size());
  if (k > n)
    throw Error(Errc::TooManyVectors,
                std::to_string(k) + " pairs for a space of dimension " + std::to_string(n));
  Matrix in(n, k), out(n, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& [from, to] = partial_map[static_cast<std::size_t>(i)];
    require_same_space(space, from.space(), "partial map input on another space");
    require_same_space(space, to.space(), "partial map output on another space");
    in.col(i) = from.amplitudes();
    out.col(i) = to.amplitudes();
  }
  if (!detail::orthonormal_columns(in, tol.eps))
    throw Error(Errc::NonOrthonormalInputs, "partial-map inputs are not orthonormal");
  if (!detail::orthonormal_columns(out, tol.eps))
    throw Error(Errc::NonOrthonormalOutputs, "partial-map outputs are not orthonormal");
  const Matrix in_basis = detail::complete_basis(in);
  const Matrix out_basis = detail::complete_basis(out);
  return UnitaryOp(space, out_basis * in_basis.adjoint(), tol.eps);
}

}  // namespace chq
