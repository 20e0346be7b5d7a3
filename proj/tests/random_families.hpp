// Random consistent families for property tests.
//
// Each later-time slot is built from the current branch vectors (the
// evolved, projected initial state along every history so far). A branch
// either keeps its own ray or is split into two rays that tilt it toward a
// fresh direction orthogonal to everything used so far. Every ray overlaps
// one branch only, so any grouping of the rays (plus the leftover subspace,
// which no branch reaches) keeps the new branch vectors mutually orthogonal:
// the family is consistent under both conditions.
#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "chq/frameworks.hpp"

namespace chq::testing {

inline Matrix random_unitary(std::mt19937_64& g, Eigen::Index n) {
  std::normal_distribution<double> N;
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(N(g), N(g));
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline Vector random_state(std::mt19937_64& g, Eigen::Index n) {
  std::normal_distribution<double> N;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(N(g), N(g));
  return v / v.norm();
}

// Unit vector orthogonal to the columns of `used` (assumed orthonormal).
inline Vector fresh_direction(std::mt19937_64& g, const Matrix& used) {
  while (true) {
    Vector v = random_state(g, used.rows());
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index j = 0; j < used.cols(); ++j) v -= used.col(j).dot(v) * used.col(j);
    if (v.norm() > 1e-3) return v / v.norm();
  }
}

inline Matrix append_col(const Matrix& m, const Vector& v) {
  Matrix out(m.rows(), m.cols() + 1);
  out.leftCols(m.cols()) = m;
  out.col(m.cols()) = v;
  return out;
}

struct RandomFamily {
  DynamicsPtr dynamics;
  Projector initial;
  std::vector<std::vector<Projector>> slots;
  std::vector<History> histories;
};

// One slot partition for the given branch vectors.
inline std::vector<Projector> consistent_slot(std::mt19937_64& g, const SpacePtr& space,
                                              const std::vector<Vector>& branches, const std::string& tag) {
  const auto n = static_cast<Eigen::Index>(space->dim());
  Matrix used(n, 0);
  std::vector<Vector> hats;
  for (const auto& b : branches) {
    if (b.norm() < 1e-9) continue;
    Vector h = b;
    for (Eigen::Index j = 0; j < used.cols(); ++j) h -= used.col(j).dot(h) * used.col(j);
    h /= h.norm();
    used = append_col(used, h);
    hats.push_back(h);
  }
  std::uniform_real_distribution<double> U(0.2, 1.35);
  std::bernoulli_distribution coin(0.6);
  std::vector<Vector> rays;
  for (const auto& h : hats) {
    if (used.cols() < n && coin(g)) {
      Vector x = fresh_direction(g, used);
      used = append_col(used, x);
      const double th = U(g);
      rays.push_back(std::cos(th) * h + std::sin(th) * x);
      rays.push_back(-std::sin(th) * h + std::cos(th) * x);
    } else {
      rays.push_back(h);
    }
  }
  // Spare directions become extra rays no branch reaches.
  std::bernoulli_distribution spare(0.3);
  while (used.cols() < n && spare(g)) {
    Vector x = fresh_direction(g, used);
    used = append_col(used, x);
    rays.push_back(x);
  }
  std::shuffle(rays.begin(), rays.end(), g);
  std::uniform_int_distribution<std::size_t> groups_dist(1, std::max<std::size_t>(1, std::min<std::size_t>(4, rays.size())));
  const std::size_t k = groups_dist(g);
  std::vector<Matrix> blocks(k, Matrix::Zero(n, n));
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const std::size_t b = i < k ? i : std::uniform_int_distribution<std::size_t>(0, k - 1)(g);
    blocks[b] += rays[i] * rays[i].adjoint();
  }
  Matrix covered = Matrix::Zero(n, n);
  for (const auto& b : blocks) covered += b;
  Matrix rest = Matrix::Identity(n, n) - covered;
  std::vector<Projector> out;
  if (rest.trace().real() > 0.5) {
    const std::size_t b = std::uniform_int_distribution<std::size_t>(0, k)(g);
    if (b == k) out.emplace_back(space, rest, tag + "r", 1e-8);
    else blocks[b] += rest;
  }
  for (std::size_t b = 0; b < k; ++b) out.emplace_back(space, blocks[b], tag + std::to_string(b), 1e-8);
  return out;
}

inline std::vector<Vector> branches_after(const std::vector<Vector>& branches, const std::vector<Projector>& slot) {
  std::vector<Vector> next;
  for (const auto& b : branches)
    for (const auto& p : slot) next.push_back(p.matrix() * b);
  return next;
}

/// dim in [2, 8], 2 to 4 times, pure initial state.
inline RandomFamily random_family(std::mt19937_64& g) {
  const auto dim = std::uniform_int_distribution<Eigen::Index>(2, 8)(g);
  const auto times = std::uniform_int_distribution<std::size_t>(2, 4)(g);
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < dim; ++i) labels.push_back("b" + std::to_string(i));
  auto space = make_space(HilbertSpace(labels));
  std::vector<std::string> tnames;
  std::vector<UnitaryOp> steps;
  for (std::size_t t = 0; t < times; ++t) tnames.push_back("t" + std::to_string(t));
  for (std::size_t t = 1; t < times; ++t) steps.emplace_back(space, random_unitary(g, dim), 1e-9);
  auto dyn = make_dynamics(Dynamics(space, tnames, steps));

  const Vector psi0 = random_state(g, dim);
  Projector initial(space, psi0 * psi0.adjoint(), "psi0", 1e-9);

  RandomFamily f{dyn, initial, {}, {}};
  std::vector<Vector> branches{psi0};
  for (std::size_t t = 1; t < times; ++t) {
    for (auto& b : branches) b = steps[t - 1].matrix() * b;
    auto slot = consistent_slot(g, space, branches, "p" + std::to_string(t) + "_");
    branches = branches_after(branches, slot);
    f.slots.push_back(std::move(slot));
  }
  f.histories = product_histories(dyn, initial, f.slots);
  return f;
}

/// Same family with the last slot rebuilt from scratch.
inline RandomFamily vary_last_slot(std::mt19937_64& g, const RandomFamily& f) {
  RandomFamily out = f;
  const auto& dyn = *f.dynamics;
  const Vector psi0 = [&] {
    Eigen::SelfAdjointEigenSolver<Matrix> es(f.initial.matrix());
    return Vector(es.eigenvectors().col(es.eigenvectors().cols() - 1));
  }();
  std::vector<Vector> branches{psi0};
  for (std::size_t t = 1; t < dyn.num_times(); ++t) {
    for (auto& b : branches) b = dyn.steps()[t - 1].matrix() * b;
    if (t + 1 == dyn.num_times()) out.slots[t - 1] = consistent_slot(g, dyn.space(), branches, "q_");
    branches = branches_after(branches, out.slots[t - 1]);
  }
  out.histories = product_histories(out.dynamics, out.initial, out.slots);
  return out;
}

/// Merges the projectors of one slot into at most two groups.
inline RandomFamily coarse_grain(std::mt19937_64& g, const RandomFamily& f) {
  RandomFamily out = f;
  const std::size_t t = std::uniform_int_distribution<std::size_t>(0, f.slots.size() - 1)(g);
  const auto& slot = f.slots[t];
  if (slot.size() < 2) return out;
  const auto n = static_cast<Eigen::Index>(f.dynamics->space()->dim());
  Matrix a = Matrix::Zero(n, n), b = Matrix::Zero(n, n);
  const std::size_t cut = std::uniform_int_distribution<std::size_t>(1, slot.size() - 1)(g);
  for (std::size_t i = 0; i < slot.size(); ++i) (i < cut ? a : b) += slot[i].matrix();
  out.slots[t] = {Projector(f.dynamics->space(), a, "g0", 1e-8), Projector(f.dynamics->space(), b, "g1", 1e-8)};
  out.histories = product_histories(out.dynamics, out.initial, out.slots);
  return out;
}

}  // namespace chq::testing
