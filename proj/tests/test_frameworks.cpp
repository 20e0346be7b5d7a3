#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "chq/builtins.hpp"

using namespace chq;

namespace {

const Scenario& bs() {
  static const Scenario s = build_beamsplitter();
  return s;
}

History hist(const Scenario& s, const std::string& init, std::vector<Projector> events) {
  return History(s.dynamics(), s.projector(init), std::move(events));
}

Vector basis_vec(const Scenario& s, const std::string& label) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(s.space()->dim()));
  v(static_cast<Eigen::Index>(s.space()->index_of(label))) = 1.0;
  return v;
}

std::size_t finite_weight_count(const Family& f) {
  std::size_t n = 0;
  for (double w : f.weights()) n += w > 1e-10;
  return n;
}

// c/d at t1 against S / ~S at t2.
std::vector<History> mixed_candidate(const Scenario& s) {
  const auto& p = [&](const char* l) { return s.projector(l); };
  std::vector<std::vector<Projector>> slots{boolean_atoms(s.space(), {p("c"), p("d")}),
                                            {p("S"), complement(p("S"))}};
  return product_histories(s.dynamics(), p("Psi0"), slots);
}

}  // namespace

TEST(BooleanAtoms, GeneratedAtoms) {
  const auto& s = bs();
  auto atoms = boolean_atoms(s.space(), {s.projector("c"), s.projector("d")});
  ASSERT_EQ(atoms.size(), 3u);
  EXPECT_TRUE(atoms[0].approx_equal(s.projector("c")));
  EXPECT_TRUE(atoms[1].approx_equal(s.projector("d")));
  EXPECT_EQ(atoms[0].rank() + atoms[1].rank() + atoms[2].rank(), s.space()->dim());
  EXPECT_EQ(boolean_atoms(s.space(), {}).size(), 1u);
}

TEST(BooleanAtoms, NonCommutingGenerators) {
  const auto& s = bs();
  try {
    boolean_atoms(s.space(), {s.projector("c"), s.projector("s")});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonCommutingSlot);
  }
}

TEST(ValidateFamily, F1HasOneFiniteWeightHistory) {
  const Family& f1 = bs().family("F1");
  EXPECT_EQ(finite_weight_count(f1), 1u);
  EXPECT_EQ(f1.size(), 4u);
  EXPECT_NEAR(f1.total_weight(), 1.0, 1e-10);
  std::size_t flagged = 0;
  for (bool z : f1.certificate().zero_weight) flagged += z;
  EXPECT_EQ(flagged, 3u);
}

TEST(ValidateFamily, F2HasTwoFiniteWeightHistories) {
  const Family& f2 = bs().family("F2");
  EXPECT_EQ(finite_weight_count(f2), 2u);
  EXPECT_LE(f2.certificate().max_abs_residual, 1e-12);
}

TEST(ValidateFamily, CompletesPartialCandidate) {
  const auto& s = bs();
  std::vector<History> partial{hist(s, "Psi0", {s.projector("sCD"), s.projector("S")})};
  Family f = validate_family(complete_candidate(partial), "F1auto");
  EXPECT_EQ(finite_weight_count(f), 1u);
  EXPECT_EQ(f.size(), 4u);
}

TEST(ValidateFamily, MixedDetectorFamilyIsInconsistent) {
  const auto& s = bs();
  const double r2 = 1 / std::sqrt(2.0);
  // Vector oracle: branch c ends in |absorbed,C*,D>/sqrt2, branch d in |absorbed,C,D*>/sqrt2.
  Vector bc = r2 * basis_vec(s, "absorbed,triggered,ready");
  Vector bd = r2 * basis_vec(s, "absorbed,ready,triggered");
  Vector sv = r2 * (basis_vec(s, "absorbed,triggered,ready") + basis_vec(s, "absorbed,ready,triggered"));
  Vector pc = sv * sv.dot(bc), pd = sv * sv.dot(bd);
  const double oracle = pc.dot(pd).real();
  EXPECT_NEAR(oracle, 0.25, 1e-15);

  for (auto cond : {Consistency::Medium, Consistency::Strong}) {
    Tolerances tol;
    tol.condition = cond;
    CertificationReport r = certify(mixed_candidate(s), "mixed", tol);
    EXPECT_EQ(r.verdict, CertificationReport::Verdict::Inconsistent);
    EXPECT_NEAR(r.max_re_residual, oracle, 1e-10);
    ASSERT_TRUE(r.offending_pair.has_value());
    try {
      validate_family(mixed_candidate(s), "mixed", tol);
      FAIL();
    } catch (const FamilyError& e) {
      EXPECT_EQ(e.code(), Errc::Inconsistent);
    }
  }
}

TEST(ValidateFamily, NotExhaustive) {
  auto hs = bs().family("F2").histories();
  hs.pop_back();
  CertificationReport r = certify(hs, "short");
  EXPECT_EQ(r.verdict, CertificationReport::Verdict::NotExhaustive);
}

TEST(ValidateFamily, NonOrthogonal) {
  const auto& s = bs();
  const Projector I = Projector::identity(s.space());
  std::vector<History> hs{hist(s, "Psi0", {s.projector("C"), I}), hist(s, "Psi0", {s.projector("CD"), I}),
                          hist(s, "Psi0", {s.projector("Cstar"), I})};
  CertificationReport r = certify(hs, "overlap");
  EXPECT_EQ(r.verdict, CertificationReport::Verdict::NonOrthogonal);
  EXPECT_TRUE(r.offending_pair.has_value());
}

TEST(ValidateFamily, NonCommutingSlot) {
  const auto& s = bs();
  const Projector I = Projector::identity(s.space());
  std::vector<History> hs{hist(s, "Psi0", {s.projector("c"), I}), hist(s, "Psi0", {s.projector("s"), I})};
  CertificationReport r = certify(hs, "noncommuting");
  EXPECT_EQ(r.verdict, CertificationReport::Verdict::NonCommutingSlot);
  EXPECT_EQ(r.offending_time, std::optional<std::size_t>(1));
}

TEST(ValidateFamily, PermutationInvariant) {
  auto hs = bs().family("F2").histories();
  std::reverse(hs.begin(), hs.end());
  std::rotate(hs.begin(), hs.begin() + 3, hs.end());
  EXPECT_TRUE(certify(hs, "perm").ok());
}

TEST(ValidateFamily, MalformedInputThrows) {
  const auto& s = bs();
  auto idle = make_dynamics(Dynamics::trivial(s.space(), s.dynamics()->times()));
  const Projector I = Projector::identity(s.space());
  std::vector<History> hs{hist(s, "Psi0", {I, I}), History(idle, s.projector("Psi0"), {I, I})};
  EXPECT_THROW(certify(hs), Error);
  std::vector<History> mixed_init{hist(s, "Psi0", {I, I}), History(s.dynamics(), s.projector("a"), {I, I})};
  EXPECT_THROW(certify(mixed_init), Error);
}

TEST(Refine, BeamsplitterFamiliesAreIncompatible) {
  const auto& s = bs();
  auto check = [&](const char* f, const char* g, const char* time, const char* p, const char* q) {
    auto r = refine(s.family(f), s.family(g));
    ASSERT_TRUE(std::holds_alternative<Incompatible>(r)) << f << " vs " << g;
    const auto& inc = std::get<Incompatible>(r);
    ASSERT_TRUE(inc.non_commuting());
    const auto& nc = std::get<NonCommuting>(inc.reason);
    EXPECT_EQ(nc.time_label, time);
    EXPECT_EQ(nc.p, p);
    EXPECT_EQ(nc.q, q);
  };
  // t1 slots of F1 and F2 commute; the detectors at t2 do not
  check("F1", "F2", "t2", "S", "CstarD");
  check("F1", "F3", "t1", "sCD", "c");
  check("F2", "F3", "t1", "sCD", "c");
}

TEST(Refine, SelfRefinementIsIdentity) {
  const Family& f2 = bs().family("F2");
  auto r = refine(f2, f2);
  ASSERT_TRUE(std::holds_alternative<Family>(r));
  const Family& g = std::get<Family>(r);
  ASSERT_EQ(g.size(), f2.size());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g.weights()[i], f2.weights()[i], 1e-12);
}

TEST(Refine, ThreeBoxesConsistencyFailure) {
  const Scenario s = build_av();
  for (auto cond : {Consistency::Medium, Consistency::Strong}) {
    Tolerances tol;
    tol.condition = cond;
    auto r = refine(s.family("calA"), s.family("calB"), tol);
    ASSERT_TRUE(std::holds_alternative<Incompatible>(r));
    const auto& inc = std::get<Incompatible>(r);
    ASSERT_TRUE(inc.consistency_failure());
    // oracle: D((Phi,A,Psi),(Phi,B,Psi)) = (1/3 * 1/3)^2 = 1/9, real
    EXPECT_NEAR(std::get<ConsistencyFailure>(inc.reason).residual, 1.0 / 9.0, 1e-10);
  }
}

TEST(Refine, CommonRefinementConservesWeight) {
  // F3 and its fine-grained variant are compatible; coarse weights are sums of refined ones.
  const auto& s = bs();
  const Family& f3 = s.family("F3");
  auto r = refine(f3, s.family("F3fine"));
  ASSERT_TRUE(std::holds_alternative<Family>(r));
  const Family& g = std::get<Family>(r);
  auto r2 = refine(s.family("F3fine"), f3);
  ASSERT_TRUE(std::holds_alternative<Family>(r2));
  EXPECT_EQ(std::get<Family>(r2).size(), g.size());
  for (std::size_t i = 0; i < f3.size(); ++i) {
    if (f3.weights()[i] <= 1e-10) continue;
    double sum = 0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      bool inside = true;
      for (std::size_t t = 0; t < 2; ++t)
        inside = inside && is_subprojector(g.histories()[j].events()[t], f3.histories()[i].events()[t]);
      if (inside) sum += g.weights()[j];
    }
    EXPECT_NEAR(sum, f3.weights()[i], 1e-10);
  }
}

TEST(ContainsEvent, Examples) {
  const auto& s = bs();
  const Family& f2 = s.family("F2");
  auto at = [&](const char* l, const char* t) { return EventExpr::atom(t, s.projector(l)); };
  EXPECT_TRUE(contains_event(f2, at("CstarD", "t2") | at("CDstar", "t2")));
  EXPECT_FALSE(contains_event(f2, at("S", "t2")));
  EXPECT_TRUE(contains_event(f2, EventExpr::atom("t1", Projector::identity(s.space()))));
  EXPECT_TRUE(contains_event(f2, at("Cstar", "t2")));  // sum of CstarD and CstarDstar
  EXPECT_TRUE(contains_event(f2, at("Psi0", "t0")));
  EXPECT_FALSE(contains_event(f2, at("c", "t1")));
  EXPECT_FALSE(contains_event(f2, at("c", "t1") & at("Cstar", "t2")));
}

TEST(Certification, ReportsResidualMatrices) {
  const Family& f3 = bs().family("F3");
  const auto& r = f3.certificate();
  ASSERT_EQ(r.re_residual.rows(), static_cast<Eigen::Index>(f3.size()));
  EXPECT_LE(r.abs_residual.maxCoeff(), 1e-12);
  EXPECT_EQ(r.histories.size(), f3.size());
}
