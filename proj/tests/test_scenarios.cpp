#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "chq/builtins.hpp"
#include "chq/scenario_text.hpp"

using namespace chq;

namespace {

struct Golden {
  const char* scenario;
  const char* query;
  double value;
};

// Named queries and their expected values.
const std::vector<Golden>& goldens() {
  static const std::vector<Golden> g{
      {"beamsplitter", "S_at_t2", 1.0},
      {"beamsplitter", "Cstar_at_t2", 0.5},
      {"beamsplitter", "Dstar_at_t2", 0.5},
      {"beamsplitter", "either_detector", 1.0},
      {"beamsplitter", "both_detectors", 0.0},
      {"beamsplitter", "c_at_t1", 0.5},
      {"beamsplitter", "d_at_t1", 0.5},
      {"beamsplitter", "c_given_Cstar", 1.0},
      {"beamsplitter", "d_given_Cstar", 0.0},
      {"beamsplitter", "s_given_Cstar", 1.0},
      {"confirm-b", "c_given_Cstar", 1.0},
      {"confirm-b", "c_at_t1", 0.5},
      {"confirm-b", "s_at_t1", 1.0},
      {"confirm-c", "F_fires", 1.0},
      {"confirm-c", "E_fires", 0.0},
      {"confirm-c", "s_given_Fstar", 1.0},
      {"av", "A_given_Psi", 1.0},
      {"av", "B_given_Psi", 1.0},
      {"three-channel", "CstarDE", 1.0 / 3},
      {"three-channel", "CDstarE", 1.0 / 3},
      {"three-channel", "CDEstar", 1.0 / 3},
      {"three-channel", "SE", 2.0 / 3},
      {"three-channel", "CDEstar_in_D2", 1.0 / 3},
      {"spin-half", "Zplus", 0.5},
      {"spin-half", "Xplus", 0.5},
  };
  return g;
}

Tolerances with(Consistency c) {
  Tolerances t;
  t.condition = c;
  return t;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

}  // namespace

class BuiltinScenario : public ::testing::TestWithParam<std::string> {};

TEST_P(BuiltinScenario, EveryFamilyCertifiesUnderBothConditions) {
  for (auto c : {Consistency::Medium, Consistency::Strong}) {
    const Scenario s = compile(builtin_spec(GetParam()), with(c));
    ASSERT_FALSE(s.family_names().empty());
    for (const auto& f : s.family_names()) {
      EXPECT_TRUE(s.certification(f).ok()) << f << " under " << to_string(c);
      // weights add up to the trace of the initial event
      EXPECT_NEAR(s.family(f).total_weight(), static_cast<double>(s.family(f).initial().rank()), 1e-9) << f;
    }
  }
}

TEST_P(BuiltinScenario, TextRoundTripGivesIdenticalAnswers) {
  const ScenarioSpec spec = builtin_spec(GetParam());
  const std::string text = write_scenario(spec);
  const ScenarioSpec back = parse_scenario(text);
  EXPECT_EQ(back, spec);
  EXPECT_EQ(write_scenario(back), text);
  const Scenario a = compile(spec), b = compile(back);
  for (const auto& q : spec.queries) {
    const QueryResult ra = a.run(q), rb = b.run(q);
    EXPECT_EQ(ra.kind, rb.kind) << q.name;
    EXPECT_EQ(ra.value, rb.value) << q.name;
  }
}

TEST_P(BuiltinScenario, ShippedFileMatchesBuiltin) {
  const std::string path = std::string(CHQ_SCENARIO_DIR) + "/" + GetParam() + ".chq";
  const ScenarioSpec from_file = parse_scenario(read_file(path));
  EXPECT_EQ(from_file, builtin_spec(GetParam())) << path;
}

INSTANTIATE_TEST_SUITE_P(All, BuiltinScenario, ::testing::ValuesIn(builtin_names()),
                         [](const auto& info) {
                           std::string n = info.param;
                           for (auto& ch : n)
                             if (ch == '-') ch = '_';
                           return n;
                         });

TEST(Goldens, ValuesUnderBothConditions) {
  for (auto c : {Consistency::Medium, Consistency::Strong}) {
    for (const auto& g : goldens()) {
      const Scenario s = compile(builtin_spec(g.scenario), with(c));
      const QueryResult r = s.run(s.named_query(g.query));
      ASSERT_TRUE(r.is_value()) << g.scenario << "/" << g.query << ": " << r.explanation;
      EXPECT_NEAR(r.value, g.value, 1e-9) << g.scenario << "/" << g.query;
    }
  }
}

TEST(Goldens, SuperpositionIsMeaninglessInDetectorFamily) {
  const Scenario s = build_beamsplitter();
  const QueryResult r = s.run(s.named_query("S_in_F2"));
  ASSERT_TRUE(r.is_meaningless());
  EXPECT_EQ(r.reason, MeaninglessReason::IncompatibleEvent);
}

TEST(Goldens, UnknownNamesThrow) {
  const Scenario s = build_beamsplitter();
  EXPECT_THROW(s.named_query("nope"), Error);
  EXPECT_THROW(s.family("nope"), Error);
  EXPECT_THROW(builtin_spec("nope"), Error);
  EXPECT_THROW(build_confirmation('x'), Error);
}

TEST(Beamsplitter, CoarseAndFinePathFamiliesAgree) {
  const Scenario s = build_beamsplitter();
  const char* queries[][2] = {{"c@t1", nullptr},
                              {"d@t1", nullptr},
                              {"Cstar@t2", nullptr},
                              {"c@t1", "Psi0@t0 AND Cstar@t2"},
                              {"d@t1", "Psi0@t0 AND Cstar@t2"},
                              {"Cstar@t2", "c@t1"},
                              {"Dstar@t2", "c@t1"}};
  const std::pair<const char*, const char*> renames[] = {{"c@t1", "cCD@t1"}, {"d@t1", "dCD@t1"},
                                                         {"Cstar@t2", "CstarD@t2"}, {"Dstar@t2", "CDstar@t2"}};
  auto fine = [&](std::string e) {
    for (const auto& [from, to] : renames) {
      auto pos = e.find(from);
      if (pos != std::string::npos) e.replace(pos, std::string(from).size(), to);
    }
    return e;
  };
  for (const auto& q : queries) {
    std::optional<std::string> data = q[1] ? std::optional<std::string>(q[1]) : std::nullopt;
    std::optional<std::string> fine_data = data ? std::optional<std::string>(fine(*data)) : std::nullopt;
    const QueryResult a = s.query("F3", q[0], data);
    const QueryResult b = s.query("F3fine", fine(q[0]), fine_data);
    ASSERT_TRUE(a.is_value() && b.is_value()) << q[0];
    EXPECT_NEAR(a.value, b.value, 1e-12) << q[0];
  }
}

TEST(Beamsplitter, PairwiseIncompatible) {
  const Scenario s = build_beamsplitter();
  for (auto [f, g] : {std::pair{"F1", "F2"}, std::pair{"F1", "F3"}, std::pair{"F2", "F3"}}) {
    auto r = refine(s.family(f), s.family(g));
    ASSERT_TRUE(std::holds_alternative<Incompatible>(r)) << f << "/" << g;
    EXPECT_TRUE(std::get<Incompatible>(r).non_commuting());
  }
}

TEST(SpinHalf, ZAndXAreIncompatible) {
  const Scenario s = build_spin_half();
  auto r = refine(s.family("Z"), s.family("X"));
  ASSERT_TRUE(std::holds_alternative<Incompatible>(r));
  EXPECT_TRUE(std::get<Incompatible>(r).non_commuting());
  EXPECT_TRUE(s.query("Z", "Xplus@t1").is_meaningless());
}

TEST(ThreeChannel, QuasiclassicalIsNotAProjector) {
  const Scenario s = build_three_channel();
  for (const char* fam : {"D1", "D2"}) {
    const QueryResult r = s.query(fam, "CDEstar@t2", "Psi0@t0 AND quasiclassical@t2");
    ASSERT_TRUE(r.is_meaningless()) << fam;
    EXPECT_EQ(r.reason, MeaninglessReason::NotAProjector);
  }
}

TEST(ThreeChannel, SuperpositionFamilyIsIncompatibleWithDetectorFamily) {
  const Scenario s = build_three_channel();
  auto r = refine(s.family("D1"), s.family("D2"));
  EXPECT_TRUE(std::holds_alternative<Incompatible>(r));
  // the shared event keeps its probability in both families
  EXPECT_NEAR(s.query("D1", "CDEstar@t2").value, s.query("D2", "CDEstar@t2").value, 1e-12);
}

TEST(ConfirmC, PathFamilyAndDetectorFamilyAreIncompatible) {
  const Scenario s = build_confirmation('c');
  auto r = refine(s.family("E1"), s.family("E2det"));
  ASSERT_TRUE(std::holds_alternative<Incompatible>(r));
  EXPECT_NEAR(s.query("E1", "c@t1").value, 0.5, 1e-12);
}

TEST(MixedDetectors, FileFamiliesAreInconsistent) {
  const ScenarioSpec spec = parse_scenario(read_file(std::string(CHQ_SCENARIO_DIR) + "/mixed_detectors.chq"));
  for (auto c : {Consistency::Medium, Consistency::Strong}) {
    const Scenario s = compile(spec, with(c));
    for (const char* f : {"mixed", "mixed_explicit"}) {
      const auto& rep = s.certification(f);
      EXPECT_EQ(rep.verdict, CertificationReport::Verdict::Inconsistent) << f;
      EXPECT_NEAR(rep.max_re_residual, 0.25, 1e-10);
      EXPECT_THROW(s.family(f), FamilyError);
    }
  }
}

TEST(Compile, RejectsBadSpecs) {
  ScenarioSpec s = spin_half_spec();
  s.families.push_back(s.families.front());
  EXPECT_THROW(compile(s), Error);  // duplicate family

  s = spin_half_spec();
  s.projectors.push_back({"Zplus", proj::basis("spin", {"down"})});
  EXPECT_THROW(compile(s), Error);  // duplicate projector

  s = spin_half_spec();
  s.states[0].terms.pop_back();
  s.states[0].terms[0].coef = Amplitude::rational(1, 2);
  EXPECT_THROW(compile(s), Error);  // not normalized

  s = spin_half_spec();
  s.queries.push_back({"bad", "Y", "Zplus@t1", std::nullopt});
  EXPECT_THROW(compile(s), Error);  // unknown family

  s = beamsplitter_spec();
  s.steps.push_back(StepDef{"t0", "t2", {"photon"}, {}});
  EXPECT_THROW(compile(s), Error);  // non-consecutive times
}
