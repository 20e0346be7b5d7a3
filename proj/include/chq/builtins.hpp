// Built-in scenarios: the two-detector beamsplitter, its confirmation
// variants, the three-box system, the three-channel beamsplitter and a
// spin-half particle.
#pragma once

#include <string>
#include <vector>

#include "chq/scenario.hpp"

namespace chq {

namespace builtin_detail {

using proj::basis;
using proj::ket;
using proj::ref;

inline Term term(Amplitude a, std::vector<std::string> ket) { return Term{a, std::move(ket)}; }
inline Term term(std::vector<std::string> ket) { return Term{Amplitude::rational(1), std::move(ket)}; }
inline Amplitude half_root(std::int64_t sign = 1) { return Amplitude::inv_sqrt(2, sign); }

inline VecRef kets(std::vector<Term> t) { return VecRef::inline_terms(std::move(t)); }

inline SlotDef gen(std::string time, std::vector<std::string> ps) {
  return SlotDef{std::move(time), SlotDef::Mode::Generate, std::move(ps)};
}
inline SlotDef part(std::string time, std::vector<std::string> ps) {
  return SlotDef{std::move(time), SlotDef::Mode::Partition, std::move(ps)};
}
inline FamilyDef family(std::string name, std::string initial, std::vector<SlotDef> slots) {
  return FamilyDef{std::move(name), std::move(initial), std::move(slots), {}, false};
}
inline QueryDef q(std::string name, std::string fam, std::string target, std::optional<std::string> data = {}) {
  return QueryDef{std::move(name), std::move(fam), std::move(target), std::move(data)};
}

// Photon at c (d) is absorbed by detector C (D), which flips from ready to triggered.
inline StepDef detection(const std::string& from, const std::string& to,
                         const std::vector<std::pair<std::string, std::string>>& path_to_detector) {
  StepDef st{from, to, {"photon"}, {}};
  for (const auto& [path, det] : path_to_detector) st.on.push_back(det);
  const std::size_t k = path_to_detector.size();
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::string> in{path_to_detector[i].first}, out{"absorbed"};
    for (std::size_t j = 0; j < k; ++j) {
      in.push_back("ready");
      out.push_back(i == j ? "triggered" : "ready");
    }
    st.map.emplace_back(kets({term(in)}), kets({term(out)}));
  }
  return st;
}

}  // namespace builtin_detail

/// Photon enters a 50/50 beamsplitter at t0 and reaches detector C or D by t2.
inline ScenarioSpec beamsplitter_spec() {
  using namespace builtin_detail;
  ScenarioSpec s;
  s.name = "beamsplitter";
  s.description = "photon through a beamsplitter into detectors C and D";
  s.factors = {Factor{"photon", {"a", "c", "d", "absorbed"}}, Factor{"C", {"ready", "triggered"}},
               Factor{"D", {"ready", "triggered"}}};
  s.times = {"t0", "t1", "t2"};
  s.states = {
      StateDef{"s", {"photon"}, {term(half_root(), {"c"}), term(half_root(), {"d"})}},
      StateDef{"Psi0", {}, {term({"a", "ready", "ready"})}},
      StateDef{"S", {"C", "D"}, {term(half_root(), {"triggered", "ready"}), term(half_root(), {"ready", "triggered"})}},
  };
  s.steps = {
      StepDef{"t0", "t1", {"photon"}, {{kets({term({"a"})}), VecRef::named("s")}}},
      detection("t1", "t2", {{"c", "C"}, {"d", "D"}}),
  };
  s.projectors = {
      {"Psi0", ket("Psi0")},
      {"a", basis("photon", {"a"})},
      {"c", basis("photon", {"c"})},
      {"d", basis("photon", {"d"})},
      {"s", ket("s")},
      {"C", basis("C", {"ready"})},
      {"Cstar", basis("C", {"triggered"})},
      {"D", basis("D", {"ready"})},
      {"Dstar", basis("D", {"triggered"})},
      {"CD", ref("C") * ref("D")},
      {"sCD", ref("s") * ref("CD")},
      {"cCD", ref("c") * ref("CD")},
      {"dCD", ref("d") * ref("CD")},
      {"S", ket("S")},
      {"CstarD", ref("Cstar") * ref("D")},
      {"CDstar", ref("C") * ref("Dstar")},
      {"CstarDstar", ref("Cstar") * ref("Dstar")},
  };
  s.families = {
      family("F1", "Psi0", {gen("t1", {"sCD"}), gen("t2", {"S"})}),
      family("F2", "Psi0", {gen("t1", {"s", "CD"}), part("t2", {"CstarD", "CDstar", "CstarDstar", "CD"})}),
      family("F3", "Psi0", {gen("t1", {"c", "d"}), gen("t2", {"Cstar", "Dstar"})}),
      family("F3fine", "Psi0", {gen("t1", {"cCD", "dCD"}), gen("t2", {"CstarD", "CDstar"})}),
  };
  s.queries = {
      q("S_at_t2", "F1", "S@t2"),
      q("Cstar_at_t2", "F2", "Cstar@t2"),
      q("Dstar_at_t2", "F2", "Dstar@t2"),
      q("either_detector", "F2", "Cstar@t2 OR Dstar@t2"),
      q("both_detectors", "F2", "Cstar@t2 AND Dstar@t2"),
      q("c_at_t1", "F3", "c@t1"),
      q("d_at_t1", "F3", "d@t1"),
      q("c_given_Cstar", "F3", "c@t1", "Psi0@t0 AND Cstar@t2"),
      q("d_given_Cstar", "F3", "d@t1", "Psi0@t0 AND Cstar@t2"),
      q("s_given_Cstar", "F2", "s@t1", "Psi0@t0 AND Cstar@t2"),
      q("S_in_F2", "F2", "S@t2"),
  };
  return s;
}

/// Beamsplitter with the detectors placed after the box is opened. Same
/// dynamics as beamsplitter; the boxed-photon families look only at t1.
inline ScenarioSpec confirm_b_spec() {
  using namespace builtin_detail;
  ScenarioSpec s = beamsplitter_spec();
  s.name = "confirm-b";
  s.description = "box opened at t1, photon detected by C or D at t2";
  s.families = {
      family("E1", "Psi0", {gen("t1", {"c", "d"})}),
      family("E2", "Psi0", {gen("t1", {"s"})}),
      family("E1det", "Psi0", {gen("t1", {"c", "d"}), gen("t2", {"Cstar", "Dstar"})}),
  };
  s.queries = {
      q("c_given_Cstar", "E1det", "c@t1", "Psi0@t0 AND Cstar@t2"),
      q("c_at_t1", "E1", "c@t1"),
      q("s_at_t1", "E2", "s@t1"),
  };
  return s;
}

/// Paths c and d recombine at a second beamsplitter into e and f, watched
/// by detectors E and F. Phases send s entirely into f.
inline ScenarioSpec confirm_c_spec() {
  using namespace builtin_detail;
  ScenarioSpec s;
  s.name = "confirm-c";
  s.description = "paths c and d recombined at a second beamsplitter, detectors E and F";
  s.factors = {Factor{"photon", {"a", "c", "d", "e", "f", "absorbed"}}, Factor{"E", {"ready", "triggered"}},
               Factor{"F", {"ready", "triggered"}}};
  s.times = {"t0", "t1", "t2"};
  s.states = {
      StateDef{"s", {"photon"}, {term(half_root(), {"c"}), term(half_root(), {"d"})}},
      StateDef{"Psi0", {}, {term({"a", "ready", "ready"})}},
  };
  s.steps = {
      StepDef{"t0", "t1", {"photon"}, {{kets({term({"a"})}), VecRef::named("s")}}},
      StepDef{"t1",
              "t2",
              {"photon"},
              {{kets({term({"c"})}), kets({term(half_root(), {"e"}), term(half_root(), {"f"})})},
               {kets({term({"d"})}), kets({term(half_root(-1), {"e"}), term(half_root(), {"f"})})}}},
      detection("t1", "t2", {{"e", "E"}, {"f", "F"}}),
  };
  s.projectors = {
      {"Psi0", ket("Psi0")},
      {"a", basis("photon", {"a"})},
      {"c", basis("photon", {"c"})},
      {"d", basis("photon", {"d"})},
      {"s", ket("s")},
      {"E", basis("E", {"ready"})},
      {"Estar", basis("E", {"triggered"})},
      {"F", basis("F", {"ready"})},
      {"Fstar", basis("F", {"triggered"})},
  };
  s.families = {
      family("E1", "Psi0", {gen("t1", {"c", "d"})}),
      family("E2", "Psi0", {gen("t1", {"s"})}),
      family("E2det", "Psi0", {gen("t1", {"s"}), gen("t2", {"Estar", "Fstar"})}),
  };
  s.queries = {
      q("F_fires", "E2det", "Fstar@t2"),
      q("E_fires", "E2det", "Estar@t2"),
      q("s_given_Fstar", "E2det", "s@t1", "Psi0@t0 AND Fstar@t2"),
  };
  return s;
}

/// Three boxes with trivial dynamics, prepared in Phi and found in Psi.
inline ScenarioSpec av_spec() {
  using namespace builtin_detail;
  const Amplitude r3 = Amplitude::inv_sqrt(3), m3 = Amplitude::inv_sqrt(3, -1);
  ScenarioSpec s;
  s.name = "av";
  s.description = "three boxes, preselected in Phi and postselected in Psi";
  s.factors = {Factor{"particle", {"A", "B", "C"}}};
  s.times = {"t0", "t1", "t2"};
  s.states = {
      StateDef{"Phi", {}, {term(r3, {"A"}), term(r3, {"B"}), term(r3, {"C"})}},
      StateDef{"Psi", {}, {term(r3, {"A"}), term(r3, {"B"}), term(m3, {"C"})}},
  };
  s.projectors = {
      {"A", basis("particle", {"A"})}, {"B", basis("particle", {"B"})}, {"C", basis("particle", {"C"})},
      {"Phi", ket("Phi")},             {"Psi", ket("Psi")},
  };
  s.families = {
      family("calA", "Phi", {gen("t1", {"A"}), gen("t2", {"Psi"})}),
      family("calB", "Phi", {gen("t1", {"B"}), gen("t2", {"Psi"})}),
      family("single_ABC", "Phi", {part("t1", {"A", "B", "C"})}),
  };
  s.queries = {
      q("A_given_Psi", "calA", "A@t1", "Phi@t0 AND Psi@t2"),
      q("B_given_Psi", "calB", "B@t1", "Phi@t0 AND Psi@t2"),
  };
  return s;
}

/// Photon split three ways into detectors C, D and E.
inline ScenarioSpec three_channel_spec() {
  using namespace builtin_detail;
  const Amplitude r3 = Amplitude::inv_sqrt(3);
  ScenarioSpec s;
  s.name = "three-channel";
  s.description = "photon split three ways into detectors C, D and E";
  s.factors = {Factor{"photon", {"a", "c", "d", "e", "absorbed"}}, Factor{"C", {"ready", "triggered"}},
               Factor{"D", {"ready", "triggered"}}, Factor{"E", {"ready", "triggered"}}};
  s.times = {"t0", "t1", "t2"};
  s.states = {
      StateDef{"Psi0", {}, {term({"a", "ready", "ready", "ready"})}},
      StateDef{"S", {"C", "D"}, {term(half_root(), {"triggered", "ready"}), term(half_root(), {"ready", "triggered"})}},
  };
  s.steps = {
      StepDef{"t0", "t1", {"photon"}, {{kets({term({"a"})}), kets({term(r3, {"c"}), term(r3, {"d"}), term(r3, {"e"})})}}},
      detection("t1", "t2", {{"c", "C"}, {"d", "D"}, {"e", "E"}}),
  };
  s.projectors = {
      {"Psi0", ket("Psi0")},
      {"C", basis("C", {"ready"})},
      {"Cstar", basis("C", {"triggered"})},
      {"D", basis("D", {"ready"})},
      {"Dstar", basis("D", {"triggered"})},
      {"E", basis("E", {"ready"})},
      {"Estar", basis("E", {"triggered"})},
      {"CstarDE", ref("Cstar") * ref("D") * ref("E")},
      {"CDstarE", ref("C") * ref("Dstar") * ref("E")},
      {"CDEstar", ref("C") * ref("D") * ref("Estar")},
      {"S", ket("S")},
      {"SE", ref("S") * ref("E")},
  };
  s.families = {
      family("D1", "Psi0", {gen("t2", {"Cstar", "Dstar", "Estar"})}),
      family("D2", "Psi0", {gen("t2", {"SE", "CDEstar"})}),
  };
  s.queries = {
      q("CstarDE", "D1", "CstarDE@t2"),
      q("CDstarE", "D1", "CDstarE@t2"),
      q("CDEstar", "D1", "CDEstar@t2"),
      q("SE", "D2", "SE@t2"),
      q("CDEstar_in_D2", "D2", "CDEstar@t2"),
  };
  return s;
}

/// Spin-half particle with Z and X single-time families.
inline ScenarioSpec spin_half_spec() {
  using namespace builtin_detail;
  ScenarioSpec s;
  s.name = "spin-half";
  s.description = "spin-half particle, Sz and Sx families";
  s.factors = {Factor{"spin", {"up", "down"}}};
  s.times = {"t0", "t1"};
  s.states = {
      StateDef{"Xp", {}, {term(half_root(), {"up"}), term(half_root(), {"down"})}},
      StateDef{"Xm", {}, {term(half_root(), {"up"}), term(half_root(-1), {"down"})}},
  };
  s.projectors = {
      {"Zplus", basis("spin", {"up"})},
      {"Zminus", basis("spin", {"down"})},
      {"Xplus", ket("Xp")},
      {"Xminus", ket("Xm")},
  };
  s.families = {
      family("Z", "I", {part("t1", {"Zplus", "Zminus"})}),
      family("X", "I", {part("t1", {"Xplus", "Xminus"})}),
  };
  s.queries = {
      q("Zplus", "Z", "Zplus@t1"),
      q("Xplus", "X", "Xplus@t1"),
  };
  return s;
}

inline std::vector<std::string> builtin_names() {
  return {"beamsplitter", "confirm-b", "confirm-c", "av", "three-channel", "spin-half"};
}

inline bool is_builtin(std::string_view name) {
  for (const auto& n : builtin_names())
    if (n == name) return true;
  return false;
}

/// Throws Errc::UnknownLabel for an unknown name.
inline ScenarioSpec builtin_spec(std::string_view name) {
  if (name == "beamsplitter") return beamsplitter_spec();
  if (name == "confirm-b") return confirm_b_spec();
  if (name == "confirm-c") return confirm_c_spec();
  if (name == "av") return av_spec();
  if (name == "three-channel") return three_channel_spec();
  if (name == "spin-half") return spin_half_spec();
  throw Error(Errc::UnknownLabel, "no built-in scenario named '" + std::string(name) + "'");
}

inline Scenario build_beamsplitter(const Tolerances& tol = {}) { return compile(beamsplitter_spec(), tol); }
inline Scenario build_confirmation(char variant, const Tolerances& tol = {}) {
  if (variant == 'b') return compile(confirm_b_spec(), tol);
  if (variant == 'c') return compile(confirm_c_spec(), tol);
  throw Error(Errc::InvalidArgument, "confirmation variant must be 'b' or 'c'");
}
inline Scenario build_av(const Tolerances& tol = {}) { return compile(av_spec(), tol); }
inline Scenario build_three_channel(const Tolerances& tol = {}) { return compile(three_channel_spec(), tol); }
inline Scenario build_spin_half(const Tolerances& tol = {}) { return compile(spin_half_spec(), tol); }

}  // namespace chq
