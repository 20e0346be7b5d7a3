// Builds the beamsplitter scenario, prints one family's certificate, asks a
// few questions and samples the detector family.
#include <iostream>

#include "chq/chq.hpp"

int main() {
  const chq::Scenario s = chq::build_beamsplitter();

  std::cout << chq::to_text(s.certification("F3"));

  const std::optional<std::string> data = "Psi0@t0 AND Cstar@t2";
  std::cout << chq::to_text(s.query("F3", "c@t1", data), "c@t1", data);
  std::cout << chq::to_text(s.query("F2", "s@t1", data), "s@t1", data);

  // S lives in F1, not in the detector family F2.
  std::cout << chq::to_text(s.query("F2", "S@t2"), "S@t2");

  auto r = chq::refine(s.family("F1"), s.family("F2"));
  if (auto* inc = std::get_if<chq::Incompatible>(&r)) std::cout << "F1 vs F2: " << inc->explain() << "\n";

  std::cout << chq::to_text(chq::sample(s.family("F2"), 10000, 1));
  return 0;
}
