// chq: certify families, answer queries and sample histories for built-in
// or file-defined scenarios.
//
// Exit codes:
//   0  success (family consistent, query answered with a value)
//   1  usage or internal error
//   2  scenario or expression could not be parsed, resolved or built
//   3  family inconsistent
//   4  query meaningless in the chosen family
//   5  conditional undefined (the data has probability zero)
//   6  family not a sample space (not exhaustive, not orthogonal, or
//      non-commuting projectors within a time slot)

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chq/chq.hpp"

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kInconsistent = 3,
  kMeaningless = 4,
  kUndefined = 5,
  kInvalidFamily = 6,
};

struct Options {
  std::string consistency = "medium";
  double tolerance = chq::Tolerances{}.eps_c;
  std::uint64_t seed = 1;
  std::string format = "text";
};

struct FileParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool machine(const Options& o) { return o.format == "machine"; }

chq::Tolerances tolerances(const Options& o) {
  chq::Tolerances t;
  t.condition = o.consistency == "strong" ? chq::Consistency::Strong : chq::Consistency::Medium;
  t.eps_c = o.tolerance;
  return t;
}

// A path to an existing file is read as a scenario document; anything else
// names a built-in.
chq::ScenarioSpec load_spec(const std::string& where) {
  if (std::filesystem::is_regular_file(where)) {
    std::ifstream in(where);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      return chq::parse_scenario(buf.str());
    } catch (const chq::ParseError& e) {
      throw FileParseError(where + ": " + e.what());
    }
  }
  return chq::builtin_spec(where);
}

int verdict_exit(const chq::CertificationReport& r) {
  using V = chq::CertificationReport::Verdict;
  switch (r.verdict) {
    case V::Consistent: return kOk;
    case V::Inconsistent: return kInconsistent;
    default: return kInvalidFamily;
  }
}

int result_exit(const chq::QueryResult& r) {
  if (r.is_meaningless()) return kMeaningless;
  if (r.is_undefined()) return kUndefined;
  return kOk;
}

// Certification failure of the family a query or sample needs.
int family_failure(const chq::FamilyError& e, const Options& o) {
  if (machine(o)) std::cout << chq::to_json(e.report()).dump(2) << "\n";
  else std::cout << chq::to_text(e.report());
  return verdict_exit(e.report());
}

int cmd_certify(const std::string& where, const std::vector<std::string>& families, const Options& o) {
  const chq::Scenario sc = chq::compile(load_spec(where), tolerances(o));
  std::vector<std::string> names = families.empty() ? sc.family_names() : families;
  int code = kOk;
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& n : names) {
    const auto& r = sc.certification(n);
    if (machine(o)) reports.push_back(chq::to_json(r));
    else std::cout << chq::to_text(r);
    if (code == kOk) code = verdict_exit(r);
  }
  if (machine(o))
    std::cout << nlohmann::json{{"format", chq::kMachineFormat},
                                {"kind", "certify"},
                                {"scenario", sc.name()},
                                {"reports", reports}}
                     .dump(2)
              << "\n";
  return code;
}

int cmd_query(const std::string& where, const std::string& family, const std::string& target,
              const std::optional<std::string>& data, const std::string& named, const Options& o) {
  const chq::Scenario sc = chq::compile(load_spec(where), tolerances(o));
  chq::QueryDef q;
  if (!named.empty()) {
    q = sc.named_query(named);
  } else {
    if (family.empty() || target.empty()) throw CLI::ValidationError("query needs FAMILY and TARGET, or --named");
    q = chq::QueryDef{{}, family, target, data};
  }
  try {
    const chq::QueryResult r = sc.run(q);
    if (machine(o)) std::cout << chq::to_json(r, q.target, q.data).dump(2) << "\n";
    else std::cout << chq::to_text(r, q.target, q.data);
    return result_exit(r);
  } catch (const chq::FamilyError& e) {
    return family_failure(e, o);
  }
}

int cmd_sample(const std::string& where, const std::string& family, std::uint64_t runs, unsigned workers,
               const Options& o) {
  const chq::Scenario sc = chq::compile(load_spec(where), tolerances(o));
  try {
    const chq::SampleReport r = chq::sample(sc.family(family), runs, o.seed, workers);
    if (machine(o)) std::cout << chq::to_json(r).dump(2) << "\n";
    else std::cout << chq::to_text(r);
    return kOk;
  } catch (const chq::FamilyError& e) {
    return family_failure(e, o);
  }
}

int cmd_list(const Options& o) {
  if (machine(o)) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& n : chq::builtin_names()) {
      const auto spec = chq::builtin_spec(n);
      nlohmann::json fams = nlohmann::json::array();
      for (const auto& f : spec.families) fams.push_back(f.name);
      items.push_back({{"name", n}, {"description", spec.description}, {"families", fams}});
    }
    std::cout << nlohmann::json{{"format", chq::kMachineFormat}, {"kind", "builtins"}, {"builtins", items}}.dump(2)
              << "\n";
    return kOk;
  }
  for (const auto& n : chq::builtin_names()) {
    const auto spec = chq::builtin_spec(n);
    std::cout << n << "  " << spec.description << "\n   families:";
    for (const auto& f : spec.families) std::cout << " " << f.name;
    std::cout << "\n";
  }
  return kOk;
}

int cmd_export(const std::string& where, const std::string& out) {
  const chq::ScenarioSpec spec = load_spec(where);
  chq::compile(spec);  // refuse to export something that does not compile
  const std::string text = chq::write_scenario(spec);
  if (out.empty() || out == "-") {
    std::cout << text;
    return kOk;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << text;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consistent-histories inference: certify families, query and sample histories."};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--consistency", o.consistency, "consistency condition")
      ->check(CLI::IsMember({"medium", "strong"}))
      ->capture_default_str();
  app.add_option("--tolerance", o.tolerance, "consistency tolerance on off-diagonal residuals")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", o.seed, "sampler seed")->capture_default_str();
  app.add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"text", "machine"}))
      ->capture_default_str();

  std::string scenario, family, target, out, named;
  std::optional<std::string> data;
  std::vector<std::string> families;
  std::uint64_t runs = 100000;
  unsigned workers = 1;

  auto* certify = app.add_subcommand("certify", "certify families (all when none are named)");
  certify->add_option("scenario", scenario, "built-in name or scenario file")->required();
  certify->add_option("families", families, "family names");

  auto* query = app.add_subcommand("query", "probability of TARGET, optionally given DATA, in FAMILY");
  query->add_option("scenario", scenario, "built-in name or scenario file")->required();
  query->add_option("family", family, "family name");
  query->add_option("target", target, "event expression, e.g. \"c@t1 AND NOT d@t1\"");
  query->add_option("--given", data, "conditioning event expression");
  query->add_option("--named", named, "run a query declared in the scenario");

  auto* samp = app.add_subcommand("sample", "draw elementary histories of FAMILY");
  samp->add_option("scenario", scenario, "built-in name or scenario file")->required();
  samp->add_option("family", family, "family name")->required();
  samp->add_option("-n,--runs", runs, "number of runs")->check(CLI::PositiveNumber)->capture_default_str();
  samp->add_option("--workers", workers, "worker threads (result does not depend on this)")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();

  auto* list = app.add_subcommand("list-builtins", "list built-in scenarios and their families");
  auto* exp = app.add_subcommand("export-scenario", "print a scenario in the text format");
  exp->add_option("scenario", scenario, "built-in name or scenario file")->required();
  exp->add_option("-o,--output", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*certify) return cmd_certify(scenario, families, o);
    if (*query) return cmd_query(scenario, family, target, data, named, o);
    if (*samp) return cmd_sample(scenario, family, runs, workers, o);
    if (*list) return cmd_list(o);
    if (*exp) return cmd_export(scenario, out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const FileParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const chq::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const chq::Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return e.code() == chq::Errc::InvalidArgument ? kUsage : kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
