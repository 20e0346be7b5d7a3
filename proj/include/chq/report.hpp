// Text and JSON renderings of certification reports, query results and
// sample reports. Machine documents carry "format": "chq/1".
#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "chq/frameworks.hpp"
#include "chq/inference.hpp"
#include "chq/sampler.hpp"

namespace chq {

inline constexpr const char* kMachineFormat = "chq/1";

namespace report_detail {
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
}  // namespace report_detail

inline nlohmann::json to_json(const CertificationReport& r) {
  nlohmann::json hs = nlohmann::json::array();
  for (std::size_t i = 0; i < r.histories.size(); ++i) {
    nlohmann::json h{{"history", r.histories[i]}};
    if (i < r.weights.size()) {
      h["weight"] = r.weights[i];
      h["zero_weight"] = static_cast<bool>(r.zero_weight[i]);
    }
    hs.push_back(std::move(h));
  }
  nlohmann::json j{{"format", kMachineFormat},
                   {"kind", "certification"},
                   {"family", r.family},
                   {"condition", std::string(to_string(r.condition))},
                   {"eps_c", r.eps_c},
                   {"verdict", std::string(to_string(r.verdict))},
                   {"detail", r.detail},
                   {"histories", hs},
                   {"max_re_residual", r.max_re_residual},
                   {"max_abs_residual", r.max_abs_residual}};
  j["offending_pair"] = r.offending_pair ? nlohmann::json{r.offending_pair->first, r.offending_pair->second}
                                         : nlohmann::json(nullptr);
  j["offending_time"] = r.offending_time ? nlohmann::json(*r.offending_time) : nlohmann::json(nullptr);
  return j;
}

inline std::string to_text(const CertificationReport& r) {
  using report_detail::num;
  std::ostringstream os;
  os << "family " << r.family << ": " << to_string(r.verdict) << " (" << to_string(r.condition)
     << " condition, eps_c " << num(r.eps_c) << ")\n";
  if (!r.detail.empty()) os << "  " << r.detail << "\n";
  for (std::size_t i = 0; i < r.histories.size(); ++i) {
    os << "  " << r.histories[i];
    if (i < r.weights.size()) os << "  weight " << num(r.weights[i]) << (r.zero_weight[i] ? " (zero)" : "");
    os << "\n";
  }
  if (!r.weights.empty())
    os << "  max |Re D| " << num(r.max_re_residual) << ", max |D| " << num(r.max_abs_residual) << "\n";
  return os.str();
}

inline nlohmann::json to_json(const QueryResult& r, const std::string& target,
                              const std::optional<std::string>& data = std::nullopt) {
  nlohmann::json j{{"format", kMachineFormat},
                   {"kind", std::string(to_string(r.kind))},
                   {"framework", r.framework},
                   {"target", target}};
  j["data"] = data ? nlohmann::json(*data) : nlohmann::json(nullptr);
  j["value"] = r.is_value() ? nlohmann::json(r.value) : nlohmann::json(nullptr);
  j["reason"] = r.reason ? nlohmann::json(std::string(to_string(*r.reason))) : nlohmann::json(nullptr);
  j["explanation"] = r.explanation;
  return j;
}

inline std::string to_text(const QueryResult& r, const std::string& target,
                           const std::optional<std::string>& data = std::nullopt) {
  std::string q = "Pr(" + target + (data ? " | " + *data : std::string{}) + ")";
  switch (r.kind) {
    case QueryResult::Kind::Value: return q + " = " + report_detail::num(r.value) + "  [" + r.framework + "]\n";
    case QueryResult::Kind::Meaningless:
      return q + ": Meaningless (" + std::string(to_string(*r.reason)) + ") " + r.explanation + "\n";
    case QueryResult::Kind::UndefinedConditional: return q + ": UndefinedConditional " + r.explanation + "\n";
  }
  return {};
}

inline nlohmann::json to_json(const SampleReport& r) {
  nlohmann::json hs = nlohmann::json::array();
  for (std::size_t i = 0; i < r.histories.size(); ++i)
    hs.push_back({{"history", r.histories[i]},
                  {"count", r.counts[i]},
                  {"frequency", r.frequencies[i]},
                  {"probability", r.probabilities[i]}});
  return nlohmann::json{{"format", kMachineFormat}, {"kind", "sample"},   {"family", r.family},
                        {"n_runs", r.n_runs},      {"seed", r.seed},      {"prng", r.prng},
                        {"histories", hs},         {"max_abs_dev", r.max_abs_dev}};
}

inline std::string to_text(const SampleReport& r) {
  using report_detail::num;
  std::ostringstream os;
  os << "family " << r.family << ": " << r.n_runs << " runs, seed " << r.seed << "\n";
  for (std::size_t i = 0; i < r.histories.size(); ++i)
    os << "  " << r.histories[i] << "  count " << r.counts[i] << "  freq " << num(r.frequencies[i]) << "  prob "
       << num(r.probabilities[i]) << "\n";
  os << "  max |freq - prob| " << num(r.max_abs_dev) << "\n";
  return os.str();
}

}  // namespace chq
