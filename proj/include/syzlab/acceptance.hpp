#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace syzlab {

struct AcceptanceOptions {
  std::uint64_t seed = 7;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;
  nlohmann::ordered_json metrics;
};

struct AcceptanceReport {
  std::uint64_t seed = 0;
  std::vector<CriterionResult> criteria;
  bool all_pass() const;
};

/// Criteria 1–10 at their pinned tolerances. Randomized criteria draw from
/// streams seeded by (seed, id). Wall-clock time enters only as a pass flag.
std::vector<CriterionResult> run_criteria(const AcceptanceOptions& opt);

/// Criteria 1–10, then criterion 11: a second run of 1–10 must serialize to the same bytes.
AcceptanceReport run_acceptance(const AcceptanceOptions& opt);

nlohmann::ordered_json to_json(const CriterionResult& r);
nlohmann::ordered_json to_json(const AcceptanceReport& r);

/// One line per criterion: "PASS  3  title: summary".
std::string report_table(const AcceptanceReport& r);

}  // namespace syzlab
