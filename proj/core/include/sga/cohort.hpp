// sga/cohort.hpp
//
// Side-by-side grammar scores of two recognition set-ups against a human
// reference, with per-student and total assessment error.

#ifndef SGA_COHORT_HPP_
#define SGA_COHORT_HPP_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sga {

struct CohortRow {
  std::string student;
  int baseline_score = 0;
  int clm_score = 0;
  int gold_score = 0;
};

struct CohortLine {
  CohortRow row;
  int baseline_eps = 0;
  int clm_eps = 0;
};

struct CohortTable {
  std::vector<CohortLine> lines;
  int baseline_total = 0;
  int clm_total = 0;

  // student,baseline_score,baseline_eps,clm_score,clm_eps,gold
  std::string to_csv() const;
  // "#1  14 (1)  15 (0)  15" rows and a "Total (20) (3) -" footer.
  std::string to_text(const std::string &baseline_label = "baseline",
                      const std::string &clm_label = "asr-clm") const;
  nlohmann::json to_json() const;
};

CohortTable cohort_report(const std::vector<CohortRow> &rows);

}  // namespace sga

#endif  // SGA_COHORT_HPP_
