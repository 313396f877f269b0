// sga/cohort.cpp

#include "sga/cohort.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace sga {

CohortTable cohort_report(const std::vector<CohortRow> &rows) {
  CohortTable t;
  for (const auto &r : rows) {
    CohortLine line{r, std::abs(r.baseline_score - r.gold_score),
                    std::abs(r.clm_score - r.gold_score)};
    t.baseline_total += line.baseline_eps;
    t.clm_total += line.clm_eps;
    t.lines.push_back(std::move(line));
  }
  return t;
}

std::string CohortTable::to_csv() const {
  std::ostringstream os;
  os << "student,baseline_score,baseline_eps,clm_score,clm_eps,gold\n";
  for (const auto &l : lines) {
    os << l.row.student << ',' << l.row.baseline_score << ',' << l.baseline_eps
       << ',' << l.row.clm_score << ',' << l.clm_eps << ',' << l.row.gold_score
       << '\n';
  }
  return os.str();
}

std::string CohortTable::to_text(const std::string &baseline_label,
                                 const std::string &clm_label) const {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Student", baseline_label + " S (eps)", clm_label + " S (eps)", "gold S"});
  for (const auto &l : lines) {
    cells.push_back({l.row.student,
                     std::to_string(l.row.baseline_score) + " (" + std::to_string(l.baseline_eps) + ")",
                     std::to_string(l.row.clm_score) + " (" + std::to_string(l.clm_eps) + ")",
                     std::to_string(l.row.gold_score)});
  }
  cells.push_back({"Total", "(" + std::to_string(baseline_total) + ")",
                   "(" + std::to_string(clm_total) + ")", "-"});

  std::vector<std::size_t> width(4, 0);
  for (const auto &row : cells)
    for (std::size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], row[c].size());

  std::ostringstream os;
  auto rule = [&] {
    for (std::size_t c = 0; c < 4; ++c) os << '+' << std::string(width[c] + 2, '-');
    os << "+\n";
  };
  rule();
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (r + 1 == cells.size()) rule();
    for (std::size_t c = 0; c < 4; ++c) {
      os << "| " << cells[r][c] << std::string(width[c] - cells[r][c].size() + 1, ' ');
    }
    os << "|\n";
    if (r == 0) rule();
  }
  rule();
  return os.str();
}

nlohmann::json CohortTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &l : lines) {
    rows.push_back({{"student", l.row.student},
                    {"baseline_score", l.row.baseline_score},
                    {"baseline_eps", l.baseline_eps},
                    {"clm_score", l.row.clm_score},
                    {"clm_eps", l.clm_eps},
                    {"gold", l.row.gold_score}});
  }
  return {{"rows", rows},
          {"totals", {{"baseline_eps", baseline_total}, {"clm_eps", clm_total}}}};
}

}  // namespace sga
