#pragma once
// Reading results files back and grouping one metric by factor columns.

#include <algorithm>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmcomm/stats.hpp"

namespace swarmcomm {

struct ResultsTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("no column named '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// Results rows never contain quoted fields, so a plain comma split suffices.
inline ResultsTable read_results(std::istream& in) {
  ResultsTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("results file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = detail::split_csv_line(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto row = detail::split_csv_line(line);
    if (row.size() != t.header.size())
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                                  " fields, got " + std::to_string(row.size()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Groups non-empty values of `metric` by the joined values of `factors`,
/// in order of first appearance. Aborted rows are skipped.
inline std::vector<stats::SampleGroup> group_metric(const ResultsTable& t, const std::string& metric,
                                                    const std::vector<std::string>& factors) {
  const std::size_t mcol = t.column(metric);
  std::vector<std::size_t> fcols;
  for (const auto& f : factors) fcols.push_back(t.column(f));
  const auto status = std::find(t.header.begin(), t.header.end(), "status");
  const std::ptrdiff_t scol = status == t.header.end() ? -1 : status - t.header.begin();

  std::vector<stats::SampleGroup> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& row : t.rows) {
    if (scol >= 0 && row[static_cast<std::size_t>(scol)] != "ok") continue;
    if (row[mcol].empty()) continue;
    std::string label;
    for (std::size_t k = 0; k < fcols.size(); ++k) label += (k ? "|" : "") + row[fcols[k]];
    auto [it, fresh] = index.emplace(label, groups.size());
    if (fresh) groups.push_back({label, {}});
    groups[it->second].values.push_back(std::stod(row[mcol]));
  }
  return groups;
}

}  // namespace swarmcomm
