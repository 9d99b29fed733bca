#include "penclr/types.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "penclr/errors.hpp"

namespace penclr {

Index Stratum::case_row() const {
  if (case_rows.size() != 1) {
    throw ValidationError("stratum '" + id + "' does not have exactly one case");
  }
  return case_rows.front();
}

MatchedDataset::MatchedDataset(Eigen::MatrixXd covariates,
                               std::vector<std::string> row_stratum,
                               std::vector<std::uint8_t> row_is_case,
                               std::vector<Index> block_sizes,
                               std::vector<std::string> column_names)
    : covariates_(std::move(covariates)),
      block_sizes_(std::move(block_sizes)),
      column_names_(std::move(column_names)),
      row_stratum_(std::move(row_stratum)),
      row_is_case_(std::move(row_is_case)) {
  const auto rows = static_cast<std::size_t>(covariates_.rows());
  if (row_stratum_.size() != rows || row_is_case_.size() != rows) {
    throw UsageError("row labels must match the covariate row count");
  }
  if (column_names_.empty()) {
    column_names_.reserve(static_cast<std::size_t>(covariates_.cols()));
    for (Index j = 0; j < covariates_.cols(); ++j) {
      column_names_.push_back("x" + std::to_string(j + 1));
    }
  } else if (column_names_.size() != static_cast<std::size_t>(covariates_.cols())) {
    throw UsageError("column names must match the covariate column count");
  }

  // group rows into strata by label, in order of first appearance
  std::unordered_map<std::string, std::size_t> stratum_index;
  stratum_index.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    auto [it, inserted] = stratum_index.try_emplace(row_stratum_[r], strata_.size());
    if (inserted) strata_.push_back(Stratum{row_stratum_[r], {}, {}});
    Stratum& s = strata_[it->second];
    if (row_is_case_[r]) {
      s.case_rows.push_back(static_cast<Index>(r));
    } else {
      s.control_rows.push_back(static_cast<Index>(r));
    }
  }
}

std::vector<int> MatchedDataset::block_of_column() const {
  std::vector<int> out(static_cast<std::size_t>(n_covariates()), -1);
  Index col = 0;
  for (std::size_t b = 0; b < block_sizes_.size(); ++b) {
    for (Index k = 0; k < block_sizes_[b] && col < n_covariates(); ++k, ++col) {
      out[static_cast<std::size_t>(col)] = static_cast<int>(b);
    }
  }
  return out;
}

MatchedDataset MatchedDataset::subset(const std::vector<int>& stratum_indices) const {
  Index rows = 0;
  for (int s : stratum_indices) {
    if (s < 0 || s >= n_strata()) {
      throw UsageError("stratum index out of range in subset()");
    }
    rows += strata_[static_cast<std::size_t>(s)].size();
  }
  Eigen::MatrixXd x(rows, n_covariates());
  std::vector<std::string> labels;
  std::vector<std::uint8_t> cases;
  labels.reserve(static_cast<std::size_t>(rows));
  cases.reserve(static_cast<std::size_t>(rows));
  Index r = 0;
  auto copy_row = [&](Index src, const std::string& label, std::uint8_t is_case) {
    x.row(r) = covariates_.row(src);
    labels.push_back(label);
    cases.push_back(is_case);
    ++r;
  };
  for (int s : stratum_indices) {
    const Stratum& st = strata_[static_cast<std::size_t>(s)];
    for (Index row : st.case_rows) copy_row(row, st.id, 1);
    for (Index row : st.control_rows) copy_row(row, st.id, 0);
  }
  return MatchedDataset(std::move(x), std::move(labels), std::move(cases),
                        block_sizes_, column_names_);
}

MatchedDataset MatchedDataset::single_block(int block) const {
  if (block < 0 || block >= static_cast<int>(block_sizes_.size())) {
    throw UsageError("block index out of range");
  }
  Index start = 0;
  for (int b = 0; b < block; ++b) start += block_sizes_[static_cast<std::size_t>(b)];
  const Index width = block_sizes_[static_cast<std::size_t>(block)];
  Eigen::MatrixXd x = covariates_.middleCols(start, width);
  std::vector<std::string> names(column_names_.begin() + start,
                                 column_names_.begin() + start + width);
  return MatchedDataset(std::move(x), row_stratum_, row_is_case_, {width},
                        std::move(names));
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i];
  }
  return out.str();
}

ValidationReport validate(const MatchedDataset& data) {
  ValidationReport report;
  for (const Stratum& s : data.strata()) {
    if (s.case_rows.size() != 1) {
      report.violations.push_back("stratum '" + s.id + "' has " +
                                  std::to_string(s.case_rows.size()) +
                                  " cases (expected exactly 1)");
    }
    if (s.control_rows.empty()) {
      report.violations.push_back("stratum '" + s.id + "' has no controls");
    }
  }
  if (!data.covariates().allFinite()) {
    for (Index r = 0; r < data.n_rows(); ++r) {
      for (Index c = 0; c < data.n_covariates(); ++c) {
        if (!std::isfinite(data.covariates()(r, c))) {
          report.violations.push_back(
              "non-finite covariate at row " + std::to_string(r) + ", column '" +
              data.column_names()[static_cast<std::size_t>(c)] + "'");
        }
      }
    }
  }
  if (data.block_sizes().empty()) {
    report.violations.push_back("no blocks declared");
  }
  Index total = 0;
  for (std::size_t b = 0; b < data.block_sizes().size(); ++b) {
    const Index size = data.block_sizes()[b];
    if (size <= 0) {
      report.violations.push_back("block " + std::to_string(b + 1) +
                                  " has non-positive size");
    }
    total += size;
  }
  if (total != data.n_covariates()) {
    report.violations.push_back(
        "block sizes sum to " + std::to_string(total) + " but the data has " +
        std::to_string(data.n_covariates()) + " covariate columns");
  }
  return report;
}

}  // namespace penclr
