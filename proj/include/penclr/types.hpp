#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace penclr {

inline constexpr const char* kVersion = "0.1.0";

using Index = Eigen::Index;

// One matched set: a case plus its k >= 1 matched controls. case_rows is
// plural so that malformed inputs (zero or several cases under one label)
// survive construction and can be reported by validate().
struct Stratum {
  std::string id;
  std::vector<Index> case_rows;
  std::vector<Index> control_rows;

  // the unique case row; throws ValidationError unless exactly one case
  Index case_row() const;

  Index size() const {
    return static_cast<Index>(case_rows.size() + control_rows.size());
  }
};

// Matched case-control data with a block-partitioned covariate matrix.
// Rows are subjects. Strata group rows by matching label, in order of first
// appearance, so every row belongs to exactly one stratum by construction.
class MatchedDataset {
 public:
  MatchedDataset() = default;

  // row_stratum and row_is_case run parallel to the matrix rows.
  MatchedDataset(Eigen::MatrixXd covariates,
                 std::vector<std::string> row_stratum,
                 std::vector<std::uint8_t> row_is_case,
                 std::vector<Index> block_sizes,
                 std::vector<std::string> column_names = {});

  const Eigen::MatrixXd& covariates() const { return covariates_; }
  const std::vector<Stratum>& strata() const { return strata_; }
  const std::vector<Index>& block_sizes() const { return block_sizes_; }
  const std::vector<std::string>& column_names() const { return column_names_; }
  const std::vector<std::string>& row_stratum() const { return row_stratum_; }
  const std::vector<std::uint8_t>& row_is_case() const { return row_is_case_; }

  Index n_strata() const { return static_cast<Index>(strata_.size()); }
  Index n_rows() const { return covariates_.rows(); }
  Index n_covariates() const { return covariates_.cols(); }
  Index n_blocks() const { return static_cast<Index>(block_sizes_.size()); }

  // column index -> block index, from the declared contiguous block sizes
  std::vector<int> block_of_column() const;

  // New dataset holding copies of the given strata (by index into strata()).
  MatchedDataset subset(const std::vector<int>& stratum_indices) const;

  // New dataset with only the columns of one block (0-based), as its sole block.
  MatchedDataset single_block(int block) const;

 private:
  Eigen::MatrixXd covariates_;
  std::vector<Index> block_sizes_;
  std::vector<std::string> column_names_;
  std::vector<std::string> row_stratum_;
  std::vector<std::uint8_t> row_is_case_;
  std::vector<Stratum> strata_;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Structural checks: exactly one case and at least one control per stratum,
// all covariate entries finite, block sizes positive and summing to the
// column count. Returns a report instead of throwing.
ValidationReport validate(const MatchedDataset& data);

}  // namespace penclr
