#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "penclr/types.hpp"

namespace penclr {

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

// Dataset CSV: header "stratum,case,<covariate names...>", one subject per
// row, case in {0,1}. Cells must be finite decimal numbers; no quoting.
// Parse problems and structural violations raise ValidationError with the
// offending line number or stratum id. An empty block_sizes means one block.
MatchedDataset read_dataset_csv(const std::filesystem::path& path,
                                const std::vector<Index>& block_sizes);

void write_dataset_csv(const std::filesystem::path& path,
                       const MatchedDataset& data);

// serialized dataset in the same CSV layout (used by the writer and tests)
std::string dataset_to_csv(const MatchedDataset& data);

// Collects outputs in staging files next to their final paths and promotes
// them all by rename on commit. Destruction without commit removes the
// staging files, so an interrupted run never leaves a partial result at a
// final path.
class AtomicOutputSet {
 public:
  AtomicOutputSet() = default;
  AtomicOutputSet(const AtomicOutputSet&) = delete;
  AtomicOutputSet& operator=(const AtomicOutputSet&) = delete;
  ~AtomicOutputSet();

  void stage(const std::filesystem::path& final_path, std::string_view content);
  void commit();
  void discard();

 private:
  struct Entry {
    std::filesystem::path final_path;
    std::filesystem::path temp_path;
  };
  std::vector<Entry> entries_;
  bool committed_ = false;
};

}  // namespace penclr
