#include "penclr/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "penclr/errors.hpp"

namespace penclr {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

double parse_cell(const std::string& cell, std::size_t line_no,
                  const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ValidationError("line " + std::to_string(line_no) + ", column '" +
                          column + "': cannot parse '" + cell + "' as a number");
  }
  if (!std::isfinite(value)) {
    throw ValidationError("line " + std::to_string(line_no) + ", column '" +
                          column + "': non-finite value");
  }
  return value;
}

}  // namespace

MatchedDataset read_dataset_csv(const std::filesystem::path& path,
                                const std::vector<Index>& block_sizes) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("'" + path.string() + "' is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "stratum" || header[1] != "case") {
    throw ValidationError(
        "header must be 'stratum,case,<covariate names...>' (line 1)");
  }
  std::vector<std::string> names(header.begin() + 2, header.end());
  const Index p = static_cast<Index>(names.size());

  Index declared = 0;
  for (Index b : block_sizes) declared += b;
  if (!block_sizes.empty() && declared != p) {
    throw ValidationError("block sizes sum to " + std::to_string(declared) +
                          " but the file has " + std::to_string(p) +
                          " covariate columns");
  }

  std::vector<std::string> labels;
  std::vector<std::uint8_t> is_case;
  std::vector<double> cells;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != static_cast<std::size_t>(p) + 2) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(p + 2) + " fields, found " +
                            std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": empty stratum id");
    }
    if (fields[1] != "0" && fields[1] != "1") {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": case must be 0 or 1, found '" + fields[1] + "'");
    }
    labels.push_back(fields[0]);
    is_case.push_back(fields[1] == "1" ? 1 : 0);
    for (Index j = 0; j < p; ++j) {
      cells.push_back(parse_cell(fields[static_cast<std::size_t>(j) + 2], line_no,
                                 names[static_cast<std::size_t>(j)]));
    }
  }
  if (labels.empty()) {
    throw ValidationError("'" + path.string() + "' has no data rows");
  }

  const Index rows = static_cast<Index>(labels.size());
  Eigen::MatrixXd x(rows, p);
  for (Index r = 0; r < rows; ++r) {
    for (Index j = 0; j < p; ++j) {
      x(r, j) = cells[static_cast<std::size_t>(r * p + j)];
    }
  }

  MatchedDataset data(std::move(x), std::move(labels), std::move(is_case),
                      block_sizes.empty() ? std::vector<Index>{p} : block_sizes,
                      std::move(names));
  const ValidationReport report = validate(data);
  if (!report.ok()) {
    throw ValidationError("'" + path.string() + "': " + report.to_string());
  }
  return data;
}

std::string dataset_to_csv(const MatchedDataset& data) {
  std::ostringstream out;
  out << "stratum,case";
  for (const auto& name : data.column_names()) out << ',' << name;
  out << '\n';
  for (Index r = 0; r < data.n_rows(); ++r) {
    out << data.row_stratum()[static_cast<std::size_t>(r)] << ','
        << (data.row_is_case()[static_cast<std::size_t>(r)] ? '1' : '0');
    for (Index j = 0; j < data.n_covariates(); ++j) {
      out << ',' << format_double(data.covariates()(r, j));
    }
    out << '\n';
  }
  return out.str();
}

void write_dataset_csv(const std::filesystem::path& path,
                       const MatchedDataset& data) {
  AtomicOutputSet outputs;
  outputs.stage(path, dataset_to_csv(data));
  outputs.commit();
}

AtomicOutputSet::~AtomicOutputSet() {
  if (!committed_) discard();
}

void AtomicOutputSet::stage(const std::filesystem::path& final_path,
                            std::string_view content) {
  Entry entry;
  entry.final_path = final_path;
  entry.temp_path = final_path;
  entry.temp_path += ".tmp" + std::to_string(entries_.size());
  {
    std::ofstream out(entry.temp_path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw UsageError("cannot write '" + entry.temp_path.string() + "'");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw UsageError("failed writing '" + entry.temp_path.string() + "'");
    }
  }
  entries_.push_back(std::move(entry));
}

void AtomicOutputSet::commit() {
  for (const Entry& entry : entries_) {
    std::error_code ec;
    std::filesystem::rename(entry.temp_path, entry.final_path, ec);
    if (ec) {
      throw UsageError("cannot move '" + entry.temp_path.string() + "' to '" +
                       entry.final_path.string() + "': " + ec.message());
    }
  }
  committed_ = true;
}

void AtomicOutputSet::discard() {
  for (const Entry& entry : entries_) {
    std::error_code ec;
    std::filesystem::remove(entry.temp_path, ec);
  }
  entries_.clear();
}

}  // namespace penclr
