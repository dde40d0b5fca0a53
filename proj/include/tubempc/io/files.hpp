#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tubempc/analysis/sweep.hpp"

namespace tubempc::io {

/// Shortest round-trip decimal form of a double ("%.17g").
std::string fmt(double x);

/// RFC-4180 quoting when the field contains a comma, quote or line break.
std::string csv_field(const std::string& s);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  const std::string& str() const { return out_; }

 private:
  std::size_t width_;
  std::string out_;
};

/// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// t, x_*, z0_*, v0_*, u_*, w_*, value, ell, real_cost, status
std::string log_csv(const closedloop::ClosedLoopLog& log, const ocp::TubeSetup& setup);
/// N, T, seed, lhs, rhs_core, gap, status
std::string sweep_csv(const std::vector<analysis::SweepRow>& rows);

}  // namespace tubempc::io
