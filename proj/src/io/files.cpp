#include "tubempc/io/files.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tubempc/error.hpp"

namespace tubempc::io {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) { row(header); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw Error("csv row width does not match the header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ += ',';
    out_ += csv_field(fields[i]);
  }
  out_ += "\r\n";
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f) throw Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string log_csv(const closedloop::ClosedLoopLog& log, const ocp::TubeSetup& setup) {
  const int n = setup.n(), m = setup.m();
  std::vector<std::string> header{"t"};
  auto cols = [&](const char* name, int k) {
    for (int i = 0; i < k; ++i) header.push_back(std::string(name) + "_" + std::to_string(i));
  };
  cols("x", n);
  cols("z0", n);
  cols("v0", m);
  cols("u", m);
  cols("w", n);
  for (const char* h : {"value", "ell", "real_cost", "status"}) header.emplace_back(h);
  CsvWriter csv(header);
  for (const auto& r : log.steps) {
    std::vector<std::string> f{std::to_string(r.t)};
    auto put = [&](const geometry::Vector& v, int k) {
      for (int i = 0; i < k; ++i) f.push_back(v.size() == k ? fmt(v(i)) : "");
    };
    put(r.x, n);
    put(r.z0, n);
    put(r.v0, m);
    put(r.u, m);
    put(r.w, n);
    const bool ok = r.z0.size() == n;
    f.push_back(ok ? fmt(r.value) : "");
    f.push_back(ok ? fmt(setup.ell(r.z0, r.v0)) : "");
    f.push_back(ok ? fmt(setup.stage.L_pi(setup.model, r.x, r.v0) - setup.ell.offset) : "");
    f.emplace_back(convex::to_string(r.status));
    csv.row(f);
  }
  return csv.str();
}

std::string sweep_csv(const std::vector<analysis::SweepRow>& rows) {
  CsvWriter csv({"N", "T", "seed", "lhs", "rhs_core", "gap", "status"});
  for (const auto& r : rows)
    csv.row({std::to_string(r.N), std::to_string(r.T), std::to_string(r.seed), fmt(r.lhs), fmt(r.rhs_core), fmt(r.gap),
             r.status});
  return csv.str();
}

}  // namespace tubempc::io
