#pragma once

// Artifact plumbing: atomic file writes, content hashing for run manifests,
// and CSV serialization of curve data. Everything here is deterministic so a
// re-run with the same config and seed produces byte-identical files.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fbmc/analysis.hpp"

namespace fbmc {

// Writes `content` to `path` via a temporary sibling file plus rename, so a
// crashed run never leaves a half-written artifact. Parent directories are
// created on demand.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// SHA-1 of raw bytes, lowercase hex.
std::string sha1_hex(const std::string& data);

// Hash of file content in git blob form ("blob <size>\0<content>"), so the
// manifest hashes can be cross-checked with `git hash-object`.
std::string git_blob_sha1(const std::string& content);

// Renders numbers with enough digits to round-trip a double exactly, without
// locale interference.
std::string format_double(double v);

// One CSV document: a header row plus string cells. Cells containing commas,
// quotes, or newlines are quoted per RFC 4180.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
  std::string to_string() const;
};

// Serializes curve points as `series,x,y` rows (sorted input order preserved).
CsvTable curve_csv(const std::vector<CurvePoint>& points, const std::string& x_name,
                   const std::string& y_name);

}  // namespace fbmc
