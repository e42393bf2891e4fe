#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "fbmc/io.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("fbmc_io_test_" + std::to_string(std::rand()) + std::to_string(::getpid()));
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("hash landmarks") {
  CHECK(fbmc::sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
  CHECK(fbmc::sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
  CHECK(fbmc::sha1_hex("The quick brown fox jumps over the lazy dog") ==
        "2fd4e1c67a2d28fced849ee1bb76e7391b93eb12");
  // Long input crossing several 64-byte blocks.
  std::string a(1000, 'a');
  CHECK(fbmc::sha1_hex(a) == "291e9a6c66994949b57ba5e650361e98fc36b1ba");

  // Git blob form, cross-checkable with `git hash-object`.
  CHECK(fbmc::git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(fbmc::git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("double formatting round-trips exactly") {
  for (double v : {0.0, 1.0, -1.0, 0.1, 1.0 / 3.0, 72.6211497, 1e-300, -6.02e23,
                   0.8789062500000000, 3.0518509475997192e-05}) {
    const std::string s = fbmc::format_double(v);
    CHECK(std::stod(s) == v);
    CHECK(s.find(',') == std::string::npos);  // locale-proof
  }
  CHECK(fbmc::format_double(2.0) == "2");
}

TEST_CASE("atomic write and read back") {
  TempDir tmp;
  const fs::path f = tmp.path / "nested" / "dir" / "out.csv";
  const std::string payload = "x,y\n1,2\n";
  fbmc::write_file_atomic(f, payload);
  CHECK(fs::exists(f));
  CHECK(fbmc::read_file(f) == payload);

  // Overwrite in place.
  fbmc::write_file_atomic(f, "z\n");
  CHECK(fbmc::read_file(f) == "z\n");

  // No stray temporary siblings left behind.
  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(f.parent_path())) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);

  CHECK_THROWS_AS(fbmc::read_file(tmp.path / "missing.txt"), std::runtime_error);
}

TEST_CASE("CSV escaping per RFC 4180") {
  fbmc::CsvTable t;
  t.header = {"name", "value"};
  t.add_row({"plain", "1"});
  t.add_row({"with,comma", "2"});
  t.add_row({"with\"quote", "3"});
  t.add_row({"with\nnewline", "4"});
  const std::string s = t.to_string();
  CHECK(s ==
        "name,value\n"
        "plain,1\n"
        "\"with,comma\",2\n"
        "\"with\"\"quote\",3\n"
        "\"with\nnewline\",4\n");
}

TEST_CASE("curve serialization keeps order and precision") {
  std::vector<fbmc::CurvePoint> pts;
  pts.push_back({0.5, 72.6211497, "fs-npr1"});
  pts.push_back({1.0, -3.0, "ofdm"});
  const auto t = fbmc::curve_csv(pts, "offset_pct", "sir_db");
  REQUIRE(t.header.size() == 3);
  CHECK(t.header[0] == "series");
  CHECK(t.header[1] == "offset_pct");
  CHECK(t.header[2] == "sir_db");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "fs-npr1");
  CHECK(std::stod(t.rows[0][2]) == 72.6211497);
  CHECK(t.rows[1][0] == "ofdm");
}
