#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "evt/dataset.hpp"
#include "evt/errors.hpp"
#include "evt/format.hpp"
#include "evt/rng.hpp"

using namespace evt;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("/tmp/evt_test_" + name) {
    std::ofstream out(path, std::ios::binary);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

std::string msg_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("plain numeric csv gets synthetic column names") {
  const auto ds = parse_csv_text("1,2\n3,4\n5,6\n");
  CHECK_FALSE(ds.had_header);
  CHECK(ds.column_names == std::vector<std::string>{"col1", "col2"});
  REQUIRE(ds.matrix.rows() == 3);
  REQUIRE(ds.matrix.cols() == 2);
  CHECK(ds.matrix.at(0, 0) == 1.0);
  CHECK(ds.matrix.at(2, 1) == 6.0);
  CHECK(ds.transform == Transform::None);
}

TEST_CASE("header rows are auto-detected") {
  const auto ds = parse_csv_text("alpha,beta\n1,2\n3,4\n");
  CHECK(ds.had_header);
  CHECK(ds.column_names == std::vector<std::string>{"alpha", "beta"});
  CHECK(ds.matrix.rows() == 2);
  CHECK(ds.matrix.at(1, 1) == 4.0);

  // A single non-numeric field is enough to make the row a header.
  const auto mixed = parse_csv_text("1,beta\n1,2\n3,4\n");
  CHECK(mixed.had_header);
  CHECK(mixed.column_names == std::vector<std::string>{"1", "beta"});
}

TEST_CASE("quoting hides separators and escapes quotes") {
  const auto ds = parse_csv_text("\"a,x\",\"he\"\"llo\"\n1,2\n3,4\n");
  CHECK(ds.column_names == std::vector<std::string>{"a,x", "he\"llo"});
  CHECK_THROWS_AS(parse_csv_text("\"unterminated\n1\n2\n"), data_error);
}

TEST_CASE("crlf line endings and blank lines are tolerated") {
  const auto ds = parse_csv_text("a,b\r\n1,2\r\n\r\n3,4\r\n");
  CHECK(ds.had_header);
  CHECK(ds.matrix.rows() == 2);
  CHECK(ds.matrix.at(1, 0) == 3.0);
}

TEST_CASE("scientific notation and signs parse as data") {
  const auto ds = parse_csv_text("1e3,-2.5E-2\n-4,0.125\n");
  CHECK_FALSE(ds.had_header);
  CHECK(ds.matrix.at(0, 0) == 1000.0);
  CHECK(ds.matrix.at(0, 1) == -0.025);
  CHECK(ds.matrix.at(1, 0) == -4.0);
}

TEST_CASE("malformed tables report the position") {
  const std::string ragged = msg_of([] {
    parse_csv_text("a,b\n1,2\n3\n", Transform::None, "file.csv");
  });
  CHECK(ragged.find("row 3") != std::string::npos);
  CHECK(ragged.find("file.csv") != std::string::npos);

  const std::string junk = msg_of([] {
    parse_csv_text("a,b\n1,2\n3,x\n", Transform::None, "file.csv");
  });
  CHECK(junk.find("row 3") != std::string::npos);
  CHECK(junk.find("column 2") != std::string::npos);

  const std::string inf_cell = msg_of([] {
    parse_csv_text("a\n1\ninf\n", Transform::None, "file.csv");
  });
  CHECK(inf_cell.find("row 3") != std::string::npos);

  CHECK_THROWS_AS(parse_csv_text("a,a\n1,2\n3,4\n"), data_error);
  CHECK_THROWS_AS(parse_csv_text(""), data_error);
  CHECK_THROWS_AS(parse_csv_text("a,b\n1,2\n"), data_error);
  CHECK_THROWS_AS(parse_csv_text("nan\n1\n2\n3\n"), data_error);
}

TEST_CASE("negation flips every cell") {
  const auto ds = parse_csv_text("1,-2\n3,4\n", Transform::Negate);
  CHECK(ds.transform == Transform::Negate);
  CHECK(ds.matrix.at(0, 0) == -1.0);
  CHECK(ds.matrix.at(0, 1) == 2.0);
  CHECK(ds.matrix.at(1, 0) == -3.0);
  CHECK(ds.matrix.at(1, 1) == -4.0);
}

TEST_CASE("written csv reproduces the matrix bit for bit") {
  DataMatrix m(6, 3);
  RandomStream rng(SeedSpec{1234, 0}, StreamPurpose::Generic);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 6; ++i)
      m.at(i, j) = std::exp(12.0 * rng.next_normal());
  // Awkward representatives: shortest-round-trip formatting must carry
  // these exactly.
  m.at(0, 0) = 0.1;
  m.at(1, 0) = 1.0 / 3.0;
  m.at(2, 0) = std::numeric_limits<double>::max();
  m.at(3, 0) = std::numeric_limits<double>::min();
  m.at(4, 0) = std::numeric_limits<double>::denorm_min();
  m.at(5, 0) = 123456789.123456789;
  m.at(0, 1) = -2.5e-300;
  m.at(1, 1) = 3.141592653589793;

  const std::vector<std::string> names{"a", "b", "c"};
  const std::string text = csv_text(m, names);
  const auto ds = parse_csv_text(text);
  CHECK(ds.had_header);
  CHECK(ds.column_names == names);
  REQUIRE(ds.matrix.rows() == 6);
  REQUIRE(ds.matrix.cols() == 3);
  CHECK(ds.matrix == m);

  CHECK_THROWS_AS(csv_text(m, std::vector<std::string>{"a", "b"}),
                  parameter_error);
}

TEST_CASE("disk round trip through write and ingest") {
  DataMatrix m(3, 2);
  m.at(0, 0) = 1.5;
  m.at(1, 0) = -22.25;
  m.at(2, 0) = 1e-9;
  m.at(0, 1) = 7.0;
  m.at(1, 1) = 0.3;
  m.at(2, 1) = 2.0 / 7.0;

  const std::string path = "/tmp/evt_test_roundtrip.csv";
  write_csv(path, m, {"x", "y"});
  const auto ds = ingest_csv(path);
  std::remove(path.c_str());
  CHECK(ds.matrix == m);
  CHECK(ds.path == path);

  CHECK_THROWS_AS(ingest_csv("/nonexistent/data.csv"), data_error);
}

TEST_CASE("null index files accept comments and validate entries") {
  const TempFile good("gamma0_good.txt",
                      "1.0\n# a comment line\n2.5 # trailing note\n\n0.5\n");
  CHECK(load_gamma0(good.path, 3) == std::vector<double>{1.0, 2.5, 0.5});
  CHECK_THROWS_AS(load_gamma0(good.path, 4), data_error);

  const TempFile zero("gamma0_zero.txt", "1.0\n0\n");
  CHECK_THROWS_AS(load_gamma0(zero.path, 2), data_error);

  const TempFile negative("gamma0_neg.txt", "1.0\n-2\n");
  CHECK_THROWS_AS(load_gamma0(negative.path, 2), data_error);

  const TempFile junk("gamma0_junk.txt", "1.0\nabc\n");
  CHECK_THROWS_AS(load_gamma0(junk.path, 2), data_error);

  CHECK_THROWS_AS(load_gamma0("/nonexistent/gamma0.txt", 2), data_error);
}
