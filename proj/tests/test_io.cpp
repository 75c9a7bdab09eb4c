#include "doctest.h"

#include "lasdp/error.hpp"
#include "lasdp/io.hpp"

#include "json.hpp"

#include <filesystem>
#include <sstream>

using namespace lasdp;

TEST_CASE("CSV round trip") {
  MatrixXd x(2, 3);
  x << 1.5, -2, 1e-17, 3, 0.1, 123456789.25;
  std::stringstream s;
  io::write_csv(s, x, {"a", "b"});
  const auto t = io::read_csv(s);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  CHECK(t.x == x);

  const auto path = std::filesystem::temp_directory_path() / "lasdp_io_roundtrip.csv";
  io::write_csv_file(path, x);
  CHECK(io::read_csv_file(path).x == x);
  CHECK(io::read_csv_file(path).header.empty());
  std::filesystem::remove(path);
}

TEST_CASE("CSV layout: rows are samples") {
  std::istringstream s("1,2,3\n4,5,6\n\n");
  const auto t = io::read_csv(s);
  CHECK(t.x.rows() == 3);
  CHECK(t.x.cols() == 2);
  CHECK(t.x(2, 1) == 6.0);
}

TEST_CASE("CSV errors") {
  SUBCASE("bad cell names line and column") {
    std::istringstream s("x,y\n1,2\n3,abc\n");
    try {
      io::read_csv(s);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      const std::string what = e.what();
      CHECK(what.find("line 3") != std::string::npos);
      CHECK(what.find("column 2") != std::string::npos);
    }
  }
  SUBCASE("ragged row") {
    std::istringstream s("1,2\n3\n");
    CHECK_THROWS_AS(io::read_csv(s), ParseError);
  }
  SUBCASE("non-finite value") {
    std::istringstream s("1,inf\n");
    CHECK_THROWS_AS(io::read_csv(s), ValidationError);
  }
  SUBCASE("empty input") {
    std::istringstream s("");
    CHECK_THROWS_AS(io::read_csv(s), ParseError);
    std::istringstream h("a,b\n");
    CHECK_THROWS_AS(io::read_csv(h), ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(io::read_csv_file("/nonexistent/lasdp.csv"), ValidationError);
  }
}

TEST_CASE("labels") {
  std::stringstream s;
  io::write_labels(s, Partition({1, 0, 2}, 3));
  CHECK(s.str() == "2\n1\n3\n");
  CHECK(io::read_labels(s) == std::vector<int>{1, 0, 2});
  std::istringstream with_header("label\n1\n2\n");
  CHECK(io::read_labels(with_header) == std::vector<int>{0, 1});
  std::istringstream zero("0\n1\n");
  CHECK_THROWS_AS(io::read_labels(zero), ValidationError);
  std::istringstream junk("1\nx\n");
  CHECK_THROWS_AS(io::read_labels(junk), ParseError);
}

TEST_CASE("metrics JSON") {
  io::RunMetrics m;
  m.error = std::numeric_limits<double>::quiet_NaN();
  m.delta = 2.5;
  m.d_min = 0.25;
  m.big_m = 4.0;
  m.small_m = 10.0;
  m.iterations = 7;
  m.wall_ms = 12.5;
  m.method = "ilasdp";
  m.seed = 42;
  const auto j = nlohmann::json::parse(io::metrics_json(m));
  for (const char* key : {"error", "delta", "D_min", "M", "m", "iterations", "wall_ms", "method", "seed"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["error"].is_null());
  CHECK(j["D_min"].get<double>() == 0.25);
  CHECK(j["method"] == "ilasdp");
  CHECK(j["seed"].get<std::uint64_t>() == 42);
}
