#include <doctest.h>

#include <fstream>

#include "fixtures.hpp"
#include "tubempc/error.hpp"
#include "tubempc/io/files.hpp"
#include "tubempc/io/serialize.hpp"

using namespace tubempc;
using namespace fixtures;

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 12345.678901234567}) CHECK(std::stod(io::fmt(x)) == x);
}

TEST_CASE("csv quoting and line endings") {
  CHECK(io::csv_field("plain") == "plain");
  CHECK(io::csv_field("a,b") == "\"a,b\"");
  CHECK(io::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  io::CsvWriter w({"a", "b"});
  w.row({"1", "x,y"});
  CHECK(w.str() == "a,b\r\n1,\"x,y\"\r\n");
  CHECK_THROWS(w.row({"only one"}));
}

TEST_CASE("json round trips") {
  const auto s = e1();
  const auto poly = io::polytope_from_json(io::to_json(s->Z_bar));
  CHECK(geometry::hausdorff_distance(poly, s->Z_bar) < 1e-12);
  const auto m = io::model_from_json(io::to_json(s->model));
  CHECK(m.A() == s->model.A());
  CHECK(m.K() == s->model.K());
  const auto c = io::cost_from_json(io::to_json(s->stage));
  CHECK(c.H == s->stage.H);
  CHECK(c.g == s->stage.g);
  CHECK(c.c0 == s->stage.c0);
  CHECK(c.variant == s->stage.variant);
  const Vector v = vec({0.1, -1.0 / 3.0});
  CHECK(io::vector_from_json(io::to_json(v), "v") == v);
  CHECK(io::dump(io::json{{"a", 1}}).back() == '\n');
}

TEST_CASE("atomic writes and scenario validation") {
  const auto dir = std::filesystem::temp_directory_path() / "tubempc_io_test";
  std::filesystem::remove_all(dir);
  io::write_atomic(dir / "sub" / "f.txt", "hello");
  CHECK(io::read_file(dir / "sub" / "f.txt") == "hello");
  io::write_atomic(dir / "sub" / "f.txt", "again");
  CHECK(io::read_file(dir / "sub" / "f.txt") == "again");

  const auto base = std::filesystem::path(TUBEMPC_DATA_DIR);
  auto j = io::json::parse(io::read_file(base / "e1.json"));
  CHECK_NOTHROW(io::parse_scenario(j, base));
  auto bad_x0 = j;
  bad_x0["x0"] = {0.0, 1.0};
  CHECK_THROWS_AS(io::parse_scenario(bad_x0, base), DimensionError);
  auto bad_mode = j;
  bad_mode["mode"] = "sometimes";
  CHECK_THROWS(io::parse_scenario(bad_mode, base));
  auto missing = j;
  missing["model"] = "no_such_file.json";
  CHECK_THROWS_AS(io::parse_scenario(missing, base), ConfigError);
  CHECK_THROWS_AS(io::load_scenario(dir / "nothing.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("simulation log csv") {
  const auto log = closedloop::run(e1_problem(10), scalar(1.5), 3, closedloop::DisturbanceSource{});
  const std::string csv = io::log_csv(log, *e1());
  CHECK(csv.rfind("t,x_0,z0_0,v0_0,u_0,w_0,value,ell,real_cost,status\r\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
