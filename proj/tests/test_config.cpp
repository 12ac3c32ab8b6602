#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "stirap/config.hpp"
#include "stirap/csv.hpp"
#include "stirap/errors.hpp"

using namespace stirap;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string validation_error(const RunConfig& c) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults validate and round trip") {
  const RunConfig d;
  CHECK_NOTHROW(d.validate());
  CHECK(parse_config(to_text(d)) == d);
  CHECK(parse_config("") == d);
}

TEST_CASE("every field survives a round trip") {
  RunConfig c;
  c.pulses.omega0T = 17.25;
  c.pulses.tau_over_T = 0.1 + 0.2;  // not exactly representable as typed
  c.pulses.kappa_p = 1.7;
  c.detunings.delta_p = -0.2;
  c.device.J = 1.0 / 3;
  c.device.n_max = 12;
  c.noise.sigma_x = 0.004;
  c.noise.method = "monte-carlo";
  c.noise.samples = 321;
  c.noise.seed = 18446744073709551615ull;
  c.noise.detuning_quadratic = true;
  c.markov.gamma_tilde_01 = 0.25;
  c.sweep.levels = {0.5, 0.9, 0.99};
  c.sweep.omega0T_list = {1, 3.5};
  c.sweep.slopes = {-2, 0, 1e-3};
  c.sweep.checkpoint = false;
  c.output.directory = "some dir/x";
  c.output.tol = 1e-11;
  const RunConfig back = parse_config(to_text(c));
  CHECK(back == c);
  CHECK(to_text(back) == to_text(c));
  RunConfig w = c;
  w.workers = 8;
  CHECK(w == c);
}

TEST_CASE("parser accepts comments and whitespace") {
  const RunConfig c = parse_config(
      "# leading comment\n\n[pulses]\n  omega0T =  15   # trailing\nkappa_p=2\n[sweep]\nlevels = 0.5, 0.8\n"
      "[noise]\nfluctuate.rabi_linear = true\n");
  CHECK(c.pulses.omega0T == 15);
  CHECK(c.pulses.kappa_p == 2);
  CHECK(c.sweep.levels == std::vector<double>{0.5, 0.8});
  CHECK(c.noise.rabi_linear);
}

TEST_CASE("parser errors name the key and line") {
  const std::string unknown = error_of("[pulses]\nkapa_p = 1\n");
  CHECK(unknown.find("kapa_p") != std::string::npos);
  CHECK(unknown.find("t.cfg:2") != std::string::npos);
  CHECK(error_of("[pulses]\nomega0T = 1\nomega0T = 2\n").find("duplicate") != std::string::npos);
  CHECK(error_of("[pulses]\nomega0T = fast\n").find("omega0T") != std::string::npos);
  CHECK(error_of("[pulses]\nomega0T = 1e999\n").find("omega0T") != std::string::npos);
  CHECK(error_of("[device]\nn_max = 10.5\n").find("n_max") != std::string::npos);
  CHECK(error_of("[noise]\nfluctuate.rabi_linear = yes\n").find("rabi_linear") != std::string::npos);
  CHECK(error_of("[bogus]\n").find("bogus") != std::string::npos);
  CHECK(error_of("omega0T = 1\n").find("outside") != std::string::npos);
  CHECK(error_of("[pulses]\nomega0T\n") != "");
  CHECK(error_of("[pulses\n") != "");
  CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("validation rejects bad ranges") {
  RunConfig c;
  c.sweep.delta_points = 0;
  CHECK(validation_error(c).find("delta") != std::string::npos);
  c = {};
  c.sweep.delta_min = 1;
  c.sweep.delta_max = -1;
  CHECK(validation_error(c) != "");
  c = {};
  c.sweep.delta_points = 1;
  CHECK(validation_error(c) != "");
  c.sweep.delta_min = c.sweep.delta_max = 0.2;
  CHECK(validation_error(c) == "");
  c = {};
  c.pulses.omega0T = 0;
  CHECK(validation_error(c) != "");
  c = {};
  c.noise.method = "sobol";
  CHECK(validation_error(c) != "");
  c = {};
  c.noise.order = 20;
  CHECK(validation_error(c) != "");
  c = {};
  c.markov.gamma_10 = -1;
  CHECK(validation_error(c) != "");
  c = {};
  c.output.precision = 0;
  CHECK(validation_error(c) != "");
  // all problems are reported together
  c.pulses.kappa_s = -1;
  const std::string both = validation_error(c);
  CHECK(both.find("precision") != std::string::npos);
  CHECK(both.find("kappa_s") != std::string::npos);
}

TEST_CASE("csv formatting") {
  CHECK(CsvWriter::format(0.1, 12) == "0.1");
  CHECK(CsvWriter::format(-0.0, 12) == "0");
  CHECK(CsvWriter::format(1.0 / 3, 4) == "0.3333");
  CHECK(CsvWriter::format(std::numeric_limits<double>::quiet_NaN(), 12) == "nan");
  CHECK(CsvWriter::format(-std::numeric_limits<double>::infinity(), 12) == "-inf");
  CHECK(CsvWriter::format(1e-20, 3) == "1e-20");

  const auto path = std::filesystem::temp_directory_path() / "stirap_test_table.csv";
  {
    CsvWriter w(path, {"a", "b", "c"}, 6);
    w.cell(1.5).cell(std::string("x")).cell(7LL);
    w.end_row();
    CHECK_THROWS(w.end_row());
    w.close();
  }
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "a,b,c\n1.5,x,7\n");
  std::filesystem::remove(path);
}
