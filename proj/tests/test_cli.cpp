#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path workdir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stirap_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Run cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string("\"") + STIRAP_CLI + "\" " + args + " >\"" + (dir / "stdout").string() +
                          "\" 2>\"" + (dir / "stderr").string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout");
  r.err = slurp(dir / "stderr");
  return r;
}

fs::path write_cfg(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

const char* small_diagram =
    "[pulses]\nomega0T = 10\n[sweep]\ndelta_min = -0.5\ndelta_max = 0.5\ndelta_points = 9\n"
    "delta_p_min = -0.5\ndelta_p_max = 0.5\ndelta_p_points = 7\nlevels = 0.5, 0.9\ncheckpoint_every = 5\n";

}  // namespace

TEST_CASE("usage errors exit 2") {
  const fs::path d = workdir("usage");
  CHECK(cli("", d).code == 2);
  CHECK(cli("teleport", d).code == 2);
  CHECK(cli("simulate --workers 0", d).code == 2);
  CHECK(cli("--help", d).code == 0);
  const Run typo = cli("simulate --config " + write_cfg(d, "bad.cfg", "[pulses]\nkapa_p = 2\n").string(), d);
  CHECK(typo.code == 2);
  CHECK(typo.err.find("kapa_p") != std::string::npos);
  const Run zero = cli("diagram --out " + (d / "o").string() + " --config " +
                           write_cfg(d, "zero.cfg", "[sweep]\ndelta_points = 0\n").string(),
                       d);
  CHECK(zero.code == 2);
  CHECK(zero.err.find("delta_points") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("numeric and domain failures exit 3") {
  const fs::path d = workdir("domain");
  // no pump coupling at the sweet spot, so the drive cannot be calibrated
  const fs::path cfg = write_cfg(d, "sweet.cfg", "[device]\nq_g = 0.5\n[noise]\nsigma_x = 0.004\n");
  const Run r = cli("simulate --out " + (d / "o").string() + " --config " + cfg.string(), d);
  CHECK(r.code == 3);
  CHECK(r.err.find("simulate") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("simulate writes the trajectory and the resolved config") {
  const fs::path d = workdir("simulate");
  const Run r = cli("simulate --out " + (d / "o").string(), d);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("efficiency") != std::string::npos);
  CHECK(fs::exists(d / "o" / "trajectory.csv"));
  CHECK(fs::exists(d / "o" / "adiabatic.csv"));
  const std::string traj = slurp(d / "o" / "trajectory.csv");
  CHECK(traj.rfind("t,P0,P1,P2\n", 0) == 0);
  // the echoed config reproduces the run
  const Run again = cli("simulate --out " + (d / "p").string() + " --config " + (d / "o" / "config.cfg").string(), d);
  REQUIRE(again.code == 0);
  CHECK(slurp(d / "p" / "trajectory.csv") == traj);
  fs::remove_all(d);
}

TEST_CASE("diagram output does not depend on workers or interruption") {
  const fs::path d = workdir("diagram");
  const fs::path cfg = write_cfg(d, "small.cfg", small_diagram);
  REQUIRE(cli("diagram --workers 1 --out " + (d / "one").string() + " --config " + cfg.string(), d).code == 0);
  REQUIRE(cli("diagram --workers 3 --out " + (d / "three").string() + " --config " + cfg.string(), d).code == 0);
  for (const char* f : {"efficiency_map.csv", "contours.csv"}) {
    CHECK(slurp(d / "one" / f) == slurp(d / "three" / f));
    CHECK(!slurp(d / "one" / f).empty());
  }

  const fs::path stop = write_cfg(d, "stop.cfg", std::string(small_diagram) + "stop_after = 20\n");
  const Run partial = cli("diagram --out " + (d / "resumed").string() + " --config " + stop.string(), d);
  REQUIRE(partial.code == 0);
  CHECK(fs::exists(d / "resumed" / "efficiency_map.ckpt"));
  CHECK_FALSE(fs::exists(d / "resumed" / "efficiency_map.csv"));
  REQUIRE(cli("diagram --workers 2 --out " + (d / "resumed").string() + " --config " + cfg.string(), d).code == 0);
  CHECK_FALSE(fs::exists(d / "resumed" / "efficiency_map.ckpt"));
  for (const char* f : {"efficiency_map.csv", "contours.csv"}) CHECK(slurp(d / "resumed" / f) == slurp(d / "one" / f));
  fs::remove_all(d);
}

TEST_CASE("monte carlo runs are reproducible from the seed") {
  const fs::path d = workdir("seed");
  const fs::path cfg = write_cfg(d, "mc.cfg",
                                 "[pulses]\nomega0T = 15\n[noise]\nsigma_x = 0.004\nmethod = monte-carlo\n"
                                 "samples = 40\n[output]\ngrid_points = 50\n");
  const std::string base = " --config " + cfg.string();
  const Run a = cli("simulate --seed 5 --out " + (d / "a").string() + base, d);
  const Run b = cli("simulate --seed 5 --workers 2 --out " + (d / "b").string() + base, d);
  const Run c = cli("simulate --seed 6 --out " + (d / "c").string() + base, d);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(slurp(d / "a" / "trajectory.csv") == slurp(d / "b" / "trajectory.csv"));
  CHECK(a.out != c.out);
  CHECK(a.out.find("standard_error") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("cpb, fom, dephasing and linewidth commands") {
  const fs::path d = workdir("misc");
  const fs::path cfg = write_cfg(d, "misc.cfg",
                                 "[device]\nq_g = 0.5\n[noise]\nsigma_x = 0.004\n[sweep]\nJ_min = 1\nJ_max = 1\n"
                                 "J_points = 1\nq_g_min = 0.46\nq_g_max = 0.5\nq_g_points = 3\nomega0T_list = 2, 30\n"
                                 "slopes = 0, 1.5\n");
  const std::string base = " --config " + cfg.string() + " --out " + (d / "o").string();
  REQUIRE(cli("cpb" + base, d).code == 0);
  const std::string spectrum = slurp(d / "o" / "spectrum.csv");
  std::istringstream lines(spectrum);
  std::string header, row;
  std::getline(lines, header);
  CHECK(header == "q_g,J,E1,E2,n01,n02,n12,A1,A2,B1,B2");
  std::string last;
  while (std::getline(lines, row)) last = row;
  std::istringstream cells(last);
  std::string q, J, e1, e2, n01, n02;
  std::getline(cells, q, ',');
  std::getline(cells, J, ',');
  std::getline(cells, e1, ',');
  std::getline(cells, e2, ',');
  std::getline(cells, n01, ',');
  std::getline(cells, n02, ',');
  CHECK(std::stod(q) == 0.5);
  CHECK(std::abs(std::stod(n02)) <= 1e-10);

  REQUIRE(cli("fom" + base, d).code == 0);
  CHECK(fs::exists(d / "o" / "merit_map.csv"));

  REQUIRE(cli("dephasing" + base, d).code == 0);
  const std::string scan = slurp(d / "o" / "dephasing_scan.csv");
  CHECK(scan.find("markov") != std::string::npos);
  CHECK(scan.find("spa") != std::string::npos);

  const Run lw = cli("linewidth --level 0.7" + base, d);
  REQUIRE(lw.code == 0);
  const std::string width = slurp(d / "o" / "linewidth.csv");
  CHECK(width.find(",a,") != std::string::npos);
  CHECK(width.find(",c,") != std::string::npos);
  CHECK(width.find(",b,") == std::string::npos);
  CHECK(slurp(d / "o" / "config.cfg").find("level = 0.7") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("packaged configs") {
  const fs::path d = workdir("packaged");
  const fs::path configs = STIRAP_CONFIGS;
  const Run ideal = cli("simulate --config " + (configs / "ideal.cfg").string() + " --out " + (d / "i").string(), d);
  REQUIRE(ideal.code == 0);
  const auto at = ideal.out.find("efficiency = ");
  REQUIRE(at != std::string::npos);
  CHECK(std::stod(ideal.out.substr(at + 13)) >= 0.999);
  CHECK(cli("simulate --config " + (configs / "nonideal.cfg").string() + " --out " + (d / "n").string(), d).code == 0);

  REQUIRE(cli("diagram --config " + (configs / "diagram.cfg").string() + " --out " + (d / "m").string(), d).code == 0);
  std::istringstream contours(slurp(d / "m" / "contours.csv"));
  std::string row;
  std::getline(contours, row);
  int closed90 = 0, open90 = 0;
  std::string last_id;
  while (std::getline(contours, row)) {
    std::istringstream cells(row);
    std::string level, id, index, x, y, closed;
    std::getline(cells, level, ',');
    std::getline(cells, id, ',');
    std::getline(cells, index, ',');
    std::getline(cells, x, ',');
    std::getline(cells, y, ',');
    std::getline(cells, closed, ',');
    if (std::stod(level) != 0.9 || index != "0") continue;
    (closed == "1" ? closed90 : open90)++;
  }
  CHECK(closed90 == 1);
  CHECK(open90 == 0);
  fs::remove_all(d);
}
