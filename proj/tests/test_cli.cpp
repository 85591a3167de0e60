#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "syzlab/cycles.hpp"
#include "syzlab/legendre.hpp"
#include "syzlab/ma_solver.hpp"
#include "syzlab/semiflat.hpp"
#include "syzlab/sl2actions.hpp"

using namespace syzlab;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    std::string tmpl = (fs::temp_directory_path() / "syzlab_cli_XXXXXX").string();
    dir = mkdtemp(tmpl.data());
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }
  std::string read(const std::string& name) const {
    std::ifstream in(dir / name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
};

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("ma-solve writes the library solution verbatim") {
  Scratch s;
  s.write("cfg.json", R"({"h": "1/16", "c": 1})");
  auto r = run({"ma-solve", "--config", s.path("cfg.json"), "--out", s.path("out")});
  REQUIRE(r.code == 0);

  SolveReport rep;
  auto phi = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 16, {}, &rep);
  std::ostringstream csv;
  write_csv(phi, csv);
  CHECK(s.read("out/phi.csv") == csv.str());
  auto report = json::parse(s.read("out/ma_report.json"));
  CHECK(report["residual"].get<double>() == rep.residual);
  CHECK(report["iterations"].get<int>() == rep.iterations);
  CHECK(r.out.find("residual") == 0);
  CHECK(s.read("out/convergence.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("legendre and mirror match direct library calls") {
  Scratch s;
  auto phi = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 16);
  std::ostringstream csv;
  write_csv(phi, csv);
  s.write("phi.csv", csv.str());
  s.write("cfg.json", json{{"input", s.path("phi.csv")}}.dump());

  REQUIRE(run({"legendre", "--config", s.path("cfg.json"), "--out", s.path("leg")}).code == 0);
  auto psi = legendre_transform(phi);
  std::ostringstream psi_csv;
  write_csv(psi, psi_csv, "psi");
  CHECK(s.read("leg/psi.csv") == psi_csv.str());
  auto res = duality_residuals(phi, psi);
  auto report = json::parse(s.read("leg/legendre_report.json"));
  CHECK(report["duality"]["det_product"].get<double>() == res.det_product);
  CHECK(report["duality"]["matched"].get<std::size_t>() == res.matched);

  REQUIRE(run({"mirror", "--config", s.path("cfg.json"), "--out", s.path("mir")}).code == 0);
  auto rt = mirror_roundtrip(phi);
  auto mr = json::parse(s.read("mir/mirror_report.json"));
  CHECK(mr["involution"].get<double>() == rt.involution);
  CHECK(mr["structure"].get<double>() == rt.structure);
  auto records = json::parse(s.read("mir/structures.json"));
  REQUIRE(records.size() == 2);
  std::size_t centre = 0;
  for (auto i : phi.interior_nodes())
    if (phi.coords(i).norm() < phi.coords(centre).norm()) centre = i;
  CHECK(records[0].dump() == json::parse(structure_record(build_M(phi, centre)).dump()).dump());
  CHECK(records[1]["side"] == "W");
}

TEST_CASE("gv forward on the unit table gives 1/d^3") {
  Scratch s;
  auto r = run({"gv", "forward", "--out", s.path("gv")});
  REQUIRE(r.code == 0);
  auto rows = json::parse(s.read("gv/gw.json"));
  REQUIRE(rows.size() == 20);
  for (int d = 1; d <= 20; ++d) {
    CHECK(rows[d - 1]["d"] == d);
    CHECK(rows[d - 1]["r"] == 0);
    CHECK(rows[d - 1]["N"] == (d == 1 ? std::string("1") : "1/" + std::to_string(d * d * d)));
  }
  BpsTable unit(1, 0);
  unit.set(1, 0, 1);
  CHECK(s.read("gv/gw.json") == cli::gw_json(gw_from_bps(unit, 20, 0)).dump(2) + "\n");
}

TEST_CASE("gv invert and check") {
  Scratch s;
  BpsTable b(3, 1);
  b.set(1, 0, 3);
  b.set(2, 1, -2);
  b.set(3, 0, 7);
  auto N = gw_from_bps(b, 3, 1);
  s.write("gw.json", json{{"table", json::parse(cli::gw_json(N).dump())}}.dump());
  REQUIRE(run({"gv", "invert", "--config", s.path("gw.json"), "--out", s.path("inv")}).code == 0);
  CHECK(cli::bps_from_json(json::parse(s.read("inv/bps.json")), 3, 1) == b);
  REQUIRE(run({"gv", "check", "--config", s.path("gw.json"), "--out", s.path("ok")}).code == 0);
  CHECK(json::parse(s.read("ok/integrality.json"))["ok"] == true);

  s.write("bad.json", R"({"table": [{"d": 1, "r": 0, "N": "1"}, {"d": 2, "r": 0, "N": "1/7"}]})");
  auto r = run({"gv", "check", "--config", s.path("bad.json"), "--out", s.path("bad")});
  CHECK(r.code == 4);
  auto e = json::parse(r.err);
  CHECK(e["error"] == "integrality");
  CHECK(json::parse(s.read("bad/integrality.json"))["violations"][0]["d"] == 2);
}

TEST_CASE("yukawa, tfamily and sl2 adapters") {
  Scratch s;
  REQUIRE(run({"yukawa", "--out", s.path("y")}).code == 0);
  auto y = json::parse(s.read("y/yukawa.json"));
  auto c = yukawa_A(5, {2875, 609250, 317206375}, 3);
  REQUIRE(y["coefficients"].size() == c.size());
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(y["coefficients"][k] == to_string(c[k]));

  s.write("t.json", R"({"H": [[2, "1/2"], ["1/2", 1]], "t_list": [1, "1/2", "1/4"]})");
  REQUIRE(run({"tfamily", "--config", s.path("t.json"), "--out", s.path("t")}).code == 0);
  Matrix<Rational> H(2, 2);
  H(0, 0) = 2;
  H(0, 1) = H(1, 0) = Rational(1, 2);
  H(1, 1) = 1;
  auto rep = rescaled_limit_report(H, {Rational(1), Rational(1, 2), Rational(1, 4)});
  auto t = json::parse(s.read("t/tfamily.json"));
  CHECK(t["volume_constant"] == rep.volume_constant);
  REQUIRE(t["rows"].size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(t["rows"][k]["det_g"] == to_string(rep.rows[k].det_g));
    CHECK(t["rows"][k]["fiber_norm"].get<double>() == rep.rows[k].fiber_norm);
  }

  s.write("s.json", R"({"n": 2})");
  REQUIRE(run({"sl2", "--config", s.path("s.json"), "--out", s.path("s")}).code == 0);
  auto r = json::parse(s.read("s/sl2_report.json"));
  CHECK(r["ok"] == true);
  CHECK(r["hard_lefschetz"] == true);
  std::string csv = s.read("s/weights.csv");
  CHECK(csv.rfind("degree,h,h_prime,multiplicity\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 5);
}

TEST_CASE("cycle check matches the library in both precisions") {
  Scratch s;
  s.write("b.json", R"({"kind": "B", "n": 2, "m": 2, "omega": ["(2,0) dx1^dy1", "(1,0) dx2^dy2"],
                        "beta": "(1/2,0) dx1^dy2", "F": ["(0,1) dx1^dy1", "(0,-1/4) dx2^dy2"]})");
  CycleSpec<Rational> c;
  c.m = 2;
  c.omega = form_from_text<Rational>(Layout::phase_space(2), "(2,0) dx1^dy1\n(1,0) dx2^dy2");
  c.beta = form_from_text<Rational>(Layout::phase_space(2), "(1/2,0) dx1^dy2");
  c.F = form_from_text<Rational>(Layout::phase_space(2), "(0,1) dx1^dy1\n(0,-1/4) dx2^dy2");
  c.theta = solve_phase(c);
  for (std::string precision : {"exact", "double"}) {
    REQUIRE(run({"cycle", "check", "--spec", s.path("b.json"), "--precision", precision, "--out", s.path(precision)}).code == 0);
    auto r = json::parse(s.read(precision + "/cycle_report.json"));
    CHECK(r["theta"].get<double>() == c.theta);
    CHECK(r["dhym_residual"].get<double>() <= 1e-12);
    CHECK(r["theta_solved"] == true);
  }
  CHECK(json::parse(s.read("exact/cycle_report.json"))["dhym_residual"].get<double>() == dhym_residual(c));

  s.write("a.json", R"({"kind": "A", "n": 1, "m": 1, "omega": "(1,0) dx1^dy1", "subtorus": [[0, 1]]})");
  REQUIRE(run({"cycle", "check", "--spec", s.path("a.json"), "--out", s.path("a")}).code == 0);
  auto a = json::parse(s.read("a/cycle_report.json"));
  CHECK(a["lagrangian"] == 0.0);
  CHECK(a["special"].get<double>() == 1.0);
}

TEST_CASE("errors are JSON with the documented exit codes") {
  Scratch s;
  s.write("neg.json", R"({"c": -1})");
  auto r = run({"ma-solve", "--config", s.path("neg.json"), "--out", s.path("o")});
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["error"] == "validation");

  CHECK(run({"ma-solve", "--precision", "exact", "--out", s.path("o")}).code == 2);
  CHECK(run({"ma-solve", "--precision", "quad"}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"verify-all", "--out", s.path("o")}).code == 2);
  CHECK(run({"ma-solve", "--config", s.path("missing.json")}).code == 2);
  s.write("broken.json", "{");
  CHECK(run({"yukawa", "--config", s.path("broken.json")}).code == 2);
  s.write("spec.json", R"({"kind": "B", "n": 1, "m": 1})");
  auto degenerate = run({"cycle", "check", "--spec", s.path("spec.json"), "--out", s.path("o")});
  CHECK(degenerate.code == 2);
  CHECK(json::parse(degenerate.err)["message"].get<std::string>().find("degenerate") != std::string::npos);

  s.write("slow.json", R"({"h": "1/16", "max_iter": 1, "tol": 1e-14})");
  auto conv = run({"ma-solve", "--config", s.path("slow.json"), "--out", s.path("o")});
  CHECK(conv.code == 3);
  auto e = json::parse(conv.err);
  CHECK(e["error"] == "convergence");
  CHECK(e["iterations"] == 1);
  CHECK(e.contains("last_residual"));
}

TEST_CASE("verify-all twice with the same seed gives byte-identical reports") {
  Scratch s;
  auto a = run({"verify-all", "--seed", "7", "--out", s.path("a")});
  auto b = run({"verify-all", "--seed", "7", "--out", s.path("b")});
  CHECK(a.code == 0);
  CHECK(b.code == 0);
  CHECK(a.out == b.out);
  CHECK(s.read("a/acceptance.json") == s.read("b/acceptance.json"));
  CHECK(s.read("a/acceptance.txt") == s.read("b/acceptance.txt"));
  auto report = json::parse(s.read("a/acceptance.json"));
  CHECK(report["seed"] == 7);
  CHECK(report["passed"] == 11);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 11);
}
