#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hnet/cli.hpp"
#include "hnet/io.hpp"

using namespace hnet;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_run(args, out, err);
  return {code, out.str(), err.str()};
}

// Runs each test inside a fresh working directory.
struct Workspace {
  fs::path previous = fs::current_path();
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("hnet_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::current_path(dir);
  }
  ~Workspace() {
    fs::current_path(previous);
    fs::remove_all(dir);
  }
};

}  // namespace

TEST_CASE("params reproduces the reference counts") {
  Workspace ws;
  CHECK(run({"params", "--model", "hnet", "--pe", "50", "--hidden", "100,100,100", "--omega0", "10"}).out == "30601\n");
  CHECK(run({"params", "--model", "sphsiren", "--pe", "10", "--hidden", "100,100", "--omega0", "3"}).out == "22401\n");
  CHECK(run({"params", "--model", "siren", "--pe", "100"}).out == "30701\n");
  CHECK(run({"params"}).out == "30601\n");
  CHECK(fs::exists("hnet-params.manifest.json"));
}

TEST_CASE("usage errors exit with 2") {
  Workspace ws;
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({"params", "--no-such-flag"}).code == kExitUsage);
  CHECK(run({"params", "--model", "mlp"}).code == kExitUsage);
  CHECK(run({"synth"}).code == kExitUsage);
  CHECK(run({"fit", "--data", "missing.csv", "--out", "ck.json"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("malformed data files name the line") {
  Workspace ws;
  std::ofstream("bad.csv") << "l,m,re,im\n0,0,1,0\n3,5,1,0\n";
  const Run r = run({"fit", "--data", "bad.csv", "--out", "ck.json", "--epochs", "1"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("bad.csv:3") != std::string::npos);
}

TEST_CASE("synth, fit, eval and laplacian end to end") {
  Workspace ws;
  REQUIRE(run({"synth", "--L", "6", "--p", "2", "--seed", "7", "--out", "field.csv"}).code == 0);
  CHECK(fs::exists("field.csv.manifest.json"));
  const auto manifest = read_json("field.csv.manifest.json");
  CHECK(manifest["command"] == "synth");
  CHECK(manifest["seed"] == 7);

  const std::vector<std::string> fit_args{"fit", "--data", "field.csv", "--model", "hnet", "--pe", "8",
                                          "--hidden", "16,16", "--omega0", "3", "--epochs", "100",
                                          "--batch", "32", "--lr", "3e-3", "--seed", "1",
                                          "--out", "ck.json", "--loss", "loss.csv", "--metrics", "fit.json"};
  const Run f = run(fit_args);
  REQUIRE_MESSAGE(f.code == 0, f.err);
  const auto fm = read_json("fit.json");
  CHECK(fm["epochs"] == 100);
  CHECK(fm["snr_db"].get<double>() > 5.0);
  CHECK(fs::exists("loss.csv"));
  CHECK(load_checkpoint("ck.json").train_bandlimit == 11);

  const Run again = run({"fit", "--data", "field.csv", "--model", "hnet", "--pe", "8", "--hidden", "16,16",
                         "--omega0", "3", "--epochs", "100", "--batch", "32", "--lr", "3e-3", "--seed", "1",
                         "--out", "ck2.json", "--threads", "3"});
  REQUIRE(again.code == 0);
  std::ifstream a("ck.json"), b("ck2.json");
  CHECK(std::string(std::istreambuf_iterator<char>(a), {}) == std::string(std::istreambuf_iterator<char>(b), {}));

  const Run e = run({"eval", "--checkpoint", "ck.json", "--data", "field.csv", "--grid-L", "16",
                     "--metrics", "eval.json", "--heatmap", "map.ppm", "--field", "pred.csv"});
  REQUIRE_MESSAGE(e.code == 0, e.err);
  const auto em = read_json("eval.json");
  CHECK(em["grid_L"] == 16);
  CHECK(em["super_resolution"] == true);
  CHECK(fs::exists("map.ppm"));
  CHECK(fs::exists("pred.csv"));

  const Run l = run({"laplacian", "--checkpoint", "ck.json", "--data", "field.csv", "--metrics", "lap.json"});
  REQUIRE_MESSAGE(l.code == 0, l.err);
  const auto lm = read_json("lap.json");
  CHECK(lm.contains("snr_db"));
  CHECK(lm["pole_band_error"].get<double>() >= 0.0);

  const Run s = run({"spectrum", "--checkpoint", "ck.json", "--lmax", "12", "--out", "spec.csv"});
  REQUIRE_MESSAGE(s.code == 0, s.err);
  CHECK(fs::exists("spec.csv"));
}

TEST_CASE("atom spectrum output") {
  Workspace ws;
  const Run r = run({"spectrum", "--atom", "--omega0", "5", "--w", "1", "--lmax", "16", "--seed", "2"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  while (line.rfind("#", 0) == 0) std::getline(is, line);
  CHECK(line == "l,power,bound");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 17);
}

TEST_CASE("verify subcommands") {
  Workspace ws;
  const Run lemma = run({"verify", "lemma1", "--lmax", "8", "--seeds", "5", "--out", "lemma.json"});
  REQUIRE_MESSAGE(lemma.code == 0, lemma.err);
  CHECK(read_json("lemma.json")["max_off_degree_energy"].get<double>() < 1e-9);
  CHECK(fs::exists("lemma.json.manifest.json"));

  const Run thm = run({"verify", "theorem1", "--l0", "2", "--k", "2", "--q", "2", "--seeds", "3", "--out", "thm.json"});
  REQUIRE_MESSAGE(thm.code == 0, thm.err);
  const auto cases = read_json("thm.json")["cases"];
  CHECK(cases.size() == 3);
  for (const auto& c : cases) CHECK(c["off_band_energy"].get<double>() < 1e-10);

  const Run prod = run({"verify", "product", "--out", "prod.json"});
  REQUIRE_MESSAGE(prod.code == 0, prod.err);
  const auto pj = read_json("prod.json");
  CHECK(pj["off_band_energy"].get<double>() < 1e-11);
  CHECK(pj["y10_squared"]["c20"].get<double>() == doctest::Approx(0.252313).epsilon(1e-6));

  const Run init = run({"verify", "init", "--out", "init.json"});
  REQUIRE_MESSAGE(init.code == 0, init.err);
  CHECK(read_json("init.json")["max_b"] == 0.0);
  CHECK(run({"verify", "init", "--model", "siren"}).code == kExitUsage);
}
