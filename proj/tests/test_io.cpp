#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hnet/io.hpp"

using namespace hnet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("hnet_io_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct Ppm {
  int width = 0, height = 0;
  std::string pixels;
};

Ppm parse_ppm(const std::string& bytes) {
  std::istringstream is(bytes);
  std::string line;
  Ppm p;
  std::getline(is, line);
  REQUIRE(line == "P6");
  while (is.peek() == '#') std::getline(is, line);
  is >> p.width >> p.height;
  int maxv = 0;
  is >> maxv;
  REQUIRE(maxv == 255);
  is.get();
  p.pixels.assign(std::istreambuf_iterator<char>(is), {});
  return p;
}

unsigned char pixel(const Ppm& p, int r, int c) {
  return static_cast<unsigned char>(p.pixels[3 * (static_cast<std::size_t>(r) * p.width + c)]);
}

}  // namespace

TEST_CASE("coefficient CSV round trip is exact") {
  TempDir tmp;
  const SHCoeffs c = synth_field({9, 1.5, 3});
  write_coeffs_csv(tmp.file("c.csv"), c);
  const SHCoeffs back = read_coeffs_csv(tmp.file("c.csv"));
  CHECK(back.bandlimit() == 9);
  CHECK(back.data() == c.data());
  CHECK(read_bytes(tmp.file("c.csv")).rfind("# format_version: 1\nl,m,re,im\n", 0) == 0);
}

TEST_CASE("coefficient CSV tolerates comments and missing entries") {
  TempDir tmp;
  write_text(tmp.file("c.csv"), "# note\nl,m,re,im\n\n2,-1,0.5,0.25\n0,0,1,0\n");
  const SHCoeffs c = read_coeffs_csv(tmp.file("c.csv"));
  CHECK(c.bandlimit() == 2);
  CHECK(c(2, -1) == Complex(0.5, 0.25));
  CHECK(c(0, 0) == Complex(1.0));
  CHECK(c(1, 1) == Complex(0.0));
}

TEST_CASE("malformed coefficient CSV reports file and line") {
  TempDir tmp;
  const auto expect_error = [&](const std::string& text, const std::string& fragment) {
    write_text(tmp.file("bad.csv"), text);
    try {
      read_coeffs_csv(tmp.file("bad.csv"));
      FAIL("expected DataError for: " << text);
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK_MESSAGE(msg.find("bad.csv") != std::string::npos, msg);
      CHECK_MESSAGE(msg.find(fragment) != std::string::npos, msg);
    }
  };
  expect_error("l,m,re,im\n0,0,1\n", ":2");
  expect_error("l,m,re,im\n0,0,1,0\n1,0,x,0\n", ":3");
  expect_error("l,m,re,im\n1,2,1,0\n", ":2");
  expect_error("l,m,re,im\n0,0,1,0\n0,0,2,0\n", "duplicate");
  expect_error("0,0,1,0\n", "header");
  expect_error("l,m,re,im\n", "no coefficients");
  CHECK_THROWS_AS(read_coeffs_csv(tmp.file("missing.csv")), DataError);
}

TEST_CASE("hex floats round trip bit for bit") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-300, 300));
    const double back = parse_hex_double(hex_double(v));
    CHECK(std::memcmp(&v, &back, sizeof v) == 0);
  }
  CHECK(parse_hex_double(hex_double(-0.0)) == 0.0);
  CHECK(std::signbit(parse_hex_double(hex_double(-0.0))));
  CHECK_THROWS(parse_hex_double("zz"));
}

TEST_CASE("checkpoint round trip is bitwise") {
  TempDir tmp;
  for (auto kind : {ModelKind::Hnet, ModelKind::Siren, ModelKind::SphSiren}) {
    ModelConfig cfg;
    cfg.kind = kind;
    cfg.pe_size = 5;
    cfg.hidden = {7, 3};
    Checkpoint ck;
    ck.model = kind;
    ck.net = build_network(cfg, 12);
    ck.standardizer = {0.1 + 1e-17, 3.0 / 7.0};
    ck.train_bandlimit = 11;
    ck.seed = 12;
    save_checkpoint(tmp.file("ck.json"), ck);
    const Checkpoint back = load_checkpoint(tmp.file("ck.json"));
    CHECK(back.model == kind);
    CHECK(back.train_bandlimit == 11);
    CHECK(back.seed == 12);
    CHECK(back.standardizer.mean == ck.standardizer.mean);
    CHECK(back.standardizer.stddev == ck.standardizer.stddev);
    CHECK(get_params(back.net) == get_params(ck.net));
    CHECK(forward(back.net, {1.0, 2.0}) == forward(ck.net, {1.0, 2.0}));
    save_checkpoint(tmp.file("ck2.json"), back);
    CHECK(read_bytes(tmp.file("ck.json")) == read_bytes(tmp.file("ck2.json")));
  }
}

TEST_CASE("corrupt checkpoints are data errors") {
  TempDir tmp;
  ModelConfig cfg;
  cfg.pe_size = 3;
  cfg.hidden = {4};
  Checkpoint ck;
  ck.net = build_network(cfg, 1);
  save_checkpoint(tmp.file("ck.json"), ck);
  nlohmann::json j = read_json(tmp.file("ck.json"));
  j["network"]["readout"]["in"] = 9;
  write_json(tmp.file("bad.json"), j);
  CHECK_THROWS_AS(load_checkpoint(tmp.file("bad.json")), DataError);
  write_text(tmp.file("junk.json"), "{not json");
  CHECK_THROWS_AS(load_checkpoint(tmp.file("junk.json")), DataError);
}

TEST_CASE("synth_field") {
  const SHCoeffs a = synth_field({8, 0.0, 5});
  CHECK(a.data() == synth_field({8, 0.0, 5}).data());
  CHECK(a.data() != synth_field({8, 0.0, 6}).data());
  CHECK(a.bandlimit() == 8);
  CHECK(a.reality_defect() < 1e-15);
  CHECK(out_of_band_energy(a.resized(12), 8) == 0.0);

  // p = 0: every degree has expected S(l) = 1.
  std::vector<double> mean(9, 0.0);
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    const auto ps = power_spectrum(synth_field({8, 0.0, static_cast<std::uint64_t>(s)}));
    for (int l = 0; l <= 8; ++l) mean[l] += ps[l] / seeds;
  }
  for (int l = 0; l <= 8; ++l) {
    const double sd = std::sqrt(2.0 / (2.0 * l + 1.0) / seeds);
    CHECK(std::abs(mean[l] - 1.0) < 4 * sd);
  }
}

TEST_CASE("heatmaps") {
  const GaussLegendreGrid g = gl_grid(10);
  const GridField flat = GridField::from_real(g, std::vector<double>(g.size(), 2.5));
  const Ppm c = parse_ppm(heatmap_bytes(flat));
  CHECK(c.width == 2 * c.height);
  CHECK(c.height == 22);
  CHECK(c.pixels.size() == static_cast<std::size_t>(3 * c.width * c.height));
  for (char v : c.pixels) CHECK(static_cast<unsigned char>(v) == 128);

  const GridField y10 = GridField::sample(g, [](const SphericalPoint& p) { return eval_ylm(1, 0, p); });
  const Ppm r = parse_ppm(heatmap_bytes(y10, 40));
  CHECK(r.height == 40);
  CHECK(pixel(r, 0, 0) == 255);
  CHECK(pixel(r, 39, 0) == 0);
  for (int row = 0; row < r.height; ++row) {
    for (int col = 1; col < r.width; ++col) CHECK(pixel(r, row, col) == pixel(r, row, 0));
    if (row > 0) CHECK(pixel(r, row, 0) <= pixel(r, row - 1, 0));
  }

  TempDir tmp;
  write_heatmap(y10, tmp.file("a.ppm"));
  write_heatmap(y10, tmp.file("b.ppm"));
  CHECK(read_bytes(tmp.file("a.ppm")) == read_bytes(tmp.file("b.ppm")));
  CHECK(read_bytes(tmp.file("a.ppm")).find("# format_version: 1") != std::string::npos);
}

TEST_CASE("manifest") {
  const nlohmann::json cfg{{"L", 20}, {"p", 2.0}};
  const auto m = make_manifest("synth", {"synth", "--L", "20"}, 7, cfg);
  CHECK(m["command"] == "synth");
  CHECK(m["seed"] == 7);
  CHECK(m["format_version"] == kFormatVersion);
  CHECK(m["argv"].size() == 3);
  CHECK(m["config"] == cfg);
  CHECK(m["config_hash"].get<std::string>().size() == 16);
  CHECK(m.contains("formats"));
  CHECK(make_manifest("synth", {}, 7, cfg)["config_hash"] == m["config_hash"]);
  CHECK(make_manifest("synth", {}, 7, {{"L", 21}, {"p", 2.0}})["config_hash"] != m["config_hash"]);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("field and loss CSV writers") {
  TempDir tmp;
  const GaussLegendreGrid g = gl_grid(2);
  GridField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f.values[i] = double(i);
  write_field_csv(tmp.file("f.csv"), f);
  write_loss_csv(tmp.file("l.csv"), {0.5, 0.25});
  std::istringstream fs_(read_bytes(tmp.file("f.csv")));
  std::string line;
  int rows = 0;
  while (std::getline(fs_, line))
    if (!line.empty() && line[0] != '#') ++rows;
  CHECK(rows == static_cast<int>(g.size()) + 1);
  CHECK(read_bytes(tmp.file("l.csv")).find("epoch,mse\n") != std::string::npos);
}
