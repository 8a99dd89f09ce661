#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hnet/network.hpp"

using namespace hnet;
using std::numbers::pi;

namespace {

// Plain re-implementation of the HNET forward pass.
double straight_line_hnet(const Network& net, const SphericalPoint& p) {
  const double st = std::sin(p.theta());
  const double x[3] = {st * std::cos(p.phi()), st * std::sin(p.phi()), std::cos(p.theta())};
  const std::size_t n = net.pe.herglotz.size();
  std::vector<double> h(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = net.pe.herglotz[i].a;
    const Complex proj(a.re.x * x[0] + a.re.y * x[1] + a.re.z * x[2],
                       a.im.x * x[0] + a.im.y * x[1] + a.im.z * x[2]);
    const Complex z =
        std::exp(net.pe.omega0 * (net.pe.herglotz[i].w * proj + net.pe.herglotz[i].b));
    h[i] = z.real();
    h[n + i] = z.imag();
  }
  for (const auto& layer : net.hidden) {
    std::vector<double> next(layer.out());
    for (int o = 0; o < layer.out(); ++o) {
      double s = layer.bias(o);
      for (int i = 0; i < layer.in(); ++i) s += layer.weight(o, i) * h[i];
      next[o] = std::sin(layer.activation.frequency * s);
    }
    h = next;
  }
  double out = net.readout.bias(0);
  for (int i = 0; i < net.readout.in(); ++i) out += net.readout.weight(0, i) * h[i];
  return out;
}

}  // namespace

TEST_CASE("pe_eval examples") {
  PositionalEncoding sh;
  sh.kind = EncodingKind::SphHarm;
  sh.l0 = 0;
  const auto f = pe_eval(sh, {0.7, 1.9});
  REQUIRE(f.size() == 1);
  CHECK(f[0] == doctest::Approx(1.0 / std::sqrt(4 * pi)).epsilon(1e-15));

  PositionalEncoding hg;
  hg.kind = EncodingKind::Herglotz;
  hg.omega0 = 0.0;
  hg.herglotz.resize(1);
  hg.herglotz[0].a = {{0.5, 0, 0}, {0, 0.5, 0}};
  hg.herglotz[0].w = {0.3, 0.4};
  const auto g = pe_eval(hg, {1.2, 0.4});
  REQUIRE(g.size() == 2);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 0.0);

  PositionalEncoding sn;
  sn.kind = EncodingKind::Sine;
  sn.omega0 = 10.0;
  sn.sine_freq = {{0.0, 0.0}};
  sn.sine_bias = {pi / 2};
  for (double th : {0.1, 1.5, 3.0}) CHECK(pe_eval(sn, {th, th * 2})[0] == doctest::Approx(1.0));
}

TEST_CASE("pe widths") {
  for (auto [kind, size, width] : {std::tuple{ModelKind::Hnet, 7, 14},
                                   std::tuple{ModelKind::Siren, 7, 7},
                                   std::tuple{ModelKind::SphSiren, 3, 16}}) {
    ModelConfig cfg;
    cfg.kind = kind;
    cfg.pe_size = size;
    cfg.hidden = {4};
    const Network net = build_network(cfg, 1);
    CHECK(net.pe.width() == static_cast<std::size_t>(width));
    CHECK(pe_eval(net.pe, {0.5, 0.5}).size() == static_cast<std::size_t>(width));
  }
}

TEST_CASE("SphHarm features are the real harmonics") {
  PositionalEncoding sh;
  sh.kind = EncodingKind::SphHarm;
  sh.l0 = 3;
  const SphericalPoint p{0.9, 2.3};
  const auto f = pe_eval(sh, p);
  std::size_t k = 0;
  for (int l = 0; l <= 3; ++l) {
    CHECK(f[k++] == doctest::Approx(eval_ylm(l, 0, p).real()).epsilon(1e-13));
    for (int m = 1; m <= l; ++m) {
      const Complex y = eval_ylm(l, m, p);
      CHECK(f[k++] == doctest::Approx(std::sqrt(2.0) * y.real()).epsilon(1e-13));
      CHECK(f[k++] == doctest::Approx(std::sqrt(2.0) * y.imag()).epsilon(1e-13));
    }
  }
}

TEST_CASE("forward examples") {
  ModelConfig cfg;
  cfg.hidden = {5, 5};
  cfg.pe_size = 3;
  Network zero = make_network(cfg);
  for (auto& h : zero.pe.herglotz) h.a = {{0.5, 0, 0}, {0, 0.5, 0}};
  zero.readout.bias(0) = 0.75;
  for (double th : {0.2, 1.0, 2.9}) CHECK(forward(zero, {th, 1.0}) == 0.75);

  ModelConfig sc;
  sc.kind = ModelKind::SphSiren;
  sc.pe_size = 0;
  sc.hidden = {};
  Network y00 = make_network(sc);
  y00.readout.weight(0, 0) = 2.5;
  CHECK(forward(y00, {1.3, 0.2}) == doctest::Approx(2.5 / std::sqrt(4 * pi)).epsilon(1e-15));
}

TEST_CASE("forward matches a straight-line evaluator") {
  ModelConfig cfg;
  cfg.pe_size = 12;
  cfg.hidden = {16, 16};
  const Network net = build_network(cfg, 77);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const SphericalPoint p{rng.uniform(0.0, pi), rng.uniform(0.0, 2 * pi)};
    CHECK(std::abs(forward(net, p) - straight_line_hnet(net, p)) < 1e-12);
  }
}

TEST_CASE("forward_grid is independent of the thread count") {
  ModelConfig cfg;
  cfg.pe_size = 6;
  cfg.hidden = {8};
  const Network net = build_network(cfg, 5);
  const GaussLegendreGrid g = gl_grid(6);
  const auto one = forward_grid(net, g, 1);
  const auto four = forward_grid(net, g, 4);
  CHECK(one == four);
  CHECK(one[g.index(2, 3)] == forward(net, g.point(2, 3)));
}

TEST_CASE("init_siren bounds and determinism") {
  ModelConfig cfg;
  const Network a = build_network(cfg, 42);
  const Network b = build_network(cfg, 42);
  CHECK(get_params(a) == get_params(b));
  CHECK(get_params(a) != get_params(build_network(cfg, 43)));

  const double bound = std::sqrt(0.06) / 10.0;
  for (std::size_t q = 1; q < a.hidden.size(); ++q) {
    CHECK(a.hidden[q].in() == 100);
    CHECK(a.hidden[q].weight.cwiseAbs().maxCoeff() <= bound);
  }
  CHECK(a.hidden[0].weight.cwiseAbs().maxCoeff() <= 1.0 / 100.0);
  for (const auto& h : a.pe.herglotz) {
    CHECK(h.b == Complex(0.0));
    CHECK(std::abs(h.w) <= 1.0);
    CHECK(herglotz_defect(h.a) < 1e-12);
  }
}

TEST_CASE("param counts") {
  ModelConfig hnet;
  CHECK(param_count(make_network(hnet)) == 30601);

  ModelConfig siren;
  siren.kind = ModelKind::Siren;
  siren.pe_size = 100;
  CHECK(param_count(make_network(siren)) == 30701);

  ModelConfig sph;
  sph.kind = ModelKind::SphSiren;
  sph.pe_size = 10;
  sph.hidden = {100, 100};
  sph.omega0 = 3.0;
  const Network s = make_network(sph);
  CHECK(param_count(s) == 22401);
  CHECK(s.pe.width() == 121);
  CHECK(s.hidden[0].activation.frequency == 3.0);
  CHECK(s.hidden[1].activation.frequency == 1.0);

  ModelConfig empty;
  empty.kind = ModelKind::SphSiren;
  empty.pe_size = 0;
  empty.hidden = {};
  CHECK(param_count(make_network(empty)) == 2);
}

TEST_CASE("param flattening round trip") {
  ModelConfig cfg;
  cfg.pe_size = 4;
  cfg.hidden = {3, 2};
  Network net = build_network(cfg, 9);
  const auto blocks = param_blocks(net);
  std::size_t total = 0;
  for (const auto& b : blocks) {
    CHECK(b.offset == total);
    total += b.size;
  }
  CHECK(total == param_count(net));
  std::vector<double> p(total);
  for (std::size_t i = 0; i < total; ++i) p[i] = 0.01 * double(i);
  set_params(net, p);
  CHECK(get_params(net) == p);
  CHECK_THROWS_AS(set_params(net, std::vector<double>(total + 1)), std::invalid_argument);
}

TEST_CASE("dimension checks") {
  ModelConfig cfg;
  cfg.pe_size = 4;
  cfg.hidden = {3};
  Network net = make_network(cfg);
  CHECK_NOTHROW(net.check_dimensions());
  net.readout = DenseLayer(5, 1, Activation::identity());
  CHECK_THROWS_AS(net.check_dimensions(), std::invalid_argument);
  cfg.hidden = {0};
  CHECK_THROWS_AS(make_network(cfg), std::invalid_argument);
}

TEST_CASE("non-finite values name the layer") {
  ModelConfig cfg;
  cfg.pe_size = 2;
  cfg.hidden = {3, 3};
  Network net = build_network(cfg, 1);
  net.hidden[1].bias(0) = std::nan("");
  try {
    forward(net, {1.0, 1.0});
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("hidden layer 2") != std::string::npos);
  }
}

TEST_CASE("pole continuity") {
  const double eps = 1e-7;
  for (auto kind : {ModelKind::Hnet, ModelKind::SphSiren}) {
    ModelConfig cfg;
    cfg.kind = kind;
    cfg.pe_size = kind == ModelKind::Hnet ? 8 : 4;
    cfg.hidden = {10, 10};
    const Network net = build_network(cfg, 3);
    for (double th : {eps, pi - eps}) {
      const double ref = forward(net, {th, 0.0});
      for (int k = 1; k < 16; ++k) {
        CHECK(std::abs(forward(net, {th, 2 * pi * k / 16}) - ref) < 1e3 * eps);
      }
    }
  }
  // The sine encoding over the chart is not single-valued at the pole.
  ModelConfig cfg;
  cfg.kind = ModelKind::Siren;
  cfg.pe_size = 8;
  cfg.hidden = {10};
  const Network siren = build_network(cfg, 3);
  double spread = 0.0;
  const double ref = forward(siren, {eps, 0.0});
  for (int k = 1; k < 16; ++k) spread = std::max(spread, std::abs(forward(siren, {eps, 2 * pi * k / 16}) - ref));
  CHECK(spread > 1e-3);
}

TEST_CASE("finite differences converge at second order") {
  ModelConfig cfg;
  cfg.pe_size = 6;
  cfg.hidden = {8};
  const Network net = build_network(cfg, 4);
  const SphericalPoint p{1.1, 0.6};
  const auto central = [&](double h) {
    return (forward(net, {p.theta() + h, p.phi()}) - forward(net, {p.theta() - h, p.phi()})) / (2 * h);
  };
  const double d1 = central(1e-2), d2 = central(5e-3), d3 = central(2.5e-3);
  // Error ratio of successive halvings approaches 4.
  const double ratio = (d1 - d2) / (d2 - d3);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("string conversions") {
  CHECK(model_from_string("hnet") == ModelKind::Hnet);
  CHECK(model_from_string("sphsiren") == ModelKind::SphSiren);
  CHECK(to_string(ModelKind::Siren) == "siren");
  CHECK_THROWS_AS(model_from_string("mlp"), std::invalid_argument);
  CHECK(encoding_from_string(to_string(EncodingKind::Herglotz)) == EncodingKind::Herglotz);
}
