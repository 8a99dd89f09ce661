#include "hnet/spectral_verify.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hnet {

std::vector<Complex> truncated_exp_coeffs(int l0, Complex scale) {
  if (l0 < 0) throw std::invalid_argument("truncation degree must be >= 0");
  std::vector<Complex> beta(static_cast<std::size_t>(l0 + 1));
  beta[0] = 1.0;
  for (int l = 1; l <= l0; ++l) beta[l] = beta[l - 1] * scale / static_cast<double>(l);
  return beta;
}

double exp_tail_bound(int l0, double scale_mag) {
  if (l0 < 0) throw std::invalid_argument("truncation degree must be >= 0");
  if (scale_mag == 0.0) return 0.0;
  return std::exp((l0 + 1.0) * std::log(scale_mag) - std::lgamma(l0 + 2.0) + scale_mag);
}

std::vector<double> truncated_herglotz_features(const PositionalEncoding& pe, int l0,
                                                const SphericalPoint& p) {
  if (pe.kind != EncodingKind::Herglotz) throw std::invalid_argument("expected a Herglotz encoding");
  const std::size_t n = pe.herglotz.size();
  std::vector<double> out(2 * n);
  const Vec3 x = unit_vector(p);
  for (std::size_t i = 0; i < n; ++i) {
    const HerglotzNeuron& h = pe.herglotz[i];
    const auto beta = truncated_exp_coeffs(l0, pe.omega0 * h.w);
    const Complex t = h.a.project(x);
    Complex acc = 0.0;
    for (int l = l0; l >= 0; --l) acc = acc * t + beta[l];
    acc *= std::exp(pe.omega0 * h.b);
    out[i] = acc.real();
    out[n + i] = acc.imag();
  }
  return out;
}

double forward_truncated(const Network& net, int l0, const SphericalPoint& p) {
  std::vector<double> a = truncated_herglotz_features(net.pe, l0, p), b;
  for (const auto& layer : net.hidden) {
    detail::dense(layer, nullptr, a, b, true);
    std::swap(a, b);
  }
  detail::dense(net.readout, nullptr, a, b,
                net.readout.activation.kind != Activation::Kind::Identity);
  return b[0];
}

namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double lipschitz(const Activation& act) {
  switch (act.kind) {
    case Activation::Kind::Sine:
      return std::abs(act.frequency);
    case Activation::Kind::Identity:
      return 1.0;
    case Activation::Kind::Polynomial:
      break;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

double truncation_forward_bound(const Network& net, int l0) {
  if (net.pe.kind != EncodingKind::Herglotz) throw std::invalid_argument("expected a Herglotz encoding");
  double tail_sq = 0.0;
  for (const auto& h : net.pe.herglotz) {
    const double gain = std::exp(net.pe.omega0 * h.b.real());
    const double t = gain * exp_tail_bound(l0, net.pe.omega0 * std::abs(h.w) * h.a.norm());
    tail_sq += t * t;
  }
  double bound = std::sqrt(tail_sq);
  for (const auto& layer : net.hidden) bound *= lipschitz(layer.activation) * spectral_norm(layer.weight);
  bound *= lipschitz(net.readout.activation) * spectral_norm(net.readout.weight);
  return bound;
}

double verify_poly_encoding(const Network& net, int l0, int work_bandlimit) {
  if (net.hidden.empty()) throw std::invalid_argument("network has no hidden layer");
  int limit = l0;
  if (net.pe.kind == EncodingKind::SphHarm) {
    limit = net.pe.l0;
  } else if (net.pe.kind != EncodingKind::Herglotz) {
    throw std::invalid_argument("polynomial encoding check needs a SphHarm or Herglotz encoding");
  }
  if (work_bandlimit < limit) throw std::invalid_argument("work bandlimit below encoding degree");
  const auto grid = gl_grid(work_bandlimit);
  const DenseLayer& first = net.hidden.front();
  std::vector<GridField> pre(static_cast<std::size_t>(first.out()), GridField(grid));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.point(i);
    const auto f = net.pe.kind == EncodingKind::SphHarm ? pe_eval(net.pe, p)
                                                        : truncated_herglotz_features(net.pe, l0, p);
    for (int o = 0; o < first.out(); ++o) {
      double z = first.bias(o);
      for (int k = 0; k < first.in(); ++k) z += first.weight(o, k) * f[k];
      pre[o].values[i] = z;
    }
  }
  double worst = 0.0;
  for (const auto& field : pre) {
    worst = std::max(worst, out_of_band_energy(sht_forward(field, work_bandlimit), limit));
  }
  return worst;
}

Network random_poly_network(int l0, int k, int q, Rng& rng, int width) {
  if (l0 < 0 || k < 1 || q < 1 || width < 1) {
    throw std::invalid_argument("need l0 >= 0, k >= 1, q >= 1, width >= 1");
  }
  Network net;
  net.pe.kind = EncodingKind::SphHarm;
  net.pe.l0 = l0;
  std::vector<double> alpha(static_cast<std::size_t>(k + 1));
  for (int j = 0; j < k; ++j) alpha[j] = rng.uniform(-1.0, 1.0);
  const double lead = rng.uniform(0.5, 1.0);
  alpha[k] = rng.uniform() < 0.5 ? -lead : lead;
  const Activation act = Activation::polynomial(alpha);

  const auto fill = [&](DenseLayer& layer) {
    const double scale = 2.0 / std::sqrt(static_cast<double>(layer.in()));
    for (int o = 0; o < layer.out(); ++o) {
      for (int i = 0; i < layer.in(); ++i) layer.weight(o, i) = scale * rng.uniform(-1.0, 1.0);
      layer.bias(o) = scale * rng.uniform(-1.0, 1.0);
    }
  };
  int in = static_cast<int>(net.pe.width());
  for (int layer = 0; layer + 1 < q; ++layer) {
    net.hidden.emplace_back(in, width, act);
    fill(net.hidden.back());
    in = width;
  }
  net.readout = DenseLayer(in, 1, Activation::identity());
  fill(net.readout);
  return net;
}

int theorem1_bound(int l0, int k, int q) {
  long long bound = l0;
  for (int i = 1; i < q; ++i) bound *= k;
  return static_cast<int>(bound);
}

BandlimitReport verify_theorem1(int l0, int k, int q, std::uint64_t seed) {
  if (l0 < 0 || k < 1 || q < 1) throw std::invalid_argument("need l0 >= 0, k >= 1, q >= 1");
  BandlimitReport r;
  r.l0 = l0;
  r.k = k;
  r.q = q;
  r.seed = seed;
  r.bound = theorem1_bound(l0, k, q);
  r.l_work = 2 * r.bound + 8;

  Rng rng(seed);
  const Network net = random_poly_network(l0, k, q, rng);
  const auto grid = gl_grid(r.l_work);
  GridField field(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) field.values[i] = forward(net, grid.point(i));
  const auto c = sht_forward(field, r.l_work);
  const auto e = degree_energy(c);
  double total = 0.0;
  for (double v : e) total += v;
  if (total > 0.0) {
    for (int l = 0; l <= r.l_work; ++l) {
      const double rel = e[l] / total;
      if (l > r.bound) r.off_band_energy += rel;
      if (l == r.bound) r.top_degree_energy = rel;
      if (rel > kOccupiedThreshold) r.max_degree = l;
    }
  }
  return r;
}

SHCoeffs product_coeffs(const SHCoeffs& f, const SHCoeffs& g, int work_bandlimit) {
  const auto grid = gl_grid(work_bandlimit);
  const auto a = sht_inverse(f, grid);
  const auto b = sht_inverse(g, grid);
  GridField prod(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) prod.values[i] = a.values[i] * b.values[i];
  return sht_forward(prod, work_bandlimit);
}

double verify_product_rule(int la, int lb, Rng& rng) {
  if (la < 0 || lb < 0) throw std::invalid_argument("bandlimits must be >= 0");
  const auto f = random_real_coeffs(la, 0.0, rng);
  const auto g = random_real_coeffs(lb, 0.0, rng);
  return out_of_band_energy(product_coeffs(f, g, 2 * (la + lb) + 8), la + lb);
}

Lemma1Report verify_lemma1(int lmax, int seeds, std::uint64_t seed) {
  if (lmax < 0 || seeds < 1) throw std::invalid_argument("need lmax >= 0 and seeds >= 1");
  Lemma1Report r;
  r.lmax = lmax;
  r.seeds = seeds;
  r.seed = seed;
  const int work = lmax + 4;
  Rng rng(seed);
  for (int s = 0; s < seeds; ++s) {
    const HerglotzVector a = sample_herglotz(rng).normalized();
    for (int l = 0; l <= lmax; ++l) {
      const auto e = degree_energy(monomial_coeffs(a, l, work));
      double off = 0.0;
      for (int j = 0; j <= work; ++j)
        if (j != l) off += e[j];
      r.max_off_degree = std::max(r.max_off_degree, off / (off + e[l]));
      r.max_energy_ratio =
          std::max(r.max_energy_ratio, e[l] / (4.0 * std::numbers::pi * (2.0 * l + 1.0)));
    }
  }
  return r;
}

SpectrumReport verify_spectrum(double omega0, double w_mag, int lmax, std::uint64_t seed) {
  if (lmax < 1) throw std::invalid_argument("lmax must be >= 1");
  Rng rng(seed);
  HerglotzNeuron n;
  n.a = sample_herglotz(rng).normalized();
  n.w = w_mag;
  n.b = 0.0;

  SpectrumReport r;
  r.omega0 = omega0;
  r.w_mag = w_mag;
  r.a_norm = n.a.norm();
  r.measured = atom_spectrum_by_degree(n, omega0, lmax);
  r.bound.assign(static_cast<std::size_t>(lmax + 1), 0.0);
  r.predicted_peak = std::numbers::e * omega0 * w_mag * r.a_norm;
  for (int l = 1; l <= lmax; ++l) {
    r.bound[l] = spectrum_bound(l, omega0, w_mag, r.a_norm);
    r.max_ratio = std::max(r.max_ratio, r.measured[l] / r.bound[l]);
  }
  r.peak_degree = static_cast<int>(std::max_element(r.measured.begin(), r.measured.end()) -
                                   r.measured.begin());

  // Cross-check against the direct transform wherever it is above round-off.
  const auto direct = power_spectrum(atom_coeffs(n, omega0, lmax + 32));
  const double peak = r.measured[r.peak_degree];
  for (int l = 0; l <= lmax; ++l) {
    if (r.measured[l] < 1e-12 * peak) continue;
    r.direct_check = std::max(r.direct_check, std::abs(direct[l] - r.measured[l]) / r.measured[l]);
  }
  return r;
}

InitReport verify_init(const Network& net) {
  if (net.pe.kind != EncodingKind::Herglotz) throw std::invalid_argument("expected a Herglotz encoding");
  InitReport r;
  r.neurons = net.pe.herglotz.size();
  for (const auto& h : net.pe.herglotz) {
    r.max_defect = std::max(r.max_defect, herglotz_defect(h.a));
    r.max_norm_gap = std::max({r.max_norm_gap, std::abs(norm(h.a.re) - 0.5),
                               std::abs(norm(h.a.im) - 0.5)});
    r.max_w = std::max(r.max_w, std::abs(h.w));
    r.max_b = std::max(r.max_b, std::abs(h.b));
  }
  return r;
}

}  // namespace hnet
