#include "hnet/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

namespace hnet {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw DataError(path + ": cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw DataError(path + ": write failed");
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

std::string trim(std::string s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(s[i])) ++i;
  return s.substr(i);
}

double parse_number(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  if (t.empty()) throw DataError(where + ": empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw DataError(where + ": bad number '" + t + "'");
  }
  return v;
}

int parse_int(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || v < -1000000 || v > 1000000) {
    throw DataError(where + ": bad integer '" + t + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

SHCoeffs synth_field(const SynthSpec& spec) {
  if (spec.bandlimit < 0 || !(spec.p >= 0.0)) {
    throw std::invalid_argument("synthetic field needs L >= 0 and p >= 0");
  }
  Rng rng(spec.seed);
  return random_real_coeffs(spec.bandlimit, spec.p, rng);
}

std::string coeffs_csv(const SHCoeffs& c) {
  std::string out = "# format_version: " + std::to_string(kFormatVersion) + "\nl,m,re,im\n";
  for (int l = 0; l <= c.bandlimit(); ++l) {
    for (int m = -l; m <= l; ++m) {
      out += std::to_string(l) + "," + std::to_string(m) + "," + fmt17(c(l, m).real()) + "," +
             fmt17(c(l, m).imag()) + "\n";
    }
  }
  return out;
}

void write_coeffs_csv(const std::string& path, const SHCoeffs& c) {
  auto out = open_out(path);
  out << coeffs_csv(c);
  finish(out, path);
}

SHCoeffs read_coeffs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  std::map<std::pair<int, int>, Complex> entries;
  std::string line;
  int lineno = 0;
  bool header = false;
  int lmax = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header) {
      if (t != "l,m,re,im") throw DataError(where + ": expected header 'l,m,re,im'");
      header = true;
      continue;
    }
    const auto parts = split(t, ',');
    if (parts.size() != 4) throw DataError(where + ": expected 4 fields, got " + std::to_string(parts.size()));
    const int l = parse_int(parts[0], where), m = parse_int(parts[1], where);
    if (l < 0 || std::abs(m) > l) throw DataError(where + ": invalid degree/order (" + parts[0] + "," + parts[1] + ")");
    if (!entries.emplace(std::make_pair(l, m), Complex(parse_number(parts[2], where), parse_number(parts[3], where))).second) {
      throw DataError(where + ": duplicate entry for l=" + std::to_string(l) + ", m=" + std::to_string(m));
    }
    lmax = std::max(lmax, l);
  }
  if (!header) throw DataError(path + ": missing header 'l,m,re,im'");
  if (lmax < 0) throw DataError(path + ": no coefficients");
  SHCoeffs c(lmax);
  for (const auto& [lm, v] : entries) c(lm.first, lm.second) = v;
  return c;
}

void write_field_csv(const std::string& path, const GridField& f) {
  auto out = open_out(path);
  out << "# format_version: " << kFormatVersion << "\ntheta,phi,value\n";
  const auto& g = f.grid;
  for (std::size_t j = 0; j < g.n_theta(); ++j)
    for (std::size_t k = 0; k < g.n_phi(); ++k)
      out << fmt17(g.theta(j)) << ',' << fmt17(g.phi(k)) << ',' << fmt17(f.values[g.index(j, k)].real())
          << '\n';
  finish(out, path);
}

void write_loss_csv(const std::string& path, const std::vector<double>& history) {
  auto out = open_out(path);
  out << "# format_version: " << kFormatVersion << "\nepoch,mse\n";
  for (std::size_t e = 0; e < history.size(); ++e) out << e << ',' << fmt17(history[e]) << '\n';
  finish(out, path);
}

void write_json(const std::string& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string hex_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw DataError("bad float '" + s + "'");
  return v;
}

namespace {

json hex_array(const double* v, std::size_t n) {
  json a = json::array();
  for (std::size_t i = 0; i < n; ++i) a.push_back(hex_double(v[i]));
  return a;
}

std::vector<double> read_hex_array(const json& a, std::size_t expected, const std::string& what) {
  if (!a.is_array() || a.size() != expected) {
    throw DataError(what + ": expected " + std::to_string(expected) + " values");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : a) out.push_back(parse_hex_double(v.get<std::string>()));
  return out;
}

std::string activation_name(Activation::Kind k) {
  switch (k) {
    case Activation::Kind::Sine:
      return "sine";
    case Activation::Kind::Polynomial:
      return "polynomial";
    case Activation::Kind::Identity:
      return "identity";
  }
  return "identity";
}

json layer_to_json(const DenseLayer& layer) {
  std::vector<double> w;
  for (int o = 0; o < layer.out(); ++o)
    for (int i = 0; i < layer.in(); ++i) w.push_back(layer.weight(o, i));
  return {{"in", layer.in()},
          {"out", layer.out()},
          {"activation",
           {{"kind", activation_name(layer.activation.kind)},
            {"frequency", hex_double(layer.activation.frequency)},
            {"alpha", hex_array(layer.activation.alpha.data(), layer.activation.alpha.size())}}},
          {"weight", hex_array(w.data(), w.size())},
          {"bias", hex_array(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()))}};
}

DenseLayer layer_from_json(const json& j, const std::string& what) {
  const int in = j.at("in").get<int>(), out = j.at("out").get<int>();
  if (in < 0 || out < 1) throw DataError(what + ": bad shape");
  const auto& a = j.at("activation");
  const std::string kind = a.at("kind").get<std::string>();
  Activation act;
  if (kind == "sine") {
    act = Activation::sine(parse_hex_double(a.at("frequency").get<std::string>()));
  } else if (kind == "identity") {
    act = Activation::identity();
  } else if (kind == "polynomial") {
    act = Activation::polynomial(read_hex_array(a.at("alpha"), a.at("alpha").size(), what + ".alpha"));
  } else {
    throw DataError(what + ": unknown activation '" + kind + "'");
  }
  DenseLayer layer(in, out, act);
  const auto w = read_hex_array(j.at("weight"), static_cast<std::size_t>(in) * out, what + ".weight");
  std::size_t k = 0;
  for (int o = 0; o < out; ++o)
    for (int i = 0; i < in; ++i) layer.weight(o, i) = w[k++];
  const auto b = read_hex_array(j.at("bias"), static_cast<std::size_t>(out), what + ".bias");
  for (int o = 0; o < out; ++o) layer.bias(o) = b[o];
  return layer;
}

}  // namespace

json network_to_json(const Network& net) {
  json pe = {{"kind", to_string(net.pe.kind)}, {"omega0", hex_double(net.pe.omega0)}, {"l0", net.pe.l0}};
  if (net.pe.kind == EncodingKind::Herglotz) {
    json atoms = json::array();
    for (const auto& h : net.pe.herglotz) {
      const double re[3] = {h.a.re.x, h.a.re.y, h.a.re.z}, im[3] = {h.a.im.x, h.a.im.y, h.a.im.z};
      const double w[2] = {h.w.real(), h.w.imag()}, b[2] = {h.b.real(), h.b.imag()};
      atoms.push_back({{"a_re", hex_array(re, 3)}, {"a_im", hex_array(im, 3)},
                       {"w", hex_array(w, 2)}, {"b", hex_array(b, 2)}});
    }
    pe["atoms"] = atoms;
  } else if (net.pe.kind == EncodingKind::Sine) {
    json freq = json::array();
    for (const auto& f : net.pe.sine_freq) freq.push_back(hex_array(f.data(), 2));
    pe["freq"] = freq;
    pe["bias"] = hex_array(net.pe.sine_bias.data(), net.pe.sine_bias.size());
  }
  json hidden = json::array();
  for (const auto& layer : net.hidden) hidden.push_back(layer_to_json(layer));
  return {{"pe", pe}, {"hidden", hidden}, {"readout", layer_to_json(net.readout)}, {"seed", net.seed}};
}

Network network_from_json(const json& j) {
  Network net;
  try {
    const auto& pe = j.at("pe");
    net.pe.kind = encoding_from_string(pe.at("kind").get<std::string>());
    net.pe.omega0 = parse_hex_double(pe.at("omega0").get<std::string>());
    net.pe.l0 = pe.at("l0").get<int>();
    if (net.pe.kind == EncodingKind::Herglotz) {
      for (const auto& a : pe.at("atoms")) {
        HerglotzNeuron h;
        const auto re = read_hex_array(a.at("a_re"), 3, "pe.a_re");
        const auto im = read_hex_array(a.at("a_im"), 3, "pe.a_im");
        const auto w = read_hex_array(a.at("w"), 2, "pe.w");
        const auto b = read_hex_array(a.at("b"), 2, "pe.b");
        h.a = {{re[0], re[1], re[2]}, {im[0], im[1], im[2]}};
        h.w = {w[0], w[1]};
        h.b = {b[0], b[1]};
        net.pe.herglotz.push_back(h);
      }
    } else if (net.pe.kind == EncodingKind::Sine) {
      for (const auto& f : pe.at("freq")) {
        const auto v = read_hex_array(f, 2, "pe.freq");
        net.pe.sine_freq.push_back({v[0], v[1]});
      }
      net.pe.sine_bias = read_hex_array(pe.at("bias"), net.pe.sine_freq.size(), "pe.bias");
    } else if (net.pe.l0 < 0) {
      throw DataError("pe.l0 must be >= 0");
    }
    std::size_t q = 0;
    for (const auto& layer : j.at("hidden")) {
      net.hidden.push_back(layer_from_json(layer, "hidden[" + std::to_string(q++) + "]"));
    }
    net.readout = layer_from_json(j.at("readout"), "readout");
    net.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw DataError(std::string("network: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("network: ") + e.what());
  }
  try {
    net.check_dimensions();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("network: ") + e.what());
  }
  return net;
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  write_json(path, {{"format_version", kFormatVersion},
                    {"model", to_string(ck.model)},
                    {"train_L", ck.train_bandlimit},
                    {"seed", ck.seed},
                    {"standardizer",
                     {{"mean", hex_double(ck.standardizer.mean)},
                      {"stddev", hex_double(ck.standardizer.stddev)}}},
                    {"network", network_to_json(ck.net)}});
}

Checkpoint load_checkpoint(const std::string& path) {
  const json j = read_json(path);
  Checkpoint ck;
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) {
      throw DataError(path + ": unsupported format_version");
    }
    ck.model = model_from_string(j.at("model").get<std::string>());
    ck.train_bandlimit = j.at("train_L").get<int>();
    ck.seed = j.at("seed").get<std::uint64_t>();
    ck.standardizer.mean = parse_hex_double(j.at("standardizer").at("mean").get<std::string>());
    ck.standardizer.stddev = parse_hex_double(j.at("standardizer").at("stddev").get<std::string>());
    ck.net = network_from_json(j.at("network"));
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(path + ": " + e.what());
  }
  if (ck.train_bandlimit < 0 || !(ck.standardizer.stddev > 0.0)) {
    throw DataError(path + ": invalid training metadata");
  }
  return ck;
}

std::string heatmap_bytes(const GridField& field, int height) {
  const auto& g = field.grid;
  if (height <= 0) height = std::max<int>(8, 2 * static_cast<int>(g.n_theta()));
  const int width = 2 * height;
  const std::size_t nt = g.n_theta(), np = g.n_phi();

  std::vector<double> sampled(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    const double theta = std::numbers::pi * (r + 0.5) / height;
    // Bracketing rings, clamped at the caps.
    std::size_t j1 = 0;
    while (j1 < nt && g.theta(j1) < theta) ++j1;
    std::size_t j0 = j1 == 0 ? 0 : j1 - 1;
    if (j1 == nt) j1 = nt - 1;
    double tw = 0.0;
    if (j0 != j1) tw = (theta - g.theta(j0)) / (g.theta(j1) - g.theta(j0));
    for (int c = 0; c < width; ++c) {
      const double pos = (2.0 * std::numbers::pi * (c + 0.5) / width) / g.phi_step();
      const auto k0 = static_cast<std::size_t>(std::floor(pos)) % np;
      const std::size_t k1 = (k0 + 1) % np;
      const double pw = pos - std::floor(pos);
      const auto at = [&](std::size_t j, std::size_t k) { return field.values[g.index(j, k)].real(); };
      const double top = (1 - pw) * at(j0, k0) + pw * at(j0, k1);
      const double bot = (1 - pw) * at(j1, k0) + pw * at(j1, k1);
      sampled[static_cast<std::size_t>(r) * width + c] = (1 - tw) * top + tw * bot;
    }
  }
  // Interpolants are convex combinations of nodes, so the node range is the ramp.
  double lo = field.values[0].real(), hi = lo;
  for (const auto& v : field.values) {
    lo = std::min(lo, v.real());
    hi = std::max(hi, v.real());
  }
  std::string out = "P6\n# format_version: " + std::to_string(kFormatVersion) +
                    "\n# grayscale linear: 0 = " + fmt17(lo) + ", 255 = " + fmt17(hi) +
                    "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  for (double v : sampled) {
    const auto level = static_cast<unsigned char>(
        hi > lo ? std::lround(255.0 * std::clamp((v - lo) / (hi - lo), 0.0, 1.0)) : 128);
    out.append(3, static_cast<char>(level));
  }
  return out;
}

void write_heatmap(const GridField& field, const std::string& path, int height) {
  auto out = open_out(path, true);
  out << heatmap_bytes(field, height);
  finish(out, path);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

json make_manifest(const std::string& command, const std::vector<std::string>& argv,
                   std::uint64_t seed, const json& config) {
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  return {{"format_version", kFormatVersion},
          {"command", command},
          {"argv", argv},
          {"seed", seed},
          {"config", config},
          {"config_hash", hash},
          {"formats",
           {{"coeffs_csv", kFormatVersion},
            {"field_csv", kFormatVersion},
            {"loss_csv", kFormatVersion},
            {"checkpoint", kFormatVersion},
            {"metrics", kFormatVersion},
            {"heatmap", kFormatVersion}}}};
}

}  // namespace hnet
