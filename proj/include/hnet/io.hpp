#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hnet/network.hpp"
#include "hnet/sh_transform.hpp"
#include "hnet/training.hpp"

namespace hnet {

inline constexpr int kFormatVersion = 1;

// Malformed or unreadable input; the message carries file and line.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SynthSpec {
  int bandlimit = 20;
  double p = 2.0;
  std::uint64_t seed = 0;
};

/// Random real field with S(l) proportional to (1 + l)^(-p), exactly
/// bandlimited at spec.bandlimit.
SHCoeffs synth_field(const SynthSpec& spec);

/// `l,m,re,im` with 17 significant digits.
void write_coeffs_csv(const std::string& path, const SHCoeffs& c);
std::string coeffs_csv(const SHCoeffs& c);
/// Bandlimit is the largest l present; absent entries are zero.
SHCoeffs read_coeffs_csv(const std::string& path);

/// `theta,phi,value` (real part) per node.
void write_field_csv(const std::string& path, const GridField& f);

/// `epoch,mse`.
void write_loss_csv(const std::string& path, const std::vector<double>& history);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

// Hex-float text ("%a") so doubles survive a round trip bit for bit.
std::string hex_double(double v);
double parse_hex_double(const std::string& s);

struct Checkpoint {
  ModelKind model = ModelKind::Hnet;
  Network net;
  Standardizer standardizer;
  int train_bandlimit = 0;
  std::uint64_t seed = 0;
};

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

void save_checkpoint(const std::string& path, const Checkpoint& ck);
/// Throws DataError on malformed content or inconsistent dimensions.
Checkpoint load_checkpoint(const std::string& path);

/// Equirectangular grayscale P6 image of the real part, height rows and
/// 2 * height columns, bilinear in (theta, phi) between grid nodes and
/// clamped to the outermost rings. Black is the minimum, white the maximum;
/// a constant field maps to mid gray. The ramp is recorded in a header comment.
void write_heatmap(const GridField& field, const std::string& path, int height = 0);
std::string heatmap_bytes(const GridField& field, int height = 0);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

/// Command, argv, seed, FNV-1a hash of the canonical config dump and the
/// file format versions.
nlohmann::json make_manifest(const std::string& command, const std::vector<std::string>& argv,
                             std::uint64_t seed, const nlohmann::json& config);

}  // namespace hnet
