#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "kslab/solver.hpp"

namespace kslab {

/// Bad configuration text. `line()` is 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line);
  int line() const { return line_; }

 private:
  int line_;
};

enum class InitialKind { Cosine, Random, Constant };

/// u0 = baseline + amplitude·shape, with shape the mean of cos(2π·mode·x_a/L_a)
/// over axes (cosine) or seeded band-limited noise scaled to max |shape| = 1
/// (random).
struct InitialData {
  InitialKind kind = InitialKind::Cosine;
  double baseline = 1.0;
  double amplitude = 0.5;
  int mode = 1;
};

struct RunConfig {
  SimConfig sim;
  InitialData initial;
  /// Write a checkpoint every this many steps; 0 disables.
  int checkpoint_every = 0;
  /// Normalised "section.key=value" lines in a fixed order; hashed for checkpoints.
  std::string canonical;
};

/// Parses the sectioned key=value format. Sections [model], [grid], [time],
/// [motility] and [output] are required, [initial] is optional. `#` and `;`
/// start comments. Unknown sections or keys are errors.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Builds the motility named `family` ("power_law", "exponential",
/// "shifted_power", "constant") from its parameter.
MotilityFunction make_motility(const std::string& family, double parameter);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::uint64_t config_hash(const RunConfig& cfg);
std::string hex64(std::uint64_t x);

/// Deterministic in (cfg, seed) on every platform: the random kind draws its
/// coefficients from raw std::mt19937_64 output, 53 bits mapped to [-1, 1).
Field make_initial_data(const RunConfig& cfg, std::uint64_t seed);

}  // namespace kslab
