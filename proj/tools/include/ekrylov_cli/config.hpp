#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <ekrylov/ekrylov.hpp>

namespace ekrylov::cli {

/// Every run parameter of the command-line tool. Keys are addressed as
/// "section.name", both in config files and through `set`.
struct RunConfig {
  // [distribution]
  std::string family = "gaussian";
  double mean = 0.0;
  double sigma = 1.0;
  double q = 0.0;
  /// `omega,g` CSV for family = discrete.
  std::string ensemble;
  /// Number of spins to sample from a continuous family (0: use the family directly).
  int spins = 0;
  std::uint64_t seed = 1;

  // [chain]
  std::string mode = "ensemble-only";
  /// auto | closed-form | hankel | stieltjes
  std::string route = "auto";
  double omega_c = 0.0;
  double g_eff = 1.0;
  int M = 128;

  // [time]
  double t_max = 10.0;
  int points = 400;
  int initial = 1;
  /// eig | laguerre | spectral
  std::string method = "eig";
  /// sigma | absolute
  std::string units = "sigma";

  // [metrics]
  int r_max = 40;
  std::vector<double> targets{0.5, 0.9};
  std::vector<std::pair<int, int>> pairs{{1, 1}, {1, 2}};

  // [check]
  double tolerance = 1e-9;
  /// Number of leading b_n compared against the closed form in oracle-compare.
  int orders = 6;
  /// lanczos | closed-form
  std::string against = "lanczos";

  // [output]
  std::string out = "out";
};

/// Sets one key ("section.name") from its text form; throws InvalidArgument.
void set(RunConfig& config, const std::string& key, const std::string& value);

/// All keys in canonical order.
const std::vector<std::string>& config_keys();

/// Canonical INI text: fixed section and key order, shortest round-trip numbers.
std::string canonical_text(const RunConfig& config);

/// Parses INI text (sections + key = value, '#' or ';' comments).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// FNV-1a 64-bit hash of the canonical text with the output directory
/// blanked, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Distribution described by the config (sampled or loaded when requested).
SpectralDistribution make_distribution(const RunConfig& config);

}  // namespace ekrylov::cli
