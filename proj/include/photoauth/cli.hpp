#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace photoauth::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitParse = 3;

/// Shared experiment settings. Loaded from a `key = value` file and then
/// overridden by explicit flags; validated once merged.
struct RunConfig {
  int k_threshold = 6;
  double alpha_high = 0.16;
  double alpha_low = 0.04;
  double theta_high = 0.10;
  double theta_low = 0.05;
  double p_fp = 1e-10;
  double p_fn = 1e-6;
  double photon_budget_cap = 200.0;
  std::uint64_t master_seed = 0;
  std::string output_path;

  /// Throws DomainError on any out-of-domain field.
  void validate() const;
};

/// Keys: k_threshold, alpha_H, alpha_L, theta_H, theta_L, p_fp, p_fn,
/// photon_budget_cap, master_seed, output_path. '#' starts a comment.
/// Throws ParseError on unknown keys or malformed values.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Runs one command line (without the program name). Reads '-' inputs from
/// `in`; writes results to `out` unless --output names a file.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace photoauth::cli
