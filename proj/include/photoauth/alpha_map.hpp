#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace photoauth {

/// Grid of per-spot transmission values; the subject's fingerprint.
/// Immutable once built. Spots are addressed row-major by flat index.
class AlphaMap {
 public:
  /// Throws InvariantError on a bad size, a missing value or alpha outside [0,1].
  AlphaMap(int rows, int cols, std::vector<double> alphas, std::string subject_id);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return alphas_.size(); }
  const std::string& subject_id() const noexcept { return subject_id_; }

  double at(int row, int col) const;
  double alpha(std::size_t flat_index) const { return alphas_.at(flat_index); }
  const std::vector<double>& alphas() const noexcept { return alphas_; }

  int row_of(std::size_t flat_index) const noexcept { return static_cast<int>(flat_index) / cols_; }
  int col_of(std::size_t flat_index) const noexcept { return static_cast<int>(flat_index) % cols_; }

  friend bool operator==(const AlphaMap&, const AlphaMap&) = default;

 private:
  int rows_;
  int cols_;
  std::vector<double> alphas_;
  std::string subject_id_;
};

enum class SpotClass { high, low, excluded };

/// High/low partition of an AlphaMap. Spots strictly between the two
/// thresholds are excluded from play. Representatives are class means.
struct ClassifiedMap {
  AlphaMap source;
  double theta_high;
  double theta_low;
  std::vector<std::size_t> high_spots;
  std::vector<std::size_t> low_spots;
  double alpha_high_rep;
  double alpha_low_rep;

  SpotClass class_of(std::size_t flat_index) const;
};

/// Throws DomainError unless theta_low < theta_high, and
/// InsufficientSpotsError if either class has fewer than min_per_class spots.
ClassifiedMap classify(const AlphaMap& map, double theta_high, double theta_low,
                       std::size_t min_per_class = 1);

struct SyntheticMapParams {
  int rows = 5;
  int cols = 5;
  double alpha_high_mean = 0.16;
  double alpha_low_mean = 0.04;
  double jitter = 0.0;
  double fraction_high = 0.5;
  std::uint64_t seed = 0;
  std::string subject_id = "synthetic";
};

/// Each spot is high with probability fraction_high; its alpha is uniform on
/// mean +- jitter, clamped to [0,1]. Fully determined by the seed.
AlphaMap generate_synthetic(const SyntheticMapParams& params);

/// Two-class checkerboard: spots with (row + col) even get alpha_high, the
/// rest alpha_low. A side of s gives ceil(s^2/2) high and floor(s^2/2) low.
AlphaMap checkerboard_map(int side, double alpha_high, double alpha_low,
                          std::string subject_id = "ideal");

/// Text format:
///   alphamap v1
///   subject <id>
///   grid <rows> <cols>
///   spot <row> <col> <alpha>     (rows*cols lines, row-major)
/// Lines starting with '#' are comments. Alphas are written in shortest
/// round-trip form, so save/load is bit-exact.
void save(const AlphaMap& map, std::ostream& out);
void save(const AlphaMap& map, const std::string& path);

/// Throws ParseError (with line number) on malformed input and
/// InvariantError naming the spot on an out-of-range alpha.
AlphaMap load(std::istream& in);
AlphaMap load(const std::string& path);

}  // namespace photoauth
