#include "photoauth/alpha_map.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string_view>

#include "photoauth/errors.hpp"
#include "photoauth/rng.hpp"

namespace photoauth {

namespace {

constexpr std::string_view kHeader = "alphamap v1";
constexpr long long kMaxSpots = 1'000'000;

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <class T>
std::optional<T> parse_number(std::string_view token) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::string spot_name(int row, int col) {
  return "spot (" + std::to_string(row) + "," + std::to_string(col) + ")";
}

void check_subject_id(const std::string& id) {
  if (id.empty() || trim(id) != id || id.find_first_of("\r\n") != std::string::npos) {
    throw InvariantError("subject id must be non-empty, on one line, without surrounding whitespace: '" + id + "'");
  }
}

// Reads the next line that is neither blank nor a comment.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::optional<std::string_view> next() {
    while (std::getline(in_, buffer_)) {
      ++line_;
      const std::string_view t = trim(buffer_);
      if (t.empty() || t.front() == '#') continue;
      return t;
    }
    ++line_;  // report the position just past the end
    return std::nullopt;
  }

  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::string buffer_;
  std::size_t line_ = 0;
};

}  // namespace

AlphaMap::AlphaMap(int rows, int cols, std::vector<double> alphas, std::string subject_id)
    : rows_(rows), cols_(cols), alphas_(std::move(alphas)), subject_id_(std::move(subject_id)) {
  if (rows_ < 1 || cols_ < 1) {
    throw InvariantError("grid must be at least 1x1, got " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
  }
  if (static_cast<long long>(rows_) * cols_ != static_cast<long long>(alphas_.size())) {
    throw InvariantError("grid " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                         " is not fully populated (" + std::to_string(alphas_.size()) + " values)");
  }
  check_subject_id(subject_id_);
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    const double a = alphas_[i];
    if (!(a >= 0.0 && a <= 1.0)) {
      throw InvariantError(spot_name(row_of(i), col_of(i)) + " has alpha " + std::to_string(a) +
                           " outside [0,1]");
    }
  }
}

double AlphaMap::at(int row, int col) const {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_) {
    throw DomainError(spot_name(row, col) + " is outside the grid");
  }
  return alphas_[static_cast<std::size_t>(row) * cols_ + col];
}

SpotClass ClassifiedMap::class_of(std::size_t flat_index) const {
  const double a = source.alpha(flat_index);
  if (a >= theta_high) return SpotClass::high;
  if (a <= theta_low) return SpotClass::low;
  return SpotClass::excluded;
}

ClassifiedMap classify(const AlphaMap& map, double theta_high, double theta_low,
                       std::size_t min_per_class) {
  if (!(std::isfinite(theta_high) && std::isfinite(theta_low) && theta_low < theta_high)) {
    throw DomainError("classification thresholds must satisfy theta_L < theta_H");
  }
  ClassifiedMap out{map, theta_high, theta_low, {}, {}, 0.0, 0.0};
  double sum_high = 0.0;
  double sum_low = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double a = map.alpha(i);
    if (a >= theta_high) {
      out.high_spots.push_back(i);
      sum_high += a;
    } else if (a <= theta_low) {
      out.low_spots.push_back(i);
      sum_low += a;
    }
  }
  if (out.high_spots.size() < min_per_class || out.low_spots.size() < min_per_class) {
    throw InsufficientSpotsError(out.high_spots.size(), out.low_spots.size(), min_per_class);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.alpha_high_rep = out.high_spots.empty() ? nan : sum_high / out.high_spots.size();
  out.alpha_low_rep = out.low_spots.empty() ? nan : sum_low / out.low_spots.size();
  return out;
}

AlphaMap generate_synthetic(const SyntheticMapParams& p) {
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(p.alpha_high_mean) || !unit(p.alpha_low_mean)) {
    throw DomainError("synthetic map means must lie in [0,1]");
  }
  if (!(p.jitter >= 0.0 && std::isfinite(p.jitter))) throw DomainError("jitter must be >= 0");
  if (!unit(p.fraction_high)) throw DomainError("fraction_high must lie in [0,1]");
  if (p.rows < 1 || p.cols < 1 || static_cast<long long>(p.rows) * p.cols > kMaxSpots) {
    throw DomainError("synthetic map grid size out of range");
  }

  SplitMix64 rng(derive_seed(p.seed, 0));
  std::vector<double> alphas(static_cast<std::size_t>(p.rows) * p.cols);
  for (double& a : alphas) {
    const bool high = rng.uniform01() < p.fraction_high;
    const double mean = high ? p.alpha_high_mean : p.alpha_low_mean;
    a = std::clamp(mean + p.jitter * (2.0 * rng.uniform01() - 1.0), 0.0, 1.0);
  }
  return AlphaMap(p.rows, p.cols, std::move(alphas), p.subject_id);
}

AlphaMap checkerboard_map(int side, double alpha_high, double alpha_low, std::string subject_id) {
  if (side < 1 || static_cast<long long>(side) * side > kMaxSpots) {
    throw DomainError("checkerboard side out of range");
  }
  std::vector<double> alphas(static_cast<std::size_t>(side) * side);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      alphas[static_cast<std::size_t>(r) * side + c] = (r + c) % 2 == 0 ? alpha_high : alpha_low;
    }
  }
  return AlphaMap(side, side, std::move(alphas), std::move(subject_id));
}

void save(const AlphaMap& map, std::ostream& out) {
  out << kHeader << '\n'
      << "subject " << map.subject_id() << '\n'
      << "grid " << map.rows() << ' ' << map.cols() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto res = std::to_chars(buf, buf + sizeof buf, map.alpha(i));
    out << "spot " << map.row_of(i) << ' ' << map.col_of(i) << ' '
        << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
}

void save(const AlphaMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  save(map, out);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

AlphaMap load(std::istream& in) {
  LineReader reader(in);

  auto line = reader.next();
  if (!line || *line != kHeader) {
    throw ParseError(reader.line(), "expected '" + std::string(kHeader) + "'");
  }

  line = reader.next();
  if (!line || line->substr(0, 8) != "subject ") {
    throw ParseError(reader.line(), "expected 'subject <id>'");
  }
  const std::string subject(trim(line->substr(8)));
  if (subject.empty()) throw ParseError(reader.line(), "empty subject id");

  line = reader.next();
  const auto grid = line ? split_ws(*line) : std::vector<std::string_view>{};
  if (grid.size() != 3 || grid[0] != "grid") {
    throw ParseError(reader.line(), "expected 'grid <rows> <cols>'");
  }
  const auto rows = parse_number<int>(grid[1]);
  const auto cols = parse_number<int>(grid[2]);
  if (!rows || !cols || *rows < 1 || *cols < 1 ||
      static_cast<long long>(*rows) * *cols > kMaxSpots) {
    throw ParseError(reader.line(), "invalid grid dimensions");
  }

  std::vector<double> alphas;
  alphas.reserve(static_cast<std::size_t>(*rows) * *cols);
  for (int r = 0; r < *rows; ++r) {
    for (int c = 0; c < *cols; ++c) {
      line = reader.next();
      const std::string expected = "expected 'spot " + std::to_string(r) + " " + std::to_string(c) + " <alpha>'";
      if (!line) throw ParseError(reader.line(), expected);
      const auto tok = split_ws(*line);
      if (tok.size() != 4 || tok[0] != "spot" || parse_number<int>(tok[1]) != r ||
          parse_number<int>(tok[2]) != c) {
        throw ParseError(reader.line(), expected);
      }
      const auto alpha = parse_number<double>(tok[3]);
      if (!alpha) throw ParseError(reader.line(), "malformed alpha '" + std::string(tok[3]) + "'");
      if (!(*alpha >= 0.0 && *alpha <= 1.0)) {
        throw InvariantError(spot_name(r, c) + " (line " + std::to_string(reader.line()) +
                             ") has alpha " + std::string(tok[3]) + " outside [0,1]");
      }
      alphas.push_back(*alpha);
    }
  }
  if (reader.next()) throw ParseError(reader.line(), "unexpected content after the last spot");
  return AlphaMap(*rows, *cols, std::move(alphas), subject);
}

AlphaMap load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return load(in);
}

}  // namespace photoauth
