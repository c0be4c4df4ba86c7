// Detected-photon statistics at the retina for coherent and single-photon
// stimuli, and the see / not-see probabilities derived from them.
//
// A pulse carrying photons toward a retinal spot is thinned by the spot's
// transmission alpha (optics plus photoreceptor efficiency). Coherent light
// has a Poissonian photon number, so the detected count is Poisson(alpha*nbar).
// A source emitting exactly n photons gives a Binomial(n, alpha) detected
// count. Both have mean alpha*nbar; the binomial variance is smaller by the
// factor (1 - alpha). A spot is perceived when the detected count reaches
// the threshold K.
#pragma once

#include <cstddef>
#include <variant>
#include <vector>

namespace photoauth {

enum class SourceKind { coherent, single_photon };

const char* to_string(SourceKind kind) noexcept;

/// Visual summation window and the photon budget it supports per stimulus.
/// Neither enters any probability; the budget caps parameter sweeps.
inline constexpr double kSummationWindowSeconds = 0.4;
inline constexpr double kPhotonBudgetCap = 200.0;

class LightSource {
 public:
  struct Coherent {
    double nbar;
  };
  struct SinglePhoton {
    int n_exact;
  };

  static LightSource coherent(double nbar);
  static LightSource single_photon(int n_exact);
  /// Builds a source of the given kind; for single-photon sources the budget
  /// must be a non-negative integer value.
  static LightSource of_kind(SourceKind kind, double budget);

  SourceKind kind() const noexcept;
  /// Mean photons per pulse incident on the cornea.
  double mean_photons() const noexcept;

  const std::variant<Coherent, SinglePhoton>& variant() const noexcept { return v_; }

 private:
  explicit LightSource(std::variant<Coherent, SinglePhoton> v) : v_(v) {}
  std::variant<Coherent, SinglePhoton> v_;
};

struct PerceptionModel {
  int k_threshold = 6;

  /// Throws DomainError when k_threshold < 0.
  void validate() const;
};

/// Detected-photon pmf. Coherent pmfs are truncated once the cumulative
/// mass passes 1 - kTruncationTail; `mean` and `variance` are the exact
/// moments of the untruncated distribution.
struct DetectionDistribution {
  static constexpr double kTruncationTail = 1e-12;

  std::vector<double> pmf;
  double mean = 0.0;
  double variance = 0.0;

  std::size_t truncation_point() const noexcept { return pmf.size(); }
};

double coherent_detect_pmf(double alpha, double nbar, int n);
double single_photon_detect_pmf(double alpha, int n_exact, int n);

/// P[detected < k]. Zero for k <= 0.
double detect_below(const LightSource& source, double alpha, int k);

/// P[detected >= k]; exactly 1 for k <= 0.
double p_see(const LightSource& source, double alpha, int k);

DetectionDistribution detection_distribution(const LightSource& source, double alpha);

/// Per-spot error rates for Alice: p_high_miss = P[detect < K | alpha_H],
/// p_low_false = P[detect >= K | alpha_L], u = their sum.
struct ErrorRates {
  double p_high_miss;
  double p_low_false;
  double u;
};

enum class AlphaOrdering {
  strict,   // alpha_L < alpha_H required
  relaxed,  // alpha_L == alpha_H admitted (validation of the u == 1 identity)
};

ErrorRates miss_and_false_probs(const LightSource& source, double alpha_high, double alpha_low,
                                int k, AlphaOrdering ordering = AlphaOrdering::strict);

/// log(n!) for n >= 0; table-backed for small n, Stirling series beyond.
double log_factorial(int n);

}  // namespace photoauth
