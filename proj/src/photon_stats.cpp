#include "photoauth/photon_stats.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "photoauth/errors.hpp"

namespace photoauth {

namespace {

constexpr int kLogFactorialTableSize = 4096;

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in [0,1], got " + std::to_string(alpha));
  }
}

void check_nbar(double nbar) {
  if (!std::isfinite(nbar) || nbar < 0.0) {
    throw DomainError("mean photon number must be finite and >= 0, got " + std::to_string(nbar));
  }
}

double poisson_log_term(double lambda, int n) {
  return n * std::log(lambda) - lambda - log_factorial(n);
}

// P[Pois(lambda) < k], k >= 1.
double poisson_below(double lambda, int k) {
  if (lambda == 0.0) return 1.0;
  if (lambda < k) {
    // Upper tail is the small side: sum it directly for relative accuracy.
    double term = std::exp(poisson_log_term(lambda, k));
    double tail = 0.0;
    for (int n = k; term > 0.0; ++n) {
      tail += term;
      if (term < tail * 1e-18) break;
      term *= lambda / (n + 1);
    }
    return 1.0 - tail;
  }
  double term = lambda < 700.0 ? std::exp(-lambda) : 0.0;
  double sum = 0.0;
  for (int n = 0; n < k; ++n) {
    if (lambda >= 700.0) term = std::exp(poisson_log_term(lambda, n));
    sum += term;
    term *= lambda / (n + 1);
  }
  return sum;
}

double binomial_log_pmf(double alpha, int trials, int n) {
  return log_factorial(trials) - log_factorial(n) - log_factorial(trials - n) +
         n * std::log(alpha) + (trials - n) * std::log1p(-alpha);
}

// P[Bin(trials, alpha) < k], k >= 1.
double binomial_below(double alpha, int trials, int k) {
  if (k > trials) return 1.0;
  if (alpha == 0.0) return 1.0;
  if (alpha == 1.0) return 0.0;  // all mass at trials >= k
  const double odds = alpha / (1.0 - alpha);
  if (alpha * trials < k) {
    double term = std::exp(binomial_log_pmf(alpha, trials, k));
    double tail = 0.0;
    for (int n = k; n <= trials; ++n) {
      tail += term;
      if (term < tail * 1e-18) break;
      term *= odds * (trials - n) / (n + 1);
    }
    return 1.0 - tail;
  }
  double sum = 0.0;
  for (int n = 0; n < k; ++n) sum += std::exp(binomial_log_pmf(alpha, trials, n));
  return sum;
}

}  // namespace

const char* to_string(SourceKind kind) noexcept {
  return kind == SourceKind::coherent ? "coherent" : "single_photon";
}

LightSource LightSource::coherent(double nbar) {
  check_nbar(nbar);
  return LightSource(Coherent{nbar});
}

LightSource LightSource::single_photon(int n_exact) {
  if (n_exact < 0) {
    throw DomainError("photon count must be >= 0, got " + std::to_string(n_exact));
  }
  return LightSource(SinglePhoton{n_exact});
}

LightSource LightSource::of_kind(SourceKind kind, double budget) {
  if (kind == SourceKind::coherent) return coherent(budget);
  check_nbar(budget);
  if (budget != std::floor(budget) || budget > std::numeric_limits<int>::max()) {
    throw DomainError("single-photon budget must be an integer, got " + std::to_string(budget));
  }
  return single_photon(static_cast<int>(budget));
}

SourceKind LightSource::kind() const noexcept {
  return std::holds_alternative<Coherent>(v_) ? SourceKind::coherent : SourceKind::single_photon;
}

double LightSource::mean_photons() const noexcept {
  if (const auto* c = std::get_if<Coherent>(&v_)) return c->nbar;
  return static_cast<double>(std::get<SinglePhoton>(v_).n_exact);
}

void PerceptionModel::validate() const {
  if (k_threshold < 0) {
    throw DomainError("perception threshold K must be >= 0, got " + std::to_string(k_threshold));
  }
}

double log_factorial(int n) {
  if (n < 0) throw DomainError("log_factorial of negative argument");
  static const auto table = [] {
    std::array<double, kLogFactorialTableSize> t{};
    for (int i = 0; i < kLogFactorialTableSize; ++i) t[i] = std::lgamma(i + 1.0);
    return t;
  }();
  if (n < kLogFactorialTableSize) return table[n];
  const double x = n;
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return x * std::log(x) - x + 0.5 * std::log(2.0 * M_PI * x) +
         inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
}

double coherent_detect_pmf(double alpha, double nbar, int n) {
  check_alpha(alpha);
  check_nbar(nbar);
  if (n < 0) return 0.0;
  const double lambda = alpha * nbar;
  if (lambda == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(poisson_log_term(lambda, n));
}

double single_photon_detect_pmf(double alpha, int n_exact, int n) {
  check_alpha(alpha);
  if (n_exact < 0) throw DomainError("photon count must be >= 0");
  if (n < 0 || n > n_exact) return 0.0;
  if (alpha == 0.0) return n == 0 ? 1.0 : 0.0;
  if (alpha == 1.0) return n == n_exact ? 1.0 : 0.0;
  return std::exp(binomial_log_pmf(alpha, n_exact, n));
}

double detect_below(const LightSource& source, double alpha, int k) {
  check_alpha(alpha);
  if (k <= 0) return 0.0;
  if (const auto* c = std::get_if<LightSource::Coherent>(&source.variant())) {
    return poisson_below(alpha * c->nbar, k);
  }
  return binomial_below(alpha, std::get<LightSource::SinglePhoton>(source.variant()).n_exact, k);
}

double p_see(const LightSource& source, double alpha, int k) {
  return 1.0 - detect_below(source, alpha, k);
}

DetectionDistribution detection_distribution(const LightSource& source, double alpha) {
  check_alpha(alpha);
  DetectionDistribution dist;
  if (const auto* c = std::get_if<LightSource::Coherent>(&source.variant())) {
    const double lambda = alpha * c->nbar;
    dist.mean = lambda;
    dist.variance = lambda;
    if (lambda == 0.0) {
      dist.pmf = {1.0};
      return dist;
    }
    // Past the mode, stop once the cumulative mass clears 1 - 1e-12 and the
    // terms are too small to move the second moment at the 1e-9 level.
    double cumulative = 0.0;
    for (int n = 0;; ++n) {
      const double term = std::exp(poisson_log_term(lambda, n));
      dist.pmf.push_back(term);
      cumulative += term;
      if (n >= lambda && cumulative > 1.0 - DetectionDistribution::kTruncationTail &&
          term < 1e-18) {
        break;
      }
    }
    return dist;
  }
  const int trials = std::get<LightSource::SinglePhoton>(source.variant()).n_exact;
  dist.mean = alpha * trials;
  dist.variance = alpha * (1.0 - alpha) * trials;
  dist.pmf.resize(static_cast<std::size_t>(trials) + 1);
  for (int n = 0; n <= trials; ++n) dist.pmf[n] = single_photon_detect_pmf(alpha, trials, n);
  return dist;
}

ErrorRates miss_and_false_probs(const LightSource& source, double alpha_high, double alpha_low,
                                int k, AlphaOrdering ordering) {
  check_alpha(alpha_high);
  check_alpha(alpha_low);
  if (k < 0) throw DomainError("perception threshold K must be >= 0");
  const bool ordered = ordering == AlphaOrdering::strict ? alpha_low < alpha_high
                                                         : alpha_low <= alpha_high;
  if (!ordered) {
    throw DomainError("alpha_L must be below alpha_H (got alpha_H=" + std::to_string(alpha_high) +
                      ", alpha_L=" + std::to_string(alpha_low) + ")");
  }
  const double below_high = detect_below(source, alpha_high, k);
  const double below_low = detect_below(source, alpha_low, k);
  // 1 + (a - b) keeps u exactly 1 when both spots share a distribution.
  return ErrorRates{below_high, 1.0 - below_low, 1.0 + (below_high - below_low)};
}

}  // namespace photoauth
