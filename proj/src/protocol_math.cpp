#include "photoauth/protocol_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "photoauth/errors.hpp"

namespace photoauth {

namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0,1], got " + std::to_string(p));
  }
}

void check_open_probability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError(std::string(name) + " must lie in (0,1), got " + std::to_string(p));
  }
}

void check_barriers(int s_plus, int s_minus) {
  if (!(s_minus < 0 && 0 < s_plus)) {
    throw DomainError("barriers must satisfy S- < 0 < S+, got S+=" + std::to_string(s_plus) +
                      " S-=" + std::to_string(s_minus));
  }
}

// [1 - (1-s)^m] / (m s) for s in [0, 2], m >= 1.
double lemma_core(int m, double s) {
  if (s == 0.0) return 1.0;
  double numerator;
  if (s < 1.0) {
    numerator = -std::expm1(m * std::log1p(-s));
  } else {
    // 1 - s in [-1, 0]: integer power, sign alternates with m.
    numerator = 1.0 - std::pow(1.0 - s, m);
  }
  return numerator / (m * s);
}

// Hits +up before -down for a walk whose down/up step ratio r has log_r = log(r).
double reach_up_first(double log_r, int up, int down) {
  if (log_r == 0.0) return static_cast<double>(down) / (up + down);
  if (log_r > 0.0) {
    // r^{-up} (1 - r^{-down}) / (1 - r^{-(up+down)}); all powers <= 1.
    return std::exp(-up * log_r) * std::expm1(-down * log_r) /
           std::expm1(-(static_cast<double>(up) + down) * log_r);
  }
  const double m = -log_r;
  return std::expm1(-down * m) / std::expm1(-(static_cast<double>(up) + down) * m);
}

double log_step_ratio(double p_step) { return std::log1p(-p_step) - std::log(p_step); }

// ceil/floor that treat values within rounding noise of an integer as that
// integer, so exact ratios such as log(1e-2)/log(10) land where intended.
double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : x;
}

}  // namespace

double lemma_closed_form(int n, double p, double q) {
  if (n < 0) throw DomainError("n must be >= 0");
  check_probability(p, "p");
  check_probability(q, "q");
  return lemma_core(n + 1, p + q);
}

double lemma_brute_force(int n, double p, double q) {
  if (n < 0) throw DomainError("n must be >= 0");
  if (n > kLemmaBruteForceMaxN) {
    throw SizeError("brute-force lemma evaluation limited to n <= " +
                    std::to_string(kLemmaBruteForceMaxN) + ", got " + std::to_string(n));
  }
  check_probability(p, "p");
  check_probability(q, "q");

  std::vector<std::vector<double>> choose(n + 1, std::vector<double>(n + 1, 0.0));
  for (int a = 0; a <= n; ++a) {
    choose[a][0] = 1.0;
    for (int b = 1; b <= a; ++b) choose[a][b] = choose[a - 1][b - 1] + (b < a ? choose[a - 1][b] : 0.0);
  }

  double total = 0.0;
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j <= k && j <= n - k; ++j) {
      total += choose[k][j] * choose[n - k][j] * std::pow(p, j) * std::pow(1.0 - p, k - j) *
               std::pow(q, j) * std::pow(1.0 - q, n - k - j);
    }
  }
  return total / (n + 1);
}

double gamma_sequence(int n, double p, double q) {
  if (n < 0) throw DomainError("n must be >= 0");
  check_probability(p, "p");
  check_probability(q, "q");
  const double s = p + q;
  double prev = 1.0;  // gamma_0
  if (n == 0) return prev;
  double cur = 2.0 - s;  // gamma_1
  for (int i = 2; i <= n; ++i) {
    const double next = (2.0 - s) * cur + (s - 1.0) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double gamma_recursion(int n, double p, double q) { return gamma_sequence(n, p, q) / (n + 1); }

double alice_round_success(int n_spots, double u) {
  if (n_spots < 1) throw DomainError("N must be >= 1, got " + std::to_string(n_spots));
  if (!(u >= 0.0 && u <= 2.0)) throw DomainError("u must lie in [0,2], got " + std::to_string(u));
  return lemma_core(n_spots + 1, u);
}

double eve_round_success(int n_spots) {
  if (n_spots < 1) throw DomainError("N must be >= 1, got " + std::to_string(n_spots));
  return 1.0 / (n_spots + 1);
}

int s_plus_threshold(int n_spots, double p_fp_target) {
  if (n_spots == 1) {
    throw DegenerateError("N = 1 gives Eve an unbiased walk; no finite S+ bounds p_fp");
  }
  if (n_spots < 1) throw DomainError("N must be >= 2, got " + std::to_string(n_spots));
  check_open_probability(p_fp_target, "p_fp");
  return static_cast<int>(std::ceil(snap(-std::log(p_fp_target) / std::log(n_spots))));
}

int s_minus_threshold(double p_alice, double p_fn_target) {
  check_probability(p_alice, "P_A");
  if (!(p_alice > 0.5)) {
    throw DriftError("P_A = " + std::to_string(p_alice) +
                     " <= 1/2: the walk cannot authenticate the legitimate subject");
  }
  check_open_probability(p_fn_target, "p_fn");
  if (p_alice == 1.0) return -1;
  const double log_odds = std::log(p_alice) - std::log1p(-p_alice);
  const double s = std::floor(snap(std::log(p_fn_target) / log_odds));
  return static_cast<int>(std::min(s, -1.0));
}

double absorption_prob_up(double p_step, int s_plus, int s_minus) {
  check_probability(p_step, "step probability");
  check_barriers(s_plus, s_minus);
  if (p_step == 1.0) return 1.0;
  if (p_step == 0.0) return 0.0;
  if (s_plus == 1 && s_minus == -1) return p_step;  // decided by the first step
  if (p_step == 0.5) return reach_up_first(0.0, s_plus, -s_minus);
  return reach_up_first(log_step_ratio(p_step), s_plus, -s_minus);
}

double absorption_prob_down(double p_step, int s_plus, int s_minus) {
  check_probability(p_step, "step probability");
  check_barriers(s_plus, s_minus);
  if (p_step == 1.0) return 0.0;
  if (p_step == 0.0) return 1.0;
  if (s_plus == 1 && s_minus == -1) return 1.0 - p_step;
  if (p_step == 0.5) return reach_up_first(0.0, -s_minus, s_plus);
  return reach_up_first(-log_step_ratio(p_step), -s_minus, s_plus);
}

double eve_false_accept(int n_spots, int s_plus, int s_minus) {
  if (n_spots < 1) throw DomainError("N must be >= 1, got " + std::to_string(n_spots));
  check_barriers(s_plus, s_minus);
  if (n_spots == 1) return static_cast<double>(-s_minus) / (s_plus - s_minus);
  if (s_plus == 1 && s_minus == -1) return eve_round_success(n_spots);
  // N^{-S+} (1 - N^{S-}) / (1 - N^{-(S+ - S-)}). The last factor is a
  // rounded ratio of x <= y, so the result never exceeds pow(N, -S+).
  const double n = n_spots;
  return std::pow(n, -s_plus) * (-std::expm1(s_minus * std::log(n))) /
         (-std::expm1(-(static_cast<double>(s_plus) - s_minus) * std::log(n)));
}

double expected_rounds(double p_alice, int s_plus, int s_minus) {
  check_probability(p_alice, "P_A");
  if (!(p_alice > 0.5)) {
    throw DriftError("P_A = " + std::to_string(p_alice) + " <= 1/2: expected time undefined");
  }
  check_barriers(s_plus, s_minus);
  const double drift = 2.0 * p_alice - 1.0;
  const double down = absorption_prob_down(p_alice, s_plus, s_minus);
  return (s_plus - (static_cast<double>(s_plus) - s_minus) * down) / drift;
}

double expected_rounds_bound(double p_alice, int s_plus) {
  check_probability(p_alice, "P_A");
  if (!(p_alice > 0.5)) {
    throw DriftError("P_A = " + std::to_string(p_alice) + " <= 1/2: expected time undefined");
  }
  return s_plus / (2.0 * p_alice - 1.0);
}

RoundModel RoundModel::make(int n_spots, double u) {
  return RoundModel{n_spots, u, alice_round_success(n_spots, u), eve_round_success(n_spots)};
}

StoppingDesign StoppingDesign::design(const RoundModel& round, double p_fp_target,
                                      double p_fn_target) {
  StoppingDesign d = with_thresholds(round, s_plus_threshold(round.n_spots, p_fp_target),
                                     s_minus_threshold(round.p_alice, p_fn_target));
  d.p_fp_target = p_fp_target;
  d.p_fn_target = p_fn_target;
  return d;
}

StoppingDesign StoppingDesign::with_thresholds(const RoundModel& round, int s_plus, int s_minus) {
  check_barriers(s_plus, s_minus);
  StoppingDesign d{};
  d.s_plus = s_plus;
  d.s_minus = s_minus;
  d.p_fp_exact = eve_false_accept(round.n_spots, s_plus, s_minus);
  d.p_fn_exact = absorption_prob_down(round.p_alice, s_plus, s_minus);
  d.p_fp_target = d.p_fp_exact;
  d.p_fn_target = d.p_fn_exact;
  if (round.p_alice > 0.5) {
    d.t_alice = expected_rounds(round.p_alice, s_plus, s_minus);
    d.t_alice_bound = expected_rounds_bound(round.p_alice, s_plus);
  } else {
    d.t_alice = std::numeric_limits<double>::quiet_NaN();
    d.t_alice_bound = std::numeric_limits<double>::quiet_NaN();
  }
  return d;
}

}  // namespace photoauth
