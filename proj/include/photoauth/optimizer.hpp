// Protocol design by two one-dimensional searches: first the photon budget
// that minimizes the per-spot error sum u, then the number of lit spots N
// that minimizes Alice's expected interrogation count at that u.
#pragma once

#include <functional>
#include <vector>

#include "photoauth/photon_stats.hpp"
#include "photoauth/protocol_math.hpp"

namespace photoauth {

/// Default session error targets. They are inferred rather than given:
/// p_fp = 1e-10 is the round value that yields S+ = 13 at N = 6.
inline constexpr double kDefaultFalsePositive = 1e-10;
inline constexpr double kDefaultFalseNegative = 1e-6;

/// Golden-section search for a minimum of f on [lo, hi], stopping once the
/// bracket is narrower than tol.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol);

struct PerceptionParams {
  double alpha_high = 0.16;
  double alpha_low = 0.04;
  int k_threshold = 6;
};

struct UCurvePoint {
  double nbar;
  double u;
};

struct UMinimum {
  SourceKind kind;
  double nbar_opt;     // integer-valued for single-photon sources
  double nbar_grid;    // best grid point before refinement
  double u_min;
  bool flat;           // u_min > kFlatCurveThreshold: alpha_H and alpha_L barely differ
  std::vector<UCurvePoint> curve;
};

inline constexpr double kFlatCurveThreshold = 0.99;
inline constexpr double kMaxCoherentResolution = 0.1;

/// Coherent: grid scan at `resolution` (<= 0.1) then golden-section
/// refinement within one grid step. Single-photon: every integer in range.
/// Throws RangeError for a bad range, a range above `budget_cap`, or a
/// coarse resolution.
UMinimum minimize_u(SourceKind kind, const PerceptionParams& params, double nbar_lo,
                    double nbar_hi, double resolution = kMaxCoherentResolution,
                    double budget_cap = kPhotonBudgetCap);

struct TimeCurvePoint {
  int n_spots;
  int s_plus;
  int s_minus;
  double p_alice;
  double t_alice;        // exact
  double t_alice_bound;  // S+/(2P_A - 1)
};

struct TimeMinimum {
  int n_opt;
  StoppingDesign design;
  std::vector<TimeCurvePoint> curve;
  std::vector<int> skipped;  // N with P_A <= 1/2
};

inline constexpr int kMinSpots = 2;
inline constexpr int kMaxSpots = 50;

/// Sweeps N over [n_lo, n_hi] (within {2..50}). Throws DriftError if every N
/// is skipped.
TimeMinimum minimize_expected_time(double u, double p_fp, double p_fn, int n_lo, int n_hi);

struct OptimizationResult {
  SourceKind kind;
  PerceptionParams params;
  double p_fp_target;
  double p_fn_target;
  UMinimum u;
  TimeMinimum time;

  double nbar_opt() const noexcept { return u.nbar_opt; }
  double u_min() const noexcept { return u.u_min; }
  int n_opt() const noexcept { return time.n_opt; }
  double t_alice() const noexcept { return time.design.t_alice; }
  /// Rounds times photons per spot per pulse; N photons-per-round cancel
  /// when both sources settle on the same N.
  double photons_per_auth() const noexcept { return t_alice() * nbar_opt(); }
};

struct OptimizeRequest {
  PerceptionParams params;
  double p_fp = kDefaultFalsePositive;
  double p_fn = kDefaultFalseNegative;
  double nbar_lo = 1.0;
  double nbar_hi = kPhotonBudgetCap;
  double resolution = kMaxCoherentResolution;
  double budget_cap = kPhotonBudgetCap;
  int n_lo = kMinSpots;
  int n_hi = 20;
};

OptimizationResult optimize_protocol(SourceKind kind, const OptimizeRequest& request);

struct AdvantageReport {
  double time_advantage;    // 1 - T_q / T_c
  double photon_advantage;  // 1 - T_q nbar_q / (T_c nbar_c)
  double t_coherent;
  double t_quantum;
  double nbar_coherent;
  double nbar_quantum;
};

/// Throws DomainError unless both results share alpha_H, alpha_L, K, p_fp, p_fn.
AdvantageReport advantage_report(const OptimizationResult& coherent,
                                 const OptimizationResult& quantum);

}  // namespace photoauth
