#include "photoauth/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "photoauth/errors.hpp"

namespace photoauth {

namespace {

double u_at(SourceKind kind, const PerceptionParams& params, double nbar) {
  return miss_and_false_probs(LightSource::of_kind(kind, nbar), params.alpha_high, params.alpha_low,
                              params.k_threshold, AlphaOrdering::relaxed)
      .u;
}

void check_range(double lo, double hi, double cap) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && lo < hi)) {
    throw RangeError("photon range must satisfy 0 <= lo < hi");
  }
  if (hi > cap) {
    throw RangeError("photon range upper end " + std::to_string(hi) + " exceeds the budget cap " +
                     std::to_string(cap));
  }
}

}  // namespace

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

UMinimum minimize_u(SourceKind kind, const PerceptionParams& params, double nbar_lo,
                    double nbar_hi, double resolution, double budget_cap) {
  check_range(nbar_lo, nbar_hi, budget_cap);
  if (!(params.alpha_low <= params.alpha_high)) {
    throw DomainError("alpha_L must not exceed alpha_H");
  }

  UMinimum out{kind, 0.0, 0.0, std::numeric_limits<double>::infinity(), false, {}};
  const auto consider = [&](double nbar) {
    const double u = u_at(kind, params, nbar);
    out.curve.push_back({nbar, u});
    if (u < out.u_min) {
      out.u_min = u;
      out.nbar_grid = nbar;
    }
  };

  if (kind == SourceKind::single_photon) {
    const auto first = static_cast<long>(std::ceil(nbar_lo));
    const auto last = static_cast<long>(std::floor(nbar_hi));
    if (first > last) throw RangeError("photon range contains no integer");
    for (long n = first; n <= last; ++n) consider(static_cast<double>(n));
    out.nbar_opt = out.nbar_grid;
  } else {
    if (!(resolution > 0.0 && resolution <= kMaxCoherentResolution)) {
      throw RangeError("coherent scan resolution must lie in (0, 0.1]");
    }
    const auto steps = static_cast<long>(std::floor((nbar_hi - nbar_lo) / resolution + 1e-9));
    for (long i = 0; i <= steps; ++i) consider(nbar_lo + static_cast<double>(i) * resolution);
    if (nbar_lo + static_cast<double>(steps) * resolution < nbar_hi - 1e-12) consider(nbar_hi);

    const double lo = std::max(nbar_lo, out.nbar_grid - resolution);
    const double hi = std::min(nbar_hi, out.nbar_grid + resolution);
    const double refined = golden_section_minimize(
        [&](double x) { return u_at(kind, params, x); }, lo, hi, 1e-7);
    const double u_refined = u_at(kind, params, refined);
    if (u_refined <= out.u_min) {
      out.nbar_opt = refined;
      out.u_min = u_refined;
    } else {
      out.nbar_opt = out.nbar_grid;
    }
  }
  out.flat = out.u_min > kFlatCurveThreshold;
  return out;
}

TimeMinimum minimize_expected_time(double u, double p_fp, double p_fn, int n_lo, int n_hi) {
  if (!(kMinSpots <= n_lo && n_lo <= n_hi && n_hi <= kMaxSpots)) {
    throw RangeError("spot range must satisfy 2 <= lo <= hi <= 50");
  }
  TimeMinimum out{};
  out.n_opt = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int n = n_lo; n <= n_hi; ++n) {
    const RoundModel round = RoundModel::make(n, u);
    if (!(round.p_alice > 0.5)) {
      out.skipped.push_back(n);
      continue;
    }
    const StoppingDesign d = StoppingDesign::design(round, p_fp, p_fn);
    out.curve.push_back({n, d.s_plus, d.s_minus, round.p_alice, d.t_alice, d.t_alice_bound});
    if (d.t_alice < best) {
      best = d.t_alice;
      out.n_opt = n;
      out.design = d;
    }
  }
  if (out.curve.empty()) {
    throw DriftError("P_A <= 1/2 for every N in range; u = " + std::to_string(u));
  }
  return out;
}

OptimizationResult optimize_protocol(SourceKind kind, const OptimizeRequest& req) {
  OptimizationResult r{kind, req.params, req.p_fp, req.p_fn, {}, {}};
  r.u = minimize_u(kind, req.params, req.nbar_lo, req.nbar_hi, req.resolution, req.budget_cap);
  r.time = minimize_expected_time(r.u.u_min, req.p_fp, req.p_fn, req.n_lo, req.n_hi);
  return r;
}

AdvantageReport advantage_report(const OptimizationResult& c, const OptimizationResult& q) {
  const bool same = c.params.alpha_high == q.params.alpha_high &&
                    c.params.alpha_low == q.params.alpha_low &&
                    c.params.k_threshold == q.params.k_threshold && c.p_fp_target == q.p_fp_target &&
                    c.p_fn_target == q.p_fn_target;
  if (!same) throw DomainError("advantage comparison needs identical alpha_H, alpha_L, K, p_fp, p_fn");
  AdvantageReport a{};
  a.t_coherent = c.t_alice();
  a.t_quantum = q.t_alice();
  a.nbar_coherent = c.nbar_opt();
  a.nbar_quantum = q.nbar_opt();
  a.time_advantage = 1.0 - a.t_quantum / a.t_coherent;
  a.photon_advantage = 1.0 - q.photons_per_auth() / c.photons_per_auth();
  return a;
}

}  // namespace photoauth
