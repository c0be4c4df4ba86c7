// Closed-form statistics of the interrogation protocol.
//
// One round lights N spots, H of them high-alpha with H uniform on {0..N},
// and accepts the answer iff it equals H. Alice errs on a high spot with
// probability p_H and on a low spot with p_L; with u = p_H + p_L her round
// success is [1 - (1-u)^(N+1)] / ((N+1) u). Any impostor answer independent
// of H is right with probability 1/(N+1).
//
// The session score S is a +-1 walk from 0 absorbed at S+ > 0 (accept) or
// S- < 0 (reject); absorption probabilities and expected duration follow
// from the gambler's ruin.
#pragma once

namespace photoauth {

/// P[E_fn = E_fp] for H uniform on {0..n}, E_fn ~ Bin(H, p), E_fp ~ Bin(n-H, q).
double lemma_closed_form(int n, double p, double q);

/// Same probability by direct evaluation of the double sum over H = k and
/// E_fn = E_fp = j. Throws SizeError for n > kLemmaBruteForceMaxN.
inline constexpr int kLemmaBruteForceMaxN = 14;
double lemma_brute_force(int n, double p, double q);

/// gamma_n from the three-term recurrence
///   gamma_n = (2-p-q) gamma_{n-1} + (p+q-1) gamma_{n-2},
///   gamma_0 = 1, gamma_1 = 2-(p+q).
double gamma_sequence(int n, double p, double q);

/// gamma_n / (n+1), i.e. the lemma probability via the recurrence.
double gamma_recursion(int n, double p, double q);

/// Alice's per-round success P_A(N, u); u in [0, 2], limit 1 at u = 0.
double alice_round_success(int n_spots, double u);

/// 1/(N+1).
double eve_round_success(int n_spots);

/// Smallest S+ with N^{-S+} <= p_fp. DegenerateError for N = 1.
int s_plus_threshold(int n_spots, double p_fp_target);

/// Largest S- with (P_A/(1-P_A))^{S-} <= p_fn, never above -1.
/// DriftError unless p_alice > 1/2.
int s_minus_threshold(double p_alice, double p_fn_target);

/// Probability that a walk from 0 with up-step probability p_step reaches
/// s_plus before s_minus. Exact; p_step = 1/2 uses the linear limit.
double absorption_prob_up(double p_step, int s_plus, int s_minus);
/// Complementary absorption at s_minus, computed on the mirrored walk.
double absorption_prob_down(double p_step, int s_plus, int s_minus);

/// Impostor acceptance: absorption_prob_up at p = 1/(N+1), evaluated from
/// the integer step ratio N so that it never rounds above N^{-S+}.
double eve_false_accept(int n_spots, int s_plus, int s_minus);

/// Exact E[tau] for the walk absorbed at s_plus or s_minus, p_alice > 1/2.
double expected_rounds(double p_alice, int s_plus, int s_minus);
/// The S+/(2P_A - 1) bound obtained by dropping the p_fn-sized term.
double expected_rounds_bound(double p_alice, int s_plus);

struct RoundModel {
  int n_spots;
  double u;
  double p_alice;
  double p_eve;

  static RoundModel make(int n_spots, double u);
};

struct StoppingDesign {
  int s_plus;
  int s_minus;
  double p_fp_target;
  double p_fn_target;
  double p_fp_exact;  // Eve absorbed at S+
  double p_fn_exact;  // Alice absorbed at S-
  double t_alice;     // exact expected rounds for Alice
  double t_alice_bound;

  /// Chooses S+ from p_fp and S- from p_fn for the given round model.
  static StoppingDesign design(const RoundModel& round, double p_fp_target, double p_fn_target);
  /// Fixed barriers; targets are recorded as the exact values.
  static StoppingDesign with_thresholds(const RoundModel& round, int s_plus, int s_minus);
};

}  // namespace photoauth
