#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "photoauth/errors.hpp"
#include "photoauth/photon_stats.hpp"

using namespace photoauth;

namespace {

double pmf_mean(const std::vector<double>& pmf) {
  double m = 0.0;
  for (std::size_t n = 0; n < pmf.size(); ++n) m += n * pmf[n];
  return m;
}

double pmf_variance(const std::vector<double>& pmf, double mean) {
  double v = 0.0;
  for (std::size_t n = 0; n < pmf.size(); ++n) v += (n - mean) * (n - mean) * pmf[n];
  return v;
}

}  // namespace

TEST_CASE("coherent pmf: point values") {
  CHECK(coherent_detect_pmf(0.1, 10.0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  // Pois(9.6) at 9, from exact factorial arithmetic.
  const double frozen = 0.12925609709588381732;
  CHECK(oracle::poisson_pmf_exact(9.6, 9) == doctest::Approx(frozen).epsilon(1e-14));
  CHECK(coherent_detect_pmf(0.16, 60.0, 9) == doctest::Approx(frozen).epsilon(1e-13));
  CHECK(coherent_detect_pmf(0.0, 60.0, 0) == 1.0);
  CHECK(coherent_detect_pmf(0.0, 60.0, 3) == 0.0);
}

TEST_CASE("coherent pmf: matches exact-factorial oracle for n <= 25") {
  for (double lambda : {0.3, 1.0, 4.5, 9.6, 17.0}) {
    for (int n = 0; n <= 25; ++n) {
      CHECK(coherent_detect_pmf(1.0, lambda, n) ==
            doctest::Approx(oracle::poisson_pmf_exact(lambda, n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("coherent pmf: stable far into the tail") {
  const double v = coherent_detect_pmf(1.0, 450.0, 500);
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
  // Ratio of neighbours equals lambda / n.
  CHECK(coherent_detect_pmf(1.0, 450.0, 501) / v == doctest::Approx(450.0 / 501.0).epsilon(1e-11));
}

TEST_CASE("single-photon pmf: point values") {
  CHECK(single_photon_detect_pmf(1.0, 60, 60) == 1.0);
  for (int n = 0; n < 60; ++n) CHECK(single_photon_detect_pmf(1.0, 60, n) == 0.0);
  CHECK(single_photon_detect_pmf(0.5, 2, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(single_photon_detect_pmf(0.3, 5, 6) == 0.0);
  CHECK(single_photon_detect_pmf(0.3, 5, -1) == 0.0);
}

TEST_CASE("single-photon pmf equals loss-pattern enumeration for n_exact <= 20") {
  for (double alpha : {0.04, 0.16, 0.5, 0.83}) {
    for (int trials : {1, 2, 7, 13, 20}) {
      const auto brute = oracle::loss_pattern_pmf(alpha, trials);
      for (int n = 0; n <= trials; ++n) {
        CHECK(std::abs(single_photon_detect_pmf(alpha, trials, n) - brute[n]) < 1e-12);
      }
    }
  }
}

TEST_CASE("single-photon pmf stays normalized at large photon counts") {
  const auto d = detection_distribution(LightSource::single_photon(1000), 0.37);
  CHECK(std::accumulate(d.pmf.begin(), d.pmf.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(coherent_detect_pmf(1.2, 10.0, 0), DomainError);
  CHECK_THROWS_AS(coherent_detect_pmf(-0.1, 10.0, 0), DomainError);
  CHECK_THROWS_AS(coherent_detect_pmf(0.1, -1.0, 0), DomainError);
  CHECK_THROWS_AS(single_photon_detect_pmf(1.5, 10, 0), DomainError);
  CHECK_THROWS_AS(LightSource::coherent(std::nan("")), DomainError);
  CHECK_THROWS_AS(LightSource::single_photon(-1), DomainError);
  CHECK_THROWS_AS(LightSource::of_kind(SourceKind::single_photon, 68.5), DomainError);
  CHECK_THROWS_AS(PerceptionModel{-1}.validate(), DomainError);
}

TEST_CASE("p_see edge cases and hand-summed value") {
  CHECK(p_see(LightSource::coherent(0.0), 0.3, 6) == 0.0);
  CHECK(p_see(LightSource::coherent(60.0), 0.3, 0) == 1.0);
  CHECK(p_see(LightSource::single_photon(60), 0.3, 0) == 1.0);
  // 1 - sum_{n<6} Pois(6; n)
  double below = 0.0;
  for (int n = 0; n < 6; ++n) below += oracle::poisson_pmf_exact(6.0, n);
  CHECK(1.0 - below == doctest::Approx(0.55432035863538875554).epsilon(1e-13));
  CHECK(p_see(LightSource::coherent(60.0), 0.10, 6) ==
        doctest::Approx(0.55432035863538875554).epsilon(1e-13));
  CHECK(p_see(LightSource::single_photon(5), 0.9, 6) == 0.0);
}

TEST_CASE("detection distributions: normalization and moments") {
  for (double alpha : {0.04, 0.10, 0.16, 0.5}) {
    for (double nbar : {0.5, 10.0, 60.0, 68.0, 200.0}) {
      const auto c = detection_distribution(LightSource::coherent(nbar), alpha);
      CHECK(std::accumulate(c.pmf.begin(), c.pmf.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(c.mean == doctest::Approx(alpha * nbar).epsilon(1e-15));
      CHECK(std::abs(pmf_mean(c.pmf) - alpha * nbar) < 1e-9);
      CHECK(std::abs(pmf_variance(c.pmf, alpha * nbar) - alpha * nbar) < 1e-9);

      const auto q = detection_distribution(LightSource::single_photon(static_cast<int>(nbar)), alpha);
      const double mean = alpha * static_cast<int>(nbar);
      CHECK(std::accumulate(q.pmf.begin(), q.pmf.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(pmf_mean(q.pmf) - mean) < 1e-9);
      CHECK(std::abs(pmf_variance(q.pmf, mean) - alpha * (1 - alpha) * static_cast<int>(nbar)) < 1e-9);
    }
  }
}

TEST_CASE("single-photon distribution is narrower by exactly 1 - alpha") {
  const auto c = detection_distribution(LightSource::coherent(60.0), 0.16);
  const auto q = detection_distribution(LightSource::single_photon(60), 0.16);
  CHECK(c.mean == doctest::Approx(9.6));
  CHECK(q.mean == doctest::Approx(9.6));
  CHECK(q.variance / c.variance == doctest::Approx(0.84).epsilon(1e-15));
  CHECK(pmf_variance(q.pmf, 9.6) / pmf_variance(c.pmf, 9.6) == doctest::Approx(0.84).epsilon(1e-9));
}

TEST_CASE("p_see properties") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> nb(0.5, 300.0), al(0.01, 1.0);
  SUBCASE("coherent scale invariance in alpha * nbar") {
    for (int i = 0; i < 500; ++i) {
      const double nbar = nb(gen);
      const double alpha = al(gen) * 0.09;  // keeps alpha * 10 <= 1
      const int k = 1 + i % 12;
      const double base = p_see(LightSource::coherent(nbar), alpha, k);
      for (double c : {0.5, 2.0, 10.0}) {
        CHECK(std::abs(p_see(LightSource::coherent(c * nbar), alpha / c, k) - base) < 1e-12);
      }
    }
  }
  SUBCASE("monotone in nbar, K and alpha") {
    for (double alpha : {0.04, 0.1, 0.16}) {
      for (int k : {1, 6, 10}) {
        double prev_c = -1.0;
        double prev_q = -1.0;
        for (int nbar = 0; nbar <= 300; ++nbar) {
          const double pc = p_see(LightSource::coherent(nbar), alpha, k);
          const double pq = p_see(LightSource::single_photon(nbar), alpha, k);
          CHECK(pc >= prev_c - 1e-15);
          CHECK(pq >= prev_q - 1e-15);
          prev_c = pc;
          prev_q = pq;
          CHECK(p_see(LightSource::coherent(nbar), alpha, k + 1) <= pc + 1e-15);
          CHECK(p_see(LightSource::coherent(nbar), alpha + 0.01, k) >= pc - 1e-15);
          CHECK(p_see(LightSource::single_photon(nbar), alpha + 0.01, k) >= pq - 1e-15);
        }
      }
    }
  }
}

TEST_CASE("miss and false-perception rates") {
  SUBCASE("equal alphas give u == 1 exactly") {
    for (double nbar : {0.0, 1.0, 33.3, 69.4, 200.0}) {
      for (double a : {0.0, 0.04, 0.16, 1.0}) {
        CHECK(miss_and_false_probs(LightSource::coherent(nbar), a, a, 6, AlphaOrdering::relaxed).u == 1.0);
        CHECK(miss_and_false_probs(LightSource::single_photon(static_cast<int>(nbar)), a, a, 6,
                                   AlphaOrdering::relaxed)
                  .u == 1.0);
      }
    }
  }
  SUBCASE("rates at the optimal photon budgets") {
    const auto c = miss_and_false_probs(LightSource::coherent(69.4), 0.16, 0.04, 6);
    CHECK(c.u == doctest::Approx(0.0983).epsilon(0.0005 / 0.0983));
    CHECK(c.u == doctest::Approx(c.p_high_miss + c.p_low_false).epsilon(1e-14));
    const auto q = miss_and_false_probs(LightSource::single_photon(68), 0.16, 0.04, 6);
    CHECK(q.u == doctest::Approx(0.0839).epsilon(0.0005 / 0.0839));
  }
  SUBCASE("ordering is enforced, not silently swapped") {
    CHECK_THROWS_AS(miss_and_false_probs(LightSource::coherent(60), 0.04, 0.16, 6), DomainError);
    CHECK_THROWS_AS(miss_and_false_probs(LightSource::coherent(60), 0.1, 0.1, 6), DomainError);
  }
}

TEST_CASE("log_factorial against direct sums") {
  long double acc = 0.0L;
  for (int n = 1; n <= 5000; ++n) {
    acc += std::log(static_cast<long double>(n));
    if (n % 97 == 0 || n == 4095 || n == 4096 || n == 5000) {
      CHECK(log_factorial(n) == doctest::Approx(static_cast<double>(acc)).epsilon(1e-13));
    }
  }
  CHECK(log_factorial(0) == 0.0);
}
