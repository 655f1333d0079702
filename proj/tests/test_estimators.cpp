#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <doctest.h>

#include "dosprop/estimators.hpp"
#include "dosprop/harness.hpp"
#include "dosprop/models.hpp"
#include "test_util.hpp"

using namespace dosprop;
using testutil::kFixture;
using testutil::uniform_grid;

namespace {

// Straight transcription of d(i) = (p_(2i) - 2 p_(i)) / i^alpha on a sorted copy.
std::vector<double> dos_oracle(std::vector<double> p, double alpha) {
  std::sort(p.begin(), p.end());
  std::vector<double> d;
  for (std::size_t i = 1; 2 * i <= p.size(); ++i) {
    d.push_back((p[2 * i - 1] - 2.0 * p[i - 1]) / std::pow(static_cast<double>(i), alpha));
  }
  return d;
}

PValueSample fixture() { return PValueSample::from(kFixture); }

}  // namespace

TEST_SUITE("sample") {
  TEST_CASE("sorts and keeps ties") {
    const std::vector<double> in{0.9, 0.1, 0.5};
    const auto s = validate_sample(in);
    CHECK(s.values() == std::vector<double>{0.1, 0.5, 0.9});
    CHECK(s.original_index(0) == 1);
    CHECK(s.original_index(2) == 0);

    const std::vector<double> ties{0.2, 0.2, 0.2};
    CHECK(validate_sample(ties).values() == ties);
  }

  TEST_CASE("rejects bad input with the offending index") {
    const std::vector<double> empty;
    CHECK_ERRC(validate_sample(empty), Errc::EmptyInput);

    const std::vector<double> out{0.5, 1.2};
    try {
      validate_sample(out);
      FAIL("expected OutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::OutOfRange);
      CHECK(e.index() == 1);
    }

    const std::vector<double> nan{0.5, 0.1, std::numeric_limits<double>::quiet_NaN()};
    try {
      validate_sample(nan);
      FAIL("expected NotANumber");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NotANumber);
      CHECK(e.index() == 2);
    }
  }

  TEST_CASE("n < 4 is flagged, not raised") {
    const std::vector<double> three{0.1, 0.2, 0.3};
    const auto s = validate_sample(three);
    CHECK(s.too_small_for_dos());
    CHECK_ERRC(dos_sequence(s, 1.0), Errc::TooSmall);
    CHECK_FALSE(fixture().too_small_for_dos());
  }

  TEST_CASE("boundary values 0 and 1 are accepted") {
    const std::vector<double> p{0.0, 1.0, 0.5, 0.0};
    CHECK(validate_sample(p).values() == std::vector<double>{0.0, 0.0, 0.5, 1.0});
  }
}

TEST_SUITE("dos_sequence") {
  TEST_CASE("fixture at both exponents matches the loop oracle") {
    const auto s = fixture();
    for (double alpha : {1.0, 0.5, 0.75}) {
      const auto got = dos_sequence(s, alpha);
      const auto want = dos_oracle(kFixture, alpha);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
    }
    const auto d1 = dos_sequence(s, 1.0);
    CHECK(d1[0] == doctest::Approx(0.0));
    CHECK(d1[1] == doctest::Approx(0.13).epsilon(1e-9));
    CHECK(d1[2] == doctest::Approx(0.266667).epsilon(1e-6));
    const auto d05 = dos_sequence(s, 0.5);
    CHECK(d05[1] == doctest::Approx(0.183848).epsilon(1e-6));
    CHECK(d05[2] == doctest::Approx(0.461880).epsilon(1e-6));
  }

  TEST_CASE("uniform grid gives an all-zero sequence") {
    for (std::size_t n : {4u, 7u, 100u, 1001u}) {
      const auto s = PValueSample::from(uniform_grid(n));
      for (double alpha : {0.5, 1.0}) {
        const auto d = dos_sequence(s, alpha);
        CHECK(d.size() == n / 2);
        for (double v : d) CHECK(std::abs(v) <= 1e-15);
      }
    }
  }

  TEST_CASE("length is floor(n/2) for odd n") {
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK(dos_sequence(PValueSample::from(p), 1.0).size() == 2);
  }

  TEST_CASE("alpha outside [1/2, 1] is rejected") {
    CHECK_ERRC(dos_sequence(fixture(), 0.49), Errc::BadAlpha);
    CHECK_ERRC(dos_sequence(fixture(), 1.01), Errc::BadAlpha);
  }

  TEST_CASE("invariant under permutation of the input") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(200);
    for (auto& v : p) v = u(gen) * u(gen);
    const auto base = dos_sequence(PValueSample::from(p), 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      std::shuffle(p.begin(), p.end(), gen);
      CHECK(dos_sequence(PValueSample::from(p), 1.0) == base);
    }
  }

  TEST_CASE("scaling the sample scales the sequence and keeps the change-point") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(300);
    for (auto& v : p) v = u(gen) < 0.2 ? 0.05 * u(gen) : u(gen);
    const auto s = PValueSample::from(p);
    const auto d = dos_sequence(s, 1.0);
    const auto k = dos_changepoint(s, {}).k_hat;
    for (double gamma : {1.0, 0.5, 0.125}) {
      std::vector<double> q = p;
      for (auto& v : q) v *= gamma;
      const auto sq = PValueSample::from(q);
      const auto dq = dos_sequence(sq, 1.0);
      for (std::size_t i = 0; i < d.size(); ++i) CHECK(dq[i] == doctest::Approx(gamma * d[i]).epsilon(1e-12));
      CHECK(dos_changepoint(sq, {}).k_hat == k);
    }
  }
}

TEST_SUITE("dos_changepoint") {
  TEST_CASE("fixture") {
    const auto cp = dos_changepoint(fixture(), {1.0, 0.0});
    CHECK(cp.k_hat == 3);
    CHECK(cp.lambda == doctest::Approx(0.05));
  }

  TEST_CASE("c = 0.4 forces the single index 3") {
    const auto cp = dos_changepoint(fixture(), {1.0, 0.4});
    CHECK(cp.k_hat == 3);
    CHECK(cp.lambda == doctest::Approx(0.05));
  }

  TEST_CASE("ties go to the smallest index") {
    const auto grid = uniform_grid(50);
    const auto cp = dos_changepoint(PValueSample::from(grid), {});
    CHECK(cp.k_hat == 1);
    CHECK(cp.lambda == grid[0]);
  }

  TEST_CASE("search start") {
    CHECK(dos_search_start(6, 0.0) == 1);
    CHECK(dos_search_start(6, 0.4) == 3);
    CHECK(dos_search_start(1000, 0.01) == 10);
    CHECK(dos_search_start(1000, 0.0105) == 11);
    CHECK(dos_search_start(100, 0.07) == 7);  // 100 * 0.07 is 7.000000000000001 in binary
  }

  TEST_CASE("empty search range and bad c") {
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
    // n = 7: floor(n/2) = 3, c = 0.49 starts at ceil(3.43) = 4
    CHECK_ERRC(dos_changepoint(PValueSample::from(p), {1.0, 0.49}), Errc::EmptySearchRange);
    CHECK_ERRC(dos_changepoint(fixture(), {1.0, 0.5}), Errc::BadC);
    CHECK_ERRC(dos_changepoint(fixture(), {1.0, -0.1}), Errc::BadC);
  }

  TEST_CASE("2 k_hat <= n and k_hat inside the search range") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 4 + gen() % 300;
      std::vector<double> p(n);
      for (auto& v : p) v = std::pow(u(gen), 1.0 + 3.0 * u(gen));
      const double c = 0.3 * u(gen);
      const auto s = PValueSample::from(p);
      if (dos_search_start(n, c) > n / 2) continue;
      const auto cp = dos_changepoint(s, {0.5 + 0.5 * u(gen), c});
      CHECK(2 * cp.k_hat <= n);
      CHECK(cp.k_hat >= dos_search_start(n, c));
      CHECK(cp.lambda == s.order_stat(cp.k_hat));
    }
  }
}

TEST_SUITE("dos_storey") {
  TEST_CASE("fixture") {
    const auto e = dos_storey(fixture(), {1.0, 0.0});
    CHECK(e.k_hat == 3);
    CHECK(e.lambda == doctest::Approx(0.05));
    CHECK(e.pi1_raw == doctest::Approx(0.45 / 0.95).epsilon(1e-12));
    CHECK(e.pi1 == e.pi1_raw);
    CHECK(e.dos_sequence.size() == 3);
  }

  TEST_CASE("uniform grid gives a near-null estimate") {
    const std::size_t n = 100;
    const auto e = dos_storey(PValueSample::from(uniform_grid(n)), {});
    const double nd = static_cast<double>(n);
    CHECK(e.k_hat == 1);
    CHECK(e.pi1_raw == doctest::Approx(1.0 / (nd * (nd + 1.0) - nd)).epsilon(1e-9));
  }

  TEST_CASE("negative raw estimate is clamped to zero") {
    // d(1) = 0.4 wins; lambda = 0.3 > k/n = 0.25
    const std::vector<double> p{0.3, 1.0, 1.0, 1.0};
    const auto e = dos_storey(PValueSample::from(p), {});
    CHECK(e.k_hat == 1);
    CHECK(e.pi1_raw < 0.0);
    CHECK(e.pi1 == 0.0);
  }

  TEST_CASE("lambda equal to 1 is degenerate") {
    const std::vector<double> p{1.0, 1.0, 1.0, 1.0};
    CHECK_ERRC(dos_storey(PValueSample::from(p), {}), Errc::DegenerateLambda);
  }

  TEST_CASE("coincides with Storey at lambda = p_(k) for distinct values") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(500);
    for (auto& v : p) v = u(gen) < 0.3 ? 0.02 * u(gen) : u(gen);
    const auto s = PValueSample::from(p);
    const auto e = dos_storey(s, {});
    const auto st = storey_at(s, e.lambda);
    CHECK(e.pi1 == doctest::Approx(st.pi1).epsilon(1e-12));
  }

  TEST_CASE("to_proportion clamps pi0 into [1/n, 1]") {
    DosEstimate e;
    e.pi1 = 1.0;
    const auto pr = to_proportion(e, 10, "DOS");
    CHECK(pr.pi0 == doctest::Approx(0.1));
    CHECK(pr.pi1 + pr.pi0 == doctest::Approx(1.0));
  }
}

TEST_SUITE("udos") {
  TEST_CASE("fixture") { CHECK(udos(fixture(), {}).pi1 == doctest::Approx(0.5)); }

  TEST_CASE("n = 4 uniform grid ties to index 1") {
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
    const auto e = udos(PValueSample::from(p), {});
    CHECK(e.pi1 == doctest::Approx(0.25));
    CHECK(e.pi0 == doctest::Approx(0.75));
  }
}

TEST_SUITE("storey") {
  TEST_CASE("fixture at 1/2") {
    const auto e = storey_at(fixture(), 0.5);
    CHECK(e.pi0 == doctest::Approx(2.0 / 3.0));
    CHECK(e.pi1 == doctest::Approx(1.0 / 3.0));
    CHECK(e.lambda_used == 0.5);
  }

  TEST_CASE("no mass below lambda clamps pi0 to 1") {
    const std::vector<double> p{0.9, 0.95, 0.99, 1.0};
    const auto e = storey_at(PValueSample::from(p), 0.5);
    CHECK(e.pi0_raw == doctest::Approx(2.0));
    CHECK(e.pi0 == 1.0);
    CHECK(e.pi1 == 0.0);
  }

  TEST_CASE("ties at lambda count as below") {
    const std::vector<double> p{0.5, 0.5, 0.7, 0.9};
    CHECK(storey_at(PValueSample::from(p), 0.5).pi0_raw == doctest::Approx((1.0 - 0.5) / 0.5));
  }

  TEST_CASE("all mass below lambda clamps pi0 to 1/n") {
    const std::vector<double> p{0.01, 0.02, 0.03, 0.04};
    const auto e = storey_at(PValueSample::from(p), 0.5);
    CHECK(e.pi0 == doctest::Approx(0.25));
    CHECK(e.pi1 == doctest::Approx(0.75));
  }

  TEST_CASE("lambda outside (0,1)") {
    CHECK_ERRC(storey_at(fixture(), 0.0), Errc::BadLambda);
    CHECK_ERRC(storey_at(fixture(), 1.0), Errc::BadLambda);
  }

  TEST_CASE("median rule uses p_(floor(n/2))") {
    const auto e = st_median(fixture());
    CHECK(e.lambda_used == 0.05);
    CHECK(e.pi0 == doctest::Approx(0.5 / 0.95).epsilon(1e-12));
    CHECK(e.pi1 == doctest::Approx(0.473684).epsilon(1e-6));
    const std::vector<double> odd{0.01, 0.02, 0.05, 0.30, 0.60, 0.90, 0.95};
    CHECK(st_median(PValueSample::from(odd)).lambda_used == 0.05);
  }
}

TEST_SUITE("lsl") {
  TEST_CASE("fixture: first slope decrease at i = 4") {
    const auto e = lsl(fixture());
    CHECK(e.pi0 == doctest::Approx(5.0 / 6.0));
    CHECK(e.pi1 == doctest::Approx(1.0 / 6.0));
  }

  TEST_CASE("uniform grid has flat slopes") {
    CHECK(lsl(PValueSample::from(uniform_grid(40))).pi1 == 0.0);
  }

  TEST_CASE("needs two values") {
    const std::vector<double> one{0.3};
    CHECK_ERRC(lsl(PValueSample::from(one)), Errc::TooSmall);
  }

  TEST_CASE("mean count on the sparse Gaussian scenario") {
    // Reference mean 6.3; spread of n*pi1 is a few counts, 300 reps keep the SE near 0.2.
    const GaussianScenario sc{1000, 0.01, 3.5, 0.0, 0.0};
    const std::size_t reps = 300;
    double sum = 0.0;
    double sumsq = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      auto rng = Rng::for_stream(99, r);
      const auto ls = gen_gaussian(sc, rng);
      const double v = 1000.0 * lsl(ls.sample).pi1;
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sumsq / reps - mean * mean) / (reps - 1));
    MESSAGE("LSL mean n*pi1 = " << mean << " (se " << se << ")");
    CHECK(std::abs(mean - 6.3) <= 4.0 * se + 0.5);
  }
}

TEST_SUITE("jd_bootstrap") {
  TEST_CASE("single-lambda grid reduces to Storey") {
    for (std::size_t b : {1u, 20u}) {
      Rng rng(3);
      const auto e = jd_bootstrap(fixture(), JdOptions{{0.5}, b}, rng);
      const auto st = storey_at(fixture(), 0.5);
      CHECK(e.pi0 == st.pi0);
      CHECK(e.pi1 == st.pi1);
    }
  }

  TEST_CASE("frozen value for the fixture, grid {0.2,0.5,0.8}, B = 50, seed 7") {
    Rng rng(7);
    const auto e = jd_bootstrap(fixture(), JdOptions{{0.2, 0.5, 0.8}, 50}, rng);
    CHECK(e.pi1 >= 0.0);
    CHECK(e.pi1 <= 1.0);
    CHECK(e.pi1 == doctest::Approx(0.35416666666666663).epsilon(1e-12));
    Rng again(7);
    CHECK(jd_bootstrap(fixture(), JdOptions{{0.2, 0.5, 0.8}, 50}, again).pi1 == e.pi1);
  }

  TEST_CASE("bad options") {
    Rng rng(1);
    CHECK_ERRC(jd_bootstrap(fixture(), JdOptions{{}, 10}, rng), Errc::BadGrid);
    CHECK_ERRC(jd_bootstrap(fixture(), JdOptions{{0.5, 1.0}, 10}, rng), Errc::BadGrid);
    CHECK_ERRC(jd_bootstrap(fixture(), JdOptions{{0.5}, 0}, rng), Errc::BadB);
  }

  TEST_CASE("default grid") {
    const auto g = default_jd_grid();
    REQUIRE(g.size() == 19);
    CHECK(g.front() == doctest::Approx(0.05));
    CHECK(g.back() == doctest::Approx(0.95));
  }
}

// Expected JD RMSE here is 31.2 +- 4. Runs as its own ctest entry so a miss
// is reported apart from the rest of the estimator suite.
TEST_SUITE("jd reference") {
  TEST_CASE("JD RMSE on the Gaussian scenario mu1 = 3, pi1 = 0.1, n = 1000") {
    ExperimentConfig cfg;
    cfg.scenario = GaussianScenario{1000, 0.1, 3.0, 0.0, 0.0};
    cfg.estimators = {EstimatorSpec::parse("jd")};
    cfg.replicates = 1000;
    cfg.master_seed = 31;
    const auto s = run_experiment(cfg);
    MESSAGE("JD rmse = " << s.at("JD").rmse << ", bias = " << s.at("JD").bias);
    CHECK(s.at("JD").rmse == doctest::Approx(31.2).epsilon(4.0 / 31.2));
  }
}

TEST_SUITE("estimator ranges") {
  TEST_CASE("every estimator yields pi1 in [0,1] and pi0 + pi1 = 1") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 4 + gen() % 200;
      std::vector<double> p(n);
      const double frac = u(gen);
      for (auto& v : p) v = u(gen) < frac ? 0.01 * u(gen) : u(gen);
      const auto s = PValueSample::from(p);
      Rng rng(trial);
      std::vector<ProportionEstimate> all{udos(s, {}), storey_at(s, 0.5), st_median(s), lsl(s),
                                          jd_bootstrap(s, JdOptions{default_jd_grid(), 10}, rng)};
      if (s.order_stat(dos_changepoint(s, {}).k_hat) < 1.0) all.push_back(to_proportion(dos_storey(s, {}), n, "DOS"));
      for (const auto& e : all) {
        CHECK(e.pi1 >= 0.0);
        CHECK(e.pi1 <= 1.0);
        CHECK(e.pi0 + e.pi1 == doctest::Approx(1.0));
      }
    }
  }
}
