#include "simconf/aggregate.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "simconf/eigen.hpp"
#include "simconf/error.hpp"
#include "simconf/rng.hpp"
#include "test_util.hpp"

using namespace simconf;

namespace {

SimilarityMatrix matrix_from(std::initializer_list<double> values,
                             std::size_t m) {
  SimilarityMatrix matrix;
  matrix.metric = "test";
  matrix.m = m;
  matrix.values = values;
  return matrix;
}

SimilarityMatrix random_similarity_matrix(Rng& rng, std::size_t m) {
  SimilarityMatrix matrix;
  matrix.metric = "test";
  matrix.m = m;
  matrix.values.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    matrix.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      const double v = rng.uniform();
      matrix.at(i, j) = v;
      matrix.at(j, i) = v;
    }
  }
  return matrix;
}

}  // namespace

TEST_CASE("mean_similarity_confidence") {
  SUBCASE("all-ones matrix gives 1 for every sample") {
    const auto m = matrix_from({1, 1, 1, 1, 1, 1, 1, 1, 1}, 3);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(mean_similarity_confidence(m, i) == 1.0);
  }
  SUBCASE("hand mean over the off-diagonal row") {
    const auto m = matrix_from({1, 0.2, 0.4, 0.2, 1, 0.9, 0.4, 0.9, 1}, 3);
    CHECK(mean_similarity_confidence(m, 0) == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("all-zero neighbors give 0") {
    const auto m = matrix_from({1, 0, 0, 1}, 2);
    CHECK(mean_similarity_confidence(m, 0) == 0.0);
  }
  SUBCASE("m < 2 rejected") {
    CHECK_THROWS_AS(mean_similarity_confidence(matrix_from({1}, 1), 0),
                    UsageError);
  }
}

TEST_CASE("degree equivalence: mean similarity equals (rowsum-1)/(m-1)") {
  Rng rng(77);
  for (int round = 0; round < 50; ++round) {
    const std::size_t m = 2 + rng.below(19);
    const SimilarityMatrix matrix = random_similarity_matrix(rng, m);
    for (std::size_t i = 0; i < m; ++i) {
      double rowsum = 0.0;
      for (std::size_t j = 0; j < m; ++j) rowsum += matrix.at(i, j);
      const double degree_score = (rowsum - 1.0) / static_cast<double>(m - 1);
      CHECK(std::abs(mean_similarity_confidence(matrix, i) - degree_score) <
            1e-12);
    }
  }
}

TEST_CASE("fit_beta_mom") {
  SUBCASE("worked example") {
    const auto [a, b] = fit_beta_mom({0.2, 0.4, 0.6, 0.8});
    CHECK(std::abs(a - 1.375) < 1e-9);
    CHECK(std::abs(b - 1.375) < 1e-9);
  }
  SUBCASE("symmetric values force a == b") {
    const auto [a, b] = fit_beta_mom({0.3, 0.7, 0.45, 0.55});
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
  SUBCASE("zero variance") {
    CHECK_THROWS_AS(fit_beta_mom({0.5, 0.5, 0.5}), ZeroVarianceError);
  }
  SUBCASE("fewer than 2 values") {
    CHECK_THROWS_AS(fit_beta_mom({0.5}), DataError);
  }
  SUBCASE("overdispersed values fall back to Beta(1,1)") {
    // Variance exceeds the Bernoulli bound after clamping, so k <= 0.
    const auto [a, b] = fit_beta_mom({0.0001, 0.9999});
    CHECK(a == 1.0);
    CHECK(b == 1.0);
  }
  SUBCASE("recovered mean matches the sample mean") {
    Rng rng(3);
    for (int round = 0; round < 20; ++round) {
      std::vector<double> values;
      for (int i = 0; i < 50; ++i) values.push_back(rng.beta(3.0, 5.0));
      const double mean =
          std::accumulate(values.begin(), values.end(), 0.0) /
          static_cast<double>(values.size());
      const auto [a, b] = fit_beta_mom(values);
      CHECK(a / (a + b) == doctest::Approx(mean).epsilon(1e-6));
    }
  }
}

TEST_CASE("fit_bayes") {
  // Two groups of m=3; rewards chosen so 60% of samples are correct.
  auto g1 = testutil::make_group("g1", {"a", "b", "c"}, {1, 1, 0});
  auto g2 = testutil::make_group("g2", {"d", "e"}, {1, 0});
  Rng rng(11);
  std::vector<SimilarityMatrix> matrices = {random_similarity_matrix(rng, 3),
                                            random_similarity_matrix(rng, 2)};

  SUBCASE("p0 counts correct samples") {
    const BayesModel model = fit_bayes({g1, g2}, matrices);
    CHECK(model.p0 == doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("separated classes produce ordered conditional means") {
    // Correct samples' similarities near 1, incorrect near 0.
    SimilarityMatrix high = matrix_from({1, 0.9, 0.85, 0.9, 1, 0.92,
                                         0.85, 0.92, 1}, 3);
    SimilarityMatrix rigged = high;
    // Row 2 (incorrect sample) low: overwrite its off-diagonal entries.
    rigged.at(2, 0) = rigged.at(0, 2) = 0.1;
    rigged.at(2, 1) = rigged.at(1, 2) = 0.15;
    const BayesModel model = fit_bayes({g1}, {rigged});
    CHECK(model.a_pos / (model.a_pos + model.b_pos) >
          model.a_neg / (model.a_neg + model.b_neg));
  }
  SUBCASE("single-class training data names the missing class") {
    auto all_correct = testutil::make_group("g", {"a", "b"}, {1, 1});
    CHECK_THROWS_WITH_AS(fit_bayes({all_correct}, {matrices[1]}),
                         doctest::Contains("incorrect"), DataError);
  }
  SUBCASE("missing rewards are a data error") {
    auto unlabeled = testutil::make_group("g", {"a", "b"});
    CHECK_THROWS_AS(fit_bayes({unlabeled}, {matrices[1]}), DataError);
  }
  SUBCASE("degenerate similarities survive via the jitter retry") {
    // All pairwise similarities identical within each class.
    SimilarityMatrix flat = matrix_from({1, 0.7, 0.7, 0.7, 1, 0.7,
                                         0.7, 0.7, 1}, 3);
    const BayesModel model = fit_bayes({g1}, {flat});
    CHECK(model.a_pos > 0.0);
    CHECK(model.b_pos > 0.0);
  }
}

TEST_CASE("bayes_posterior") {
  SUBCASE("identical conditionals collapse to the prior") {
    Rng rng(19);
    for (int round = 0; round < 100; ++round) {
      BayesModel model;
      model.p0 = 0.05 + 0.9 * rng.uniform();
      model.a_pos = model.a_neg = 0.5 + 4.0 * rng.uniform();
      model.b_pos = model.b_neg = 0.5 + 4.0 * rng.uniform();
      std::vector<double> sims;
      const std::size_t n = 1 + rng.below(10);
      for (std::size_t i = 0; i < n; ++i) sims.push_back(rng.uniform());
      CHECK(std::abs(bayes_posterior(model, sims) - model.p0) < 1e-12);
    }
  }
  SUBCASE("worked single-observation example") {
    const BayesModel model{0.5, 2.0, 1.0, 1.0, 2.0};
    // BetaPDF(0.8; 2,1) = 1.6 and BetaPDF(0.8; 1,2) = 0.4.
    CHECK(std::abs(bayes_posterior(model, std::vector<double>{0.8}) - 0.8) <
          1e-9);
  }
  SUBCASE("worked two-observation example") {
    const BayesModel model{0.5, 2.0, 1.0, 1.0, 2.0};
    const double expected = 1.28 / 1.36;
    CHECK(std::abs(bayes_posterior(model, std::vector<double>{0.8, 0.8}) -
                   expected) < 1e-9);
  }
  SUBCASE("permutation invariance") {
    Rng rng(23);
    const BayesModel model{0.4, 3.0, 1.5, 1.2, 2.5};
    for (int round = 0; round < 50; ++round) {
      std::vector<double> sims;
      const std::size_t n = 2 + rng.below(12);
      for (std::size_t i = 0; i < n; ++i) sims.push_back(rng.uniform());
      const double base = bayes_posterior(model, sims);
      auto shuffled = sims;
      rng.shuffle(shuffled);
      CHECK(std::abs(bayes_posterior(model, shuffled) - base) < 1e-12);
    }
  }
  SUBCASE("pointwise likelihood ratio above 1 lifts the posterior") {
    const BayesModel model{0.3, 2.0, 1.0, 1.0, 2.0};
    // Density ratio pos/neg is s/(1-s) > 1 exactly when s > 0.5.
    const std::vector<double> sims = {0.6, 0.8, 0.95};
    CHECK(bayes_posterior(model, sims) > model.p0);
  }
  SUBCASE("empty similarity list") {
    const BayesModel model{0.5, 1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(bayes_posterior(model, std::vector<double>{}), UsageError);
  }
  SUBCASE("results stay in [0,1] for extreme evidence") {
    const BayesModel model{0.5, 9.0, 1.0, 1.0, 9.0};
    std::vector<double> strong(200, 0.99);
    const double high = bayes_posterior(model, strong);
    CHECK(high >= 0.0);
    CHECK(high <= 1.0);
    std::vector<double> weak(200, 0.01);
    const double low = bayes_posterior(model, weak);
    CHECK(low >= 0.0);
    CHECK(low <= 1.0);
    CHECK(high > low);
  }
}

TEST_CASE("bayes model JSON round-trip") {
  const BayesModel model{0.37, 2.5, 1.25, 0.75, 3.5};
  const BayesModel back = bayes_from_json(bayes_to_json(model));
  CHECK(back.p0 == model.p0);
  CHECK(back.a_pos == model.a_pos);
  CHECK(back.b_neg == model.b_neg);
  CHECK_THROWS_AS(bayes_from_json("{}"), DataError);
}

TEST_CASE("avg_logprob_confidence") {
  Sample sample;
  sample.avg_logprob = 0.0;
  CHECK(avg_logprob_confidence(sample) == 1.0);
  sample.avg_logprob = -0.2;
  CHECK(std::abs(avg_logprob_confidence(sample) - std::exp(-0.2)) < 1e-15);
  sample.avg_logprob = -10.0;
  const double tiny = avg_logprob_confidence(sample);
  CHECK(tiny == doctest::Approx(4.54e-5).epsilon(1e-3));
  CHECK(tiny > 0.0);
  sample.avg_logprob.reset();
  CHECK_THROWS_AS(avg_logprob_confidence(sample), DataError);
}

TEST_CASE("symmetric_eigen") {
  SUBCASE("identity") {
    const std::vector<double> identity = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    const SymmetricEigen eigen = symmetric_eigen(identity, 3);
    for (const double v : eigen.eigenvalues)
      CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("2x2 with known spectrum") {
    const SymmetricEigen eigen = symmetric_eigen({2, 1, 1, 2}, 2);
    CHECK(eigen.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(eigen.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-9));
  }
  SUBCASE("asymmetric input rejected") {
    CHECK_THROWS_AS(symmetric_eigen({1, 0.5, 0.2, 1}, 2), UsageError);
  }
  SUBCASE("reconstruction, orthonormality, trace") {
    Rng rng(41);
    for (int round = 0; round < 25; ++round) {
      const std::size_t n = 2 + rng.below(9);
      std::vector<double> a(n * n, 0.0);
      double trace = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
          const double v = 2.0 * rng.uniform() - 1.0;
          a[i * n + j] = v;
          a[j * n + i] = v;
        }
        trace += a[i * n + i];
      }
      const SymmetricEigen eigen = symmetric_eigen(a, n);

      // Eigenvalues ascend and sum to the trace.
      double sum = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k)
        CHECK(eigen.eigenvalues[k] <= eigen.eigenvalues[k + 1]);
      for (const double v : eigen.eigenvalues) sum += v;
      CHECK(std::abs(sum - trace) < 1e-8);

      // V Lambda V^T reconstructs the input.
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double r = 0.0;
          for (std::size_t k = 0; k < n; ++k)
            r += eigen.vector_entry(i, k) * eigen.eigenvalues[k] *
                 eigen.vector_entry(j, k);
          CHECK(std::abs(r - a[i * n + j]) < 1e-8);
        }

      // Columns are orthonormal.
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p; q < n; ++q) {
          double dot = 0.0;
          for (std::size_t i = 0; i < n; ++i)
            dot += eigen.vector_entry(i, p) * eigen.vector_entry(i, q);
          CHECK(std::abs(dot - (p == q ? 1.0 : 0.0)) < 1e-8);
        }
    }
  }
}

TEST_CASE("spectral_eccentricity_confidence") {
  SUBCASE("identical samples coincide in the embedding") {
    const auto matrix = matrix_from({1, 1, 1, 1, 1, 1, 1, 1, 1}, 3);
    for (const double c : spectral_eccentricity_confidence(matrix))
      CHECK(c == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("two samples are symmetric") {
    const auto matrix = matrix_from({1, 0.5, 0.5, 1}, 2);
    const auto conf = spectral_eccentricity_confidence(matrix);
    REQUIRE(conf.size() == 2);
    CHECK(conf[0] == doctest::Approx(conf[1]).epsilon(1e-12));
    // Hand derivation: both eigenvalues (0 and 2/3) are kept, embeddings
    // (±1/sqrt 2) in the second coordinate, so ecc = 1/sqrt 2.
    CHECK(conf[0] ==
          doctest::Approx(1.0 / (1.0 + 1.0 / std::sqrt(2.0))).epsilon(1e-9));
  }
  SUBCASE("confidences always lie in (0,1]") {
    Rng rng(53);
    for (int round = 0; round < 20; ++round) {
      const std::size_t m = 2 + rng.below(9);
      const auto conf =
          spectral_eccentricity_confidence(random_similarity_matrix(rng, m));
      for (const double c : conf) {
        CHECK(c > 0.0);
        CHECK(c <= 1.0);
      }
    }
  }
}
