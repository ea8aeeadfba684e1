#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mfdm/losses.hpp"
#include "mfdm/meanfield.hpp"
#include "mfdm/rng.hpp"

using namespace mfdm;

TEST_CASE("init_bank is deterministic and unit-norm for UnitRandom") {
  const auto a = init_bank(3, 4, InitScheme::UnitRandom, 7);
  const auto b = init_bank(3, 4, InitScheme::UnitRandom, 7);
  CHECK(a.vectors == b.vectors);

  const auto single = init_bank(1, 2, InitScheme::UnitRandom, 99);
  const double norm = std::hypot(single.vectors(0, 0), single.vectors(0, 1));
  CHECK(std::abs(norm - 1.0) <= 1e-12);

  CHECK_THROWS_AS(init_bank(0, 4, InitScheme::UnitRandom, 1), std::invalid_argument);
  CHECK_THROWS_AS(init_bank(4, 0, InitScheme::UnitRandom, 1), std::invalid_argument);
}

TEST_CASE("gaussian init has mean row norm near one") {
  const auto bank = init_bank(100, 128, InitScheme::Gaussian, 5);
  double mean_norm = 0.0;
  for (std::size_t c = 0; c < bank.num_classes(); ++c) {
    double norm2 = 0.0;
    for (double v : bank.vectors.row(c)) norm2 += v * v;
    mean_norm += std::sqrt(norm2);
  }
  mean_norm /= 100.0;
  CHECK(std::abs(mean_norm - 1.0) <= 0.1);
}

TEST_CASE("class centroids") {
  Batch batch;
  batch.embeddings = Matrix::from_rows({{0, 0}, {2, 2}, {5, 7}});
  batch.labels = {1, 1, 4};
  const auto cents = class_centroids(batch);
  REQUIRE(cents.class_ids.size() == 2);
  CHECK(cents.class_ids[0] == 1);
  CHECK(cents.centroids(0, 0) == doctest::Approx(1.0));
  CHECK(cents.centroids(0, 1) == doctest::Approx(1.0));
  CHECK(cents.centroids(1, 0) == doctest::Approx(5.0));
  CHECK(cents.centroids(1, 1) == doctest::Approx(7.0));
}

TEST_CASE("class centroids match an independent accumulation") {
  Rng rng(13);
  Batch batch;
  const int n = 30, dim = 4, classes = 5;
  batch.embeddings = Matrix(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) batch.embeddings(i, k) = rng.normal();
    batch.labels.push_back(static_cast<int>(rng.below(classes)));
  }
  const auto cents = class_centroids(batch);
  for (std::size_t r = 0; r < cents.class_ids.size(); ++r) {
    const int c = cents.class_ids[r];
    for (int k = 0; k < dim; ++k) {
      double acc = 0.0;
      int count = 0;
      for (int i = n - 1; i >= 0; --i) {  // reversed order on purpose
        if (batch.labels[i] == c) {
          acc += batch.embeddings(i, k);
          ++count;
        }
      }
      CHECK(std::abs(cents.centroids(r, k) - acc / count) <= 1e-12);
    }
  }
}

namespace {

// well separated clusters: one tight blob per class
Batch clustered_batch(Rng& rng, int classes, int per_class, int dim, double spread) {
  Batch batch;
  batch.embeddings = Matrix(classes * per_class, dim);
  for (int c = 0; c < classes; ++c) {
    for (int s = 0; s < per_class; ++s) {
      const int i = c * per_class + s;
      for (int k = 0; k < dim; ++k)
        batch.embeddings(i, k) = (k == c ? 10.0 : 0.0) + spread * rng.normal();
      batch.labels.push_back(c);
    }
  }
  return batch;
}

}  // namespace

TEST_CASE("centroids are stationary for the squared-euclidean objective") {
  Rng rng(17);
  const int classes = 3, per_class = 6, dim = 4;
  Batch data = clustered_batch(rng, classes, per_class, dim, 0.1);
  const auto cents = class_centroids(data);
  MeanFieldBank bank{cents.centroids};

  const MFContParams params{0.0, 1.0, 0.0};
  auto residuals = stationarity_residual(bank, data, params);
  for (double r : residuals) CHECK(r <= 1e-8);

  // displacing one row raises the loss and reports gradient 2 * offset
  MeanFieldBank shifted = bank;
  shifted.vectors(1, 0) += 0.5;
  residuals = stationarity_residual(shifted, data, params);
  CHECK(std::abs(residuals[1] - 1.0) <= 1e-9);

  const double at_centroid = mfcont_loss(data, bank, params, DistanceKind::SqEuclidean).value;
  const double at_shifted = mfcont_loss(data, shifted, params, DistanceKind::SqEuclidean).value;
  CHECK(at_shifted > at_centroid);
}

TEST_CASE("single sample bank row equals the sample: residual zero") {
  Batch data;
  data.embeddings = Matrix::from_rows({{1.0, 2.0, 3.0}});
  data.labels = {0};
  MeanFieldBank bank{Matrix::from_rows({{1.0, 2.0, 3.0}})};
  const auto residuals = stationarity_residual(bank, data, {0.0, 1.0, 0.0});
  CHECK(residuals[0] == 0.0);
}

TEST_CASE("stationarity_residual requires data for every bank class") {
  Batch data;
  data.embeddings = Matrix::from_rows({{1.0, 0.0}});
  data.labels = {0};
  MeanFieldBank bank{Matrix::from_rows({{1, 0}, {0, 1}})};
  CHECK_THROWS_AS(stationarity_residual(bank, data, {0.0, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("min_row_norm flags collapsing rows") {
  MeanFieldBank bank{Matrix::from_rows({{3, 4}, {1e-9, 0}})};
  CHECK(min_row_norm(bank) == doctest::Approx(1e-9));
}
