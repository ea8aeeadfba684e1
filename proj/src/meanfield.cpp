#include "mfdm/meanfield.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "mfdm/losses.hpp"
#include "mfdm/rng.hpp"

namespace mfdm {

MeanFieldBank init_bank(std::size_t num_classes, std::size_t dim, InitScheme scheme,
                        std::uint64_t seed) {
  if (num_classes == 0 || dim == 0)
    throw std::invalid_argument("init_bank: need at least one class and one dimension");
  MeanFieldBank bank;
  bank.vectors = Matrix(num_classes, dim);
  Rng rng(seed);
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto row = bank.vectors.row(c);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        row[k] = rng.normal();
        norm2 += row[k] * row[k];
      }
    } while (norm2 == 0.0);
    if (scheme == InitScheme::UnitRandom) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t k = 0; k < dim; ++k) row[k] *= inv;
    } else {
      const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
      for (std::size_t k = 0; k < dim; ++k) row[k] *= scale;
    }
  }
  return bank;
}

ClassCentroids class_centroids(const Batch& batch) {
  if (batch.embeddings.rows() == 0) throw std::invalid_argument("class_centroids: empty input");
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < batch.labels.size(); ++i) groups[batch.labels[i]].push_back(i);

  ClassCentroids out;
  out.centroids = Matrix(groups.size(), batch.embeddings.cols());
  std::size_t r = 0;
  for (const auto& [c, members] : groups) {
    out.class_ids.push_back(c);
    auto row = out.centroids.row(r++);
    for (std::size_t i : members)
      for (std::size_t k = 0; k < row.size(); ++k) row[k] += batch.embeddings(i, k);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] /= static_cast<double>(members.size());
  }
  return out;
}

std::vector<double> stationarity_residual(const MeanFieldBank& bank, const Batch& data,
                                          const MFContParams& params) {
  for (std::size_t c = 0; c < bank.num_classes(); ++c) {
    bool covered = false;
    for (int label : data.labels) covered |= (static_cast<std::size_t>(label) == c);
    if (!covered)
      throw std::invalid_argument("stationarity_residual: no data for bank class " +
                                  std::to_string(c));
  }
  const LossResult res = mfcont_loss(data, bank, params, DistanceKind::SqEuclidean);
  std::map<int, int> present;
  for (int label : data.labels) present[label] = 1;
  const double num_classes = static_cast<double>(present.size());

  std::vector<double> residuals(bank.num_classes(), 0.0);
  for (std::size_t c = 0; c < bank.num_classes(); ++c) {
    double norm2 = 0.0;
    for (double g : res.grad_meanfields->row(c)) norm2 += g * g;
    residuals[c] = num_classes * std::sqrt(norm2);
  }
  return residuals;
}

double min_row_norm(const MeanFieldBank& bank) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < bank.num_classes(); ++c) {
    double norm2 = 0.0;
    for (double v : bank.vectors.row(c)) norm2 += v * v;
    best = std::min(best, std::sqrt(norm2));
  }
  return best;
}

}  // namespace mfdm
