#pragma once

#include <cstdint>
#include <vector>

#include "mfdm/core_numerics.hpp"
#include "mfdm/matrix.hpp"

namespace mfdm {

struct Batch;
struct MFContParams;

// One learnable vector per training class. Class ids are contiguous from 0
// and index the rows directly.
struct MeanFieldBank {
  Matrix vectors;  // C x d

  std::size_t num_classes() const { return vectors.rows(); }
  std::size_t dim() const { return vectors.cols(); }
};

enum class InitScheme { UnitRandom, Gaussian };

// UnitRandom: rows uniform on the unit sphere. Gaussian: entries N(0, 1/d),
// which puts the expected row norm near 1 in high dimension.
MeanFieldBank init_bank(std::size_t num_classes, std::size_t dim, InitScheme scheme,
                        std::uint64_t seed);

// Arithmetic mean of the embeddings of each class present in the batch.
// Row i of the result is the centroid of class present_classes[i].
struct ClassCentroids {
  std::vector<int> class_ids;
  Matrix centroids;
};
ClassCentroids class_centroids(const Batch& batch);

// Per-class norm of the mean-field gradient of the squared-Euclidean
// mean-field contrastive objective, with the 1/|C| batch normalizer removed
// so a row displaced by eps from its centroid reports 2*eps. Zero residuals
// certify the bank is stationary for the given data.
std::vector<double> stationarity_residual(const MeanFieldBank& bank, const Batch& data,
                                          const MFContParams& params);

// Smallest row norm in the bank; rows drifting toward zero make cosine
// distances ill-conditioned, so callers warn below 1e-6.
double min_row_norm(const MeanFieldBank& bank);

}  // namespace mfdm
