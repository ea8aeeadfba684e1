#pragma once

#include <string>
#include <vector>

#include "mfdm/core_numerics.hpp"
#include "mfdm/matrix.hpp"

namespace mfdm {

// Same-set k-NN retrieval quality. For a query with R same-class references
// (its class size minus itself):
//   P@1    nearest neighbor shares the class
//   RP     fraction of the top R that share the class
//   MAP@R  (1/R) sum_{i<=R} P(i) rel(i), precision-weighted rank quality
// Macro-averaged over queries; the per-query values are retained.
struct RetrievalReport {
  double p_at_1 = 0.0;
  double r_precision = 0.0;
  double map_at_r = 0.0;
  std::vector<double> per_query_p_at_1;
  std::vector<double> per_query_r_precision;
  std::vector<double> per_query_map_at_r;
};

// Neighbor indices per query, self excluded, ascending distance, ties broken
// by ascending index so reports are reproducible.
std::vector<std::vector<int>> rank_neighbors(const Matrix& embeddings, DistanceKind kind);

// Requires every class to have at least 2 samples (each query needs a
// relevant neighbor). Throws std::invalid_argument otherwise.
RetrievalReport evaluate(const Matrix& embeddings, const std::vector<int>& labels,
                         DistanceKind kind);

// Flat key-value text record, one metric per line.
std::string report_to_text(const RetrievalReport& report);

}  // namespace mfdm
