#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mfdm/matrix.hpp"
#include "mfdm/rng.hpp"

namespace mfdm {

// Anything wrong with external data: missing files, malformed payloads,
// impossible sampler requests. The CLI maps this to its data exit code.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Immutable feature dataset. Labels are contiguous from 0 after loading;
// original ids map to 0..C-1 in ascending order.
struct Dataset {
  Matrix features;          // n x f
  std::vector<int> labels;  // size n
  std::string name;

  std::size_t size() const { return features.rows(); }
  std::size_t feature_dim() const { return features.cols(); }
  int num_classes() const;
};

struct SyntheticSpec {
  int num_classes = 8;
  int per_class = 50;
  int feature_dim = 64;
  double center_scale = 1.0;
  double noise_sigma = 0.05;
  std::uint64_t seed = 0;
};

// Class centers uniform on the sphere (scaled), samples = center + isotropic
// Gaussian noise. Bit-identical for a fixed spec.
Dataset generate_synthetic(const SyntheticSpec& spec);

enum class FileFormat { Csv, Bin };
FileFormat file_format_from_path(const std::string& path);

// CSV: header row, integer label first, then the feature columns.
// BIN: magic "MFDM", u32 n, u32 f, n*f little-endian f32 row-major, n u32 labels.
Dataset load_dataset(const std::string& path, FileFormat format);
void save_dataset(const Dataset& ds, const std::string& path, FileFormat format);

// First ceil(|C|/2) classes become the training side, the rest the test
// side; both remapped to contiguous labels. Guarantees class disjointness.
std::pair<Dataset, Dataset> class_disjoint_split(const Dataset& ds);

struct SamplerSpec {
  int classes_per_batch = 8;  // P
  int samples_per_class = 4;  // K
};

// P distinct classes, K samples each; classes smaller than K are sampled
// with replacement. The caller owns the RNG stream, so concurrent samplers
// never share hidden state.
std::vector<int> sample_batch(const Dataset& ds, const SamplerSpec& spec, Rng& rng);

}  // namespace mfdm
