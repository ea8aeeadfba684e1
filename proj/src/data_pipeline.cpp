#include "mfdm/data_pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "mfdm/io_util.hpp"

namespace mfdm {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw DataError("short write to '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw DataError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

void ByteReader::require(std::size_t n) {
  if (pos_ + n > bytes_.size())
    throw DataError(what_ + ": truncated at offset " + std::to_string(pos_) + " (need " +
                    std::to_string(n) + " more bytes of " + std::to_string(bytes_.size()) + ")");
}

int Dataset::num_classes() const {
  int top = -1;
  for (int l : labels) top = std::max(top, l);
  return top + 1;
}

namespace {

// Remap arbitrary non-negative ids to contiguous 0-based labels, ascending.
void normalize_labels(Dataset& ds) {
  std::set<int> ids(ds.labels.begin(), ds.labels.end());
  std::map<int, int> remap;
  int next = 0;
  for (int id : ids) remap[id] = next++;
  for (int& l : ds.labels) l = remap[l];
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.num_classes < 1 || spec.per_class < 1 || spec.feature_dim < 1)
    throw DataError("synthetic spec: counts must be >= 1");
  if (spec.noise_sigma < 0.0) throw DataError("synthetic spec: noise_sigma must be >= 0");

  Rng rng(derive_seed(spec.seed, 0xda7a));
  Matrix centers(spec.num_classes, spec.feature_dim);
  for (int c = 0; c < spec.num_classes; ++c) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int k = 0; k < spec.feature_dim; ++k) {
        centers(c, k) = rng.normal();
        norm2 += centers(c, k) * centers(c, k);
      }
    } while (norm2 == 0.0);
    const double scale = spec.center_scale / std::sqrt(norm2);
    for (int k = 0; k < spec.feature_dim; ++k) centers(c, k) *= scale;
  }

  Dataset ds;
  ds.name = "synthetic";
  ds.features = Matrix(static_cast<std::size_t>(spec.num_classes) * spec.per_class,
                       spec.feature_dim);
  for (int c = 0; c < spec.num_classes; ++c) {
    for (int s = 0; s < spec.per_class; ++s) {
      const std::size_t i = static_cast<std::size_t>(c) * spec.per_class + s;
      for (int k = 0; k < spec.feature_dim; ++k)
        ds.features(i, k) = centers(c, k) + spec.noise_sigma * rng.normal();
      ds.labels.push_back(c);
    }
  }
  return ds;
}

FileFormat file_format_from_path(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return FileFormat::Csv;
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".bin") return FileFormat::Bin;
  throw DataError("cannot infer dataset format from '" + path + "' (expect .csv or .bin)");
}

namespace {

constexpr char kBinMagic[4] = {'M', 'F', 'D', 'M'};

Dataset load_csv(const std::string& path) {
  const std::string bytes = read_file(path);
  Dataset ds;
  ds.name = path;

  std::size_t pos = 0;
  auto next_line = [&](std::string& line) {
    if (pos >= bytes.size()) return false;
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) end = bytes.size();
    line = bytes.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = end + 1;
    return true;
  };

  std::string header;
  if (!next_line(header) || header.empty() || (header[0] >= '0' && header[0] <= '9'))
    throw DataError(path + ": malformed header (expected a non-numeric header row)");
  std::size_t columns = 1 + std::count(header.begin(), header.end(), ',');
  if (columns < 2) throw DataError(path + ": header must name a label and >= 1 feature column");
  const std::size_t feature_dim = columns - 1;

  std::vector<double> values;
  std::string line;
  std::size_t row = 0;
  while (next_line(line)) {
    if (line.empty()) continue;
    ++row;
    std::size_t field = 0, start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      const char* first = line.data() + start;
      const char* last = line.data() + comma;
      while (first < last && *first == ' ') ++first;
      if (field == 0) {
        int label = 0;
        auto [ptr, ec] = std::from_chars(first, last, label);
        if (ec != std::errc() || ptr != last || label < 0)
          throw DataError(path + ": row " + std::to_string(row) +
                          ": non-numeric or negative label");
        ds.labels.push_back(label);
      } else {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last)
          throw DataError(path + ": row " + std::to_string(row) + ": non-numeric cell in column " +
                          std::to_string(field));
        values.push_back(v);
      }
      ++field;
      start = comma + 1;
      if (comma == line.size()) break;
    }
    if (field != columns)
      throw DataError(path + ": row " + std::to_string(row) + ": expected " +
                      std::to_string(columns) + " columns, found " + std::to_string(field));
  }
  if (row == 0) throw DataError(path + ": no data rows");

  ds.features = Matrix(row, feature_dim);
  std::copy(values.begin(), values.end(), ds.features.data());
  normalize_labels(ds);
  return ds;
}

Dataset load_bin(const std::string& path) {
  const std::string bytes = read_file(path);
  ByteReader reader(bytes, path);
  const std::string magic = reader.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kBinMagic))
    throw DataError(path + ": bad magic (not a MFDM dataset)");
  const std::uint32_t n = reader.u32();
  const std::uint32_t f = reader.u32();
  if (n == 0 || f == 0) throw DataError(path + ": empty dataset header");

  Dataset ds;
  ds.name = path;
  ds.features = Matrix(n, f);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t k = 0; k < f; ++k) ds.features(i, k) = reader.f32();
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t label = reader.u32();
    ds.labels.push_back(static_cast<int>(label));
  }
  if (!reader.exhausted())
    throw DataError(path + ": trailing bytes at offset " + std::to_string(reader.offset()));
  normalize_labels(ds);
  return ds;
}

}  // namespace

Dataset load_dataset(const std::string& path, FileFormat format) {
  return format == FileFormat::Csv ? load_csv(path) : load_bin(path);
}

void save_dataset(const Dataset& ds, const std::string& path, FileFormat format) {
  if (ds.size() == 0) throw DataError("save_dataset: empty dataset");
  std::string out;
  if (format == FileFormat::Csv) {
    out += "label";
    for (std::size_t k = 0; k < ds.feature_dim(); ++k) out += ",f" + std::to_string(k);
    out += "\n";
    char buf[32];
    for (std::size_t i = 0; i < ds.size(); ++i) {
      out += std::to_string(ds.labels[i]);
      for (std::size_t k = 0; k < ds.feature_dim(); ++k) {
        std::snprintf(buf, sizeof(buf), ",%.9g", ds.features(i, k));
        out += buf;
      }
      out += "\n";
    }
  } else {
    out.append(kBinMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(ds.size()));
    put_u32(out, static_cast<std::uint32_t>(ds.feature_dim()));
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (std::size_t k = 0; k < ds.feature_dim(); ++k)
        put_f32(out, static_cast<float>(ds.features(i, k)));
    for (int label : ds.labels) put_u32(out, static_cast<std::uint32_t>(label));
  }
  write_file_atomic(path, out);
}

std::pair<Dataset, Dataset> class_disjoint_split(const Dataset& ds) {
  const int classes = ds.num_classes();
  if (classes < 2) throw DataError("class_disjoint_split: need at least 2 classes");
  const int train_classes = (classes + 1) / 2;

  Dataset train, test;
  train.name = ds.name + "/train";
  test.name = ds.name + "/test";
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < ds.size(); ++i)
    (ds.labels[i] < train_classes ? train_rows : test_rows).push_back(i);

  auto take = [&](Dataset& out, const std::vector<std::size_t>& rows) {
    out.features = Matrix(rows.size(), ds.feature_dim());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t k = 0; k < ds.feature_dim(); ++k)
        out.features(r, k) = ds.features(rows[r], k);
      out.labels.push_back(ds.labels[rows[r]]);
    }
    normalize_labels(out);
  };
  take(train, train_rows);
  take(test, test_rows);
  return {std::move(train), std::move(test)};
}

std::vector<int> sample_batch(const Dataset& ds, const SamplerSpec& spec, Rng& rng) {
  const int classes = ds.num_classes();
  if (spec.classes_per_batch < 1 || spec.samples_per_class < 1)
    throw DataError("sampler: P and K must be >= 1");
  if (spec.classes_per_batch > classes)
    throw DataError("sampler: requested " + std::to_string(spec.classes_per_batch) +
                    " classes per batch but the dataset has " + std::to_string(classes));

  std::vector<std::vector<int>> by_class(classes);
  for (std::size_t i = 0; i < ds.size(); ++i)
    by_class[ds.labels[i]].push_back(static_cast<int>(i));

  // partial Fisher-Yates draw of P distinct classes
  std::vector<int> class_order(classes);
  for (int c = 0; c < classes; ++c) class_order[c] = c;
  for (int k = 0; k < spec.classes_per_batch; ++k) {
    const std::size_t pick = k + rng.below(classes - k);
    std::swap(class_order[k], class_order[pick]);
  }

  std::vector<int> batch;
  batch.reserve(static_cast<std::size_t>(spec.classes_per_batch) * spec.samples_per_class);
  for (int k = 0; k < spec.classes_per_batch; ++k) {
    const auto& pool = by_class[class_order[k]];
    if (pool.empty()) throw DataError("sampler: class without samples");
    if (static_cast<int>(pool.size()) >= spec.samples_per_class) {
      // sample without replacement
      std::vector<int> local(pool);
      for (int s = 0; s < spec.samples_per_class; ++s) {
        const std::size_t pick = s + rng.below(local.size() - s);
        std::swap(local[s], local[pick]);
        batch.push_back(local[s]);
      }
    } else {
      for (int s = 0; s < spec.samples_per_class; ++s)
        batch.push_back(pool[rng.below(pool.size())]);
    }
  }
  return batch;
}

}  // namespace mfdm
