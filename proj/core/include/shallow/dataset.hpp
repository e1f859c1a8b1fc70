#pragma once

#include <cstdint>
#include <vector>

#include "shallow/linalg.hpp"

namespace shallow {

/// Training inputs grouped class-by-class, with one target column per class.
///
/// Columns of `x0` are ordered so that the first N_1 belong to class 0, the
/// next N_2 to class 1, and so on. The constructor rejects inconsistent
/// shapes, non-finite entries, Q > M and linearly dependent targets.
class ClassifiedDataset {
 public:
  ClassifiedDataset(Mat x0, std::vector<int> class_sizes, Mat y);

  /// Targets default to the identity (one-hot labels).
  ClassifiedDataset(Mat x0, std::vector<int> class_sizes);

  int m() const { return static_cast<int>(x0_.rows()); }
  int q() const { return static_cast<int>(class_sizes_.size()); }
  int n() const { return static_cast<int>(x0_.cols()); }
  const std::vector<int>& class_sizes() const { return class_sizes_; }
  const Mat& x0() const { return x0_; }
  const Mat& y() const { return y_; }

  /// First column of class j in x0.
  int offset(int j) const { return offsets_[static_cast<std::size_t>(j)]; }
  int class_size(int j) const { return class_sizes_[static_cast<std::size_t>(j)]; }
  auto class_block(int j) const { return x0_.middleCols(offset(j), class_size(j)); }
  /// Class index of column `col`.
  int label_of(int col) const;

  /// Per-column weights 1/N_j, i.e. the diagonal of the inverse weight matrix.
  Vec inverse_weights() const;

  /// Same classes and targets, inputs replaced (must keep the shape).
  ClassifiedDataset with_inputs(Mat x0) const;
  /// X0 -> K X0 for square K.
  ClassifiedDataset transformed(const Mat& k) const;

 private:
  Mat x0_;
  std::vector<int> class_sizes_;
  std::vector<int> offsets_;
  Mat y_;
};

struct DatasetStats {
  Mat means;     // M x Q, column j is the mean of class j
  Mat mean_ext;  // M x N, class means repeated per sample
  Mat dev;       // M x N, x0 - mean_ext
  double delta = 0.0;    // largest Euclidean norm of a deviation column
  double delta_p = 0.0;  // largest |Pen[means] P dev_col|
  double rho = 0.0;      // largest Euclidean norm of an input column
  std::vector<int> n_weights;  // N_j
};

/// Per-class arithmetic means (M x Q).
Mat class_means(const ClassifiedDataset& ds);

/// Derived statistics; `pack` must be built from class_means(ds).
DatasetStats compute_stats(const ClassifiedDataset& ds, const ProjectorPack& pack);

/// Means, projector pack and statistics in one go. Throws DegenerateMeans
/// when the class means are linearly dependent.
struct PreparedDataset {
  ProjectorPack pack;
  DatasetStats stats;
};
PreparedDataset prepare(const ClassifiedDataset& ds, double sv_tolerance = kDefaultSvTolerance);

/// Random classified data: Q linearly independent means with entries
/// uniform in [-mean_scale, mean_scale], plus box noise in [-noise, noise]^M.
/// Targets are the identity. All draws come from Rng(seed).
ClassifiedDataset synthesize(int m, int q, const std::vector<int>& class_sizes, double mean_scale,
                             double noise, std::uint64_t seed);

/// Q x N target matrix, N_j copies of y_j per class block.
Mat y_ext(const ClassifiedDataset& ds);

}  // namespace shallow
