#include "shallow/dataset.hpp"

#include <algorithm>
#include <string>

#include "shallow/error.hpp"
#include "shallow/rng.hpp"

namespace shallow {

ClassifiedDataset::ClassifiedDataset(Mat x0, std::vector<int> class_sizes)
    : ClassifiedDataset(x0, class_sizes,
                        Mat::Identity(static_cast<Eigen::Index>(class_sizes.size()),
                                      static_cast<Eigen::Index>(class_sizes.size()))) {}

ClassifiedDataset::ClassifiedDataset(Mat x0, std::vector<int> class_sizes, Mat y)
    : x0_(std::move(x0)), class_sizes_(std::move(class_sizes)), y_(std::move(y)) {
  const auto q = static_cast<Eigen::Index>(class_sizes_.size());
  if (q == 0) throw Error(ErrorCode::InvalidInput, "dataset needs at least one class");
  long total = 0;
  for (int nj : class_sizes_) {
    if (nj <= 0) throw Error(ErrorCode::InvalidInput, "class sizes must be positive");
    offsets_.push_back(static_cast<int>(total));
    total += nj;
  }
  if (total != x0_.cols()) {
    throw Error(ErrorCode::DimensionError, "sum of class sizes (" + std::to_string(total) +
                                               ") != number of samples (" + std::to_string(x0_.cols()) + ")");
  }
  if (q > x0_.rows()) {
    throw Error(ErrorCode::DimensionError, "class count Q exceeds input dimension M");
  }
  if (y_.rows() != q || y_.cols() != q) throw Error(ErrorCode::DimensionError, "targets must be Q x Q");
  if (!x0_.allFinite() || !y_.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite entries");
  if (numerical_rank(y_) != q) throw Error(ErrorCode::InvalidInput, "target columns are linearly dependent");
}

int ClassifiedDataset::label_of(int col) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), col);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

Vec ClassifiedDataset::inverse_weights() const {
  Vec w(n());
  for (int j = 0; j < q(); ++j) w.segment(offset(j), class_size(j)).setConstant(1.0 / class_size(j));
  return w;
}

ClassifiedDataset ClassifiedDataset::with_inputs(Mat x0) const {
  if (x0.rows() != x0_.rows() || x0.cols() != x0_.cols()) {
    throw Error(ErrorCode::DimensionError, "replacement inputs change the dataset shape");
  }
  return ClassifiedDataset(std::move(x0), class_sizes_, y_);
}

ClassifiedDataset ClassifiedDataset::transformed(const Mat& k) const {
  if (k.rows() != k.cols() || k.cols() != x0_.rows()) throw Error(ErrorCode::DimensionError, "K must be M x M");
  return with_inputs(k * x0_);
}

Mat class_means(const ClassifiedDataset& ds) {
  Mat means(ds.m(), ds.q());
  for (int j = 0; j < ds.q(); ++j) {
    // Averaging offsets from the first sample makes identical samples give an exact mean.
    const auto block = ds.class_block(j);
    const Vec first = block.col(0);
    means.col(j) = first + (block.colwise() - first).rowwise().mean();
  }
  return means;
}

DatasetStats compute_stats(const ClassifiedDataset& ds, const ProjectorPack& pack) {
  DatasetStats st;
  st.means = class_means(ds);
  st.mean_ext.resize(ds.m(), ds.n());
  for (int j = 0; j < ds.q(); ++j) {
    st.mean_ext.middleCols(ds.offset(j), ds.class_size(j)).colwise() = st.means.col(j);
  }
  st.dev = ds.x0() - st.mean_ext;
  st.delta = ds.n() > 0 ? st.dev.colwise().norm().maxCoeff() : 0.0;
  st.rho = ds.n() > 0 ? ds.x0().colwise().norm().maxCoeff() : 0.0;
  if (pack.pen.rows() != ds.q() || pack.pen.cols() != ds.m()) {
    throw Error(ErrorCode::DimensionError, "projector pack does not match dataset");
  }
  st.delta_p = (pack.pen * (pack.p * st.dev)).colwise().norm().maxCoeff();
  st.n_weights = ds.class_sizes();
  return st;
}

PreparedDataset prepare(const ClassifiedDataset& ds, double sv_tolerance) {
  const Mat means = class_means(ds);
  if (numerical_rank(means, sv_tolerance) < ds.q()) {
    throw Error(ErrorCode::DegenerateMeans, "class means do not have rank Q");
  }
  PreparedDataset out{make_projector_pack(means, sv_tolerance), {}};
  out.stats = compute_stats(ds, out.pack);
  return out;
}

ClassifiedDataset synthesize(int m, int q, const std::vector<int>& class_sizes, double mean_scale,
                             double noise, std::uint64_t seed) {
  if (q > m) throw Error(ErrorCode::DimensionError, "synthesize needs q <= m");
  if (q <= 0 || static_cast<int>(class_sizes.size()) != q) {
    throw Error(ErrorCode::InvalidInput, "need one class size per class");
  }
  if (noise < 0.0 || !(mean_scale > 0.0)) throw Error(ErrorCode::InvalidInput, "noise >= 0, mean_scale > 0");
  Rng rng(seed);
  Mat means;
  do {
    means = uniform_matrix(m, q, -mean_scale, mean_scale, rng);
  } while (numerical_rank(means) < q);
  int n = 0;
  for (int nj : class_sizes) n += nj;
  Mat x0(m, n);
  int col = 0;
  for (int j = 0; j < q; ++j) {
    for (int i = 0; i < class_sizes[static_cast<std::size_t>(j)]; ++i, ++col) {
      x0.col(col) = means.col(j) + noise * uniform_matrix(m, 1, -1.0, 1.0, rng);
    }
  }
  return ClassifiedDataset(std::move(x0), class_sizes);
}

Mat y_ext(const ClassifiedDataset& ds) {
  Mat out(ds.q(), ds.n());
  for (int j = 0; j < ds.q(); ++j) out.middleCols(ds.offset(j), ds.class_size(j)).colwise() = ds.y().col(j);
  return out;
}

}  // namespace shallow
