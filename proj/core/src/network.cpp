#include "shallow/network.hpp"

#include "shallow/error.hpp"

namespace shallow {

void ShallowParams::validate() const {
  const auto m = w1.rows();
  if (w1.cols() != m || b1.size() != m || w2.cols() != m || b2.size() != w2.rows() || w2.rows() == 0) {
    throw Error(ErrorCode::DimensionError, "inconsistent parameter shapes");
  }
  if (!w1.allFinite() || !b1.allFinite() || !w2.allFinite() || !b2.allFinite()) {
    throw Error(ErrorCode::InvalidInput, "non-finite parameter entries");
  }
}

ForwardPass forward(const ShallowParams& p, const Mat& x) {
  p.validate();
  if (x.rows() != p.w1.cols()) throw Error(ErrorCode::DimensionError, "input rows != M");
  ForwardPass out;
  out.pre = p.w1 * x;
  out.pre.colwise() += p.b1;
  out.x1 = relu(out.pre);
  out.x2 = p.w2 * out.x1;
  out.x2.colwise() += p.b2;
  return out;
}

}  // namespace shallow
