#include "dtsim/bit_matrix.h"

#include <algorithm>

#include "dtsim/error.h"

namespace dtsim {

BitMatrix BitMatrix::slice_rows(std::size_t first, std::size_t count) const {
  if (first + count > rows_) {
    throw Error(ErrorKind::kInsufficientData, "row slice past end of matrix");
  }
  BitMatrix out(count, cols_);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_), count * cols_,
              out.data_.begin());
  return out;
}

BitMatrix BitMatrix::hstack(const BitMatrix& a, const BitMatrix& b) {
  if (a.rows_ != b.rows_) {
    throw Error(ErrorKind::kWidthMismatch, "hstack of matrices with different row counts");
  }
  BitMatrix out(a.rows_, a.cols_ + b.cols_);
  for (std::size_t r = 0; r < a.rows_; ++r) {
    auto dst = out.row(r);
    auto ra = a.row(r);
    auto rb = b.row(r);
    std::copy(ra.begin(), ra.end(), dst.begin());
    std::copy(rb.begin(), rb.end(), dst.begin() + static_cast<std::ptrdiff_t>(a.cols_));
  }
  return out;
}

}  // namespace dtsim
