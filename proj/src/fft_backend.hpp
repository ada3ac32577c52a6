#pragma once

#include <complex>
#include <cstddef>

namespace landau::detail {

enum class Axis { Rows, Columns };

/// Unnormalized in-place DFT of every row (Axis::Rows: length ncols, contiguous)
/// or every column (Axis::Columns: length nrows, stride ncols) of a row-major
/// nrows x ncols array. sign = -1 is the forward transform.
void fft_many(std::complex<double>* data, std::size_t nrows, std::size_t ncols, Axis axis,
              int sign);

}  // namespace landau::detail
