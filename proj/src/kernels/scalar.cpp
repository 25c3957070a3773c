#include "vsum/kernels.hpp"

namespace vsum::kernels {
namespace {

double dot_scalar(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void xpby_scalar(std::span<const double> x, double b, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + b * y[i];
}

void spmv_scalar(const CsrView& m, double shift, std::span<const double> x, std::span<double> y) {
  const std::size_t n = m.row_ptr.size() - 1;
  for (std::size_t r = 0; r < n; ++r) {
    double s = shift * x[r];
    for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) s += m.vals[k] * x[m.cols[k]];
    y[r] = s;
  }
}

}  // namespace

const KernelSet& scalar_kernels() {
  static const KernelSet set{"scalar", dot_scalar, axpy_scalar, xpby_scalar, spmv_scalar};
  return set;
}

}  // namespace vsum::kernels
