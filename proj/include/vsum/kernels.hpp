#pragma once
// Data-parallel inner loops used by the linear algebra layer.
//
// Every kernel has a portable scalar reference implementation. On x86-64 an
// AVX2/FMA variant is compiled separately and chosen at runtime when the CPU
// supports it. Set VSUM_KERNELS=scalar to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace vsum::kernels {

struct CsrView {
  std::span<const std::size_t> row_ptr;
  std::span<const std::size_t> cols;
  std::span<const double> vals;
};

struct KernelSet {
  std::string_view name;
  double (*dot)(std::span<const double> x, std::span<const double> y);
  // y += a * x
  void (*axpy)(double a, std::span<const double> x, std::span<double> y);
  // y = x + b * y
  void (*xpby)(std::span<const double> x, double b, std::span<double> y);
  // y = shift * x + M x
  void (*spmv)(const CsrView& m, double shift, std::span<const double> x, std::span<double> y);
};

const KernelSet& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelSet* avx2_kernels();

// The set used by the library; resolved once on first call.
const KernelSet& active();

inline double dot(std::span<const double> x, std::span<const double> y) { return active().dot(x, y); }
inline void axpy(double a, std::span<const double> x, std::span<double> y) { active().axpy(a, x, y); }
inline void xpby(std::span<const double> x, double b, std::span<double> y) { active().xpby(x, b, y); }
inline void spmv(const CsrView& m, double shift, std::span<const double> x, std::span<double> y) {
  active().spmv(m, shift, x, y);
}

}  // namespace vsum::kernels
