#include <algorithm>
#include <cmath>
#include <string>

#include "vsum/kernels.hpp"
#include "vsum/linalg.hpp"

namespace vsum {
namespace {

void require_same_size(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw ConfigError("vector length mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

}  // namespace

Vector& Vector::operator+=(const Vector& o) {
  require_same_size(*this, o);
  kernels::axpy(1.0, o.span(), span());
  return *this;
}

Vector& Vector::operator-=(const Vector& o) {
  require_same_size(*this, o);
  kernels::axpy(-1.0, o.span(), span());
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double s, Vector a) { return a *= s; }

double dot(const Vector& a, const Vector& b) {
  require_same_size(a, b);
  return kernels::dot(a.span(), b.span());
}

double norm2(const Vector& a) { return std::sqrt(kernels::dot(a.span(), a.span())); }

double max_abs(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double a, const Vector& x, Vector& y) {
  require_same_size(x, y);
  kernels::axpy(a, x.span(), y.span());
}

double inner(const Vector& a, const Vector& b) { return a.weight() * dot(a, b); }

double norm(const Vector& a) { return std::sqrt(a.weight()) * norm2(a); }

Vector zeros_like(const Vector& like) { return Vector(std::vector<double>(like.size(), 0.0), like.grid()); }

}  // namespace vsum
