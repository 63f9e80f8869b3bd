#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "spfem/error.hpp"

namespace spfem {

// Callable scalar field on the unit interval or square, with partial
// derivatives up to a declared order.  Evaluation beyond that order
// raises MissingDerivative.
class Field {
 public:
  using Fn1 = std::function<double(double, int)>;
  using Fn2 = std::function<double(double, double, int, int)>;

  Field() = default;

  static Field zero(int dim);
  static Field analytic(Fn1 f, int max_deriv = 8);
  static Field analytic2(Fn2 f, int max_deriv = 8);

  bool valid() const { return dim_ != 0; }
  int dim() const { return dim_; }
  int max_derivative() const { return max_deriv_; }

  double operator()(double x, int deriv = 0) const;
  double operator()(double x, double y, int dx, int dy) const;

  Field operator+(const Field& other) const;
  Field operator-(const Field& other) const;

 private:
  int dim_ = 0;
  int max_deriv_ = 0;
  Fn1 f1_;
  Fn2 f2_;
};

Field field_sum(const std::vector<Field>& parts);

// ---- inline implementation ----

inline double Field::operator()(double x, int deriv) const {
  if (dim_ != 1) fail(Errc::RegionMeshMismatch, "1D evaluation of a non-1D field");
  if (deriv > max_deriv_)
    fail(Errc::MissingDerivative, "field provides derivatives up to order " +
                                      std::to_string(max_deriv_));
  return f1_(x, deriv);
}

inline double Field::operator()(double x, double y, int dx, int dy) const {
  if (dim_ != 2) fail(Errc::RegionMeshMismatch, "2D evaluation of a non-2D field");
  if (dx > max_deriv_ || dy > max_deriv_)
    fail(Errc::MissingDerivative, "field provides derivatives up to order " +
                                      std::to_string(max_deriv_));
  return f2_(x, y, dx, dy);
}

inline Field Field::zero(int dim) {
  Field f;
  f.dim_ = dim;
  f.max_deriv_ = 1 << 20;
  if (dim == 1)
    f.f1_ = [](double, int) { return 0.0; };
  else
    f.f2_ = [](double, double, int, int) { return 0.0; };
  return f;
}

inline Field Field::analytic(Fn1 f, int max_deriv) {
  Field out;
  out.dim_ = 1;
  out.max_deriv_ = max_deriv;
  out.f1_ = std::move(f);
  return out;
}

inline Field Field::analytic2(Fn2 f, int max_deriv) {
  Field out;
  out.dim_ = 2;
  out.max_deriv_ = max_deriv;
  out.f2_ = std::move(f);
  return out;
}

inline Field Field::operator+(const Field& other) const {
  Field out;
  out.dim_ = dim_;
  out.max_deriv_ = std::min(max_deriv_, other.max_deriv_);
  if (dim_ == 1) {
    Fn1 a = f1_, b = other.f1_;
    out.f1_ = [a, b](double x, int d) { return a(x, d) + b(x, d); };
  } else {
    Fn2 a = f2_, b = other.f2_;
    out.f2_ = [a, b](double x, double y, int dx, int dy) {
      return a(x, y, dx, dy) + b(x, y, dx, dy);
    };
  }
  return out;
}

inline Field Field::operator-(const Field& other) const {
  Field out;
  out.dim_ = dim_;
  out.max_deriv_ = std::min(max_deriv_, other.max_deriv_);
  if (dim_ == 1) {
    Fn1 a = f1_, b = other.f1_;
    out.f1_ = [a, b](double x, int d) { return a(x, d) - b(x, d); };
  } else {
    Fn2 a = f2_, b = other.f2_;
    out.f2_ = [a, b](double x, double y, int dx, int dy) {
      return a(x, y, dx, dy) - b(x, y, dx, dy);
    };
  }
  return out;
}

inline Field field_sum(const std::vector<Field>& parts) {
  Field acc = parts.at(0);
  for (size_t i = 1; i < parts.size(); ++i) acc = acc + parts[i];
  return acc;
}

}  // namespace spfem
