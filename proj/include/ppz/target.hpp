#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppz/geometry.hpp"

namespace ppz {

/// Raised when a target cannot be evaluated at a point (non-finite value,
/// domain error). Carries the offending point.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, Point point);
  const Point& point() const { return point_; }

 private:
  Point point_;
};

enum class TargetKind { real_scalar, real_vector, complex };

const char* to_string(TargetKind kind);

/// A function whose zeros are sought, together with the magnitude
/// reduction used by the intensity: |f| for real scalars, sum_i |f_i| for
/// vector-valued targets and the modulus for complex targets. Complex
/// targets take p = 2 points (sigma, t).
///
/// Evaluators must be pure: they are called concurrently.
class TargetFunction {
 public:
  using RealFn = std::function<double(const Point&)>;
  using VectorFn = std::function<std::vector<double>(const Point&)>;
  using ComplexFn = std::function<std::complex<double>(std::complex<double>)>;
  using Constraint = std::function<bool(const Point&)>;

  static TargetFunction real_scalar(std::size_t dim, RealFn fn, std::string description = {});
  static TargetFunction real_vector(std::size_t dim, std::size_t components, VectorFn fn,
                                    std::string description = {});
  static TargetFunction complex(ComplexFn fn, std::string description = {});

  TargetKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t components() const { return components_; }
  const std::string& description() const { return description_; }

  /// Real-scalar targets only.
  double eval_real(const Point& x) const;
  /// Real targets; a scalar target yields one component.
  std::vector<double> eval_vector(const Point& x) const;
  /// Complex targets only.
  std::complex<double> eval_complex(const Point& x) const;

  bool constrained() const { return static_cast<bool>(constraint_); }
  bool feasible(const Point& x) const { return !constraint_ || constraint_(x); }

  /// Adds a feasibility predicate; combined with any existing one by AND.
  TargetFunction with_constraint(Constraint c) const;
  TargetFunction with_description(std::string description) const;

 private:
  TargetFunction() = default;

  TargetKind kind_ = TargetKind::real_scalar;
  std::size_t dim_ = 1;
  std::size_t components_ = 1;
  RealFn real_;
  VectorFn vector_;
  ComplexFn complex_;
  Constraint constraint_;
  std::string description_;
};

/// |f(x)| under the target's reduction. Throws EvaluationError when the
/// evaluation is not finite.
double magnitude(const TargetFunction& f, const Point& x);

enum class DifferenceScheme { forward, central };

/// (f(x + eps e_i) - f(x)) / eps, or the central quotient when asked.
double fd_partial(const TargetFunction& f, const Point& x, std::size_t axis, double eps,
                  DifferenceScheme scheme = DifferenceScheme::forward);

/// Vector target whose components are the finite-difference partials of
/// a real-scalar f. Its zeros are the stationary points of f.
TargetFunction fd_gradient_target(const TargetFunction& f, double eps = 1e-6,
                                  DifferenceScheme scheme = DifferenceScheme::forward);

/// The same target restricted to a feasible set: candidates outside `c`
/// get zero intensity. Magnitudes are unchanged.
TargetFunction constrain(const TargetFunction& f, TargetFunction::Constraint c);

}  // namespace ppz
