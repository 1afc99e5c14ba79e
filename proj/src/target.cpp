#include "ppz/target.hpp"

#include <cmath>
#include <sstream>

namespace ppz {

namespace {

std::string describe_point(const Point& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.dim(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

void check_dim(const TargetFunction& f, const Point& x) {
  if (x.dim() != f.dim()) {
    throw std::invalid_argument("target expects dimension " + std::to_string(f.dim()) +
                                ", got a point of dimension " + std::to_string(x.dim()));
  }
}

}  // namespace

EvaluationError::EvaluationError(const std::string& what, Point point)
    : std::runtime_error(what + " at " + describe_point(point)), point_(std::move(point)) {}

const char* to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::real_scalar: return "real-scalar";
    case TargetKind::real_vector: return "real-vector";
    case TargetKind::complex: return "complex";
  }
  return "?";
}

TargetFunction TargetFunction::real_scalar(std::size_t dim, RealFn fn, std::string description) {
  if (dim == 0) throw std::invalid_argument("target: dimension must be >= 1");
  TargetFunction t;
  t.kind_ = TargetKind::real_scalar;
  t.dim_ = dim;
  t.components_ = 1;
  t.real_ = std::move(fn);
  t.description_ = std::move(description);
  return t;
}

TargetFunction TargetFunction::real_vector(std::size_t dim, std::size_t components, VectorFn fn,
                                           std::string description) {
  if (dim == 0 || components == 0) {
    throw std::invalid_argument("target: dimension and component count must be >= 1");
  }
  TargetFunction t;
  t.kind_ = TargetKind::real_vector;
  t.dim_ = dim;
  t.components_ = components;
  t.vector_ = std::move(fn);
  t.description_ = std::move(description);
  return t;
}

TargetFunction TargetFunction::complex(ComplexFn fn, std::string description) {
  TargetFunction t;
  t.kind_ = TargetKind::complex;
  t.dim_ = 2;
  t.components_ = 1;
  t.complex_ = std::move(fn);
  t.description_ = std::move(description);
  return t;
}

double TargetFunction::eval_real(const Point& x) const {
  if (kind_ != TargetKind::real_scalar) throw std::logic_error("eval_real on a non-scalar target");
  check_dim(*this, x);
  return real_(x);
}

std::vector<double> TargetFunction::eval_vector(const Point& x) const {
  check_dim(*this, x);
  switch (kind_) {
    case TargetKind::real_scalar: return {real_(x)};
    case TargetKind::real_vector: {
      auto v = vector_(x);
      if (v.size() != components_) {
        throw std::logic_error("vector target returned " + std::to_string(v.size()) +
                               " components, expected " + std::to_string(components_));
      }
      return v;
    }
    case TargetKind::complex: break;
  }
  throw std::logic_error("eval_vector on a complex target");
}

std::complex<double> TargetFunction::eval_complex(const Point& x) const {
  if (kind_ != TargetKind::complex) throw std::logic_error("eval_complex on a real target");
  check_dim(*this, x);
  return complex_({x[0], x[1]});
}

TargetFunction TargetFunction::with_constraint(Constraint c) const {
  TargetFunction t = *this;
  if (t.constraint_) {
    t.constraint_ = [a = t.constraint_, b = std::move(c)](const Point& x) { return a(x) && b(x); };
  } else {
    t.constraint_ = std::move(c);
  }
  return t;
}

TargetFunction TargetFunction::with_description(std::string description) const {
  TargetFunction t = *this;
  t.description_ = std::move(description);
  return t;
}

double magnitude(const TargetFunction& f, const Point& x) {
  double m = 0.0;
  switch (f.kind()) {
    case TargetKind::real_scalar: m = std::fabs(f.eval_real(x)); break;
    case TargetKind::real_vector:
      for (double v : f.eval_vector(x)) m += std::fabs(v);
      break;
    case TargetKind::complex: m = std::abs(f.eval_complex(x)); break;
  }
  if (!std::isfinite(m)) throw EvaluationError("target evaluated to a non-finite value", x);
  return m;
}

double fd_partial(const TargetFunction& f, const Point& x, std::size_t axis, double eps,
                  DifferenceScheme scheme) {
  if (!(eps > 0.0)) throw std::invalid_argument("fd_partial: eps must be positive");
  if (axis >= f.dim()) throw std::invalid_argument("fd_partial: axis out of range");
  std::vector<double> shifted = x.vec();
  shifted[axis] += eps;
  const double up = f.eval_real(Point(shifted));
  double d = 0.0;
  if (scheme == DifferenceScheme::forward) {
    d = (up - f.eval_real(x)) / eps;
  } else {
    shifted[axis] = x[axis] - eps;
    d = (up - f.eval_real(Point(shifted))) / (2.0 * eps);
  }
  if (!std::isfinite(d)) throw EvaluationError("finite difference is not finite", x);
  return d;
}

TargetFunction fd_gradient_target(const TargetFunction& f, double eps, DifferenceScheme scheme) {
  if (f.kind() != TargetKind::real_scalar) {
    throw std::invalid_argument("fd_gradient_target: target must be real-scalar");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("fd_gradient_target: eps must be positive");
  const std::size_t p = f.dim();
  auto grad = [f, eps, scheme, p](const Point& x) {
    std::vector<double> g(p);
    for (std::size_t i = 0; i < p; ++i) g[i] = fd_partial(f, x, i, eps, scheme);
    return g;
  };
  TargetFunction g = TargetFunction::real_vector(p, p, std::move(grad), "grad(" + f.description() + ")");
  if (f.constrained()) g = g.with_constraint([f](const Point& x) { return f.feasible(x); });
  return g;
}

TargetFunction constrain(const TargetFunction& f, TargetFunction::Constraint c) {
  return f.with_constraint(std::move(c));
}

}  // namespace ppz
