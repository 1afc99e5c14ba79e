#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ppz/target.hpp"

namespace ppz {

inline constexpr std::size_t kDefaultEtaTerms = 10000;

/// Raised by zeta_from_eta when |1 - 2^(1-s)| < 1e-12. The eta value,
/// which stays finite there, is kept.
class PoleProximityError : public EvaluationError {
 public:
  PoleProximityError(std::complex<double> s, std::complex<double> eta);
  std::complex<double> eta() const { return eta_; }

 private:
  std::complex<double> eta_;
};

/// Alternating series sum_{n<=L} (-1)^(n+1) n^(-s), formed as
/// eta_re - i eta_im with n^(-sigma) = exp(-sigma ln n). Requires sigma > 0.
std::complex<double> eta_partial(std::complex<double> s, std::size_t terms = kDefaultEtaTerms);

/// eta_partial(s) / (1 - 2^(1-s)).
std::complex<double> zeta_from_eta(std::complex<double> s, std::size_t terms = kDefaultEtaTerms);

struct Root {
  std::complex<double> value;
  int multiplicity = 1;
};

/// prod_k (s - xi_k)^{m_k}, evaluated factor by factor.
TargetFunction poly_from_roots(const std::vector<Root>& roots);

/// Named targets: cos, sincos, hard-poly, sum-sq, gauss, sincos2d, eta,
/// zeta. sum-sq and gauss take the dimension either from `dim` or from a
/// suffix such as "sum-sq(3)".
TargetFunction builtin(std::string_view name, std::size_t dim = 1,
                       std::size_t eta_terms = kDefaultEtaTerms);

std::vector<std::string> builtin_names();

/// Dimension a builtin expects when called with `dim` (complex builtins
/// are always 2, fixed-dimension ones ignore `dim`).
std::size_t builtin_dim(std::string_view name, std::size_t dim);

}  // namespace ppz
