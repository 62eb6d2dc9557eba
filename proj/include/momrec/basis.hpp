#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace momrec {

// binom(n, k) in exact integer arithmetic; throws on overflow.
std::int64_t binom(int n, int k);

// Monomial power vector alpha = (a_1, ..., a_n), all entries >= 0.
using Exponent = std::vector<int>;

int total_degree(const Exponent& a);
Exponent add_exponents(const Exponent& a, const Exponent& b);

// All alpha with |alpha| <= d, ordered by total degree ascending and within a
// degree lexicographically with x_1 heaviest:
//   1, x_1, ..., x_n, x_1^2, x_1 x_2, ..., x_n^d.
// Every matrix index in the library depends on this ordering; it is frozen.
class MonomialBasis {
 public:
  MonomialBasis(int n, int d);

  int vars() const { return n_; }
  int max_degree() const { return d_; }
  int size() const { return static_cast<int>(monomials_.size()); }

  const Exponent& monomial(int i) const { return monomials_.at(i); }

  // Position of x^alpha; throws if |alpha| > d or alpha has the wrong length.
  int index(const Exponent& alpha) const;

  // Shared immutable instance, cached per (n, d).
  static std::shared_ptr<const MonomialBasis> get(int n, int d);

 private:
  int n_, d_;
  std::vector<Exponent> monomials_;
  // Offsets of each degree block plus a flat lookup table built on demand.
  std::vector<std::int64_t> degree_offset_;
  int rank_within_degree(const Exponent& alpha) const;
};

}  // namespace momrec
