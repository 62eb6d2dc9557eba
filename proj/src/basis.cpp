#include "momrec/basis.hpp"

#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace momrec {

std::int64_t binom(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    if (r > std::numeric_limits<std::int64_t>::max() / (n - k + i))
      throw std::overflow_error("binom overflow");
    r = r * (n - k + i) / i;
  }
  return r;
}

int total_degree(const Exponent& a) {
  return std::accumulate(a.begin(), a.end(), 0);
}

Exponent add_exponents(const Exponent& a, const Exponent& b) {
  if (a.size() != b.size()) throw std::invalid_argument("exponent length mismatch");
  Exponent c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

namespace {

void enumerate_degree(int n, int s, Exponent& scratch, int pos,
                      std::vector<Exponent>& out) {
  if (pos == n - 1) {
    scratch[pos] = s;
    out.push_back(scratch);
    return;
  }
  for (int v = s; v >= 0; --v) {
    scratch[pos] = v;
    enumerate_degree(n, s - v, scratch, pos + 1, out);
  }
}

}  // namespace

MonomialBasis::MonomialBasis(int n, int d) : n_(n), d_(d) {
  if (n < 1 || d < 0) throw std::invalid_argument("MonomialBasis: need n >= 1, d >= 0");
  monomials_.reserve(static_cast<std::size_t>(binom(n + d, d)));
  degree_offset_.resize(d + 2, 0);
  Exponent scratch(n, 0);
  for (int s = 0; s <= d; ++s) {
    degree_offset_[s] = static_cast<std::int64_t>(monomials_.size());
    enumerate_degree(n, s, scratch, 0, monomials_);
  }
  degree_offset_[d + 1] = static_cast<std::int64_t>(monomials_.size());
}

int MonomialBasis::rank_within_degree(const Exponent& alpha) const {
  // Descending lex: all beta with beta_i > alpha_i (first differing i) precede.
  int rank = 0;
  int s = total_degree(alpha);
  for (int i = 0; i < n_ - 1; ++i) {
    int rem_vars = n_ - i - 1;
    for (int v = s; v > alpha[i]; --v)
      rank += static_cast<int>(binom(s - v + rem_vars - 1, rem_vars - 1));
    s -= alpha[i];
  }
  return rank;
}

int MonomialBasis::index(const Exponent& alpha) const {
  if (static_cast<int>(alpha.size()) != n_)
    throw std::invalid_argument("MonomialBasis::index: dimension mismatch");
  for (int v : alpha)
    if (v < 0) throw std::invalid_argument("MonomialBasis::index: negative power");
  int s = total_degree(alpha);
  if (s > d_) throw std::out_of_range("MonomialBasis::index: degree exceeds bound");
  return static_cast<int>(degree_offset_[s]) + rank_within_degree(alpha);
}

std::shared_ptr<const MonomialBasis> MonomialBasis::get(int n, int d) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, d}];
  if (!slot) slot = std::make_shared<const MonomialBasis>(n, d);
  return slot;
}

}  // namespace momrec
