#include "momrec/momentlin.hpp"

#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>

namespace momrec {

LocalizingStencil::LocalizingStencil(const Poly& q, int k) : n_(q.vars()), k_(k), q_(q) {
  if (q.is_zero()) throw std::invalid_argument("LocalizingStencil: zero polynomial");
  int dq = (q.degree() + 1) / 2;
  if (dq > k) throw std::invalid_argument("LocalizingStencil: deg(q) exceeds 2k");
  row_basis_ = MonomialBasis::get(n_, k - dq);
  shift_degree_ = 2 * (k - dq);

  auto shift_basis = MonomialBasis::get(n_, shift_degree_);
  auto moment_basis = MonomialBasis::get(n_, 2 * k);

  shift_forms_.resize(shift_basis->size());
  for (int s = 0; s < shift_basis->size(); ++s) {
    const Exponent& shift = shift_basis->monomial(s);
    SparseForm& form = shift_forms_[s];
    form.terms.reserve(q.terms().size());
    for (const auto& [a, c] : q.terms())
      form.terms.emplace_back(moment_basis->index(add_exponents(a, shift)), c);
  }

  int m = rows();
  entry_shift_.resize(static_cast<std::size_t>(m) * (m + 1) / 2);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c <= r; ++c)
      entry_shift_[static_cast<std::size_t>(r) * (r + 1) / 2 + c] = shift_basis->index(
          add_exponents(row_basis_->monomial(r), row_basis_->monomial(c)));
}

int LocalizingStencil::shift_index(int r, int c) const {
  if (c > r) std::swap(r, c);
  return entry_shift_[static_cast<std::size_t>(r) * (r + 1) / 2 + c];
}

Eigen::MatrixXd LocalizingStencil::apply(const Eigen::VectorXd& y) const {
  int m = rows();
  Eigen::MatrixXd out(m, m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c <= r; ++c) {
      const SparseForm& form = entry_form(r, c);
      double v = 0.0;
      for (const auto& [idx, coef] : form.terms) v += coef * y[idx];
      out(r, c) = v;
      out(c, r) = v;
    }
  }
  return out;
}

namespace {

std::string poly_key(const Poly& q, int k) {
  std::ostringstream os;
  os << q.vars() << '|' << k;
  for (const auto& [a, c] : q.terms()) {
    for (int v : a) os << ',' << v;
    os << ':';
    os.write(reinterpret_cast<const char*>(&c), sizeof(c));
  }
  return os.str();
}

}  // namespace

std::shared_ptr<const LocalizingStencil> stencil(const Poly& q, int k) {
  static std::shared_mutex mu;
  static std::map<std::string, std::shared_ptr<const LocalizingStencil>> cache;
  const std::string key = poly_key(q, k);
  {
    std::shared_lock lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const LocalizingStencil>(q, k);
  std::unique_lock lock(mu);
  auto [it, inserted] = cache.emplace(key, built);
  return it->second;
}

Eigen::MatrixXd moment_matrix(const Tms& y, int k) {
  if (y.d < 2 * k) throw std::invalid_argument("moment_matrix: tms degree below 2k");
  return localizing_matrix(Poly::constant(y.n, 1.0), y, k);
}

Eigen::MatrixXd localizing_matrix(const Poly& q, const Tms& y, int k) {
  if (q.vars() != y.n) throw std::invalid_argument("localizing_matrix: dimension mismatch");
  if (y.d < 2 * k) throw std::invalid_argument("localizing_matrix: tms degree below 2k");
  if (q.degree() > 2 * k) throw std::invalid_argument("localizing_matrix: deg(q) exceeds 2k");
  auto S = stencil(q, k);
  if (y.d == 2 * k) return S->apply(y.values);
  return S->apply(y.truncated(2 * k).values);
}

}  // namespace momrec
