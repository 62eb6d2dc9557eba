#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "momrec/rng.hpp"
#include "momrec/tensorrec.hpp"

using namespace momrec;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd u(v.size());
  int i = 0;
  for (double x : v) u[i++] = x;
  return u;
}

Eigen::VectorXd random_unit(Rng& rng, int n) {
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = rng.normal();
  u.normalize();
  return u;
}

SymTensor random_tensor(Rng& rng, int n, int d) {
  SymTensor A(n, d);
  for (int i = 0; i < A.size(); ++i) A.vals[i] = rng.normal();
  return A;
}

// Full-index Hilbert-Schmidt sum: iterates all n^d positions.
double hs_brute(const SymTensor& A, const SymTensor& B) {
  int n = A.n, d = A.d;
  std::vector<int> idx(d, 0);
  double s = 0.0;
  while (true) {
    Exponent a(n, 0);
    for (int j : idx) ++a[j];
    s += A.at(a) * B.at(a);
    int i = 0;
    while (i < d && ++idx[i] == n) idx[i++] = 0;
    if (i == d) break;
  }
  return s;
}

SymTensor rank_one(const Eigen::VectorXd& u, int d) {
  Decomposition dec;
  dec.n = static_cast<int>(u.size());
  dec.d = d;
  dec.terms.push_back({+1, 1.0, u});
  return reconstruct(dec);
}

}  // namespace

TEST_CASE("canonical storage and the htms identification") {
  SymTensor A(2, 2);
  A.set({2, 0}, 1.0);
  A.set({1, 1}, 2.0);
  A.set({0, 2}, 3.0);
  Htms h = tensor_to_htms(A);
  CHECK(h.vals[SymTensor::hom_index(2, 2, {2, 0})] == 1.0);
  CHECK(h.vals[SymTensor::hom_index(2, 2, {1, 1})] == 2.0);
  CHECK(h.vals[SymTensor::hom_index(2, 2, {0, 2})] == 3.0);
  SymTensor back = htms_to_tensor(h);
  CHECK(back.vals == A.vals);
}

TEST_CASE("round-trip on random tensors") {
  Rng rng(1);
  for (int rep = 0; rep < 10; ++rep) {
    int n = 2 + rng.uniform_int(3), d = 2 + rng.uniform_int(3);
    SymTensor A = random_tensor(rng, n, d);
    CHECK(htms_to_tensor(tensor_to_htms(A)).vals == A.vals);
  }
}

TEST_CASE("htms of a tensor power is the monomial vector") {
  Rng rng(2);
  Eigen::VectorXd u = random_unit(rng, 3);
  SymTensor P = rank_one(u, 3);
  Htms h = tensor_to_htms(P);
  for (int i = 0; i < P.size(); ++i) {
    const Exponent& a = SymTensor::hom_exponent(3, 3, i);
    CHECK(h.vals[i] == doctest::Approx(Poly::monomial(3, a).eval(u)).epsilon(1e-12));
  }
}

TEST_CASE("measurement polynomial carries multiplicities") {
  SymTensor I2(2, 2);
  I2.set({2, 0}, 1.0);
  I2.set({0, 2}, 1.0);
  Poly f = measurement_poly(I2);
  CHECK(f.coeff({2, 0}) == 1.0);
  CHECK(f.coeff({0, 2}) == 1.0);
  CHECK(f.coeff({1, 1}) == 0.0);

  SymTensor A(2, 2);
  A.set({2, 0}, 1.0);
  A.set({1, 1}, 2.0);
  A.set({0, 2}, 3.0);
  CHECK(hs_inner(I2, A) == doctest::Approx(4.0));
  CHECK(pair(f, Tms(2, 2, [&] {
          Eigen::VectorXd v(6);
          v << 0, 0, 0, 1, 2, 3;  // degree-2 block holds the htms
          return v;
        }())) == doctest::Approx(4.0));

  // single off-diagonal slot in S^3(R^4): f = 6 x1 x2 x3
  SymTensor E(4, 3);
  E.set(exponent_from_subscripts(4, {1, 2, 3}), 1.0);
  Poly g = measurement_poly(E);
  CHECK(g.coeff({1, 1, 1, 0}) == 6.0);
}

TEST_CASE("measurement of a tensor power is the linear form power") {
  Rng rng(4);
  Eigen::VectorXd u = random_unit(rng, 3);
  SymTensor P = rank_one(u, 3);
  Poly f = measurement_poly(P);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) x[i] = rng.normal();
    CHECK(f.eval(x) == doctest::Approx(std::pow(u.dot(x), 3)).epsilon(1e-10));
  }
}

TEST_CASE("hilbert-schmidt inner product against the full-index oracle") {
  Rng rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    int n = 2 + rng.uniform_int(3), d = 2 + rng.uniform_int(3);
    SymTensor A = random_tensor(rng, n, d), B = random_tensor(rng, n, d);
    double fast = hs_inner(A, B), slow = hs_brute(A, B);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
  }
}

TEST_CASE("multiplicities sum to n^d") {
  for (int n = 2; n <= 4; ++n) {
    for (int d = 1; d <= 4; ++d) {
      std::int64_t total = 0;
      int len = static_cast<int>(binom(n + d - 1, d));
      for (int i = 0; i < len; ++i)
        total += SymTensor::mult(SymTensor::hom_exponent(n, d, i));
      CHECK(total == static_cast<std::int64_t>(std::llround(std::pow(n, d))));
    }
  }
}

TEST_CASE("entrywise equations compile to literal entry combinations") {
  // A_113 + A_123 - A_223 = 2 constrains those entries themselves.
  TensorEquation eq;
  eq.terms = {{exponent_from_subscripts(4, {1, 1, 3}), 1.0},
              {exponent_from_subscripts(4, {1, 2, 3}), 1.0},
              {exponent_from_subscripts(4, {2, 2, 3}), -1.0}};
  eq.rhs = 2.0;
  auto fns = equations_to_functionals(4, 3, {eq});
  REQUIRE(fns.size() == 1);
  const Poly& f = fns[0].first;
  CHECK(f.coeff({2, 0, 1, 0}) == 1.0);
  CHECK(f.coeff({1, 1, 1, 0}) == 1.0);
  CHECK(f.coeff({0, 2, 1, 0}) == -1.0);
  CHECK(fns[0].second == 2.0);

  // evaluating on the htms of a decomposition equals the signed atom sum
  Rng rng(3);
  Decomposition dec;
  dec.n = 4;
  dec.d = 3;
  dec.terms = {{+1, 1.5, random_unit(rng, 4)}, {-1, 0.5, random_unit(rng, 4)}};
  SymTensor A = reconstruct(dec);
  double via_entries = A.at({2, 0, 1, 0}) + A.at({1, 1, 1, 0}) - A.at({0, 2, 1, 0});
  double via_atoms = 0;
  for (const auto& t : dec.terms) via_atoms += t.sign * t.weight * f.eval(t.atom);
  CHECK(via_entries == doctest::Approx(via_atoms).epsilon(1e-12));

  // single-entry specification of the leading diagonal slot
  TensorEquation single;
  single.terms = {{exponent_from_subscripts(4, {1, 1, 1}), 1.0}};
  single.rhs = 3.0;
  auto sf = equations_to_functionals(4, 3, {single});
  CHECK(sf[0].first.coeff({3, 0, 0, 0}) == 1.0);
}

TEST_CASE("reconstruct of a single term") {
  Decomposition dec;
  dec.n = 3;
  dec.d = 3;
  dec.terms.push_back({+1, 1.0, vec({1, 0, 0})});
  SymTensor A = reconstruct(dec);
  CHECK(A.at({3, 0, 0}) == 1.0);
  double rest = 0;
  for (int i = 0; i < A.size(); ++i) rest += std::abs(A.vals[i]);
  CHECK(rest == 1.0);
}

TEST_CASE("published 4-digit atoms reproduce the quartic data within 2e-2") {
  Decomposition dec;
  dec.n = 4;
  dec.d = 4;
  dec.terms = {{+1, 36.0156, vec({0.6920, 0.1453, 0.6920, 0.1453})},
               {+1, 29.4743, vec({0.1954, 0.6796, 0.1954, 0.6796})}};
  auto mono = [](Exponent a) { return Poly::monomial(4, std::move(a)); };
  std::vector<std::pair<Poly, double>> fns = {
      {mono({3, 1, 0, 0}) - mono({2, 2, 0, 0}), 1.0},
      {mono({0, 3, 1, 0}) - mono({0, 2, 2, 0}), 1.0},
      {mono({4, 0, 0, 0}) - mono({0, 4, 0, 0}), 2.0},
      {mono({0, 0, 3, 1}) - mono({0, 0, 2, 2}), 1.0},
      {mono({1, 0, 0, 3}) - mono({2, 0, 0, 2}), 1.0},
      {mono({0, 0, 4, 0}) - mono({0, 0, 0, 4}), 2.0},
  };
  CHECK(residual(dec, fns) <= 2e-2);
}

TEST_CASE("positive recovery from synthesized sphere data") {
  Rng rng(11);
  SemialgebraicSet K = SemialgebraicSet::unit_sphere(3);
  Decomposition planted;
  planted.n = 3;
  planted.d = 3;
  planted.terms = {{+1, 1.2, random_unit(rng, 3)}, {+1, 0.8, random_unit(rng, 3)}};
  std::vector<TensorEquation> eqs;
  SymTensor A = reconstruct(planted);
  Rng pick(5);
  for (int i = 0; i < 4; ++i) {
    TensorEquation eq;
    for (int t = 0; t < 2; ++t) {
      int slot = pick.uniform_int(A.size());
      eq.terms.emplace_back(SymTensor::hom_exponent(3, 3, slot), pick.normal());
    }
    eq.rhs = 0;
    for (const auto& [a, c] : eq.terms) eq.rhs += c * A.at(a);
    eqs.push_back(std::move(eq));
  }
  auto fns = equations_to_functionals(3, 3, eqs);
  HierarchyOptions opt;
  opt.seed = 2;
  TensorRecovery res = recover_positive(K, fns, 3, opt);
  REQUIRE(res.report.outcome == RecoveryOutcome::Recovered);
  REQUIRE(res.dec.has_value());
  CHECK(res.dec->r() <= 4);
  CHECK(res.dec->r1() == res.dec->r());  // all signs positive
  CHECK(res.residual <= 1e-6);
  SymTensor B = reconstruct(*res.dec);
  for (const auto& [f, b] : fns) {
    double v = 0;
    for (const auto& t : res.dec->terms) v += t.sign * t.weight * f.eval(t.atom);
    CHECK(std::abs(v - b) <= 1e-6);
  }
  (void)B;
}

TEST_CASE("general recovery splits signs by component") {
  Rng rng(23);
  SemialgebraicSet K = SemialgebraicSet::unit_sphere(3);
  Decomposition planted;
  planted.n = 3;
  planted.d = 3;
  planted.terms = {{+1, 1.1, random_unit(rng, 3)},
                   {+1, 0.6, random_unit(rng, 3)},
                   {-1, 0.9, random_unit(rng, 3)}};
  SymTensor A = reconstruct(planted);
  std::vector<TensorEquation> eqs;
  Rng pick(9);
  for (int i = 0; i < 6; ++i) {
    TensorEquation eq;
    for (int t = 0; t < 2; ++t) {
      int slot = pick.uniform_int(A.size());
      eq.terms.emplace_back(SymTensor::hom_exponent(3, 3, slot), pick.normal());
    }
    eq.rhs = 0;
    for (const auto& [a, c] : eq.terms) eq.rhs += c * A.at(a);
    eqs.push_back(std::move(eq));
  }
  auto fns = equations_to_functionals(3, 3, eqs);
  HierarchyOptions opt;
  opt.seed = 6;
  TensorRecovery res = recover_general(K, fns, 3, opt);
  REQUIRE(res.report.outcome == RecoveryOutcome::Recovered);
  REQUIRE(res.dec.has_value());
  CHECK(res.dec->r() <= 6);
  CHECK(res.residual <= 1e-6);
  for (const auto& t : res.dec->terms) {
    CHECK(t.weight > 0);
    CHECK(std::abs(t.atom.norm() - 1.0) <= 1e-6);
  }
}

TEST_CASE("no measurements yields the zero tensor") {
  SemialgebraicSet K = SemialgebraicSet::unit_sphere(2);
  std::vector<std::pair<Poly, double>> none;
  // keep one trivially-zero functional so the assembly has m >= 1
  none.emplace_back(Poly::monomial(2, {2, 1}), 0.0);
  HierarchyOptions opt;
  TensorRecovery pos = recover_positive(K, none, 3, opt);
  REQUIRE(pos.report.outcome == RecoveryOutcome::Recovered);
  CHECK(pos.dec->r() == 0);
  TensorRecovery gen = recover_general(K, none, 3, opt);
  REQUIRE(gen.report.outcome == RecoveryOutcome::Recovered);
  CHECK(gen.dec->r() == 0);
}

TEST_CASE("tensor recovery rejects inhomogeneous sets") {
  SemialgebraicSet K = SemialgebraicSet::unit_sphere(2);
  K.inequalities.push_back(Poly::variable(2, 0) + Poly::constant(2, 1.0));
  std::vector<std::pair<Poly, double>> fns = {{Poly::monomial(2, {2, 1}), 1.0}};
  CHECK_THROWS(recover_positive(K, fns, 3, HierarchyOptions{}));
  SemialgebraicSet S;
  S.n = 2;  // no sphere flag
  CHECK_THROWS(recover_general(S, fns, 3, HierarchyOptions{}));
}
