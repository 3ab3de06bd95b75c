#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>

#include "ctxfrac/empirical.hpp"
#include "ctxfrac/errors.hpp"
#include "ctxfrac/lp.hpp"
#include "ctxfrac/scenario.hpp"

namespace ctxfrac {

// Outcome of a fraction computation: the consistent weight (noncontextual or
// non-signalling), the optimal subdistribution over global assignments, and
// the dual multipliers over local assignments.
template <class Scalar>
struct FractionResult {
  Scalar value = Scalar(0);
  Eigen::Vector<Scalar, Eigen::Dynamic> witness;  // length n
  Eigen::Vector<Scalar, Eigen::Dynamic> dual;     // length m
  long long iterations = 0;
};

// e = lambda * part_a + (1 - lambda) * part_b.  A part at weight zero
// carries no information and is left empty.
template <class Scalar>
struct Decomposition {
  Scalar lambda = Scalar(0);
  std::optional<EmpiricalModel<Scalar>> part_a;
  std::optional<EmpiricalModel<Scalar>> part_b;

  const EmpiricalModel<Scalar>& consistent_part() const {
    if (!part_a)
      raise(ErrorCode::DegenerateResidual,
            "weight is zero, no consistent part was extracted");
    return *part_a;
  }
  const EmpiricalModel<Scalar>& residual() const {
    if (!part_b)
      raise(ErrorCode::DegenerateResidual,
            "weight is one, the residual part is empty");
    return *part_b;
  }
};

template <class Scalar>
LinearProgram<Scalar> ncf_program(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& incidence,
    const Eigen::Vector<Scalar, Eigen::Dynamic>& flat) {
  LinearProgram<Scalar> lp;
  lp.objective = Eigen::Vector<Scalar, Eigen::Dynamic>::Ones(incidence.cols());
  lp.lhs = incidence;
  lp.rhs = flat;
  lp.senses.assign(incidence.rows(), Sense::Le);
  lp.nonnegative = true;
  return lp;
}

template <class Scalar>
LinearProgram<Scalar> nsf_program(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& incidence,
    const Eigen::Vector<Scalar, Eigen::Dynamic>& flat) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;
  const auto m = incidence.rows();
  LinearProgram<Scalar> lp;
  lp.objective = Vector::Ones(incidence.cols());
  Matrix lhs(2 * m, incidence.cols());
  lhs.topRows(m) = incidence;
  lhs.bottomRows(m) = incidence;
  lp.lhs = std::move(lhs);
  Vector rhs(2 * m);
  rhs.head(m) = flat;
  rhs.tail(m).setZero();
  lp.rhs = std::move(rhs);
  lp.senses.assign(static_cast<size_t>(m), Sense::Le);
  lp.senses.insert(lp.senses.end(), static_cast<size_t>(m), Sense::Ge);
  lp.nonnegative = false;  // negative weights allowed, only M b is pinned
  return lp;
}

namespace detail {

template <class Scalar>
Scalar clamp01(const Scalar& v) {
  if (v < Scalar(0)) return Scalar(0);
  if (v > Scalar(1)) return Scalar(1);
  return v;
}

}  // namespace detail

// Largest weight of a convex decomposition of e into a globally explainable
// part and a remainder: max 1.b subject to M b <= v^e, b >= 0.
template <class Scalar>
FractionResult<Scalar> noncontextual_fraction(const EmpiricalModel<Scalar>& e,
                                              long long size_cap = kDefaultSizeCap) {
  const auto incidence = incidence_matrix<Scalar>(*e.scenario, size_cap);
  auto sol = solve_lp(ncf_program<Scalar>(incidence, e.flat));
  if (sol.status != LpStatus::Optimal)
    raise(ErrorCode::NumericalFailure,
          "fraction program did not reach an optimum");
  FractionResult<Scalar> out;
  out.value = detail::clamp01(sol.objective_value);
  out.witness = std::move(sol.primal);
  out.dual = std::move(sol.dual);
  out.iterations = sol.iterations;
  return out;
}

template <class Scalar>
Scalar contextual_fraction(const EmpiricalModel<Scalar>& e,
                           long long size_cap = kDefaultSizeCap) {
  return Scalar(Scalar(1) - noncontextual_fraction(e, size_cap).value);
}

// Same program with b free and M b >= 0 added: the explainable part may now
// use signed weights, reaching every non-signalling behaviour.
template <class Scalar>
FractionResult<Scalar> nonsignalling_fraction(const EmpiricalModel<Scalar>& e,
                                              long long size_cap = kDefaultSizeCap) {
  const auto incidence = incidence_matrix<Scalar>(*e.scenario, size_cap);
  auto sol = solve_lp(nsf_program<Scalar>(incidence, e.flat));
  if (sol.status != LpStatus::Optimal)
    raise(ErrorCode::NumericalFailure,
          "fraction program did not reach an optimum");
  FractionResult<Scalar> out;
  out.value = detail::clamp01(sol.objective_value);
  out.witness = std::move(sol.primal);
  out.dual = sol.dual.head(incidence.rows());  // multipliers of M b <= v^e
  out.iterations = sol.iterations;
  return out;
}

template <class Scalar>
Scalar signalling_fraction(const EmpiricalModel<Scalar>& e,
                           long long size_cap = kDefaultSizeCap) {
  return Scalar(Scalar(1) - nonsignalling_fraction(e, size_cap).value);
}

namespace detail {

// Split e into (M b)/lambda and the normalized remainder.  Shared by both
// decomposition flavours; only the witness differs.
template <class Scalar>
Decomposition<Scalar> split_by_witness(
    const EmpiricalModel<Scalar>& e,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& incidence,
    const Eigen::Vector<Scalar, Eigen::Dynamic>& witness, const Scalar& lambda) {
  using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;
  const Scalar tol = numeric_policy<Scalar>::validation();
  Decomposition<Scalar> d;
  d.lambda = lambda;
  Vector mass = incidence * witness;
  if (lambda > tol) {
    Vector a = mass / lambda;
    if constexpr (!numeric_policy<Scalar>::exact)
      a = a.cwiseMax(Scalar(0));  // scrub roundoff dust below zero
    d.part_a = model_from_flat(e.scenario, std::move(a));
  }
  if (Scalar(1) - lambda > tol) {
    Vector b = (e.flat - mass) / (Scalar(1) - lambda);
    if constexpr (!numeric_policy<Scalar>::exact) b = b.cwiseMax(Scalar(0));
    d.part_b = model_from_flat(e.scenario, std::move(b));
  }
  return d;
}

}  // namespace detail

// e = NCF * e_free + CF * e_remainder, extracted from the optimal witness.
template <class Scalar>
Decomposition<Scalar> nc_decomposition(const EmpiricalModel<Scalar>& e,
                                       long long size_cap = kDefaultSizeCap) {
  const auto incidence = incidence_matrix<Scalar>(*e.scenario, size_cap);
  auto sol = solve_lp(ncf_program<Scalar>(incidence, e.flat));
  if (sol.status != LpStatus::Optimal)
    raise(ErrorCode::NumericalFailure,
          "fraction program did not reach an optimum");
  return detail::split_by_witness(e, incidence, sol.primal,
                                  detail::clamp01(sol.objective_value));
}

template <class Scalar>
Decomposition<Scalar> ns_decomposition(const EmpiricalModel<Scalar>& e,
                                       long long size_cap = kDefaultSizeCap) {
  const auto incidence = incidence_matrix<Scalar>(*e.scenario, size_cap);
  auto sol = solve_lp(nsf_program<Scalar>(incidence, e.flat));
  if (sol.status != LpStatus::Optimal)
    raise(ErrorCode::NumericalFailure,
          "fraction program did not reach an optimum");
  return detail::split_by_witness(e, incidence, sol.primal,
                                  detail::clamp01(sol.objective_value));
}

// An inequality over local assignments tuned to the model: coefficients a
// satisfy a . v^d <= classical_bound for every deterministic global
// assignment d, while a . v^e recovers the model's contextual fraction.
template <class Scalar>
struct BellInequality {
  Eigen::Vector<Scalar, Eigen::Dynamic> coefficients;  // a = 1/k - y
  Eigen::Vector<Scalar, Eigen::Dynamic> dual;          // raw multipliers y
  Scalar classical_bound = Scalar(0);
  Scalar algebraic_max = Scalar(0);
  Scalar violation = Scalar(0);
  Scalar normalized_violation = Scalar(0);
};

template <class Scalar>
BellInequality<Scalar> bell_inequality(const EmpiricalModel<Scalar>& e,
                                       long long size_cap = kDefaultSizeCap) {
  using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;
  const auto& s = *e.scenario;
  const auto incidence = incidence_matrix<Scalar>(s, size_cap);
  const auto m = incidence.rows();
  const auto n = incidence.cols();

  // The multiplier program: minimize y . v^e over M^T y >= 1, y >= 0,
  // posed as a maximization of the negated objective.
  LinearProgram<Scalar> lp;
  lp.objective = -e.flat;
  lp.lhs = incidence.transpose();
  lp.rhs = Vector::Ones(n);
  lp.senses.assign(static_cast<size_t>(n), Sense::Ge);
  lp.nonnegative = true;
  auto sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    raise(ErrorCode::NumericalFailure,
          "multiplier program did not reach an optimum");

  BellInequality<Scalar> out;
  out.dual = std::move(sol.primal);
  const Scalar inv_k = Scalar(1) / Scalar(s.context_count());
  out.coefficients = Vector::Constant(m, inv_k) - out.dual;

  // Deterministic scores a . v^d = 1 - (M^T y)_d, one per column.
  Vector column_scores = incidence.transpose() * out.dual;
  Scalar worst = Scalar(1) - column_scores[0];
  for (Eigen::Index g = 1; g < n; ++g) {
    const Scalar score = Scalar(1) - column_scores[g];
    if (score > worst) worst = score;
  }
  out.classical_bound = worst;

  // Largest value any normalized behaviour can give the inequality.
  Scalar alg(0);
  for (int c = 0; c < s.context_count(); ++c) {
    const auto seg = out.coefficients.segment(s.context_offsets[c],
                                              s.context_outcome_count(c));
    Scalar best = seg[0];
    for (Eigen::Index i = 1; i < seg.size(); ++i)
      if (seg[i] > best) best = seg[i];
    alg += best;
  }
  out.algebraic_max = alg;

  out.violation = out.coefficients.dot(e.flat);
  const Scalar denom = out.algebraic_max - out.classical_bound;
  if (denom > Scalar(0)) {
    Scalar excess = out.violation - out.classical_bound;
    if (excess < Scalar(0)) excess = Scalar(0);
    out.normalized_violation = excess / denom;
  }
  return out;
}

}  // namespace ctxfrac
