#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "ctxfrac/catalog.hpp"
#include "ctxfrac/empirical.hpp"
#include "ctxfrac/errors.hpp"
#include "ctxfrac/fractions.hpp"
#include "ctxfrac/rational.hpp"

namespace ctxfrac {

// A finite hidden-variable explanation: labels, a prior over them, and one
// behaviour per label, all on a common scenario.
template <class Scalar>
struct HiddenVariableModel {
  std::vector<std::string> lambdas;
  Eigen::Vector<Scalar, Eigen::Dynamic> prior;
  std::vector<EmpiricalModel<Scalar>> behaviours;
};

template <class Scalar>
HiddenVariableModel<Scalar> make_hvm(std::vector<std::string> lambdas,
                                     std::vector<Scalar> prior,
                                     std::vector<EmpiricalModel<Scalar>> behaviours,
                                     Scalar tol = numeric_policy<Scalar>::validation()) {
  if (lambdas.empty() || lambdas.size() != prior.size() ||
      lambdas.size() != behaviours.size())
    raise(ErrorCode::ShapeMismatch,
          "labels, prior, and behaviours must have equal nonzero length");
  Scalar sum(0);
  for (const Scalar& p : prior) {
    if (p < -tol)
      raise(ErrorCode::NegativeProbability, "prior has a negative entry");
    sum += p;
  }
  using std::abs;
  if (abs(sum - Scalar(1)) > tol)
    raise(ErrorCode::NormalizationViolation, "prior does not sum to 1");
  for (size_t i = 1; i < behaviours.size(); ++i)
    if (!(*behaviours[i].scenario == *behaviours[0].scenario))
      raise(ErrorCode::ScenarioMismatch,
            "behaviours live on different scenarios");
  HiddenVariableModel<Scalar> h;
  h.lambdas = std::move(lambdas);
  h.prior = Eigen::Map<const Eigen::Vector<Scalar, Eigen::Dynamic>>(
      prior.data(), static_cast<Eigen::Index>(prior.size()));
  h.behaviours = std::move(behaviours);
  return h;
}

// The behaviour the model predicts: the prior-weighted mixture.
template <class Scalar>
EmpiricalModel<Scalar> realized_behaviour(const HiddenVariableModel<Scalar>& h) {
  Eigen::Vector<Scalar, Eigen::Dynamic> flat =
      Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(
          h.behaviours[0].scenario->local_count);
  for (size_t i = 0; i < h.behaviours.size(); ++i)
    flat += h.prior[static_cast<Eigen::Index>(i)] * h.behaviours[i].flat;
  return model_from_flat(h.behaviours[0].scenario, std::move(flat));
}

// Smallest weight that must sit on a nondeterministic remainder when writing
// h = (1-eta) * d + eta * h'' with d deterministic per context (contexts may
// disagree, so d ranges over per-context Dirac choices).  Choosing each
// context's heaviest cell is optimal, giving 1 - min over contexts of the
// largest cell.
template <class Scalar>
Scalar eta_star(const EmpiricalModel<Scalar>& e) {
  const auto& s = *e.scenario;
  Scalar min_peak(1);
  for (int c = 0; c < s.context_count(); ++c) {
    const auto seg = e.table(c);
    Scalar peak = seg[0];
    for (Eigen::Index i = 1; i < seg.size(); ++i)
      if (seg[i] > peak) peak = seg[i];
    if (peak < min_peak) min_peak = peak;
  }
  return Scalar(Scalar(1) - min_peak);
}

// Smallest weight of a signalling part in any decomposition of the
// behaviour: exactly its signalling fraction.
template <class Scalar>
Scalar sigma_star(const EmpiricalModel<Scalar>& e,
                  long long size_cap = kDefaultSizeCap) {
  return signalling_fraction(e, size_cap);
}

template <class Scalar>
struct HvmAudit {
  Scalar eta = Scalar(0);                          // max over labels
  Scalar sigma = Scalar(0);                        // max over labels
  std::vector<std::pair<Scalar, Scalar>> per_lambda;
  Scalar condition_value = Scalar(0);              // 2*eta + sigma
  bool condition_ok = false;                       // strict: 2*eta+sigma < 1
  Scalar realized_cf = Scalar(0);
};

// Measures every branch, aggregates the worst defects, and -- whenever the
// strict condition 2*eta + sigma < 1 holds -- checks the guaranteed bound
// CF(realized) <= eta.  A violation there means a solver or construction
// bug, not a property of the data, hence the dedicated error.
template <class Scalar>
HvmAudit<Scalar> audit(const HiddenVariableModel<Scalar>& h,
                       long long size_cap = kDefaultSizeCap) {
  HvmAudit<Scalar> a;
  for (const auto& behaviour : h.behaviours) {
    const Scalar eta_l = eta_star(behaviour);
    const Scalar sigma_l = sigma_star(behaviour, size_cap);
    a.per_lambda.emplace_back(eta_l, sigma_l);
    if (eta_l > a.eta) a.eta = eta_l;
    if (sigma_l > a.sigma) a.sigma = sigma_l;
  }
  a.condition_value = Scalar(2) * a.eta + a.sigma;
  a.condition_ok = a.condition_value < Scalar(1);
  a.realized_cf = contextual_fraction(realized_behaviour(h), size_cap);
  if (a.condition_ok && a.realized_cf > a.eta + numeric_policy<Scalar>::gap())
    raise(ErrorCode::BoundGuaranteeViolation,
          "realized contextual fraction exceeds the guaranteed ceiling");
  return a;
}

// The two-branch deterministic signalling explanation of the two-party box:
// each branch pins every context to one joint outcome, the two branches are
// bit-flips of each other, and the equal mixture realizes the box exactly.
template <class Scalar>
HiddenVariableModel<Scalar> pr_box_hvm() {
  auto s = chsh_scenario();
  const Scalar one(1), z(0);
  // First branch: (0,0) on the three aligned contexts, (0,1) on the last.
  std::vector<std::vector<Scalar>> t1{{one, z, z, z},
                                      {one, z, z, z},
                                      {one, z, z, z},
                                      {z, one, z, z}};
  // Second branch: the bitwise flip.
  std::vector<std::vector<Scalar>> t2{{z, z, z, one},
                                      {z, z, z, one},
                                      {z, z, z, one},
                                      {z, z, one, z}};
  return make_hvm<Scalar>({"lambda1", "lambda2"},
                          {frac<Scalar>(1, 2), frac<Scalar>(1, 2)},
                          {make_model<Scalar>(s, t1), make_model<Scalar>(s, t2)});
}

template <class Scalar>
struct BoundaryConstruction {
  HiddenVariableModel<Scalar> hvm;  // single label carrying h_ub
  Scalar alpha;
  Scalar eta;    // computed, equals 1 - alpha
  Scalar sigma;  // computed, equals 2*alpha - 1
  Scalar realized_cf;
};

// Tilted mixture h_ub = alpha*h_S1 + (1-alpha)*h_S2 of the cycle's two
// deterministic signalling vertices.  Along alpha in [1/2, 1] it walks the
// boundary sigma + 2*eta = 1 while staying maximally contextual, showing why
// the audit guarantee requires 2*eta + sigma strictly below 1.
template <class Scalar>
BoundaryConstruction<Scalar> boundary_hvm(int n, const Scalar& alpha,
                                          long long size_cap = kDefaultSizeCap) {
  if (alpha < frac<Scalar>(1, 2) || alpha > Scalar(1))
    raise(ErrorCode::AlphaOutOfRange, "mixing weight must be in [1/2, 1]");
  auto [h1, h2] = ncycle_vertices<Scalar>(n);
  BoundaryConstruction<Scalar> out{
      make_hvm<Scalar>({"lambda"}, {Scalar(1)}, {mix(h1, h2, alpha)}),
      alpha, Scalar(0), Scalar(0), Scalar(0)};
  const auto& h_ub = out.hvm.behaviours[0];
  out.eta = eta_star(h_ub);
  out.sigma = sigma_star(h_ub, size_cap);
  out.realized_cf = contextual_fraction(h_ub, size_cap);
  using std::abs;
  const Scalar gap = numeric_policy<Scalar>::gap();
  const bool closed_forms_hold =
      abs(Scalar(out.eta - (Scalar(1) - alpha))) <= gap &&
      abs(Scalar(out.sigma - (Scalar(2) * alpha - Scalar(1)))) <= gap &&
      abs(Scalar(out.sigma + Scalar(2) * out.eta - Scalar(1))) <= gap &&
      abs(Scalar(out.realized_cf - Scalar(1))) <= gap;
  if (!closed_forms_hold)
    raise(ErrorCode::NumericalFailure,
          "boundary construction failed its closed-form cross-check");
  return out;
}

enum class CountVerdict { Genuine, NotCertified };

// Certification criterion under fully deterministic hidden variables with at
// most sigma_prime prior weight on parameter-dependent ones: contextuality
// is genuine only when CF exceeds that weight.
template <class Scalar>
CountVerdict deterministic_count_decomposition(const EmpiricalModel<Scalar>& e,
                                               const Scalar& sigma_prime,
                                               long long size_cap = kDefaultSizeCap) {
  if (sigma_prime < Scalar(0) || sigma_prime > Scalar(1))
    raise(ErrorCode::OutOfRange, "prior weight must be in [0,1]");
  const Scalar cf = contextual_fraction(e, size_cap);
  return cf > sigma_prime + Scalar(numeric_policy<Scalar>::report())
             ? CountVerdict::Genuine
             : CountVerdict::NotCertified;
}

}  // namespace ctxfrac
