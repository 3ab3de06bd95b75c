#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "ctxfrac/empirical.hpp"
#include "ctxfrac/errors.hpp"
#include "ctxfrac/fractions.hpp"
#include "ctxfrac/hvm.hpp"

namespace ctxfrac {

namespace detail {

inline std::string short_number(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string join_numbers(const std::vector<double>& vs) {
  std::string out;
  for (size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ", ";
    out += short_number(vs[i]);
  }
  return out;
}

}  // namespace detail

// How the outcome-determinism defect was obtained from experiment metadata.
enum class EtaKind {
  Manual,           // trusted externally supplied value
  FlipProbability,  // per-context probability that a repeated reading flips
  HardyZero,        // residual mass in cells an ideal model forces to zero
  Repeatability,    // single repetition error eps; eta = 1 - (1-eps)^2
  MaxDeviation,     // worst |p_theory - p_observed| over checked settings
  OutcomeMismatch,  // probability twin measurements of one quantity disagree
};

struct EtaEstimator {
  EtaKind kind = EtaKind::Manual;
  std::vector<double> values;
};

struct Estimate {
  double value = 0.0;
  std::string provenance;
};

namespace detail {

inline void require_unit_interval(const std::vector<double>& vs) {
  for (double v : vs)
    if (!(v >= 0.0 && v <= 1.0))
      raise(ErrorCode::OutOfRange, "estimator inputs must lie in [0,1]");
}

inline double max_of(const std::vector<double>& vs) {
  double best = vs[0];
  for (double v : vs) best = std::max(best, v);
  return best;
}

}  // namespace detail

inline Estimate estimate_eta(const EtaEstimator& est) {
  if (est.values.empty())
    raise(ErrorCode::MissingField, "estimator needs at least one input value");
  detail::require_unit_interval(est.values);
  Estimate out;
  switch (est.kind) {
    case EtaKind::Manual:
      if (est.values.size() != 1)
        raise(ErrorCode::MissingField, "manual estimator takes exactly one value");
      out.value = est.values[0];
      out.provenance = "manual: eta = " + detail::short_number(out.value) +
                       " as supplied";
      break;
    case EtaKind::FlipProbability:
      out.value = detail::max_of(est.values);
      out.provenance =
          "flip_probability: eta = max per-context flip probability of [" +
          detail::join_numbers(est.values) + "]";
      break;
    case EtaKind::HardyZero:
      out.value = detail::max_of(est.values);
      out.provenance =
          "hardy_zero: eta = max residual mass in ideally-zero cells of [" +
          detail::join_numbers(est.values) + "]";
      break;
    case EtaKind::Repeatability: {
      if (est.values.size() != 1)
        raise(ErrorCode::MissingField,
              "repeatability estimator takes exactly one value");
      const double eps = est.values[0];
      out.value = 2.0 * eps - eps * eps;  // 1 - (1 - eps)^2
      out.provenance = "repeatability: eta = 2*eps - eps^2 with eps = " +
                       detail::short_number(eps);
      break;
    }
    case EtaKind::MaxDeviation:
      out.value = detail::max_of(est.values);
      out.provenance =
          "max_deviation: eta = max |p_theory - p_observed| over [" +
          detail::join_numbers(est.values) + "]";
      break;
    case EtaKind::OutcomeMismatch:
      out.value = detail::max_of(est.values);
      out.provenance =
          "outcome_mismatch: eta = max disagreement rate between twin "
          "measurements, over [" +
          detail::join_numbers(est.values) + "]";
      break;
  }
  return out;
}

enum class SigmaPolicy { Zero, SfOfModel, MimOfModel, Manual };

// The parameter-dependence defect is a modelling assumption, not something
// the data alone pins down; each policy documents the assumption it makes.
inline Estimate estimate_sigma(SigmaPolicy policy,
                               const EmpiricalModel<double>* model = nullptr,
                               std::optional<double> manual = std::nullopt) {
  Estimate out;
  switch (policy) {
    case SigmaPolicy::Zero:
      out.value = 0.0;
      out.provenance =
          "assumed: sigma = 0 (parameter independence, e.g. enforced by "
          "spacelike separation)";
      break;
    case SigmaPolicy::SfOfModel:
      if (!model)
        raise(ErrorCode::MissingField, "sigma policy needs the model");
      out.value = signalling_fraction(*model);
      out.provenance =
          "computed: sigma = signalling fraction of the data = " +
          detail::short_number(out.value) +
          " (the smallest value any explanation must admit)";
      break;
    case SigmaPolicy::MimOfModel:
      if (!model)
        raise(ErrorCode::MissingField, "sigma policy needs the model");
      out.value = mim(*model);
      out.provenance =
          "computed: sigma = worst pairwise marginal gap of the data = " +
          detail::short_number(out.value) +
          " (a lower bound on the signalling fraction)";
      break;
    case SigmaPolicy::Manual:
      if (!manual)
        raise(ErrorCode::ManualValueMissing,
              "manual sigma policy needs an explicit value");
      if (!(*manual >= 0.0 && *manual <= 1.0))
        raise(ErrorCode::OutOfRange, "sigma must lie in [0,1]");
      out.value = *manual;
      out.provenance =
          "manual: sigma = " + detail::short_number(*manual) + " as supplied";
      break;
  }
  return out;
}

enum class Verdict { GenuineContextuality, NotCertified, ConditionFailed };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::GenuineContextuality: return "GenuineContextuality";
    case Verdict::NotCertified: return "NotCertified";
    case Verdict::ConditionFailed: return "ConditionFailed";
  }
  return "UnknownVerdict";
}

struct CorrectedInequality {
  double beta_cl = 0.0;
  double beta_max = 0.0;
  double corrected_bound = 0.0;
};

struct CertificationReport {
  double cf = 0.0;
  double sf = 0.0;
  double mim_value = 0.0;
  Estimate eta;
  Estimate sigma;
  double condition_value = 0.0;  // 2*eta + sigma
  bool condition_ok = false;     // strictly below 1
  Verdict verdict = Verdict::NotCertified;
  std::optional<CorrectedInequality> corrected;
};

// Core decision rule.  The defect condition must hold strictly: at
// 2*eta + sigma = 1 maximally contextual classical explanations exist, so
// equality is treated as failure.  Certification additionally demands the
// measured contextuality clear the eta ceiling by a safety margin.
inline CertificationReport certify_from_metrics(double cf, double sf,
                                                double mim_value, Estimate eta,
                                                Estimate sigma) {
  if (!(eta.value >= 0.0 && eta.value <= 1.0))
    raise(ErrorCode::OutOfRange, "eta must lie in [0,1]");
  if (!(sigma.value >= 0.0 && sigma.value <= 1.0))
    raise(ErrorCode::OutOfRange, "sigma must lie in [0,1]");
  CertificationReport r;
  r.cf = cf;
  r.sf = sf;
  r.mim_value = mim_value;
  r.eta = std::move(eta);
  r.sigma = std::move(sigma);
  r.condition_value = 2.0 * r.eta.value + r.sigma.value;
  r.condition_ok = r.condition_value < 1.0;
  if (!r.condition_ok)
    r.verdict = Verdict::ConditionFailed;
  else if (r.cf > r.eta.value + numeric_policy<double>::report())
    r.verdict = Verdict::GenuineContextuality;
  else
    r.verdict = Verdict::NotCertified;
  return r;
}

inline CertificationReport certify(const EmpiricalModel<double>& e, Estimate eta,
                                   Estimate sigma,
                                   long long size_cap = kDefaultSizeCap) {
  const double cf = contextual_fraction(e, size_cap);
  const double sf = signalling_fraction(e, size_cap);
  const double mim_value = mim(e);
  return certify_from_metrics(cf, sf, mim_value, std::move(eta),
                              std::move(sigma));
}

// The ceiling CF <= eta rendered in inequality space: a device losing eta of
// determinism may legitimately reach this much of the algebraic range.
inline double corrected_inequality_bound(double beta_cl, double beta_max,
                                         double eta) {
  if (beta_max < beta_cl)
    raise(ErrorCode::BoundsInverted,
          "algebraic bound must not be below the classical bound");
  return beta_cl + (beta_max - beta_cl) * eta;
}

struct WinterComparison {
  double winter_cf_bound = 0.0;  // factor * eps, the cited ceiling on CF
  double our_cf_bound = 0.0;     // eta = eps under our relaxation
  double winter_saturation_epsilon = 0.0;  // eps at which the cited ceiling
                                           // stops excluding anything
  double our_saturation_eta = 1.0;         // ours only trivializes at eta = 1
};

// Side-by-side with the previously published noise-robust ceiling
// CF <= (sum_i w_i * (k_i - 1) / (beta_max - beta_cl)) * eps, where k_i
// counts the contexts measurement i appears in.  Under our relaxation the
// same eps certifies until CF = eps, a strictly wider window.
inline WinterComparison compare_winter_bound(const std::vector<double>& weights,
                                             const std::vector<int>& degrees,
                                             double beta_cl, double beta_max,
                                             double eps) {
  if (weights.size() != degrees.size() || weights.empty())
    raise(ErrorCode::ShapeMismatch,
          "weights and degrees must pair up one measurement each");
  if (beta_max <= beta_cl)
    raise(ErrorCode::BoundsInverted,
          "algebraic bound must exceed the classical bound");
  if (!(eps >= 0.0 && eps <= 1.0))
    raise(ErrorCode::OutOfRange, "eps must lie in [0,1]");
  double factor_sum = 0.0;
  for (size_t i = 0; i < weights.size(); ++i)
    factor_sum += weights[i] * (degrees[i] - 1);
  if (!(factor_sum > 0.0))
    raise(ErrorCode::OutOfRange,
          "weights and degrees must give a positive correction factor");
  WinterComparison out;
  const double factor = factor_sum / (beta_max - beta_cl);
  out.winter_cf_bound = factor * eps;
  out.our_cf_bound = eps;
  out.winter_saturation_epsilon = 1.0 / factor;
  out.our_saturation_eta = 1.0;
  return out;
}

}  // namespace ctxfrac
