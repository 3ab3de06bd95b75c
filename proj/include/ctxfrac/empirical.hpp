#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ctxfrac/errors.hpp"
#include "ctxfrac/rational.hpp"
#include "ctxfrac/scenario.hpp"

namespace ctxfrac {

// An empirical model (behaviour): one probability distribution per context,
// stored flattened as the length-m vector indexed by local assignments.
template <class Scalar>
struct EmpiricalModel {
  ScenarioPtr scenario;
  Eigen::Vector<Scalar, Eigen::Dynamic> flat;

  auto table(int c) const {
    return flat.segment(scenario->context_offsets[c],
                        scenario->context_outcome_count(c));
  }
};

namespace detail {

template <class Scalar>
void check_same_scenario(const EmpiricalModel<Scalar>& a,
                         const EmpiricalModel<Scalar>& b) {
  if (!(*a.scenario == *b.scenario))
    raise(ErrorCode::ScenarioMismatch, "models live on different scenarios");
}

}  // namespace detail

// Wraps a flat vector without validation; for operations whose outputs are
// valid by construction.
template <class Scalar>
EmpiricalModel<Scalar> model_from_flat(ScenarioPtr scenario,
                                       Eigen::Vector<Scalar, Eigen::Dynamic> flat) {
  if (flat.size() != scenario->local_count)
    raise(ErrorCode::ShapeMismatch, "flat vector length is not m");
  return {std::move(scenario), std::move(flat)};
}

// Strict validation: entries >= -tol, every context sums to 1 within tol.
template <class Scalar>
EmpiricalModel<Scalar> make_model(ScenarioPtr scenario,
                                  const std::vector<std::vector<Scalar>>& tables,
                                  Scalar tol = numeric_policy<Scalar>::validation()) {
  const auto& s = *scenario;
  if (static_cast<int>(tables.size()) != s.context_count())
    raise(ErrorCode::ShapeMismatch, "one table per context required");
  Eigen::Vector<Scalar, Eigen::Dynamic> flat(s.local_count);
  for (int c = 0; c < s.context_count(); ++c) {
    const auto& t = tables[c];
    if (static_cast<long long>(t.size()) != s.context_outcome_count(c))
      raise(ErrorCode::ShapeMismatch,
            "table for context #" + std::to_string(c) + " has wrong length");
    Scalar sum(0);
    for (size_t i = 0; i < t.size(); ++i) {
      if (t[i] < -tol)
        raise(ErrorCode::NegativeProbability,
              "negative probability in context #" + std::to_string(c));
      flat[s.context_offsets[c] + static_cast<long long>(i)] = t[i];
      sum += t[i];
    }
    using std::abs;
    if (abs(sum - Scalar(1)) > tol)
      raise(ErrorCode::NormalizationViolation,
            "context #" + std::to_string(c) + " does not sum to 1");
  }
  return {std::move(scenario), std::move(flat)};
}

// Repair mode: rescales each context to sum exactly 1 and reports the
// original sums so callers can surface the adjustment.
template <class Scalar>
std::pair<EmpiricalModel<Scalar>, std::vector<Scalar>> make_model_renormalized(
    ScenarioPtr scenario, const std::vector<std::vector<Scalar>>& tables,
    Scalar tol = numeric_policy<Scalar>::validation()) {
  const auto& s = *scenario;
  if (static_cast<int>(tables.size()) != s.context_count())
    raise(ErrorCode::ShapeMismatch, "one table per context required");
  Eigen::Vector<Scalar, Eigen::Dynamic> flat(s.local_count);
  std::vector<Scalar> sums;
  for (int c = 0; c < s.context_count(); ++c) {
    const auto& t = tables[c];
    if (static_cast<long long>(t.size()) != s.context_outcome_count(c))
      raise(ErrorCode::ShapeMismatch,
            "table for context #" + std::to_string(c) + " has wrong length");
    Scalar sum(0);
    for (const Scalar& p : t) {
      if (p < -tol)
        raise(ErrorCode::NegativeProbability,
              "negative probability in context #" + std::to_string(c));
      sum += p;
    }
    if (!(sum > Scalar(0)))
      raise(ErrorCode::NormalizationViolation,
            "context #" + std::to_string(c) + " sums to zero, cannot rescale");
    for (size_t i = 0; i < t.size(); ++i)
      flat[s.context_offsets[c] + static_cast<long long>(i)] = t[i] / sum;
    sums.push_back(sum);
  }
  return {EmpiricalModel<Scalar>{std::move(scenario), std::move(flat)}, sums};
}

// Marginal of context c onto an ordered subset of its measurements (given as
// measurement indices).  The returned vector is mixed-radix over the subset
// in the order passed in, first entry = most significant digit.
template <class Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> marginalize(const EmpiricalModel<Scalar>& e,
                                                  int c,
                                                  const std::vector<int>& subset) {
  const auto& s = *e.scenario;
  const auto& ctx = s.contexts[c];
  std::vector<int> positions;  // of each subset measurement inside the context
  for (int x : subset) {
    auto it = std::find(ctx.begin(), ctx.end(), x);
    if (it == ctx.end())
      raise(ErrorCode::NotASubset,
            "measurement '" + s.measurements[x] + "' is not in the context");
    positions.push_back(static_cast<int>(it - ctx.begin()));
  }
  long long out_size = 1;
  for (int x : subset) out_size *= static_cast<long long>(s.outcomes[x].size());
  Eigen::Vector<Scalar, Eigen::Dynamic> out(out_size);
  out.setZero();
  const long long card = s.context_outcome_count(c);
  std::vector<int> digits(ctx.size(), 0);
  for (long long i = 0; i < card; ++i) {
    long long key = 0;
    for (size_t k = 0; k < subset.size(); ++k)
      key = key * static_cast<long long>(s.outcomes[subset[k]].size()) +
            digits[positions[k]];
    out[key] += e.flat[s.context_offsets[c] + i];
    for (int k = static_cast<int>(ctx.size()) - 1; k >= 0; --k) {
      if (++digits[k] < static_cast<int>(s.outcomes[ctx[k]].size())) break;
      digits[k] = 0;
    }
  }
  return out;
}

// Label-based convenience overload.
template <class Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> marginalize(
    const EmpiricalModel<Scalar>& e, int c,
    const std::vector<std::string>& subset_labels) {
  std::vector<int> subset;
  for (const auto& label : subset_labels) {
    auto it = e.scenario->measurement_index.find(label);
    if (it == e.scenario->measurement_index.end())
      raise(ErrorCode::NotASubset, "unknown measurement '" + label + "'");
    subset.push_back(it->second);
  }
  return marginalize(e, c, subset);
}

// Where the worst marginal disagreement between two overlapping contexts sits.
template <class Scalar>
struct SignallingReport {
  bool nonsignalling = true;
  Scalar max_discrepancy = Scalar(0);
  int context_a = -1;
  int context_b = -1;
  std::vector<int> intersection;   // measurement indices, canonical order
  long long outcome_index = -1;    // into the intersection's joint outcomes
};

namespace detail {

// Shared pairwise-marginal sweep behind is_nonsignalling and mim.
template <class Scalar, class Visit>
void for_each_marginal_gap(const EmpiricalModel<Scalar>& e, Visit&& visit) {
  const auto& s = *e.scenario;
  for (int i = 0; i < s.context_count(); ++i) {
    for (int j = i + 1; j < s.context_count(); ++j) {
      std::vector<int> inter;
      for (int x : s.contexts[i])
        if (std::find(s.contexts[j].begin(), s.contexts[j].end(), x) !=
            s.contexts[j].end())
          inter.push_back(x);
      if (inter.empty()) continue;
      std::sort(inter.begin(), inter.end());  // canonical order
      auto mi = marginalize(e, i, inter);
      auto mj = marginalize(e, j, inter);
      for (long long t = 0; t < mi.size(); ++t) {
        using std::abs;
        visit(i, j, inter, t, abs(Scalar(mi[t] - mj[t])));
      }
    }
  }
}

}  // namespace detail

template <class Scalar>
SignallingReport<Scalar> is_nonsignalling(
    const EmpiricalModel<Scalar>& e,
    Scalar tol = numeric_policy<Scalar>::validation()) {
  SignallingReport<Scalar> report;
  detail::for_each_marginal_gap(e, [&](int i, int j, const std::vector<int>& inter,
                                       long long t, Scalar gap) {
    if (gap > report.max_discrepancy) {
      report.max_discrepancy = gap;
      report.context_a = i;
      report.context_b = j;
      report.intersection = inter;
      report.outcome_index = t;
    }
  });
  report.nonsignalling = !(report.max_discrepancy > tol);
  return report;
}

// Maximum incompatibility of marginals: the largest pairwise marginal
// disagreement across overlapping contexts; 0 when no contexts overlap.
template <class Scalar>
Scalar mim(const EmpiricalModel<Scalar>& e) {
  Scalar worst(0);
  detail::for_each_marginal_gap(
      e, [&](int, int, const std::vector<int>&, long long, Scalar gap) {
        if (gap > worst) worst = gap;
      });
  return worst;
}

// Total variation distance between models on one scenario:
// max over contexts of half the L1 distance of the context tables.
template <class Scalar>
Scalar total_variation(const EmpiricalModel<Scalar>& a,
                       const EmpiricalModel<Scalar>& b) {
  detail::check_same_scenario(a, b);
  Scalar worst(0);
  for (int c = 0; c < a.scenario->context_count(); ++c) {
    Scalar half = (a.table(c) - b.table(c)).cwiseAbs().sum() / Scalar(2);
    if (half > worst) worst = half;
  }
  return worst;
}

// Context-wise convex combination: lambda on a, (1 - lambda) on b.
template <class Scalar>
EmpiricalModel<Scalar> mix(const EmpiricalModel<Scalar>& a,
                           const EmpiricalModel<Scalar>& b, Scalar lambda) {
  detail::check_same_scenario(a, b);
  if (lambda < Scalar(0) || lambda > Scalar(1))
    raise(ErrorCode::LambdaOutOfRange, "mixing weight must be in [0,1]");
  Eigen::Vector<Scalar, Eigen::Dynamic> flat =
      lambda * a.flat + (Scalar(1) - lambda) * b.flat;
  return {a.scenario, std::move(flat)};
}

namespace detail {

// Uniform double in [0,1) built from the top 53 bits, so results do not
// depend on the platform's distribution implementation.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Moves at most eps of probability mass within each context along a seeded
// pseudorandom zero-sum direction, then shrinks the step to keep entries
// nonnegative.  By construction total_variation(e, result) <= eps, and the
// result is identical for identical seeds.
inline EmpiricalModel<double> perturb(const EmpiricalModel<double>& e, double eps,
                                      std::uint64_t seed) {
  const auto& s = *e.scenario;
  Eigen::VectorXd flat = e.flat;
  if (eps <= 0.0) return {e.scenario, std::move(flat)};
  eps = std::min(eps, 1.0);
  std::mt19937_64 rng(seed);
  for (int c = 0; c < s.context_count(); ++c) {
    const long long off = s.context_offsets[c];
    const long long card = s.context_outcome_count(c);
    if (card < 2) continue;
    Eigen::VectorXd dir(card);
    for (long long i = 0; i < card; ++i) dir[i] = detail::uniform01(rng);
    dir.array() -= dir.mean();  // zero-sum: context totals stay put
    const double l1 = dir.cwiseAbs().sum();
    if (l1 <= 0.0) continue;
    dir *= 2.0 * eps / l1;  // half the L1 norm is now exactly eps
    double shrink = 1.0;
    for (long long i = 0; i < card; ++i)
      if (dir[i] < 0.0) shrink = std::min(shrink, flat[off + i] / -dir[i]);
    flat.segment(off, card) += shrink * dir;
  }
  return {e.scenario, std::move(flat)};
}

}  // namespace ctxfrac
