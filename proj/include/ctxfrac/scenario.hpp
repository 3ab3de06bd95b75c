#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ctxfrac/errors.hpp"

namespace ctxfrac {

// A measurement scenario: measurement labels X, a covering family of maximal
// contexts, and an ordered outcome list per measurement.
//
// Ordering conventions (frozen at construction, relied on everywhere):
//  * measurements, contexts and outcome lists keep their declared order;
//  * a global assignment is a mixed-radix number over the measurements in
//    declared order, first measurement = most significant digit;
//  * a local assignment is a pair (context, joint outcome); indices are laid
//    out in contiguous blocks per context, in context order, and the joint
//    outcome within a context is a mixed-radix number over the context's
//    measurements in their declared order, first = most significant.
struct MeasurementScenario {
  std::vector<std::string> measurements;
  std::vector<std::vector<std::string>> outcomes;  // aligned with measurements
  std::vector<std::vector<std::string>> context_labels;

  // Derived, frozen by make_scenario:
  std::vector<std::vector<int>> contexts;   // measurement indices per context
  std::vector<long long> context_offsets;   // local-index block starts, size k+1
  std::map<std::string, int> measurement_index;
  unsigned long long global_count = 0;      // n = prod |O_x|
  bool global_count_overflow = false;
  long long local_count = 0;                // m = sum |O_C|
  std::vector<std::string> warnings;

  int context_count() const { return static_cast<int>(contexts.size()); }
  int measurement_count() const { return static_cast<int>(measurements.size()); }

  long long context_outcome_count(int c) const {
    return context_offsets[c + 1] - context_offsets[c];
  }

  friend bool operator==(const MeasurementScenario& a, const MeasurementScenario& b) {
    return a.measurements == b.measurements && a.outcomes == b.outcomes &&
           a.context_labels == b.context_labels;
  }
};

using ScenarioPtr = std::shared_ptr<const MeasurementScenario>;

// Guard for the dense incidence matrix: n is exponential in |X|.
inline constexpr long long kDefaultSizeCap = 1'000'000;

inline ScenarioPtr make_scenario(
    std::vector<std::string> measurements,
    std::vector<std::vector<std::string>> contexts,
    const std::map<std::string, std::vector<std::string>>& outcomes) {
  auto s = std::make_shared<MeasurementScenario>();
  s->measurements = std::move(measurements);
  s->context_labels = std::move(contexts);

  if (s->measurements.empty())
    raise(ErrorCode::CoverViolation, "scenario has no measurements");
  for (int i = 0; i < static_cast<int>(s->measurements.size()); ++i) {
    auto [it, fresh] = s->measurement_index.emplace(s->measurements[i], i);
    (void)it;
    if (!fresh)
      raise(ErrorCode::DuplicateLabel,
            "duplicate measurement label '" + s->measurements[i] + "'");
  }

  // Outcome lists: one per measurement, in the measurement's declared order.
  s->outcomes.resize(s->measurements.size());
  for (const auto& [label, list] : outcomes) {
    auto it = s->measurement_index.find(label);
    if (it == s->measurement_index.end())
      raise(ErrorCode::ShapeMismatch,
            "outcomes listed for unknown measurement '" + label + "'");
    if (list.empty())
      raise(ErrorCode::ShapeMismatch,
            "measurement '" + label + "' has an empty outcome list");
    std::set<std::string> seen;
    for (const auto& o : list)
      if (!seen.insert(o).second)
        raise(ErrorCode::DuplicateLabel,
              "duplicate outcome '" + o + "' for measurement '" + label + "'");
    if (list.size() == 1)
      s->warnings.push_back("measurement '" + label +
                            "' has a single outcome (degenerate)");
    s->outcomes[it->second] = list;
  }
  for (int i = 0; i < s->measurement_count(); ++i)
    if (s->outcomes[i].empty())
      raise(ErrorCode::ShapeMismatch,
            "no outcomes listed for measurement '" + s->measurements[i] + "'");

  // Contexts: nonempty, known labels, no duplicate label within a context,
  // no duplicate context (as a set), and the union must cover X.
  if (s->context_labels.empty())
    raise(ErrorCode::CoverViolation, "scenario has no contexts");
  std::set<std::vector<int>> context_sets;
  std::vector<bool> covered(s->measurements.size(), false);
  for (const auto& ctx : s->context_labels) {
    if (ctx.empty()) raise(ErrorCode::EmptyContext, "a context is empty");
    std::vector<int> indices;
    std::set<int> within;
    for (const auto& label : ctx) {
      auto it = s->measurement_index.find(label);
      if (it == s->measurement_index.end())
        raise(ErrorCode::UnknownMeasurementInContext,
              "context uses unknown measurement '" + label + "'");
      if (!within.insert(it->second).second)
        raise(ErrorCode::DuplicateLabel,
              "measurement '" + label + "' repeated within a context");
      indices.push_back(it->second);
      covered[it->second] = true;
    }
    std::vector<int> as_set(within.begin(), within.end());
    if (!context_sets.insert(as_set).second)
      raise(ErrorCode::DuplicateLabel, "duplicate context");
    s->contexts.push_back(std::move(indices));
  }
  for (int i = 0; i < s->measurement_count(); ++i)
    if (!covered[i])
      raise(ErrorCode::CoverViolation,
            "measurement '" + s->measurements[i] + "' is in no context");

  // Lint: the cover is usually an anti-chain, but sub-contexts are legal.
  for (int i = 0; i < s->context_count(); ++i)
    for (int j = 0; j < s->context_count(); ++j) {
      if (i == j) continue;
      const auto& ci = s->contexts[i];
      const auto& cj = s->contexts[j];
      if (ci.size() >= cj.size()) continue;
      bool subset = std::all_of(ci.begin(), ci.end(), [&](int x) {
        return std::find(cj.begin(), cj.end(), x) != cj.end();
      });
      if (subset)
        s->warnings.push_back("context #" + std::to_string(i) +
                              " is a subset of context #" + std::to_string(j));
    }

  // Index space sizes.
  s->global_count = 1;
  for (const auto& list : s->outcomes) {
    unsigned long long card = list.size();
    if (s->global_count > (1ULL << 62) / card) {
      s->global_count_overflow = true;
      s->global_count = 0;
      break;
    }
    s->global_count *= card;
  }
  s->context_offsets.assign(1, 0);
  for (const auto& ctx : s->contexts) {
    long long card = 1;
    for (int x : ctx) card *= static_cast<long long>(s->outcomes[x].size());
    s->context_offsets.push_back(s->context_offsets.back() + card);
  }
  s->local_count = s->context_offsets.back();
  return s;
}

// ---- global assignment index <-> one outcome digit per measurement ----

inline unsigned long long encode_global(const MeasurementScenario& s,
                                        const std::vector<int>& digits) {
  if (s.global_count_overflow)
    raise(ErrorCode::SizeCapExceeded, "global assignment space overflows");
  if (digits.size() != s.outcomes.size())
    raise(ErrorCode::ShapeMismatch, "one digit per measurement required");
  unsigned long long idx = 0;
  for (int i = 0; i < s.measurement_count(); ++i) {
    int card = static_cast<int>(s.outcomes[i].size());
    if (digits[i] < 0 || digits[i] >= card)
      raise(ErrorCode::BadOutcomeChoice, "outcome digit out of range");
    idx = idx * card + static_cast<unsigned long long>(digits[i]);
  }
  return idx;
}

inline std::vector<int> decode_global(const MeasurementScenario& s,
                                      unsigned long long index) {
  if (s.global_count_overflow)
    raise(ErrorCode::SizeCapExceeded, "global assignment space overflows");
  if (index >= s.global_count)
    raise(ErrorCode::BadOutcomeChoice, "global assignment index out of range");
  std::vector<int> digits(s.measurements.size(), 0);
  for (int i = s.measurement_count() - 1; i >= 0; --i) {
    unsigned long long card = s.outcomes[i].size();
    digits[i] = static_cast<int>(index % card);
    index /= card;
  }
  return digits;
}

// ---- local assignment index <-> (context, joint outcome digits) ----

inline long long encode_local(const MeasurementScenario& s, int context,
                              const std::vector<int>& digits) {
  if (context < 0 || context >= s.context_count())
    raise(ErrorCode::BadOutcomeChoice, "context index out of range");
  const auto& ctx = s.contexts[context];
  if (digits.size() != ctx.size())
    raise(ErrorCode::ShapeMismatch, "one digit per context measurement required");
  long long within = 0;
  for (size_t k = 0; k < ctx.size(); ++k) {
    int card = static_cast<int>(s.outcomes[ctx[k]].size());
    if (digits[k] < 0 || digits[k] >= card)
      raise(ErrorCode::BadOutcomeChoice, "outcome digit out of range");
    within = within * card + digits[k];
  }
  return s.context_offsets[context] + within;
}

struct LocalAssignment {
  int context;
  std::vector<int> digits;
};

inline LocalAssignment decode_local(const MeasurementScenario& s, long long index) {
  if (index < 0 || index >= s.local_count)
    raise(ErrorCode::BadOutcomeChoice, "local assignment index out of range");
  int context = 0;
  while (s.context_offsets[context + 1] <= index) ++context;
  long long within = index - s.context_offsets[context];
  const auto& ctx = s.contexts[context];
  std::vector<int> digits(ctx.size(), 0);
  for (int k = static_cast<int>(ctx.size()) - 1; k >= 0; --k) {
    long long card = s.outcomes[ctx[k]].size();
    digits[k] = static_cast<int>(within % card);
    within /= card;
  }
  return {context, std::move(digits)};
}

// Restriction of a global assignment to a context, as a local index.
inline long long restrict_global(const MeasurementScenario& s,
                                 const std::vector<int>& global_digits,
                                 int context) {
  const auto& ctx = s.contexts[context];
  long long within = 0;
  for (int x : ctx)
    within = within * static_cast<long long>(s.outcomes[x].size()) + global_digits[x];
  return s.context_offsets[context] + within;
}

// The m-by-n 0/1 matrix whose entry ((C,s), g) is 1 iff g restricted to C is s.
// Dense on purpose: n is exponential, so a size cap guards the allocation.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> incidence_matrix(
    const MeasurementScenario& s, long long size_cap = kDefaultSizeCap) {
  if (s.global_count_overflow)
    raise(ErrorCode::SizeCapExceeded, "global assignment space overflows");
  const unsigned long long n = s.global_count;
  const long long m = s.local_count;
  if (static_cast<unsigned long long>(m) * n >
      static_cast<unsigned long long>(size_cap))
    raise(ErrorCode::SizeCapExceeded,
          "incidence matrix would hold " + std::to_string(m * n) +
              " entries, cap is " + std::to_string(size_cap));
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M(m, n);
  M.setZero();
  std::vector<int> digits(s.measurements.size(), 0);
  for (unsigned long long g = 0; g < n; ++g) {
    for (int c = 0; c < s.context_count(); ++c)
      M(restrict_global(s, digits, c), static_cast<long long>(g)) = Scalar(1);
    // Odometer step over the mixed-radix digits, last measurement fastest.
    for (int i = s.measurement_count() - 1; i >= 0; --i) {
      if (++digits[i] < static_cast<int>(s.outcomes[i].size())) break;
      digits[i] = 0;
    }
  }
  return M;
}

}  // namespace ctxfrac
