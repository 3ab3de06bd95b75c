#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ctxfrac/empirical.hpp"
#include "ctxfrac/errors.hpp"
#include "ctxfrac/rational.hpp"
#include "ctxfrac/scenario.hpp"

namespace ctxfrac {

template <class Scalar>
Scalar sqrt2_value();

template <>
inline double sqrt2_value<double>() {
  return std::sqrt(2.0);
}

// Continued-fraction convergent 1607521/1136689; it differs from sqrt(2) by
// about 2.8e-13, comfortably below the 1e-12 bar the exact backend promises.
template <>
inline Rational sqrt2_value<Rational>() {
  return frac<Rational>(1607521, 1136689);
}

// Two parties with two binary measurements each; every cross-party pair of
// measurements is jointly observable.
inline ScenarioPtr chsh_scenario() {
  return make_scenario(
      {"a", "a'", "b", "b'"},
      {{"a", "b"}, {"a", "b'"}, {"a'", "b"}, {"a'", "b'"}},
      {{"a", {"0", "1"}},
       {"a'", {"0", "1"}},
       {"b", {"0", "1"}},
       {"b'", {"0", "1"}}});
}

// The quantum-optimal table: three contexts share (p1, p2, p2, p1) and the
// fourth flips to (p2, p1, p1, p2), with p1 = (2 + sqrt 2)/8.
template <class Scalar>
EmpiricalModel<Scalar> chsh_quantum() {
  const Scalar p1 = (Scalar(2) + sqrt2_value<Scalar>()) / Scalar(8);
  const Scalar p2 = (Scalar(2) - sqrt2_value<Scalar>()) / Scalar(8);
  const std::vector<Scalar> same{p1, p2, p2, p1};
  const std::vector<Scalar> diff{p2, p1, p1, p2};
  return make_model<Scalar>(chsh_scenario(), {same, same, same, diff});
}

// Perfect correlation in three contexts, anti-correlation in the fourth.
template <class Scalar>
EmpiricalModel<Scalar> pr_box() {
  const Scalar h = frac<Scalar>(1, 2);
  const Scalar z(0);
  const std::vector<Scalar> corr{h, z, z, h};
  const std::vector<Scalar> anti{z, h, h, z};
  return make_model<Scalar>(chsh_scenario(), {corr, corr, corr, anti});
}

// Ring of n binary measurements, adjacent pairs jointly observable.
inline ScenarioPtr ncycle_scenario(int n) {
  if (n < 3) raise(ErrorCode::NTooSmall, "cycle needs at least 3 measurements");
  std::vector<std::string> names;
  std::map<std::string, std::vector<std::string>> outcomes;
  for (int i = 1; i <= n; ++i) {
    names.push_back("A" + std::to_string(i));
    outcomes[names.back()] = {"0", "1"};
  }
  std::vector<std::vector<std::string>> contexts;
  for (int i = 0; i < n; ++i)
    contexts.push_back({names[i], names[(i + 1) % n]});
  return make_scenario(names, contexts, outcomes);
}

// The cycle's two canonical deterministic signalling vertices: constant
// outcome on every non-wrap context, with the wrap context breaking the
// pattern; the second vertex is the bitwise flip of the first.
template <class Scalar>
std::pair<EmpiricalModel<Scalar>, EmpiricalModel<Scalar>> ncycle_vertices(int n) {
  auto s = ncycle_scenario(n);
  const Scalar one(1), zero(0);
  std::vector<std::vector<Scalar>> t1, t2;
  for (int c = 0; c < n - 1; ++c) {
    t1.push_back({one, zero, zero, zero});   // both read 0
    t2.push_back({zero, zero, zero, one});   // both read 1
  }
  t1.push_back({zero, one, zero, zero});     // wrap reads (0, 1)
  t2.push_back({zero, zero, one, zero});     // wrap reads (1, 0)
  return {make_model<Scalar>(s, t1), make_model<Scalar>(s, t2)};
}

// Equal mixture of the two vertices: non-signalling, maximally inconsistent
// with any global assignment (the wrap context anti-correlates a chain of
// perfect correlations).
template <class Scalar>
EmpiricalModel<Scalar> ncycle_box(int n) {
  auto [h1, h2] = ncycle_vertices<Scalar>(n);
  return mix(h1, h2, frac<Scalar>(1, 2));
}

// Four-context table that is maximally signalling by the fraction measure
// while its worst pairwise marginal gap stays at 0.2821: the two measures
// genuinely disagree.
template <class Scalar>
EmpiricalModel<Scalar> mim_counterexample() {
  auto s = make_scenario(
      {"a1", "a2", "b1", "b2"},
      {{"a1", "b1"}, {"a1", "b2"}, {"a2", "b1"}, {"a2", "b2"}},
      {{"a1", {"0", "1"}},
       {"a2", {"0", "1"}},
       {"b1", {"0", "1"}},
       {"b2", {"0", "1"}}});
  const Scalar z(0), one(1);
  const Scalar p = frac<Scalar>(2821, 10000);
  const Scalar q = frac<Scalar>(7179, 10000);
  const Scalar r = frac<Scalar>(822, 10000);
  const Scalar w = frac<Scalar>(4589, 10000);
  return make_model<Scalar>(s, {{z, z, z, one},
                                {p, z, z, q},
                                {p, z, z, q},
                                {r, w, w, z}});
}

// Uniform distribution in every context.
template <class Scalar>
EmpiricalModel<Scalar> white_noise(ScenarioPtr s) {
  std::vector<std::vector<Scalar>> tables;
  for (int c = 0; c < s->context_count(); ++c) {
    const long long card = s->context_outcome_count(c);
    tables.emplace_back(static_cast<size_t>(card),
                        Scalar(1) / Scalar(static_cast<long long>(card)));
  }
  return make_model<Scalar>(std::move(s), tables);
}

// Dirac per context at independently chosen joint outcomes.  Choices that
// disagree on shared measurements give a deterministic signalling behaviour.
template <class Scalar>
EmpiricalModel<Scalar> deterministic_vertex(ScenarioPtr s,
                                            const std::vector<int>& choice) {
  if (static_cast<int>(choice.size()) != s->context_count())
    raise(ErrorCode::BadOutcomeChoice, "one joint outcome per context required");
  std::vector<std::vector<Scalar>> tables;
  for (int c = 0; c < s->context_count(); ++c) {
    const long long card = s->context_outcome_count(c);
    if (choice[c] < 0 || choice[c] >= card)
      raise(ErrorCode::BadOutcomeChoice,
            "joint outcome index out of range in context #" + std::to_string(c));
    std::vector<Scalar> t(static_cast<size_t>(card), Scalar(0));
    t[static_cast<size_t>(choice[c])] = Scalar(1);
    tables.push_back(std::move(t));
  }
  return make_model<Scalar>(std::move(s), tables);
}

// Dirac per context induced by one outcome per measurement; always
// consistent across contexts.
template <class Scalar>
EmpiricalModel<Scalar> global_deterministic_model(
    ScenarioPtr s, const std::vector<int>& outcome_per_measurement) {
  if (static_cast<int>(outcome_per_measurement.size()) != s->measurement_count())
    raise(ErrorCode::BadOutcomeChoice, "one outcome per measurement required");
  for (int x = 0; x < s->measurement_count(); ++x)
    if (outcome_per_measurement[x] < 0 ||
        outcome_per_measurement[x] >= static_cast<int>(s->outcomes[x].size()))
      raise(ErrorCode::BadOutcomeChoice,
            "outcome out of range for measurement '" + s->measurements[x] + "'");
  std::vector<int> choice;
  for (int c = 0; c < s->context_count(); ++c)
    choice.push_back(
        static_cast<int>(restrict_global(*s, outcome_per_measurement, c) -
                         s->context_offsets[c]));
  return deterministic_vertex<Scalar>(std::move(s), choice);
}

// A named generator plus the metric values it is known to hit, so tests and
// the CLI can re-verify the catalogue end to end.
struct CatalogEntry {
  std::string name;
  std::string summary;
  std::function<EmpiricalModel<double>()> build;
  // metric name -> (expected value, how the value was pinned)
  std::map<std::string, std::pair<double, std::string>> expected_metrics;
};

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> v;
    v.push_back({"chsh_quantum",
                 "quantum-optimal two-party table",
                 [] { return chsh_quantum<double>(); },
                 {{"cf", {std::sqrt(2.0) - 1.0, "exact-arithmetic solve"}},
                  {"sf", {0.0, "non-signalling by construction"}},
                  {"mim", {0.0, "non-signalling by construction"}}}});
    v.push_back({"pr_box",
                 "extremal non-signalling box",
                 [] { return pr_box<double>(); },
                 {{"cf", {1.0, "exact-arithmetic solve"}},
                  {"sf", {0.0, "non-signalling by construction"}},
                  {"eta_star", {0.5, "closed form"}}}});
    v.push_back({"cycle4_box",
                 "4-cycle box (two-party box up to relabelling)",
                 [] { return ncycle_box<double>(4); },
                 {{"cf", {1.0, "exact-arithmetic solve"}},
                  {"sf", {0.0, "non-signalling by construction"}}}});
    v.push_back({"cycle5_box",
                 "5-cycle box",
                 [] { return ncycle_box<double>(5); },
                 {{"cf", {1.0, "exact-arithmetic solve"}},
                  {"sf", {0.0, "non-signalling by construction"}}}});
    v.push_back({"cycle4_s1",
                 "deterministic signalling vertex of the 4-cycle",
                 [] { return ncycle_vertices<double>(4).first; },
                 {{"sf", {1.0, "exact-arithmetic solve"}},
                  {"mim", {1.0, "closed form"}},
                  {"eta_star", {0.0, "deterministic by construction"}},
                  {"cf", {1.0, "exact-arithmetic solve"}}}});
    v.push_back({"mim_counterexample",
                 "fully signalling table with small marginal gaps",
                 [] { return mim_counterexample<double>(); },
                 {{"sf", {1.0, "exact-arithmetic solve"}},
                  {"mim", {0.2821, "closed form"}}}});
    v.push_back({"chsh_white_noise",
                 "uniform noise on the two-party scenario",
                 [] { return white_noise<double>(chsh_scenario()); },
                 {{"cf", {0.0, "uniform mixture of global assignments"}},
                  {"sf", {0.0, "non-signalling by construction"}},
                  {"eta_star", {0.75, "closed form"}}}});
    return v;
  }();
  return entries;
}

inline const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& entry : catalog())
    if (entry.name == name) return entry;
  raise(ErrorCode::UnknownName, "no catalogue entry named '" + name + "'");
}

}  // namespace ctxfrac
