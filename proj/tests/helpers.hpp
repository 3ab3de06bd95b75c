#pragma once

#include <random>
#include <string>
#include <vector>

#include "ctxfrac/catalog.hpp"
#include "ctxfrac/empirical.hpp"
#include "ctxfrac/fractions.hpp"
#include "ctxfrac/hvm.hpp"
#include "ctxfrac/rational.hpp"
#include "ctxfrac/scenario.hpp"

namespace testutil {

using namespace ctxfrac;

// Independent reference optimum for the outcome-determinism defect: sweep
// every per-context deterministic behaviour with an odometer and keep the
// best worst-case cell.  Deliberately exhaustive and structure-free.
template <class Scalar>
Scalar eta_enumeration(const EmpiricalModel<Scalar>& e) {
  const auto& s = *e.scenario;
  std::vector<long long> choice(s.context_count(), 0);
  Scalar best(0);
  bool first = true;
  while (true) {
    Scalar worst(0);
    for (int c = 0; c < s.context_count(); ++c) {
      const Scalar cell = e.flat[s.context_offsets[c] + choice[c]];
      if (c == 0 || cell < worst) worst = cell;
    }
    if (first || worst > best) best = worst;
    first = false;
    int c = 0;
    for (; c < s.context_count(); ++c) {
      if (++choice[c] < s.context_outcome_count(c)) break;
      choice[c] = 0;
    }
    if (c == s.context_count()) break;
  }
  return Scalar(1) - best;
}

inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Arbitrary (typically signalling) model: independent uniform cells per
// context, normalized.
inline EmpiricalModel<double> random_model(ScenarioPtr s, std::mt19937_64& rng) {
  std::vector<std::vector<double>> tables;
  for (int c = 0; c < s->context_count(); ++c) {
    std::vector<double> t(static_cast<size_t>(s->context_outcome_count(c)));
    double sum = 0;
    for (double& v : t) {
      v = u01(rng) + 1e-3;
      sum += v;
    }
    for (double& v : t) v /= sum;
    tables.push_back(std::move(t));
  }
  return make_model<double>(std::move(s), tables);
}

// Non-signalling by construction: convex mixture of global deterministic
// vertices.
inline EmpiricalModel<double> random_ns_model(ScenarioPtr s,
                                              std::mt19937_64& rng,
                                              int vertices = 6) {
  Eigen::VectorXd flat = Eigen::VectorXd::Zero(s->local_count);
  std::vector<double> w(static_cast<size_t>(vertices));
  double sum = 0;
  for (double& v : w) {
    v = u01(rng) + 1e-3;
    sum += v;
  }
  for (double& v : w) v /= sum;
  for (int v = 0; v < vertices; ++v) {
    std::vector<int> outcome;
    for (int x = 0; x < s->measurement_count(); ++x)
      outcome.push_back(static_cast<int>(
          rng() % static_cast<unsigned long long>(s->outcomes[x].size())));
    flat += w[static_cast<size_t>(v)] *
            global_deterministic_model<double>(s, outcome).flat;
  }
  return model_from_flat(std::move(s), std::move(flat));
}

// Random per-context deterministic (typically signalling) vertex.
inline EmpiricalModel<double> random_signalling_vertex(ScenarioPtr s,
                                                       std::mt19937_64& rng) {
  std::vector<int> choice;
  for (int c = 0; c < s->context_count(); ++c)
    choice.push_back(static_cast<int>(
        rng() % static_cast<unsigned long long>(s->context_outcome_count(c))));
  return deterministic_vertex<double>(std::move(s), choice);
}

// Small scenario with overlapping contexts: a measurement ring plus at most
// one chord, 2-3 outcomes per measurement, global count kept modest.
inline ScenarioPtr random_scenario(std::mt19937_64& rng) {
  const int nm = 3 + static_cast<int>(rng() % 4);  // 3..6 measurements
  std::vector<std::string> measurements;
  std::map<std::string, std::vector<std::string>> outcomes;
  long long global = 1;
  for (int i = 0; i < nm; ++i) {
    measurements.push_back("m" + std::to_string(i));
    int card = 2;
    if (global * 3 <= 256 && rng() % 3 == 0) card = 3;
    global *= card;
    std::vector<std::string> labels;
    for (int o = 0; o < card; ++o) labels.push_back(std::to_string(o));
    outcomes[measurements.back()] = labels;
  }
  std::vector<std::vector<std::string>> contexts;
  for (int i = 0; i < nm; ++i)
    contexts.push_back({measurements[static_cast<size_t>(i)],
                        measurements[static_cast<size_t>((i + 1) % nm)]});
  if (nm >= 4 && rng() % 2 == 0) {
    int i = static_cast<int>(rng() % static_cast<unsigned long long>(nm));
    contexts.push_back({measurements[static_cast<size_t>(i)],
                        measurements[static_cast<size_t>((i + 2) % nm)]});
  }
  return make_scenario(measurements, contexts, outcomes);
}

// Branches of the form (1-a-b)*global_deterministic + a*nonsignalling +
// b*signalling_vertex with a <= 0.35, b <= 0.08, so each branch has
// eta <= a+b and sigma <= b, keeping 2*eta + sigma <= 0.94 < 1.
inline HiddenVariableModel<double> random_condition_hvm(ScenarioPtr s,
                                                        std::mt19937_64& rng) {
  const int branches = 1 + static_cast<int>(rng() % 3);
  std::vector<std::string> labels;
  std::vector<double> prior(static_cast<size_t>(branches));
  double sum = 0;
  for (int l = 0; l < branches; ++l) {
    labels.push_back("lambda" + std::to_string(l));
    prior[static_cast<size_t>(l)] = u01(rng) + 1e-3;
    sum += prior[static_cast<size_t>(l)];
  }
  for (double& p : prior) p /= sum;
  std::vector<EmpiricalModel<double>> behaviours;
  for (int l = 0; l < branches; ++l) {
    const double a = 0.35 * u01(rng);
    const double b = 0.08 * u01(rng);
    std::vector<int> outcome;
    for (int x = 0; x < s->measurement_count(); ++x)
      outcome.push_back(static_cast<int>(
          rng() % static_cast<unsigned long long>(s->outcomes[x].size())));
    Eigen::VectorXd flat =
        (1.0 - a - b) * global_deterministic_model<double>(s, outcome).flat +
        a * random_ns_model(s, rng).flat +
        b * random_signalling_vertex(s, rng).flat;
    behaviours.push_back(model_from_flat(s, std::move(flat)));
  }
  return make_hvm<double>(std::move(labels), std::move(prior),
                          std::move(behaviours));
}

}  // namespace testutil
