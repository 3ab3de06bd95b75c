#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "ctxfrac/hvm.hpp"

using namespace ctxfrac;

namespace {

double metric_by_name(const std::string& name, const EmpiricalModel<double>& e) {
  if (name == "cf") return contextual_fraction(e);
  if (name == "sf") return signalling_fraction(e);
  if (name == "mim") return mim(e);
  if (name == "eta_star") return eta_star(e);
  FAIL("unknown metric name in catalogue: " << name);
  return 0.0;
}

}  // namespace

TEST_CASE("every catalogue entry builds and hits its pinned metrics") {
  const auto& entries = catalog();
  CHECK(entries.size() == 7);
  for (const auto& entry : entries) {
    CAPTURE(entry.name);
    CHECK_FALSE(entry.summary.empty());
    auto model = entry.build();
    CHECK(model.scenario != nullptr);
    CHECK_FALSE(entry.expected_metrics.empty());
    for (const auto& [metric, pinned] : entry.expected_metrics) {
      CAPTURE(metric);
      CHECK_FALSE(pinned.second.empty());
      const double got = metric_by_name(metric, model);
      CHECK(std::abs(got - pinned.first) <= 1e-8);
    }
  }
}

TEST_CASE("catalogue lookup by name") {
  CHECK(catalog_entry("pr_box").name == "pr_box");
  CHECK_THROWS_AS(catalog_entry("no_such_table"), Error);
  try {
    catalog_entry("no_such_table");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::UnknownName);
  }
}

TEST_CASE("4-cycle box is the two-party box up to relabelling") {
  auto cyc = ncycle_box<double>(4);
  auto pr = pr_box<double>();
  const auto& cs = *cyc.scenario;
  const auto& ps = *pr.scenario;

  // A1 -> a', A2 -> b, A3 -> a, A4 -> b' as indices into the CHSH labels
  auto chsh_index = [&](const std::string& label) {
    for (int i = 0; i < ps.measurement_count(); ++i)
      if (ps.measurements[i] == label) return i;
    FAIL("missing CHSH measurement " << label);
    return -1;
  };
  const std::vector<int> rename{chsh_index("a'"), chsh_index("b"),
                                chsh_index("a"), chsh_index("b'")};

  for (int c = 0; c < cs.context_count(); ++c) {
    // find the CHSH context carrying the renamed measurement set
    std::vector<int> want;
    for (int x : cs.contexts[c]) want.push_back(rename[x]);
    std::vector<int> want_sorted = want;
    std::sort(want_sorted.begin(), want_sorted.end());
    int target = -1;
    for (int d = 0; d < ps.context_count(); ++d) {
      std::vector<int> have = ps.contexts[d];
      std::sort(have.begin(), have.end());
      if (have == want_sorted) target = d;
    }
    REQUIRE(target >= 0);

    for (long long i = 0; i < cs.context_outcome_count(c); ++i) {
      auto local = decode_local(cs, cs.context_offsets[c] + i);
      // re-express the joint outcome in the target context's digit order
      std::vector<int> digits(ps.contexts[target].size(), 0);
      for (size_t pos = 0; pos < local.digits.size(); ++pos) {
        const int renamed = rename[cs.contexts[c][pos]];
        const auto& order = ps.contexts[target];
        const auto at = std::find(order.begin(), order.end(), renamed);
        REQUIRE(at != order.end());
        digits[static_cast<size_t>(at - order.begin())] = local.digits[pos];
      }
      const long long j = encode_local(ps, target, digits);
      CHECK(cyc.flat[cs.context_offsets[c] + i] == pr.flat[j]);
    }
  }
}

TEST_CASE("cycle vertices are deterministic and break only at the wrap") {
  auto [s1, s2] = ncycle_vertices<double>(5);
  CHECK(signalling_fraction(s1) == doctest::Approx(1.0));
  CHECK(signalling_fraction(s2) == doctest::Approx(1.0));
  CHECK(eta_star(s1) == doctest::Approx(0.0));
  // first four contexts agree perfectly, the wrap context disagrees
  for (int c = 0; c < 4; ++c) {
    CHECK(s1.table(c)[0] == 1.0);
    CHECK(s2.table(c)[3] == 1.0);
  }
  CHECK(s1.table(4)[1] == 1.0);
  CHECK(s2.table(4)[2] == 1.0);
  CHECK_THROWS_AS(ncycle_vertices<double>(2), Error);
  CHECK_THROWS_AS(ncycle_scenario(1), Error);
  try {
    ncycle_scenario(2);
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NTooSmall);
  }
}

TEST_CASE("deterministic vertices validate their outcome choice") {
  auto s = chsh_scenario();
  auto v = deterministic_vertex<double>(s, {0, 1, 2, 3});
  for (int c = 0; c < 4; ++c) CHECK(v.table(c)[c] == 1.0);
  CHECK_THROWS_AS(deterministic_vertex<double>(s, {0, 1, 2}), Error);
  CHECK_THROWS_AS(deterministic_vertex<double>(s, {0, 1, 2, 4}), Error);
  CHECK_THROWS_AS(deterministic_vertex<double>(s, {0, 1, 2, -1}), Error);
  try {
    deterministic_vertex<double>(s, {0, 1, 2, 4});
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::BadOutcomeChoice);
  }
}

TEST_CASE("global outcome choices induce consistent vertices") {
  auto s = chsh_scenario();
  // a=1, a'=0, b=1, b'=1: context {a,b} sees (1,1) -> local digit pair 11
  auto g = global_deterministic_model<double>(s, {1, 0, 1, 1});
  CHECK(g.table(0)[3] == 1.0);  // (a, b)  = (1, 1)
  CHECK(g.table(1)[3] == 1.0);  // (a, b') = (1, 1)
  CHECK(g.table(2)[1] == 1.0);  // (a', b) = (0, 1)
  CHECK(g.table(3)[1] == 1.0);  // (a', b')= (0, 1)
  CHECK(signalling_fraction(g) == doctest::Approx(0.0));
  CHECK(contextual_fraction(g) == doctest::Approx(0.0));
  CHECK_THROWS_AS(global_deterministic_model<double>(s, {0, 0, 0}), Error);
  CHECK_THROWS_AS(global_deterministic_model<double>(s, {0, 0, 0, 2}), Error);
}

TEST_CASE("white noise is classical with a known determinism defect") {
  auto e = white_noise<double>(chsh_scenario());
  for (double p : e.flat) CHECK(p == 0.25);
  CHECK(contextual_fraction(e) == doctest::Approx(0.0));
  CHECK(eta_star(e) == doctest::Approx(0.75));
  auto r = white_noise<Rational>(ncycle_scenario(3));
  CHECK(eta_star(r) == frac<Rational>(3, 4));
}

TEST_CASE("exact square-root convergent matches the float value") {
  CHECK(to_double(sqrt2_value<Rational>()) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}
