#include "doctest.h"

#include "helpers.hpp"

using namespace ctxfrac;

TEST_CASE("model validation enforces shape, sign and normalization") {
  auto s = chsh_scenario();
  std::vector<std::vector<double>> good(4, {0.25, 0.25, 0.25, 0.25});
  CHECK_NOTHROW(make_model<double>(s, good));

  auto bad_shape = good;
  bad_shape.pop_back();
  CHECK_THROWS_AS(make_model<double>(s, bad_shape), Error);

  auto bad_len = good;
  bad_len[1] = {0.5, 0.5};
  CHECK_THROWS_AS(make_model<double>(s, bad_len), Error);

  auto negative = good;
  negative[0] = {-0.1, 0.4, 0.35, 0.35};
  try {
    make_model<double>(s, negative);
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NegativeProbability);
  }

  auto off = good;
  off[2] = {0.3, 0.3, 0.3, 0.3};
  try {
    make_model<double>(s, off);
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NormalizationViolation);
  }
}

TEST_CASE("renormalizing constructor rescales and reports the totals") {
  auto s = chsh_scenario();
  std::vector<std::vector<double>> tables(4, {2.0, 2.0, 2.0, 2.0});
  auto [model, sums] = make_model_renormalized<double>(s, tables);
  CHECK(sums == std::vector<double>(4, 8.0));
  CHECK(model.flat.maxCoeff() == doctest::Approx(0.25));

  std::vector<std::vector<double>> zeros(4, {0.0, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(make_model_renormalized<double>(s, zeros), Error);
}

TEST_CASE("marginalization sums out the right digits") {
  auto s = chsh_scenario();
  // p(a=0) = 0.6 split unevenly over b
  std::vector<std::vector<double>> tables(4, {0.25, 0.25, 0.25, 0.25});
  tables[0] = {0.5, 0.1, 0.15, 0.25};
  auto e = make_model<double>(s, tables);

  auto onto_a = marginalize(e, 0, std::vector<int>{0});  // measurement a
  REQUIRE(onto_a.size() == 2);
  CHECK(onto_a[0] == doctest::Approx(0.6));
  CHECK(onto_a[1] == doctest::Approx(0.4));

  auto onto_b = marginalize(e, 0, std::vector<int>{2});  // measurement b
  CHECK(onto_b[0] == doctest::Approx(0.65));

  // by label, full context in reversed order: digit order follows the subset
  auto rev = marginalize(e, 0, std::vector<std::string>{"b", "a"});
  REQUIRE(rev.size() == 4);
  CHECK(rev[1] == doctest::Approx(tables[0][2]));  // (b=0, a=1)

  CHECK_THROWS_AS(marginalize(e, 0, std::vector<int>{1}), Error);  // a' not in C0
  CHECK_THROWS_AS(marginalize(e, 1, std::vector<std::string>{"b"}), Error);
}

TEST_CASE("non-signalling check accepts the PR box and flags the counterexample") {
  auto pr = pr_box<double>();
  auto rep = is_nonsignalling(pr);
  CHECK(rep.nonsignalling);
  CHECK(rep.max_discrepancy == 0.0);

  auto ce = mim_counterexample<double>();
  auto bad = is_nonsignalling(ce);
  CHECK_FALSE(bad.nonsignalling);
  CHECK(bad.max_discrepancy == doctest::Approx(0.2821));
  CHECK(bad.context_a >= 0);
  CHECK(bad.context_b >= 0);
  CHECK_FALSE(bad.intersection.empty());
}

TEST_CASE("mim matches the frozen exact values") {
  CHECK(mim(pr_box<double>()) == 0.0);
  CHECK(mim(mim_counterexample<double>()) == doctest::Approx(0.2821).epsilon(1e-12));
  // exact backend: 2821/10000 on the nose
  CHECK(mim(mim_counterexample<Rational>()) == frac<Rational>(2821, 10000));
}

TEST_CASE("total variation is exact on the frozen PR/CHSH pair") {
  auto v = total_variation(pr_box<Rational>(), chsh_quantum<Rational>());
  CHECK(v == frac<Rational>(665857, 4546756));
  const double vd = total_variation(pr_box<double>(), chsh_quantum<double>());
  CHECK(vd == doctest::Approx(665857.0 / 4546756.0).epsilon(1e-12));

  auto other = make_scenario({"x"}, {{"x"}}, {{"x", {"0", "1"}}});
  auto m = make_model<double>(other, {{0.5, 0.5}});
  CHECK_THROWS_AS(total_variation(pr_box<double>(), m), Error);
}

TEST_CASE("mixing interpolates entrywise and validates the weight") {
  auto pr = pr_box<double>();
  auto wn = white_noise<double>(chsh_scenario());
  auto m = mix(pr, wn, 0.25);
  CHECK((m.flat - (0.25 * pr.flat + 0.75 * wn.flat)).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK_NOTHROW(mix(pr, wn, 0.0));
  CHECK_NOTHROW(mix(pr, wn, 1.0));
  CHECK_THROWS_AS(mix(pr, wn, -0.01), Error);
  CHECK_THROWS_AS(mix(pr, wn, 1.01), Error);
}

TEST_CASE("perturbation is deterministic, bounded and valid") {
  auto pr = pr_box<double>();
  auto a = perturb(pr, 0.01, 1);
  auto b = perturb(pr, 0.01, 1);
  CHECK((a.flat - b.flat).cwiseAbs().maxCoeff() == 0.0);

  auto c = perturb(pr, 0.01, 2);
  CHECK((a.flat - c.flat).cwiseAbs().maxCoeff() > 0.0);

  CHECK(total_variation(pr, a) <= 0.01 + 1e-12);
  CHECK(a.flat.minCoeff() >= 0.0);
  for (int ctx = 0; ctx < 4; ++ctx)
    CHECK(a.table(ctx).sum() == doctest::Approx(1.0).epsilon(1e-12));

  auto same = perturb(pr, 0.0, 9);
  CHECK((same.flat - pr.flat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("perturbation respects the budget on random models") {
  std::mt19937_64 rng(424242);
  for (int i = 0; i < 25; ++i) {
    auto s = testutil::random_scenario(rng);
    auto e = testutil::random_model(s, rng);
    const double eps = 0.001 + 0.05 * testutil::u01(rng);
    auto moved = perturb(e, eps, rng());
    CHECK(total_variation(e, moved) <= eps + 1e-12);
    CHECK(moved.flat.minCoeff() >= -1e-15);
  }
}
