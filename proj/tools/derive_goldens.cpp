// Derives every pinned expected value with the exact-rational backend and
// prints them in a copy-pasteable form.  Exits nonzero if any cross-check
// fails, so a clean run is a precondition for trusting the frozen numbers.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ctxfrac/catalog.hpp"
#include "ctxfrac/certify.hpp"
#include "ctxfrac/empirical.hpp"
#include "ctxfrac/fractions.hpp"
#include "ctxfrac/hvm.hpp"
#include "ctxfrac/rational.hpp"
#include "ctxfrac/scenario.hpp"

using ctxfrac::EmpiricalModel;
using ctxfrac::Rational;
using R = Rational;

static int failures = 0;

static void golden(const std::string& name, const R& value) {
  std::ostringstream os;
  os << value.raw();
  std::printf("GOLDEN %-42s = %-24s (~ %.15g)\n", name.c_str(),
              os.str().c_str(), value.to_double());
}

static void golden_d(const std::string& name, double value) {
  std::printf("GOLDEN %-42s = %.17g\n", name.c_str(), value);
}

static void check(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::printf("CHECK FAILED: %s\n", what.c_str());
  } else {
    std::printf("check ok: %s\n", what.c_str());
  }
}

// Exhaustive ground truth for the determinism defect: walk every choice of
// one joint outcome per context and keep the best min over contexts.
static R eta_enumeration(const EmpiricalModel<R>& e) {
  const auto& s = *e.scenario;
  const int k = s.context_count();
  std::vector<long long> digits(k, 0);
  R best(0);
  for (;;) {
    R r(1);
    for (int c = 0; c < k; ++c) {
      const R cell = e.flat[s.context_offsets[c] + digits[c]];
      if (cell < r) r = cell;
    }
    if (r > best) best = r;
    int c = k - 1;
    for (; c >= 0; --c) {
      if (++digits[c] < s.context_outcome_count(c)) break;
      digits[c] = 0;
    }
    if (c < 0) break;
  }
  return R(R(1) - best);
}

int main() {
  // ---- two-party quantum-optimal table ---------------------------------
  const R sqrt2 = ctxfrac::sqrt2_value<R>();
  auto chsh = ctxfrac::chsh_quantum<R>();
  auto ncf = ctxfrac::noncontextual_fraction(chsh);
  const R cf_chsh = R(R(1) - ncf.value);
  golden("chsh_quantum.cf", cf_chsh);
  golden("chsh_quantum.ncf", ncf.value);
  check(cf_chsh == R(sqrt2 - R(1)),
        "chsh cf equals sqrt2 - 1 under the rational sqrt2 stand-in");
  check(ctxfrac::mim(chsh) == R(0), "chsh quantum table is non-signalling");
  check(ctxfrac::signalling_fraction(chsh) == R(0), "chsh quantum sf = 0");

  // The dual-derived inequality must recover cf as its normalized violation.
  auto bell = ctxfrac::bell_inequality(chsh);
  golden("chsh_quantum.bell.classical_bound", bell.classical_bound);
  golden("chsh_quantum.bell.algebraic_max", bell.algebraic_max);
  golden("chsh_quantum.bell.violation", bell.violation);
  check(bell.normalized_violation == cf_chsh,
        "chsh normalized violation equals cf exactly");

  // Residual part of the optimal decomposition is maximally contextual.
  auto dec = ctxfrac::nc_decomposition(chsh);
  golden("chsh_quantum.nc_decomposition.lambda", dec.lambda);
  check(dec.lambda == ncf.value, "decomposition weight equals ncf");
  {
    auto recon = ctxfrac::mix(dec.consistent_part(), dec.residual(), dec.lambda);
    check((recon.flat - chsh.flat).cwiseAbs().maxCoeff() == R(0),
          "decomposition reconstructs the table exactly");
    const R cf_resid = ctxfrac::contextual_fraction(dec.residual());
    golden("chsh_quantum.residual.cf", cf_resid);
    check(cf_resid == R(1), "residual part has cf = 1");
  }

  // ---- extremal box ----------------------------------------------------
  auto pr = ctxfrac::pr_box<R>();
  check(ctxfrac::contextual_fraction(pr) == R(1), "pr box cf = 1");
  check(ctxfrac::signalling_fraction(pr) == R(0), "pr box sf = 0");
  check(ctxfrac::mim(pr) == R(0), "pr box mim = 0");
  check(ctxfrac::eta_star(pr) == ctxfrac::frac<R>(1, 2), "pr box eta* = 1/2");
  auto bell_pr = ctxfrac::bell_inequality(pr);
  check(bell_pr.normalized_violation == R(1), "pr box normalized violation 1");
  {
    // Facet check: every deterministic global assignment respects the bound.
    const auto inc = ctxfrac::incidence_matrix<R>(*pr.scenario);
    bool all_below = true;
    for (Eigen::Index g = 0; g < inc.cols(); ++g) {
      R score(0);
      for (Eigen::Index r = 0; r < inc.rows(); ++r)
        score += bell_pr.coefficients[r] * inc(r, g);
      if (score > bell_pr.classical_bound) all_below = false;
    }
    check(all_below, "pr box inequality holds at all 16 deterministic points");
  }

  // ---- total variation between the quantum table and the box ------------
  const R tv = ctxfrac::total_variation(pr, chsh);
  golden("tv(pr_box, chsh_quantum)", tv);
  check(tv == R((R(2) - sqrt2) / R(4)), "tv equals (2 - sqrt2)/4");
  // Continuity ceiling |M| * V is met with equality by this pair.
  check(R(ctxfrac::contextual_fraction(pr) - cf_chsh) == R(R(4) * tv),
        "cf gap meets the 4*V continuity ceiling with equality");

  // ---- cycle boxes and vertices ----------------------------------------
  for (int n : {4, 5}) {
    auto box = ctxfrac::ncycle_box<R>(n);
    const std::string tag = "cycle" + std::to_string(n);
    check(ctxfrac::contextual_fraction(box) == R(1), tag + "_box cf = 1");
    check(ctxfrac::signalling_fraction(box) == R(0), tag + "_box sf = 0");
    check(ctxfrac::mim(box) == R(0), tag + "_box mim = 0");
  }
  {
    auto [s1, s2] = ctxfrac::ncycle_vertices<R>(4);
    check(ctxfrac::mim(s1) == R(1), "cycle4 s1 mim = 1");
    check(ctxfrac::signalling_fraction(s1) == R(1), "cycle4 s1 sf = 1");
    check(ctxfrac::contextual_fraction(s1) == R(1), "cycle4 s1 cf = 1");
    check(ctxfrac::eta_star(s1) == R(0), "cycle4 s1 eta* = 0");
    check(ctxfrac::eta_star(s2) == R(0), "cycle4 s2 eta* = 0");
    // The 4-cycle box is the extremal two-party box after renaming
    // A1 -> a', A2 -> b, A3 -> a, A4 -> b'.
    auto box = ctxfrac::ncycle_box<R>(4);
    auto pr2 = ctxfrac::pr_box<R>();
    const auto& bs = *box.scenario;
    const auto& ps = *pr2.scenario;
    const std::vector<std::string> renamed{"a'", "b", "a", "b'"};
    bool match = true;
    for (int c = 0; c < bs.context_count(); ++c) {
      const std::string m0 = renamed[bs.contexts[c][0]];
      const std::string m1 = renamed[bs.contexts[c][1]];
      // Find the box context among the two-party contexts as a set.
      for (int pc = 0; pc < ps.context_count(); ++pc) {
        const std::string p0 = ps.measurements[ps.contexts[pc][0]];
        const std::string p1 = ps.measurements[ps.contexts[pc][1]];
        if (!((p0 == m0 && p1 == m1) || (p0 == m1 && p1 == m0))) continue;
        const bool swapped = p0 != m0;
        for (int o0 = 0; o0 < 2; ++o0)
          for (int o1 = 0; o1 < 2; ++o1) {
            const long long from = 2 * o0 + o1;
            const long long to = swapped ? 2 * o1 + o0 : 2 * o0 + o1;
            if (box.flat[bs.context_offsets[c] + from] !=
                pr2.flat[ps.context_offsets[pc] + to])
              match = false;
          }
      }
    }
    check(match, "cycle4 box equals the two-party box after renaming");
  }

  // ---- white noise -------------------------------------------------------
  auto noise = ctxfrac::white_noise<R>(ctxfrac::chsh_scenario());
  check(ctxfrac::contextual_fraction(noise) == R(0), "white noise cf = 0");
  check(ctxfrac::eta_star(noise) == ctxfrac::frac<R>(3, 4),
        "white noise eta* = 3/4");
  check(eta_enumeration(noise) == ctxfrac::frac<R>(3, 4),
        "white noise eta* enumeration agrees");

  // ---- the fully signalling table with small marginal gaps --------------
  auto cex = ctxfrac::mim_counterexample<R>();
  const R cex_mim = ctxfrac::mim(cex);
  const R cex_sf = ctxfrac::signalling_fraction(cex);
  golden("mim_counterexample.mim", cex_mim);
  golden("mim_counterexample.sf", cex_sf);
  check(cex_mim == ctxfrac::frac<R>(2821, 10000), "counterexample mim = 0.2821");
  check(cex_sf == R(1), "counterexample sf = 1");

  // ---- two-branch deterministic explanation of the box ------------------
  auto hvm = ctxfrac::pr_box_hvm<R>();
  auto realized = ctxfrac::realized_behaviour(hvm);
  check((realized.flat - pr.flat).cwiseAbs().maxCoeff() == R(0),
        "two-branch hvm realizes the box entrywise");
  auto audit_r = ctxfrac::audit(hvm);
  check(audit_r.eta == R(0), "hvm audit eta = 0");
  check(audit_r.sigma == R(1), "hvm audit sigma = 1");
  check(!audit_r.condition_ok, "hvm audit condition fails (2*0 + 1 = 1)");
  check(audit_r.realized_cf == R(1), "hvm audit realized cf = 1");

  // mix(box, first branch, 1/2): the explainable weight is exactly 1/2.
  {
    auto mixed = ctxfrac::mix(pr, hvm.behaviours[0], ctxfrac::frac<R>(1, 2));
    check(ctxfrac::mim(mixed) == ctxfrac::frac<R>(1, 2), "mixed mim = 1/2");
    check(ctxfrac::signalling_fraction(mixed) == ctxfrac::frac<R>(1, 2),
          "mixed sf = 1/2");
    auto nsdec = ctxfrac::ns_decomposition(mixed);
    golden("mix(pr,branch1,1/2).ns_lambda", nsdec.lambda);
    check(nsdec.lambda == ctxfrac::frac<R>(1, 2), "ns weight = 1/2");
    auto rep = ctxfrac::is_nonsignalling(nsdec.consistent_part());
    check(rep.nonsignalling, "ns part is non-signalling");
    check(ctxfrac::sigma_star(hvm.behaviours[0]) == R(1), "branch sigma* = 1");
  }

  // ---- boundary family ---------------------------------------------------
  for (int n : {4, 5, 6, 8}) {
    for (auto [num, den] : {std::pair<int, int>{1, 2}, {3, 5}, {3, 4}, {9, 10},
                            {1, 1}}) {
      const R alpha = ctxfrac::frac<R>(num, den);
      auto b = ctxfrac::boundary_hvm<R>(n, alpha);
      std::ostringstream tag;
      tag << "boundary(n=" << n << ", alpha=" << num << "/" << den << ")";
      check(b.eta == R(R(1) - alpha), tag.str() + " eta* = 1 - alpha");
      check(b.sigma == R(R(2) * alpha - R(1)), tag.str() + " sigma* = 2a - 1");
      check(R(b.sigma + R(2) * b.eta) == R(1), tag.str() + " sigma+2eta = 1");
      check(b.realized_cf == R(1), tag.str() + " cf = 1");
    }
  }

  // ---- certification arithmetic (double precision, as reported) ----------
  {
    auto eta_w = ctxfrac::estimate_eta(
        {ctxfrac::EtaKind::Repeatability, {0.03}});
    golden_d("repeatability(0.03).eta", eta_w.value);
    const double bound = ctxfrac::corrected_inequality_bound(2.0, 4.0, 0.06);
    golden_d("corrected_bound(2,4,0.06)", bound);
    check(bound == 2.12, "corrected bound prints as 2.12");
    const double cf_obs = (2.526 - 2.0) / 2.0;
    golden_d("wang.cf_from_observed", cf_obs);
    auto rep = ctxfrac::certify_from_metrics(
        cf_obs, 0.0, 0.0, eta_w, ctxfrac::estimate_sigma(ctxfrac::SigmaPolicy::Zero));
    check(rep.verdict == ctxfrac::Verdict::GenuineContextuality,
          "wang-style inputs certify");

    auto rep_hu = ctxfrac::certify_from_metrics(
        0.89, 0.0, 0.0, ctxfrac::estimate_eta({ctxfrac::EtaKind::MaxDeviation, {0.01}}),
        ctxfrac::estimate_sigma(ctxfrac::SigmaPolicy::Manual, nullptr, 0.001));
    check(rep_hu.verdict == ctxfrac::Verdict::GenuineContextuality,
          "hu-style inputs certify");

    auto rep_m = ctxfrac::certify_from_metrics(
        0.16, 0.0, 0.0, ctxfrac::estimate_eta({ctxfrac::EtaKind::HardyZero, {0.021}}),
        ctxfrac::estimate_sigma(ctxfrac::SigmaPolicy::Zero));
    check(rep_m.verdict == ctxfrac::Verdict::GenuineContextuality,
          "marques-style inputs certify");

    auto winter = ctxfrac::compare_winter_bound(
        std::vector<double>(9, 8.0), std::vector<int>(9, 2), 5.0, 6.0, 1.0 / 72.0);
    golden_d("winter.pm.saturation_epsilon", winter.winter_saturation_epsilon);
    check(winter.winter_saturation_epsilon == 1.0 / 72.0,
          "pm-style ceiling saturates at eps = 1/72");
    auto winter_chsh = ctxfrac::compare_winter_bound(
        {1, 1, 1, 1}, {2, 2, 2, 2}, 2.0, 4.0, 0.25);
    check(winter_chsh.winter_cf_bound == 2.0 * 0.25,
          "two-party ceiling factor is 2");
  }

  // ---- float backend agreement on the headline value ---------------------
  {
    auto chsh_d = ctxfrac::chsh_quantum<double>();
    const double cf_d = ctxfrac::contextual_fraction(chsh_d);
    golden_d("chsh_quantum.cf(double)", cf_d);
    check(std::abs(cf_d - (std::sqrt(2.0) - 1.0)) < 1e-9,
          "float backend reproduces sqrt2 - 1 within 1e-9");
  }

  if (failures) {
    std::printf("\n%d check(s) FAILED\n", failures);
    return 1;
  }
  std::printf("\nall checks passed\n");
  return 0;
}
