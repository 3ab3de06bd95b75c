// Command-line surface over the library: analyze / certify / generate /
// perturb / decompose / bell / audit, JSON document in, human text or JSON
// report out.  Exit codes are a contract:
//   0 success (certify: GenuineContextuality), 2 parse, 3 validation,
//   4 solver, 5 estimator input, 10 NotCertified, 11 ConditionFailed.
#include <cstdio>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctxfrac/catalog.hpp"
#include "ctxfrac/certify.hpp"
#include "ctxfrac/empirical.hpp"
#include "ctxfrac/fractions.hpp"
#include "ctxfrac/hvm.hpp"
#include "ctxfrac/io.hpp"

namespace {

using namespace ctxfrac;

int exit_code_for(ErrorCategory cat) {
  switch (cat) {
    case ErrorCategory::Parse: return 2;
    case ErrorCategory::Validation: return 3;
    case ErrorCategory::Solver: return 4;
    case ErrorCategory::EstimatorInput: return 5;
  }
  return 3;
}

const char* category_name(ErrorCategory cat) {
  switch (cat) {
    case ErrorCategory::Parse: return "parse";
    case ErrorCategory::Validation: return "validation";
    case ErrorCategory::Solver: return "solver";
    case ErrorCategory::EstimatorInput: return "estimator-input";
  }
  return "validation";
}

std::string fixed6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct AnalyzeOpts {
  std::vector<std::string> paths;
  bool json = false;
  bool batch = false;
  bool renormalize = false;
  long long size_cap = kDefaultSizeCap;
};

io::AnalysisSummary analyze_one(const EmpiricalModel<double>& e,
                                long long size_cap) {
  io::AnalysisSummary a;
  a.ncf = noncontextual_fraction(e, size_cap).value;
  a.cf = 1.0 - a.ncf;
  a.nsf = nonsignalling_fraction(e, size_cap).value;
  a.sf = 1.0 - a.nsf;
  a.mim = mim(e);
  auto rep = is_nonsignalling(e);
  a.nonsignalling = rep.nonsignalling;
  a.max_signalling_gap = rep.max_discrepancy;
  a.eta_star = eta_star(e);
  a.contexts = e.scenario->context_count();
  a.global_assignments = static_cast<long long>(e.scenario->global_count);
  return a;
}

std::string analysis_human(const io::AnalysisSummary& a) {
  std::string out;
  out += "contexts: " + std::to_string(a.contexts) + "\n";
  out += "global assignments: " + std::to_string(a.global_assignments) + "\n";
  out += "CF: " + fixed6(a.cf) + "\n";
  out += "NCF: " + fixed6(a.ncf) + "\n";
  out += "SF: " + fixed6(a.sf) + "\n";
  out += "NSF: " + fixed6(a.nsf) + "\n";
  out += "MIM: " + fixed6(a.mim) + "\n";
  out += std::string("non-signalling: ") + (a.nonsignalling ? "yes" : "no") +
         " (max marginal gap " + fixed6(a.max_signalling_gap) + ")\n";
  out += "eta*: " + fixed6(a.eta_star) + "\n";
  return out;
}

int run_analyze(const AnalyzeOpts& opt) {
  if (!opt.batch) {
    if (opt.paths.size() != 1)
      raise(ErrorCode::ParseError,
            "analyze takes one document (use --batch for several)");
    auto parsed = io::load_model(opt.paths[0], opt.renormalize);
    print_warnings(parsed.warnings);
    auto a = analyze_one(parsed.model, opt.size_cap);
    if (opt.json)
      std::cout << io::analysis_to_json(a);
    else
      std::cout << analysis_human(a);
    return 0;
  }

  // Batch: every document runs through its own isolated pipeline; results
  // are printed in input order.
  struct Item {
    bool ok = false;
    io::AnalysisSummary summary;
    std::vector<std::string> warnings;
    ErrorCategory category = ErrorCategory::Validation;
    std::string message;
  };
  std::vector<std::future<Item>> futures;
  futures.reserve(opt.paths.size());
  for (const auto& path : opt.paths)
    futures.push_back(std::async(std::launch::async, [&opt, path]() {
      Item item;
      try {
        auto parsed = io::load_model(path, opt.renormalize);
        item.summary = analyze_one(parsed.model, opt.size_cap);
        item.warnings = parsed.warnings;
        item.ok = true;
      } catch (const Error& err) {
        item.category = category(err.code());
        item.message = err.what();
      }
      return item;
    }));

  int exit_code = 0;
  io::JsonWriter w;
  if (opt.json) w.begin_array(false);
  for (size_t i = 0; i < futures.size(); ++i) {
    Item item = futures[i].get();
    for (const auto& warning : item.warnings)
      std::cerr << "warning: " << opt.paths[i] << ": " << warning << "\n";
    if (opt.json) {
      w.begin_object();
      w.key("path").string_value(opt.paths[i]);
      w.key("ok").bool_value(item.ok);
      if (item.ok) {
        const auto& a = item.summary;
        w.key("cf").number_value(a.cf);
        w.key("ncf").number_value(a.ncf);
        w.key("sf").number_value(a.sf);
        w.key("nsf").number_value(a.nsf);
        w.key("mim").number_value(a.mim);
        w.key("nonsignalling").bool_value(a.nonsignalling);
        w.key("max_signalling_gap").number_value(a.max_signalling_gap);
        w.key("eta_star").number_value(a.eta_star);
        w.key("contexts").integer_value(a.contexts);
        w.key("global_assignments").integer_value(a.global_assignments);
      } else {
        w.key("error").begin_object();
        w.key("category").string_value(category_name(item.category));
        w.key("message").string_value(item.message);
        w.end_object();
      }
      w.end_object();
    } else {
      std::cout << "== " << opt.paths[i] << " ==\n";
      if (item.ok)
        std::cout << analysis_human(item.summary);
      else
        std::cout << "error (" << category_name(item.category)
                  << "): " << item.message << "\n";
    }
    if (!item.ok && exit_code == 0) exit_code = exit_code_for(item.category);
  }
  if (opt.json) {
    w.end_array();
    std::cout << w.take();
  }
  return exit_code;
}

struct CertifyOpts {
  std::string path;
  std::optional<double> eta_manual;
  std::string eta_estimator;
  std::vector<double> eta_inputs;
  std::optional<double> sigma_manual;
  std::string sigma_policy = "zero";
  std::optional<double> beta_cl;
  std::optional<double> beta_max;
  bool json = false;
  bool renormalize = false;
  long long size_cap = kDefaultSizeCap;
};

EtaKind eta_kind_from(const std::string& name) {
  if (name == "manual") return EtaKind::Manual;
  if (name == "flip_probability") return EtaKind::FlipProbability;
  if (name == "hardy_zero") return EtaKind::HardyZero;
  if (name == "repeatability") return EtaKind::Repeatability;
  if (name == "max_deviation") return EtaKind::MaxDeviation;
  if (name == "outcome_mismatch") return EtaKind::OutcomeMismatch;
  raise(ErrorCode::MissingField, "unknown eta estimator '" + name + "'");
}

std::string certify_human(const CertificationReport& r, bool have_model) {
  std::string out;
  if (have_model) {
    out += "CF: " + fixed6(r.cf) + "\n";
    out += "SF: " + fixed6(r.sf) + "\n";
    out += "MIM: " + fixed6(r.mim_value) + "\n";
  }
  out += "eta: " + fixed6(r.eta.value) + " (" + r.eta.provenance + ")\n";
  out += "sigma: " + fixed6(r.sigma.value) + " (" + r.sigma.provenance + ")\n";
  out += "condition 2*eta+sigma: " + fixed6(r.condition_value) +
         (r.condition_ok ? " (strictly below 1: relaxation is restrictive)"
                         : " (not strictly below 1: no residual constraint)") +
         "\n";
  if (r.corrected)
    out += "corrected inequality bound: " + fixed6(r.corrected->corrected_bound) +
           " (classical " + fixed6(r.corrected->beta_cl) + ", algebraic " +
           fixed6(r.corrected->beta_max) + ")\n";
  out += std::string("verdict: ") + to_string(r.verdict) + "\n";
  return out;
}

int run_certify(const CertifyOpts& opt) {
  if (opt.eta_manual && !opt.eta_estimator.empty())
    raise(ErrorCode::MissingField, "give either --eta or --eta-estimator, not both");
  Estimate eta;
  if (opt.eta_manual) {
    eta = estimate_eta({EtaKind::Manual, {*opt.eta_manual}});
  } else if (!opt.eta_estimator.empty()) {
    eta = estimate_eta({eta_kind_from(opt.eta_estimator), opt.eta_inputs});
  } else {
    raise(ErrorCode::MissingField, "certify needs --eta or --eta-estimator");
  }

  std::optional<EmpiricalModel<double>> model;
  std::vector<std::string> warnings;
  if (!opt.path.empty()) {
    auto parsed = io::load_model(opt.path, opt.renormalize);
    model = std::move(parsed.model);
    warnings = std::move(parsed.warnings);
  }
  print_warnings(warnings);

  Estimate sigma;
  if (opt.sigma_manual) {
    sigma = estimate_sigma(SigmaPolicy::Manual, nullptr, *opt.sigma_manual);
  } else {
    SigmaPolicy policy;
    if (opt.sigma_policy == "zero") policy = SigmaPolicy::Zero;
    else if (opt.sigma_policy == "sf_of_model") policy = SigmaPolicy::SfOfModel;
    else if (opt.sigma_policy == "mim_of_model") policy = SigmaPolicy::MimOfModel;
    else if (opt.sigma_policy == "manual")
      raise(ErrorCode::ManualValueMissing, "--sigma-policy manual needs --sigma");
    else
      raise(ErrorCode::MissingField,
            "unknown sigma policy '" + opt.sigma_policy + "'");
    sigma = estimate_sigma(policy, model ? &*model : nullptr);
  }

  CertificationReport report;
  if (model) {
    report = certify(*model, eta, sigma, opt.size_cap);
  } else {
    // Without data the condition can still fail outright; anything else
    // needs the model's contextual fraction.
    const double condition = 2.0 * eta.value + sigma.value;
    if (condition < 1.0)
      raise(ErrorCode::MissingField,
            "a model document is required when 2*eta+sigma < 1");
    report = certify_from_metrics(0.0, 0.0, 0.0, eta, sigma);
  }
  if (opt.beta_cl || opt.beta_max) {
    if (!(opt.beta_cl && opt.beta_max))
      raise(ErrorCode::MissingField, "--beta-cl and --beta-max come as a pair");
    report.corrected = CorrectedInequality{
        *opt.beta_cl, *opt.beta_max,
        corrected_inequality_bound(*opt.beta_cl, *opt.beta_max, report.eta.value)};
  }

  if (opt.json)
    std::cout << io::report_to_json(report);
  else
    std::cout << certify_human(report, model.has_value());
  switch (report.verdict) {
    case Verdict::GenuineContextuality: return 0;
    case Verdict::NotCertified: return 10;
    case Verdict::ConditionFailed: return 11;
  }
  return 10;
}

struct GenerateOpts {
  std::string name;
  std::string out;
  bool list = false;
};

int run_generate(const GenerateOpts& opt) {
  if (opt.list) {
    for (const auto& entry : catalog())
      std::cout << entry.name << ": " << entry.summary << "\n";
    return 0;
  }
  if (opt.name.empty())
    raise(ErrorCode::ParseError, "generate needs an entry name (or --list)");
  std::string name = opt.name;
  for (char& ch : name)
    if (ch == '-') ch = '_';
  auto entry = catalog_entry(name);
  std::string doc = io::serialize_model(entry.build());
  if (opt.out.empty())
    std::cout << doc;
  else
    io::write_file(opt.out, doc);
  return 0;
}

struct PerturbOpts {
  std::string path;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  bool renormalize = false;
};

int run_perturb(const PerturbOpts& opt) {
  auto parsed = io::load_model(opt.path, opt.renormalize);
  print_warnings(parsed.warnings);
  auto moved = perturb(parsed.model, opt.eps, opt.seed);
  std::cerr << "total variation from input: "
            << io::format_probability(total_variation(parsed.model, moved))
            << "\n";
  std::string doc = io::serialize_model(moved);
  if (opt.out.empty())
    std::cout << doc;
  else
    io::write_file(opt.out, doc);
  return 0;
}

struct DecomposeOpts {
  std::string path;
  std::string kind;
  std::string out_a;
  std::string out_b;
  bool json = false;
  bool renormalize = false;
  long long size_cap = kDefaultSizeCap;
};

int run_decompose(const DecomposeOpts& opt) {
  auto parsed = io::load_model(opt.path, opt.renormalize);
  print_warnings(parsed.warnings);
  const auto& e = parsed.model;
  Decomposition<double> d;
  if (opt.kind == "nc")
    d = nc_decomposition(e, opt.size_cap);
  else if (opt.kind == "ns")
    d = ns_decomposition(e, opt.size_cap);
  else
    raise(ErrorCode::ParseError, "--kind must be nc or ns");

  double err = 0.0;
  {
    Eigen::VectorXd recon = Eigen::VectorXd::Zero(e.flat.size());
    if (d.part_a) recon += d.lambda * d.part_a->flat;
    if (d.part_b) recon += (1.0 - d.lambda) * d.part_b->flat;
    err = (recon - e.flat).cwiseAbs().maxCoeff();
  }

  if (!opt.out_a.empty()) {
    if (!d.part_a)
      raise(ErrorCode::DegenerateResidual,
            "weight is zero; there is no part A to write");
    io::save_model(*d.part_a, opt.out_a);
  }
  if (!opt.out_b.empty()) {
    if (!d.part_b)
      raise(ErrorCode::DegenerateResidual,
            "weight is one; there is no part B to write");
    io::save_model(*d.part_b, opt.out_b);
  }

  if (opt.json) {
    std::cout << io::decomposition_to_json(opt.kind, d, err);
  } else {
    const char* label_a = opt.kind == "nc" ? "noncontextual" : "nonsignalling";
    std::cout << "kind: " << opt.kind << "\n";
    std::cout << "lambda: " << fixed6(d.lambda) << "\n";
    std::cout << "part A (" << label_a
              << "): " << (d.part_a ? "present" : "absent (weight 0)") << "\n";
    std::cout << "part B (residual): "
              << (d.part_b ? "present" : "absent (weight 1)") << "\n";
    std::cout << "reconstruction error: " << io::format_probability(err) << "\n";
  }
  return 0;
}

struct BellOpts {
  std::string path;
  bool json = false;
  bool renormalize = false;
  long long size_cap = kDefaultSizeCap;
};

int run_bell(const BellOpts& opt) {
  auto parsed = io::load_model(opt.path, opt.renormalize);
  print_warnings(parsed.warnings);
  auto b = bell_inequality(parsed.model, opt.size_cap);
  if (opt.json) {
    std::cout << io::bell_to_json(*parsed.model.scenario, b);
  } else {
    std::cout << "classical bound: " << fixed6(b.classical_bound) << "\n";
    std::cout << "algebraic max: " << fixed6(b.algebraic_max) << "\n";
    std::cout << "violation: " << fixed6(b.violation) << "\n";
    std::cout << "normalized violation: " << fixed6(b.normalized_violation)
              << "\n";
  }
  return 0;
}

struct AuditOpts {
  std::string path;
  bool json = false;
  long long size_cap = kDefaultSizeCap;
};

int run_audit(const AuditOpts& opt) {
  auto parsed = io::load_hvm(opt.path);
  print_warnings(parsed.warnings);
  auto a = audit(parsed.hvm, opt.size_cap);
  if (opt.json) {
    std::cout << io::audit_to_json(parsed.hvm, a);
  } else {
    std::cout << "eta: " << fixed6(a.eta) << "\n";
    std::cout << "sigma: " << fixed6(a.sigma) << "\n";
    std::cout << "condition 2*eta+sigma: " << fixed6(a.condition_value)
              << (a.condition_ok ? " (strictly below 1)" : " (not below 1)")
              << "\n";
    std::cout << "realized CF: " << fixed6(a.realized_cf) << "\n";
    for (size_t i = 0; i < parsed.hvm.lambdas.size(); ++i)
      std::cout << "  " << parsed.hvm.lambdas[i] << ": eta "
                << fixed6(a.per_lambda[i].first) << ", sigma "
                << fixed6(a.per_lambda[i].second) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contextuality and signalling measures of empirical models"};
  app.require_subcommand(1);

  AnalyzeOpts analyze_opts;
  auto* analyze = app.add_subcommand(
      "analyze", "fractions, signalling measures and eta* of a model document");
  analyze->add_option("paths", analyze_opts.paths, "model document(s)")
      ->required();
  analyze->add_flag("--json", analyze_opts.json, "machine-readable output");
  analyze->add_flag("--batch", analyze_opts.batch,
                    "process several documents concurrently");
  analyze->add_flag("--renormalize", analyze_opts.renormalize,
                    "rescale sloppy context totals instead of rejecting");
  analyze->add_option("--size-cap", analyze_opts.size_cap,
                      "maximum global assignment count for the LP");

  CertifyOpts certify_opts;
  auto* certify_cmd = app.add_subcommand(
      "certify", "decide genuine contextuality against defect bounds");
  certify_cmd->add_option("path", certify_opts.path,
                          "model document (optional when the condition fails)");
  certify_cmd->add_option("--eta", certify_opts.eta_manual,
                          "trusted eta value in [0,1]");
  certify_cmd->add_option(
      "--eta-estimator", certify_opts.eta_estimator,
      "one of manual, flip_probability, hardy_zero, repeatability, "
      "max_deviation, outcome_mismatch");
  certify_cmd
      ->add_option("--eta-inputs", certify_opts.eta_inputs,
                   "comma-separated estimator inputs")
      ->delimiter(',');
  certify_cmd->add_option("--sigma", certify_opts.sigma_manual,
                          "trusted sigma value in [0,1]");
  certify_cmd->add_option("--sigma-policy", certify_opts.sigma_policy,
                          "zero, sf_of_model, mim_of_model or manual");
  certify_cmd->add_option("--beta-cl", certify_opts.beta_cl,
                          "classical bound of an inequality to correct");
  certify_cmd->add_option("--beta-max", certify_opts.beta_max,
                          "algebraic maximum of that inequality");
  certify_cmd->add_flag("--json", certify_opts.json, "machine-readable output");
  certify_cmd->add_flag("--renormalize", certify_opts.renormalize,
                        "rescale sloppy context totals instead of rejecting");
  certify_cmd->add_option("--size-cap", certify_opts.size_cap,
                          "maximum global assignment count for the LP");

  GenerateOpts generate_opts;
  auto* generate =
      app.add_subcommand("generate", "write a catalogue model document");
  generate->add_option("name", generate_opts.name, "catalogue entry name");
  generate->add_option("--out", generate_opts.out, "output path (default stdout)");
  generate->add_flag("--list", generate_opts.list, "list catalogue entries");

  PerturbOpts perturb_opts;
  auto* perturb_cmd = app.add_subcommand(
      "perturb", "apply a seeded bounded-total-variation perturbation");
  perturb_cmd->add_option("path", perturb_opts.path, "model document")
      ->required();
  perturb_cmd->add_option("--eps", perturb_opts.eps, "total variation budget")
      ->required()
      ->check(CLI::NonNegativeNumber);
  perturb_cmd->add_option("--seed", perturb_opts.seed, "RNG seed (default 0)");
  perturb_cmd->add_option("--out", perturb_opts.out,
                          "output path (default stdout)");
  perturb_cmd->add_flag("--renormalize", perturb_opts.renormalize,
                        "rescale sloppy context totals instead of rejecting");

  DecomposeOpts decompose_opts;
  auto* decompose =
      app.add_subcommand("decompose", "split a model at its optimal witness");
  decompose->add_option("path", decompose_opts.path, "model document")
      ->required();
  decompose->add_option("--kind", decompose_opts.kind, "nc or ns")->required();
  decompose->add_option("--out-a", decompose_opts.out_a,
                        "write part A as a model document");
  decompose->add_option("--out-b", decompose_opts.out_b,
                        "write part B as a model document");
  decompose->add_flag("--json", decompose_opts.json, "machine-readable output");
  decompose->add_flag("--renormalize", decompose_opts.renormalize,
                      "rescale sloppy context totals instead of rejecting");
  decompose->add_option("--size-cap", decompose_opts.size_cap,
                        "maximum global assignment count for the LP");

  BellOpts bell_opts;
  auto* bell = app.add_subcommand(
      "bell", "derive the optimal inequality certified by the dual");
  bell->add_option("path", bell_opts.path, "model document")->required();
  bell->add_flag("--json", bell_opts.json, "machine-readable output");
  bell->add_flag("--renormalize", bell_opts.renormalize,
                 "rescale sloppy context totals instead of rejecting");
  bell->add_option("--size-cap", bell_opts.size_cap,
                   "maximum global assignment count for the LP");

  AuditOpts audit_opts;
  auto* audit_cmd = app.add_subcommand(
      "audit", "per-branch defects and realized CF of a hidden-variable model");
  audit_cmd->add_option("path", audit_opts.path, "HVM document")->required();
  audit_cmd->add_flag("--json", audit_opts.json, "machine-readable output");
  audit_cmd->add_option("--size-cap", audit_opts.size_cap,
                        "maximum global assignment count for the LP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help and version requests exit 0; genuine usage errors are parse errors
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(analyze)) return run_analyze(analyze_opts);
    if (app.got_subcommand(certify_cmd)) return run_certify(certify_opts);
    if (app.got_subcommand(generate)) return run_generate(generate_opts);
    if (app.got_subcommand(perturb_cmd)) return run_perturb(perturb_opts);
    if (app.got_subcommand(decompose)) return run_decompose(decompose_opts);
    if (app.got_subcommand(bell)) return run_bell(bell_opts);
    if (app.got_subcommand(audit_cmd)) return run_audit(audit_opts);
  } catch (const Error& err) {
    std::cerr << "error (" << category_name(category(err.code()))
              << "): " << err.what() << "\n";
    return exit_code_for(category(err.code()));
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 4;
  }
  return 0;
}
