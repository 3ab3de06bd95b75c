#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "helpers.hpp"
#include "ctxfrac/hvm.hpp"
#include "ctxfrac/io.hpp"

using namespace ctxfrac;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() /
             ("ctxfrac_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  const fs::path out = scratch_dir() / "stdout.txt";
  const fs::path err = scratch_dir() / "stderr.txt";
  const std::string cmd = std::string(CTXFRAC_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream ss(text);
  std::string current;
  while (std::getline(ss, current))
    if (current == line) return true;
  return false;
}

fs::path write_doc(const std::string& name, const std::string& bytes) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p, std::ios::binary) << bytes;
  return p;
}

}  // namespace

TEST_CASE("generate lists the catalogue and accepts dashed names") {
  auto list = run_cli("generate --list");
  CHECK(list.exit_code == 0);
  for (const auto& entry : catalog()) {
    CAPTURE(entry.name);
    CHECK(list.out.find(entry.name + ": " + entry.summary) !=
          std::string::npos);
  }

  const fs::path out = scratch_dir() / "pr_dashed.json";
  auto gen = run_cli("generate pr-box --out " + out.string());
  CHECK(gen.exit_code == 0);
  CHECK(slurp(out) == io::serialize_model(pr_box<double>()));

  // the invocation itself parses; the lookup fails validation
  CHECK(run_cli("generate nonsense_name").exit_code == 3);
}

TEST_CASE("analyze prints the full metric block") {
  const fs::path doc = scratch_dir() / "pr.json";
  REQUIRE(run_cli("generate pr_box --out " + doc.string()).exit_code == 0);

  auto r = run_cli("analyze " + doc.string());
  CHECK(r.exit_code == 0);
  CHECK(has_line(r.out, "contexts: 4"));
  CHECK(has_line(r.out, "global assignments: 16"));
  CHECK(has_line(r.out, "CF: 1.000000"));
  CHECK(has_line(r.out, "NCF: 0.000000"));
  CHECK(has_line(r.out, "SF: 0.000000"));
  CHECK(has_line(r.out, "NSF: 1.000000"));
  CHECK(has_line(r.out, "MIM: 0.000000"));
  CHECK(has_line(r.out, "non-signalling: yes (max marginal gap 0.000000)"));
  CHECK(has_line(r.out, "eta*: 0.500000"));

  auto j = run_cli("analyze --json " + doc.string());
  CHECK(j.exit_code == 0);
  auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed["cf"] == 1.0);
  CHECK(parsed["sf"] == 0.0);
  CHECK(parsed["eta_star"] == 0.5);
  CHECK(parsed["nonsignalling"] == true);
  CHECK(parsed["contexts"] == 4);
  CHECK(parsed["global_assignments"] == 16);
}

TEST_CASE("failure categories map to distinct exit codes") {
  CHECK(run_cli("analyze " + (scratch_dir() / "absent.json").string())
            .exit_code == 2);

  // valid JSON, invalid distribution: a context summing to 2
  const fs::path bad = write_doc("bad_sum.json", R"({
    "scenario": {
      "measurements": ["x"],
      "outcomes": {"x": ["0", "1"]},
      "contexts": [["x"]]
    },
    "model": {"x": {"0": 1, "1": 1}}
  })");
  auto r = run_cli("analyze " + bad.string());
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("error (validation):") != std::string::npos);

  // same document is accepted once renormalization is requested
  auto fixed = run_cli("analyze --renormalize " + bad.string());
  CHECK(fixed.exit_code == 0);
  CHECK(fixed.err.find("renormalized") != std::string::npos);

  const fs::path pr = scratch_dir() / "pr_exit.json";
  REQUIRE(run_cli("generate pr_box --out " + pr.string()).exit_code == 0);
  CHECK(run_cli("certify " + pr.string() + " --eta 2").exit_code == 5);
  CHECK(run_cli("certify " + pr.string()).exit_code == 5);
}

TEST_CASE("certify verdicts drive the exit code") {
  const fs::path chsh = scratch_dir() / "chsh.json";
  REQUIRE(run_cli("generate chsh_quantum --out " + chsh.string()).exit_code ==
          0);

  auto genuine = run_cli("certify " + chsh.string() + " --eta 0.01 --sigma 0.001");
  CHECK(genuine.exit_code == 0);
  CHECK(has_line(genuine.out, "eta: 0.010000 (manual: eta = 0.01 as supplied)"));
  CHECK(has_line(genuine.out,
                 "condition 2*eta+sigma: 0.021000 (strictly below 1: "
                 "relaxation is restrictive)"));
  CHECK(has_line(genuine.out, "verdict: GenuineContextuality"));

  auto not_certified = run_cli("certify " + chsh.string() + " --eta 0.45");
  CHECK(not_certified.exit_code == 10);
  CHECK(has_line(not_certified.out, "verdict: NotCertified"));

  auto failed = run_cli("certify " + chsh.string() + " --eta 0.5");
  CHECK(failed.exit_code == 11);
  CHECK(has_line(failed.out, "verdict: ConditionFailed"));

  auto corrected = run_cli("certify " + chsh.string() +
                           " --eta-estimator repeatability --eta-inputs 0.03"
                           " --beta-cl 2 --beta-max 4");
  CHECK(corrected.exit_code == 0);
  CHECK(has_line(corrected.out,
                 "eta: 0.059100 (repeatability: eta = 2*eps - eps^2 with "
                 "eps = 0.03)"));
  CHECK(has_line(corrected.out,
                 "corrected inequality bound: 2.118200 (classical 2.000000, "
                 "algebraic 4.000000)"));

  // flag-only mode needs the condition to fail, else a model is mandatory
  CHECK(run_cli("certify --eta 0.6").exit_code == 11);
  CHECK(run_cli("certify --eta 0.01").exit_code == 5);

  auto sigma_from_data = run_cli("certify " + chsh.string() +
                                 " --eta 0.01 --sigma-policy sf_of_model");
  CHECK(sigma_from_data.exit_code == 0);
  CHECK(sigma_from_data.out.find("signalling fraction of the data") !=
        std::string::npos);
}

TEST_CASE("perturb at zero radius reproduces the document") {
  const fs::path src = scratch_dir() / "cycle5.json";
  REQUIRE(run_cli("generate cycle5_box --out " + src.string()).exit_code == 0);

  const fs::path zero = scratch_dir() / "cycle5_eps0.json";
  auto r0 = run_cli("perturb " + src.string() + " --eps 0 --out " +
                    zero.string());
  CHECK(r0.exit_code == 0);
  CHECK(slurp(zero) == slurp(src));
  CHECK(r0.err.find("total variation from input: 0") != std::string::npos);

  const fs::path moved = scratch_dir() / "cycle5_eps.json";
  auto r1 = run_cli("perturb " + src.string() + " --eps 0.01 --seed 7 --out " +
                    moved.string());
  CHECK(r1.exit_code == 0);
  auto source = io::load_model(src.string());
  auto shifted = io::load_model(moved.string());
  CHECK(to_double(total_variation(source.model, shifted.model)) <=
        0.01 + 1e-9);
}

TEST_CASE("batch analysis isolates failures per document") {
  const fs::path ok = scratch_dir() / "batch_ok.json";
  REQUIRE(run_cli("generate pr_box --out " + ok.string()).exit_code == 0);
  const fs::path missing = scratch_dir() / "batch_missing.json";

  auto r = run_cli("analyze --batch " + ok.string() + " " + missing.string());
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("== " + ok.string() + " ==") != std::string::npos);
  CHECK(has_line(r.out, "CF: 1.000000"));
  CHECK(r.out.find("== " + missing.string() + " ==") != std::string::npos);
  CHECK(r.out.find("error (parse):") != std::string::npos);
  CHECK(r.out.find("cannot open file") != std::string::npos);
  // the good document comes first in the report, the failure after it
  CHECK(r.out.find("== " + ok.string() + " ==") <
        r.out.find("== " + missing.string() + " =="));

  auto j = run_cli("analyze --batch --json " + ok.string() + " " +
                   missing.string());
  CHECK(j.exit_code == 2);
  auto parsed = nlohmann::json::parse(j.out);
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0]["path"] == ok.string());
  CHECK(parsed[0]["ok"] == true);
  CHECK(parsed[0]["cf"] == 1.0);
  CHECK(parsed[1]["ok"] == false);
  CHECK(parsed[1]["error"]["category"] == "parse");

  // all-good batches exit cleanly
  auto all_ok = run_cli("analyze --batch " + ok.string() + " " + ok.string());
  CHECK(all_ok.exit_code == 0);
}

TEST_CASE("decompose emits both parts for a proper mixture") {
  const fs::path chsh = scratch_dir() / "chsh_dec.json";
  REQUIRE(run_cli("generate chsh_quantum --out " + chsh.string()).exit_code ==
          0);
  const fs::path pa = scratch_dir() / "part_a.json";
  const fs::path pb = scratch_dir() / "part_b.json";
  auto r = run_cli("decompose " + chsh.string() + " --kind nc --out-a " +
                   pa.string() + " --out-b " + pb.string());
  CHECK(r.exit_code == 0);
  CHECK(has_line(r.out, "lambda: 0.585786"));
  CHECK(has_line(r.out, "reconstruction error: 0"));

  auto a = io::load_model(pa.string());
  auto b = io::load_model(pb.string());
  CHECK(contextual_fraction(a.model) <= 1e-8);
  CHECK(contextual_fraction(b.model) >= 1.0 - 1e-8);

  // degenerate side: the two-party box is already fully contextual
  const fs::path pr = scratch_dir() / "pr_dec.json";
  REQUIRE(run_cli("generate pr_box --out " + pr.string()).exit_code == 0);
  auto deg = run_cli("decompose " + pr.string() + " --kind nc --out-a " +
                     (scratch_dir() / "deg_a.json").string());
  CHECK(deg.exit_code == 3);
  CHECK(deg.err.find("no part A to write") != std::string::npos);
}

TEST_CASE("bell prints the frozen facet facts") {
  const fs::path chsh = scratch_dir() / "chsh_bell.json";
  REQUIRE(run_cli("generate chsh_quantum --out " + chsh.string()).exit_code ==
          0);
  auto r = run_cli("bell " + chsh.string());
  CHECK(r.exit_code == 0);
  CHECK(has_line(r.out, "classical bound: 0.000000"));
  CHECK(has_line(r.out, "algebraic max: 1.000000"));
  CHECK(has_line(r.out, "violation: 0.414214"));
  CHECK(has_line(r.out, "normalized violation: 0.414214"));

  auto j = run_cli("bell --json " + chsh.string());
  CHECK(j.exit_code == 0);
  auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed["coefficients"]["a,b"].size() == 4);
}

TEST_CASE("audit reports the relaxation defects of a stored explanation") {
  const fs::path doc =
      write_doc("pr_hvm.json", io::serialize_hvm(pr_box_hvm<double>()));
  auto r = run_cli("audit " + doc.string());
  CHECK(r.exit_code == 0);
  CHECK(has_line(r.out, "eta: 0.000000"));
  CHECK(has_line(r.out, "sigma: 1.000000"));
  CHECK(has_line(r.out, "condition 2*eta+sigma: 1.000000 (not below 1)"));
  CHECK(has_line(r.out, "realized CF: 1.000000"));
  CHECK(has_line(r.out, "  lambda1: eta 0.000000, sigma 1.000000"));
  CHECK(has_line(r.out, "  lambda2: eta 0.000000, sigma 1.000000"));
}

TEST_CASE("usage errors are parse failures") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("analyze").exit_code == 2);
}
