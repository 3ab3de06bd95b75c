#pragma once

#include <string>
#include <vector>

#include "ctxfrac/certify.hpp"
#include "ctxfrac/empirical.hpp"
#include "ctxfrac/fractions.hpp"
#include "ctxfrac/hvm.hpp"
#include "ctxfrac/scenario.hpp"

// Document handling: UTF-8 JSON model/HVM files plus machine-readable report
// emission.  Serialization is canonical -- fixed key order, fixed number
// rendering at 12 significant digits -- so generate -> parse -> serialize
// reproduces files byte for byte.
namespace ctxfrac::io {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

// Canonical probability rendering: %.12g with negative zero normalized.
std::string format_probability(double v);
std::string json_escape(const std::string& s);

// Streaming JSON emitter with the canonical layout: objects one member per
// line, scalar arrays inline, two-space indent, trailing newline.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array(bool inline_items = true);
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& string_value(const std::string& v);
  JsonWriter& number_value(double v);
  JsonWriter& integer_value(long long v);
  JsonWriter& bool_value(bool v);
  std::string take();

 private:
  struct Frame {
    bool is_array = false;
    bool inline_items = false;
    long long count = 0;
  };
  void element_prefix();
  void open(char c, bool is_array);
  void close(char c);
  std::string out_;
  std::vector<Frame> frames_;
  bool pending_key_ = false;
};

struct ParsedModel {
  EmpiricalModel<double> model;
  std::vector<std::string> warnings;
};

// Accepts a document with a "scenario" section and either a "model" section
// (probabilities; validated strictly unless renormalize is set) or a
// "counts" section (nonnegative event counts, normalized with a warning).
ParsedModel parse_model(const std::string& text, bool renormalize = false);
ParsedModel load_model(const std::string& path, bool renormalize = false);
std::string serialize_model(const EmpiricalModel<double>& e);
void save_model(const EmpiricalModel<double>& e, const std::string& path);

struct ParsedHvm {
  HiddenVariableModel<double> hvm;
  std::vector<std::string> warnings;
};

// HVM documents: a scenario, the label list, a prior keyed by label, and one
// model section per label.
ParsedHvm parse_hvm(const std::string& text);
ParsedHvm load_hvm(const std::string& path);
std::string serialize_hvm(const HiddenVariableModel<double>& h);

struct AnalysisSummary {
  double cf = 0, ncf = 0, sf = 0, nsf = 0, mim = 0, eta_star = 0;
  bool nonsignalling = false;
  double max_signalling_gap = 0;
  long long contexts = 0;
  long long global_assignments = 0;
};

std::string analysis_to_json(const AnalysisSummary& a);
std::string report_to_json(const CertificationReport& r);
std::string bell_to_json(const MeasurementScenario& s,
                         const BellInequality<double>& b);
std::string audit_to_json(const HiddenVariableModel<double>& h,
                          const HvmAudit<double>& a);
std::string decomposition_to_json(const std::string& kind,
                                  const Decomposition<double>& d,
                                  double reconstruction_error);

}  // namespace ctxfrac::io
