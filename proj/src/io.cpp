#include "ctxfrac/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ctxfrac::io {

namespace {

using njson = nlohmann::ordered_json;

[[noreturn]] void fail_parse(const std::string& msg) {
  raise(ErrorCode::ParseError, msg);
}

njson parse_json_text(const std::string& text) {
  try {
    return njson::parse(text);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    fail_parse(std::string("invalid JSON: ") + ex.what());
  }
}

const njson& member(const njson& j, const char* key, const char* where) {
  if (!j.is_object())
    fail_parse(std::string(where) + " must be a JSON object");
  auto it = j.find(key);
  if (it == j.end())
    fail_parse(std::string(where) + " is missing \"" + key + "\"");
  return *it;
}

std::vector<std::string> string_array(const njson& j, const std::string& where) {
  if (!j.is_array()) fail_parse(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) fail_parse(where + " must contain only strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

double number_in(const njson& v, const std::string& where) {
  if (!v.is_number()) fail_parse(where + " must be a number");
  return v.get<double>();
}

void reject_unknown_keys(const njson& j, std::initializer_list<const char*> allowed,
                         const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok)
      fail_parse(std::string("unknown key \"") + it.key() + "\" in " + where);
  }
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& key) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : key) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

// Keys are comma-joined label tuples, so labels with commas would be
// ambiguous on disk even though the library itself allows them.
void require_document_safe_labels(const MeasurementScenario& s) {
  for (const auto& m : s.measurements)
    if (m.find(',') != std::string::npos)
      fail_parse("measurement label '" + m + "' contains a comma; not representable");
  for (const auto& list : s.outcomes)
    for (const auto& o : list)
      if (o.find(',') != std::string::npos)
        fail_parse("outcome label '" + o + "' contains a comma; not representable");
}

ScenarioPtr scenario_from_json(const njson& root) {
  const njson& sj = member(root, "scenario", "document");
  reject_unknown_keys(sj, {"measurements", "outcomes", "contexts"}, "\"scenario\"");
  auto measurements =
      string_array(member(sj, "measurements", "\"scenario\""), "\"measurements\"");
  const njson& oj = member(sj, "outcomes", "\"scenario\"");
  if (!oj.is_object()) fail_parse("\"outcomes\" must be an object");
  std::map<std::string, std::vector<std::string>> outcomes;
  for (auto it = oj.begin(); it != oj.end(); ++it)
    outcomes[it.key()] =
        string_array(it.value(), "outcome list for '" + it.key() + "'");
  const njson& cj = member(sj, "contexts", "\"scenario\"");
  if (!cj.is_array()) fail_parse("\"contexts\" must be an array of arrays");
  std::vector<std::vector<std::string>> contexts;
  for (const auto& ctx : cj)
    contexts.push_back(string_array(ctx, "a context"));
  auto s = make_scenario(std::move(measurements), std::move(contexts), outcomes);
  require_document_safe_labels(*s);
  return s;
}

std::string context_key(const MeasurementScenario& s, int c) {
  return join(s.context_labels[c]);
}

std::string outcome_key(const MeasurementScenario& s, int c, long long index) {
  const auto& ctx = s.contexts[c];
  std::vector<std::string> parts(ctx.size());
  long long rem = index;
  for (int i = static_cast<int>(ctx.size()) - 1; i >= 0; --i) {
    const auto& olist = s.outcomes[ctx[i]];
    parts[i] = olist[rem % static_cast<long long>(olist.size())];
    rem /= static_cast<long long>(olist.size());
  }
  return join(parts);
}

long long outcome_index_for(const MeasurementScenario& s, int c,
                            const std::string& key, const std::string& ctx_label) {
  auto parts = split(key);
  const auto& ctx = s.contexts[c];
  if (parts.size() != ctx.size())
    fail_parse("outcome key \"" + key + "\" for context \"" + ctx_label +
               "\" names " + std::to_string(parts.size()) +
               " outcomes, expected " + std::to_string(ctx.size()));
  long long idx = 0;
  for (size_t i = 0; i < ctx.size(); ++i) {
    const auto& olist = s.outcomes[ctx[i]];
    auto pos = std::find(olist.begin(), olist.end(), parts[i]);
    if (pos == olist.end())
      fail_parse("unknown outcome \"" + parts[i] + "\" for measurement '" +
                 s.measurements[ctx[i]] + "' in key \"" + key + "\"");
    idx = idx * static_cast<long long>(olist.size()) + (pos - olist.begin());
  }
  return idx;
}

// One table per context, entries default to zero when a key is omitted.
std::vector<std::vector<double>> section_to_tables(const MeasurementScenario& s,
                                                   const njson& mj,
                                                   const char* name) {
  if (!mj.is_object())
    fail_parse(std::string("\"") + name + "\" must be an object");
  std::map<std::string, int> by_label;
  for (int c = 0; c < s.context_count(); ++c) by_label[context_key(s, c)] = c;
  std::vector<std::vector<double>> tables(s.context_count());
  for (int c = 0; c < s.context_count(); ++c)
    tables[c].assign(static_cast<size_t>(s.context_outcome_count(c)), 0.0);
  std::set<int> seen;
  for (auto it = mj.begin(); it != mj.end(); ++it) {
    auto f = by_label.find(it.key());
    if (f == by_label.end())
      fail_parse("table for unknown context \"" + it.key() + "\"");
    int c = f->second;
    seen.insert(c);
    const njson& tj = it.value();
    if (!tj.is_object())
      fail_parse("table for context \"" + it.key() + "\" must be an object");
    for (auto jt = tj.begin(); jt != tj.end(); ++jt) {
      long long o = outcome_index_for(s, c, jt.key(), it.key());
      tables[c][static_cast<size_t>(o)] =
          number_in(jt.value(), "entry \"" + jt.key() + "\" of context \"" +
                                    it.key() + "\"");
    }
  }
  for (int c = 0; c < s.context_count(); ++c)
    if (!seen.count(c))
      fail_parse("missing table for context \"" + context_key(s, c) + "\"");
  return tables;
}

void write_scenario(JsonWriter& w, const MeasurementScenario& s) {
  w.key("scenario").begin_object();
  w.key("measurements").begin_array();
  for (const auto& m : s.measurements) w.string_value(m);
  w.end_array();
  w.key("outcomes").begin_object();
  for (int i = 0; i < s.measurement_count(); ++i) {
    w.key(s.measurements[i]).begin_array();
    for (const auto& o : s.outcomes[i]) w.string_value(o);
    w.end_array();
  }
  w.end_object();
  w.key("contexts").begin_array(false);
  for (const auto& ctx : s.context_labels) {
    w.begin_array();
    for (const auto& m : ctx) w.string_value(m);
    w.end_array();
  }
  w.end_array();
  w.end_object();
}

// Shared by model documents and Bell coefficient emission: one object per
// context, keys in mixed-radix outcome order.
void write_section(JsonWriter& w, const MeasurementScenario& s,
                   const Eigen::VectorXd& flat, const char* name) {
  w.key(name).begin_object();
  for (int c = 0; c < s.context_count(); ++c) {
    w.key(context_key(s, c)).begin_object();
    for (long long o = 0; o < s.context_outcome_count(c); ++o) {
      w.key(outcome_key(s, c, o));
      w.number_value(flat[s.context_offsets[c] + o]);
    }
    w.end_object();
  }
  w.end_object();
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_parse("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail_parse("cannot read file '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail_parse("cannot open file '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) fail_parse("cannot write file '" + path + "'");
}

std::string format_probability(double v) {
  if (!std::isfinite(v))
    raise(ErrorCode::NumericalFailure, "non-finite value in document output");
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (ch < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += static_cast<char>(ch);
        }
    }
  }
  return out;
}

void JsonWriter::element_prefix() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (frames_.empty()) return;
  Frame& f = frames_.back();
  if (f.count > 0) out_ += f.inline_items ? ", " : ",";
  if (!f.inline_items) {
    out_ += '\n';
    out_.append(2 * frames_.size(), ' ');
  }
  ++f.count;
}

void JsonWriter::open(char c, bool inline_items) {
  element_prefix();
  out_ += c;
  frames_.push_back(Frame{c == '[', inline_items, 0});
}

void JsonWriter::close(char c) {
  Frame f = frames_.back();
  frames_.pop_back();
  if (!f.inline_items && f.count > 0) {
    out_ += '\n';
    out_.append(2 * frames_.size(), ' ');
  }
  out_ += c;
}

JsonWriter& JsonWriter::begin_object() {
  open('{', false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  close('}');
  return *this;
}

JsonWriter& JsonWriter::begin_array(bool inline_items) {
  open('[', inline_items);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  close(']');
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
  element_prefix();
  out_ += '"';
  out_ += json_escape(k);
  out_ += "\": ";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::string_value(const std::string& v) {
  element_prefix();
  out_ += '"';
  out_ += json_escape(v);
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::number_value(double v) {
  element_prefix();
  out_ += format_probability(v);
  return *this;
}

JsonWriter& JsonWriter::integer_value(long long v) {
  element_prefix();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::bool_value(bool v) {
  element_prefix();
  out_ += v ? "true" : "false";
  return *this;
}

std::string JsonWriter::take() {
  out_ += '\n';
  return std::move(out_);
}

ParsedModel parse_model(const std::string& text, bool renormalize) {
  njson root = parse_json_text(text);
  if (!root.is_object()) fail_parse("document must be a JSON object");
  reject_unknown_keys(root, {"scenario", "model", "counts"}, "the document");
  ScenarioPtr s = scenario_from_json(root);

  const bool has_model = root.contains("model");
  const bool has_counts = root.contains("counts");
  if (has_model && has_counts)
    fail_parse("document has both \"model\" and \"counts\"; provide exactly one");
  if (!has_model && !has_counts)
    fail_parse("document needs a \"model\" or \"counts\" section");

  ParsedModel out{EmpiricalModel<double>{}, {}};
  out.warnings = s->warnings;
  if (has_counts) {
    auto tables = section_to_tables(*s, root["counts"], "counts");
    auto [model, sums] = make_model_renormalized<double>(s, tables);
    double lo = sums[0], hi = sums[0];
    for (double v : sums) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out.model = std::move(model);
    out.warnings.push_back(
        "counts normalized to relative frequencies (context totals " +
        format_probability(lo) + " to " + format_probability(hi) +
        "); no finite-statistics correction is applied");
  } else {
    auto tables = section_to_tables(*s, root["model"], "model");
    if (renormalize) {
      auto [model, sums] = make_model_renormalized<double>(s, tables);
      double dev = 0;
      for (double v : sums) dev = std::max(dev, std::abs(v - 1.0));
      out.model = std::move(model);
      if (dev > numeric_policy<double>::validation())
        out.warnings.push_back(
            "model section renormalized; largest context total deviated from 1 by " +
            format_probability(dev));
    } else {
      out.model = make_model<double>(s, tables);
    }
  }
  return out;
}

ParsedModel load_model(const std::string& path, bool renormalize) {
  return parse_model(read_file(path), renormalize);
}

std::string serialize_model(const EmpiricalModel<double>& e) {
  const auto& s = *e.scenario;
  require_document_safe_labels(s);
  JsonWriter w;
  w.begin_object();
  write_scenario(w, s);
  write_section(w, s, e.flat, "model");
  w.end_object();
  return w.take();
}

void save_model(const EmpiricalModel<double>& e, const std::string& path) {
  write_file(path, serialize_model(e));
}

ParsedHvm parse_hvm(const std::string& text) {
  njson root = parse_json_text(text);
  if (!root.is_object()) fail_parse("document must be a JSON object");
  reject_unknown_keys(root, {"scenario", "lambdas", "prior", "behaviours"},
                      "the document");
  ScenarioPtr s = scenario_from_json(root);

  auto lambdas = string_array(member(root, "lambdas", "document"), "\"lambdas\"");
  if (lambdas.empty()) fail_parse("\"lambdas\" must not be empty");
  {
    std::set<std::string> uniq(lambdas.begin(), lambdas.end());
    if (uniq.size() != lambdas.size()) fail_parse("duplicate lambda label");
  }

  const njson& pj = member(root, "prior", "document");
  if (!pj.is_object()) fail_parse("\"prior\" must be an object");
  std::vector<double> prior;
  {
    std::set<std::string> known(lambdas.begin(), lambdas.end());
    for (auto it = pj.begin(); it != pj.end(); ++it)
      if (!known.count(it.key()))
        fail_parse("prior entry for unknown label \"" + it.key() + "\"");
    for (const auto& label : lambdas) {
      auto it = pj.find(label);
      if (it == pj.end())
        fail_parse("prior is missing label \"" + label + "\"");
      prior.push_back(number_in(*it, "prior for \"" + label + "\""));
    }
  }

  const njson& bj = member(root, "behaviours", "document");
  if (!bj.is_object()) fail_parse("\"behaviours\" must be an object");
  {
    std::set<std::string> known(lambdas.begin(), lambdas.end());
    for (auto it = bj.begin(); it != bj.end(); ++it)
      if (!known.count(it.key()))
        fail_parse("behaviour for unknown label \"" + it.key() + "\"");
  }
  std::vector<EmpiricalModel<double>> behaviours;
  for (const auto& label : lambdas) {
    auto it = bj.find(label);
    if (it == bj.end())
      fail_parse("behaviours section is missing label \"" + label + "\"");
    auto tables = section_to_tables(*s, *it, "behaviours");
    behaviours.push_back(make_model<double>(s, tables));
  }

  ParsedHvm out{make_hvm<double>(std::move(lambdas), std::move(prior),
                                 std::move(behaviours)),
                {}};
  out.warnings = s->warnings;
  return out;
}

ParsedHvm load_hvm(const std::string& path) { return parse_hvm(read_file(path)); }

std::string serialize_hvm(const HiddenVariableModel<double>& h) {
  const auto& s = *h.behaviours.front().scenario;
  require_document_safe_labels(s);
  for (const auto& label : h.lambdas)
    if (label.find(',') != std::string::npos)
      fail_parse("lambda label '" + label + "' contains a comma; not representable");
  JsonWriter w;
  w.begin_object();
  write_scenario(w, s);
  w.key("lambdas").begin_array();
  for (const auto& label : h.lambdas) w.string_value(label);
  w.end_array();
  w.key("prior").begin_object();
  for (size_t i = 0; i < h.lambdas.size(); ++i) {
    w.key(h.lambdas[i]);
    w.number_value(h.prior[static_cast<Eigen::Index>(i)]);
  }
  w.end_object();
  w.key("behaviours").begin_object();
  for (size_t i = 0; i < h.lambdas.size(); ++i) {
    w.key(h.lambdas[i]).begin_object();
    const auto& e = h.behaviours[i];
    for (int c = 0; c < s.context_count(); ++c) {
      w.key(context_key(s, c)).begin_object();
      for (long long o = 0; o < s.context_outcome_count(c); ++o) {
        w.key(outcome_key(s, c, o));
        w.number_value(e.flat[s.context_offsets[c] + o]);
      }
      w.end_object();
    }
    w.end_object();
  }
  w.end_object();
  w.end_object();
  return w.take();
}

std::string analysis_to_json(const AnalysisSummary& a) {
  JsonWriter w;
  w.begin_object();
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
  w.end_object();
  return w.take();
}

std::string report_to_json(const CertificationReport& r) {
  JsonWriter w;
  w.begin_object();
  w.key("cf").number_value(r.cf);
  w.key("sf").number_value(r.sf);
  w.key("mim").number_value(r.mim_value);
  w.key("eta").begin_object();
  w.key("value").number_value(r.eta.value);
  w.key("provenance").string_value(r.eta.provenance);
  w.end_object();
  w.key("sigma").begin_object();
  w.key("value").number_value(r.sigma.value);
  w.key("provenance").string_value(r.sigma.provenance);
  w.end_object();
  w.key("condition_value").number_value(r.condition_value);
  w.key("condition_ok").bool_value(r.condition_ok);
  w.key("verdict").string_value(to_string(r.verdict));
  if (r.corrected) {
    w.key("corrected_inequality").begin_object();
    w.key("beta_cl").number_value(r.corrected->beta_cl);
    w.key("beta_max").number_value(r.corrected->beta_max);
    w.key("corrected_bound").number_value(r.corrected->corrected_bound);
    w.end_object();
  }
  w.end_object();
  return w.take();
}

std::string bell_to_json(const MeasurementScenario& s,
                         const BellInequality<double>& b) {
  require_document_safe_labels(s);
  JsonWriter w;
  w.begin_object();
  w.key("classical_bound").number_value(b.classical_bound);
  w.key("algebraic_max").number_value(b.algebraic_max);
  w.key("violation").number_value(b.violation);
  w.key("normalized_violation").number_value(b.normalized_violation);
  write_section(w, s, b.coefficients, "coefficients");
  w.end_object();
  return w.take();
}

std::string audit_to_json(const HiddenVariableModel<double>& h,
                          const HvmAudit<double>& a) {
  JsonWriter w;
  w.begin_object();
  w.key("eta").number_value(a.eta);
  w.key("sigma").number_value(a.sigma);
  w.key("condition_value").number_value(a.condition_value);
  w.key("condition_ok").bool_value(a.condition_ok);
  w.key("realized_cf").number_value(a.realized_cf);
  w.key("per_lambda").begin_array(false);
  for (size_t i = 0; i < h.lambdas.size(); ++i) {
    w.begin_object();
    w.key("label").string_value(h.lambdas[i]);
    w.key("eta").number_value(a.per_lambda[i].first);
    w.key("sigma").number_value(a.per_lambda[i].second);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.take();
}

std::string decomposition_to_json(const std::string& kind,
                                  const Decomposition<double>& d,
                                  double reconstruction_error) {
  JsonWriter w;
  w.begin_object();
  w.key("kind").string_value(kind);
  w.key("lambda").number_value(d.lambda);
  w.key("part_a_present").bool_value(d.part_a.has_value());
  w.key("part_b_present").bool_value(d.part_b.has_value());
  w.key("reconstruction_error").number_value(reconstruction_error);
  w.end_object();
  return w.take();
}

}  // namespace ctxfrac::io
