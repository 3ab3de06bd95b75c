#include "doctest.h"

#include "ctxfrac/rational.hpp"
#include "ctxfrac/scenario.hpp"

using namespace ctxfrac;

namespace {

ScenarioPtr tiny_chsh() {
  return make_scenario(
      {"a", "a'", "b", "b'"},
      {{"a", "b"}, {"a", "b'"}, {"a'", "b"}, {"a'", "b'"}},
      {{"a", {"0", "1"}},
       {"a'", {"0", "1"}},
       {"b", {"0", "1"}},
       {"b'", {"0", "1"}}});
}

}  // namespace

TEST_CASE("scenario construction freezes counts and offsets") {
  auto s = tiny_chsh();
  CHECK(s->measurement_count() == 4);
  CHECK(s->context_count() == 4);
  CHECK(s->global_count == 16);
  CHECK(s->local_count == 16);
  CHECK(s->context_offsets.front() == 0);
  CHECK(s->context_offsets.back() == s->local_count);
  for (int c = 0; c < 4; ++c) CHECK(s->context_outcome_count(c) == 4);
  CHECK(s->warnings.empty());
}

TEST_CASE("scenario validation rejects malformed input") {
  std::map<std::string, std::vector<std::string>> oc{{"a", {"0", "1"}},
                                                     {"b", {"0", "1"}}};
  CHECK_THROWS_AS(make_scenario({}, {{"a"}}, oc), Error);
  CHECK_THROWS_AS(make_scenario({"a", "a"}, {{"a"}}, oc), Error);
  CHECK_THROWS_AS(make_scenario({"a", "b"}, {}, oc), Error);
  CHECK_THROWS_AS(make_scenario({"a", "b"}, {{}}, oc), Error);
  // context names an unknown measurement
  CHECK_THROWS_AS(make_scenario({"a", "b"}, {{"a", "c"}}, oc), Error);
  // duplicate measurement within one context
  CHECK_THROWS_AS(make_scenario({"a", "b"}, {{"a", "a"}, {"a", "b"}}, oc),
                  Error);
  // duplicate context as a set
  CHECK_THROWS_AS(
      make_scenario({"a", "b"}, {{"a", "b"}, {"b", "a"}}, oc), Error);
  // cover violation: measurement b never appears
  CHECK_THROWS_AS(make_scenario({"a", "b"}, {{"a"}}, oc), Error);
  // outcomes listed for a label that is not a measurement
  CHECK_THROWS_AS(make_scenario({"a"}, {{"a"}},
                                {{"a", {"0"}}, {"zz", {"0"}}}),
                  Error);
  // no outcomes for some measurement
  CHECK_THROWS_AS(make_scenario({"a", "b"}, {{"a", "b"}}, {{"a", {"0", "1"}}}),
                  Error);
  // empty outcome list
  CHECK_THROWS_AS(
      make_scenario({"a", "b"}, {{"a", "b"}}, {{"a", {}}, {"b", {"0"}}}),
      Error);
  // duplicate outcome label
  CHECK_THROWS_AS(make_scenario({"a", "b"}, {{"a", "b"}},
                                {{"a", {"0", "0"}}, {"b", {"0", "1"}}}),
                  Error);
}

TEST_CASE("single-outcome measurements are degenerate but allowed") {
  auto s = make_scenario({"a", "b"}, {{"a", "b"}},
                         {{"a", {"only"}}, {"b", {"0", "1"}}});
  REQUIRE(s->warnings.size() == 1);
  CHECK(s->warnings[0].find("degenerate") != std::string::npos);
  CHECK(s->global_count == 2);
}

TEST_CASE("error codes carry the right category") {
  try {
    make_scenario({}, {{"a"}}, {});
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::CoverViolation);
    CHECK(category(err.code()) == ErrorCategory::Validation);
  }
}

TEST_CASE("global encode and decode are inverse") {
  auto s = tiny_chsh();
  for (unsigned long long g = 0; g < s->global_count; ++g)
    CHECK(encode_global(*s, decode_global(*s, g)) == g);
  // first measurement is the most significant digit
  CHECK(decode_global(*s, 8) == std::vector<int>{1, 0, 0, 0});
  CHECK_THROWS_AS(decode_global(*s, 16), Error);
  CHECK_THROWS_AS(encode_global(*s, {0, 0, 0, 2}), Error);
}

TEST_CASE("local encode and decode are inverse") {
  auto s = tiny_chsh();
  for (long long t = 0; t < s->local_count; ++t) {
    auto la = decode_local(*s, t);
    CHECK(encode_local(*s, la.context, la.digits) == t);
  }
}

TEST_CASE("restriction of a global assignment picks the context digits") {
  auto s = tiny_chsh();
  std::vector<int> digits{1, 0, 1, 1};  // a=1, a'=0, b=1, b'=1
  // context 0 is (a, b) -> joint outcome (1,1), block starts at 0
  CHECK(restrict_global(*s, digits, 0) == s->context_offsets[0] + 3);
  // context 2 is (a', b) -> joint outcome (0,1)
  CHECK(restrict_global(*s, digits, 2) == s->context_offsets[2] + 1);
}

TEST_CASE("incidence matrix has the advertised row and column sums") {
  auto s = tiny_chsh();
  auto inc = incidence_matrix<double>(*s);
  REQUIRE(inc.rows() == s->local_count);
  REQUIRE(inc.cols() == static_cast<long long>(s->global_count));
  for (long long g = 0; g < inc.cols(); ++g)
    CHECK(inc.col(g).sum() == doctest::Approx(s->context_count()));
  for (int c = 0; c < s->context_count(); ++c)
    for (long long o = 0; o < s->context_outcome_count(c); ++o) {
      const long long row = s->context_offsets[c] + o;
      const double ones = inc.row(row).sum();
      CHECK(ones == doctest::Approx(static_cast<double>(s->global_count) /
                                    static_cast<double>(
                                        s->context_outcome_count(c))));
    }
}

TEST_CASE("incidence matrix works in exact arithmetic too") {
  auto s = make_scenario({"x", "y"}, {{"x", "y"}},
                         {{"x", {"0", "1"}}, {"y", {"0", "1", "2"}}});
  auto inc = incidence_matrix<Rational>(*s);
  Rational colsum(0);
  for (long long r = 0; r < inc.rows(); ++r) colsum += inc(r, 0);
  CHECK(colsum == Rational(1));
}

TEST_CASE("size cap guards the dense incidence matrix") {
  std::vector<std::string> ms;
  std::map<std::string, std::vector<std::string>> oc;
  std::vector<std::vector<std::string>> ctxs;
  for (int i = 0; i < 24; ++i) {
    ms.push_back("m" + std::to_string(i));
    oc[ms.back()] = {"0", "1"};
  }
  for (int i = 0; i < 24; ++i) ctxs.push_back({ms[i], ms[(i + 1) % 24]});
  auto s = make_scenario(ms, ctxs, oc);  // 2^24 global assignments
  CHECK_THROWS_AS(incidence_matrix<double>(*s), Error);
  try {
    incidence_matrix<double>(*s);
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::SizeCapExceeded);
  }
}

TEST_CASE("structural equality ignores shared_ptr identity") {
  auto s1 = tiny_chsh();
  auto s2 = tiny_chsh();
  CHECK(*s1 == *s2);
  auto s3 = make_scenario({"a", "b"}, {{"a", "b"}},
                          {{"a", {"0", "1"}}, {"b", {"0", "1"}}});
  CHECK_FALSE(*s1 == *s3);
}
