// Copyright 2026 The corrlab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>

#include "corrlab/io.hpp"
#include "fixtures.hpp"

using namespace corrlab;

TEST(Expr, Constants) {
  EXPECT_NEAR(expr::eval("1/sqrt(2)"), fixtures::kInvSqrt2, 1e-16);
  EXPECT_NEAR(expr::eval("-1/sqrt(2)"), -fixtures::kInvSqrt2, 1e-16);
  EXPECT_NEAR(expr::eval("cos(pi/8)"), std::cos(std::acos(-1.0) / 8), 1e-16);
  EXPECT_NEAR(expr::eval(" 0.25 * (1 + 3) "), 1.0, 1e-16);
  EXPECT_NEAR(expr::eval("2*asin(1)"), std::acos(-1.0), 1e-15);
  EXPECT_NEAR(expr::eval("-0.5"), -0.5, 0);
  EXPECT_NEAR(expr::eval("1e-3"), 1e-3, 0);
}

TEST(Expr, Errors) {
  EXPECT_THROW(expr::eval("1 +"), ParseError);
  EXPECT_THROW(expr::eval("sqrt 2"), ParseError);
  EXPECT_THROW(expr::eval("foo(2)"), ParseError);
  EXPECT_THROW(expr::eval("(1"), ParseError);
  EXPECT_THROW(expr::eval("1 2"), ParseError);
}

TEST(Parse, InlineMatrixWithExpressions) {
  auto c = io::parse_inline_matrix(
      "[[1/sqrt(2), 1/sqrt(2)], [1/sqrt(2), -1/sqrt(2)]]");
  EXPECT_EQ(c.n(), 2);
  EXPECT_EQ(c.m(), 2);
  EXPECT_NEAR(c(0, 0), fixtures::kInvSqrt2, 1e-16);
  EXPECT_NEAR(c(1, 1), -fixtures::kInvSqrt2, 1e-16);
}

TEST(Parse, InlineErrors) {
  EXPECT_THROW(io::parse_inline_matrix("[[1,2],[3]]"), ParseError);
  EXPECT_THROW(io::parse_inline_matrix("[[5]]"), ParseError);  // out of box
  EXPECT_THROW(io::parse_inline_matrix("[1,2]"), ParseError);
}

TEST(Parse, WhitespaceMatrix) {
  auto c = io::parse_whitespace_matrix("0.5 0.5\n0.5 -1\n");
  EXPECT_EQ(c.n(), 2);
  EXPECT_NEAR(c(1, 1), -1.0, 0);
  auto e = io::parse_whitespace_matrix("1/sqrt(2) 0\n0 1/sqrt(2)\n");
  EXPECT_NEAR(e(0, 0), fixtures::kInvSqrt2, 1e-16);
}

TEST(Parse, RecordRoundTrip) {
  completion::Correlator c(2, 3, {0.1, -0.9, 0.5, 0.25, 1.0, -1.0});
  auto line = io::to_record(c);
  auto back = io::parse_record(line);
  EXPECT_EQ(back.n(), 2);
  EXPECT_EQ(back.m(), 3);
  EXPECT_TRUE(back.raw() == c.raw());
  // shortest-round-trip floats: serializing again is identical
  EXPECT_EQ(io::to_record(back), line);
}

TEST(Parse, RecordErrors) {
  EXPECT_THROW(io::parse_record("{\"n\":2}"), ParseError);
  EXPECT_THROW(io::parse_record("not json"), ParseError);
  EXPECT_THROW(io::parse_record("{\"n\":2,\"m\":2,\"c\":[1,2,3,9]}"), ParseError);
}

TEST(Parse, CorrelatorArgDispatch) {
  auto named = io::parse_correlator_arg("chsh");
  EXPECT_NEAR(named(0, 0), fixtures::kInvSqrt2, 0);
  auto inl = io::parse_correlator_arg("[[0,0],[0,0]]");
  EXPECT_EQ(inl.n(), 2);
  auto rec = io::parse_correlator_arg("{\"n\":1,\"m\":1,\"c\":[0.5]}");
  EXPECT_EQ(rec.n(), 1);
  EXPECT_THROW(io::parse_correlator_arg("/nonexistent/path"), ParseError);
}

TEST(Parse, RawMatrixAllowsLargeEntries) {
  auto r = io::parse_matrix_arg_raw("[[12, -4], [-4, 12]]");
  EXPECT_EQ(r.n, 2);
  EXPECT_EQ(r.entries[0], 12.0);
}

TEST(Report, MachineJsonIdempotent) {
  io::AnalysisReport rep;
  rep.input = models::chsh();
  rep.membership_verdict = "boundary";
  rep.margin = -1e-11;
  rep.has_margin = true;
  rep.tol = Tolerances();
  rep.method = "both";
  rep.extremality = geometry::is_extreme(models::chsh(), rep.tol);
  rep.exposedness = geometry::is_exposed(models::chsh(), rep.tol);
  rep.self_test = true;
  rep.timings.push_back({"membership", 0.001});
  auto j = io::report_json(rep);
  std::string once = j.dump();
  std::string twice = io::json::parse(once).dump();
  EXPECT_EQ(once, twice);
}

TEST(Report, TextFormatCarriesSeventeenDigits) {
  io::AnalysisReport rep;
  rep.input = models::chsh();
  rep.membership_verdict = "member";
  rep.margin = 1.0 / 3.0;
  rep.has_margin = true;
  rep.tol = Tolerances();
  rep.method = "sdp";
  auto text = io::report_text(rep);
  EXPECT_NE(text.find("0.70710678118654746"), std::string::npos);
  EXPECT_NE(text.find("0.33333333333333331"), std::string::npos);
}

TEST(Tolerances, EnvProfiles) {
  unsetenv("CORRLAB_TOL_PROFILE");
  EXPECT_EQ(io::tolerances_from_env().rank_rel, Tolerances::defaults().rank_rel);
  setenv("CORRLAB_TOL_PROFILE", "strict", 1);
  EXPECT_EQ(io::tolerances_from_env().sdp_gap, Tolerances::strict().sdp_gap);
  setenv("CORRLAB_TOL_PROFILE", "bogus", 1);
  EXPECT_THROW(io::tolerances_from_env(), ParseError);
  unsetenv("CORRLAB_TOL_PROFILE");
}
