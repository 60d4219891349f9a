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

#pragma once

#include <cctype>
#include <cstdlib>

#include "corrlab/linalg.hpp"

namespace corrlab::expr {

/// Evaluates constant arithmetic expressions such as "1/sqrt(2)",
/// "-cos(pi/8)", "0.3*(1+pi)". Supported: + - * /, parentheses, unary sign,
/// pi, and sqrt/cos/sin/tan/acos/asin/atan/exp/log.
class Evaluator {
 public:
  static double eval(const std::string& s) {
    Evaluator e(s);
    double v = e.parse_expr();
    e.skip_ws();
    if (e.pos_ != s.size())
      throw ParseError("trailing characters in expression: '" + s + "'");
    return v;
  }

 private:
  explicit Evaluator(const std::string& s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double parse_expr() {
    double v = parse_term();
    for (;;) {
      if (consume('+'))
        v += parse_term();
      else if (consume('-'))
        v -= parse_term();
      else
        return v;
    }
  }

  double parse_term() {
    double v = parse_factor();
    for (;;) {
      if (consume('*'))
        v *= parse_factor();
      else if (consume('/'))
        v /= parse_factor();
      else
        return v;
    }
  }

  double parse_factor() {
    if (consume('-')) return -parse_factor();
    if (consume('+')) return parse_factor();
    return parse_primary();
  }

  double parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      double v = parse_expr();
      if (!consume(')')) throw ParseError("missing ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(start, &end);
      if (end == start) throw ParseError("bad number in expression");
      pos_ += size_t(end - start);
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t j = pos_;
      while (j < s_.size() && std::isalpha(static_cast<unsigned char>(s_[j]))) ++j;
      std::string name = s_.substr(pos_, j - pos_);
      pos_ = j;
      if (name == "pi") return std::acos(-1.0);
      if (!consume('(')) throw ParseError("expected '(' after '" + name + "'");
      double a = parse_expr();
      if (!consume(')')) throw ParseError("missing ')' after " + name);
      if (name == "sqrt") return std::sqrt(a);
      if (name == "cos") return std::cos(a);
      if (name == "sin") return std::sin(a);
      if (name == "tan") return std::tan(a);
      if (name == "acos") return std::acos(a);
      if (name == "asin") return std::asin(a);
      if (name == "atan") return std::atan(a);
      if (name == "exp") return std::exp(a);
      if (name == "log") return std::log(a);
      throw ParseError("unknown function '" + name + "'");
    }
    throw ParseError(std::string("unexpected character '") + c + "' in expression");
  }

  const std::string& s_;
  size_t pos_ = 0;
};

inline double eval(const std::string& s) { return Evaluator::eval(s); }

}  // namespace corrlab::expr
