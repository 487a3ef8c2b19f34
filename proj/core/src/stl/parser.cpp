#include "stlfunnel/stl/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>

#include "stlfunnel/error.hpp"

namespace stlfunnel::stl {

namespace {

struct RawUnit {
  TemporalOp op;
  double a;
  double b;
  PsiFormula body;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  TaskFormula task() {
    TaskFormula out;
    skip();
    if (peek_word("true")) {
      std::size_t save = pos_;
      pos_ += 4;
      skip();
      if (at_end()) {
        out.shape = TaskShape::Trivial;
        return out;
      }
      pos_ = save;
    }

    std::vector<RawUnit> chain = phi_chain();
    if (chain.size() > 1) {
      skip();
      if (!at_end()) fail("a nested task cannot be combined with other units");
      return flatten_nest(chain);
    }
    std::vector<RawUnit> seq{std::move(chain.front())};
    while (eat("&&")) {
      auto next = phi_chain();
      if (next.size() > 1) fail("a nested task cannot be combined with other units");
      seq.push_back(std::move(next.front()));
    }
    skip();
    if (!at_end()) fail("unexpected trailing input");

    for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
      if (seq[k].b > seq[k + 1].a) {
        throw Error(ErrorCode::TimeBoundOrder,
                    "unit " + std::to_string(k + 2) + " starts before unit " + std::to_string(k + 1) +
                        " ends");
      }
    }
    out.shape = seq.size() == 1 ? TaskShape::Single : TaskShape::Sequence;
    for (auto& u : seq) out.units.push_back(PhiFormula{u.op, u.a, u.b, std::move(u.body)});
    return out;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::Syntax, msg + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }

  bool peek(std::string_view tok) {
    skip();
    return s_.substr(pos_, tok.size()) == tok;
  }

  // Matches a keyword only when it is not a prefix of a longer identifier.
  bool peek_word(std::string_view w) {
    skip();
    if (s_.substr(pos_, w.size()) != w) return false;
    std::size_t end = pos_ + w.size();
    return end >= s_.size() || !(std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_');
  }

  bool eat(std::string_view tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }
  bool eat_word(std::string_view w) {
    if (!peek_word(w)) return false;
    pos_ += w.size();
    return true;
  }
  void expect(std::string_view tok) {
    if (!eat(tok)) fail("expected '" + std::string(tok) + "'");
  }
  void expect_word(std::string_view w) {
    if (!eat_word(w)) fail("expected '" + std::string(w) + "'");
  }

  double number() {
    skip();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    skip();
    std::string buf(s_.substr(start, 1) == "-" ? "-" : "");
    std::size_t digits = pos_;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      bool exp_sign = (c == '-' || c == '+') && pos_ > digits && (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E');
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || exp_sign) {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == digits) {
      pos_ = start;
      fail("expected a number");
    }
    buf.append(s_.substr(digits, pos_ - digits));
    double v = 0.0;
    auto res = std::from_chars(buf.data(), buf.data() + buf.size(), v);
    if (res.ec != std::errc() || res.ptr != buf.data() + buf.size() || !std::isfinite(v)) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  int integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected an integer");
    int v = 0;
    auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (res.ec != std::errc()) fail("integer out of range");
    return v;
  }

  int agent_id() {
    int id = integer();
    if (id < 1) fail("agent ids start at 1");
    return id;
  }

  int index() {
    int k = integer();
    if (k < 1) fail("component indices start at 1");
    return k - 1;
  }

  bool peek_temporal() { return peek_word("F") || peek_word("G") || peek("F[") || peek("G["); }

  // phi with possible nest; returns the chain of units (size > 1 for a nest).
  std::vector<RawUnit> phi_chain() {
    skip();
    TemporalOp op;
    if (eat("F")) {
      op = TemporalOp::Eventually;
    } else if (eat("G")) {
      op = TemporalOp::Always;
    } else {
      fail("expected 'F' or 'G'");
    }
    expect("[");
    double a = number();
    expect(",");
    double b = number();
    expect("]");
    if (a < 0.0 || a > b) {
      throw Error(ErrorCode::TimeBoundOrder, "window [" + std::to_string(a) + "," + std::to_string(b) +
                                                 "] violates 0 <= a <= b");
    }

    RawUnit unit{op, a, b, {}};
    std::vector<RawUnit> tail;
    body(unit.body, tail, 0);
    if (!tail.empty() && op != TemporalOp::Eventually) fail("only F units may be nested");
    std::vector<RawUnit> chain{std::move(unit)};
    for (auto& t : tail) chain.push_back(std::move(t));
    return chain;
  }

  // body := group { "&&" group }, stopping before a top-level temporal unit.
  void body(PsiFormula& psi, std::vector<RawUnit>& nest, int depth) {
    group(psi, nest, depth);
    while (true) {
      std::size_t save = pos_;
      if (!eat("&&")) break;
      if (peek_temporal()) {
        if (depth == 0) {
          pos_ = save;
          break;
        }
        if (!nest.empty()) fail("only one nested unit per level");
        nest = phi_chain();
        for (const auto& u : nest) {
          if (u.op != TemporalOp::Eventually) fail("only F units may be nested");
        }
        if (!peek(")")) fail("a nested unit must be the last conjunct");
        break;
      }
      if (!nest.empty()) fail("a nested unit must be the last conjunct");
      group(psi, nest, depth);
    }
  }

  void group(PsiFormula& psi, std::vector<RawUnit>& nest, int depth) {
    if (eat("(")) {
      if (peek_temporal()) {
        if (!nest.empty()) fail("only one nested unit per level");
        nest = phi_chain();
      } else {
        body(psi, nest, depth + 1);
      }
      expect(")");
      return;
    }
    psi.terms.push_back(term());
  }

  Term term() {
    if (eat_word("true")) return True{};
    bool negated = eat("!");
    std::size_t at = pos_;
    Atom a = atom();
    if (negated && !is_affine(a)) {
      pos_ = at;
      throw Error(ErrorCode::NonConcaveNegation,
                  "negation of non-affine atom '" + to_string(a) + "' at offset " + std::to_string(at));
    }
    return Literal{std::move(a), negated};
  }

  Atom atom() {
    if (eat_word("dist")) {
      expect("(");
      int agent = agent_id();
      expect(",");
      if (eat("[")) {
        PointDistAtom p;
        p.agent = agent;
        p.point.push_back(number());
        while (eat(",")) p.point.push_back(number());
        expect("]");
        expect(")");
        expect("<=");
        p.radius = number();
        return p;
      }
      PairDistAtom p;
      p.a = agent;
      p.b = agent_id();
      if (p.a == p.b) fail("dist needs two distinct agents");
      expect(")");
      expect("<=");
      p.radius = number();
      return p;
    }
    if (eat_word("lin")) {
      LinearAtom l;
      expect("(");
      do {
        LinTerm t;
        t.coef = number();
        expect("*");
        expect_word("x");
        expect("(");
        t.agent = agent_id();
        expect(",");
        t.component = index();
        expect(")");
        l.terms.push_back(t);
      } while (eat(","));
      expect(")");
      expect(">=");
      l.bound = number();
      return l;
    }
    if (eat_word("comp")) {
      BandDiffAtom d;
      expect("(");
      d.a = agent_id();
      expect(",");
      d.comp_a = index();
      expect(")");
      expect("-");
      expect_word("comp");
      expect("(");
      d.b = agent_id();
      expect(",");
      d.comp_b = index();
      expect(")");
      expect_word("in");
      expect("(");
      d.lo = number();
      expect(",");
      d.hi = number();
      expect(")");
      return d;
    }
    if (eat_word("angdeg")) {
      AngleBandAtom g;
      expect("(");
      g.agent = agent_id();
      expect(")");
      expect_word("near");
      g.center_deg = number();
      expect_word("tol");
      g.tol_deg = number();
      return g;
    }
    fail("expected an atom");
  }

  TaskFormula flatten_nest(std::vector<RawUnit>& chain) {
    TaskFormula out;
    out.shape = TaskShape::Nest;
    double acc_a = 0.0;
    double acc_b = 0.0;
    for (auto& u : chain) {
      out.nest_offsets.emplace_back(u.a, u.b);
      acc_a += u.a;
      acc_b += u.b;
      out.units.push_back(PhiFormula{TemporalOp::Eventually, acc_a, acc_b, std::move(u.body)});
    }
    return out;
  }
};

}  // namespace

TaskFormula parse_task(std::string_view text) { return Parser(text).task(); }

PhiFormula parse_phi(std::string_view text) {
  TaskFormula t = parse_task(text);
  if (t.shape != TaskShape::Single) {
    throw Error(ErrorCode::Syntax, "expected exactly one temporal unit");
  }
  return t.units.front();
}

}  // namespace stlfunnel::stl
