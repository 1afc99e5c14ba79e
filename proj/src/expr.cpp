#include "ppz/expr.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <utility>

namespace ppz::expr {

namespace {

struct FnName {
  const char* name;
  Fn fn;
};

constexpr std::array<FnName, 10> kFunctions{{{"sin", Fn::sin},
                                              {"cos", Fn::cos},
                                              {"tan", Fn::tan},
                                              {"exp", Fn::exp},
                                              {"log", Fn::log},
                                              {"sqrt", Fn::sqrt},
                                              {"abs", Fn::abs},
                                              {"re", Fn::re},
                                              {"im", Fn::im},
                                              {"conj", Fn::conj}}};

const char* fn_name(Fn fn) {
  for (const auto& f : kFunctions) {
    if (f.fn == fn) return f.name;
  }
  return "?";
}

enum class Tok { end, number, imag, ident, plus, minus, star, slash, caret, lparen, rparen, comma,
                 semicolon, lt, le, gt, ge, eq, ne, and_, or_ };

struct Token {
  Tok kind = Tok::end;
  std::size_t offset = 0;
  std::string_view text;
  double value = 0.0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto two = [&](char a, char b) { return src[i] == a && i + 1 < src.size() && src[i + 1] == b; };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.offset = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() &&
                                                        std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(src.data() + i, src.data() + j, v);
      if (ec == std::errc::result_out_of_range || !std::isfinite(v)) {
        throw ParseError("numeric literal out of range", i);
      }
      if (ec != std::errc() || ptr != src.data() + j) throw ParseError("malformed number", i);
      t.kind = Tok::number;
      t.value = v;
      if (j < src.size() && src[j] == 'i' && (j + 1 == src.size() || !ident_char(src[j + 1]))) {
        t.kind = Tok::imag;
        ++j;
      } else if (j < src.size() && ident_char(src[j])) {
        throw ParseError("unexpected character after number", j);
      }
      t.text = src.substr(i, j - i);
      i = j;
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Tok::ident;
      t.text = src.substr(i, j - i);
      i = j;
    } else if (two('<', '=')) {
      t.kind = Tok::le;
      i += 2;
    } else if (two('>', '=')) {
      t.kind = Tok::ge;
      i += 2;
    } else if (two('=', '=')) {
      t.kind = Tok::eq;
      i += 2;
    } else if (two('!', '=')) {
      t.kind = Tok::ne;
      i += 2;
    } else if (two('&', '&')) {
      t.kind = Tok::and_;
      i += 2;
    } else if (two('|', '|')) {
      t.kind = Tok::or_;
      i += 2;
    } else {
      switch (c) {
        case '+': t.kind = Tok::plus; break;
        case '-': t.kind = Tok::minus; break;
        case '*': t.kind = Tok::star; break;
        case '/': t.kind = Tok::slash; break;
        case '^': t.kind = Tok::caret; break;
        case '(': t.kind = Tok::lparen; break;
        case ')': t.kind = Tok::rparen; break;
        case ',': t.kind = Tok::comma; break;
        case ';': t.kind = Tok::semicolon; break;
        case '<': t.kind = Tok::lt; break;
        case '>': t.kind = Tok::gt; break;
        default: throw ParseError(std::string("unexpected character '") + c + "'", i);
      }
      ++i;
    }
    out.push_back(t);
  }
  Token end;
  end.offset = src.size();
  out.push_back(end);
  return out;
}

Expr make(Op op, Expr lhs = nullptr, Expr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

Expr make_number(Op op, double v) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = v;
  return n;
}

enum class Cmp { lt, le, gt, ge, eq, ne };

struct Pred;
using PredPtr = std::shared_ptr<const Pred>;
struct Pred {
  enum class Kind { cmp, and_, or_ } kind = Kind::cmp;
  Cmp cmp = Cmp::lt;
  Expr a;
  Expr b;
  PredPtr l;
  PredPtr r;
};

class Parser {
 public:
  Parser(std::string_view src, EvalMode mode) : mode_(mode), toks_(lex(src)) {}

  std::vector<Expr> components() {
    std::vector<Expr> out;
    out.push_back(sum());
    while (peek().kind == Tok::semicolon) {
      if (mode_.is_complex()) {
        throw ParseError("';'-separated components are only available in real mode", peek().offset);
      }
      ++pos_;
      out.push_back(sum());
    }
    expect_end();
    return out;
  }

  PredPtr predicate() {
    PredPtr p = or_pred();
    expect_end();
    return p;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  void expect_end() {
    if (peek().kind != Tok::end) throw ParseError("unexpected '" + std::string(peek().text.empty() ? std::string_view("token") : peek().text) + "'", peek().offset);
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      throw ParseError(std::string("expected ") + what, peek().offset);
    }
    ++pos_;
  }

  PredPtr or_pred() {
    PredPtr l = and_pred();
    while (peek().kind == Tok::or_) {
      ++pos_;
      auto p = std::make_shared<Pred>();
      p->kind = Pred::Kind::or_;
      p->l = l;
      p->r = and_pred();
      l = p;
    }
    return l;
  }

  PredPtr and_pred() {
    PredPtr l = comparison();
    while (peek().kind == Tok::and_) {
      ++pos_;
      auto p = std::make_shared<Pred>();
      p->kind = Pred::Kind::and_;
      p->l = l;
      p->r = comparison();
      l = p;
    }
    return l;
  }

  PredPtr comparison() {
    auto p = std::make_shared<Pred>();
    p->a = sum();
    switch (peek().kind) {
      case Tok::lt: p->cmp = Cmp::lt; break;
      case Tok::le: p->cmp = Cmp::le; break;
      case Tok::gt: p->cmp = Cmp::gt; break;
      case Tok::ge: p->cmp = Cmp::ge; break;
      case Tok::eq: p->cmp = Cmp::eq; break;
      case Tok::ne: p->cmp = Cmp::ne; break;
      default: throw ParseError("expected a comparison operator", peek().offset);
    }
    ++pos_;
    p->b = sum();
    return p;
  }

  Expr sum() {
    Expr l = product();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      const Op op = take().kind == Tok::plus ? Op::add : Op::sub;
      l = make(op, l, product());
    }
    return l;
  }

  Expr product() {
    Expr l = unary();
    while (peek().kind == Tok::star || peek().kind == Tok::slash) {
      const Op op = take().kind == Tok::star ? Op::mul : Op::div;
      l = make(op, l, unary());
    }
    return l;
  }

  Expr unary() {
    if (peek().kind == Tok::minus) {
      ++pos_;
      return make(Op::neg, unary());
    }
    if (peek().kind == Tok::plus) {
      ++pos_;
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (peek().kind == Tok::caret) {
      ++pos_;
      return make(Op::pow, base, exponent());
    }
    return base;
  }

  // The exponent may carry its own sign: 2^-x parses as 2^(-x).
  Expr exponent() {
    if (peek().kind == Tok::minus) {
      ++pos_;
      return make(Op::neg, exponent());
    }
    if (peek().kind == Tok::plus) {
      ++pos_;
      return exponent();
    }
    return power();
  }

  Expr primary() {
    const Token& t = take();
    switch (t.kind) {
      case Tok::number: return make_number(Op::number, t.value);
      case Tok::imag:
        if (!mode_.is_complex()) throw ParseError("imaginary literal in real mode", t.offset);
        return make_number(Op::imag, t.value);
      case Tok::lparen: {
        Expr e = sum();
        expect(Tok::rparen, "')'");
        return e;
      }
      case Tok::ident: return identifier(t);
      case Tok::end: throw ParseError("unexpected end of expression", t.offset);
      default: throw ParseError("unexpected '" + std::string(t.text.empty() ? std::string_view("token") : t.text) + "'", t.offset);
    }
  }

  Expr identifier(const Token& t) {
    const std::string name(t.text);
    for (const auto& f : kFunctions) {
      if (name != f.name) continue;
      if (peek().kind != Tok::lparen) throw ParseError("expected '(' after " + name, peek().offset);
      ++pos_;
      std::vector<Expr> args;
      if (peek().kind != Tok::rparen) {
        args.push_back(sum());
        while (peek().kind == Tok::comma) {
          ++pos_;
          args.push_back(sum());
        }
      }
      expect(Tok::rparen, "')'");
      if (args.size() != 1) {
        throw ParseError(name + " takes 1 argument, got " + std::to_string(args.size()), t.offset);
      }
      auto n = std::make_shared<Node>();
      n->op = Op::call;
      n->fn = f.fn;
      n->lhs = args[0];
      return n;
    }
    if (peek().kind == Tok::lparen) throw ParseError("unknown function '" + name + "'", t.offset);
    if (name == "pi") return make_number(Op::number, std::numbers::pi);
    if (mode_.is_complex()) {
      if (name == "s") return make(Op::var);
      throw ParseError("unknown identifier '" + name + "' (complex mode binds s)", t.offset);
    }
    if (name == "x") {
      if (mode_.dim != 1) {
        throw ParseError("unbound variable 'x' in dimension " + std::to_string(mode_.dim) + "; use x1..x" +
                             std::to_string(mode_.dim), t.offset);
      }
      return make(Op::var);
    }
    if (name.size() > 1 && name[0] == 'x') {
      std::size_t k = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
      if (ec == std::errc() && ptr == name.data() + name.size() && name[1] != '0') {
        if (k >= 1 && k <= mode_.dim) {
          auto n = std::make_shared<Node>();
          n->op = Op::var;
          n->var = k - 1;
          return n;
        }
        throw ParseError("unbound variable '" + name + "' in dimension " + std::to_string(mode_.dim), t.offset);
      }
    }
    throw ParseError("unknown identifier '" + name + "'", t.offset);
  }

  EvalMode mode_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

[[noreturn]] void domain_error(const char* what, const Point& at) { throw EvaluationError(what, at); }

Point point_of(std::complex<double> s) {
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
    throw std::invalid_argument("expression evaluated at a non-finite point");
  }
  return Point{s.real(), s.imag()};
}

double real_rec(const Node& n, const Point& x) {
  switch (n.op) {
    case Op::number: return n.value;
    case Op::imag: break;
    case Op::var: return x[n.var];
    case Op::neg: return -real_rec(*n.lhs, x);
    case Op::add: return real_rec(*n.lhs, x) + real_rec(*n.rhs, x);
    case Op::sub: return real_rec(*n.lhs, x) - real_rec(*n.rhs, x);
    case Op::mul: return real_rec(*n.lhs, x) * real_rec(*n.rhs, x);
    case Op::div: return real_rec(*n.lhs, x) / real_rec(*n.rhs, x);
    case Op::pow: {
      const double a = real_rec(*n.lhs, x);
      const double b = real_rec(*n.rhs, x);
      const double r = std::pow(a, b);
      if (std::isnan(r) && !std::isnan(a) && !std::isnan(b)) domain_error("negative base to a non-integer power", x);
      return r;
    }
    case Op::call: {
      const double a = real_rec(*n.lhs, x);
      switch (n.fn) {
        case Fn::sin: return std::sin(a);
        case Fn::cos: return std::cos(a);
        case Fn::tan: return std::tan(a);
        case Fn::exp: return std::exp(a);
        case Fn::log:
          if (!(a > 0.0)) domain_error("log of a nonpositive value", x);
          return std::log(a);
        case Fn::sqrt:
          if (a < 0.0) domain_error("sqrt of a negative value", x);
          return std::sqrt(a);
        case Fn::abs: return std::fabs(a);
        case Fn::re: return a;
        case Fn::im: return 0.0;
        case Fn::conj: return a;
      }
      break;
    }
  }
  throw std::logic_error("expression: imaginary literal in real evaluation");
}

std::complex<double> int_pow(std::complex<double> a, long long n) {
  const bool invert = n < 0;
  unsigned long long k = invert ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
  std::complex<double> result(1.0, 0.0);
  while (k) {
    if (k & 1ULL) result *= a;
    k >>= 1;
    if (k) a *= a;
  }
  return invert ? 1.0 / result : result;
}

std::complex<double> complex_rec(const Node& n, std::complex<double> s) {
  using C = std::complex<double>;
  switch (n.op) {
    case Op::number: return {n.value, 0.0};
    case Op::imag: return {0.0, n.value};
    case Op::var: return s;
    case Op::neg: return -complex_rec(*n.lhs, s);
    case Op::add: return complex_rec(*n.lhs, s) + complex_rec(*n.rhs, s);
    case Op::sub: return complex_rec(*n.lhs, s) - complex_rec(*n.rhs, s);
    case Op::mul: return complex_rec(*n.lhs, s) * complex_rec(*n.rhs, s);
    case Op::div: return complex_rec(*n.lhs, s) / complex_rec(*n.rhs, s);
    case Op::pow: {
      const C a = complex_rec(*n.lhs, s);
      const C b = complex_rec(*n.rhs, s);
      if (b.imag() == 0.0 && std::fabs(b.real()) <= 1e9 && b.real() == std::trunc(b.real())) {
        return int_pow(a, static_cast<long long>(b.real()));
      }
      if (a == C(0.0, 0.0)) {
        if (b.real() > 0.0) return {0.0, 0.0};
        domain_error("zero to a power with nonpositive real part", point_of(s));
      }
      return std::exp(b * std::log(a));
    }
    case Op::call: {
      const C a = complex_rec(*n.lhs, s);
      switch (n.fn) {
        case Fn::sin: return std::sin(a);
        case Fn::cos: return std::cos(a);
        case Fn::tan: return std::tan(a);
        case Fn::exp: return std::exp(a);
        case Fn::log:
          if (a == C(0.0, 0.0)) domain_error("log of zero", point_of(s));
          return std::log(a);
        case Fn::sqrt: return std::sqrt(a);
        case Fn::abs: return {std::abs(a), 0.0};
        case Fn::re: return {a.real(), 0.0};
        case Fn::im: return {a.imag(), 0.0};
        case Fn::conj: return std::conj(a);
      }
      break;
    }
  }
  throw std::logic_error("expression: unknown node");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print(const Node& n, EvalMode mode, std::string& out) {
  auto binary = [&](const char* op) {
    out += '(';
    print(*n.lhs, mode, out);
    out += op;
    print(*n.rhs, mode, out);
    out += ')';
  };
  switch (n.op) {
    case Op::number: out += fmt_double(n.value); return;
    case Op::imag: out += fmt_double(n.value) + "i"; return;
    case Op::var:
      if (mode.is_complex()) {
        out += 's';
      } else if (mode.dim == 1) {
        out += 'x';
      } else {
        out += 'x' + std::to_string(n.var + 1);
      }
      return;
    case Op::neg:
      out += "(-";
      print(*n.lhs, mode, out);
      out += ')';
      return;
    case Op::add: binary(" + "); return;
    case Op::sub: binary(" - "); return;
    case Op::mul: binary(" * "); return;
    case Op::div: binary(" / "); return;
    case Op::pow: binary("^"); return;
    case Op::call:
      out += fn_name(n.fn);
      out += '(';
      print(*n.lhs, mode, out);
      out += ')';
      return;
  }
}

bool compare(Cmp c, double a, double b) {
  switch (c) {
    case Cmp::lt: return a < b;
    case Cmp::le: return a <= b;
    case Cmp::gt: return a > b;
    case Cmp::ge: return a >= b;
    case Cmp::eq: return a == b;
    case Cmp::ne: return a != b;
  }
  return false;
}

bool eval_pred(const Pred& p, const Point& x) {
  switch (p.kind) {
    case Pred::Kind::cmp: return compare(p.cmp, real_rec(*p.a, x), real_rec(*p.b, x));
    case Pred::Kind::and_: return eval_pred(*p.l, x) && eval_pred(*p.r, x);
    case Pred::Kind::or_: return eval_pred(*p.l, x) || eval_pred(*p.r, x);
  }
  return false;
}

}  // namespace

EvalMode EvalMode::real(std::size_t p) {
  if (p == 0) throw std::invalid_argument("expression: dimension must be >= 1");
  return {Kind::real, p};
}

ParseError::ParseError(const std::string& message, std::size_t offset)
    : std::invalid_argument(message + " at byte " + std::to_string(offset)), offset_(offset) {}

std::vector<Expr> parse_components(std::string_view src, EvalMode mode) {
  Parser p(src, mode);
  return p.components();
}

Expr parse(std::string_view src, EvalMode mode) {
  auto parts = parse_components(src, mode);
  if (parts.size() != 1) throw ParseError("expected a single expression", src.find(';'));
  return parts.front();
}

double eval_real(const Expr& e, const Point& x) { return real_rec(*e, x); }

std::complex<double> eval_complex(const Expr& e, std::complex<double> s) { return complex_rec(*e, s); }

std::string to_string(const Expr& e, EvalMode mode) {
  std::string out;
  print(*e, mode, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (!a || !b) return !a && !b;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::number:
    case Op::imag: return std::bit_cast<std::uint64_t>(a->value) == std::bit_cast<std::uint64_t>(b->value);
    case Op::var: return a->var == b->var;
    case Op::call: return a->fn == b->fn && structurally_equal(a->lhs, b->lhs);
    default: return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
  }
}

TargetFunction to_target(std::vector<Expr> components, EvalMode mode, std::string description) {
  if (components.empty()) throw std::invalid_argument("to_target: no components");
  if (mode.is_complex()) {
    if (components.size() != 1) throw std::invalid_argument("to_target: complex mode takes one component");
    Expr e = components.front();
    return TargetFunction::complex([e](std::complex<double> s) { return complex_rec(*e, s); },
                                   std::move(description));
  }
  if (components.size() == 1) {
    Expr e = components.front();
    return TargetFunction::real_scalar(mode.dim, [e](const Point& x) { return real_rec(*e, x); },
                                       std::move(description));
  }
  const std::size_t q = components.size();
  return TargetFunction::real_vector(
      mode.dim, q,
      [cs = std::move(components)](const Point& x) {
        std::vector<double> v;
        v.reserve(cs.size());
        for (const auto& c : cs) v.push_back(real_rec(*c, x));
        return v;
      },
      std::move(description));
}

TargetFunction to_target(std::string_view src, EvalMode mode) {
  return to_target(parse_components(src, mode), mode, std::string(src));
}

TargetFunction::Constraint parse_constraint(std::string_view src, std::size_t dim) {
  Parser p(src, EvalMode::real(dim));
  PredPtr pred = p.predicate();
  return [pred](const Point& x) { return eval_pred(*pred, x); };
}

}  // namespace ppz::expr
