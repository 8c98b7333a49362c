#ifndef NASHCONT_PHC_FORMAT_HPP
#define NASHCONT_PHC_FORMAT_HPP

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nashcont/polynomial.hpp"

namespace nashcont {

inline constexpr std::size_t kMaxPhcNameLength = 5;

struct PhcParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Polynomial systems
// ---------------------------------------------------------------------------

namespace detail {

// Polynomial over variables numbered by first appearance; exponents are keyed
// by variable number so the variable set may grow while parsing.
struct SparsePoly {
  std::map<std::map<int, int>, Complex> terms;

  static SparsePoly constant(Complex c) {
    SparsePoly p;
    if (c != Complex(0.0)) p.terms[{}] = c;
    return p;
  }
  static SparsePoly variable(int v) {
    SparsePoly p;
    p.terms[{{v, 1}}] = 1.0;
    return p;
  }
  SparsePoly& operator+=(const SparsePoly& o) {
    for (const auto& [m, c] : o.terms) {
      auto& slot = terms[m];
      slot += c;
      if (slot == Complex(0.0)) terms.erase(m);
    }
    return *this;
  }
  SparsePoly operator*(const SparsePoly& o) const {
    SparsePoly r;
    for (const auto& [ma, ca] : terms)
      for (const auto& [mb, cb] : o.terms) {
        auto m = ma;
        for (const auto& [v, e] : mb) m[v] += e;
        r += SparsePoly{{{m, ca * cb}}};
      }
    return r;
  }
  SparsePoly negated() const {
    SparsePoly r = *this;
    for (auto& [m, c] : r.terms) c = -c;
    return r;
  }
};

class PolyParser {
public:
  PolyParser(const std::string& text, std::vector<std::string>& names) : s_(text), names_(names) {}

  // One polynomial up to (and consuming) ';'.
  SparsePoly polynomial() {
    SparsePoly p = expression();
    skip_space();
    if (!eat(';')) fail("expected ';'");
    return p;
  }

  bool at_end() {
    skip_space();
    return pos_ >= s_.size();
  }

  std::size_t position() const { return pos_; }

private:
  SparsePoly expression() {
    skip_space();
    SparsePoly acc;
    bool neg = false;
    if (eat('+')) neg = false;
    else if (eat('-')) neg = true;
    SparsePoly t = term();
    acc += neg ? t.negated() : t;
    for (;;) {
      skip_space();
      if (eat('+')) acc += term();
      else if (eat('-')) acc += term().negated();
      else return acc;
    }
  }

  SparsePoly term() {
    SparsePoly t = factor();
    for (;;) {
      skip_space();
      if (peek() == '*' && peek(1) != '*') {
        ++pos_;
        t = t * factor();
      } else {
        return t;
      }
    }
  }

  SparsePoly factor() {
    SparsePoly base = primary();
    skip_space();
    if (eat('^') || (peek() == '*' && peek(1) == '*' && (pos_ += 2))) {
      skip_space();
      const std::size_t start = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      if (start == pos_) fail("expected an integer exponent");
      const int e = std::stoi(s_.substr(start, pos_ - start));
      SparsePoly r = SparsePoly::constant(1.0);
      for (int k = 0; k < e; ++k) r = r * base;
      return r;
    }
    return base;
  }

  SparsePoly primary() {
    skip_space();
    const char c = peek();
    if (c == '(') {
      ++pos_;
      SparsePoly e = expression();
      skip_space();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (c == '-' || c == '+') {  // signed factor such as 2*-3
      ++pos_;
      return c == '-' ? primary().negated() : primary();
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return SparsePoly::constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "i" || name == "I") return SparsePoly::constant(Complex(0.0, 1.0));
      for (std::size_t v = 0; v < names_.size(); ++v)
        if (names_[v] == name) return SparsePoly::variable(static_cast<int>(v));
      names_.push_back(name);
      return SparsePoly::variable(static_cast<int>(names_.size() - 1));
    }
    fail(c ? std::string("unexpected character '") + c + "'" : "unexpected end of input");
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }
  bool eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1;
    for (std::size_t k = 0; k < pos_ && k < s_.size(); ++k) line += s_[k] == '\n';
    throw PhcParseError("line " + std::to_string(line) + ": " + what);
  }

  const std::string& s_;
  std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

inline std::string format_real_coefficient(double x) {
  char buf[64];
  if (std::abs(x) < 1e15 && x == std::floor(x)) std::snprintf(buf, sizeof buf, "%.0f", x);
  else std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

/// Parses a system: a header line with the equation count (optionally followed
/// by the variable count), then polynomials terminated by ';'. Variables are
/// numbered in order of first appearance.
inline ComplexSystem parse_system(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  do {
    if (!std::getline(in, header)) throw PhcParseError("missing equation count");
  } while (header.find_first_not_of(" \t\r") == std::string::npos);
  std::istringstream h(header);
  long count = -1, nvars = -1;
  if (!(h >> count) || count < 0) throw PhcParseError("malformed header '" + header + "'");
  if (!(h >> nvars)) nvars = count;
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::vector<std::string> names;
  std::vector<detail::SparsePoly> polys;
  detail::PolyParser parser(body, names);
  for (long k = 0; k < count; ++k) {
    if (parser.at_end()) throw PhcParseError("expected " + std::to_string(count) + " polynomials, found " + std::to_string(k));
    polys.push_back(parser.polynomial());
  }
  if (!parser.at_end()) throw PhcParseError("trailing input after " + std::to_string(count) + " polynomials");
  if (static_cast<long>(names.size()) != nvars)
    throw PhcParseError("header announces " + std::to_string(nvars) + " unknowns but " + std::to_string(names.size()) +
                        " appear");

  std::vector<ComplexPolynomial> eqs;
  for (const auto& sp : polys) {
    std::vector<Term<Complex>> terms;
    for (const auto& [m, c] : sp.terms) {
      Monomial mono(names.size());
      for (const auto& [v, e] : m) mono.exponents[static_cast<std::size_t>(v)] = e;
      terms.push_back({c, std::move(mono)});
    }
    eqs.emplace_back(names.size(), std::move(terms));
  }
  return ComplexSystem(std::move(names), std::move(eqs));
}

inline ComplexSystem read_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_system(text);
}

/// Renders one polynomial; terms of degree two and up each start a new line
/// when their degree first appears.
inline std::string format_polynomial(const ComplexPolynomial& p, const std::vector<std::string>& names) {
  if (p.is_zero()) return "0;";
  std::string out;
  int prev_degree = -1;
  bool first = true;
  for (const auto& t : p.terms()) {
    const int deg = t.mono.degree();
    std::string mono;
    for (std::size_t v = 0; v < names.size(); ++v)
      for (int e = 0; e < t.mono.exponents[v]; ++e) mono += (mono.empty() ? "" : "*") + names[v];
    std::string coeff;
    bool negative = false;
    if (t.coeff.imag() == 0.0) {
      negative = std::signbit(t.coeff.real());
      const double mag = std::abs(t.coeff.real());
      if (!(mag == 1.0 && deg > 0)) coeff = detail::format_real_coefficient(mag);
    } else {
      coeff = "(" + detail::format_real_coefficient(t.coeff.real()) + (t.coeff.imag() < 0 ? " - " : " + ") +
              detail::format_real_coefficient(std::abs(t.coeff.imag())) + "*i)";
    }
    std::string body = coeff;
    if (!mono.empty()) body += (coeff.empty() ? "" : "*") + mono;
    if (first) {
      out += (negative ? "- " : "") + body;
    } else {
      out += deg >= 2 && deg != prev_degree ? "\n" : " ";
      out += (negative ? "- " : "+ ") + body;
    }
    prev_degree = deg;
    first = false;
  }
  return out + ";";
}

/// Header is the equation count, followed by the unknown count when the
/// system is not square.
inline std::string format_system(const ComplexSystem& system) {
  for (const auto& n : system.names())
    if (n.size() > kMaxPhcNameLength)
      throw std::invalid_argument("variable name '" + n + "' exceeds " + std::to_string(kMaxPhcNameLength) +
                                  " characters");
  std::string out = std::to_string(system.size());
  if (!system.square()) out += " " + std::to_string(system.nvars());
  out += "\n";
  for (const auto& eq : system.equations()) out += format_polynomial(eq, system.names()) + "\n";
  return out;
}

inline void write_system(const ComplexSystem& system, const std::string& path) {
  const std::string text = format_system(system);
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

// ---------------------------------------------------------------------------
// Solution lists
// ---------------------------------------------------------------------------

struct SolutionRecord {
  int index = 1;
  Complex t{0.0, 0.0};
  int m = 1;
  std::vector<std::pair<std::string, Complex>> coordinates;
  double err = 0.0, rco = 1.0, res = 0.0;

  std::vector<Complex> values() const {
    std::vector<Complex> v;
    for (const auto& c : coordinates) v.push_back(c.second);
    return v;
  }
  std::vector<std::string> names() const {
    std::vector<std::string> n;
    for (const auto& c : coordinates) n.push_back(c.first);
    return n;
  }

  friend bool operator==(const SolutionRecord&, const SolutionRecord&) = default;
};

namespace detail {

inline std::string sci(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%c%.*E", std::signbit(x) ? '-' : ' ', digits, std::abs(x));
  return buf;
}

inline double parse_double(const std::string& s, const std::string& context) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw PhcParseError(context + ": malformed number '" + s + "'");
  return v;
}

}  // namespace detail

inline constexpr const char* kSolutionSeparator = "===========================================================";

inline std::string format_solutions(const std::vector<SolutionRecord>& records, std::size_t nvars) {
  std::string out = std::to_string(records.size()) + " " + std::to_string(nvars) + "\n" + kSolutionSeparator + "\n";
  for (const auto& r : records) {
    if (r.coordinates.size() != nvars) throw std::invalid_argument("solution record has wrong number of coordinates");
    out += "solution " + std::to_string(r.index) + " :\n";
    out += "t : " + detail::sci(r.t.real(), 14) + "  " + detail::sci(r.t.imag(), 14) + "\n";
    out += "m : " + std::to_string(r.m) + "\n";
    out += "the solution for t :\n";
    for (const auto& [name, z] : r.coordinates)
      out += " " + name + " : " + detail::sci(z.real(), 14) + "  " + detail::sci(z.imag(), 14) + "\n";
    out += "== err : " + detail::sci(r.err, 3) + " = rco : " + detail::sci(r.rco, 3) + " = res : " +
           detail::sci(r.res, 3) + " ==\n";
  }
  return out;
}

inline void write_solutions(const std::vector<SolutionRecord>& records, std::size_t nvars, const std::string& path) {
  const std::string text = format_solutions(records, nvars);
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

/// Reads a solution list: "count nvars", a separator, then per solution the
/// t, m, coordinate and err/rco/res lines. Exponents may use e or E.
inline std::vector<SolutionRecord> parse_solutions(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
    if (l.find_first_not_of(" \t") != std::string::npos) lines.push_back(l);
  }
  if (lines.empty()) throw PhcParseError("missing solution list header");
  std::istringstream h(lines[0]);
  long count = -1, nvars = -1;
  if (!(h >> count >> nvars) || count < 0 || nvars < 0) throw PhcParseError("malformed header '" + lines[0] + "'");

  std::size_t k = 1;
  auto next = [&](const char* what) -> std::string {
    if (k >= lines.size()) throw PhcParseError(std::string("unexpected end of file, expected ") + what);
    return lines[k++];
  };
  auto tokens = [](const std::string& l) {
    std::istringstream s(l);
    std::vector<std::string> t;
    for (std::string w; s >> w;) t.push_back(w);
    return t;
  };
  if (k < lines.size() && lines[k].find_first_not_of('=') == std::string::npos) ++k;

  std::vector<SolutionRecord> out;
  for (long n = 0; n < count; ++n) {
    SolutionRecord r;
    const std::string ctx = "solution " + std::to_string(n + 1);
    auto head = tokens(next("solution line"));
    if (head.size() != 3 || head[0] != "solution" || head[2] != ":") throw PhcParseError(ctx + ": expected 'solution k :'");
    r.index = std::stoi(head[1]);
    auto tl = tokens(next("t line"));
    if (tl.size() != 4 || tl[0] != "t" || tl[1] != ":") throw PhcParseError(ctx + ": malformed t line");
    r.t = {detail::parse_double(tl[2], ctx), detail::parse_double(tl[3], ctx)};
    auto ml = tokens(next("m line"));
    if (ml.size() != 3 || ml[0] != "m" || ml[1] != ":") throw PhcParseError(ctx + ": malformed m line");
    r.m = std::stoi(ml[2]);
    if (r.m < 1) throw PhcParseError(ctx + ": multiplicity must be positive");
    if (next("'the solution for t :'").find("the solution for t") == std::string::npos)
      throw PhcParseError(ctx + ": expected 'the solution for t :'");
    for (;;) {
      const std::string l = next("coordinate or trailer line");
      if (l.rfind("==", 0) == 0) {
        auto tr = tokens(l);
        // == err : a = rco : b = res : c ==
        if (tr.size() != 13 || tr[1] != "err" || tr[5] != "rco" || tr[9] != "res")
          throw PhcParseError(ctx + ": malformed err/rco/res line");
        r.err = detail::parse_double(tr[3], ctx);
        r.rco = detail::parse_double(tr[7], ctx);
        r.res = detail::parse_double(tr[11], ctx);
        break;
      }
      auto cl = tokens(l);
      if (cl.size() != 4 || cl[1] != ":") throw PhcParseError(ctx + ": malformed coordinate line '" + l + "'");
      r.coordinates.emplace_back(cl[0], Complex(detail::parse_double(cl[2], ctx), detail::parse_double(cl[3], ctx)));
    }
    if (static_cast<long>(r.coordinates.size()) != nvars)
      throw PhcParseError(ctx + ": has " + std::to_string(r.coordinates.size()) + " coordinates, header says " +
                          std::to_string(nvars));
    out.push_back(std::move(r));
  }
  if (k != lines.size()) throw PhcParseError("trailing input after " + std::to_string(count) + " solutions");
  return out;
}

inline std::vector<SolutionRecord> read_solutions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_solutions(text);
}

/// Coordinates of a record ordered like the system's variables.
inline std::vector<Complex> aligned_values(const SolutionRecord& r, const std::vector<std::string>& names) {
  if (r.coordinates.size() != names.size())
    throw std::invalid_argument("solution " + std::to_string(r.index) + " has " + std::to_string(r.coordinates.size()) +
                                " coordinates, system has " + std::to_string(names.size()) + " unknowns");
  std::vector<Complex> v;
  for (const auto& n : names) {
    auto it = std::find_if(r.coordinates.begin(), r.coordinates.end(), [&](const auto& c) { return c.first == n; });
    if (it == r.coordinates.end())
      throw std::invalid_argument("solution " + std::to_string(r.index) + " lacks unknown '" + n + "'");
    v.push_back(it->second);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Residual validation
// ---------------------------------------------------------------------------

struct ResidualReport {
  int index = 0;
  double residual = 0.0;
  bool flagged = false;
};

namespace detail {

struct MpComplex {
  mpf_class re, im;
};

}  // namespace detail

/// Max-norm of the system at each record, evaluated in binary floating point
/// with enough bits for `digits` decimal places beyond double range.
inline std::vector<ResidualReport> validate_solutions(const ComplexSystem& system,
                                                      const std::vector<SolutionRecord>& records, int digits = 16,
                                                      double tol = 1e-8) {
  if (digits < 1) throw std::invalid_argument("digits must be positive");
  const auto bits = static_cast<mp_bitcnt_t>(std::ceil(digits * 3.3219280948873626) + 64);
  std::vector<ResidualReport> out;
  for (const auto& r : records) {
    const auto x = aligned_values(r, system.names());
    std::vector<detail::MpComplex> px;
    for (const auto& z : x) px.push_back({mpf_class(z.real(), bits), mpf_class(z.imag(), bits)});
    mpf_class worst(0, bits);
    for (const auto& eq : system.equations()) {
      mpf_class sre(0, bits), sim(0, bits);
      for (const auto& t : eq.terms()) {
        mpf_class vre(t.coeff.real(), bits), vim(t.coeff.imag(), bits);
        for (std::size_t v = 0; v < x.size(); ++v)
          for (int e = 0; e < t.mono.exponents[v]; ++e) {
            mpf_class a(vre * px[v].re - vim * px[v].im, bits);
            mpf_class b(vre * px[v].im + vim * px[v].re, bits);
            vre = a;
            vim = b;
          }
        sre += vre;
        sim += vim;
      }
      mpf_class mag(sqrt(sre * sre + sim * sim), bits);
      if (mag > worst) worst = mag;
    }
    const double res = worst.get_d();
    out.push_back({r.index, res, !(res <= tol)});
  }
  return out;
}

inline std::string format_residuals(const std::vector<ResidualReport>& reports, int digits) {
  std::string out = "THE RESIDUALS with " + std::to_string(digits) + " decimal places :\n";
  char buf[96];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "residual %d : %.10E%s\n", r.index, r.residual, r.flagged ? "  (above tolerance)" : "");
    out += buf;
  }
  return out;
}

}  // namespace nashcont

#endif  // NASHCONT_PHC_FORMAT_HPP
