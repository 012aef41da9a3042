#include "vcert/poly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace vcert {

VariableSpace::VariableSpace(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw Error("variable name must be nonempty");
    if (!seen.insert(n).second) throw Error("duplicate variable name: " + n);
  }
}

VariableSpace VariableSpace::states(int n, const std::string& prefix) {
  if (n < 0) throw Error("negative arity");
  std::vector<std::string> names;
  names.reserve(n);
  for (int i = 1; i <= n; ++i) names.push_back(prefix + std::to_string(i));
  return VariableSpace(std::move(names));
}

VariableSpace VariableSpace::concat(const VariableSpace& a, const VariableSpace& b) {
  std::vector<std::string> names = a.names_;
  names.insert(names.end(), b.names_.begin(), b.names_.end());
  return VariableSpace(std::move(names));
}

std::optional<int> VariableSpace::index_of(const std::string& name) const {
  for (int i = 0; i < arity(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

Monomial::Monomial(std::vector<int> exponents) : exp_(std::move(exponents)) {
  for (int e : exp_)
    if (e < 0) throw Error("negative exponent");
}

int Monomial::degree() const {
  int d = 0;
  for (int e : exp_) d += e;
  return d;
}

Monomial Monomial::times(const Monomial& o) const {
  if (arity() != o.arity()) throw Error("monomial arity mismatch");
  std::vector<int> e(exp_);
  for (int i = 0; i < arity(); ++i) e[i] += o.exp_[i];
  return Monomial(std::move(e));
}

double Monomial::eval(const std::vector<double>& point) const {
  double v = 1.0;
  for (int i = 0; i < arity(); ++i) {
    for (int k = 0; k < exp_[i]; ++k) v *= point[i];
  }
  return v;
}

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return a.exponents() < b.exponents();
}

Polynomial::Polynomial(VariableSpace space, TermMap terms)
    : space_(std::move(space)), terms_(std::move(terms)) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->first.arity() != space_.arity()) throw Error("monomial arity mismatch");
    if (it->second == 0.0)
      it = terms_.erase(it);
    else
      ++it;
  }
}

Polynomial Polynomial::constant(const VariableSpace& s, double c) {
  Polynomial p(s);
  p.add_term(Monomial::one(s.arity()), c);
  return p;
}

Polynomial Polynomial::variable(const VariableSpace& s, int index) {
  if (index < 0 || index >= s.arity()) throw Error("variable index out of range");
  std::vector<int> e(s.arity(), 0);
  e[index] = 1;
  Polynomial p(s);
  p.add_term(Monomial(std::move(e)), 1.0);
  return p;
}

Polynomial Polynomial::monomial(const VariableSpace& s, Monomial m, double coef) {
  if (m.arity() != s.arity()) throw Error("monomial arity mismatch");
  Polynomial p(s);
  p.add_term(m, coef);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coefficient() const {
  double v = 0.0;
  for (const auto& [m, c] : terms_) v = std::max(v, std::abs(c));
  return v;
}

void Polynomial::add_term(const Monomial& m, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (space_ != o.space_) throw Error("polynomial space mismatch in add");
  Polynomial r(*this);
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  if (space_ != o.space_) throw Error("polynomial space mismatch in sub");
  Polynomial r(*this);
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (space_ != o.space_) throw Error("polynomial space mismatch in mul");
  Polynomial r(space_);
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) r.add_term(ma.times(mb), ca * cb);
  return r;
}

Polynomial Polynomial::scaled(double s) const {
  Polynomial r(space_);
  if (s == 0.0) return r;
  for (const auto& [m, c] : terms_) r.add_term(m, c * s);
  return r;
}

Polynomial Polynomial::compose(const std::vector<std::optional<Polynomial>>& subst,
                               const VariableSpace& target) const {
  if (static_cast<int>(subst.size()) != space_.arity())
    throw Error("compose: substitution size must equal arity");
  // Per-variable images over the target space.
  std::vector<Polynomial> image(space_.arity());
  for (int i = 0; i < space_.arity(); ++i) {
    if (subst[i]) {
      if (subst[i]->space() != target) throw Error("compose: substituted polynomial over wrong space");
      image[i] = *subst[i];
    } else {
      auto idx = target.index_of(space_.name(i));
      if (!idx) throw Error("compose: missing substitution entry for " + space_.name(i));
      image[i] = Polynomial::variable(target, *idx);
    }
  }
  // Cache powers of each image as needed.
  std::vector<std::vector<Polynomial>> powers(space_.arity());
  auto power = [&](int var, int e) -> const Polynomial& {
    auto& cache = powers[var];
    if (cache.empty()) cache.push_back(Polynomial::constant(target, 1.0));
    while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * image[var]);
    return cache[e];
  };
  Polynomial r(target);
  for (const auto& [m, c] : terms_) {
    Polynomial t = Polynomial::constant(target, c);
    for (int i = 0; i < space_.arity(); ++i)
      if (m.exponent(i) > 0) t = t * power(i, m.exponent(i));
    r = r + t;
  }
  return r;
}

Polynomial Polynomial::embed(const VariableSpace& target, const std::vector<int>& var_map) const {
  if (static_cast<int>(var_map.size()) != space_.arity())
    throw Error("embed: var_map size must equal arity");
  Polynomial r(target);
  for (const auto& [m, c] : terms_) {
    std::vector<int> e(target.arity(), 0);
    for (int i = 0; i < space_.arity(); ++i) {
      int j = var_map[i];
      if (j < 0 || j >= target.arity()) throw Error("embed: variable index out of range");
      e[j] += m.exponent(i);
    }
    r.add_term(Monomial(std::move(e)), c);
  }
  return r;
}

double Polynomial::eval(const std::vector<double>& point) const {
  if (static_cast<int>(point.size()) != space_.arity())
    throw Error("eval: point length must equal arity");
  double s = 0.0;
  for (const auto& [m, c] : terms_) s += c * m.eval(point);
  return s;
}

std::string Polynomial::to_string(int precision) const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  char buf[64];
  for (const auto& [m, c] : terms_) {
    const double a = std::abs(c);
    if (first) {
      if (c < 0) out << "-";
      first = false;
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    std::snprintf(buf, sizeof(buf), "%.*g", precision, a);
    out << buf;
    for (int i = 0; i < m.arity(); ++i) {
      if (m.exponent(i) == 0) continue;
      out << "*" << space_.name(i);
      if (m.exponent(i) > 1) out << "^" << m.exponent(i);
    }
  }
  return out.str();
}

namespace {

struct Lexer {
  const std::string& s;
  size_t pos = 0;
  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
};

}  // namespace

Polynomial Polynomial::parse(const VariableSpace& space, const std::string& text) {
  Lexer lx{text};
  Polynomial result(space);
  if (lx.eof()) throw Error("parse: empty polynomial text");
  {
    // Allow a literal "0".
    size_t save = lx.pos;
    if (lx.peek() == '0') {
      ++lx.pos;
      if (lx.eof()) return result;
      lx.pos = save;
    }
  }
  bool first = true;
  while (!lx.eof()) {
    double sign = 1.0;
    char c = lx.peek();
    if (c == '+' || c == '-') {
      sign = (c == '-') ? -1.0 : 1.0;
      ++lx.pos;
    } else if (!first) {
      throw Error("parse: expected '+' or '-' between terms");
    }
    lx.skip_ws();
    // coefficient (optional if the term starts with a variable)
    double coef = 1.0;
    c = lx.peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      coef = std::stod(text.substr(lx.pos), &used);
      lx.pos += used;
    }
    // variables
    std::vector<int> exps(space.arity(), 0);
    while (true) {
      lx.skip_ws();
      if (lx.pos < text.size() && text[lx.pos] == '*') {
        ++lx.pos;
        lx.skip_ws();
      }
      size_t start = lx.pos;
      while (lx.pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[lx.pos])) || text[lx.pos] == '_'))
        ++lx.pos;
      if (lx.pos == start) break;
      std::string name = text.substr(start, lx.pos - start);
      auto idx = space.index_of(name);
      if (!idx) throw Error("parse: unknown variable '" + name + "'");
      int e = 1;
      lx.skip_ws();
      if (lx.pos < text.size() && text[lx.pos] == '^') {
        ++lx.pos;
        lx.skip_ws();
        size_t used = 0;
        e = std::stoi(text.substr(lx.pos), &used);
        lx.pos += used;
        if (e < 0) throw Error("parse: negative exponent");
      }
      exps[*idx] += e;
      lx.skip_ws();
      if (lx.pos >= text.size() || (text[lx.pos] != '*')) break;
    }
    result.add_term(Monomial(std::move(exps)), sign * coef);
    first = false;
  }
  return result;
}

std::vector<Monomial> monomial_basis(const VariableSpace& space, int max_degree) {
  if (max_degree < 0) throw Error("monomial_basis: negative degree");
  const int n = space.arity();
  std::vector<Monomial> out;
  std::vector<int> cur(n, 0);
  // Enumerate exponent vectors with sum <= max_degree in graded-lex order.
  auto rec = [&](auto&& self, int pos, int remaining, int target) -> void {
    if (pos == n) {
      if (remaining == 0) out.push_back(Monomial(cur));
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      cur[pos] = e;
      self(self, pos + 1, remaining - e, target);
    }
    cur[pos] = 0;
  };
  for (int d = 0; d <= max_degree; ++d) rec(rec, 0, d, d);
  std::sort(out.begin(), out.end(), [](const Monomial& a, const Monomial& b) {
    return GradedLexLess{}(a, b);
  });
  return out;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Polynomial substitute_block(const Polynomial& p, const std::vector<Polynomial>& f,
                            int block_offset, const VariableSpace& target) {
  std::vector<std::optional<Polynomial>> subst(p.space().arity());
  for (size_t i = 0; i < f.size(); ++i) subst[block_offset + i] = f[i];
  return p.compose(subst, target);
}

}  // namespace vcert
