#include "certivex/solver.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "certivex/mutation.hpp"

namespace certivex::solver {

BigInt LinAtom::coeff(SymbolId s) const {
  for (const auto& [id, c] : coeffs) {
    if (id == s) return c;
  }
  return 0;
}

bool operator<(const LinAtom& a, const LinAtom& b) {
  if (a.coeffs != b.coeffs) return a.coeffs < b.coeffs;
  return a.constant < b.constant;
}

std::string to_string(const LinAtom& a) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [id, c] : a.coeffs) {
    if (!first) out << (c < 0 ? " - " : " + ");
    else if (c < 0) out << "-";
    BigInt mag = abs(c);
    if (mag != 1) out << mag << "*";
    out << "s" << id;
    first = false;
  }
  if (first) {
    out << a.constant;
  } else if (a.constant != 0) {
    out << (a.constant < 0 ? " - " : " + ") << abs(a.constant);
  }
  out << " >= 0";
  return out.str();
}

namespace {

struct LinExpr {
  std::map<SymbolId, BigInt> c;
  BigInt k;

  bool is_constant() const { return c.empty(); }
};

LinExpr combine(const LinExpr& a, const LinExpr& b, int sign) {
  LinExpr out = a;
  for (const auto& [id, v] : b.c) {
    BigInt& slot = out.c[id];
    slot += sign * v;
    if (slot == 0) out.c.erase(id);
  }
  out.k += sign * b.k;
  return out;
}

LinExpr scale(const LinExpr& a, const BigInt& f) {
  LinExpr out;
  if (f == 0) return out;
  for (const auto& [id, v] : a.c) out.c[id] = v * f;
  out.k = a.k * f;
  return out;
}

LinExpr linearize(const sym::Term& t) {
  return std::visit(
      [](const auto& x) -> LinExpr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, sym::Lit>) {
          LinExpr e;
          e.k = x.value;
          return e;
        } else if constexpr (std::is_same_v<T, sym::Symbol>) {
          LinExpr e;
          e.c[x.id] = 1;
          return e;
        } else if constexpr (std::is_same_v<T, sym::Neg>) {
          return scale(linearize(x.operand), -1);
        } else {
          switch (x.op) {
            case ArithOp::Add: return combine(linearize(x.lhs), linearize(x.rhs), 1);
            case ArithOp::Sub: return combine(linearize(x.lhs), linearize(x.rhs), -1);
            case ArithOp::Mul: {
              LinExpr a = linearize(x.lhs);
              LinExpr b = linearize(x.rhs);
              if (a.is_constant()) return scale(b, a.k);
              if (b.is_constant()) return scale(a, b.k);
              throw Unsupported("nonlinear product");
            }
            case ArithOp::Div:
            case ArithOp::Mod:
              throw Unsupported("division in linear term");
          }
          return {};
        }
      },
      t->node);
}

LinAtom to_atom(const LinExpr& e) {
  LinAtom a;
  for (const auto& [id, v] : e.c) {
    if (v != 0) a.coeffs.emplace_back(id, v);
  }
  a.constant = e.k;
  return a;
}

// Clauses for `l op r`.
Dnf compare_clauses(CmpOp op, const LinExpr& l, const LinExpr& r) {
  LinExpr d = combine(r, l, -1);  // r - l
  LinExpr one;
  one.k = 1;
  switch (op) {
    case CmpOp::Le: return {{to_atom(d)}};
    case CmpOp::Lt: return {{to_atom(combine(d, one, -1))}};
    case CmpOp::Ge: return {{to_atom(scale(d, -1))}};
    case CmpOp::Gt: return {{to_atom(combine(scale(d, -1), one, -1))}};
    case CmpOp::Eq: return {{to_atom(d), to_atom(scale(d, -1))}};
    case CmpOp::Ne:
      return {{to_atom(combine(scale(d, -1), one, -1))}, {to_atom(combine(d, one, -1))}};
  }
  return {};
}

class DnfBuilder {
 public:
  explicit DnfBuilder(std::size_t limit) : limit_(limit) {}

  Dnf of(const sym::Prop& p, bool negated) {
    return std::visit(
        [&](const auto& x) -> Dnf {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, sym::Truth>) {
            if (x.value != negated) return {Clause{}};
            return {};
          } else if constexpr (std::is_same_v<T, sym::Cmp>) {
            CmpOp op = negated ? negate(x.op) : x.op;
            return tidy(compare_clauses(op, linearize(x.lhs), linearize(x.rhs)));
          } else if constexpr (std::is_same_v<T, sym::PNot>) {
            return of(x.operand, !negated);
          } else {
            bool conjunctive = (x.op == LogicOp::And) != negated;
            Dnf a = of(x.lhs, negated);
            Dnf b = of(x.rhs, negated);
            if (conjunctive) return cross(a, b);
            for (auto& c : b) a.push_back(std::move(c));
            return tidy(std::move(a));
          }
        },
        p->node);
  }

  Dnf cross(const Dnf& a, const Dnf& b) {
    Dnf out;
    for (const auto& ca : a) {
      for (const auto& cb : b) {
        Clause c = ca;
        c.insert(c.end(), cb.begin(), cb.end());
        out.push_back(std::move(c));
        if (out.size() > 4 * limit_) throw Unsupported("too many clauses");
      }
    }
    return tidy(std::move(out));
  }

  Dnf tidy(Dnf in) {
    Dnf out;
    std::set<Clause> seen;
    for (auto& c : in) {
      if (!canonicalize(c)) continue;
      if (!seen.insert(c).second) continue;
      out.push_back(std::move(c));
    }
    if (out.size() > limit_) throw Unsupported("too many clauses");
    return out;
  }

 private:
  std::size_t limit_;
};

// Replaces division and remainder by constant divisors with fresh symbols.
class DivisionEliminator {
 public:
  explicit DivisionEliminator(SymbolId next) : next_(next) {}

  sym::Term term(const sym::Term& t) {
    return std::visit(
        [&](const auto& x) -> sym::Term {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, sym::Lit> || std::is_same_v<T, sym::Symbol>) {
            return t;
          } else if constexpr (std::is_same_v<T, sym::Neg>) {
            return sym::negate(term(x.operand));
          } else {
            sym::Term a = term(x.lhs);
            sym::Term b = term(x.rhs);
            if (x.op != ArithOp::Div && x.op != ArithOp::Mod) return sym::arith(x.op, a, b);
            LinExpr d = linearize(b);
            if (!d.is_constant()) throw Unsupported("division by a non-constant term");
            if (d.k == 0) return x.op == ArithOp::Div ? sym::lit(0) : a;
            sym::Term q = quotient(a, d.k);
            if (x.op == ArithOp::Div) return q;
            return sym::arith(ArithOp::Sub, a, sym::arith(ArithOp::Mul, sym::lit(d.k), q));
          }
        },
        t->node);
  }

  sym::Prop prop(const sym::Prop& p) {
    return std::visit(
        [&](const auto& x) -> sym::Prop {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, sym::Truth>) {
            return p;
          } else if constexpr (std::is_same_v<T, sym::Cmp>) {
            return sym::compare(x.op, term(x.lhs), term(x.rhs));
          } else if constexpr (std::is_same_v<T, sym::PNot>) {
            return sym::negation(prop(x.operand));
          } else {
            sym::Prop a = prop(x.lhs);
            sym::Prop b = prop(x.rhs);
            return x.op == LogicOp::And ? sym::conj(a, b) : sym::disj(a, b);
          }
        },
        p->node);
  }

  const std::vector<sym::Prop>& definitions() const { return defs_; }

 private:
  // q = n / k truncated: r = n - k*q has the sign of n and |r| < |k|.
  sym::Term quotient(const sym::Term& n, const BigInt& k) {
    std::string key = sym::to_string(n) + "/" + k.str();
    auto it = memo_.find(key);
    if (it != memo_.end()) return sym::symbol(it->second);
    SymbolId id = next_++;
    memo_.emplace(key, id);
    sym::Term q = sym::symbol(id);
    sym::Term r = sym::arith(ArithOp::Sub, n, sym::arith(ArithOp::Mul, sym::lit(k), q));
    BigInt m = abs(k) - 1;
    sym::Term zero = sym::lit(0);
    sym::Prop nonneg = sym::conj(sym::compare(CmpOp::Ge, n, zero),
                                 sym::conj(sym::compare(CmpOp::Ge, r, zero), sym::compare(CmpOp::Le, r, sym::lit(m))));
    sym::Prop neg = sym::conj(sym::compare(CmpOp::Lt, n, zero),
                              sym::conj(sym::compare(CmpOp::Ge, r, sym::lit(-m)), sym::compare(CmpOp::Le, r, zero)));
    defs_.push_back(sym::disj(nonneg, neg));
    return q;
  }

  SymbolId next_;
  std::map<std::string, SymbolId> memo_;
  std::vector<sym::Prop> defs_;
};

std::set<SymbolId> clause_symbols(const Clause& c) {
  std::set<SymbolId> out;
  for (const auto& a : c) {
    for (const auto& [id, v] : a.coeffs) out.insert(id);
  }
  return out;
}

// ---- Fourier-Motzkin with tracked multipliers ----

struct Row {
  std::vector<BigInt> c;
  BigInt k;
  std::vector<BigInt> m;

  bool zero() const {
    return std::all_of(c.begin(), c.end(), [](const BigInt& v) { return v == 0; });
  }
};

void reduce(Row& r) {
  BigInt g = abs(r.k);
  for (const auto& v : r.c) g = gcd(g, v);
  for (const auto& v : r.m) g = gcd(g, v);
  if (g > 1) {
    for (auto& v : r.c) v /= g;
    for (auto& v : r.m) v /= g;
    r.k /= g;
  }
}

Farkas farkas_of(const Row& r) {
  Farkas f;
  for (std::size_t i = 0; i < r.m.size(); ++i) {
    if (r.m[i] != 0) f.combination.emplace_back(i, r.m[i]);
  }
  f.slack = r.k;
  return f;
}

struct FmResult {
  enum Kind { Infeasible, Feasible, Unknown } kind = Unknown;
  Farkas farkas;
  std::vector<Rational> point;
  std::vector<Row> projection;
};

// Rows over `vars`. With keep >= 0 that variable is never eliminated and the
// rows left over it alone are returned as the projection.
FmResult fourier_motzkin(const Clause& atoms, const std::vector<SymbolId>& vars, std::size_t max_rows,
                         int keep = -1) {
  const std::size_t nv = vars.size();
  const std::size_t na = atoms.size();
  std::map<SymbolId, std::size_t> index;
  for (std::size_t i = 0; i < nv; ++i) index[vars[i]] = i;

  FmResult res;
  std::vector<Row> rows;
  for (std::size_t i = 0; i < na; ++i) {
    Row r{std::vector<BigInt>(nv), atoms[i].constant, std::vector<BigInt>(na)};
    for (const auto& [id, v] : atoms[i].coeffs) r.c[index.at(id)] = v;
    r.m[i] = 1;
    if (r.zero()) {
      if (r.k < 0) {
        res.kind = FmResult::Infeasible;
        res.farkas = farkas_of(r);
        return res;
      }
      continue;
    }
    rows.push_back(std::move(r));
  }

  std::vector<std::pair<std::size_t, std::vector<Row>>> stages;
  while (true) {
    std::optional<std::size_t> best;
    std::size_t best_cost = 0;
    for (std::size_t v = 0; v < nv; ++v) {
      if (static_cast<int>(v) == keep) continue;
      std::size_t pos = 0;
      std::size_t neg = 0;
      for (const auto& r : rows) {
        if (r.c[v] > 0) ++pos;
        if (r.c[v] < 0) ++neg;
      }
      if (pos + neg == 0) continue;
      std::size_t cost = pos * neg;
      if (!best || cost < best_cost) {
        best = v;
        best_cost = cost;
      }
    }
    if (!best) break;
    const std::size_t v = *best;
    std::vector<Row> next;
    std::vector<const Row*> pos;
    std::vector<const Row*> neg;
    for (const auto& r : rows) {
      if (r.c[v] > 0) pos.push_back(&r);
      else if (r.c[v] < 0) neg.push_back(&r);
      else next.push_back(r);
    }
    for (const Row* p : pos) {
      for (const Row* n : neg) {
        BigInt fp = -n->c[v];
        BigInt fn = p->c[v];
        Row r{std::vector<BigInt>(nv), fp * p->k + fn * n->k, std::vector<BigInt>(na)};
        for (std::size_t j = 0; j < nv; ++j) r.c[j] = fp * p->c[j] + fn * n->c[j];
        for (std::size_t j = 0; j < na; ++j) r.m[j] = fp * p->m[j] + fn * n->m[j];
        reduce(r);
        if (r.zero()) {
          if (r.k < 0) {
            res.kind = FmResult::Infeasible;
            res.farkas = farkas_of(r);
            return res;
          }
          continue;
        }
        next.push_back(std::move(r));
      }
    }
    // Keep only the tightest row per coefficient vector.
    std::map<std::vector<BigInt>, std::size_t> by_coeffs;
    std::vector<Row> deduped;
    for (auto& r : next) {
      auto it = by_coeffs.find(r.c);
      if (it == by_coeffs.end()) {
        by_coeffs.emplace(r.c, deduped.size());
        deduped.push_back(std::move(r));
      } else if (r.k < deduped[it->second].k) {
        deduped[it->second] = std::move(r);
      }
    }
    if (deduped.size() > max_rows) return res;
    stages.emplace_back(v, std::move(rows));
    rows = std::move(deduped);
  }

  if (keep >= 0) {
    // Opposite bounds on the kept variable may still conflict.
    for (const auto& p : rows) {
      for (const auto& n : rows) {
        if (p.c[keep] <= 0 || n.c[keep] >= 0) continue;
        BigInt fp = -n.c[keep];
        BigInt fn = p.c[keep];
        Row r{std::vector<BigInt>(nv), fp * p.k + fn * n.k, std::vector<BigInt>(na)};
        for (std::size_t j = 0; j < nv; ++j) r.c[j] = fp * p.c[j] + fn * n.c[j];
        for (std::size_t j = 0; j < na; ++j) r.m[j] = fp * p.m[j] + fn * n.m[j];
        reduce(r);
        if (r.zero() && r.k < 0) {
          res.kind = FmResult::Infeasible;
          res.farkas = farkas_of(r);
          return res;
        }
      }
    }
    res.kind = FmResult::Feasible;
    res.projection = std::move(rows);
    return res;
  }

  std::vector<Rational> val(nv, Rational(0));
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    const std::size_t v = it->first;
    std::optional<Rational> lo;
    std::optional<Rational> hi;
    for (const auto& r : it->second) {
      if (r.c[v] == 0) continue;
      Rational rest(r.k);
      for (std::size_t j = 0; j < nv; ++j) {
        if (j != v && r.c[j] != 0) rest += Rational(r.c[j]) * val[j];
      }
      Rational bound = -rest / Rational(r.c[v]);
      if (r.c[v] > 0) {
        if (!lo || bound > *lo) lo = bound;
      } else {
        if (!hi || bound < *hi) hi = bound;
      }
    }
    std::optional<BigInt> ilo;
    std::optional<BigInt> ihi;
    if (lo) ilo = ceil(*lo);
    if (hi) ihi = floor(*hi);
    if (!ilo || !ihi || *ilo <= *ihi) {
      BigInt pick = 0;
      if (ilo && pick < *ilo) pick = *ilo;
      if (ihi && pick > *ihi) pick = *ihi;
      val[v] = Rational(pick);
    } else {
      val[v] = *lo;
    }
  }
  res.kind = FmResult::Feasible;
  res.point = std::move(val);
  return res;
}

std::vector<SymbolId> sorted_symbols(const Clause& c) {
  auto s = clause_symbols(c);
  return {s.begin(), s.end()};
}

WitnessPtr make(Witness w) { return std::make_shared<const Witness>(std::move(w)); }

WitnessPtr reindex(const WitnessPtr& w, std::size_t removed) {
  if (const auto* f = std::get_if<Farkas>(&w->node)) {
    Farkas g = *f;
    for (auto& [i, m] : g.combination) {
      if (i > removed) --i;
    }
    return make(Witness{std::move(g)});
  }
  if (const auto* s = std::get_if<CaseSplit>(&w->node)) {
    return make(Witness{CaseSplit{s->symbol, s->pivot, reindex(s->below, removed), reindex(s->above, removed)}});
  }
  return w;
}

LinAtom upper_atom(SymbolId x, const BigInt& bound) {  // bound - x >= 0
  return LinAtom{{{x, BigInt(-1)}}, bound};
}

LinAtom lower_atom(SymbolId x, const BigInt& bound) {  // x - bound >= 0
  return LinAtom{{{x, BigInt(1)}}, -bound};
}

Clause with(const Clause& c, LinAtom a) {
  Clause out = c;
  out.push_back(std::move(a));
  return out;
}

bool satisfies(const Clause& c, const std::map<SymbolId, BigInt>& point) {
  for (const auto& a : c) {
    BigInt s = a.constant;
    for (const auto& [id, v] : a.coeffs) {
      auto it = point.find(id);
      if (it != point.end()) s += v * it->second;
    }
    if (s < 0) return false;
  }
  return true;
}

struct ClauseOutcome {
  enum Kind { Refuted, Model, Unknown } kind = Unknown;
  WitnessPtr witness;
  std::map<SymbolId, BigInt> model;
  std::string reason;
};

ClauseOutcome unknown(std::string reason) {
  ClauseOutcome o;
  o.reason = std::move(reason);
  return o;
}

ClauseOutcome refuted(WitnessPtr w) {
  ClauseOutcome o;
  o.kind = ClauseOutcome::Refuted;
  o.witness = std::move(w);
  return o;
}

// Branch and bound over the rational relaxation.
ClauseOutcome branch_and_bound(const Clause& atoms, const Options& opts, std::size_t& nodes) {
  if (++nodes > opts.max_nodes) return unknown("branch-and-bound node limit");
  std::vector<SymbolId> vars = sorted_symbols(atoms);
  FmResult fm = fourier_motzkin(atoms, vars, opts.max_rows);
  if (fm.kind == FmResult::Unknown) return unknown("elimination row limit");
  if (fm.kind == FmResult::Infeasible) return refuted(make(Witness{fm.farkas}));

  std::optional<std::size_t> frac;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (denominator(fm.point[i]) != 1) {
      frac = i;
      break;
    }
  }
  if (!frac) {
    ClauseOutcome o;
    o.kind = ClauseOutcome::Model;
    for (std::size_t i = 0; i < vars.size(); ++i) o.model[vars[i]] = numerator(fm.point[i]);
    if (!satisfies(atoms, o.model)) return unknown("internal: elimination point violates clause");
    return o;
  }
  const SymbolId x = vars[*frac];
  const BigInt pivot = floor(fm.point[*frac]);
  const std::size_t n = atoms.size();

  ClauseOutcome below = branch_and_bound(with(atoms, upper_atom(x, pivot)), opts, nodes);
  if (below.kind != ClauseOutcome::Refuted) return below;
  if (!uses(*below.witness, n)) return refuted(reindex(below.witness, n));
  ClauseOutcome above = branch_and_bound(with(atoms, lower_atom(x, pivot + 1)), opts, nodes);
  if (above.kind != ClauseOutcome::Refuted) return above;
  if (!uses(*above.witness, n)) return refuted(reindex(above.witness, n));
  return refuted(make(Witness{CaseSplit{x, pivot, below.witness, above.witness}}));
}

std::optional<Farkas> rational_refutation(const Clause& atoms, const Options& opts) {
  FmResult fm = fourier_motzkin(atoms, sorted_symbols(atoms), opts.max_rows);
  if (fm.kind != FmResult::Infeasible) return std::nullopt;
  return fm.farkas;
}

// Bounds every symbol by projection and enumerates the box.
ClauseOutcome enumerate(const Clause& atoms, const Options& opts) {
  std::vector<SymbolId> vars = sorted_symbols(atoms);
  Enum e;
  BigInt size = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const SymbolId x = vars[i];
    FmResult fm = fourier_motzkin(atoms, vars, opts.max_rows, static_cast<int>(i));
    if (fm.kind == FmResult::Unknown) return unknown("elimination row limit");
    if (fm.kind == FmResult::Infeasible) return refuted(make(Witness{fm.farkas}));
    std::optional<Rational> lo;
    std::optional<Rational> hi;
    for (const auto& r : fm.projection) {
      Rational bound = Rational(-r.k) / Rational(r.c[i]);
      if (r.c[i] > 0 && (!lo || bound > *lo)) lo = bound;
      if (r.c[i] < 0 && (!hi || bound < *hi)) hi = bound;
    }
    if (!lo || !hi) return unknown("unbounded symbol s" + std::to_string(x));
    BigInt ilo = ceil(*lo);
    BigInt ihi = floor(*hi);
    if (ilo > ihi) {
      auto below = rational_refutation(with(atoms, upper_atom(x, ihi)), opts);
      auto above = rational_refutation(with(atoms, lower_atom(x, ihi + 1)), opts);
      if (!below || !above) return unknown("internal: integer gap not refuted");
      return refuted(make(Witness{CaseSplit{x, ihi, make(Witness{*below}), make(Witness{*above})}}));
    }
    auto lo_proof = rational_refutation(with(atoms, upper_atom(x, ilo - 1)), opts);
    auto hi_proof = rational_refutation(with(atoms, lower_atom(x, ihi + 1)), opts);
    if (!lo_proof || !hi_proof) return unknown("internal: projected bound not refuted");
    size *= ihi - ilo + 1;
    if (size > opts.enum_limit || size > kMaxEnumBox) return unknown("enumeration box too large");
    e.bounds.push_back(EnumBound{x, ilo, ihi, make(Witness{*lo_proof}), make(Witness{*hi_proof})});
  }

  std::map<SymbolId, BigInt> point;
  for (const auto& b : e.bounds) point[b.symbol] = b.lo;
  while (true) {
    if (satisfies(atoms, point)) {
      ClauseOutcome o;
      o.kind = ClauseOutcome::Model;
      o.model = point;
      return o;
    }
    std::size_t i = 0;
    for (; i < e.bounds.size(); ++i) {
      BigInt& v = point[e.bounds[i].symbol];
      if (v < e.bounds[i].hi) {
        ++v;
        break;
      }
      v = e.bounds[i].lo;
    }
    if (i == e.bounds.size()) break;
  }
  return refuted(make(Witness{std::move(e)}));
}

CheckResult fail(Reject r, std::string detail = {}) { return CheckResult{false, r, std::move(detail)}; }

CheckResult check_at(const Clause& clause, const Witness& w, int depth) {
  if (const auto* f = std::get_if<Farkas>(&w.node)) {
    if (f->combination.empty()) return fail(Reject::NotContradictory, "empty combination");
    std::map<SymbolId, BigInt> sum;
    BigInt constant = 0;
    std::optional<std::size_t> prev;
    for (const auto& [i, m] : f->combination) {
      if (i >= clause.size()) return fail(Reject::BadIndex, "atom " + std::to_string(i) + " of " + std::to_string(clause.size()));
      if (prev && i <= *prev) return fail(Reject::UnsortedCombination);
      prev = i;
      if (!mutation::active(mutation::kFarkasSign) && m <= 0) {
        return fail(Reject::NonPositiveMultiplier, "multiplier " + m.str() + " for atom " + std::to_string(i));
      }
      for (const auto& [id, c] : clause[i].coeffs) sum[id] += m * c;
      constant += m * clause[i].constant;
    }
    for (const auto& [id, c] : sum) {
      if (c != 0) return fail(Reject::NotContradictory, "coefficient of s" + std::to_string(id) + " is " + c.str());
    }
    if (constant != f->slack) return fail(Reject::NotContradictory, "sum is " + constant.str() + ", slack " + f->slack.str());
    if (f->slack >= 0) return fail(Reject::NotContradictory, "slack is not negative");
    return {};
  }
  if (const auto* s = std::get_if<CaseSplit>(&w.node)) {
    const std::size_t n = clause.size();
    if (!s->below || !s->above) return fail(Reject::NotContradictory, "missing branch");
    if (auto r = check_at(with(clause, upper_atom(s->symbol, s->pivot)), *s->below, depth + 1); !r) return r;
    if (!uses(*s->below, n)) return fail(Reject::UnusedCaseAtom, "below branch");
    if (auto r = check_at(with(clause, lower_atom(s->symbol, s->pivot + 1)), *s->above, depth + 1); !r) return r;
    if (!uses(*s->above, n)) return fail(Reject::UnusedCaseAtom, "above branch");
    return {};
  }
  const auto& e = std::get<Enum>(w.node);
  if (depth != 0) return fail(Reject::EnumNotAtRoot);
  auto symbols = sorted_symbols(clause);
  if (symbols.size() != e.bounds.size()) return fail(Reject::BoxMismatch, "box does not cover the clause symbols");
  BigInt size = 1;
  const std::size_t n = clause.size();
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const auto& b = e.bounds[i];
    if (b.symbol != symbols[i]) return fail(Reject::BoxMismatch, "box does not cover the clause symbols");
    if (b.lo > b.hi) return fail(Reject::BoxMismatch, "empty range for s" + std::to_string(b.symbol));
    if (!b.lo_proof || !b.hi_proof) return fail(Reject::BoxNotImplied, "missing bound proof");
    auto r = check_at(with(clause, upper_atom(b.symbol, b.lo - 1)), *b.lo_proof, depth + 1);
    if (!r || !uses(*b.lo_proof, n)) return fail(Reject::BoxNotImplied, "lower bound of s" + std::to_string(b.symbol));
    r = check_at(with(clause, lower_atom(b.symbol, b.hi + 1)), *b.hi_proof, depth + 1);
    if (!r || !uses(*b.hi_proof, n)) return fail(Reject::BoxNotImplied, "upper bound of s" + std::to_string(b.symbol));
    size *= b.hi - b.lo + 1;
    if (size > kMaxEnumBox) return fail(Reject::BoxTooLarge);
  }
  std::map<SymbolId, BigInt> point;
  for (const auto& b : e.bounds) point[b.symbol] = b.lo;
  while (true) {
    if (satisfies(clause, point)) return fail(Reject::BoxCounterexample);
    std::size_t i = 0;
    for (; i < e.bounds.size(); ++i) {
      BigInt& v = point[e.bounds[i].symbol];
      if (v < e.bounds[i].hi) {
        ++v;
        break;
      }
      v = e.bounds[i].lo;
    }
    if (i == e.bounds.size()) break;
  }
  return {};
}

void describe_into(std::ostringstream& out, const Witness& w, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (const auto* f = std::get_if<Farkas>(&w.node)) {
    out << pad << "farkas";
    for (const auto& [i, m] : f->combination) out << " " << m << "*#" << i;
    out << " = " << f->slack << "\n";
  } else if (const auto* s = std::get_if<CaseSplit>(&w.node)) {
    out << pad << "split s" << s->symbol << " at " << s->pivot << "\n";
    describe_into(out, *s->below, indent + 1);
    describe_into(out, *s->above, indent + 1);
  } else {
    const auto& e = std::get<Enum>(w.node);
    out << pad << "enum";
    for (const auto& b : e.bounds) out << " s" << b.symbol << " in [" << b.lo << ", " << b.hi << "]";
    out << "\n";
  }
}

}  // namespace

bool canonicalize(Clause& c) {
  Clause out;
  for (auto& a : c) {
    if (a.coeffs.empty()) {
      if (a.constant < 0) return false;
      continue;
    }
    BigInt g = 0;
    for (const auto& [id, v] : a.coeffs) g = gcd(g, v);
    if (g > 1) {
      for (auto& [id, v] : a.coeffs) v /= g;
      a.constant = floor_div(a.constant, g);
    }
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end());
  Clause unique;
  for (auto& a : out) {
    if (!unique.empty() && unique.back().coeffs == a.coeffs) continue;
    unique.push_back(std::move(a));
  }
  c = std::move(unique);
  return true;
}

Dnf normalize(const sym::Prop& p, const Options& opts) {
  DnfBuilder b(opts.max_clauses);
  return b.of(p, false);
}

Problem build_problem(const sym::PathCond& hyps, const sym::Prop& goal, const Options& opts) {
  std::set<SymbolId> symbols;
  for (const auto& h : hyps) sym::collect_symbols(h, symbols);
  sym::collect_symbols(goal, symbols);
  SymbolId next = symbols.empty() ? 0 : *symbols.rbegin() + 1;

  DivisionEliminator elim(next);
  std::vector<sym::Prop> parts;
  for (SymbolId s : symbols) parts.push_back(sym::int_range(sym::symbol(s)));
  std::size_t dropped = 0;
  std::vector<sym::Prop> conjuncts;
  std::function<void(const sym::Prop&)> split = [&](const sym::Prop& p) {
    const auto* l = std::get_if<sym::PLogic>(&p->node);
    if (l && l->op == LogicOp::And) {
      split(l->lhs);
      split(l->rhs);
    } else {
      conjuncts.push_back(p);
    }
  };
  for (const auto& h : hyps) split(h);
  for (const auto& c : conjuncts) {
    try {
      DivisionEliminator probe(next);
      DnfBuilder(opts.max_clauses).of(probe.prop(c), false);
    } catch (const Unsupported&) {
      ++dropped;
      continue;
    }
    parts.push_back(elim.prop(c));
  }
  sym::Prop negated_goal = sym::negation(elim.prop(goal));
  for (const auto& d : elim.definitions()) parts.push_back(d);
  parts.push_back(negated_goal);

  DnfBuilder b(opts.max_clauses);
  Dnf dnf{Clause{}};
  for (const auto& p : parts) dnf = b.cross(dnf, b.of(p, false));

  Problem problem;
  problem.clauses = std::move(dnf);
  problem.symbols.assign(symbols.begin(), symbols.end());
  problem.dropped = dropped;
  return problem;
}

bool uses(const Witness& w, std::size_t index) {
  if (const auto* f = std::get_if<Farkas>(&w.node)) {
    return std::any_of(f->combination.begin(), f->combination.end(),
                       [&](const auto& e) { return e.first == index; });
  }
  if (const auto* s = std::get_if<CaseSplit>(&w.node)) {
    return (s->below && uses(*s->below, index)) || (s->above && uses(*s->above, index));
  }
  return false;
}

std::string_view to_string(Reject r) {
  switch (r) {
    case Reject::BadIndex: return "bad-index";
    case Reject::NonPositiveMultiplier: return "non-positive-multiplier";
    case Reject::UnsortedCombination: return "unsorted-combination";
    case Reject::NotContradictory: return "not-contradictory";
    case Reject::UnusedCaseAtom: return "unused-case-atom";
    case Reject::EnumNotAtRoot: return "enum-not-at-root";
    case Reject::BoxMismatch: return "box-mismatch";
    case Reject::BoxNotImplied: return "box-not-implied";
    case Reject::BoxTooLarge: return "box-too-large";
    case Reject::BoxCounterexample: return "box-counterexample";
    case Reject::ClauseCountMismatch: return "clause-count-mismatch";
    case Reject::Unsupported: return "unsupported";
  }
  return "unknown";
}

CheckResult check_witness(const Clause& clause, const Witness& w) { return check_at(clause, w, 0); }

CheckResult check_proof(const sym::PathCond& hyps, const sym::Prop& goal, const Proof& proof) {
  Options opts;
  opts.max_clauses = 1U << 16;
  Problem problem;
  try {
    problem = build_problem(hyps, goal, opts);
  } catch (const Unsupported& e) {
    return fail(Reject::Unsupported, e.what());
  }
  if (problem.clauses.size() != proof.clauses.size()) {
    return fail(Reject::ClauseCountMismatch, std::to_string(problem.clauses.size()) + " clauses, " +
                                                  std::to_string(proof.clauses.size()) + " witnesses");
  }
  for (std::size_t i = 0; i < proof.clauses.size(); ++i) {
    if (!proof.clauses[i]) return fail(Reject::NotContradictory, "missing witness for clause " + std::to_string(i));
    auto r = check_at(problem.clauses[i], *proof.clauses[i], 0);
    if (!r) {
      r.detail = "clause " + std::to_string(i) + (r.detail.empty() ? "" : ": " + r.detail);
      return r;
    }
  }
  return {};
}

Decision decide(const sym::PathCond& hyps, const sym::Prop& goal, const Options& opts) {
  Problem problem;
  try {
    problem = build_problem(hyps, goal, opts);
  } catch (const Unsupported& e) {
    return Incomplete{e.what()};
  }
  Proof proof;
  for (const auto& clause : problem.clauses) {
    ClauseOutcome o;
    if (opts.force_enum) {
      o = enumerate(clause, opts);
    } else {
      std::size_t nodes = 0;
      o = branch_and_bound(clause, opts, nodes);
      if (o.kind == ClauseOutcome::Unknown) o = enumerate(clause, opts);
    }
    if (o.kind == ClauseOutcome::Unknown) return Incomplete{o.reason};
    if (o.kind == ClauseOutcome::Model) {
      sym::Valuation nu;
      for (SymbolId s : problem.symbols) {
        auto it = o.model.find(s);
        nu[s] = it == o.model.end() ? BigInt(0) : it->second;
      }
      bool ok = !sym::evaluate(goal, nu);
      for (const auto& h : hyps) ok = ok && sym::evaluate(h, nu);
      if (!ok && problem.dropped > 0) return Incomplete{"no countermodel within the linear fragment of the hypotheses"};
      if (!ok) return Incomplete{"internal: countermodel does not refute the obligation"};
      return Invalid{std::move(nu)};
    }
    proof.clauses.push_back(o.witness);
  }
  return Valid{std::move(proof)};
}

std::string describe(const Witness& w) {
  std::ostringstream out;
  describe_into(out, w, 0);
  return out.str();
}

}  // namespace certivex::solver
