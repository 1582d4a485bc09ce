#include "certivex/symexec.hpp"

#include <functional>
#include <sstream>

#include "certivex/mutation.hpp"

namespace certivex {

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::InvariantEntry: return "invariant-entry";
    case Origin::InvariantPreserved: return "invariant-preserved";
    case Origin::Postcondition: return "postcondition";
    case Origin::Overflow: return "overflow";
    case Origin::DivisionByZero: return "division-by-zero";
    case Origin::MissingReturn: return "missing-return";
  }
  return "unknown";
}

std::optional<Origin> origin_from_string(std::string_view s) {
  for (Origin o : {Origin::InvariantEntry, Origin::InvariantPreserved, Origin::Postcondition, Origin::Overflow,
                   Origin::DivisionByZero, Origin::MissingReturn}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

namespace {

struct Check {
  sym::Prop prop;
  Origin origin;
  SourceLoc loc;
};

SepPtr node(SepNode n) { return std::make_shared<const SepNode>(std::move(n)); }
SepPtr done() { return node(SepNode{SepDone{}}); }
SepPtr assume(sym::Prop p, SepPtr rest) { return node(SepNode{SepAssume{std::move(p), std::move(rest)}}); }
SepPtr assert_(sym::Prop p, Origin o, SourceLoc loc, SepPtr rest) {
  return node(SepNode{SepAssert{std::move(p), o, loc, std::move(rest)}});
}

// Arithmetic safety conditions of `e`, operands before operators.
void int_checks(const sym::Store& store, const IExpr& e, std::vector<Check>& out) {
  using namespace sym;
  if (const auto* n = std::get_if<Negate>(&e.node)) {
    int_checks(store, *n->operand, out);
    out.push_back({int_range(negate(eval_int(store, *n->operand))), Origin::Overflow, e.loc});
  } else if (const auto* a = std::get_if<Arith>(&e.node)) {
    int_checks(store, *a->lhs, out);
    int_checks(store, *a->rhs, out);
    Term l = eval_int(store, *a->lhs);
    Term r = eval_int(store, *a->rhs);
    if (a->op == ArithOp::Div || a->op == ArithOp::Mod) {
      out.push_back({compare(CmpOp::Ne, r, lit(0)), Origin::DivisionByZero, e.loc});
      out.push_back({disj(compare(CmpOp::Ne, l, lit(kIntMin)), compare(CmpOp::Ne, r, lit(-1))), Origin::Overflow, e.loc});
    } else if (!mutation::active(mutation::kDropOverflowCheck)) {
      out.push_back({int_range(arith(a->op, l, r)), Origin::Overflow, e.loc});
    }
  }
}

// The right operand of && and || is only evaluated when the left one does not
// decide the result, so its conditions are guarded.
void bool_checks(const sym::Store& store, const BExpr& b, std::vector<Check>& out) {
  using namespace sym;
  if (const auto* c = std::get_if<Compare>(&b.node)) {
    int_checks(store, *c->lhs, out);
    int_checks(store, *c->rhs, out);
  } else if (const auto* n = std::get_if<Not>(&b.node)) {
    bool_checks(store, *n->operand, out);
  } else if (const auto* l = std::get_if<Logic>(&b.node)) {
    bool_checks(store, *l->lhs, out);
    std::vector<Check> rhs;
    bool_checks(store, *l->rhs, rhs);
    if (rhs.empty()) return;
    Prop left = eval_bool(store, *l->lhs);
    Prop guard = l->op == LogicOp::And ? negation(left) : left;
    for (auto& c : rhs) out.push_back({disj(guard, c.prop), c.origin, c.loc});
  }
}

SepPtr chain(const std::vector<Check>& checks, SepPtr rest) {
  for (auto it = checks.rbegin(); it != checks.rend(); ++it) rest = assert_(it->prop, it->origin, it->loc, rest);
  return rest;
}

using Cont = std::function<SepPtr(const sym::Store&)>;

class Executor {
 public:
  explicit Executor(const Func& f) : f_(f) {}

  SepPtr run() {
    sym::Store store;
    sym::SymbolId first = fresh_.peek();
    for (const auto& p : f_.params) store[p] = sym::symbol(fresh_.pick());
    SepPtr body = exec(*f_.body, store, [&](const sym::Store&) {
      return assert_(sym::truth(false), Origin::MissingReturn, f_.loc, done());
    });
    SepPtr rest = assume(sym::eval_bool(store, *f_.pre), body);
    if (f_.params.empty()) return rest;
    return node(SepNode{SepFresh{first, static_cast<std::uint32_t>(f_.params.size()), rest}});
  }

 private:
  SepPtr exec(const Stmt& s, const sym::Store& store, const Cont& k) {
    return std::visit(
        [&](const auto& x) -> SepPtr {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Skip>) {
            return k(store);
          } else if constexpr (std::is_same_v<T, Seq>) {
            const Stmt& second = *x.second;
            return exec(*x.first, store, [&](const sym::Store& mid) { return exec(second, mid, k); });
          } else if constexpr (std::is_same_v<T, Let>) {
            std::vector<Check> checks;
            int_checks(store, *x.init, checks);
            sym::Store inner = store;
            inner[x.name] = sym::eval_int(store, *x.init);
            const std::string& name = x.name;
            return chain(checks, exec(*x.body, inner, [&](const sym::Store& after) {
                           sym::Store outer = after;
                           outer.erase(name);
                           return k(outer);
                         }));
          } else if constexpr (std::is_same_v<T, Assign>) {
            std::vector<Check> checks;
            int_checks(store, *x.rhs, checks);
            sym::Store next = store;
            next[x.name] = sym::eval_int(store, *x.rhs);
            return chain(checks, k(next));
          } else if constexpr (std::is_same_v<T, If>) {
            std::vector<Check> checks;
            bool_checks(store, *x.cond, checks);
            sym::Prop c = sym::eval_bool(store, *x.cond);
            SepPtr then_tree = assume(c, exec(*x.then_branch, store, k));
            SepPtr else_tree = assume(sym::negation(c), exec(*x.else_branch, store, k));
            return chain(checks, node(SepNode{SepBranch{then_tree, else_tree}}));
          } else if constexpr (std::is_same_v<T, While>) {
            return exec_while(x, s.loc, store, k);
          } else {
            std::vector<Check> checks;
            int_checks(store, *x.value, checks);
            sym::Store final_store = store;
            final_store[std::string(kResultName)] = sym::eval_int(store, *x.value);
            sym::Prop post = sym::eval_bool(final_store, *f_.post);
            return chain(checks, assert_(post, Origin::Postcondition, s.loc, done()));
          }
        },
        s.node);
  }

  SepPtr exec_while(const While& w, SourceLoc loc, const sym::Store& store, const Cont& k) {
    sym::Prop entry = sym::eval_bool(store, *w.invariant);
    std::vector<std::string> havoc = assigned_variables(*w.body);
    if (mutation::active(mutation::kWrongHavocSet) && !havoc.empty()) havoc.pop_back();

    sym::Store head = store;
    sym::SymbolId first = fresh_.peek();
    for (const auto& v : havoc) head[v] = sym::symbol(fresh_.pick());

    std::vector<Check> checks;
    bool_checks(head, *w.cond, checks);
    sym::Prop c = sym::eval_bool(head, *w.cond);
    const BExpr& inv = *w.invariant;
    SepPtr body = assume(c, exec(*w.body, head, [&](const sym::Store& after) {
                           return assert_(sym::eval_bool(after, inv), Origin::InvariantPreserved, loc, done());
                         }));
    SepPtr exit = assume(sym::negation(c), k(head));
    SepPtr rest = assume(sym::eval_bool(head, inv), chain(checks, node(SepNode{SepBranch{body, exit}})));
    if (!havoc.empty()) rest = node(SepNode{SepFresh{first, static_cast<std::uint32_t>(havoc.size()), rest}});
    return assert_(entry, Origin::InvariantEntry, loc, rest);
  }

  const Func& f_;
  sym::FreshCounter fresh_;
};

void dump_into(std::ostringstream& out, const SepNode& t, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const SepNode* n = &t;
  while (n) {
    n = std::visit(
        [&](const auto& x) -> const SepNode* {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, SepAssume>) {
            out << pad << "assume " << sym::to_string(x.prop) << "\n";
            return x.rest.get();
          } else if constexpr (std::is_same_v<T, SepAssert>) {
            out << pad << "assert " << sym::to_string(x.prop) << "  [" << to_string(x.origin) << " "
                << to_string(x.loc) << "]\n";
            return x.rest.get();
          } else if constexpr (std::is_same_v<T, SepFresh>) {
            out << pad << "fresh";
            for (std::uint32_t i = 0; i < x.count; ++i) out << " s" << (x.first + i);
            out << "\n";
            return x.rest.get();
          } else if constexpr (std::is_same_v<T, SepBranch>) {
            out << pad << "branch\n" << pad << "  left:\n";
            dump_into(out, *x.left, indent + 2);
            out << pad << "  right:\n";
            dump_into(out, *x.right, indent + 2);
            return nullptr;
          } else {
            out << pad << "done\n";
            return nullptr;
          }
        },
        n->node);
  }
}

void collect(const SepNode& t, const std::string& prefix, std::size_t count, sym::PathCond hyps,
             std::vector<Obligation>& out) {
  const SepNode* n = &t;
  while (n) {
    if (const auto* a = std::get_if<SepAssume>(&n->node)) {
      if (!sym::is_true(a->prop)) hyps.push_back(a->prop);
      n = a->rest.get();
    } else if (const auto* a = std::get_if<SepAssert>(&n->node)) {
      out.push_back(Obligation{prefix + std::to_string(count), a->origin, a->loc, hyps, a->prop});
      n = a->rest.get();
    } else if (const auto* f = std::get_if<SepFresh>(&n->node)) {
      n = f->rest.get();
    } else if (const auto* b = std::get_if<SepBranch>(&n->node)) {
      std::string here = prefix + std::to_string(count);
      collect(*b->left, here + ".L.", 0, hyps, out);
      collect(*b->right, here + ".R.", 0, hyps, out);
      return;
    } else {
      return;
    }
    ++count;
  }
}

}  // namespace

SepPtr exec_func(const Func& f) { return Executor(f).run(); }

bool equal(const SepNode& a, const SepNode& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, SepAssume>) {
          return sym::equal(x.prop, y.prop) && equal(*x.rest, *y.rest);
        } else if constexpr (std::is_same_v<T, SepAssert>) {
          return x.origin == y.origin && sym::equal(x.prop, y.prop) && equal(*x.rest, *y.rest);
        } else if constexpr (std::is_same_v<T, SepFresh>) {
          return x.first == y.first && x.count == y.count && equal(*x.rest, *y.rest);
        } else if constexpr (std::is_same_v<T, SepBranch>) {
          return equal(*x.left, *y.left) && equal(*x.right, *y.right);
        } else {
          return true;
        }
      },
      a.node);
}

std::string dump(const SepNode& t) {
  std::ostringstream out;
  dump_into(out, t, 0);
  return out.str();
}

std::vector<Obligation> collect_obligations(const SepNode& t) {
  std::vector<Obligation> out;
  collect(t, "", 0, {}, out);
  return out;
}

std::string describe(const Obligation& o) {
  std::ostringstream out;
  out << to_string(o.origin) << " at " << to_string(o.loc) << ", path " << o.path << "\n  {";
  for (std::size_t i = 0; i < o.hypotheses.size(); ++i) {
    out << (i ? ", " : " ") << sym::to_string(o.hypotheses[i]);
  }
  out << (o.hypotheses.empty() ? "} |= " : " } |= ") << sym::to_string(o.goal);
  return out.str();
}

Verdict verify_func(const Func& f, const solver::Options& opts) {
  Func g = simplified(f);
  Verified v;
  v.tree = exec_func(g);
  v.obligations = collect_obligations(*v.tree);
  for (const auto& o : v.obligations) {
    auto d = solver::decide(o.hypotheses, o.goal, opts);
    if (auto* valid = std::get_if<solver::Valid>(&d)) {
      v.proofs.push_back(std::move(valid->proof));
    } else if (auto* invalid = std::get_if<solver::Invalid>(&d)) {
      return Rejected{o, std::move(invalid->countermodel)};
    } else {
      return SolverIncomplete{o, std::get<solver::Incomplete>(d).reason};
    }
  }
  return v;
}

}  // namespace certivex
