#include "certivex/cert.hpp"

#include <chrono>
#include <ctime>
#include <initializer_list>
#include <limits>
#include <set>

#include <openssl/evp.h>

#include "certivex/parser.hpp"
#include "certivex/pretty.hpp"

namespace certivex::cert {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

Json to_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<std::int64_t>(v);
  }
  return v.str();
}

Json to_json(const solver::Witness& w) {
  if (const auto* f = std::get_if<solver::Farkas>(&w.node)) {
    Json comb = Json::array();
    for (const auto& [i, m] : f->combination) comb.push_back(Json::array({i, to_json(m)}));
    return Json{{"farkas", Json{{"combination", comb}, {"slack", to_json(f->slack)}}}};
  }
  if (const auto* s = std::get_if<solver::CaseSplit>(&w.node)) {
    return Json{{"split", Json{{"symbol", s->symbol},
                               {"pivot", to_json(s->pivot)},
                               {"below", to_json(*s->below)},
                               {"above", to_json(*s->above)}}}};
  }
  const auto& e = std::get<solver::Enum>(w.node);
  Json bounds = Json::array();
  for (const auto& b : e.bounds) {
    bounds.push_back(Json{{"symbol", b.symbol},
                          {"lo", to_json(b.lo)},
                          {"hi", to_json(b.hi)},
                          {"lo_proof", to_json(*b.lo_proof)},
                          {"hi_proof", to_json(*b.hi_proof)}});
  }
  return Json{{"enum", Json{{"bounds", bounds}}}};
}

Json to_json(const solver::Proof& p) {
  Json clauses = Json::array();
  for (const auto& w : p.clauses) clauses.push_back(to_json(*w));
  return Json{{"clauses", clauses}};
}

namespace {

std::string loc_text(SourceLoc loc) { return std::to_string(loc.line) + ":" + std::to_string(loc.column); }

void sep_into(const SepNode& t, Json& out) {
  const SepNode* n = &t;
  while (n) {
    n = std::visit(
        [&](const auto& x) -> const SepNode* {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, SepAssume>) {
            out.push_back(Json{{"kind", "assume"}, {"prop", sym::to_string(x.prop)}});
            return x.rest.get();
          } else if constexpr (std::is_same_v<T, SepAssert>) {
            out.push_back(Json{{"kind", "assert"},
                               {"prop", sym::to_string(x.prop)},
                               {"origin", std::string(to_string(x.origin))},
                               {"loc", loc_text(x.loc)}});
            return x.rest.get();
          } else if constexpr (std::is_same_v<T, SepFresh>) {
            out.push_back(Json{{"kind", "fresh"}, {"first", x.first}, {"count", x.count}});
            return x.rest.get();
          } else if constexpr (std::is_same_v<T, SepBranch>) {
            Json left = Json::array();
            Json right = Json::array();
            sep_into(*x.left, left);
            sep_into(*x.right, right);
            out.push_back(Json{{"kind", "branch"}, {"left", left}, {"right", right}});
            return nullptr;
          } else {
            out.push_back(Json{{"kind", "done"}});
            return nullptr;
          }
        },
        n->node);
  }
}

Json obligation_json(const Obligation& o, const solver::Proof* proof) {
  Json hyps = Json::array();
  for (const auto& h : o.hypotheses) hyps.push_back(sym::to_string(h));
  Json j{{"path", o.path},
         {"origin", std::string(to_string(o.origin))},
         {"loc", loc_text(o.loc)},
         {"hypotheses", hyps},
         {"goal", sym::to_string(o.goal)}};
  if (proof) j["proof"] = to_json(*proof);
  return j;
}

Json contract_json(const Func& f) {
  return Json{{"name", f.name}, {"params", f.params}, {"pre", pretty(*f.pre)}, {"post", pretty(*f.post)}};
}

const Json& field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'");
  return *it;
}

void expect_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& what) {
  if (!j.is_object()) throw FormatError(what + " must be an object");
  std::set<std::string> expected(keys.begin(), keys.end());
  if (j.size() != expected.size()) throw FormatError(what + " has unexpected fields");
  for (const auto& [k, v] : j.items()) {
    if (!expected.count(k)) throw FormatError(what + " has unexpected field '" + k + "'");
  }
}

std::size_t index_from_json(const Json& j) {
  if (!j.is_number_unsigned()) throw FormatError("expected a nonnegative integer");
  return j.get<std::size_t>();
}

sym::SymbolId symbol_from_json(const Json& j) {
  if (!j.is_number_unsigned() || j.get<std::uint64_t>() > std::numeric_limits<sym::SymbolId>::max()) {
    throw FormatError("expected a symbol index");
  }
  return j.get<sym::SymbolId>();
}

CheckReport reject(std::string phase, std::string location, std::string reason) {
  CheckReport r;
  r.phase = std::move(phase);
  r.location = std::move(location);
  r.reason = std::move(reason);
  return r;
}

}  // namespace

Json to_json(const SepNode& t) {
  Json out = Json::array();
  sep_into(t, out);
  return out;
}

Json to_json(const core::Expr& e) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, core::Lit>) {
          return Json::array({"Lit", x.value});
        } else if constexpr (std::is_same_v<T, core::VarIdx>) {
          return Json::array({"Var", x.index});
        } else if constexpr (std::is_same_v<T, core::Unary>) {
          return Json::array({std::string(core::name(x.op)), to_json(*x.operand)});
        } else {
          return Json::array({std::string(core::name(x.op)), to_json(*x.lhs), to_json(*x.rhs)});
        }
      },
      e.node);
}

Json to_json(const core::Stmt& s) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, core::Skip>) {
          return Json::array({"Skip"});
        } else if constexpr (std::is_same_v<T, core::Seq>) {
          return Json::array({"Seq", to_json(*x.first), to_json(*x.second)});
        } else if constexpr (std::is_same_v<T, core::Assign>) {
          return Json::array({"Assign", x.index, to_json(*x.value)});
        } else if constexpr (std::is_same_v<T, core::Block>) {
          return Json::array({"Block", to_json(*x.init), to_json(*x.body)});
        } else if constexpr (std::is_same_v<T, core::If>) {
          return Json::array({"If", to_json(*x.cond), to_json(*x.then_branch), to_json(*x.else_branch)});
        } else if constexpr (std::is_same_v<T, core::Loop>) {
          return Json::array({"Loop", to_json(*x.body)});
        } else if constexpr (std::is_same_v<T, core::Throw>) {
          return Json::array({"Throw", x.level});
        } else if constexpr (std::is_same_v<T, core::Catch>) {
          return Json::array({"Catch", to_json(*x.body)});
        } else {
          return Json::array({"Ret", to_json(*x.value)});
        }
      },
      s.node);
}

BigInt big_from_json(const Json& j) {
  if (j.is_number_unsigned()) {
    auto v = j.get<std::uint64_t>();
    if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw FormatError("integer beyond 64 bits must be a string");
    }
    return BigInt(v);
  }
  if (j.is_number_integer()) {
    return BigInt(j.get<std::int64_t>());
  }
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    std::size_t start = !s.empty() && s[0] == '-' ? 1 : 0;
    if (s.size() == start || (s[start] == '0') ||
        s.find_first_not_of("0123456789", start) != std::string::npos) {
      throw FormatError("malformed integer string");
    }
    BigInt v(s);
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
      throw FormatError("64-bit integer must be a number");
    }
    return v;
  }
  throw FormatError("expected an integer");
}

solver::WitnessPtr witness_from_json(const Json& j) {
  if (!j.is_object() || j.size() != 1) throw FormatError("witness must be an object with one field");
  const auto& [kind, body] = *j.items().begin();
  if (kind == "farkas") {
    expect_keys(body, {"combination", "slack"}, "farkas witness");
    const Json& comb = body["combination"];
    if (!comb.is_array()) throw FormatError("combination must be an array");
    solver::Farkas f;
    for (const auto& e : comb) {
      if (!e.is_array() || e.size() != 2) throw FormatError("combination entries are [index, multiplier]");
      f.combination.emplace_back(index_from_json(e[0]), big_from_json(e[1]));
    }
    f.slack = big_from_json(body["slack"]);
    return std::make_shared<const solver::Witness>(solver::Witness{std::move(f)});
  }
  if (kind == "split") {
    expect_keys(body, {"symbol", "pivot", "below", "above"}, "split witness");
    solver::CaseSplit s{symbol_from_json(body["symbol"]), big_from_json(body["pivot"]),
                        witness_from_json(body["below"]), witness_from_json(body["above"])};
    return std::make_shared<const solver::Witness>(solver::Witness{std::move(s)});
  }
  if (kind == "enum") {
    expect_keys(body, {"bounds"}, "enum witness");
    const Json& bounds = body["bounds"];
    if (!bounds.is_array()) throw FormatError("bounds must be an array");
    solver::Enum e;
    for (const auto& b : bounds) {
      expect_keys(b, {"symbol", "lo", "hi", "lo_proof", "hi_proof"}, "enum bound");
      e.bounds.push_back(solver::EnumBound{symbol_from_json(b["symbol"]), big_from_json(b["lo"]),
                                           big_from_json(b["hi"]), witness_from_json(b["lo_proof"]),
                                           witness_from_json(b["hi_proof"])});
    }
    return std::make_shared<const solver::Witness>(solver::Witness{std::move(e)});
  }
  throw FormatError("unknown witness kind '" + kind + "'");
}

solver::Proof proof_from_json(const Json& j) {
  expect_keys(j, {"clauses"}, "proof");
  const Json& clauses = j["clauses"];
  if (!clauses.is_array()) throw FormatError("clauses must be an array");
  solver::Proof p;
  for (const auto& c : clauses) p.clauses.push_back(witness_from_json(c));
  return p;
}

std::string now_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json emit(const Program& p, const Verified& v, const std::string& timestamp) {
  Json obligations = Json::array();
  for (std::size_t i = 0; i < v.obligations.size(); ++i) {
    obligations.push_back(obligation_json(v.obligations[i], &v.proofs.at(i)));
  }
  Func body = simplified(p.main);
  return Json{{"version", std::string(kFormatVersion)},
              {"program_digest", sha256_hex(pretty(p))},
              {"func_contract", contract_json(p.main)},
              {"sep_tree", to_json(*v.tree)},
              {"obligations", obligations},
              {"translation", to_json(*core::translate_func(body))},
              {"metadata", Json{{"tool_version", std::string(kToolVersion)}, {"timestamp", timestamp}}}};
}

std::string serialize(const Json& cert) { return cert.dump(2) + "\n"; }

CheckReport check(std::string_view source, const Json& cert) {
  // Format and schema.
  try {
    expect_keys(cert, {"version", "program_digest", "func_contract", "sep_tree", "obligations", "translation", "metadata"},
                "certificate");
    const Json& version = field(cert, "version");
    if (!version.is_string() || version.get<std::string>() != kFormatVersion) {
      return reject("format", "version", "unsupported format version");
    }
    const Json& meta = field(cert, "metadata");
    expect_keys(meta, {"tool_version", "timestamp"}, "metadata");
    if (!meta["timestamp"].is_string()) throw FormatError("timestamp must be a string");
    if (!meta["tool_version"].is_string() || meta["tool_version"].get<std::string>() != kToolVersion) {
      return reject("format", "metadata.tool_version", "certificate was produced by another tool version");
    }
    if (!field(cert, "program_digest").is_string()) throw FormatError("program_digest must be a string");
    if (!field(cert, "obligations").is_array()) throw FormatError("obligations must be an array");
    if (!field(cert, "sep_tree").is_array()) throw FormatError("sep_tree must be an array");
  } catch (const FormatError& e) {
    return reject("format", "", e.what());
  }

  Program program;
  try {
    program = parse_program(source);
  } catch (const ParseError& e) {
    return reject("parse", to_string(e.loc()), e.message());
  }

  std::string text = pretty(program);
  if (cert["program_digest"].get<std::string>() != sha256_hex(text)) {
    return reject("digest", "program_digest", "source does not match the certified program");
  }
  if (cert["func_contract"] != contract_json(program.main)) {
    return reject("contract", "func_contract", "contract differs from the source");
  }

  Func body = simplified(program.main);
  SepPtr tree = exec_func(body);
  Json replay = to_json(*tree);
  CheckReport report;
  report.replay_hash = sha256_hex(replay.dump());
  if (replay != cert["sep_tree"]) {
    auto r = reject("replay", "sep_tree", "symbolic execution tree differs from the replay");
    r.replay_hash = report.replay_hash;
    return r;
  }

  std::vector<Obligation> obligations = collect_obligations(*tree);
  const Json& claimed = cert["obligations"];
  if (claimed.size() != obligations.size()) {
    auto r = reject("obligations", "obligations",
                    "expected " + std::to_string(obligations.size()) + " obligations, found " +
                        std::to_string(claimed.size()));
    r.replay_hash = report.replay_hash;
    return r;
  }
  std::vector<solver::Proof> proofs;
  for (std::size_t i = 0; i < obligations.size(); ++i) {
    const Json& entry = claimed[i];
    std::string where = "obligations[" + std::to_string(i) + "]";
    try {
      expect_keys(entry, {"path", "origin", "loc", "hypotheses", "goal", "proof"}, where);
    } catch (const FormatError& e) {
      auto r = reject("obligations", where, e.what());
      r.replay_hash = report.replay_hash;
      return r;
    }
    Json expected = obligation_json(obligations[i], nullptr);
    expected["proof"] = entry["proof"];
    if (expected != entry) {
      auto r = reject("obligations", where, "obligation differs from the replay");
      r.replay_hash = report.replay_hash;
      return r;
    }
    try {
      proofs.push_back(proof_from_json(entry["proof"]));
    } catch (const FormatError& e) {
      auto r = reject("witness", obligations[i].path, e.what());
      r.replay_hash = report.replay_hash;
      return r;
    }
  }

  for (std::size_t i = 0; i < obligations.size(); ++i) {
    auto res = solver::check_proof(obligations[i].hypotheses, obligations[i].goal, proofs[i]);
    if (!res) {
      auto r = reject("witness", obligations[i].path,
                      std::string(solver::to_string(res.reason)) + (res.detail.empty() ? "" : ": " + res.detail));
      r.replay_hash = report.replay_hash;
      r.steps = report.steps;
      return r;
    }
    report.steps += proofs[i].clauses.size();
  }

  if (to_json(*core::translate_func(body)) != cert["translation"]) {
    auto r = reject("translation", "translation", "translation differs from the translation of the source");
    r.replay_hash = report.replay_hash;
    r.steps = report.steps;
    return r;
  }

  report.accepted = true;
  return report;
}

CheckReport check_text(std::string_view source, std::string_view cert_text) {
  Json cert;
  try {
    cert = Json::parse(cert_text);
  } catch (const Json::exception& e) {
    return reject("format", "", std::string("not valid JSON: ") + e.what());
  }
  return check(source, cert);
}

}  // namespace certivex::cert
