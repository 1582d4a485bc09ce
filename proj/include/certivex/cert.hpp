#pragma once

// Certificates: the recorded verification run in JSON, and the checker that
// replays it.

#include <cstddef>
#include <string>
#include <string_view>

#include <json.hpp>

#include "certivex/corec.hpp"
#include "certivex/solver.hpp"
#include "certivex/symexec.hpp"
#include "certivex/syntax.hpp"

namespace certivex::cert {

inline constexpr std::string_view kFormatVersion = "certivex-cert/1";
inline constexpr std::string_view kToolVersion = "certivex 0.1.0";

using Json = nlohmann::json;

std::string sha256_hex(std::string_view data);

/// Integers as JSON numbers when they fit in 64 bits, else decimal strings.
Json to_json(const BigInt& v);
Json to_json(const solver::Witness& w);
Json to_json(const solver::Proof& p);
Json to_json(const SepNode& t);
Json to_json(const core::Expr& e);
Json to_json(const core::Stmt& s);

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Strict inverses; throw FormatError on anything they would not emit.
BigInt big_from_json(const Json& j);
solver::WitnessPtr witness_from_json(const Json& j);
solver::Proof proof_from_json(const Json& j);

/// Current UTC time, ISO 8601.
std::string now_timestamp();

Json emit(const Program& p, const Verified& v, const std::string& timestamp = now_timestamp());

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string serialize(const Json& cert);

struct CheckReport {
  bool accepted = false;
  /// format, parse, digest, contract, replay, obligations, witness,
  /// translation; empty when accepted.
  std::string phase;
  std::string location;
  std::string reason;
  std::size_t steps = 0;
  std::string replay_hash;
};

CheckReport check(std::string_view source, const Json& cert);
/// Parses `cert_text` first; malformed JSON fails the format phase.
CheckReport check_text(std::string_view source, std::string_view cert_text);

}  // namespace certivex::cert
