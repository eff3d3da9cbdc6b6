#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace scjc {

/// Payload sorts carried by channels and typed variables.
enum class Sort { Nat, Bool, Id, Seq, Unit };

std::string to_string(Sort s);

/// Runtime value of the expression language. `Null` is adjoined to the ID
/// sort; sequences hold naturals only.
struct Value {
  enum class Kind { Nat, Bool, Null, Id, Seq };

  Kind kind = Kind::Nat;
  std::int64_t nat = 0;
  bool boolean = false;
  std::string id;
  std::vector<std::int64_t> seq;

  static Value of_nat(std::int64_t n);
  static Value of_bool(bool b);
  static Value null();
  static Value of_id(std::string name);
  static Value of_seq(std::vector<std::int64_t> items);

  /// Default value used to initialise a freshly declared variable.
  static Value default_for(Sort s);

  auto operator<=>(const Value&) const = default;
  bool operator==(const Value&) const = default;
};

std::string to_string(const Value& v);

}  // namespace scjc
