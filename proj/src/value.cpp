#include "scjc/value.hpp"

#include <sstream>

namespace scjc {

std::string to_string(Sort s) {
  switch (s) {
    case Sort::Nat: return "nat";
    case Sort::Bool: return "bool";
    case Sort::Id: return "ID";
    case Sort::Seq: return "seq";
    case Sort::Unit: return "unit";
  }
  return "?";
}

Value Value::of_nat(std::int64_t n) {
  Value v;
  v.kind = Kind::Nat;
  v.nat = n;
  return v;
}

Value Value::of_bool(bool b) {
  Value v;
  v.kind = Kind::Bool;
  v.boolean = b;
  return v;
}

Value Value::null() {
  Value v;
  v.kind = Kind::Null;
  return v;
}

Value Value::of_id(std::string name) {
  Value v;
  v.kind = Kind::Id;
  v.id = std::move(name);
  return v;
}

Value Value::of_seq(std::vector<std::int64_t> items) {
  Value v;
  v.kind = Kind::Seq;
  v.seq = std::move(items);
  return v;
}

Value Value::default_for(Sort s) {
  switch (s) {
    case Sort::Nat: return of_nat(0);
    case Sort::Bool: return of_bool(false);
    case Sort::Id: return null();
    case Sort::Seq: return of_seq({});
    case Sort::Unit: return of_nat(0);
  }
  return of_nat(0);
}

std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Nat: return std::to_string(v.nat);
    case Value::Kind::Bool: return v.boolean ? "true" : "false";
    case Value::Kind::Null: return "null";
    case Value::Kind::Id: return v.id;
    case Value::Kind::Seq: {
      std::ostringstream os;
      os << '<';
      for (std::size_t i = 0; i < v.seq.size(); ++i) {
        if (i) os << ',';
        os << v.seq[i];
      }
      os << '>';
      return os.str();
    }
  }
  return "?";
}

}  // namespace scjc
