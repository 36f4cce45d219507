#pragma once

#include <string>

namespace pwlmbqi {

// Int, Bool, or a user-declared uninterpreted sort. After sort relaxation
// only Int and Bool occur.
class Sort {
 public:
  enum class Kind { Int, Bool, Uninterpreted };

  static Sort integer() { return Sort(Kind::Int, ""); }
  static Sort boolean() { return Sort(Kind::Bool, ""); }
  static Sort uninterpreted(std::string name) { return Sort(Kind::Uninterpreted, std::move(name)); }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool is_int() const { return kind_ == Kind::Int; }
  bool is_bool() const { return kind_ == Kind::Bool; }
  bool is_uninterpreted() const { return kind_ == Kind::Uninterpreted; }

  friend bool operator==(const Sort& a, const Sort& b) {
    return a.kind_ == b.kind_ && a.name_ == b.name_;
  }
  friend bool operator!=(const Sort& a, const Sort& b) { return !(a == b); }
  friend bool operator<(const Sort& a, const Sort& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    return a.name_ < b.name_;
  }

  std::string str() const {
    switch (kind_) {
      case Kind::Int: return "Int";
      case Kind::Bool: return "Bool";
      default: return name_;
    }
  }

 private:
  Sort(Kind k, std::string n) : kind_(k), name_(std::move(n)) {}
  Kind kind_;
  std::string name_;
};

}  // namespace pwlmbqi
