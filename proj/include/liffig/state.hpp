#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liffig/ast.hpp"
#include "liffig/errors.hpp"

namespace liffig {

/// Total map from declared variables to values: scalars and fixed-length arrays.
class State {
 public:
  State() = default;

  /// The initial state of `program`: declaration initializers, else zero.
  static State initial(const Program& program) {
    State s;
    for (const auto& d : program.decls) {
      if (d.is_array()) {
        s.add_array(d.name, *d.array_size, d.init.value_or(0));
      } else {
        s.set_scalar(d.name, d.init.value_or(0));
      }
    }
    return s;
  }

  void set_scalar(const std::string& name, std::int64_t value) { scalars_[name] = value; }
  void add_array(const std::string& name, std::size_t size, std::int64_t fill = 0) {
    arrays_[name] = std::vector<std::int64_t>(size, fill);
  }
  void set_array(const std::string& name, std::vector<std::int64_t> values) {
    arrays_[name] = std::move(values);
  }

  bool has_scalar(std::string_view name) const { return scalars_.find(name) != scalars_.end(); }
  bool has_array(std::string_view name) const { return arrays_.find(name) != arrays_.end(); }

  std::int64_t scalar(std::string_view name) const {
    auto it = scalars_.find(name);
    if (it == scalars_.end()) {
      throw FaultError(FaultKind::undefined_variable, std::string(name));
    }
    return it->second;
  }
  std::int64_t& scalar_ref(std::string_view name) {
    auto it = scalars_.find(name);
    if (it == scalars_.end()) {
      throw FaultError(FaultKind::undefined_variable, std::string(name));
    }
    return it->second;
  }

  std::span<const std::int64_t> array(std::string_view name) const {
    auto it = arrays_.find(name);
    if (it == arrays_.end()) {
      throw FaultError(FaultKind::undefined_variable, std::string(name));
    }
    return it->second;
  }
  std::span<std::int64_t> array_ref(std::string_view name) {
    auto it = arrays_.find(name);
    if (it == arrays_.end()) {
      throw FaultError(FaultKind::undefined_variable, std::string(name));
    }
    return it->second;
  }

  const std::map<std::string, std::int64_t, std::less<>>& scalars() const { return scalars_; }
  const std::map<std::string, std::vector<std::int64_t>, std::less<>>& arrays() const {
    return arrays_;
  }

  /// `a=1,b=2,p=[2,3,5]`, names in lexicographic order, scalars before arrays.
  std::string to_string() const {
    std::string out;
    auto sep = [&] {
      if (!out.empty()) out += ',';
    };
    for (const auto& [name, v] : scalars_) {
      sep();
      out += name + "=" + std::to_string(v);
    }
    for (const auto& [name, vs] : arrays_) {
      sep();
      out += name + "=[";
      for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(vs[i]);
      }
      out += ']';
    }
    return out;
  }

  bool operator==(const State&) const = default;

 private:
  std::map<std::string, std::int64_t, std::less<>> scalars_;
  std::map<std::string, std::vector<std::int64_t>, std::less<>> arrays_;
};

}  // namespace liffig
