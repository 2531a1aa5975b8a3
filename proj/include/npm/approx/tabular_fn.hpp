#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "npm/core/types.hpp"

namespace npm::approx {

/// Lookup table from (state key, action) to a fixed-width real vector.
/// Unseen entries read as zeros.
class TabularFn {
 public:
  explicit TabularFn(int width) : width_(width) {}

  int width() const { return width_; }
  std::vector<double> get(const std::string& state_key, ActionId action) const;
  void set(const std::string& state_key, ActionId action, std::vector<double> value);
  /// Adds `delta` element-wise to the stored vector.
  void add(const std::string& state_key, ActionId action, const std::vector<double>& delta);
  std::size_t size() const { return table_.size(); }

 private:
  static std::string full_key(const std::string& state_key, ActionId action);

  int width_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

}  // namespace npm::approx
