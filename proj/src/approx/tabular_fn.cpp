#include "npm/approx/tabular_fn.hpp"

#include <stdexcept>

namespace npm::approx {

std::string TabularFn::full_key(const std::string& state_key, ActionId action) {
  return state_key + '#' + std::to_string(action);
}

std::vector<double> TabularFn::get(const std::string& state_key, ActionId action) const {
  const auto it = table_.find(full_key(state_key, action));
  return it == table_.end() ? std::vector<double>(width_, 0.0) : it->second;
}

void TabularFn::set(const std::string& state_key, ActionId action, std::vector<double> value) {
  if (static_cast<int>(value.size()) != width_) throw std::invalid_argument("tabular value width mismatch");
  table_[full_key(state_key, action)] = std::move(value);
}

void TabularFn::add(const std::string& state_key, ActionId action, const std::vector<double>& delta) {
  if (static_cast<int>(delta.size()) != width_) throw std::invalid_argument("tabular value width mismatch");
  auto [it, inserted] = table_.try_emplace(full_key(state_key, action), width_, 0.0);
  for (int i = 0; i < width_; ++i) it->second[i] += delta[i];
}

}  // namespace npm::approx
