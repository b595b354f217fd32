#pragma once

#include <cmath>
#include <map>
#include <string>
#include <type_traits>

#include "dchain/errors.hpp"
#include "dchain/numerics.hpp"

namespace dchain {

// Finite outcome -> probability table.  Entries accumulate; lookups of
// missing outcomes return 0.
template <class Key>
class DistTable {
 public:
  using map_type = std::map<Key, double>;

  void add(const Key& k, double p) { table_[k] += p; }
  double prob(const Key& k) const {
    auto it = table_.find(k);
    return it == table_.end() ? 0.0 : it->second;
  }
  double total() const {
    CompensatedSum s;
    for (const auto& [k, p] : table_) s.add(p);
    return s.value();
  }
  std::size_t size() const { return table_.size(); }
  bool empty() const { return table_.empty(); }
  const map_type& entries() const { return table_; }
  auto begin() const { return table_.begin(); }
  auto end() const { return table_.end(); }

  // Divide every entry by the total mass.
  void normalize() {
    const double t = total();
    if (!(t > 0.0)) throw DomainError("DistTable: cannot normalize zero mass");
    for (auto& [k, p] : table_) p /= t;
  }
  void require_normalized(double tol = 1e-12) const {
    const double t = total();
    if (std::abs(t - 1.0) > tol)
      throw DomainError("DistTable: total mass " + std::to_string(t) + " differs from 1");
  }

  template <class F>
  double expectation(F&& f) const {
    CompensatedSum s;
    for (const auto& [k, p] : table_) s.add(p * f(k));
    return s.value();
  }
  double mean() const
    requires std::is_arithmetic_v<Key>
  {
    return expectation([](Key k) { return static_cast<double>(k); });
  }
  double variance() const
    requires std::is_arithmetic_v<Key>
  {
    const double m = mean();
    return expectation([m](Key k) { return (static_cast<double>(k) - m) * (static_cast<double>(k) - m); });
  }

 private:
  map_type table_;
};

}  // namespace dchain
