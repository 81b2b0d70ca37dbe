#pragma once

#include <algorithm>
#include <string_view>

#include "nonmono/error.hpp"

namespace nonmono {

enum class OperatorFamily { zadeh, product, lukasiewicz };

/// A t-norm / t-conorm pair.
struct FuzzyOperatorSet {
  OperatorFamily id = OperatorFamily::zadeh;

  double t_norm(double x, double y) const {
    switch (id) {
    case OperatorFamily::zadeh: return std::min(x, y);
    case OperatorFamily::product: return x * y;
    default: return std::max(x + y - 1.0, 0.0);
    }
  }
  double t_conorm(double x, double y) const {
    switch (id) {
    case OperatorFamily::zadeh: return std::max(x, y);
    case OperatorFamily::product: return x + y - x * y;
    default: return std::min(x + y, 1.0);
    }
  }

  std::string_view name() const {
    switch (id) {
    case OperatorFamily::zadeh: return "Zadeh";
    case OperatorFamily::product: return "Product";
    default: return "Lukasiewicz";
    }
  }
};

inline constexpr FuzzyOperatorSet zadeh{OperatorFamily::zadeh};
inline constexpr FuzzyOperatorSet product{OperatorFamily::product};
inline constexpr FuzzyOperatorSet lukasiewicz{OperatorFamily::lukasiewicz};

inline FuzzyOperatorSet operator_set(std::string_view name) {
  if (name == "Zadeh" || name == "zadeh") return zadeh;
  if (name == "Product" || name == "product") return product;
  if (name == "Lukasiewicz" || name == "lukasiewicz") return lukasiewicz;
  throw Error("unknown operator set '" + std::string(name) + "'");
}

} // namespace nonmono
