#pragma once

#include "json.hpp"
#include "qes/monodromy.hpp"

namespace qes::detail {

inline nlohmann::json complex_pair(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline nlohmann::json step_object(const BraidStep& s) {
  nlohmann::json e = nlohmann::json::array();
  for (const auto& z : s.eigenvalues) e.push_back(complex_pair(z));
  return {{"re_b", s.b.real()}, {"im_b", s.b.imag()}, {"eigenvalues", std::move(e)}};
}

}  // namespace qes::detail
