#pragma once

// Finite de Finetti measures: weighted lists of one-particle wavefunctions.

#include <string>
#include <vector>

#include "hlab/grid.hpp"

namespace hlab {

/// Where the atoms of a mixture live. Sphere: every atom has unit L2 norm.
/// Ball: atoms may have norm below one.
enum class Support { sphere, ball };

struct Atom {
  double weight = 0.0;
  Field phi;
};

class Mixture {
 public:
  Mixture() = default;
  /// Validates weights (nonnegative, summing to 1 within 1e-12) and atom
  /// norms against the support.
  Mixture(std::vector<Atom> atoms, Support support);

  const std::vector<Atom>& atoms() const { return atoms_; }
  Support support() const { return support_; }
  const GridSpec& grid() const;
  std::size_t size() const { return atoms_.size(); }

 private:
  std::vector<Atom> atoms_;
  Support support_ = Support::sphere;
};

/// Mixture persistence: `<path>` holds a JSON manifest, atom i is stored next
/// to it as `<path>.atom<i>.hlab`.
void write_mixture(const std::string& path, const Mixture& mu);
Mixture read_mixture(const std::string& path);

}  // namespace hlab
