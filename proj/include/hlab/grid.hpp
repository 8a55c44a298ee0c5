#pragma once

// Periodic torus discretization and the spectral toolkit built on it.
//
// Conventions used everywhere in the library:
//   * the torus is [0, L)^d sampled at n points per axis, spacing h = L / n;
//   * an integral over one particle variable is h^d times a grid sum;
//   * the forward transform is  fhat(xi) = h^d sum_x f(x) exp(-i xi.x)  and
//     the inverse is  f(x) = L^-d sum_xi fhat(xi) exp(i xi.x),  so Parseval
//     reads  h^d sum |f|^2 = L^-d sum |fhat|^2;
//   * frequencies are angular, xi = 2 pi m / L with m in [-n/2, n/2) laid out
//     in standard DFT order.

#include <cstddef>
#include <functional>
#include <string>
#include <span>
#include <vector>

#include "hlab/common.hpp"

namespace hlab {

class GridSpec {
 public:
  /// Validating constructor. Throws InvalidArgument for odd n, n < 4,
  /// nonpositive L or a dimension outside {1, 2, 3}.
  static GridSpec make(int dim, int n, double length);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / n_; }
  /// h^d, the quadrature weight of one particle variable.
  double cell_volume() const;
  /// Number of grid points of one particle, n^d.
  std::size_t points() const { return points_; }

  /// Signed wave number m for a DFT-ordered index along one axis.
  int wave_number(int index) const { return index < n_ / 2 ? index : index - n_; }
  /// Angular frequency 2 pi m / L for a DFT-ordered index along one axis.
  double frequency(int index) const;
  /// |xi|^2 of the multi-index `point` in [0, n^d).
  double frequency_sq(std::size_t point) const;
  /// Coordinate of `point` along `axis`, in [0, L).
  double coordinate(std::size_t point, int axis) const;
  /// Coordinate folded into [-L/2, L/2).
  double centered_coordinate(std::size_t point, int axis) const;
  /// Index along `axis` of the multi-index `point`.
  int axis_index(std::size_t point, int axis) const;
  /// Grid point of x_a - x_b (mod L), also the frequency index of m_a - m_b.
  std::size_t difference_index(std::size_t a, std::size_t b) const;
  /// Grid point of x_a + x_b (mod L), also the frequency index of m_a + m_b.
  std::size_t sum_index(std::size_t a, std::size_t b) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  GridSpec(int dim, int n, double length);

  int dim_ = 1;
  int n_ = 4;
  double length_ = 2 * kPi;
  std::size_t points_ = 4;
};

/// Complex field over `rank` particle slots, each a copy of the grid.
/// Storage is row-major by slot (slot 1 slowest), and row-major over axes
/// within each slot.
class Field {
 public:
  Field() = default;
  /// Zero field; checks the element count against the budget.
  Field(const GridSpec& grid, int rank);
  Field(const GridSpec& grid, int rank, std::vector<cplx> data);

  const GridSpec& grid() const { return grid_; }
  int rank() const { return rank_; }
  std::size_t size() const { return data_.size(); }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }
  std::vector<cplx>& values() { return data_; }
  const std::vector<cplx>& values() const { return data_; }

  cplx& operator[](std::size_t i) { return data_[i]; }
  const cplx& operator[](std::size_t i) const { return data_[i]; }

  /// Stride of slot `s` (0-based) in the flat index.
  std::size_t slot_stride(int s) const;
  /// Grid point occupied by slot `s` at flat index `i`.
  std::size_t slot_point(std::size_t i, int s) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(cplx scale);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(cplx s, Field a) { return a *= s; }

 private:
  void require_compatible(const Field& other) const;

  GridSpec grid_ = GridSpec::make(1, 4, 2 * kPi);
  int rank_ = 0;
  std::vector<cplx> data_;
};

/// Number of entries of a rank-`rank` field, checked against the budget.
std::size_t field_size(const GridSpec& grid, int rank, const char* what = "field");

GridSpec make_grid(int dim, int n, double length);

/// Transforms every slot with the continuum-normalized DFT.
Field dft_forward(const Field& f);
Field dft_inverse(const Field& f);

/// Multiplies the spectrum of each slot in `slots` (0-based) by
/// (1 + |xi|^2)^(alpha / 2).
Field bessel_multiply(const Field& f, double alpha, std::span<const int> slots);
/// Same, on every slot.
Field bessel_multiply(const Field& f, double alpha);

/// Multiplies the spectrum of slot s by exp(-i signs[s] t |xi|^2), i.e.
/// applies exp(i signs[s] t Delta) to slot s. Slots with sign 0 are left alone.
Field free_propagate(const Field& f, double t, std::span<const int> signs);

/// Product-form spectral multiplier, in place: the spectrum of slot s is
/// multiplied by symbols[s][frequency point]. Slots whose entry is null are
/// left untransformed.
void apply_slot_multipliers(Field& f, std::span<const std::vector<cplx>* const> symbols);

/// Additive-form spectral multiplier, in place: the joint spectrum is
/// multiplied by map(sum_s slot_signs[s] |xi_s|^2). Slots with sign 0 are left
/// untransformed. Covers free flows, kinetic operators and commutators.
void apply_quadratic_multiplier(Field& f, std::span<const int> slot_signs,
                                const std::function<cplx(double)>& map);

/// Quadrature L2 norm: sqrt(h^{d r} sum |f|^2).
double l2_norm(const Field& f);
/// Quadrature inner product <a, b> = h^{d r} sum conj(a) b.
cplx inner(const Field& a, const Field& b);
/// ||<grad>^alpha f||_{L2} over all slots.
double sobolev_norm(const Field& f, double alpha);
/// Max absolute entrywise difference.
double max_abs_diff(const Field& a, const Field& b);

/// Field binary persistence. `split` records how many leading slots are
/// unprimed (0 for a plain field).
void write_field(const std::string& path, const Field& f, int split = 0);
Field read_field(const std::string& path, int* split = nullptr);

}  // namespace hlab
