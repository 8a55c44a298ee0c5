#include "hlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fft.hpp"

namespace hlab {

GridSpec::GridSpec(int dim, int n, double length)
    : dim_(dim), n_(n), length_(length), points_(checked_pow(static_cast<std::size_t>(n), dim)) {}

GridSpec GridSpec::make(int dim, int n, double length) {
  if (dim < 1 || dim > 3) throw InvalidArgument("grid dimension must be 1, 2 or 3");
  if (n < 4) throw InvalidArgument("grid needs at least 4 points per axis");
  if (n % 2 != 0) throw InvalidArgument("grid points per axis must be even");
  if (!(length > 0.0) || !std::isfinite(length)) throw InvalidArgument("box length must be positive");
  return GridSpec(dim, n, length);
}

GridSpec make_grid(int dim, int n, double length) { return GridSpec::make(dim, n, length); }

double GridSpec::cell_volume() const { return std::pow(spacing(), dim_); }

double GridSpec::frequency(int index) const { return 2.0 * kPi * wave_number(index) / length_; }

int GridSpec::axis_index(std::size_t point, int axis) const {
  std::size_t p = point;
  for (int a = dim_ - 1; a > axis; --a) p /= static_cast<std::size_t>(n_);
  return static_cast<int>(p % static_cast<std::size_t>(n_));
}

double GridSpec::frequency_sq(std::size_t point) const {
  double s = 0.0;
  for (int a = dim_ - 1; a >= 0; --a) {
    const double f = frequency(static_cast<int>(point % static_cast<std::size_t>(n_)));
    s += f * f;
    point /= static_cast<std::size_t>(n_);
  }
  return s;
}

double GridSpec::coordinate(std::size_t point, int axis) const {
  return axis_index(point, axis) * spacing();
}

double GridSpec::centered_coordinate(std::size_t point, int axis) const {
  const int i = axis_index(point, axis);
  return (i < n_ / 2 ? i : i - n_) * spacing();
}

std::size_t GridSpec::difference_index(std::size_t a, std::size_t b) const {
  std::size_t out = 0;
  std::size_t scale = 1;
  const auto nn = static_cast<std::size_t>(n_);
  for (int ax = 0; ax < dim_; ++ax) {
    const std::size_t ia = a % nn;
    const std::size_t ib = b % nn;
    out += ((ia + nn - ib) % nn) * scale;
    scale *= nn;
    a /= nn;
    b /= nn;
  }
  return out;
}

std::size_t GridSpec::sum_index(std::size_t a, std::size_t b) const {
  std::size_t out = 0;
  std::size_t scale = 1;
  const auto nn = static_cast<std::size_t>(n_);
  for (int ax = 0; ax < dim_; ++ax) {
    out += ((a % nn + b % nn) % nn) * scale;
    scale *= nn;
    a /= nn;
    b /= nn;
  }
  return out;
}

std::size_t field_size(const GridSpec& grid, int rank, const char* what) {
  if (rank < 0) throw InvalidArgument("field rank must be nonnegative");
  const std::size_t size = checked_pow(grid.points(), static_cast<std::size_t>(rank));
  Budget::current().check_elements(size, what);
  return size;
}

Field::Field(const GridSpec& grid, int rank)
    : grid_(grid), rank_(rank), data_(field_size(grid, rank)) {}

Field::Field(const GridSpec& grid, int rank, std::vector<cplx> data)
    : grid_(grid), rank_(rank), data_(std::move(data)) {
  if (data_.size() != checked_pow(grid.points(), static_cast<std::size_t>(rank))) {
    throw InvalidArgument("field data length does not match (n^d)^rank");
  }
}

std::size_t Field::slot_stride(int s) const {
  return checked_pow(grid_.points(), static_cast<std::size_t>(rank_ - 1 - s));
}

std::size_t Field::slot_point(std::size_t i, int s) const {
  return (i / slot_stride(s)) % grid_.points();
}

void Field::require_compatible(const Field& other) const {
  if (!(grid_ == other.grid_) || rank_ != other.rank_) {
    throw InvalidArgument("fields live on different grids or ranks");
  }
}

Field& Field::operator+=(const Field& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Field& Field::operator*=(cplx scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

namespace {

std::vector<int> slot_axes(const Field& f, std::span<const int> slots) {
  std::vector<int> axes;
  const int d = f.grid().dim();
  for (int s : slots) {
    if (s < 0 || s >= f.rank()) throw InvalidArgument("slot index out of range");
    for (int a = 0; a < d; ++a) axes.push_back(s * d + a);
  }
  std::sort(axes.begin(), axes.end());
  return axes;
}

std::vector<int> all_slots(int rank) {
  std::vector<int> s(rank);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

void transform_slots(Field& f, std::span<const int> slots, int sign) {
  const auto axes = slot_axes(f, slots);
  detail::fft_axes(f.data(), f.rank() * f.grid().dim(), f.grid().n(), axes, sign);
}

}  // namespace

Field dft_forward(const Field& f) {
  Field out = f;
  const auto slots = all_slots(f.rank());
  transform_slots(out, slots, -1);
  out *= std::pow(f.grid().cell_volume(), f.rank());
  return out;
}

Field dft_inverse(const Field& f) {
  Field out = f;
  const auto slots = all_slots(f.rank());
  transform_slots(out, slots, +1);
  out *= std::pow(std::pow(f.grid().length(), f.grid().dim()), -f.rank());
  return out;
}

void apply_slot_multipliers(Field& f, std::span<const std::vector<cplx>* const> symbols) {
  if (static_cast<int>(symbols.size()) != f.rank()) {
    throw InvalidArgument("one multiplier table per slot is required");
  }
  std::vector<int> slots;
  for (int s = 0; s < f.rank(); ++s) {
    if (symbols[s] == nullptr) continue;
    if (symbols[s]->size() != f.grid().points()) throw InvalidArgument("multiplier table size");
    slots.push_back(s);
  }
  if (slots.empty()) return;
  transform_slots(f, slots, -1);
  const double norm = 1.0 / std::pow(static_cast<double>(f.grid().points()), slots.size());
  std::vector<std::size_t> strides;
  for (int s : slots) strides.push_back(f.slot_stride(s));
  const std::size_t P = f.grid().points();
  auto data = f.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    cplx m = norm;
    for (std::size_t q = 0; q < slots.size(); ++q) m *= (*symbols[slots[q]])[(i / strides[q]) % P];
    data[i] *= m;
  }
  transform_slots(f, slots, +1);
}

void apply_quadratic_multiplier(Field& f, std::span<const int> slot_signs,
                                const std::function<cplx(double)>& map) {
  if (static_cast<int>(slot_signs.size()) != f.rank()) {
    throw InvalidArgument("one sign per slot is required");
  }
  std::vector<int> slots;
  for (int s = 0; s < f.rank(); ++s) {
    if (slot_signs[s] != 0) slots.push_back(s);
  }
  if (slots.empty()) {
    f *= map(0.0);
    return;
  }
  const GridSpec& g = f.grid();
  const std::size_t P = g.points();
  // |xi|^2 = (2 pi / L)^2 * integer, so the symbol is tabulated per integer.
  std::vector<long> msq(P);
  long max_msq = 0;
  for (std::size_t p = 0; p < P; ++p) {
    long s = 0;
    for (int a = 0; a < g.dim(); ++a) {
      const long m = g.wave_number(g.axis_index(p, a));
      s += m * m;
    }
    msq[p] = s;
    max_msq = std::max(max_msq, s);
  }
  const long offset = max_msq * static_cast<long>(slots.size());
  const double unit = std::pow(2.0 * kPi / g.length(), 2);
  const double norm = 1.0 / std::pow(static_cast<double>(P), slots.size());
  std::vector<cplx> table(2 * offset + 1);
  for (long w = -offset; w <= offset; ++w) table[w + offset] = norm * map(unit * w);

  transform_slots(f, slots, -1);
  cplx* data = f.data().data();
  const int rank = f.rank();
  std::vector<std::size_t> strides(rank);
  for (int s = 0; s < rank; ++s) strides[s] = f.slot_stride(s);
  // Slots without a sign carry zero weight but are still traversed.
  std::function<void(int, std::size_t, long)> walk = [&](int s, std::size_t base, long acc) {
    const int sign = slot_signs[s];
    if (s == rank - 1) {
      for (std::size_t p = 0; p < P; ++p) data[base + p] *= table[acc + sign * msq[p] + offset];
      return;
    }
    for (std::size_t p = 0; p < P; ++p) walk(s + 1, base + p * strides[s], acc + sign * msq[p]);
  };
  walk(0, 0, 0);
  transform_slots(f, slots, +1);
}

Field bessel_multiply(const Field& f, double alpha, std::span<const int> slots) {
  if (alpha < 0.0) throw InvalidArgument("Bessel exponent must be nonnegative");
  Field out = f;
  if (alpha == 0.0 || slots.empty()) return out;
  std::vector<cplx> table(f.grid().points());
  for (std::size_t p = 0; p < table.size(); ++p) {
    table[p] = std::pow(1.0 + f.grid().frequency_sq(p), alpha / 2.0);
  }
  std::vector<const std::vector<cplx>*> symbols(f.rank(), nullptr);
  for (int s : slots) {
    if (s < 0 || s >= f.rank()) throw InvalidArgument("slot index out of range");
    symbols[s] = &table;
  }
  apply_slot_multipliers(out, symbols);
  return out;
}

Field bessel_multiply(const Field& f, double alpha) {
  const auto slots = all_slots(f.rank());
  return bessel_multiply(f, alpha, slots);
}

Field free_propagate(const Field& f, double t, std::span<const int> signs) {
  Field out = f;
  if (t == 0.0) return out;
  apply_quadratic_multiplier(out, signs, [t](double w) { return std::exp(cplx(0.0, -t * w)); });
  return out;
}

double l2_norm(const Field& f) {
  double s = 0.0;
  for (const auto& v : f.data()) s += std::norm(v);
  return std::sqrt(s * std::pow(f.grid().cell_volume(), f.rank()));
}

cplx inner(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid()) || a.rank() != b.rank()) throw InvalidArgument("inner: shape mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * std::pow(a.grid().cell_volume(), a.rank());
}

double sobolev_norm(const Field& f, double alpha) {
  if (alpha < 0.0) throw InvalidArgument("Bessel exponent must be nonnegative");
  if (alpha == 0.0 || f.rank() == 0) return l2_norm(f);
  // Parseval on the unnormalized spectrum: h^{dr} sum |f|^2 = n^{-dr} h^{dr} sum |F|^2.
  Field spec = f;
  const auto slots = all_slots(f.rank());
  transform_slots(spec, slots, -1);
  const std::size_t P = f.grid().points();
  std::vector<double> weight(P);
  for (std::size_t p = 0; p < P; ++p) weight[p] = std::pow(1.0 + f.grid().frequency_sq(p), alpha);
  const cplx* data = spec.data().data();
  const int rank = f.rank();
  std::vector<std::size_t> strides(rank);
  for (int s = 0; s < rank; ++s) strides[s] = f.slot_stride(s);
  std::function<double(int, std::size_t)> walk = [&](int s, std::size_t base) {
    double acc = 0.0;
    if (s == rank - 1) {
      for (std::size_t p = 0; p < P; ++p) acc += weight[p] * std::norm(data[base + p]);
      return acc;
    }
    for (std::size_t p = 0; p < P; ++p) acc += weight[p] * walk(s + 1, base + p * strides[s]);
    return acc;
  };
  const double scale = std::pow(f.grid().cell_volume() / static_cast<double>(P), rank);
  return std::sqrt(walk(0, 0) * scale);
}

double max_abs_diff(const Field& a, const Field& b) {
  if (a.size() != b.size()) throw InvalidArgument("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace hlab
