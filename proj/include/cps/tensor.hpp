#pragma once

#include <string>
#include <vector>

#include "cps/scalar.hpp"

namespace cps {

// Dense tensor of exact scalars.  Every slot ranges over the same index set
// [0, dim).  The variance string has one character per slot: 'd' for a lower
// (covariant) index, 'u' for an upper (contravariant) index.  Tensors whose
// natural index range is a subset (e.g. contact-hyperplane indices 1..dim-1)
// are stored over the full range with vanishing out-of-range components, so
// contractions never need per-slot bounds.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, std::string variance);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(variance_.size()); }
  const std::string& variance() const { return variance_; }

  const Scalar& at(const std::vector<int>& idx) const { return comp_[offset(idx)]; }
  Scalar& at(const std::vector<int>& idx) { return comp_[offset(idx)]; }
  void set(const std::vector<int>& idx, Scalar v) { comp_[offset(idx)] = std::move(v); }

  bool is_zero() const;
  int max_degree() const;  // max over components, -1 when identically zero

  Tensor operator-() const;
  Tensor scaled(const Scalar& s) const;
  friend Tensor operator+(const Tensor& a, const Tensor& b);
  friend Tensor operator-(const Tensor& a, const Tensor& b);
  bool operator==(const Tensor& o) const;
  bool operator!=(const Tensor& o) const { return !(*this == o); }

  // Odometer over all index tuples: idx must start as {0,...,0}; returns false
  // after the last tuple.
  bool next_index(std::vector<int>& idx) const;

 private:
  std::size_t offset(const std::vector<int>& idx) const;
  int dim_ = 0;
  std::string variance_;
  std::vector<Scalar> comp_;
};

// Outer product; variance strings concatenate.
Tensor tensor_product(const Tensor& a, const Tensor& b);

// Natural pairing contraction over one upper and one lower slot.
Tensor contract(const Tensor& t, int slot_a, int slot_b);

// (Anti)symmetrization over the given slots (which must share variance),
// including the 1/k! normalization.
Tensor sym_slots(const Tensor& t, const std::vector<int>& slots);
Tensor alt_slots(const Tensor& t, const std::vector<int>& slots);

// Move one index with a 2-form.  Raising uses X^t = ω^{tk} X_k (new index
// first on omega_up); lowering uses X_p = X^q ω_{qp} (summed index first on
// omega_lo).  With ω^{kl}ω_{lj} = −δ_j^k these two maps are mutually inverse.
Tensor raise_slot(const Tensor& t, int slot, const Tensor& omega_up);
Tensor lower_slot(const Tensor& t, int slot, const Tensor& omega_lo);

// Reorder slots: perm[new_slot] = old_slot.
Tensor transpose_slots(const Tensor& t, const std::vector<int>& perm);

// δ^α_β with variance "ud".
Tensor kronecker(int dim);

}  // namespace cps
