#include "cps/tensor.hpp"

#include <algorithm>

namespace cps {

Tensor::Tensor(int dim, std::string variance) : dim_(dim), variance_(std::move(variance)) {
  if (dim <= 0) throw DomainError("tensor dimension must be positive");
  for (char c : variance_)
    if (c != 'd' && c != 'u') throw DomainError("tensor variance must be 'd'/'u' per slot");
  std::size_t size = 1;
  for (std::size_t s = 0; s < variance_.size(); ++s) size *= static_cast<std::size_t>(dim_);
  comp_.assign(size, Scalar::zero());
}

std::size_t Tensor::offset(const std::vector<int>& idx) const {
  if (static_cast<int>(idx.size()) != rank())
    throw DomainError("tensor index tuple has wrong length");
  std::size_t off = 0;
  for (int s = 0; s < rank(); ++s) {
    if (idx[s] < 0 || idx[s] >= dim_) throw DomainError("tensor index out of range");
    off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx[s]);
  }
  return off;
}

bool Tensor::is_zero() const {
  for (const Scalar& c : comp_)
    if (!c.is_zero()) return false;
  return true;
}

int Tensor::max_degree() const {
  int d = -1;
  for (const Scalar& c : comp_) d = std::max(d, c.max_degree());
  return d;
}

Tensor Tensor::operator-() const {
  Tensor r = *this;
  for (Scalar& c : r.comp_) c = -c;
  return r;
}

Tensor Tensor::scaled(const Scalar& s) const {
  Tensor r = *this;
  for (Scalar& c : r.comp_) c = c * s;
  return r;
}

Tensor operator+(const Tensor& a, const Tensor& b) {
  if (a.dim_ != b.dim_ || a.variance_ != b.variance_)
    throw DomainError("tensor addition shape mismatch");
  Tensor r = a;
  for (std::size_t i = 0; i < r.comp_.size(); ++i) r.comp_[i] = r.comp_[i] + b.comp_[i];
  return r;
}

Tensor operator-(const Tensor& a, const Tensor& b) { return a + (-b); }

bool Tensor::operator==(const Tensor& o) const {
  if (dim_ != o.dim_ || variance_ != o.variance_) return false;
  for (std::size_t i = 0; i < comp_.size(); ++i)
    if (comp_[i] != o.comp_[i]) return false;
  return true;
}

bool Tensor::next_index(std::vector<int>& idx) const {
  for (int s = rank() - 1; s >= 0; --s) {
    if (++idx[s] < dim_) return true;
    idx[s] = 0;
  }
  return false;
}

Tensor tensor_product(const Tensor& a, const Tensor& b) {
  if (a.dim() != b.dim()) throw DomainError("tensor product dimension mismatch");
  Tensor r(a.dim(), a.variance() + b.variance());
  std::vector<int> ia(a.rank(), 0);
  do {
    const Scalar& ca = a.at(ia);
    if (ca.is_zero()) continue;
    std::vector<int> ib(b.rank(), 0);
    do {
      const Scalar& cb = b.at(ib);
      if (cb.is_zero()) continue;
      std::vector<int> ir = ia;
      ir.insert(ir.end(), ib.begin(), ib.end());
      r.set(ir, ca * cb);
    } while (b.next_index(ib));
  } while (a.next_index(ia));
  return r;
}

Tensor contract(const Tensor& t, int slot_a, int slot_b) {
  if (slot_a == slot_b || slot_a < 0 || slot_b < 0 || slot_a >= t.rank() || slot_b >= t.rank())
    throw DomainError("contract: invalid slots");
  char va = t.variance()[slot_a], vb = t.variance()[slot_b];
  if (va == vb) throw DomainError("contract: slots must pair one upper and one lower index");
  int lo = std::min(slot_a, slot_b), hi = std::max(slot_a, slot_b);
  std::string var;
  for (int s = 0; s < t.rank(); ++s)
    if (s != lo && s != hi) var += t.variance()[s];
  Tensor r(t.dim(), var);
  std::vector<int> ir(r.rank(), 0);
  std::vector<int> it(t.rank(), 0);
  do {
    for (int s = 0, k = 0; s < t.rank(); ++s)
      if (s != lo && s != hi) it[s] = ir[k++];
    Scalar sum = Scalar::zero();
    for (int q = 0; q < t.dim(); ++q) {
      it[lo] = q;
      it[hi] = q;
      sum = sum + t.at(it);
    }
    r.set(ir, sum);
  } while (r.rank() > 0 && r.next_index(ir));
  return r;
}

namespace {

Tensor symmetrize_impl(const Tensor& t, const std::vector<int>& slots, bool alternate) {
  if (slots.size() < 2) return t;
  char v = t.variance()[slots[0]];
  for (int s : slots) {
    if (s < 0 || s >= t.rank()) throw DomainError("symmetrize: slot out of range");
    if (t.variance()[s] != v)
      throw DomainError("symmetrize: slots must share variance");
  }
  std::vector<int> order(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) order[i] = static_cast<int>(i);

  Tensor acc(t.dim(), t.variance());
  long count = 0;
  do {
    int sign = 1;
    if (alternate) {
      for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j)
          if (order[i] > order[j]) sign = -sign;
    }
    // Build the permuted tensor: slot slots[i] reads from slot slots[order[i]].
    std::vector<int> perm(t.rank());
    for (int s = 0; s < t.rank(); ++s) perm[s] = s;
    for (std::size_t i = 0; i < slots.size(); ++i) perm[slots[i]] = slots[order[i]];
    Tensor p = transpose_slots(t, perm);
    acc = alternate && sign < 0 ? acc - p : acc + p;
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  return acc.scaled(Scalar::rational(1, count));
}

}  // namespace

Tensor sym_slots(const Tensor& t, const std::vector<int>& slots) {
  return symmetrize_impl(t, slots, false);
}

Tensor alt_slots(const Tensor& t, const std::vector<int>& slots) {
  return symmetrize_impl(t, slots, true);
}

Tensor transpose_slots(const Tensor& t, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != t.rank())
    throw DomainError("transpose: permutation length mismatch");
  std::string var;
  for (int s = 0; s < t.rank(); ++s) var += t.variance()[perm[s]];
  Tensor r(t.dim(), var);
  std::vector<int> ir(t.rank(), 0);
  std::vector<int> it(t.rank(), 0);
  do {
    for (int s = 0; s < t.rank(); ++s) it[perm[s]] = ir[s];
    r.set(ir, t.at(it));
  } while (r.next_index(ir));
  return r;
}

Tensor raise_slot(const Tensor& t, int slot, const Tensor& omega_up) {
  if (slot < 0 || slot >= t.rank() || t.variance()[slot] != 'd')
    throw DomainError("raise: slot must be a lower index");
  if (omega_up.rank() != 2 || omega_up.dim() != t.dim())
    throw DomainError("raise: pairing form shape mismatch");
  std::string var = t.variance();
  var[slot] = 'u';
  Tensor r(t.dim(), var);
  std::vector<int> ir(t.rank(), 0);
  do {
    std::vector<int> it = ir;
    Scalar sum = Scalar::zero();
    for (int k = 0; k < t.dim(); ++k) {
      const Scalar& w = omega_up.at({ir[slot], k});
      if (w.is_zero()) continue;
      it[slot] = k;
      sum = sum + w * t.at(it);
    }
    r.set(ir, sum);
  } while (r.next_index(ir));
  return r;
}

Tensor lower_slot(const Tensor& t, int slot, const Tensor& omega_lo) {
  if (slot < 0 || slot >= t.rank() || t.variance()[slot] != 'u')
    throw DomainError("lower: slot must be an upper index");
  if (omega_lo.rank() != 2 || omega_lo.dim() != t.dim())
    throw DomainError("lower: pairing form shape mismatch");
  std::string var = t.variance();
  var[slot] = 'd';
  Tensor r(t.dim(), var);
  std::vector<int> ir(t.rank(), 0);
  do {
    std::vector<int> it = ir;
    Scalar sum = Scalar::zero();
    for (int q = 0; q < t.dim(); ++q) {
      const Scalar& w = omega_lo.at({q, ir[slot]});
      if (w.is_zero()) continue;
      it[slot] = q;
      sum = sum + t.at(it) * w;
    }
    r.set(ir, sum);
  } while (r.next_index(ir));
  return r;
}

Tensor kronecker(int dim) {
  Tensor d(dim, "ud");
  for (int a = 0; a < dim; ++a) d.set({a, a}, Scalar::one());
  return d;
}

}  // namespace cps
