#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ordist/common.hpp"

namespace ordist {

using IntVec = std::vector<Int>;
using SparseEntry = std::pair<std::size_t, Int>;
using SparseVec = std::vector<SparseEntry>;  // sorted by column, no zeros

/* Integer matrix with either dense row-major or sparse-row storage. Both
   storages answer the same queries and compare equal entry by entry. */
class IntMatrix {
 public:
  enum class Storage { dense, sparse };

  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols, Storage storage = Storage::dense)
      : rows_(rows), cols_(cols), storage_(storage) {
    if (storage_ == Storage::dense)
      dense_.assign(rows * cols, Int(0));
    else
      sparse_.assign(rows, {});
  }
  IntMatrix(std::initializer_list<std::initializer_list<long>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    dense_.reserve(rows_ * cols_);
    for (const auto& r : init) {
      if (r.size() != cols_) throw Error(Errc::invalid_argument, "ragged matrix literal");
      for (long v : r) dense_.emplace_back(v);
    }
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.dense_[i * n + i] = 1;
    return m;
  }

  static IntMatrix from_rows(const std::vector<IntVec>& rows, std::size_t cols) {
    IntMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw Error(Errc::invalid_argument, "row length mismatch");
      std::copy(rows[i].begin(), rows[i].end(), m.dense_.begin() + i * cols);
    }
    return m;
  }

  static IntMatrix from_sparse_rows(std::vector<SparseVec> rows, std::size_t cols) {
    IntMatrix m(0, cols, Storage::sparse);
    for (auto& r : rows) m.append_row(std::move(r));
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Storage storage() const { return storage_; }

  Int at(std::size_t i, std::size_t j) const {
    check(i, j);
    if (storage_ == Storage::dense) return dense_[i * cols_ + j];
    const auto& r = sparse_[i];
    auto it = std::lower_bound(r.begin(), r.end(), j,
                               [](const SparseEntry& e, std::size_t c) { return e.first < c; });
    if (it != r.end() && it->first == j) return it->second;
    return Int(0);
  }

  void set(std::size_t i, std::size_t j, const Int& v) {
    check(i, j);
    if (storage_ == Storage::dense) {
      dense_[i * cols_ + j] = v;
      return;
    }
    auto& r = sparse_[i];
    auto it = std::lower_bound(r.begin(), r.end(), j,
                               [](const SparseEntry& e, std::size_t c) { return e.first < c; });
    if (it != r.end() && it->first == j) {
      if (v == 0)
        r.erase(it);
      else
        it->second = v;
    } else if (v != 0) {
      r.insert(it, {j, v});
    }
  }

  IntVec row(std::size_t i) const {
    check(i, 0, true);
    IntVec out(cols_);
    if (storage_ == Storage::dense) {
      std::copy(dense_.begin() + i * cols_, dense_.begin() + (i + 1) * cols_, out.begin());
    } else {
      for (const auto& [c, v] : sparse_[i]) out[c] = v;
    }
    return out;
  }

  SparseVec row_entries(std::size_t i) const {
    check(i, 0, true);
    if (storage_ == Storage::sparse) return sparse_[i];
    SparseVec out;
    for (std::size_t j = 0; j < cols_; ++j)
      if (dense_[i * cols_ + j] != 0) out.emplace_back(j, dense_[i * cols_ + j]);
    return out;
  }

  void append_row(const IntVec& r) {
    if (r.size() != cols_) throw Error(Errc::invalid_argument, "row length mismatch");
    if (storage_ == Storage::dense) {
      dense_.insert(dense_.end(), r.begin(), r.end());
    } else {
      SparseVec s;
      for (std::size_t j = 0; j < cols_; ++j)
        if (r[j] != 0) s.emplace_back(j, r[j]);
      sparse_.push_back(std::move(s));
    }
    ++rows_;
  }

  void append_row(SparseVec r) {
    std::sort(r.begin(), r.end(), [](const SparseEntry& a, const SparseEntry& b) { return a.first < b.first; });
    SparseVec clean;
    for (auto& e : r) {
      if (e.first >= cols_) throw Error(Errc::invalid_argument, "column index out of range");
      if (!clean.empty() && clean.back().first == e.first)
        clean.back().second += e.second;
      else
        clean.push_back(std::move(e));
      if (clean.back().second == 0) clean.pop_back();
    }
    if (storage_ == Storage::sparse) {
      sparse_.push_back(std::move(clean));
    } else {
      std::size_t base = dense_.size();
      dense_.resize(base + cols_, Int(0));
      for (auto& [c, v] : clean) dense_[base + c] = v;
    }
    ++rows_;
  }

  IntMatrix as(Storage s) const {
    if (s == storage_) return *this;
    IntMatrix out(0, cols_, s);
    for (std::size_t i = 0; i < rows_; ++i) out.append_row(row_entries(i));
    return out;
  }

  IntMatrix transposed() const {
    IntMatrix out(cols_, rows_, storage_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (const auto& [c, v] : row_entries(i)) {
        if (storage_ == Storage::dense)
          out.dense_[c * rows_ + i] = v;
        else
          out.sparse_[c].emplace_back(i, v);
      }
    return out;
  }

  IntMatrix select_rows(const std::vector<std::size_t>& idx) const {
    IntMatrix out(0, cols_, storage_);
    for (auto i : idx) out.append_row(row_entries(i));
    return out;
  }

  IntMatrix select_cols(const std::vector<std::size_t>& idx) const {
    std::vector<long> where(cols_, -1);
    for (std::size_t k = 0; k < idx.size(); ++k) where[idx[k]] = static_cast<long>(k);
    IntMatrix out(0, idx.size(), storage_);
    for (std::size_t i = 0; i < rows_; ++i) {
      SparseVec r;
      for (const auto& [c, v] : row_entries(i))
        if (where[c] >= 0) r.emplace_back(static_cast<std::size_t>(where[c]), v);
      out.append_row(std::move(r));
    }
    return out;
  }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < rows_; ++i) n += row_entries(i).size();
    return n;
  }

  bool is_zero() const {
    for (std::size_t i = 0; i < rows_; ++i)
      if (!row_entries(i).empty()) return false;
    return true;
  }

  Int max_abs() const {
    Int m = 0;
    for (std::size_t i = 0; i < rows_; ++i)
      for (const auto& e : row_entries(i))
        if (abs(e.second) > m) m = abs(e.second);
    return m;
  }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (std::size_t i = 0; i < a.rows_; ++i)
      if (a.row_entries(i) != b.row_entries(i)) return false;
    return true;
  }
  friend bool operator!=(const IntMatrix& a, const IntMatrix& b) { return !(a == b); }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(Errc::invalid_argument, "dimension mismatch in product");
    std::vector<SparseVec> brows(b.rows_);
    for (std::size_t k = 0; k < b.rows_; ++k) brows[k] = b.row_entries(k);
    IntMatrix out(a.rows_, b.cols_, a.storage_);
    IntVec acc(b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      std::fill(acc.begin(), acc.end(), Int(0));
      for (const auto& [k, av] : a.row_entries(i))
        for (const auto& [j, bv] : brows[k]) acc[j] += av * bv;
      for (std::size_t j = 0; j < b.cols_; ++j)
        if (acc[j] != 0) out.set(i, j, acc[j]);
    }
    return out;
  }

  /* v * M for a row vector v. */
  IntVec left_apply(const IntVec& v) const {
    if (v.size() != rows_) throw Error(Errc::invalid_argument, "dimension mismatch in left_apply");
    IntVec out(cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (v[i] == 0) continue;
      for (const auto& [c, x] : row_entries(i)) out[c] += v[i] * x;
    }
    return out;
  }

  /* M * v for a column vector v. */
  IntVec right_apply(const IntVec& v) const {
    if (v.size() != cols_) throw Error(Errc::invalid_argument, "dimension mismatch in right_apply");
    IntVec out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (const auto& [c, x] : row_entries(i)) out[i] += x * v[c];
    return out;
  }

  std::vector<IntVec> dense_rows() const {
    std::vector<IntVec> out;
    out.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out.push_back(row(i));
    return out;
  }

  std::vector<SparseVec> sparse_rows() const {
    std::vector<SparseVec> out;
    out.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out.push_back(row_entries(i));
    return out;
  }

 private:
  void check(std::size_t i, std::size_t j, bool row_only = false) const {
    if (i >= rows_ || (!row_only && j >= cols_)) throw std::out_of_range("IntMatrix index out of range");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Storage storage_ = Storage::dense;
  std::vector<Int> dense_;
  std::vector<SparseVec> sparse_;
};

inline IntMatrix vstack(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.cols()) throw Error(Errc::invalid_argument, "vstack column mismatch");
  IntMatrix out = a;
  for (std::size_t i = 0; i < b.rows(); ++i) out.append_row(b.row_entries(i));
  return out;
}

}  // namespace ordist
