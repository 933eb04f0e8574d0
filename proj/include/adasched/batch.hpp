#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace adasched {

/// Row-major collection of `count` vectors of dimension `dim`.
class Batch {
 public:
  Batch() = default;
  Batch(std::size_t count, std::size_t dim) : count_(count), dim_(dim), data_(count * dim, 0.0) {}

  std::size_t count() const { return count_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return count_ == 0; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  // Values of coordinate `axis` across all rows.
  std::vector<double> column(std::size_t axis) const {
    std::vector<double> out(count_);
    for (std::size_t i = 0; i < count_; ++i) out[i] = data_[i * dim_ + axis];
    return out;
  }

 private:
  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

}  // namespace adasched
