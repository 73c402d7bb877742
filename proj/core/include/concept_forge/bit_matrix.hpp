// Copyright 2026 The Concept Forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONCEPT_FORGE_BIT_MATRIX_HPP_
#define CONCEPT_FORGE_BIT_MATRIX_HPP_

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace concept_forge {

// Row-major bit matrix packed into 64-bit words. Padding bits past `cols`
// are always zero so row popcounts never need masking.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_((cols + 63) / 64), data_(rows * stride_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_row() const { return stride_; }

  bool get(std::size_t r, std::size_t c) const {
    return (data_[r * stride_ + c / 64] >> (c % 64)) & 1u;
  }
  void set(std::size_t r, std::size_t c, bool v = true) {
    std::uint64_t mask = std::uint64_t{1} << (c % 64);
    auto& w = data_[r * stride_ + c / 64];
    w = v ? (w | mask) : (w & ~mask);
  }

  std::span<const std::uint64_t> row(std::size_t r) const {
    return {data_.data() + r * stride_, stride_};
  }
  std::span<std::uint64_t> mutable_row(std::size_t r) {
    return {data_.data() + r * stride_, stride_};
  }

  std::size_t row_popcount(std::size_t r) const {
    std::size_t n = 0;
    for (std::uint64_t w : row(r)) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  // |row a AND row b|
  std::size_t and_popcount(std::size_t a, std::size_t b) const {
    auto ra = row(a);
    auto rb = row(b);
    std::size_t n = 0;
    for (std::size_t i = 0; i < stride_; ++i) {
      n += static_cast<std::size_t>(std::popcount(ra[i] & rb[i]));
    }
    return n;
  }

  const std::vector<std::uint64_t>& words() const { return data_; }
  std::vector<std::uint64_t>& mutable_words() { return data_; }

  bool operator==(const BitMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> data_;
};

}  // namespace concept_forge

#endif  // CONCEPT_FORGE_BIT_MATRIX_HPP_
