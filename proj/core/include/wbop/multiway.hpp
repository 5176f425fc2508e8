// SPDX-License-Identifier: Apache-2.0
//
// wbop - wideband array manifolds and correlation-shaping operator design
// Copyright (C) 2026 wbop contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef WBOP_MULTIWAY_HPP
#define WBOP_MULTIWAY_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace wbop
{

/*!
Dense complex multiway array.

Storage is row-major with the last axis fastest; each entry is a
std::complex<double>, i.e. an interleaved (re, im) double pair. An array with
no axes is a scalar holding exactly one entry. Axis meaning is positional and
documented at each call site; there are no runtime axis labels.

Values are immutable by convention once handed to another component and may be
shared freely across threads.
*/
class ComplexMultiArray
{
  public:
    using value_type = std::complex<double>;

    // Rank-0 scalar, value zero.
    ComplexMultiArray() : data_(1, value_type(0.0, 0.0)) {}

    // Zero-filled array of the given extents. Extents must be positive.
    explicit ComplexMultiArray(std::vector<std::size_t> dims);

    // Adopts existing entries; data.size() must equal the product of dims.
    ComplexMultiArray(std::vector<std::size_t> dims, std::vector<value_type> data);

    static ComplexMultiArray scalar(value_type v);

    // n-by-n identity matrix.
    static ComplexMultiArray identity(std::size_t n);

    const std::vector<std::size_t> &dims() const noexcept { return dims_; }
    std::size_t rank() const noexcept { return dims_.size(); }
    std::size_t size() const noexcept { return data_.size(); }

    value_type *data() noexcept { return data_.data(); }
    const value_type *data() const noexcept { return data_.data(); }

    value_type &operator[](std::size_t flat) { return data_[flat]; }
    const value_type &operator[](std::size_t flat) const { return data_[flat]; }

    // Multi-index access, one index per axis, row-major.
    template <class... Ix>
    value_type &at(Ix... ix)
    {
        return data_[flat_index({static_cast<std::size_t>(ix)...})];
    }
    template <class... Ix>
    const value_type &at(Ix... ix) const
    {
        return data_[flat_index({static_cast<std::size_t>(ix)...})];
    }

    std::size_t flat_index(std::initializer_list<std::size_t> idx) const;

    // Value of a rank-0 result.
    value_type scalar_value() const { return data_[0]; }

    bool all_finite() const noexcept;

    bool operator==(const ComplexMultiArray &other) const = default;

  private:
    std::vector<std::size_t> dims_;
    std::vector<value_type> data_;
};

using axis_pair = std::pair<std::size_t, std::size_t>;

/*!
General named-axis contraction.

Result extents are the unpaired axes of `a` in order, followed by the unpaired
axes of `b` in order. Each output entry sums products over all paired index
combinations. No pairs gives the outer product; pairing every axis gives a
rank-0 scalar.

Paired extents must agree, otherwise a dimension_error is thrown. When the
total contracted extent exceeds 2^15 the accumulation is split into a balanced
binary tree of partial sums (pairwise summation) to bound rounding growth.
The result is deterministic.
*/
ComplexMultiArray contract(const ComplexMultiArray &a, const ComplexMultiArray &b,
                           const std::vector<axis_pair> &pairs);

// Elementwise complex conjugate.
ComplexMultiArray conj(const ComplexMultiArray &a);

// sqrt of the sum of squared magnitudes.
double frobenius_norm(const ComplexMultiArray &a);

// Elementwise sum / difference; extents must agree.
ComplexMultiArray add(const ComplexMultiArray &a, const ComplexMultiArray &b);
ComplexMultiArray sub(const ComplexMultiArray &a, const ComplexMultiArray &b);

// Elementwise scaling by a complex factor.
ComplexMultiArray scale(const ComplexMultiArray &a, std::complex<double> factor);

/*!
Reproducible random stream.

A thin wrapper over std::mt19937_64 with a fixed mapping to doubles, so that a
seed pins the produced values bit-for-bit across platforms and runs.
uniform01 maps the top 53 bits of one engine draw to [0, 1). complex_normal
draws one Box-Muller pair per call (no state beyond the engine), giving
independent real and imaginary parts of variance 1/2 each.
*/
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform01();
    // Uniform over [lo, hi).
    double uniform(double lo, double hi);
    std::complex<double> complex_normal();

  private:
    std::mt19937_64 eng_;
};

// Array of the given extents with entries drawn from the standard complex
// normal distribution (unit complex variance), reproducible from the seed.
ComplexMultiArray random_complex_normal(const std::vector<std::size_t> &dims, std::uint64_t seed);

} // namespace wbop

#endif
