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

#include "wbop/multiway.hpp"
#include "wbop/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace wbop
{

namespace
{

using cd = std::complex<double>;
using MatrixXcdRM = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<const MatrixXcdRM>;

std::size_t product(const std::vector<std::size_t> &dims)
{
    std::size_t p = 1;
    for (std::size_t d : dims)
        p *= d;
    return p;
}

// Materializes an axis permutation: output axis i takes its extent and index
// from input axis perm[i]. Identity permutations return a plain copy upstream,
// so this is only called when a real shuffle is needed.
ComplexMultiArray permute_axes(const ComplexMultiArray &a, const std::vector<std::size_t> &perm)
{
    const auto &in_dims = a.dims();
    const std::size_t r = in_dims.size();

    std::vector<std::size_t> out_dims(r);
    for (std::size_t i = 0; i < r; ++i)
        out_dims[i] = in_dims[perm[i]];

    std::vector<std::size_t> in_strides(r, 1);
    for (std::size_t i = r; i-- > 1;)
        in_strides[i - 1] = in_strides[i] * in_dims[i];

    // Stride of output axis i in the flat input layout.
    std::vector<std::size_t> out_axis_stride(r);
    for (std::size_t i = 0; i < r; ++i)
        out_axis_stride[i] = in_strides[perm[i]];

    std::vector<cd> out(a.size());
    std::vector<std::size_t> idx(r, 0);
    std::size_t src = 0;
    for (std::size_t flat = 0; flat < out.size(); ++flat)
    {
        out[flat] = a[src];
        for (std::size_t ax = r; ax-- > 0;)
        {
            ++idx[ax];
            src += out_axis_stride[ax];
            if (idx[ax] < out_dims[ax])
                break;
            src -= out_axis_stride[ax] * out_dims[ax];
            idx[ax] = 0;
        }
    }
    return ComplexMultiArray(std::move(out_dims), std::move(out));
}

bool is_identity(const std::vector<std::size_t> &perm)
{
    for (std::size_t i = 0; i < perm.size(); ++i)
        if (perm[i] != i)
            return false;
    return true;
}

constexpr std::size_t kPairwiseThreshold = std::size_t(1) << 15;

// (P x Q) times (Q x R) with pairwise accumulation over Q once Q exceeds the
// threshold: the contracted range splits into a balanced binary tree whose
// leaves are ordinary matrix products.
MatrixXcdRM gemm_pairwise(const MapRM &a, const MapRM &b, std::size_t lo, std::size_t hi)
{
    const std::size_t n = hi - lo;
    if (n <= kPairwiseThreshold)
        return a.middleCols(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(n)) *
               b.middleRows(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(n));
    const std::size_t mid = lo + n / 2;
    return gemm_pairwise(a, b, lo, mid) + gemm_pairwise(a, b, mid, hi);
}

} // namespace

ComplexMultiArray::ComplexMultiArray(std::vector<std::size_t> dims) : dims_(std::move(dims))
{
    for (std::size_t d : dims_)
        if (d == 0)
            throw dimension_error("ComplexMultiArray: axis extents must be positive");
    data_.assign(product(dims_), value_type(0.0, 0.0));
}

ComplexMultiArray::ComplexMultiArray(std::vector<std::size_t> dims, std::vector<value_type> data)
    : dims_(std::move(dims)), data_(std::move(data))
{
    for (std::size_t d : dims_)
        if (d == 0)
            throw dimension_error("ComplexMultiArray: axis extents must be positive");
    if (data_.size() != product(dims_))
        throw dimension_error("ComplexMultiArray: data length does not match the product of dims");
}

ComplexMultiArray ComplexMultiArray::scalar(value_type v)
{
    ComplexMultiArray s;
    s.data_[0] = v;
    return s;
}

ComplexMultiArray ComplexMultiArray::identity(std::size_t n)
{
    ComplexMultiArray m(std::vector<std::size_t>{n, n});
    for (std::size_t i = 0; i < n; ++i)
        m.data_[i * n + i] = value_type(1.0, 0.0);
    return m;
}

std::size_t ComplexMultiArray::flat_index(std::initializer_list<std::size_t> idx) const
{
    if (idx.size() != dims_.size())
        throw dimension_error("ComplexMultiArray::at: index count does not match rank");
    std::size_t flat = 0;
    std::size_t ax = 0;
    for (std::size_t i : idx)
    {
        if (i >= dims_[ax])
            throw std::out_of_range("ComplexMultiArray::at: index out of range");
        flat = flat * dims_[ax] + i;
        ++ax;
    }
    return flat;
}

bool ComplexMultiArray::all_finite() const noexcept
{
    for (const auto &v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            return false;
    return true;
}

ComplexMultiArray contract(const ComplexMultiArray &a, const ComplexMultiArray &b,
                           const std::vector<axis_pair> &pairs)
{
    const std::size_t ra = a.rank();
    const std::size_t rb = b.rank();

    std::vector<bool> a_paired(ra, false);
    std::vector<bool> b_paired(rb, false);
    for (const auto &[ax_a, ax_b] : pairs)
    {
        if (ax_a >= ra || ax_b >= rb)
            throw dimension_error("contract: pair references a nonexistent axis");
        if (a_paired[ax_a] || b_paired[ax_b])
            throw dimension_error("contract: an axis appears in more than one pair");
        if (a.dims()[ax_a] != b.dims()[ax_b])
        {
            std::ostringstream msg;
            msg << "contract: paired extents differ (" << a.dims()[ax_a] << " vs "
                << b.dims()[ax_b] << ")";
            throw dimension_error(msg.str());
        }
        a_paired[ax_a] = true;
        b_paired[ax_b] = true;
    }

    // a is reshuffled to (unpaired..., paired...) and b to (paired...,
    // unpaired...), both keeping the pair order on the contracted block, so
    // the contraction becomes one (P x Q) * (Q x R) product.
    std::vector<std::size_t> perm_a;
    std::vector<std::size_t> out_dims;
    perm_a.reserve(ra);
    for (std::size_t i = 0; i < ra; ++i)
        if (!a_paired[i])
        {
            perm_a.push_back(i);
            out_dims.push_back(a.dims()[i]);
        }
    for (const auto &[ax_a, ax_b] : pairs)
        perm_a.push_back(ax_a);

    std::vector<std::size_t> perm_b;
    perm_b.reserve(rb);
    for (const auto &[ax_a, ax_b] : pairs)
        perm_b.push_back(ax_b);
    for (std::size_t i = 0; i < rb; ++i)
        if (!b_paired[i])
        {
            perm_b.push_back(i);
            out_dims.push_back(b.dims()[i]);
        }

    std::size_t q = 1;
    for (const auto &[ax_a, ax_b] : pairs)
        q *= a.dims()[ax_a];
    const std::size_t p = a.size() / q;
    const std::size_t r = b.size() / q;

    ComplexMultiArray a_perm;
    ComplexMultiArray b_perm;
    const ComplexMultiArray *ap = &a;
    const ComplexMultiArray *bp = &b;
    if (!is_identity(perm_a))
    {
        a_perm = permute_axes(a, perm_a);
        ap = &a_perm;
    }
    if (!is_identity(perm_b))
    {
        b_perm = permute_axes(b, perm_b);
        bp = &b_perm;
    }

    MapRM am(ap->data(), static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
    MapRM bm(bp->data(), static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(r));
    MatrixXcdRM res = gemm_pairwise(am, bm, 0, q);

    std::vector<cd> out(res.data(), res.data() + p * r);
    return ComplexMultiArray(std::move(out_dims), std::move(out));
}

ComplexMultiArray conj(const ComplexMultiArray &a)
{
    std::vector<cd> out(a.data(), a.data() + a.size());
    for (auto &v : out)
        v = std::conj(v);
    return ComplexMultiArray(a.dims(), std::move(out));
}

double frobenius_norm(const ComplexMultiArray &a)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::norm(a[i]);
    return std::sqrt(s);
}

namespace
{

void require_same_dims(const ComplexMultiArray &a, const ComplexMultiArray &b, const char *op)
{
    if (a.dims() != b.dims())
        throw dimension_error(std::string(op) + ": extents differ");
}

} // namespace

ComplexMultiArray add(const ComplexMultiArray &a, const ComplexMultiArray &b)
{
    require_same_dims(a, b, "add");
    std::vector<cd> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] + b[i];
    return ComplexMultiArray(a.dims(), std::move(out));
}

ComplexMultiArray sub(const ComplexMultiArray &a, const ComplexMultiArray &b)
{
    require_same_dims(a, b, "sub");
    std::vector<cd> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] - b[i];
    return ComplexMultiArray(a.dims(), std::move(out));
}

ComplexMultiArray scale(const ComplexMultiArray &a, std::complex<double> factor)
{
    std::vector<cd> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] * factor;
    return ComplexMultiArray(a.dims(), std::move(out));
}

double Rng::uniform01()
{
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi)
{
    return lo + uniform01() * (hi - lo);
}

std::complex<double> Rng::complex_normal()
{
    // Box-Muller on (0,1] x [0,1); u1 is flipped away from zero so the log is
    // finite. The pair feeds one complex entry, so a seed pins the stream
    // regardless of interleaving with other draw kinds.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
    return {rad * std::cos(ang) * inv_sqrt2, rad * std::sin(ang) * inv_sqrt2};
}

ComplexMultiArray random_complex_normal(const std::vector<std::size_t> &dims, std::uint64_t seed)
{
    ComplexMultiArray out(dims);
    Rng rng(seed);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = rng.complex_normal();
    return out;
}

} // namespace wbop
