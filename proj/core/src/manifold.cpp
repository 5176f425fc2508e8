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

#include "wbop/manifold.hpp"
#include "wbop/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace wbop
{

namespace
{

constexpr double two_pi = 2.0 * std::numbers::pi;

} // namespace

FrequencyGrid::FrequencyGrid(double carrier_hz, double bandwidth_hz, std::size_t n_points)
    : carrier_hz_(carrier_hz), bandwidth_hz_(bandwidth_hz), n_points_(n_points)
{
    if (!(carrier_hz > 0.0))
        throw std::domain_error("FrequencyGrid: carrier must be positive");
    if (n_points == 0)
        throw std::domain_error("FrequencyGrid: need at least one frequency point");
    if (n_points == 1)
    {
        if (bandwidth_hz != 0.0)
            throw std::domain_error("FrequencyGrid: a single-point grid must have zero bandwidth");
    }
    else if (!(bandwidth_hz > 0.0))
    {
        throw std::domain_error("FrequencyGrid: bandwidth must be positive");
    }
    if (!(bandwidth_hz < 2.0 * carrier_hz))
        throw std::domain_error("FrequencyGrid: bandwidth must stay below twice the carrier");
}

double FrequencyGrid::frequency_hz(std::size_t k) const
{
    if (k >= n_points_)
        throw std::out_of_range("FrequencyGrid: frequency index out of range");
    if (n_points_ == 1)
        return carrier_hz_;
    return carrier_hz_ - bandwidth_hz_ / 2.0 +
           static_cast<double>(k) * bandwidth_hz_ / static_cast<double>(n_points_ - 1);
}

std::vector<double> FrequencyGrid::frequencies_hz() const
{
    std::vector<double> f(n_points_);
    for (std::size_t k = 0; k < n_points_; ++k)
        f[k] = frequency_hz(k);
    return f;
}

double FrequencyGrid::lowest_wavelength_m() const
{
    return speed_of_light_m_s / frequency_hz(0);
}

RingArrayGeometry::RingArrayGeometry(std::size_t n_elements, double adjacent_spacing_m)
    : n_elements_(n_elements), adjacent_spacing_m_(adjacent_spacing_m)
{
    if (n_elements < 2)
        throw std::domain_error("RingArrayGeometry: need at least two elements");
    if (!(adjacent_spacing_m > 0.0))
        throw std::domain_error("RingArrayGeometry: spacing must be positive");
    radius_m_ =
        adjacent_spacing_m / (2.0 * std::sin(std::numbers::pi / static_cast<double>(n_elements)));
}

Vec3 RingArrayGeometry::position(std::size_t m) const
{
    if (m >= n_elements_)
        throw std::out_of_range("RingArrayGeometry: element index out of range");
    const double phi = two_pi * static_cast<double>(m) / static_cast<double>(n_elements_);
    return {radius_m_ * std::cos(phi), radius_m_ * std::sin(phi), 0.0};
}

Vec3 RingArrayGeometry::boresight(std::size_t m) const
{
    if (m >= n_elements_)
        throw std::out_of_range("RingArrayGeometry: element index out of range");
    const double phi = two_pi * static_cast<double>(m) / static_cast<double>(n_elements_);
    return {std::cos(phi), std::sin(phi), 0.0};
}

std::vector<Vec3> RingArrayGeometry::positions() const
{
    std::vector<Vec3> p(n_elements_);
    for (std::size_t m = 0; m < n_elements_; ++m)
        p[m] = position(m);
    return p;
}

std::vector<Vec3> RingArrayGeometry::boresights() const
{
    std::vector<Vec3> b(n_elements_);
    for (std::size_t m = 0; m < n_elements_; ++m)
        b[m] = boresight(m);
    return b;
}

ElementPattern ElementPattern::make_patch(double q)
{
    if (!(q >= 0.0))
        throw std::domain_error("ElementPattern: patch exponent must be nonnegative");
    return {Kind::patch, q};
}

namespace
{

// Gain evaluated from cos(psi) directly; the steering path never needs the
// angle itself.
double gain_from_cos(const ElementPattern &pattern, double cos_psi)
{
    if (pattern.kind == ElementPattern::Kind::isotropic)
        return 1.0;
    const double c = cos_psi > 0.0 ? cos_psi : 0.0;
    return std::pow(c, pattern.exponent);
}

} // namespace

double element_gain(const ElementPattern &pattern, double psi)
{
    if (!std::isfinite(psi))
        throw std::domain_error("element_gain: angle must be finite");
    return gain_from_cos(pattern, std::cos(psi));
}

WidebandManifold::WidebandManifold(const RingArrayGeometry &geometry, ElementPattern pattern,
                                   FrequencyGrid grid, bool normalize_per_angle)
    : positions_(geometry.positions()), boresights_(geometry.boresights()), pattern_(pattern),
      grid_(grid), normalize_(normalize_per_angle)
{
}

WidebandManifold::WidebandManifold(std::vector<Vec3> positions, std::vector<Vec3> boresights,
                                   ElementPattern pattern, FrequencyGrid grid,
                                   bool normalize_per_angle)
    : positions_(std::move(positions)), boresights_(std::move(boresights)), pattern_(pattern),
      grid_(grid), normalize_(normalize_per_angle)
{
    if (positions_.empty())
        throw dimension_error("WidebandManifold: need at least one element position");
    if (boresights_.size() != positions_.size())
        throw dimension_error("WidebandManifold: one boresight per element position required");
}

double wrap_angle(double theta)
{
    if (!std::isfinite(theta))
        throw std::domain_error("wrap_angle: angle must be finite");
    // IEEE remainder is exact and lands in [-pi, pi]; folding the single
    // boundary value -pi to pi yields the half-open principal branch.
    double r = std::remainder(theta, two_pi);
    if (r == -std::numbers::pi)
        r = std::numbers::pi;
    return r;
}

namespace
{

// Writes the steering entries for one angle. `out` points at the (k=0, m=0)
// entry; `stride` is the flat distance between consecutive (k, m) entries,
// which lets one routine fill both standalone tensors (stride 1) and
// angle-major grid slabs (stride n_angles).
void steering_into(const WidebandManifold &manifold, double theta,
                   std::complex<double> *out, std::size_t stride)
{
    const double th = wrap_angle(theta);
    const double ux = std::cos(th);
    const double uy = std::sin(th);

    const auto &pos = manifold.positions();
    const auto &bor = manifold.boresights();
    const std::size_t n_r = pos.size();
    const std::size_t n_f = manifold.n_frequencies();
    const auto freqs = manifold.grid().frequencies_hz();

    double sum_sq = 0.0;
    for (std::size_t m = 0; m < n_r; ++m)
    {
        const double lever_s = (pos[m].x * ux + pos[m].y * uy) / speed_of_light_m_s;
        const double cos_psi = bor[m].x * ux + bor[m].y * uy;
        const double g = gain_from_cos(manifold.pattern(), cos_psi);
        for (std::size_t k = 0; k < n_f; ++k)
        {
            const double phase = two_pi * freqs[k] * lever_s;
            const std::complex<double> v = g * std::complex<double>(std::cos(phase), std::sin(phase));
            out[(k * n_r + m) * stride] = v;
            sum_sq += std::norm(v);
        }
    }

    // A pattern can null every element at once (explicit geometries only);
    // the zero response is returned as-is since no unit-norm scaling exists.
    if (manifold.normalize_per_angle() && sum_sq > 0.0)
    {
        const double inv = 1.0 / std::sqrt(sum_sq);
        for (std::size_t i = 0; i < n_f * n_r; ++i)
            out[i * stride] *= inv;
    }
}

} // namespace

ComplexMultiArray steering(const WidebandManifold &manifold, double theta)
{
    ComplexMultiArray a({manifold.n_frequencies(), manifold.n_elements()});
    steering_into(manifold, theta, a.data(), 1);
    return a;
}

ComplexMultiArray steering_grid(const WidebandManifold &manifold,
                                const std::vector<double> &angles, unsigned n_threads)
{
    if (angles.empty())
        throw dimension_error("steering_grid: angle grid must be nonempty");

    const std::size_t n_a = angles.size();
    ComplexMultiArray g({manifold.n_frequencies(), manifold.n_elements(), n_a});

    auto fill_range = [&](std::size_t lo, std::size_t hi)
    {
        for (std::size_t i = lo; i < hi; ++i)
            steering_into(manifold, angles[i], g.data() + i, n_a);
    };

    if (n_threads <= 1 || n_a < 2)
    {
        fill_range(0, n_a);
        return g;
    }

    const std::size_t workers = std::min<std::size_t>(n_threads, n_a);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n_a + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w)
    {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(lo + chunk, n_a);
        if (lo >= hi)
            break;
        pool.emplace_back(fill_range, lo, hi);
    }
    for (auto &t : pool)
        t.join();
    return g;
}

ComplexMultiArray delay_steering(const FrequencyGrid &grid, double tau)
{
    if (!(tau > 0.0) || !(tau <= 1.0))
        throw std::domain_error("delay_steering: normalized delay must lie in (0, 1]");
    ComplexMultiArray d({grid.n_points()});
    for (std::size_t k = 0; k < grid.n_points(); ++k)
    {
        const double phase = -two_pi * static_cast<double>(k) * tau;
        d[k] = {std::cos(phase), std::sin(phase)};
    }
    return d;
}

ComplexMultiArray synthesize_channel(const WidebandManifold &manifold,
                                     const std::vector<PathParams> &paths, double noise_variance,
                                     std::uint64_t seed)
{
    if (!(noise_variance >= 0.0))
        throw std::domain_error("synthesize_channel: noise variance must be nonnegative");
    if (paths.empty() && noise_variance == 0.0)
        throw std::domain_error("synthesize_channel: need at least one path or positive noise");

    const std::size_t n_f = manifold.n_frequencies();
    const std::size_t n_r = manifold.n_elements();
    ComplexMultiArray x({n_f, n_r});

    for (const auto &p : paths)
    {
        const ComplexMultiArray a = steering(manifold, p.theta);
        const ComplexMultiArray d = delay_steering(manifold.grid(), p.tau);
        for (std::size_t k = 0; k < n_f; ++k)
            for (std::size_t m = 0; m < n_r; ++m)
                x.at(k, m) += p.gamma * a.at(k, m) * d[k];
    }

    if (noise_variance > 0.0)
    {
        Rng rng(seed);
        const double s = std::sqrt(noise_variance);
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] += s * rng.complex_normal();
    }
    return x;
}

std::vector<double> default_angle_grid(std::size_t n)
{
    if (n == 0)
        throw std::domain_error("default_angle_grid: need at least one angle");
    // (2 (i+1) / n - 1) * pi puts the last point exactly at pi.
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = (2.0 * static_cast<double>(i + 1) / static_cast<double>(n) - 1.0) *
                  std::numbers::pi;
    return grid;
}

} // namespace wbop
