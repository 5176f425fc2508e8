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

#ifndef WBOP_MANIFOLD_HPP
#define WBOP_MANIFOLD_HPP

#include "wbop/multiway.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace wbop
{

inline constexpr double speed_of_light_m_s = 299792458.0;

/*!
Uniform frequency sampling of a measurement band.

With n_points >= 2 the samples run f_k = carrier - B/2 + k * B/(n_points - 1),
so the first and last points sit exactly at the band edges. n_points == 1 is
the narrowband degenerate case: the bandwidth must then be zero and the single
sample sits at the carrier. The band must stay strictly positive,
i.e. bandwidth < 2 * carrier.
*/
class FrequencyGrid
{
  public:
    FrequencyGrid(double carrier_hz, double bandwidth_hz, std::size_t n_points);

    double carrier_hz() const noexcept { return carrier_hz_; }
    double bandwidth_hz() const noexcept { return bandwidth_hz_; }
    std::size_t n_points() const noexcept { return n_points_; }

    double frequency_hz(std::size_t k) const;
    std::vector<double> frequencies_hz() const;

    // Wavelength of the lowest sub-carrier, c / f_0.
    double lowest_wavelength_m() const;

  private:
    double carrier_hz_;
    double bandwidth_hz_;
    std::size_t n_points_;
};

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/*!
Ring of n_elements in the X-Y plane with a prescribed spacing between
neighbours. The radius follows from the chord condition
d = 2 r sin(pi / n_elements). Element m sits at azimuth phi_m = 2 pi m / n
and looks radially outward.
*/
class RingArrayGeometry
{
  public:
    RingArrayGeometry(std::size_t n_elements, double adjacent_spacing_m);

    std::size_t n_elements() const noexcept { return n_elements_; }
    double adjacent_spacing_m() const noexcept { return adjacent_spacing_m_; }
    double radius_m() const noexcept { return radius_m_; }

    Vec3 position(std::size_t m) const;
    Vec3 boresight(std::size_t m) const;

    std::vector<Vec3> positions() const;
    std::vector<Vec3> boresights() const;

  private:
    std::size_t n_elements_;
    double adjacent_spacing_m_;
    double radius_m_;
};

/*!
Scalar far-field gain of a single element as a function of the angle psi
between its boresight and the arrival direction. The isotropic kind is
identically 1. The patch kind is the clipped cosine max(0, cos psi)^q: unit
gain on boresight, a null at psi = pi/2 and zero over the back half-plane.
*/
struct ElementPattern
{
    enum class Kind
    {
        isotropic,
        patch
    };

    Kind kind = Kind::isotropic;
    double exponent = 1.0;

    static ElementPattern make_isotropic() { return {Kind::isotropic, 1.0}; }
    static ElementPattern make_patch(double q = 1.0);
};

double element_gain(const ElementPattern &pattern, double psi);

// One propagation path: complex weight, azimuth angle of arrival in
// (-pi, pi], and normalized delay in (0, 1].
struct PathParams
{
    std::complex<double> gamma;
    double theta;
    double tau;
};

/*!
Frequency-dependent response model of an array of identical elements.

Geometry is either a ring or an explicit position list with per-element
boresights; all positions share one phase reference at the origin. With
normalize_per_angle set (the default) every steering evaluation is scaled to
unit Frobenius norm, which puts correlation maps on a unit diagonal.
*/
class WidebandManifold
{
  public:
    WidebandManifold(const RingArrayGeometry &geometry, ElementPattern pattern, FrequencyGrid grid,
                     bool normalize_per_angle = true);
    WidebandManifold(std::vector<Vec3> positions, std::vector<Vec3> boresights,
                     ElementPattern pattern, FrequencyGrid grid, bool normalize_per_angle = true);

    std::size_t n_frequencies() const noexcept { return grid_.n_points(); }
    std::size_t n_elements() const noexcept { return positions_.size(); }
    const FrequencyGrid &grid() const noexcept { return grid_; }
    const ElementPattern &pattern() const noexcept { return pattern_; }
    const std::vector<Vec3> &positions() const noexcept { return positions_; }
    const std::vector<Vec3> &boresights() const noexcept { return boresights_; }
    bool normalize_per_angle() const noexcept { return normalize_; }

  private:
    std::vector<Vec3> positions_;
    std::vector<Vec3> boresights_;
    ElementPattern pattern_;
    FrequencyGrid grid_;
    bool normalize_;
};

// Reduces any finite angle to the principal branch (-pi, pi]. Multiples of
// 2 pi that are exactly representable map to bit-identical results.
double wrap_angle(double theta);

/*!
Steering tensor a(theta) of extents n_frequencies x n_elements.

Entry (k, m) is g_m(theta) * exp(+j 2 pi f_k (p_m . u(theta)) / c) with
u(theta) = (cos theta, sin theta, 0). The frequency-dependent phase slope is
what distinguishes the wideband response from the narrowband model. The angle
is wrapped to the principal branch; non-finite angles raise a domain error.
*/
ComplexMultiArray steering(const WidebandManifold &manifold, double theta);

// Steering tensors stacked over a grid, extents n_frequencies x n_elements
// x n_angles. Evaluations are independent per angle and may run on
// n_threads; the result does not depend on the thread count.
ComplexMultiArray steering_grid(const WidebandManifold &manifold,
                                const std::vector<double> &angles, unsigned n_threads = 1);

// Delay response over the frequency index, extent n_points: entry k is
// exp(-j 2 pi k tau). tau outside (0, 1] raises a domain error.
ComplexMultiArray delay_steering(const FrequencyGrid &grid, double tau);

/*!
Noisy multi-path snapshot of extents n_frequencies x n_elements:

  x = sum_p gamma_p a(theta_p) . delay(tau_p) + n

with the delay factor broadcast along the element axis and n drawn i.i.d.
circularly symmetric complex Gaussian of variance noise_variance,
reproducible from the seed. Requires at least one path or positive noise.
*/
ComplexMultiArray synthesize_channel(const WidebandManifold &manifold,
                                     const std::vector<PathParams> &paths, double noise_variance,
                                     std::uint64_t seed);

// n uniformly spaced angles over (-pi, pi], theta_i = -pi + (i+1) * 2 pi / n.
std::vector<double> default_angle_grid(std::size_t n = 720);

} // namespace wbop

#endif
