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

#ifndef WBOP_CORRELATION_HPP
#define WBOP_CORRELATION_HPP

#include "wbop/manifold.hpp"
#include "wbop/multiway.hpp"

#include <vector>

namespace wbop
{

/*!
Spatial correlation function sampled on an angle grid.

values is the n_angles x n_angles matrix of inner products between steering
tensors, conjugate-linear in the first (row) angle. It is Hermitian; with
normalized set it carries a unit diagonal (correlation-coefficient form).
*/
struct ScfMap
{
    std::vector<double> angles;
    ComplexMultiArray values;
    bool normalized = false;
};

// Angle-domain correlation curve of one snapshot at a fixed normalized delay.
struct CorrMap
{
    std::vector<double> angles;
    double tau = 0.0;
    std::vector<std::complex<double>> values;
};

// PSL result when no energy exists outside the main lobe (a pure delta);
// stands in for -infinity dB.
inline constexpr double psl_floor_db = -400.0;

// The do-nothing operator: output (a, b) copies input (a, b).
ComplexMultiArray identity_operator(std::size_t n_f, std::size_t n_r);

/*!
Applies the four-way operator to one snapshot: output entry (a, b) contracts
the operator's two trailing axes against the snapshot. Extents must conform:
op is out_f x out_r x in_f x in_r, s is in_f x in_r.
*/
ComplexMultiArray apply_operator(const ComplexMultiArray &op, const ComplexMultiArray &s);

/*!
Correlation of the array response between every angle pair of the grid:
zeta_{i,j} = <a(theta_i), a(theta_j)>. With normalize set, entries are
rescaled by the square roots of the diagonal (unit-diagonal form).
*/
ScfMap scf(const WidebandManifold &manifold, const std::vector<double> &angles,
           bool normalize = true, unsigned n_threads = 1);

// Same, from a precomputed steering grid of extents n_f x n_r x n_angles.
ScfMap scf_from_grid(const ComplexMultiArray &grid, const std::vector<double> &angles,
                     bool normalize = true);

/*!
Correlation of the composite system "operator applied to the array output":
zeta_{i,j} = <op a(theta_i), op a(theta_j)>. The operator's input extents
must match the manifold response.
*/
ScfMap effective_scf(const WidebandManifold &manifold, const ComplexMultiArray &op,
                     const std::vector<double> &angles, bool normalize = true,
                     unsigned n_threads = 1);

ScfMap effective_scf_from_grid(const ComplexMultiArray &grid, const ComplexMultiArray &op,
                               const std::vector<double> &angles, bool normalize = true);

/*!
Matched-filter correlation of a snapshot against delayed steering atoms:
C_i = <x, a(theta_i) . delay(tau)>, conjugate-linear in the snapshot. The
delay factor follows the same DFT convention as delay_steering.
*/
CorrMap correlation_function(const ComplexMultiArray &x, const WidebandManifold &manifold,
                             const std::vector<double> &angles, double tau);

CorrMap correlation_function_from_grid(const ComplexMultiArray &x, const ComplexMultiArray &grid,
                                       const std::vector<double> &angles, double tau);

// Operator-aware correlation: C_i = <op x, op (a(theta_i) . delay(tau))>.
CorrMap correlation_function_with_operator(const ComplexMultiArray &x,
                                           const ComplexMultiArray &op,
                                           const WidebandManifold &manifold,
                                           const std::vector<double> &angles, double tau);

CorrMap correlation_function_with_operator_from_grid(const ComplexMultiArray &x,
                                                     const ComplexMultiArray &op,
                                                     const ComplexMultiArray &grid,
                                                     const std::vector<double> &angles,
                                                     double tau);

/*!
Peak side-lobe level in dB.

For a CorrMap: the largest |C| at angles farther than mainlobe_halfwidth
(circular distance) from the peak angle, relative to the peak. For an ScfMap
the same ratio is computed per row and the worst (largest) row is reported.
A map with no energy outside the exclusion returns psl_floor_db. The
halfwidth must be positive and leave at least one angle outside the
exclusion, otherwise a domain error is raised.
*/
double peak_sidelobe_level(const CorrMap &map, double mainlobe_halfwidth);
double peak_sidelobe_level(const ScfMap &map, double mainlobe_halfwidth);

} // namespace wbop

#endif
