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

#include "wbop/correlation.hpp"
#include "wbop/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wbop
{

namespace
{

void require_grid_rank3(const ComplexMultiArray &grid, const std::vector<double> &angles,
                        const char *op)
{
    if (grid.rank() != 3)
        throw dimension_error(std::string(op) + ": steering grid must have three axes");
    if (angles.empty())
        throw dimension_error(std::string(op) + ": angle grid must be nonempty");
    if (grid.dims()[2] != angles.size())
        throw dimension_error(std::string(op) + ": grid angle extent does not match angle list");
}

void require_operator_dims(const ComplexMultiArray &op, std::size_t n_f, std::size_t n_r,
                           const char *what)
{
    if (op.rank() != 4)
        throw dimension_error(std::string(what) + ": operator must have four axes");
    if (op.dims()[2] != n_f || op.dims()[3] != n_r)
        throw dimension_error(std::string(what) + ": operator input extents do not match data");
}

// Gram matrix of the angle columns of a rank-3 stack, conjugate-linear in the
// first (row) index.
ComplexMultiArray column_gram(const ComplexMultiArray &stack)
{
    return contract(conj(stack), stack, {{0, 0}, {1, 1}});
}

// In-place rescale to the correlation-coefficient form. Zero-norm columns
// (possible only with degenerate patterns) keep their identically zero row.
void normalize_gram(ComplexMultiArray &gram)
{
    const std::size_t n = gram.dims()[0];
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i)
        d[i] = std::sqrt(std::max(gram.at(i, i).real(), 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
        {
            const double f = d[i] * d[j];
            gram.at(i, j) = f > 0.0 ? gram.at(i, j) / f : 0.0;
        }
}

// exp(-j 2 pi k tau) over the frequency index; same convention as
// delay_steering but reusable without a FrequencyGrid at hand.
std::vector<std::complex<double>> delay_phases(std::size_t n_f, double tau)
{
    if (!(tau > 0.0) || !(tau <= 1.0))
        throw std::domain_error("correlation: normalized delay must lie in (0, 1]");
    std::vector<std::complex<double>> d(n_f);
    for (std::size_t k = 0; k < n_f; ++k)
    {
        const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) * tau;
        d[k] = {std::cos(phase), std::sin(phase)};
    }
    return d;
}

double circular_distance(double a, double b)
{
    return std::abs(wrap_angle(a - b));
}

// Steering stack with the delay response multiplied in along the frequency
// axis. Both correlation paths share this product so that an identity
// operator reproduces the plain curve bit for bit.
ComplexMultiArray delayed_atoms(const ComplexMultiArray &grid, double tau)
{
    const auto d = delay_phases(grid.dims()[0], tau);
    ComplexMultiArray atoms(grid.dims());
    const std::size_t n_r = grid.dims()[1];
    const std::size_t n_a = grid.dims()[2];
    for (std::size_t k = 0; k < grid.dims()[0]; ++k)
        for (std::size_t m = 0; m < n_r; ++m)
            for (std::size_t i = 0; i < n_a; ++i)
                atoms.at(k, m, i) = grid.at(k, m, i) * d[k];
    return atoms;
}

// PSL of one curve given as |values| over `angles`; returns psl_floor_db when
// nothing outside the exclusion carries energy.
double curve_psl(const std::vector<double> &angles, const std::vector<double> &magnitude,
                 double halfwidth)
{
    std::size_t peak_idx = 0;
    for (std::size_t i = 1; i < angles.size(); ++i)
        if (magnitude[i] > magnitude[peak_idx])
            peak_idx = i;
    const double peak = magnitude[peak_idx];

    bool complement_nonempty = false;
    double worst = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i)
    {
        if (circular_distance(angles[i], angles[peak_idx]) <= halfwidth)
            continue;
        complement_nonempty = true;
        worst = std::max(worst, magnitude[i]);
    }
    if (!complement_nonempty)
        throw std::domain_error("peak_sidelobe_level: exclusion swallows the whole grid");
    if (peak == 0.0 || worst == 0.0)
        return psl_floor_db;
    return 20.0 * std::log10(worst / peak);
}

} // namespace

ComplexMultiArray identity_operator(std::size_t n_f, std::size_t n_r)
{
    ComplexMultiArray op({n_f, n_r, n_f, n_r});
    for (std::size_t a = 0; a < n_f; ++a)
        for (std::size_t b = 0; b < n_r; ++b)
            op.at(a, b, a, b) = 1.0;
    return op;
}

ComplexMultiArray apply_operator(const ComplexMultiArray &op, const ComplexMultiArray &s)
{
    if (s.rank() != 2)
        throw dimension_error("apply_operator: snapshot must have two axes");
    require_operator_dims(op, s.dims()[0], s.dims()[1], "apply_operator");
    return contract(op, s, {{2, 0}, {3, 1}});
}

ScfMap scf_from_grid(const ComplexMultiArray &grid, const std::vector<double> &angles,
                     bool normalize)
{
    require_grid_rank3(grid, angles, "scf");
    ComplexMultiArray gram = column_gram(grid);
    if (normalize)
        normalize_gram(gram);
    return {angles, std::move(gram), normalize};
}

ScfMap scf(const WidebandManifold &manifold, const std::vector<double> &angles, bool normalize,
           unsigned n_threads)
{
    return scf_from_grid(steering_grid(manifold, angles, n_threads), angles, normalize);
}

ScfMap effective_scf_from_grid(const ComplexMultiArray &grid, const ComplexMultiArray &op,
                               const std::vector<double> &angles, bool normalize)
{
    require_grid_rank3(grid, angles, "effective_scf");
    require_operator_dims(op, grid.dims()[0], grid.dims()[1], "effective_scf");
    ComplexMultiArray processed = contract(op, grid, {{2, 0}, {3, 1}});
    ComplexMultiArray gram = column_gram(processed);
    if (normalize)
        normalize_gram(gram);
    return {angles, std::move(gram), normalize};
}

ScfMap effective_scf(const WidebandManifold &manifold, const ComplexMultiArray &op,
                     const std::vector<double> &angles, bool normalize, unsigned n_threads)
{
    return effective_scf_from_grid(steering_grid(manifold, angles, n_threads), op, angles,
                                   normalize);
}

CorrMap correlation_function_from_grid(const ComplexMultiArray &x, const ComplexMultiArray &grid,
                                       const std::vector<double> &angles, double tau)
{
    require_grid_rank3(grid, angles, "correlation_function");
    if (x.rank() != 2 || x.dims()[0] != grid.dims()[0] || x.dims()[1] != grid.dims()[1])
        throw dimension_error("correlation_function: snapshot extents do not match grid");

    const ComplexMultiArray atoms = delayed_atoms(grid, tau);
    ComplexMultiArray c = contract(conj(x), atoms, {{0, 0}, {1, 1}});
    return {angles, tau, std::vector<std::complex<double>>(c.data(), c.data() + c.size())};
}

CorrMap correlation_function(const ComplexMultiArray &x, const WidebandManifold &manifold,
                             const std::vector<double> &angles, double tau)
{
    return correlation_function_from_grid(x, steering_grid(manifold, angles), angles, tau);
}

CorrMap correlation_function_with_operator_from_grid(const ComplexMultiArray &x,
                                                     const ComplexMultiArray &op,
                                                     const ComplexMultiArray &grid,
                                                     const std::vector<double> &angles,
                                                     double tau)
{
    require_grid_rank3(grid, angles, "correlation_function_with_operator");
    if (x.rank() != 2 || x.dims()[0] != grid.dims()[0] || x.dims()[1] != grid.dims()[1])
        throw dimension_error("correlation_function_with_operator: snapshot extents do not match");
    require_operator_dims(op, grid.dims()[0], grid.dims()[1], "correlation_function_with_operator");

    const ComplexMultiArray atoms = delayed_atoms(grid, tau);
    const ComplexMultiArray x_hat = apply_operator(op, x);
    const ComplexMultiArray atoms_hat = contract(op, atoms, {{2, 0}, {3, 1}});
    ComplexMultiArray c = contract(conj(x_hat), atoms_hat, {{0, 0}, {1, 1}});
    return {angles, tau, std::vector<std::complex<double>>(c.data(), c.data() + c.size())};
}

CorrMap correlation_function_with_operator(const ComplexMultiArray &x,
                                           const ComplexMultiArray &op,
                                           const WidebandManifold &manifold,
                                           const std::vector<double> &angles, double tau)
{
    return correlation_function_with_operator_from_grid(x, op, steering_grid(manifold, angles),
                                                        angles, tau);
}

double peak_sidelobe_level(const CorrMap &map, double mainlobe_halfwidth)
{
    if (!(mainlobe_halfwidth > 0.0))
        throw std::domain_error("peak_sidelobe_level: halfwidth must be positive");
    if (map.angles.empty() || map.values.size() != map.angles.size())
        throw dimension_error("peak_sidelobe_level: malformed correlation map");

    std::vector<double> mag(map.values.size());
    for (std::size_t i = 0; i < mag.size(); ++i)
        mag[i] = std::abs(map.values[i]);
    return curve_psl(map.angles, mag, mainlobe_halfwidth);
}

double peak_sidelobe_level(const ScfMap &map, double mainlobe_halfwidth)
{
    if (!(mainlobe_halfwidth > 0.0))
        throw std::domain_error("peak_sidelobe_level: halfwidth must be positive");
    const std::size_t n = map.angles.size();
    if (n == 0 || map.values.rank() != 2 || map.values.dims()[0] != n ||
        map.values.dims()[1] != n)
        throw dimension_error("peak_sidelobe_level: malformed correlation map");

    // Worst row: every row is itself an angular correlation curve.
    double worst = psl_floor_db;
    std::vector<double> mag(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < n; ++j)
            mag[j] = std::abs(map.values.at(i, j));
        worst = std::max(worst, curve_psl(map.angles, mag, mainlobe_halfwidth));
    }
    return worst;
}

} // namespace wbop
