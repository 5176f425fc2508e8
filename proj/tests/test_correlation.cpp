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

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

using namespace wbop;
using cd = std::complex<double>;

namespace
{

constexpr double pi = std::numbers::pi;

WidebandManifold reference_manifold(ElementPattern pattern)
{
    const FrequencyGrid grid(33e9, 1e9, 32);
    const RingArrayGeometry geo(8, 3.0 * grid.lowest_wavelength_m());
    return {geo, pattern, grid, true};
}

// Uniform half-wavelength line along y, one frequency point; its correlation
// is the classical Dirichlet kernel in sin(theta).
WidebandManifold line_manifold(std::size_t n)
{
    const double f0 = 3e9;
    const double lambda = speed_of_light_m_s / f0;
    std::vector<Vec3> pos(n), bore(n, {1.0, 0.0, 0.0});
    for (std::size_t m = 0; m < n; ++m)
        pos[m] = {0.0, static_cast<double>(m) * lambda / 2.0, 0.0};
    return {pos, bore, ElementPattern::make_isotropic(), FrequencyGrid(f0, 0.0, 1), true};
}

double max_abs_diff(const ComplexMultiArray &a, const ComplexMultiArray &b)
{
    REQUIRE(a.dims() == b.dims());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

std::vector<double> linspace_open(double lo, double hi, std::size_t n)
{
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    return g;
}

} // namespace

TEST_CASE("apply_operator agrees with an explicit quadruple loop")
{
    const auto op = random_complex_normal({3, 2, 4, 5}, 11);
    const auto s = random_complex_normal({4, 5}, 12);
    const auto got = apply_operator(op, s);
    REQUIRE(got.dims() == std::vector<std::size_t>{3, 2});

    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 2; ++b)
        {
            cd want = 0.0;
            for (std::size_t c = 0; c < 4; ++c)
                for (std::size_t d = 0; d < 5; ++d)
                    want += op.at(a, b, c, d) * s.at(c, d);
            CHECK(std::abs(got.at(a, b) - want) <= 1e-13);
        }

    CHECK_THROWS_AS((void)apply_operator(op, random_complex_normal({5, 4}, 1)),
                    dimension_error);
    CHECK_THROWS_AS((void)apply_operator(random_complex_normal({4, 5}, 1), s),
                    dimension_error);
}

TEST_CASE("the identity operator is transparent")
{
    const auto s = random_complex_normal({6, 3}, 21);
    const auto id = identity_operator(6, 3);
    CHECK(max_abs_diff(apply_operator(id, s), s) == 0.0);

    const auto m = reference_manifold(ElementPattern::make_isotropic());
    const auto angles = default_angle_grid(48);
    const auto plain = scf(m, angles);
    const auto effective = effective_scf(m, identity_operator(32, 8), angles);
    CHECK(max_abs_diff(plain.values, effective.values) == 0.0);
    CHECK(plain.normalized);
    CHECK(effective.normalized);
}

TEST_CASE("two-element narrowband correlation has the textbook closed form")
{
    const auto m = line_manifold(2);
    const std::vector<double> angles{0.0, pi / 2.0, -pi / 2.0, 0.7};
    const auto map = scf(m, angles);
    for (std::size_t i = 0; i < angles.size(); ++i)
        for (std::size_t j = 0; j < angles.size(); ++j)
        {
            const double ds = std::sin(angles[j]) - std::sin(angles[i]);
            const cd want = (1.0 + std::polar(1.0, pi * ds)) / 2.0;
            CHECK(std::abs(map.values.at(i, j) - want) <= 1e-12);
        }
    // Broadside and endfire are exactly uncorrelated for this pair.
    CHECK(std::abs(map.values.at(std::size_t(0), std::size_t(1))) <= 1e-12);
}

TEST_CASE("correlation maps are Hermitian with unit diagonal and bounded modulus")
{
    const auto m = reference_manifold(ElementPattern::make_patch(1.0));
    const auto angles = default_angle_grid(64);
    const auto map = scf(m, angles);
    for (std::size_t i = 0; i < angles.size(); ++i)
    {
        CHECK(std::abs(map.values.at(i, i) - cd(1.0, 0.0)) <= 1e-12);
        for (std::size_t j = 0; j < angles.size(); ++j)
        {
            CHECK(std::abs(map.values.at(i, j) - std::conj(map.values.at(j, i))) <= 1e-12);
            CHECK(std::abs(map.values.at(i, j)) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("unnormalized correlation is the raw Gram matrix")
{
    const auto m = reference_manifold(ElementPattern::make_isotropic());
    const auto angles = default_angle_grid(16);
    const auto grid = steering_grid(m, angles);
    const auto map = scf_from_grid(grid, angles, false);
    CHECK_FALSE(map.normalized);
    for (std::size_t i = 0; i < angles.size(); ++i)
        for (std::size_t j = 0; j < angles.size(); ++j)
        {
            cd want = 0.0;
            for (std::size_t k = 0; k < 32; ++k)
                for (std::size_t r = 0; r < 8; ++r)
                    want += std::conj(grid.at(k, r, i)) * grid.at(k, r, j);
            CHECK(std::abs(map.values.at(i, j) - want) <= 1e-12);
        }
}

TEST_CASE("matched filtering peaks at the true angle with unit gain")
{
    const auto m = reference_manifold(ElementPattern::make_isotropic());
    const auto angles = default_angle_grid(720);
    const double theta0 = angles[449];
    CHECK(theta0 == pi / 4.0);

    const double tau = 0.3;
    const auto x = synthesize_channel(m, {{cd(1.0, 0.0), theta0, tau}}, 0.0, 0);
    const auto map = correlation_function(x, m, angles, tau);
    REQUIRE(map.values.size() == 720);
    CHECK(map.tau == tau);

    std::size_t peak = 0;
    for (std::size_t i = 1; i < map.values.size(); ++i)
        if (std::abs(map.values[i]) > std::abs(map.values[peak]))
            peak = i;
    CHECK(peak == 449);
    CHECK(std::abs(map.values[449]) == doctest::Approx(1.0).epsilon(1e-10));
    for (const auto &v : map.values)
        CHECK(std::abs(v) <= 1.0 + 1e-10);
}

TEST_CASE("correlation magnitude ignores a global snapshot phase")
{
    const auto m = reference_manifold(ElementPattern::make_patch(1.0));
    const auto angles = default_angle_grid(90);
    const auto x = synthesize_channel(m, {{cd(0.3, -1.1), 0.4, 0.6}}, 0.0, 0);
    const auto rotated = scale(x, std::polar(1.0, 1.3));
    const auto c1 = correlation_function(x, m, angles, 0.6);
    const auto c2 = correlation_function(rotated, m, angles, 0.6);
    for (std::size_t i = 0; i < angles.size(); ++i)
        CHECK(std::abs(std::abs(c1.values[i]) - std::abs(c2.values[i])) <= 1e-12);
}

TEST_CASE("operator-aware correlation reduces to the plain one under identity")
{
    const auto m = reference_manifold(ElementPattern::make_isotropic());
    const auto angles = default_angle_grid(60);
    const auto x = synthesize_channel(m, {{cd(1.0, 0.2), -0.9, 0.5}}, 0.0, 0);
    const auto id = identity_operator(32, 8);
    const auto plain = correlation_function(x, m, angles, 0.5);
    const auto via_op = correlation_function_with_operator(x, id, m, angles, 0.5);
    for (std::size_t i = 0; i < angles.size(); ++i)
        CHECK(std::abs(plain.values[i] - via_op.values[i]) == 0.0);
}

TEST_CASE("operator-aware correlation matches per-angle application")
{
    const auto m = line_manifold(4);
    const auto angles = default_angle_grid(24);
    const auto grid = steering_grid(m, angles);
    const auto op = random_complex_normal({1, 4, 1, 4}, 5);
    const auto x = synthesize_channel(m, {{cd(1.0, 0.0), 0.2, 0.7}}, 0.0, 0);

    const auto got = correlation_function_with_operator_from_grid(x, op, grid, angles, 0.7);
    const auto x_hat = apply_operator(op, x);
    const auto d = delay_steering(m.grid(), 0.7);
    for (std::size_t i = 0; i < angles.size(); ++i)
    {
        ComplexMultiArray atom({1, 4});
        for (std::size_t r = 0; r < 4; ++r)
            atom.at(std::size_t(0), r) = grid.at(std::size_t(0), r, i) * d[0];
        const auto atom_hat = apply_operator(op, atom);
        cd want = 0.0;
        for (std::size_t r = 0; r < 4; ++r)
            want += std::conj(x_hat.at(std::size_t(0), r)) * atom_hat.at(std::size_t(0), r);
        CHECK(std::abs(got.values[i] - want) <= 1e-12);
    }
}

TEST_CASE("the zero operator annihilates every correlation")
{
    const auto m = line_manifold(3);
    const auto angles = default_angle_grid(12);
    const ComplexMultiArray zero({1, 3, 1, 3});
    const auto map = effective_scf(m, zero, angles);
    for (std::size_t i = 0; i < map.values.size(); ++i)
        CHECK(map.values[i] == cd(0.0, 0.0));
    CHECK(peak_sidelobe_level(map, 0.5) == psl_floor_db);
}

TEST_CASE("a sixteen-element line array shows the classical first-sidelobe level")
{
    const auto m = line_manifold(16);
    const auto angles = linspace_open(-pi / 2.0, pi / 2.0, 2001);
    const auto x = synthesize_channel(m, {{cd(1.0, 0.0), 0.0, 1.0}}, 0.0, 0);
    const auto map = correlation_function(x, m, angles, 1.0);

    // Closed form: |C(theta)| = |sin(N pi s / 2)| / (N |sin(pi s / 2)|),
    // s = sin(theta).
    for (std::size_t i = 0; i < angles.size(); i += 97)
    {
        const double s = std::sin(angles[i]);
        const double num = std::abs(std::sin(16.0 * pi * s / 2.0));
        const double den = 16.0 * std::abs(std::sin(pi * s / 2.0));
        const double want = den > 1e-12 ? num / den : 1.0;
        CHECK(std::abs(std::abs(map.values[i]) - want) <= 1e-10);
    }

    const double psl = peak_sidelobe_level(map, 0.13);
    CHECK(psl >= -13.6);
    CHECK(psl <= -13.0);
}

TEST_CASE("peak side-lobe level handles degenerate maps explicitly")
{
    CorrMap delta{{0.0, 1.0, 2.0}, 0.5, {cd(1.0, 0.0), cd(0.0, 0.0), cd(0.0, 0.0)}};
    CHECK(peak_sidelobe_level(delta, 0.5) == psl_floor_db);

    CorrMap tight{{0.0, 0.1}, 0.5, {cd(1.0, 0.0), cd(0.5, 0.0)}};
    CHECK_THROWS_AS((void)peak_sidelobe_level(tight, 3.2), std::domain_error);
    CHECK_THROWS_AS((void)peak_sidelobe_level(delta, 0.0), std::domain_error);
    CHECK_THROWS_AS((void)peak_sidelobe_level(delta, -1.0), std::domain_error);

    CorrMap malformed{{0.0, 1.0}, 0.5, {cd(1.0, 0.0)}};
    CHECK_THROWS_AS((void)peak_sidelobe_level(malformed, 0.5), dimension_error);
}

TEST_CASE("matrix-map side-lobe level reports the worst row")
{
    ScfMap map;
    map.angles = {0.0, 1.0, 2.0};
    map.values = ComplexMultiArray({3, 3});
    map.normalized = true;
    // Row peaks on the diagonal; off-diagonal levels 0.1, 0.2 and 0.
    map.values.at(std::size_t(0), std::size_t(0)) = 1.0;
    map.values.at(std::size_t(0), std::size_t(1)) = 0.1;
    map.values.at(std::size_t(1), std::size_t(0)) = 0.2;
    map.values.at(std::size_t(1), std::size_t(1)) = 1.0;
    map.values.at(std::size_t(2), std::size_t(2)) = 1.0;

    const double psl = peak_sidelobe_level(map, 0.5);
    CHECK(psl == doctest::Approx(20.0 * std::log10(0.2)).epsilon(1e-12));
}

TEST_CASE("correlation inputs are validated")
{
    const auto m = line_manifold(3);
    const auto angles = default_angle_grid(8);
    const auto grid = steering_grid(m, angles);
    const auto x = synthesize_channel(m, {{cd(1.0, 0.0), 0.1, 0.4}}, 0.0, 0);

    CHECK_THROWS_AS((void)scf_from_grid(grid, default_angle_grid(9), true), dimension_error);
    CHECK_THROWS_AS((void)scf_from_grid(x, angles, true), dimension_error);
    CHECK_THROWS_AS((void)correlation_function_from_grid(grid, grid, angles, 0.4),
                    dimension_error);
    CHECK_THROWS_AS((void)correlation_function_from_grid(x, grid, angles, 0.0),
                    std::domain_error);
    CHECK_THROWS_AS((void)correlation_function_from_grid(x, grid, angles, 1.1),
                    std::domain_error);
    CHECK_THROWS_AS(
        (void)effective_scf_from_grid(grid, identity_operator(3, 1), angles, true),
        dimension_error);
}
