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

#include "wbop/design.hpp"
#include "wbop/correlation.hpp"
#include "wbop/errors.hpp"

#include <cmath>
#include <utility>

namespace wbop
{

OperatorTensor::OperatorTensor(ComplexMultiArray phi) : phi_(std::move(phi))
{
    if (phi_.rank() != 4)
        throw dimension_error("OperatorTensor: operator must have four axes");
}

OperatorTensor OperatorTensor::random(std::size_t n_f, std::size_t n_r, std::uint64_t seed)
{
    return OperatorTensor(random_complex_normal({n_f, n_r, n_f, n_r}, seed));
}

OperatorTensor OperatorTensor::identity(std::size_t n_f, std::size_t n_r)
{
    return OperatorTensor(identity_operator(n_f, n_r));
}

ManifoldGridPair make_grid_pair(const WidebandManifold &input_manifold,
                                const WidebandManifold &target_manifold,
                                const std::vector<double> &angles, unsigned n_threads)
{
    if (input_manifold.n_frequencies() != target_manifold.n_frequencies() ||
        input_manifold.n_elements() != target_manifold.n_elements())
        throw dimension_error("make_grid_pair: manifolds must share frequency and element counts");
    return {steering_grid(target_manifold, angles, n_threads),
            steering_grid(input_manifold, angles, n_threads), angles};
}

void DesignConfig::validate() const
{
    if (batch_size < 1)
        throw config_error("batch_size: must be at least 1");
    if (!(theta_low < theta_high))
        throw config_error("theta_low/theta_high: need theta_low < theta_high");
    if (!(alpha > 0.0))
        throw config_error("alpha: must be positive");
    if (!(beta1 >= 0.0 && beta1 <= 1.0))
        throw config_error("beta1: must lie in [0, 1]");
    if (!(beta2 >= 0.0 && beta2 <= 1.0))
        throw config_error("beta2: must lie in [0, 1]");
    if (!(epsilon > 0.0))
        throw config_error("epsilon: must be positive");
    if (heldout_grid_size < 1)
        throw config_error("heldout_grid_size: must be at least 1");
    if (checkpoint_every < 1)
        throw config_error("checkpoint_every: must be at least 1");
}

AdamState AdamState::zeros(const std::vector<std::size_t> &dims)
{
    AdamState s;
    s.z = ComplexMultiArray(dims);
    s.v.assign(s.z.size(), 0.0);
    s.k = 0;
    return s;
}

namespace
{

void require_pair_dims(const ComplexMultiArray &phi, const ManifoldGridPair &pair)
{
    if (phi.rank() != 4)
        throw dimension_error("design: operator must have four axes");
    if (pair.input.rank() != 3 || pair.target.rank() != 3)
        throw dimension_error("design: grid stacks must have three axes");
    if (pair.input.dims() != pair.target.dims())
        throw dimension_error("design: target and input stacks must share extents");
    if (pair.input.dims()[2] != pair.angles.size())
        throw dimension_error("design: angle list does not match stack extent");
    if (phi.dims()[2] != pair.input.dims()[0] || phi.dims()[3] != pair.input.dims()[1])
        throw dimension_error("design: operator input extents do not match the grids");
}

struct BatchEval
{
    ComplexMultiArray processed; // phi applied to every input column
    ComplexMultiArray e;
    double objective = 0.0;
};

BatchEval evaluate_error(const ComplexMultiArray &phi, const ManifoldGridPair &pair)
{
    BatchEval ev;
    ev.processed = contract(phi, pair.input, {{2, 0}, {3, 1}});
    const ComplexMultiArray gram_out = contract(conj(ev.processed), ev.processed, {{0, 0}, {1, 1}});
    const ComplexMultiArray gram_target = contract(conj(pair.target), pair.target, {{0, 0}, {1, 1}});
    ev.e = sub(gram_out, gram_target);
    for (std::size_t i = 0; i < ev.e.size(); ++i)
        ev.objective += std::norm(ev.e[i]);
    return ev;
}

ComplexMultiArray gradient_from_error(const BatchEval &ev, const ManifoldGridPair &pair)
{
    // G = 2 A e C^H over flattened axes: first fold e against the conjugate
    // input columns, then against the processed columns.
    const ComplexMultiArray folded = contract(ev.e, conj(pair.input), {{1, 2}});
    const ComplexMultiArray g = contract(ev.processed, folded, {{2, 0}});
    return scale(g, 2.0);
}

} // namespace

ComplexMultiArray error_matrix(const ComplexMultiArray &phi, const ManifoldGridPair &pair)
{
    require_pair_dims(phi, pair);
    return evaluate_error(phi, pair).e;
}

double objective(const ComplexMultiArray &phi, const ManifoldGridPair &pair)
{
    require_pair_dims(phi, pair);
    return evaluate_error(phi, pair).objective;
}

ComplexMultiArray wirtinger_gradient(const ComplexMultiArray &phi, const ManifoldGridPair &pair)
{
    require_pair_dims(phi, pair);
    const BatchEval ev = evaluate_error(phi, pair);
    return gradient_from_error(ev, pair);
}

std::pair<ComplexMultiArray, AdamState> adam_step(const ComplexMultiArray &phi,
                                                  const AdamState &state,
                                                  const ComplexMultiArray &gradient,
                                                  const DesignConfig &config)
{
    if (phi.dims() != gradient.dims() || phi.dims() != state.z.dims() ||
        phi.size() != state.v.size())
        throw dimension_error("adam_step: operator, state and gradient extents must agree");

    AdamState next;
    next.z = ComplexMultiArray(phi.dims());
    next.v.resize(phi.size());
    next.k = state.k + 1;

    ComplexMultiArray updated(phi.dims());
    const double b1 = config.beta1;
    const double b2 = config.beta2;
    for (std::size_t p = 0; p < phi.size(); ++p)
    {
        const std::complex<double> z = b1 * state.z[p] + (1.0 - b1) * gradient[p];
        const double v = b2 * state.v[p] + (1.0 - b2) * std::norm(gradient[p]);
        const double w = 1.0 / std::sqrt(v + config.epsilon);
        next.z[p] = z;
        next.v[p] = v;
        updated[p] = phi[p] - config.alpha * z * w;
    }
    return {std::move(updated), std::move(next)};
}

DesignResult design_operator(const WidebandManifold &input_manifold,
                             const WidebandManifold &target_manifold, const DesignConfig &config,
                             const ProgressSink &sink, unsigned n_threads)
{
    config.validate();
    if (input_manifold.n_frequencies() != target_manifold.n_frequencies() ||
        input_manifold.n_elements() != target_manifold.n_elements())
        throw dimension_error("design_operator: manifolds must share frequency and element counts");

    const std::size_t n_f = input_manifold.n_frequencies();
    const std::size_t n_r = input_manifold.n_elements();
    const std::vector<std::size_t> phi_dims{n_f, n_r, n_f, n_r};

    // One stream drives the whole run: operator entries first, then the
    // angle draws, so the initialization equals random_complex_normal with
    // the same seed.
    Rng rng(config.seed);
    ComplexMultiArray phi(phi_dims);
    for (std::size_t i = 0; i < phi.size(); ++i)
        phi[i] = rng.complex_normal();

    // Fixed held-out grid: midpoints of a uniform partition of the focus
    // region, strictly inside it and disjoint from typical training draws.
    std::vector<double> heldout_angles(config.heldout_grid_size);
    const double span = config.theta_high - config.theta_low;
    for (std::size_t i = 0; i < heldout_angles.size(); ++i)
        heldout_angles[i] = config.theta_low + (static_cast<double>(i) + 0.5) * span /
                                                   static_cast<double>(heldout_angles.size());
    const ManifoldGridPair heldout =
        make_grid_pair(input_manifold, target_manifold, heldout_angles, n_threads);

    DesignResult result{OperatorTensor(phi), {}, 0.0, 0.0, heldout_angles};
    result.initial_heldout_objective = objective(phi, heldout);

    AdamState state = AdamState::zeros(phi_dims);
    std::vector<double> batch_angles(config.batch_size);

    for (std::uint64_t k = 0; k < config.iterations; ++k)
    {
        for (auto &th : batch_angles)
            th = rng.uniform(config.theta_low, config.theta_high);
        const ManifoldGridPair batch =
            make_grid_pair(input_manifold, target_manifold, batch_angles, n_threads);

        const BatchEval ev = evaluate_error(phi, batch);
        const ComplexMultiArray grad = gradient_from_error(ev, batch);
        auto [phi_next, state_next] = adam_step(phi, state, grad, config);
        phi = std::move(phi_next);
        state = std::move(state_next);

        if ((k + 1) % config.checkpoint_every == 0)
        {
            TrainingRecord rec{k + 1, ev.objective, objective(phi, heldout)};
            result.log.push_back(rec);
            if (sink)
                sink(rec, phi);
        }
    }

    result.final_heldout_objective = objective(phi, heldout);
    result.op = OperatorTensor(std::move(phi));
    return result;
}

} // namespace wbop
