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

#ifndef WBOP_DESIGN_HPP
#define WBOP_DESIGN_HPP

#include "wbop/manifold.hpp"
#include "wbop/multiway.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace wbop
{

/*!
The four-way linear operator out_f x out_r x in_f x in_r that maps snapshots
of the low-bandwidth system into the shaped output space. Extents are fixed
at construction; by default the output extents match the input ones.
*/
class OperatorTensor
{
  public:
    explicit OperatorTensor(ComplexMultiArray phi);

    // Square operator with standard complex normal entries, reproducible
    // from the seed.
    static OperatorTensor random(std::size_t n_f, std::size_t n_r, std::uint64_t seed);

    static OperatorTensor identity(std::size_t n_f, std::size_t n_r);

    const ComplexMultiArray &values() const noexcept { return phi_; }

    std::size_t out_f() const noexcept { return phi_.dims()[0]; }
    std::size_t out_r() const noexcept { return phi_.dims()[1]; }
    std::size_t in_f() const noexcept { return phi_.dims()[2]; }
    std::size_t in_r() const noexcept { return phi_.dims()[3]; }

  private:
    ComplexMultiArray phi_;
};

/*!
Target and input steering stacks evaluated on one shared angle list, both of
extents n_f x n_r x n_angles. `target` comes from the high-bandwidth system
the design tries to imitate, `input` from the low-bandwidth system the
operator acts on.
*/
struct ManifoldGridPair
{
    ComplexMultiArray target;
    ComplexMultiArray input;
    std::vector<double> angles;
};

// Evaluates both manifolds on the same angles. They must agree in frequency
// point count and element count.
ManifoldGridPair make_grid_pair(const WidebandManifold &input_manifold,
                                const WidebandManifold &target_manifold,
                                const std::vector<double> &angles, unsigned n_threads = 1);

/*!
Hyperparameters of the stochastic operator design. theta_low/theta_high bound
the angular region the operator is shaped for; each iteration draws
batch_size angles uniformly from it. Progress is recorded every
checkpoint_every iterations on a fixed held-out grid of heldout_grid_size
angles that is unrelated to the training draws.
*/
struct DesignConfig
{
    std::uint64_t iterations = 250000;
    std::size_t batch_size = 50;
    double theta_low = -3.141592653589793;
    double theta_high = 3.141592653589793;
    double alpha = 0.001;
    double beta1 = 0.3;
    double beta2 = 0.999;
    double epsilon = 1e-15;
    std::uint64_t seed = 1;
    std::size_t heldout_grid_size = 181;
    std::uint64_t checkpoint_every = 500;

    // Throws config_error naming the offending field.
    void validate() const;
};

// Momentum and squared-gradient accumulator of the ADAM recursion. v is
// entrywise nonnegative real; both start at zero.
struct AdamState
{
    ComplexMultiArray z;
    std::vector<double> v;
    std::uint64_t k = 0;

    static AdamState zeros(const std::vector<std::size_t> &dims);
};

/*!
Mismatch between the operator-processed input correlations and the target
correlations on the pair's angle list:

  e_{i,j} = <phi c_i, phi c_j> - <t_i, t_j>

an n_angles x n_angles Hermitian matrix that vanishes exactly when the
effective correlation structure matches the target.
*/
ComplexMultiArray error_matrix(const ComplexMultiArray &phi, const ManifoldGridPair &pair);

// Squared Frobenius norm of the error matrix.
double objective(const ComplexMultiArray &phi, const ManifoldGridPair &pair);

/*!
Descent gradient of the objective with respect to the conjugate operator
entries: G = 2 (phi C) e C^H in flattened-matrix form. A step phi - eta G
decreases the objective to first order, and G vanishes wherever the error
matrix does. Central finite differences of the objective recover
2 Re(G) / 2 Im(G) per real coordinate.
*/
ComplexMultiArray wirtinger_gradient(const ComplexMultiArray &phi, const ManifoldGridPair &pair);

/*!
One ADAM update without bias correction:

  z' = beta1 z + (1 - beta1) d
  v' = beta2 v + (1 - beta2) |d|^2      (elementwise, real)
  phi' = phi - alpha z' / sqrt(v' + epsilon)

Returns the updated operator and state; inputs are untouched.
*/
std::pair<ComplexMultiArray, AdamState> adam_step(const ComplexMultiArray &phi,
                                                  const AdamState &state,
                                                  const ComplexMultiArray &gradient,
                                                  const DesignConfig &config);

// One training-log row. Batch objective is the mini-batch error of that
// iteration; the held-out objective is measured on the fixed evaluation grid
// after the update.
struct TrainingRecord
{
    std::uint64_t iteration = 0;
    double batch_objective = 0.0;
    double heldout_objective = 0.0;
};

using ProgressSink = std::function<void(const TrainingRecord &, const ComplexMultiArray &phi)>;

struct DesignResult
{
    OperatorTensor op;
    std::vector<TrainingRecord> log;
    double initial_heldout_objective = 0.0;
    double final_heldout_objective = 0.0;
    std::vector<double> heldout_angles;
};

/*!
Mini-batch ADAM design of the operator.

The operator starts from standard complex normal entries drawn from
config.seed; every iteration draws batch_size angles uniformly from the focus
region, evaluates both manifolds on them, and applies one ADAM update with the
batch gradient. Every checkpoint_every iterations a TrainingRecord is appended
to the log and handed to the sink together with the current operator. The
run is bit-reproducible for a fixed seed, independently of n_threads.
*/
DesignResult design_operator(const WidebandManifold &input_manifold,
                             const WidebandManifold &target_manifold, const DesignConfig &config,
                             const ProgressSink &sink = {}, unsigned n_threads = 1);

} // namespace wbop

#endif
