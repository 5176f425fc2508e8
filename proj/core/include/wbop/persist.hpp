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

#ifndef WBOP_PERSIST_HPP
#define WBOP_PERSIST_HPP

#include "wbop/correlation.hpp"
#include "wbop/design.hpp"
#include "wbop/manifold.hpp"
#include "wbop/multiway.hpp"

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace wbop
{

/*!
Tensor wire format, fixed little-endian:

  bytes 0..3   magic "WBT1"
  bytes 4..7   format version, unsigned 32-bit (currently 1)
  byte  8      number of axes, unsigned 8-bit
  then         one unsigned 64-bit extent per axis
  then         product(extents) entries, each an IEEE-754 double pair (re, im),
               row-major with the last axis fastest

Total payload is 16 * product(extents) bytes. Reading back a written file
reproduces the array bit-exactly, including any non-finite payloads.
*/
inline constexpr char tensor_magic[4] = {'W', 'B', 'T', '1'};
inline constexpr std::uint32_t tensor_version = 1;

void write_tensor(const std::filesystem::path &path, const ComplexMultiArray &a);

// Throws io_error when the file cannot be read and tensor_format_error with
// the matching kind for a wrong magic, an unknown version, a truncated file
// or unusable extents.
ComplexMultiArray read_tensor(const std::filesystem::path &path);

// Locale-independent decimal rendering with 17 significant digits (enough to
// round-trip any double).
std::string format_double(double v);

/*!
CSV export of correlation maps. ScfMap rows are `theta1,theta2,re,im,abs`
over all angle pairs in row-major order; CorrMap rows are `theta,re,im,abs`.
All numbers use format_double.
*/
void write_map_csv(const std::filesystem::path &path, const ScfMap &map);
void write_map_csv(const std::filesystem::path &path, const CorrMap &map);

// Reads either map kind back, telling them apart by the header row. The abs
// column is recomputed, not trusted. Structural problems raise a
// dimension_error; unreadable files raise an io_error.
std::variant<ScfMap, CorrMap> read_map_csv(const std::filesystem::path &path);

// Training log rows `iteration,batch_error,heldout_error`.
void write_log_csv(const std::filesystem::path &path, const std::vector<TrainingRecord> &log);

/*!
One experiment configuration: the ring array, the element pattern, the two
measurement bands (input = the low-bandwidth system the operator acts on,
target = the high-bandwidth system it imitates) and the design
hyperparameters.

The element spacing comes either as `spacing_m` directly or as
`spacing_lambda_low`, a multiple of the wavelength of the input band's lowest
sub-carrier; exactly one of the two must be present.
*/
struct RunConfig
{
    std::size_t n_elements = 8;
    double spacing_m = 0.0; // resolved to meters whichever key supplied it
    ElementPattern pattern = ElementPattern::make_isotropic();
    double carrier_hz = 33e9;
    double input_bandwidth_hz = 1e9;
    double target_bandwidth_hz = 12e9;
    std::size_t n_points = 32;
    bool normalize = true;
    DesignConfig design;

    RingArrayGeometry geometry() const { return {n_elements, spacing_m}; }
    FrequencyGrid input_grid() const { return {carrier_hz, input_bandwidth_hz, n_points}; }
    FrequencyGrid target_grid() const { return {carrier_hz, target_bandwidth_hz, n_points}; }
    WidebandManifold input_manifold() const
    {
        return {geometry(), pattern, input_grid(), normalize};
    }
    WidebandManifold target_manifold() const
    {
        return {geometry(), pattern, target_grid(), normalize};
    }
};

/*!
Parses the flat `key = value` format (one pair per line, `#` starts a
comment). Unknown keys, duplicate keys, missing required keys, unparsable
values and out-of-range values all raise config_error naming the key.
*/
RunConfig parse_config(const std::filesystem::path &path);
RunConfig parse_config_text(const std::string &text);

} // namespace wbop

#endif
