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

#include "wbop/persist.hpp"
#include "wbop/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace wbop
{

namespace
{

void put_u32le(std::string &out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64le(std::string &out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_double_le(std::string &out, double d)
{
    put_u64le(out, std::bit_cast<std::uint64_t>(d));
}

class ByteReader
{
  public:
    explicit ByteReader(std::string bytes) : bytes_(std::move(bytes)) {}

    bool exhausted_by(std::size_t n) const { return pos_ + n > bytes_.size(); }

    std::uint8_t u8()
    {
        need(1);
        return static_cast<std::uint8_t>(bytes_[pos_++]);
    }

    std::uint32_t u32le()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * i);
        return v;
    }

    std::uint64_t u64le()
    {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * i);
        return v;
    }

    double f64le() { return std::bit_cast<double>(u64le()); }

    void raw(char *dst, std::size_t n)
    {
        need(n);
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }

  private:
    void need(std::size_t n) const
    {
        if (pos_ + n > bytes_.size())
            throw tensor_format_error(tensor_format_error::kind::truncated,
                                      "tensor file ends before its declared payload");
    }

    std::string bytes_;
    std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open " + path.string() + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw io_error("read failure on " + path.string());
    return std::move(buf).str();
}

void spill(const std::filesystem::path &path, const std::string &bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out)
        throw io_error("write failure on " + path.string());
}

} // namespace

void write_tensor(const std::filesystem::path &path, const ComplexMultiArray &a)
{
    if (a.rank() > 255)
        throw dimension_error("write_tensor: more than 255 axes are not representable");
    std::string bytes;
    bytes.reserve(9 + 8 * a.rank() + 16 * a.size());
    bytes.append(tensor_magic, 4);
    put_u32le(bytes, tensor_version);
    bytes.push_back(static_cast<char>(a.rank()));
    for (std::size_t d : a.dims())
        put_u64le(bytes, static_cast<std::uint64_t>(d));
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        put_double_le(bytes, a[i].real());
        put_double_le(bytes, a[i].imag());
    }
    spill(path, bytes);
}

ComplexMultiArray read_tensor(const std::filesystem::path &path)
{
    ByteReader r(slurp(path));

    char magic[4];
    if (r.exhausted_by(4))
        throw tensor_format_error(tensor_format_error::kind::truncated,
                                  "tensor file shorter than its magic");
    r.raw(magic, 4);
    if (std::memcmp(magic, tensor_magic, 4) != 0)
        throw tensor_format_error(tensor_format_error::kind::bad_magic,
                                  "not a tensor file (magic mismatch)");

    const std::uint32_t version = r.u32le();
    if (version != tensor_version)
        throw tensor_format_error(tensor_format_error::kind::bad_version,
                                  "unsupported tensor format version " + std::to_string(version));

    const std::uint8_t ndim = r.u8();
    std::vector<std::size_t> dims(ndim);
    std::size_t total = 1;
    for (auto &d : dims)
    {
        const std::uint64_t e = r.u64le();
        if (e == 0)
            throw tensor_format_error(tensor_format_error::kind::dims_overflow,
                                      "tensor file declares a zero axis extent");
        if (e > std::numeric_limits<std::size_t>::max() / 16 ||
            total > std::numeric_limits<std::size_t>::max() / 16 / static_cast<std::size_t>(e))
            throw tensor_format_error(tensor_format_error::kind::dims_overflow,
                                      "tensor file declares extents beyond addressable memory");
        d = static_cast<std::size_t>(e);
        total *= d;
    }

    if (r.exhausted_by(16 * total))
        throw tensor_format_error(tensor_format_error::kind::truncated,
                                  "tensor file ends before its declared payload");

    std::vector<std::complex<double>> data(total);
    for (auto &v : data)
    {
        const double re = r.f64le();
        const double im = r.f64le();
        v = {re, im};
    }
    return ComplexMultiArray(std::move(dims), std::move(data));
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace
{

double parse_double_field(const std::string &token, const char *what)
{
    double v = 0.0;
    const char *first = token.data();
    const char *last = token.data() + token.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw dimension_error(std::string("map CSV: unparsable ") + what + " field '" + token +
                              "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string &line)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true)
    {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos)
        {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

} // namespace

void write_map_csv(const std::filesystem::path &path, const ScfMap &map)
{
    const std::size_t n = map.angles.size();
    std::string out = "theta1,theta2,re,im,abs\n";
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
        {
            const auto v = map.values.at(i, j);
            out += format_double(map.angles[i]);
            out += ',';
            out += format_double(map.angles[j]);
            out += ',';
            out += format_double(v.real());
            out += ',';
            out += format_double(v.imag());
            out += ',';
            out += format_double(std::abs(v));
            out += '\n';
        }
    spill(path, out);
}

void write_map_csv(const std::filesystem::path &path, const CorrMap &map)
{
    std::string out = "theta,re,im,abs\n";
    for (std::size_t i = 0; i < map.angles.size(); ++i)
    {
        const auto v = map.values[i];
        out += format_double(map.angles[i]);
        out += ',';
        out += format_double(v.real());
        out += ',';
        out += format_double(v.imag());
        out += ',';
        out += format_double(std::abs(v));
        out += '\n';
    }
    spill(path, out);
}

void write_log_csv(const std::filesystem::path &path, const std::vector<TrainingRecord> &log)
{
    std::string out = "iteration,batch_error,heldout_error\n";
    for (const auto &rec : log)
    {
        out += std::to_string(rec.iteration);
        out += ',';
        out += format_double(rec.batch_objective);
        out += ',';
        out += format_double(rec.heldout_objective);
        out += '\n';
    }
    spill(path, out);
}

std::variant<ScfMap, CorrMap> read_map_csv(const std::filesystem::path &path)
{
    std::istringstream in(slurp(path));
    std::string line;
    if (!std::getline(in, line))
        throw dimension_error("map CSV: empty file " + path.string());
    if (!line.empty() && line.back() == '\r')
        line.pop_back();

    const bool is_scf = line == "theta1,theta2,re,im,abs";
    const bool is_corr = line == "theta,re,im,abs";
    if (!is_scf && !is_corr)
        throw dimension_error("map CSV: unrecognized header '" + line + "'");

    std::vector<double> col_theta1;
    std::vector<double> col_theta2;
    std::vector<std::complex<double>> values;
    while (std::getline(in, line))
    {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto fields = split_csv_line(line);
        const std::size_t expected = is_scf ? 5 : 4;
        if (fields.size() != expected)
            throw dimension_error("map CSV: wrong field count in row '" + line + "'");
        std::size_t f = 0;
        col_theta1.push_back(parse_double_field(fields[f++], "angle"));
        if (is_scf)
            col_theta2.push_back(parse_double_field(fields[f++], "angle"));
        const double re = parse_double_field(fields[f++], "re");
        const double im = parse_double_field(fields[f++], "im");
        values.emplace_back(re, im);
    }
    if (values.empty())
        throw dimension_error("map CSV: no data rows in " + path.string());

    if (is_corr)
        return CorrMap{std::move(col_theta1), 0.0, std::move(values)};

    // Square row-major pair listing: the first block of theta2 values is the
    // angle grid, repeated once per theta1.
    const std::size_t n_sq = values.size();
    const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n_sq))));
    if (n == 0 || n * n != n_sq)
        throw dimension_error("map CSV: row count is not a perfect square");
    std::vector<double> angles(col_theta2.begin(), col_theta2.begin() + static_cast<long>(n));
    ComplexMultiArray m({n, n}, std::move(values));
    return ScfMap{std::move(angles), std::move(m), false};
}

namespace
{

std::string trim(const std::string &s)
{
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos)
        return "";
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

class KeyValues
{
  public:
    explicit KeyValues(const std::string &text)
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line))
        {
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw config_error("config line is not 'key = value': '" + line + "'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw config_error("config line has an empty key: '" + line + "'");
            if (pairs_.count(key))
                throw config_error(key + ": duplicate key");
            pairs_[key] = value;
        }
    }

    bool has(const std::string &key) const { return pairs_.count(key) != 0; }

    std::string take(const std::string &key)
    {
        auto it = pairs_.find(key);
        if (it == pairs_.end())
            throw config_error(key + ": required key is missing");
        std::string v = it->second;
        pairs_.erase(it);
        return v;
    }

    std::optional<std::string> take_optional(const std::string &key)
    {
        auto it = pairs_.find(key);
        if (it == pairs_.end())
            return std::nullopt;
        std::string v = it->second;
        pairs_.erase(it);
        return v;
    }

    void reject_leftovers() const
    {
        if (!pairs_.empty())
            throw config_error(pairs_.begin()->first + ": unknown key");
    }

  private:
    std::map<std::string, std::string> pairs_;
};

double to_double(const std::string &key, const std::string &value)
{
    double v = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw config_error(key + ": cannot parse '" + value + "' as a number");
    return v;
}

std::uint64_t to_u64(const std::string &key, const std::string &value)
{
    std::uint64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw config_error(key + ": cannot parse '" + value + "' as a nonnegative integer");
    return v;
}

bool to_bool(const std::string &key, const std::string &value)
{
    if (value == "true")
        return true;
    if (value == "false")
        return false;
    throw config_error(key + ": expected 'true' or 'false', got '" + value + "'");
}

} // namespace

RunConfig parse_config_text(const std::string &text)
{
    KeyValues kv(text);
    RunConfig cfg;

    cfg.n_elements = static_cast<std::size_t>(to_u64("n_elements", kv.take("n_elements")));
    if (cfg.n_elements < 2)
        throw config_error("n_elements: need at least two elements");

    const std::string pattern = kv.take("pattern");
    const auto patch_exponent = kv.take_optional("patch_exponent");
    if (pattern == "isotropic")
    {
        cfg.pattern = ElementPattern::make_isotropic();
    }
    else if (pattern == "patch")
    {
        const double q =
            patch_exponent ? to_double("patch_exponent", *patch_exponent) : 1.0;
        if (!(q >= 0.0))
            throw config_error("patch_exponent: must be nonnegative");
        cfg.pattern = ElementPattern::make_patch(q);
    }
    else
    {
        throw config_error("pattern: expected 'isotropic' or 'patch', got '" + pattern + "'");
    }

    cfg.carrier_hz = to_double("carrier_hz", kv.take("carrier_hz"));
    if (!(cfg.carrier_hz > 0.0))
        throw config_error("carrier_hz: must be positive");

    cfg.n_points = static_cast<std::size_t>(to_u64("n_points", kv.take("n_points")));
    if (cfg.n_points < 1)
        throw config_error("n_points: need at least one frequency point");

    cfg.input_bandwidth_hz = to_double("input_bandwidth_hz", kv.take("input_bandwidth_hz"));
    cfg.target_bandwidth_hz = to_double("target_bandwidth_hz", kv.take("target_bandwidth_hz"));
    for (auto [key, bw] : {std::pair<const char *, double>{"input_bandwidth_hz",
                                                           cfg.input_bandwidth_hz},
                           {"target_bandwidth_hz", cfg.target_bandwidth_hz}})
    {
        if (cfg.n_points == 1)
        {
            if (bw != 0.0)
                throw config_error(std::string(key) +
                                   ": single-point grids require zero bandwidth");
        }
        else if (!(bw > 0.0))
        {
            throw config_error(std::string(key) + ": must be positive");
        }
        if (!(bw < 2.0 * cfg.carrier_hz))
            throw config_error(std::string(key) + ": must stay below twice the carrier");
    }

    const auto spacing_m = kv.take_optional("spacing_m");
    const auto spacing_rel = kv.take_optional("spacing_lambda_low");
    if (spacing_m.has_value() == spacing_rel.has_value())
        throw config_error("spacing_m/spacing_lambda_low: exactly one must be given");
    if (spacing_m)
    {
        cfg.spacing_m = to_double("spacing_m", *spacing_m);
        if (!(cfg.spacing_m > 0.0))
            throw config_error("spacing_m: must be positive");
    }
    else
    {
        const double mult = to_double("spacing_lambda_low", *spacing_rel);
        if (!(mult > 0.0))
            throw config_error("spacing_lambda_low: must be positive");
        cfg.spacing_m = mult * cfg.input_grid().lowest_wavelength_m();
    }

    if (const auto v = kv.take_optional("normalize"))
        cfg.normalize = to_bool("normalize", *v);

    cfg.design.iterations = to_u64("iterations", kv.take("iterations"));
    cfg.design.batch_size = static_cast<std::size_t>(to_u64("batch_size", kv.take("batch_size")));
    cfg.design.theta_low = to_double("theta_low", kv.take("theta_low"));
    cfg.design.theta_high = to_double("theta_high", kv.take("theta_high"));
    cfg.design.alpha = to_double("alpha", kv.take("alpha"));
    cfg.design.beta1 = to_double("beta1", kv.take("beta1"));
    cfg.design.beta2 = to_double("beta2", kv.take("beta2"));
    cfg.design.epsilon = to_double("epsilon", kv.take("epsilon"));
    cfg.design.seed = to_u64("seed", kv.take("seed"));
    if (const auto v = kv.take_optional("heldout_grid_size"))
        cfg.design.heldout_grid_size = static_cast<std::size_t>(to_u64("heldout_grid_size", *v));
    if (const auto v = kv.take_optional("checkpoint_every"))
        cfg.design.checkpoint_every = to_u64("checkpoint_every", *v);

    kv.reject_leftovers();
    cfg.design.validate();
    return cfg;
}

RunConfig parse_config(const std::filesystem::path &path)
{
    std::ifstream probe(path);
    if (!probe)
        throw config_error("cannot open config file " + path.string());
    probe.close();
    return parse_config_text(slurp(path));
}

} // namespace wbop
