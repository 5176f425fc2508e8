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

#include <doctest.h>

#include <atomic>
#include <bit>
#include <charconv>
#include <clocale>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include <unistd.h>

using namespace wbop;
using cd = std::complex<double>;
namespace fs = std::filesystem;

namespace
{

struct TempDir
{
    fs::path path;

    TempDir()
    {
        static std::atomic<unsigned> counter{0};
        path = fs::temp_directory_path() / ("wbop_persist_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp_file(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    REQUIRE(bool(in));
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spill_file(const fs::path &p, const std::string &bytes)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    REQUIRE(bool(out));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

tensor_format_error::kind read_failure_kind(const fs::path &p)
{
    try
    {
        (void)read_tensor(p);
    }
    catch (const tensor_format_error &e)
    {
        return e.which();
    }
    FAIL("expected a tensor_format_error");
    return tensor_format_error::kind::bad_magic;
}

// The reference experiment as a key/value map so tests can patch single keys.
std::map<std::string, std::string> base_config()
{
    return {
        {"n_elements", "8"},
        {"spacing_lambda_low", "3.0"},
        {"pattern", "patch"},
        {"carrier_hz", "33e9"},
        {"input_bandwidth_hz", "1e9"},
        {"target_bandwidth_hz", "12e9"},
        {"n_points", "32"},
        {"normalize", "true"},
        {"iterations", "250000"},
        {"batch_size", "50"},
        {"theta_low", "-3.141592653589793"},
        {"theta_high", "3.141592653589793"},
        {"alpha", "0.001"},
        {"beta1", "0.3"},
        {"beta2", "0.999"},
        {"epsilon", "1e-15"},
        {"seed", "1"},
        {"heldout_grid_size", "181"},
        {"checkpoint_every", "500"},
    };
}

std::string render(const std::map<std::string, std::string> &kv)
{
    std::string text = "# reference experiment\n";
    for (const auto &[k, v] : kv)
        text += k + " = " + v + "\n";
    return text;
}

std::string parse_failure_message(const std::string &text)
{
    try
    {
        (void)parse_config_text(text);
    }
    catch (const config_error &e)
    {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("tensor files round-trip bit-exactly across ranks")
{
    TempDir dir;
    const std::vector<std::vector<std::size_t>> shapes = {
        {}, {1}, {5}, {2, 3}, {3, 2, 4}, {2, 2, 2, 2}};
    std::uint64_t seed = 100;
    for (const auto &shape : shapes)
    {
        const auto a = random_complex_normal(shape, seed++);
        const auto file = dir.path / "t.wbt";
        write_tensor(file, a);
        const auto b = read_tensor(file);
        CHECK(a == b);
    }
}

TEST_CASE("non-finite payloads survive the round trip")
{
    TempDir dir;
    ComplexMultiArray a({2, 2});
    a[0] = {std::numeric_limits<double>::quiet_NaN(), 1.0};
    a[1] = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    a[2] = {-0.0, 0.0};
    a[3] = {1e-310, std::numeric_limits<double>::denorm_min()};
    const auto file = dir.path / "nf.wbt";
    write_tensor(file, a);
    const auto b = read_tensor(file);
    REQUIRE(b.dims() == a.dims());
    CHECK(std::memcmp(a.data(), b.data(), 16 * a.size()) == 0);
}

TEST_CASE("tensor header layout is fixed little-endian")
{
    TempDir dir;
    const auto a = random_complex_normal({32, 8}, 7);
    const auto file = dir.path / "h.wbt";
    write_tensor(file, a);
    const std::string bytes = slurp_file(file);

    REQUIRE(bytes.size() == 9 + 2 * 8 + 16 * 256);
    CHECK(bytes.compare(0, 4, "WBT1") == 0);
    const unsigned char version[4] = {1, 0, 0, 0};
    CHECK(std::memcmp(bytes.data() + 4, version, 4) == 0);
    CHECK(static_cast<unsigned char>(bytes[8]) == 2);
    const unsigned char dim0[8] = {32, 0, 0, 0, 0, 0, 0, 0};
    const unsigned char dim1[8] = {8, 0, 0, 0, 0, 0, 0, 0};
    CHECK(std::memcmp(bytes.data() + 9, dim0, 8) == 0);
    CHECK(std::memcmp(bytes.data() + 17, dim1, 8) == 0);

    const auto first_re = std::bit_cast<std::uint64_t>(a[0].real());
    std::uint64_t got = 0;
    for (int i = 0; i < 8; ++i)
        got |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[25 + i])) << (8 * i);
    CHECK(got == first_re);
}

TEST_CASE("tensor failure modes are told apart")
{
    TempDir dir;
    const auto good = dir.path / "good.wbt";
    write_tensor(good, random_complex_normal({2, 3}, 1));
    const std::string bytes = slurp_file(good);

    const auto bad = dir.path / "bad.wbt";

    std::string magic = bytes;
    magic[0] = 'X';
    spill_file(bad, magic);
    CHECK(read_failure_kind(bad) == tensor_format_error::kind::bad_magic);

    std::string version = bytes;
    version[4] = 2;
    spill_file(bad, version);
    CHECK(read_failure_kind(bad) == tensor_format_error::kind::bad_version);

    spill_file(bad, bytes.substr(0, bytes.size() - 1));
    CHECK(read_failure_kind(bad) == tensor_format_error::kind::truncated);

    spill_file(bad, bytes.substr(0, 3));
    CHECK(read_failure_kind(bad) == tensor_format_error::kind::truncated);

    spill_file(bad, bytes.substr(0, 12));
    CHECK(read_failure_kind(bad) == tensor_format_error::kind::truncated);

    // Zero extent.
    std::string zero = bytes.substr(0, 9);
    zero.append(8, '\0');
    spill_file(bad, zero);
    CHECK(read_failure_kind(bad) == tensor_format_error::kind::dims_overflow);

    // Extents whose product cannot be addressed.
    std::string huge = bytes.substr(0, 8);
    huge.push_back(2);
    huge.append(16, '\xff');
    spill_file(bad, huge);
    CHECK(read_failure_kind(bad) == tensor_format_error::kind::dims_overflow);

    CHECK_THROWS_AS((void)read_tensor(dir.path / "missing.wbt"), io_error);
}

TEST_CASE("format_double renders every double reversibly")
{
    const double cases[] = {0.0,
                            -0.0,
                            1.0,
                            -1.5,
                            std::numbers::pi,
                            0.1,
                            1e-308,
                            5e-324,
                            1.7976931348623157e308,
                            6.02214076e23,
                            -2.5e-17};
    for (double v : cases)
    {
        const std::string s = format_double(v);
        double back = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(res.ec == std::errc{});
        CHECK(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v));
        CHECK(s.find(',') == std::string::npos);
    }
}

TEST_CASE("format_double ignores the process locale")
{
    const char *saved = std::setlocale(LC_ALL, nullptr);
    const std::string restore = saved ? saved : "C";
    const bool switched = std::setlocale(LC_ALL, "de_DE.UTF-8") != nullptr ||
                          std::setlocale(LC_ALL, "de_DE") != nullptr;
    const std::string s = format_double(1234.5);
    std::setlocale(LC_ALL, restore.c_str());
    if (!switched)
        return; // no alternative locale installed; nothing to vary
    CHECK(s == "1234.5");
}

TEST_CASE("matrix map CSV round-trips")
{
    TempDir dir;
    ScfMap map;
    map.angles = {-1.0, 0.25, 2.0};
    map.values = random_complex_normal({3, 3}, 55);
    map.normalized = false;
    const auto file = dir.path / "scf.csv";
    write_map_csv(file, map);

    const std::string text = slurp_file(file);
    CHECK(text.rfind("theta1,theta2,re,im,abs\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 10);

    const auto var = read_map_csv(file);
    REQUIRE(std::holds_alternative<ScfMap>(var));
    const auto &back = std::get<ScfMap>(var);
    CHECK(back.angles == map.angles);
    CHECK(back.values == map.values);
}

TEST_CASE("curve map CSV round-trips without the delay")
{
    TempDir dir;
    CorrMap map;
    map.angles = {-2.0, -1.0, 0.0, 1.0, 2.0};
    map.tau = 0.3;
    map.values = {cd(0.1, -0.2), cd(1.0, 0.0), cd(-0.5, 0.5), cd(0.0, 0.0), cd(2.0, -3.0)};
    const auto file = dir.path / "corr.csv";
    write_map_csv(file, map);

    const std::string text = slurp_file(file);
    CHECK(text.rfind("theta,re,im,abs\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);

    const auto var = read_map_csv(file);
    REQUIRE(std::holds_alternative<CorrMap>(var));
    const auto &back = std::get<CorrMap>(var);
    CHECK(back.angles == map.angles);
    CHECK(back.values == map.values);
    CHECK(back.tau == 0.0); // not persisted
}

TEST_CASE("the abs column is ignored on read")
{
    TempDir dir;
    const auto file = dir.path / "doctored.csv";
    spill_file(file, "theta,re,im,abs\n0.5,3,4,999\n");
    const auto var = read_map_csv(file);
    const auto &map = std::get<CorrMap>(var);
    REQUIRE(map.values.size() == 1);
    CHECK(map.values[0] == cd(3.0, 4.0));
    CHECK(std::abs(map.values[0]) == 5.0);
}

TEST_CASE("malformed map CSVs are rejected")
{
    TempDir dir;
    const auto file = dir.path / "bad.csv";

    spill_file(file, "nonsense,header\n1,2,3,4\n");
    CHECK_THROWS_AS((void)read_map_csv(file), dimension_error);

    spill_file(file, "theta,re,im,abs\n1,2,3\n");
    CHECK_THROWS_AS((void)read_map_csv(file), dimension_error);

    spill_file(file, "theta,re,im,abs\n1,garbage,3,4\n");
    CHECK_THROWS_AS((void)read_map_csv(file), dimension_error);

    spill_file(file, "theta,re,im,abs\n");
    CHECK_THROWS_AS((void)read_map_csv(file), dimension_error);

    spill_file(file, "");
    CHECK_THROWS_AS((void)read_map_csv(file), dimension_error);

    // Two rows cannot form a square pair listing.
    spill_file(file, "theta1,theta2,re,im,abs\n0,0,1,0,1\n0,1,1,0,1\n");
    CHECK_THROWS_AS((void)read_map_csv(file), dimension_error);

    CHECK_THROWS_AS((void)read_map_csv(dir.path / "missing.csv"), io_error);
}

TEST_CASE("training log CSV has the documented layout")
{
    TempDir dir;
    const auto file = dir.path / "log.csv";
    write_log_csv(file, {{500, 12.5, 10.25}, {1000, 6.0, 5.0}});
    CHECK(slurp_file(file) == "iteration,batch_error,heldout_error\n"
                              "500,12.5,10.25\n"
                              "1000,6,5\n");
}

TEST_CASE("the reference configuration parses into the experiment objects")
{
    const auto cfg = parse_config_text(render(base_config()));
    CHECK(cfg.n_elements == 8);
    CHECK(cfg.pattern.kind == ElementPattern::Kind::patch);
    CHECK(cfg.pattern.exponent == 1.0);
    CHECK(cfg.carrier_hz == 33e9);
    CHECK(cfg.input_bandwidth_hz == 1e9);
    CHECK(cfg.target_bandwidth_hz == 12e9);
    CHECK(cfg.n_points == 32);
    CHECK(cfg.normalize);
    CHECK(cfg.spacing_m ==
          doctest::Approx(3.0 * speed_of_light_m_s / 32.5e9).epsilon(1e-12));

    CHECK(cfg.design.iterations == 250000);
    CHECK(cfg.design.batch_size == 50);
    CHECK(cfg.design.theta_low == -3.141592653589793);
    CHECK(cfg.design.theta_high == 3.141592653589793);
    CHECK(cfg.design.alpha == 0.001);
    CHECK(cfg.design.beta1 == 0.3);
    CHECK(cfg.design.beta2 == 0.999);
    CHECK(cfg.design.epsilon == 1e-15);
    CHECK(cfg.design.seed == 1);
    CHECK(cfg.design.heldout_grid_size == 181);
    CHECK(cfg.design.checkpoint_every == 500);

    const auto input = cfg.input_manifold();
    const auto target = cfg.target_manifold();
    CHECK(input.n_frequencies() == 32);
    CHECK(input.n_elements() == 8);
    CHECK(input.grid().bandwidth_hz() == 1e9);
    CHECK(target.grid().bandwidth_hz() == 12e9);
}

TEST_CASE("config rejections name the offending key")
{
    auto kv = base_config();
    kv["beta1"] = "1.5";
    CHECK(parse_failure_message(render(kv)).find("beta1") != std::string::npos);

    kv = base_config();
    kv["made_up_key"] = "1";
    CHECK(parse_failure_message(render(kv)).find("made_up_key") != std::string::npos);

    kv = base_config();
    kv.erase("carrier_hz");
    CHECK(parse_failure_message(render(kv)).find("carrier_hz") != std::string::npos);

    kv = base_config();
    kv["spacing_m"] = "0.01";
    CHECK(parse_failure_message(render(kv)).find("spacing") != std::string::npos);

    kv = base_config();
    kv.erase("spacing_lambda_low");
    CHECK(parse_failure_message(render(kv)).find("spacing") != std::string::npos);

    kv = base_config();
    kv["normalize"] = "maybe";
    CHECK(parse_failure_message(render(kv)).find("normalize") != std::string::npos);

    kv = base_config();
    kv["alpha"] = "not_a_number";
    CHECK(parse_failure_message(render(kv)).find("alpha") != std::string::npos);

    kv = base_config();
    kv["pattern"] = "horn";
    CHECK(parse_failure_message(render(kv)).find("pattern") != std::string::npos);

    kv = base_config();
    kv["n_elements"] = "1";
    CHECK(parse_failure_message(render(kv)).find("n_elements") != std::string::npos);

    kv = base_config();
    kv["n_points"] = "1";
    CHECK(parse_failure_message(render(kv)).find("bandwidth") != std::string::npos);

    const std::string dup = render(base_config()) + "seed = 2\n";
    CHECK(parse_failure_message(dup).find("seed") != std::string::npos);

    CHECK(parse_failure_message("n_elements 8\n").find("key = value") != std::string::npos);
}

TEST_CASE("narrowband configs need explicitly zero bandwidths")
{
    auto kv = base_config();
    kv["n_points"] = "1";
    kv["input_bandwidth_hz"] = "0";
    kv["target_bandwidth_hz"] = "0";
    kv["spacing_lambda_low"] = "0.5";
    const auto cfg = parse_config_text(render(kv));
    CHECK(cfg.n_points == 1);
    CHECK(cfg.input_grid().frequency_hz(0) == 33e9);
    CHECK(cfg.spacing_m == doctest::Approx(0.5 * speed_of_light_m_s / 33e9).epsilon(1e-12));
}

TEST_CASE("config comments and spacing are tolerated")
{
    auto kv = base_config();
    std::string text = "# full-width comment\n\n";
    for (const auto &[k, v] : kv)
        text += "  " + k + "   =   " + v + "   # trailing note\n";
    const auto cfg = parse_config_text(text);
    CHECK(cfg.n_elements == 8);
    CHECK(cfg.design.seed == 1);

    // Optional keys may be absent entirely.
    kv.erase("normalize");
    kv.erase("heldout_grid_size");
    kv.erase("checkpoint_every");
    const auto sparse = parse_config_text(render(kv));
    CHECK(sparse.normalize);
    CHECK(sparse.design.heldout_grid_size == 181);
    CHECK(sparse.design.checkpoint_every == 500);
}

TEST_CASE("config files are read through the same parser")
{
    TempDir dir;
    const auto file = dir.path / "run.cfg";
    spill_file(file, render(base_config()));
    const auto cfg = parse_config(file);
    CHECK(cfg.n_elements == 8);
    CHECK_THROWS_AS((void)parse_config(dir.path / "missing.cfg"), config_error);
}
