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

#ifndef WBOP_ERRORS_HPP
#define WBOP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wbop
{

// Axis extents of two operands do not conform.
class dimension_error : public std::invalid_argument
{
  public:
    explicit dimension_error(const std::string &what) : std::invalid_argument(what) {}
};

// A configuration file or flag set is invalid; the message names the offending key.
class config_error : public std::runtime_error
{
  public:
    explicit config_error(const std::string &what) : std::runtime_error(what) {}
};

// The operating system refused a read or write.
class io_error : public std::runtime_error
{
  public:
    explicit io_error(const std::string &what) : std::runtime_error(what) {}
};

// A tensor file is structurally broken. Each failure mode is distinct so
// callers can tell a stale format from a short download from a corrupt header.
class tensor_format_error : public std::runtime_error
{
  public:
    enum class kind
    {
        bad_magic,
        bad_version,
        truncated,
        dims_overflow
    };

    tensor_format_error(kind k, const std::string &what) : std::runtime_error(what), kind_(k) {}

    kind which() const noexcept { return kind_; }

  private:
    kind kind_;
};

} // namespace wbop

#endif
