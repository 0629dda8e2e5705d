// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace floeberg {

template <class... Parts>
std::string msg(Parts&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    return os.str();
}

[[noreturn]] inline void fail_arg(const std::string& m) { throw std::invalid_argument(m); }
[[noreturn]] inline void fail_data(const std::string& m) { throw std::runtime_error(m); }

}  // namespace floeberg

// Precondition / argument violations.
#define FLB_REQUIRE(cond, ...) \
    do {                       \
        if (!(cond)) ::floeberg::fail_arg(::floeberg::msg(__VA_ARGS__)); \
    } while (0)

// Malformed input data, corrupt files, inconsistent state.
#define FLB_CHECK_DATA(cond, ...) \
    do {                          \
        if (!(cond)) ::floeberg::fail_data(::floeberg::msg(__VA_ARGS__)); \
    } while (0)
