#pragma once

#include <optional>

#include "core/error.hpp"

namespace test {

// Code of the revival::Error thrown by f, or nothing if f returns.
template <class F>
std::optional<revival::ErrorCode> error_code(F&& f) {
  try {
    f();
  } catch (const revival::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace test
