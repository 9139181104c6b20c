#pragma once

#include <functional>

#include "doctest.h"
#include "equipart/errors.hpp"

// Kind of the equipart::Error thrown by fn; fails the test if none is thrown.
inline equipart::ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const equipart::Error& e) {
    return e.kind();
  }
  FAIL("expected an equipart::Error");
  return equipart::ErrorKind::kInternalConsistency;
}
