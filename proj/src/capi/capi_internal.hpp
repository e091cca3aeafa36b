// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <exception>
#include <new>
#include <string>

#include "qfe/common/error.hpp"
#include "qfe/qfe.h"

namespace qfe::capi {

void set_last_error(const std::string& message);

// Runs fn, mapping exceptions to a status and the thread-local message.
template <class Fn>
qfe_status guard(Fn&& fn) {
  try {
    fn();
    return QFE_OK;
  } catch (const Error& e) {
    set_last_error(e.what());
    return static_cast<qfe_status>(e.code());
  } catch (const std::bad_alloc&) {
    set_last_error("out of memory");
    return QFE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_last_error(e.what());
    return QFE_ERR_INTERNAL;
  } catch (...) {
    set_last_error("unknown failure");
    return QFE_ERR_INTERNAL;
  }
}

template <class T>
void require(const T* p, const char* what) {
  if (!p) throw ArgumentError(std::string(what) + " is NULL");
}

}  // namespace qfe::capi
