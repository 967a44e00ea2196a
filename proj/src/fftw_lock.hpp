#pragma once

#include <mutex>

namespace capxray::detail {

// FFTW planning is not thread-safe; every plan creation and destruction
// goes through this lock.
std::mutex& fftw_mutex();

}  // namespace capxray::detail
