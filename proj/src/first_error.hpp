#pragma once

#include <exception>

namespace nef::detail {

// Exceptions must not leave an OpenMP region. Loop bodies park the first one
// here and the caller rethrows after the region closes.
class FirstError {
 public:
  void capture() noexcept {
#pragma omp critical(nef_first_error)
    if (!error_) error_ = std::current_exception();
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

}  // namespace nef::detail
