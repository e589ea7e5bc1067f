#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rrd {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

// Squared modulus without the hypot call std::norm makes for double.
inline double abs2(cplx z) { return z.real() * z.real() + z.imag() * z.imag(); }
using IndexSet = std::vector<int>;

struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SwitchInvalid : std::logic_error {
  using std::logic_error::logic_error;
};

struct RejectionBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidWindow : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GuardError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CoverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rrd
