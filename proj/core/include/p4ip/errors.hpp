#pragma once

#include <stdexcept>
#include <string>

namespace p4ip {

/// Malformed or inconsistent input data (files, headers, dimensions).
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure inside an optimization or restoration run (denoiser, inner solve).
class solver_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace p4ip
