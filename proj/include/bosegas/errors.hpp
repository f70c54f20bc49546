#ifndef BOSEGAS_ERRORS_HPP
#define BOSEGAS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bosegas {

// Exit-code contract: 0 success, 1 config, 2 numerical, 3 I/O.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Solver/fit/state failures: bracket failures, truncation-weight breaches,
// empty fit windows, invalid physical inputs.
struct NumericError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitIo = 3;

} // namespace bosegas

#endif
