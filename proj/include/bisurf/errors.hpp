#ifndef BISURF_ERRORS_HPP
#define BISURF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bisurf {

/// Bad input files, configuration or arguments. CLI exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Singular or degenerate numerical problems. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bisurf

#endif
