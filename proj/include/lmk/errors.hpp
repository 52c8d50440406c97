#ifndef LMK_ERRORS_HPP
#define LMK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lmk {

/// Bad or inconsistent configuration / inputs. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A required upstream artifact (checkpoint, dataset file) is missing. Exit 3.
class MissingArtifactError : public std::runtime_error {
public:
    explicit MissingArtifactError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite loss or other numerical breakdown. Exit 4.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

void warn(const std::string& msg);

}  // namespace lmk

#endif  // LMK_ERRORS_HPP
