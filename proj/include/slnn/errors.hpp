#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace slnn {

/// Argument outside the mathematical domain of an operation (eta outside
/// [0,1], ln of a negative number, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Sequences whose lengths must agree do not.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A parameter violates its documented range (order 0, h < 2, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Residual requested at the singular point eta = 0.
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Built-in lookup by an unknown name.
class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Problem document does not match the schema. `path()` names the field.
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Summary requested over a table with no exact values.
class NotComputable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss or gradient.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& message, std::size_t iteration, std::vector<double> last_weights,
                    double last_loss)
        : std::runtime_error(message),
          iteration_(iteration),
          last_weights_(std::move(last_weights)),
          last_loss_(last_loss) {}

    std::size_t iteration() const noexcept { return iteration_; }
    const std::vector<double>& last_weights() const noexcept { return last_weights_; }
    double last_loss() const noexcept { return last_loss_; }

private:
    std::size_t iteration_;
    std::vector<double> last_weights_;
    double last_loss_;
};

} // namespace slnn
