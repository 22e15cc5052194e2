#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gfbp {

// Malformed user input: model documents, formulas, order specs.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A pattern or state budget would be exceeded by the requested computation.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, std::size_t required, std::size_t limit)
        : std::runtime_error(what), required_(required), limit_(limit) {}

    std::size_t required() const { return required_; }
    std::size_t limit() const { return limit_; }

private:
    std::size_t required_;
    std::size_t limit_;
};

// A series could not be certified to the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double partial_value, double achieved_bound)
        : std::runtime_error(what), partial_(partial_value), bound_(achieved_bound) {}

    double partial_value() const { return partial_; }
    double achieved_bound() const { return bound_; }

private:
    double partial_;
    double bound_;
};

}  // namespace gfbp
