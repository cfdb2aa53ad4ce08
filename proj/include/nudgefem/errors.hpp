#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nudgefem {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters violating a documented precondition (mesh sizes, ratios, step sizes).
class InvalidConfigError : public Error {
public:
    using Error::Error;
};

class OutOfDomainError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, std::size_t pivot)
        : Error(what), pivot_(pivot) {}
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

/// A solve finished but its constraint residuals exceed the accepted gates.
class SolverQualityError : public Error {
public:
    SolverQualityError(const std::string& what, double divergence, double mean)
        : Error(what), divergence_(divergence), mean_(mean) {}
    double divergence_residual() const noexcept { return divergence_; }
    double mean_residual() const noexcept { return mean_; }

private:
    double divergence_;
    double mean_;
};

/// Non-finite state detected during time stepping.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, int step, double last_good_time)
        : Error(what), step_(step), last_good_time_(last_good_time) {}
    int step() const noexcept { return step_; }
    double last_good_time() const noexcept { return last_good_time_; }

private:
    int step_;
    double last_good_time_;
};

}  // namespace nudgefem
