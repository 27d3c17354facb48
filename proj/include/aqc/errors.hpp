#pragma once

#include <stdexcept>
#include <string>

namespace aqc {

// Raised when a Fock-space truncation is too small for the requested state.
class cutoff_error : public std::runtime_error {
public:
    cutoff_error(const std::string& what, double tail_mass)
        : std::runtime_error(what), tail_mass(tail_mass) {}
    double tail_mass;
};

// Raised when a conditional selection leaves no surviving records.
class empty_selection_error : public std::runtime_error {
public:
    empty_selection_error(const std::string& what, std::size_t survivors)
        : std::runtime_error(what), survivors(survivors) {}
    std::size_t survivors;
};

// Raised when a statistic is undefined for the given distribution
// (e.g. Mandel Q at zero mean, binomial Q at <c> in {0, N}).
class undefined_statistic_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a curve never reaches the level a crossing search needs.
class out_of_range_error : public std::runtime_error {
public:
    out_of_range_error(const std::string& what, double extreme_value)
        : std::runtime_error(what), extreme_value(extreme_value) {}
    double extreme_value;
};

}  // namespace aqc
