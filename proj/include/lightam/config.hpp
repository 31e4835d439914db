#pragma once

#include <stdexcept>
#include <string>

namespace lightam {

struct PhysConfig {
    double c = 1.0;
    double hbar = 1.0;

    void validate() const {
        if (!(c > 0.0)) throw std::invalid_argument("PhysConfig: c must be positive");
        if (!(hbar > 0.0)) throw std::invalid_argument("PhysConfig: hbar must be positive");
    }
};

class GridMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class TransversalityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace lightam
