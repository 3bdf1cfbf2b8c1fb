#pragma once

#include <stdexcept>
#include <string>

namespace vinerisk {

// Error taxonomy, mapped to CLI exit codes by the tool driver:
//   param_error / data_error -> bad inputs (exit 2)
//   numeric_error            -> optimization or evaluation failure (exit 3)
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

struct param_error : error {
    explicit param_error(const std::string& msg) : error(msg) {}
};

struct data_error : error {
    explicit data_error(const std::string& msg) : error(msg) {}
};

struct numeric_error : error {
    explicit numeric_error(const std::string& msg) : error(msg) {}
};

} // namespace vinerisk
