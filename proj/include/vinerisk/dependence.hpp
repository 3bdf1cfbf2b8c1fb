#pragma once

#include <span>
#include <string>
#include <vector>

namespace vinerisk {

// Kendall's tau-b with full tie correction, O(n log n) via merge-sort
// inversion counting.  Throws data_error when either column is constant
// (denominator would vanish) or inputs contain NaN.
double kendall_tau(std::span<const double> x, std::span<const double> y);

// Symmetric matrix of pairwise tau-b over equally sized columns; unit
// diagonal.
std::vector<std::vector<double>> tau_matrix(
    const std::vector<std::vector<double>>& columns);

struct NamedColumn {
    std::string name;
    std::vector<double> values;
};

// Same, but failures name the offending column pair.
std::vector<std::vector<double>> tau_matrix(
    const std::vector<NamedColumn>& columns);

// CSV rendering with a leading header row and a name column.
std::string tau_matrix_csv(const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& matrix);

} // namespace vinerisk
