#include "vinerisk/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "vinerisk/errors.hpp"

namespace vinerisk {

namespace {

// pairs within runs of equal keys: sum t*(t-1)/2
double tied_pairs(const std::vector<double>& sorted) {
    double total = 0.0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= sorted.size(); ++i) {
        if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
            ++run;
        } else {
            total += 0.5 * static_cast<double>(run) * static_cast<double>(run - 1);
            run = 1;
        }
    }
    return total;
}

// merge sort counting strict inversions (y_i > y_j with i < j)
double sort_count(std::vector<double>& v, std::vector<double>& tmp,
                  std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0.0;
    std::size_t mid = lo + (hi - lo) / 2;
    double count = sort_count(v, tmp, lo, mid) + sort_count(v, tmp, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            count += static_cast<double>(mid - i);
            tmp[k++] = v[j++];
        } else {
            tmp[k++] = v[i++];
        }
    }
    while (i < mid) tmp[k++] = v[i++];
    while (j < hi) tmp[k++] = v[j++];
    std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo),
              tmp.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return count;
}

} // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size()) throw data_error("kendall_tau: column length mismatch");
    if (n < 2) throw data_error("kendall_tau: need at least 2 observations");
    for (std::size_t i = 0; i < n; ++i)
        if (std::isnan(x[i]) || std::isnan(y[i]))
            throw data_error("kendall_tau: NaN in input");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // tie counts: n1 over x runs, n2 over y runs, n3 over joint runs
    std::vector<double> xs(n), ys_by_x(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x[idx[i]];
        ys_by_x[i] = y[idx[i]];
    }
    double n1 = tied_pairs(xs);

    double n3 = 0.0;
    {
        std::size_t run = 1;
        for (std::size_t i = 1; i <= n; ++i) {
            if (i < n && xs[i] == xs[i - 1] && ys_by_x[i] == ys_by_x[i - 1]) {
                ++run;
            } else {
                n3 += 0.5 * static_cast<double>(run) * static_cast<double>(run - 1);
                run = 1;
            }
        }
    }

    std::vector<double> ys(y.begin(), y.end());
    std::sort(ys.begin(), ys.end());
    double n2 = tied_pairs(ys);

    const double n0 = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    if (n1 == n0 || n2 == n0)
        throw data_error("kendall_tau: degenerate (constant) column");

    std::vector<double> tmp(n);
    double swaps = sort_count(ys_by_x, tmp, 0, n);

    double num = n0 - n1 - n2 + n3 - 2.0 * swaps; // concordant minus discordant
    double tau = num / std::sqrt((n0 - n1) * (n0 - n2));
    return std::min(1.0, std::max(-1.0, tau));
}

std::vector<std::vector<double>> tau_matrix(
    const std::vector<std::vector<double>>& columns) {
    const std::size_t p = columns.size();
    for (std::size_t j = 1; j < p; ++j)
        if (columns[j].size() != columns[0].size())
            throw data_error("tau_matrix: ragged columns");
    std::vector<std::vector<double>> m(p, std::vector<double>(p, 1.0));
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j)
            m[i][j] = m[j][i] = kendall_tau(columns[i], columns[j]);
    return m;
}

std::vector<std::vector<double>> tau_matrix(
    const std::vector<NamedColumn>& columns) {
    const std::size_t p = columns.size();
    for (std::size_t j = 1; j < p; ++j)
        if (columns[j].values.size() != columns[0].values.size())
            throw data_error("tau_matrix: column '" + columns[j].name +
                             "' length differs from '" + columns[0].name + "'");
    std::vector<std::vector<double>> m(p, std::vector<double>(p, 1.0));
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            try {
                m[i][j] = m[j][i] =
                    kendall_tau(columns[i].values, columns[j].values);
            } catch (const error& e) {
                throw data_error("tau_matrix: columns '" + columns[i].name +
                                 "'/'" + columns[j].name + "': " + e.what());
            }
        }
    return m;
}

std::string tau_matrix_csv(const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& matrix) {
    if (names.size() != matrix.size())
        throw param_error("tau_matrix_csv: names/matrix size mismatch");
    std::string out = "variable";
    for (const auto& name : names) out += "," + name;
    out += "\n";
    char buf[40];
    for (std::size_t i = 0; i < names.size(); ++i) {
        out += names[i];
        for (std::size_t j = 0; j < names.size(); ++j) {
            std::snprintf(buf, sizeof(buf), ",%.17g", matrix[i][j]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

} // namespace vinerisk
