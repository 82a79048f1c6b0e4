#pragma once
// Dense tableau simplex for small problems: max c.x s.t. A x <= b, x >= 0,
// b >= 0 (the origin is feasible). Bland's rule, so it terminates.

#include <cstddef>
#include <limits>
#include <vector>

namespace oams::lp {

struct Result {
    double value = 0.0;
    std::vector<double> x;
    bool bounded = true;
};

inline Result maximize(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                       const std::vector<double>& c) {
    const std::size_t m = a.size();
    const std::size_t n = c.size();
    // Rows 0..m-1 constraints, row m objective. Columns: n originals, m slacks, rhs.
    std::vector<std::vector<double>> tab(m + 1, std::vector<double>(n + m + 1, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tab[i][j] = a[i][j];
        tab[i][n + i] = 1.0;
        tab[i][n + m] = b[i];
        basis[i] = n + i;
    }
    for (std::size_t j = 0; j < n; ++j) tab[m][j] = -c[j];

    constexpr double tol = 1e-13;
    Result out;
    for (;;) {
        std::size_t enter = n + m;
        for (std::size_t j = 0; j < n + m; ++j)
            if (tab[m][j] < -tol) {
                enter = j;
                break;
            }
        if (enter == n + m) break;
        std::size_t leave = m;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (tab[i][enter] <= tol) continue;
            const double ratio = tab[i][n + m] / tab[i][enter];
            if (ratio < best - tol || (ratio <= best + tol && leave < m && basis[i] < basis[leave])) {
                best = ratio;
                leave = i;
            }
        }
        if (leave == m) {
            out.bounded = false;
            return out;
        }
        const double piv = tab[leave][enter];
        for (auto& v : tab[leave]) v /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave || tab[i][enter] == 0.0) continue;
            const double f = tab[i][enter];
            for (std::size_t j = 0; j <= n + m; ++j) tab[i][j] -= f * tab[leave][j];
        }
        basis[leave] = enter;
    }
    out.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) out.x[basis[i]] = tab[i][n + m];
    out.value = tab[m][n + m];
    return out;
}

/// max q.u over the simplex within L1 distance beta of p_hat, written with
/// q = p_hat + x - y.
inline double inner_max_value(const std::vector<double>& p_hat, double beta, const std::vector<double>& u) {
    const std::size_t n = p_hat.size();
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::vector<double> c(2 * n, 0.0);
    double base = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = u[i];
        c[n + i] = -u[i];
        base += p_hat[i] * u[i];
    }
    std::vector<double> row(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) row[i] = 1.0, row[n + i] = -1.0;
    a.push_back(row);
    b.push_back(0.0);
    for (auto& v : row) v = -v;
    a.push_back(row);
    b.push_back(0.0);
    std::fill(row.begin(), row.end(), 1.0);
    a.push_back(row);
    b.push_back(beta);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> r(2 * n, 0.0);
        r[i] = 1.0;
        a.push_back(r);
        b.push_back(1.0 - p_hat[i]);
        std::vector<double> s(2 * n, 0.0);
        s[n + i] = 1.0;
        a.push_back(s);
        b.push_back(p_hat[i]);
    }
    return base + maximize(a, b, c).value;
}

} // namespace oams::lp
