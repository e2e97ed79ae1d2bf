#include "market/alignment.hpp"

#include <algorithm>
#include <cmath>

#include "market/linprog.hpp"

namespace market {

namespace {

void check_nonneg(const std::vector<std::vector<double>>& w, const char* what) {
    for (const auto& row : w)
        for (double v : row)
            if (!(v >= 0.0)) throw ParameterViolation(std::string(what) + " must be nonnegative");
}

void check_provider_indices(const GameInstance& g, const std::vector<int>& providers) {
    if (providers.empty()) throw ParameterViolation("certificate covers no provider");
    for (int j : providers)
        if (j < 0 || j >= g.num_providers())
            throw DimensionMismatch("certificate provider index out of range");
}

// Iterates action profiles (a_1..a_n); f(profile).
void for_each_profile(const GameInstance& g, std::uint64_t cap,
                      const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> dims;
    std::uint64_t total = 1;
    for (const auto& acts : g.action_sets) {
        dims.push_back(static_cast<int>(acts.size()));
        if (total > cap / acts.size()) throw ProfileSpaceTooLarge(cap);
        total *= acts.size();
    }
    detail::for_each_tuple(dims, f);
}

}  // namespace

void WeakAlignmentCert::validate(const GameInstance& g) const {
    check_provider_indices(g, providers);
    std::size_t T = providers.size();
    int n = g.num_users();
    if (components.size() != T || provider_weights.size() != T || user_weights.size() != T ||
        provider_intercepts.size() != T)
        throw DimensionMismatch("weak certificate arrays must have one entry per provider");
    if (static_cast<int>(user_intercepts.size()) != n)
        throw DimensionMismatch("one user intercept per user required");
    for (std::size_t t = 0; t < T; ++t) {
        if (static_cast<int>(components[t].size()) != n ||
            static_cast<int>(provider_weights[t].size()) != n ||
            static_cast<int>(user_weights[t].size()) != n)
            throw DimensionMismatch("weak certificate user dimension mismatch");
        for (int i = 0; i < n; ++i) {
            if (components[t][i].size() != g.action_sets[i].size())
                throw DimensionMismatch("component action dimension mismatch");
            for (const auto& row : components[t][i])
                if (static_cast<int>(row.size()) != g.num_states())
                    throw DimensionMismatch("component state dimension mismatch");
        }
    }
    check_nonneg(provider_weights, "lambda");
    check_nonneg(user_weights, "w");
    if (eps_provider < 0 || eps_user < 0) throw ParameterViolation("residuals must be >= 0");
    for (int i = 0; i < n; ++i) {
        bool covered = false;
        for (std::size_t t = 0; t < T; ++t) {
            if (user_weights[t][i] > 0.0) {
                covered = true;
                if (provider_weights[t][i] <= 0.0)
                    throw CoverageViolation("w > 0 requires lambda > 0 (user " +
                                            std::to_string(i) + ")");
            }
        }
        if (!covered) throw CoverageViolation("no provider covers user " + std::to_string(i));
    }
}

void StrongAlignmentCert::validate(const GameInstance& g) const {
    check_provider_indices(g, providers);
    if (weights.size() != providers.size() || intercepts.size() != providers.size())
        throw DimensionMismatch("strong certificate arrays must have one entry per provider");
    for (const auto& row : weights)
        if (static_cast<int>(row.size()) != g.num_users())
            throw DimensionMismatch("strong certificate user dimension mismatch");
    check_nonneg(weights, "lambda");
    if (eps < 0) throw ParameterViolation("residual must be >= 0");
}

std::pair<double, double> check_weak(const GameInstance& g, const WeakAlignmentCert& cert,
                                     std::uint64_t cap) {
    cert.validate(g);
    int n = g.num_users();
    int Y = g.num_states();
    double eps_p = 0.0;
    for_each_profile(g, cap, [&](const std::vector<int>& a) {
        for (int y = 0; y < Y; ++y)
            for (std::size_t t = 0; t < cert.providers.size(); ++t) {
                double approx = cert.provider_intercepts[t];
                for (int i = 0; i < n; ++i)
                    approx += cert.provider_weights[t][i] * cert.components[t][i][a[i]][y];
                eps_p = std::max(eps_p,
                                 std::abs(g.provider_util(cert.providers[t], a, y) - approx));
            }
    });
    double eps_u = 0.0;
    for (int i = 0; i < n; ++i)
        for (std::size_t a = 0; a < g.action_sets[i].size(); ++a)
            for (int y = 0; y < Y; ++y) {
                double approx = cert.user_intercepts[i];
                for (std::size_t t = 0; t < cert.providers.size(); ++t)
                    approx += cert.user_weights[t][i] * cert.components[t][i][a][y];
                eps_u = std::max(eps_u, std::abs(g.user_utils[i][a][y] - approx));
            }
    return {eps_p, eps_u};
}

double check_strong(const GameInstance& g, const StrongAlignmentCert& cert, std::uint64_t cap) {
    cert.validate(g);
    int n = g.num_users();
    int Y = g.num_states();
    double eps = 0.0;
    for_each_profile(g, cap, [&](const std::vector<int>& a) {
        for (int y = 0; y < Y; ++y)
            for (std::size_t t = 0; t < cert.providers.size(); ++t) {
                double approx = cert.intercepts[t];
                for (int i = 0; i < n; ++i)
                    approx += cert.weights[t][i] * g.user_utils[i][a[i]][y];
                eps = std::max(eps, std::abs(g.provider_util(cert.providers[t], a, y) - approx));
            }
    });
    return eps;
}

StrongAlignmentCert fit_strong_exact(const GameInstance& g, int provider,
                                     const std::vector<int>& user_subset, std::uint64_t cap) {
    if (provider < 0 || provider >= g.num_providers())
        throw DimensionMismatch("provider index out of range");
    for (int i : user_subset)
        if (i < 0 || i >= g.num_users()) throw DimensionMismatch("user index out of range");
    int m = static_cast<int>(user_subset.size());
    int Y = g.num_states();

    // Variables: [lambda (m), c+, c-, eps], all >= 0, plus two slacks per
    // observation appended on the fly. Constraints per (a, y):
    //   sum lambda u + c+ - c- + eps - s1 = u^P   (upper side)
    //   sum lambda u + c+ - c- - eps + s2 = u^P   (lower side)
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for_each_profile(g, cap, [&](const std::vector<int>& a) {
        for (int y = 0; y < Y; ++y) {
            std::vector<double> base(m + 3, 0.0);
            for (int s = 0; s < m; ++s) base[s] = g.user_utils[user_subset[s]][a[user_subset[s]]][y];
            base[m] = 1.0;
            base[m + 1] = -1.0;
            double target = g.provider_util(provider, a, y);
            std::vector<double> up = base;
            up[m + 2] = 1.0;
            A.push_back(std::move(up));
            b.push_back(target);
            std::vector<double> lo = base;
            lo[m + 2] = -1.0;
            A.push_back(std::move(lo));
            b.push_back(target);
        }
    });
    int rows = static_cast<int>(A.size());
    int ncols = m + 3 + rows;
    for (int r = 0; r < rows; ++r) {
        A[r].resize(ncols, 0.0);
        A[r][m + 3 + r] = r % 2 == 0 ? -1.0 : 1.0;  // s1 subtracted, s2 added
    }
    std::vector<double> c(ncols, 0.0);
    c[m + 2] = 1.0;

    LpResult lp = solve_lp_equality(A, b, c);
    if (!lp.feasible) throw ParameterViolation("alignment fit LP failed");

    StrongAlignmentCert cert;
    cert.providers = {provider};
    cert.weights.emplace_back(g.num_users(), 0.0);
    for (int s = 0; s < m; ++s) cert.weights[0][user_subset[s]] = std::max(0.0, lp.x[s]);
    cert.intercepts = {lp.x[m] - lp.x[m + 1]};
    cert.eps = check_strong(g, cert, cap);  // achieved residual, exact
    return cert;
}

WeakAlignmentCert strong_implies_weak(const GameInstance& g, const StrongAlignmentCert& cert) {
    cert.validate(g);
    int n = g.num_users();
    std::size_t T = cert.providers.size();
    WeakAlignmentCert weak;
    weak.providers = cert.providers;
    weak.provider_weights = cert.weights;
    weak.provider_intercepts = cert.intercepts;
    weak.eps_provider = cert.eps;
    weak.eps_user = 0.0;
    weak.user_intercepts.assign(n, 0.0);
    weak.components.resize(T);
    weak.user_weights.assign(T, std::vector<double>(n, 0.0));
    for (std::size_t t = 0; t < T; ++t) {
        weak.components[t].resize(n);
        for (int i = 0; i < n; ++i) weak.components[t][i] = g.user_utils[i];
    }
    for (int i = 0; i < n; ++i) {
        std::vector<std::size_t> covering;
        for (std::size_t t = 0; t < T; ++t)
            if (cert.weights[t][i] > 0.0) covering.push_back(t);
        if (covering.empty())
            throw CoverageViolation("no provider covers user " + std::to_string(i));
        for (std::size_t t : covering)
            weak.user_weights[t][i] = 1.0 / static_cast<double>(covering.size());
    }
    return weak;
}

}  // namespace market
