#pragma once

#include "mpg/error.hpp"
#include "mpg/game_model.hpp"
#include "mpg/graph.hpp"
#include "mpg/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mpg {

/// Element of R u {-inf}. -inf is a dedicated state, never a large negative number;
/// tropical multiplication (ordinary +) saturates at -inf.
template <class S>
class MaxPlus {
public:
    MaxPlus() = default; // -inf
    MaxPlus(S value) : finite_(true), value_(std::move(value)) {} // NOLINT(google-explicit-constructor)

    static MaxPlus neg_inf() { return MaxPlus(); }

    bool is_finite() const { return finite_; }
    const S& value() const {
        if (!finite_) throw std::logic_error("value() of -inf");
        return value_;
    }

    /// Tropical product a (x) b = a + b.
    friend MaxPlus operator*(const MaxPlus& a, const MaxPlus& b) {
        if (!a.finite_ || !b.finite_) return MaxPlus();
        return MaxPlus(a.value_ + b.value_);
    }
    /// Tropical sum a (+) b = max(a, b).
    friend MaxPlus operator+(const MaxPlus& a, const MaxPlus& b) {
        if (!a.finite_) return b;
        if (!b.finite_) return a;
        return b.value_ > a.value_ ? b : a;
    }
    friend bool operator==(const MaxPlus& a, const MaxPlus& b) {
        return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
    }
    friend bool operator<(const MaxPlus& a, const MaxPlus& b) {
        if (!b.finite_) return false;
        if (!a.finite_) return true;
        return a.value_ < b.value_;
    }

private:
    bool finite_ = false;
    S value_{};
};

template <class S>
using MaxPlusVector = std::vector<MaxPlus<S>>;

/// Comparison rules per scalar: floating point uses an absolute tolerance, rationals are exact.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static bool equal(double a, double b, double tol) { return std::abs(a - b) <= tol; }
    static double from_ratio(long long num, long long den) {
        return static_cast<double>(num) / static_cast<double>(den);
    }
    static double to_double(double v) { return v; }
};

template <>
struct ScalarTraits<Rational> {
    static bool equal(const Rational& a, const Rational& b, double) { return a == b; }
    static Rational from_ratio(long long num, long long den) { return Rational(num, den); }
    static double to_double(const Rational& v) { return v.to_double(); }
};

/// Square matrix over the max-plus semiring with no row identically -inf.
template <class S>
class BasicMaxPlusMatrix {
public:
    using Scalar = S;
    using Entry = MaxPlus<S>;

    explicit BasicMaxPlusMatrix(std::vector<std::vector<Entry>> rows) : n_(rows.size()) {
        if (n_ == 0) throw Error(ErrorCode::InvalidArgument, "empty max-plus matrix");
        entries_.reserve(n_ * n_);
        for (std::size_t i = 0; i < n_; ++i) {
            if (rows[i].size() != n_) throw Error(ErrorCode::InvalidArgument, "max-plus matrix is not square");
            bool any = false;
            for (auto& e : rows[i]) {
                any = any || e.is_finite();
                entries_.push_back(std::move(e));
            }
            if (!any)
                throw Error(ErrorCode::EmptyRow, "row " + std::to_string(i + 1) + " is identically -inf");
        }
    }

    std::size_t size() const { return n_; }
    const Entry& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

    /// Arcs i -> j of the precedence graph (finite entries).
    Adjacency precedence_graph() const {
        Adjacency g(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if ((*this)(i, j).is_finite()) g[i].push_back(j);
        return g;
    }

    /// Max-plus product M (x) x.
    MaxPlusVector<S> apply(const MaxPlusVector<S>& x) const {
        if (x.size() != n_) throw Error(ErrorCode::InvalidArgument, "vector length mismatch");
        MaxPlusVector<S> y(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) y[i] = y[i] + (*this)(i, j) * x[j];
        return y;
    }

private:
    std::size_t n_;
    std::vector<Entry> entries_;
};

using MaxPlusMatrix = BasicMaxPlusMatrix<double>;
using ExactMaxPlusMatrix = BasicMaxPlusMatrix<Rational>;

using Arc = std::pair<std::size_t, std::size_t>;

template <class S>
struct CircuitMeanReport {
    S rho{};
    std::vector<Arc> critical_arcs; // sorted
    NodeSet critical_nodes;         // sorted
    std::vector<NodeSet> critical_classes;
};

/// Tolerance for "mean equals rho" in floating-point mode; ignored by exact scalars.
inline constexpr double kCriticalTolerance = 1e-9;

/// rho(M) by the walk-length dynamic program D_k = M (x) D_{k-1}, D_0 = 0:
/// rho = max_i min_k (D_n(i) - D_k(i)) / (n - k).
template <class S>
S maximal_circuit_mean(const BasicMaxPlusMatrix<S>& m) {
    const std::size_t n = m.size();
    std::vector<MaxPlusVector<S>> d(n + 1);
    d[0].assign(n, MaxPlus<S>(S(0)));
    for (std::size_t k = 1; k <= n; ++k) d[k] = m.apply(d[k - 1]);
    bool found = false;
    S best{};
    for (std::size_t i = 0; i < n; ++i) {
        if (!d[n][i].is_finite()) continue;
        bool have = false;
        S worst{};
        for (std::size_t k = 0; k < n; ++k) {
            if (!d[k][i].is_finite()) continue;
            S mean = (d[n][i].value() - d[k][i].value()) /
                     ScalarTraits<S>::from_ratio(static_cast<long long>(n - k), 1);
            if (!have || mean < worst) {
                worst = mean;
                have = true;
            }
        }
        if (have && (!found || worst > best)) {
            best = worst;
            found = true;
        }
    }
    if (!found) throw Error(ErrorCode::NoCircuit, "precedence graph has no circuit");
    return best;
}

/// Max-plus closure A+ = A (+) A^2 (+) ... of the rho-normalized matrix A = M - rho.
/// Entry (i, j) is the greatest normalized weight of a walk of length >= 1 from i to j.
template <class S>
std::vector<MaxPlusVector<S>> normalized_closure(const BasicMaxPlusMatrix<S>& m, const S& rho) {
    const std::size_t n = m.size();
    std::vector<MaxPlusVector<S>> c(n, MaxPlusVector<S>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (m(i, j).is_finite()) c[i][j] = MaxPlus<S>(m(i, j).value() - rho);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            if (!c[i][k].is_finite()) continue;
            for (std::size_t j = 0; j < n; ++j) c[i][j] = c[i][j] + c[i][k] * c[k][j];
        }
    return c;
}

template <class S>
CircuitMeanReport<S> critical_analysis(const BasicMaxPlusMatrix<S>& m, double tol = kCriticalTolerance) {
    const std::size_t n = m.size();
    CircuitMeanReport<S> rep;
    rep.rho = maximal_circuit_mean(m);
    const auto closure = normalized_closure(m, rep.rho);
    Adjacency critical(n);
    std::vector<bool> is_node(n, false);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (!m(i, j).is_finite() || !closure[j][i].is_finite()) continue;
            const S loop = (m(i, j).value() - rep.rho) + closure[j][i].value();
            if (ScalarTraits<S>::equal(loop, S(0), tol)) {
                rep.critical_arcs.emplace_back(i, j);
                critical[i].push_back(j);
                is_node[i] = is_node[j] = true;
            }
        }
    for (std::size_t i = 0; i < n; ++i)
        if (is_node[i]) rep.critical_nodes.push_back(i);
    rep.critical_classes = strongly_connected_components(critical, is_node);
    return rep;
}

/// One tropical eigenvector per critical class: the closure column at the class's smallest node.
template <class S>
std::vector<MaxPlusVector<S>> tropical_eigenvectors(const BasicMaxPlusMatrix<S>& m,
                                                    double tol = kCriticalTolerance) {
    const auto rep = critical_analysis(m, tol);
    const auto closure = normalized_closure(m, rep.rho);
    std::vector<MaxPlusVector<S>> out;
    for (const NodeSet& cls : rep.critical_classes) {
        const std::size_t k = cls.front();
        MaxPlusVector<S> u(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) u[i] = closure[i][k];
        // Exactly zero on the critical node itself; removes rounding from the closure.
        u[k] = MaxPlus<S>(S(0));
        out.push_back(std::move(u));
    }
    return out;
}

/// Largest |(M (x) u)_i - (lambda + u_i)|; +inf if the -inf patterns differ.
double maxplus_residual(const MaxPlusMatrix& m, double lambda, const MaxPlusVector<double>& u);

/// M (x) u = lambda 1 + u within tol for a finite u. When it holds, lambda must equal rho(M);
/// a violation of that theorem throws std::logic_error.
bool eigenvalue_is_rho(const MaxPlusMatrix& m, double lambda, const StateVector& u, double tol = 1e-9);

/// [M]_{ij} = max{ r_i^{sigma(i) b} : P_{ij}^{sigma(i) b} = 1 }, -inf when empty.
MaxPlusMatrix deterministic_matrix(const GameSpec& game, const PaymentVector& r, const Policy& sigma);

MaxPlusVector<double> to_maxplus(const StateVector& x);

} // namespace mpg
