#pragma once

#include "mpg/game_model.hpp"
#include "mpg/markov_solver.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mpg {

struct TraceStep {
    Policy sigma;
    double lambda = 0.0;
    StateVector bias;
    /// ||T^sigma(v) - lambda 1 - v||_inf for the one-player operator of this step.
    double residual = 0.0;
    std::size_t inner_iterations = 0;
    double seconds = 0.0;
};

struct IterationTrace {
    std::vector<TraceStep> steps;
    bool terminal = false;
    /// Set when some step's one-player operator had no eigenpair.
    std::optional<NotWellPosed> failure;
};

struct HoffmanKarpOptions {
    SolverOptions solver;
    /// Outer step bound; 0 means |Sigma| + 1.
    std::uint64_t max_outer = 0;
};

struct HoffmanKarpResult {
    std::optional<EigenPair> pair; // eigenpair of T_r, residual against shapley_apply
    IterationTrace trace;
    CounterPolicy final_policies;

    bool well_posed() const { return pair.has_value(); }
};

/// Two-player policy iteration: evaluate sigma_k with howard_solve, then switch MIN to a
/// policy attaining T(v_k), keeping sigma_k(i) whenever it attains the minimum.
/// Throws MaxOuterIterationsExceeded when the outer bound is hit.
HoffmanKarpResult hoffman_karp(const GameSpec& game, const PaymentVector& r, const Policy& sigma0,
                               const HoffmanKarpOptions& options = {});

/// ||T_r(u) - lambda 1 - u||_inf.
double residual_check(const GameSpec& game, const PaymentVector& r, double lambda, const StateVector& u);

enum class Uniqueness { Unique, NotUnique, Inconclusive };

std::string to_string(Uniqueness u);

struct UniquenessCertificate {
    Uniqueness verdict = Uniqueness::Inconclusive;
    double lambda = 0.0;
    /// Anchored representatives of the eigenvector lines found.
    std::vector<StateVector> eigenvector_lines;
    /// MIN policies with eigenvalue lambda whose critical graph has several classes.
    std::vector<Policy> blocking_policies;
    /// Two eigenvectors of T whose difference is not constant (NotUnique only).
    std::vector<StateVector> witnesses;
    /// Policies whose unique bias passed the residual check against T.
    std::vector<Policy> supporting_policies;
    std::uint64_t policies_examined = 0;
};

struct CertifyOptions {
    SolverOptions solver;
    CriticalGraphOptions critical;
    /// Tolerance on lambda_sigma = lambda.
    double lambda_tol = 1e-9;
    /// Residual against T for a one-player bias to count as an eigenvector of T.
    double residual_tol = 1e-9;
    /// Two biases are on one line when max - min of their difference is at most this.
    double line_tol = 1e-8;
    std::uint64_t enumeration_cap = 1'000'000;
};

/// Sweeps every MIN policy sigma; each eigenvector of T is an eigenvector of some T^sigma with
/// the same eigenvalue, so if all such sigma have one critical class, E(T) lies in finitely
/// many lines and, being connected, in one.
UniquenessCertificate certify_uniqueness(const GameSpec& game, const PaymentVector& r, const EigenPair& pair,
                                         const CertifyOptions& options = {});

/// max - min of a - b.
double line_distance(const StateVector& a, const StateVector& b);

} // namespace mpg
