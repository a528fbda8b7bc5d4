#pragma once

#include "mpg/game_model.hpp"
#include "mpg/hoffman_karp.hpp"
#include "mpg/structural.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mpg {

/// r(t) = base + sum_d t_d * directions[d], sampled on a regular grid over `box`.
struct AffineSlice {
    PaymentVector base;
    std::vector<PaymentVector> directions;
    std::vector<std::pair<double, double>> box;
    std::size_t resolution = 101;

    /// Throws InvalidSlice on dependent directions, bad boxes or resolution < 2.
    void validate(const GameSpec& game) const;
    /// Grid coordinate k (0 <= k < resolution) along axis d; endpoints are exact.
    double coordinate(std::size_t d, std::size_t k) const;
    PaymentVector at(const std::vector<double>& coords) const;
};

/// Slice along the state perturbations g_s (payments of state s shifted by g_s) for the given states.
AffineSlice state_slice(const GameSpec& game, const PaymentVector& base, const std::vector<std::size_t>& states,
                        std::pair<double, double> range, std::size_t resolution);

enum class SampleVerdict { Unique, NotUnique, Inconclusive, Failed };

std::string to_string(SampleVerdict v);

struct CellSample {
    std::vector<std::size_t> index;
    std::vector<double> coords;
    SampleVerdict verdict = SampleVerdict::Failed;
    double lambda = 0.0;
    StateVector bias; // anchored; empty when Failed
    double residual = 0.0;
    /// Terminal (sigma, pi) of the solver, used to locate cell boundaries.
    std::string fingerprint;
    std::string failure;
};

struct BoundarySegment {
    std::size_t from = 0; // sample indices of two grid neighbours
    std::size_t to = 0;
    bool verdict_change = false;
    bool fingerprint_change = false;
    std::vector<double> midpoint;
};

struct CellMap {
    std::vector<std::size_t> shape;
    /// Row-major over the grid, first axis slowest.
    std::vector<CellSample> samples;
    std::vector<BoundarySegment> boundaries;

    const CellSample& at(const std::vector<std::size_t>& index) const;
};

struct ExploreOptions {
    HoffmanKarpOptions solver;
    CertifyOptions certify;
    StructuralOptions structural;
    std::size_t anchor = 0;
};

/// Runs policy iteration and the uniqueness certificate at every grid point. Solver errors are
/// recorded per sample as Failed.
CellMap explore_slice(const GameSpec& game, const AffineSlice& slice, const ExploreOptions& options = {});

/// a * t1 + b * t2 = c, scaled so max(|a|, |b|) = 1 with the first nonzero coefficient positive.
struct BoundaryLine {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    /// Euclidean distance from (t1, t2) to the line.
    double distance(double t1, double t2) const;
};

/// Equality lines between the affine means of all elementary circuits of the game graph over a
/// 2-D slice. Covers the circuits of every M^sigma, and pairs taken from different sigma (ties
/// in MIN's choice), so it is a superset of the cell boundaries of the fan within the slice.
std::vector<BoundaryLine> exact_deterministic_cells_2d(const GameSpec& game, const AffineSlice& slice,
                                                       std::uint64_t circuit_cap = 100000);

struct ExampleFixture {
    GameSpec game;
    PaymentVector r0;
};

/// The three-state game with payments r0 = (0, 1, 2, 1, -2, -3, 1).
ExampleFixture example_fixture();

std::string cellmap_to_csv(const GameSpec& game, const CellMap& map);

} // namespace mpg
