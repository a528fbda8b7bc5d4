#include "mpg/fan_explorer.hpp"

#include "mpg/error.hpp"
#include "mpg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace mpg {

void AffineSlice::validate(const GameSpec& game) const {
    game.check_payments(base);
    if (directions.empty()) throw Error(ErrorCode::InvalidSlice, "slice has no directions");
    if (box.size() != directions.size())
        throw Error(ErrorCode::InvalidSlice, "slice needs one interval per direction");
    if (resolution < 2) throw Error(ErrorCode::InvalidSlice, "slice resolution must be at least 2");
    for (const auto& [lo, hi] : box)
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw Error(ErrorCode::InvalidSlice, "slice interval must satisfy lo < hi");
    const auto q = static_cast<Eigen::Index>(game.key_count());
    Eigen::MatrixXd basis(q, static_cast<Eigen::Index>(directions.size()));
    for (std::size_t d = 0; d < directions.size(); ++d) {
        game.check_payments(directions[d]);
        for (Eigen::Index k = 0; k < q; ++k) basis(k, static_cast<Eigen::Index>(d)) = directions[d][static_cast<std::size_t>(k)];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    lu.setThreshold(1e-12);
    if (static_cast<std::size_t>(lu.rank()) != directions.size())
        throw Error(ErrorCode::InvalidSlice, "slice directions are linearly dependent");
}

double AffineSlice::coordinate(std::size_t d, std::size_t k) const {
    const auto [lo, hi] = box[d];
    if (k + 1 == resolution) return hi;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(resolution - 1);
}

PaymentVector AffineSlice::at(const std::vector<double>& coords) const {
    PaymentVector r = base;
    for (std::size_t d = 0; d < directions.size(); ++d) r += coords[d] * directions[d];
    return r;
}

AffineSlice state_slice(const GameSpec& game, const PaymentVector& base, const std::vector<std::size_t>& states,
                        std::pair<double, double> range, std::size_t resolution) {
    AffineSlice s;
    s.base = base;
    s.resolution = resolution;
    for (std::size_t st : states) {
        if (st >= game.state_count()) throw Error(ErrorCode::InvalidSlice, "slice axis state out of range");
        std::vector<double> g(game.state_count(), 0.0);
        g[st] = 1.0;
        s.directions.push_back(state_perturbation(game, g));
        s.box.push_back(range);
    }
    return s;
}

std::string to_string(SampleVerdict v) {
    switch (v) {
    case SampleVerdict::Unique: return "UNIQUE";
    case SampleVerdict::NotUnique: return "NOT_UNIQUE";
    case SampleVerdict::Inconclusive: return "INCONCLUSIVE";
    case SampleVerdict::Failed: return "FAILED";
    }
    return "FAILED";
}

const CellSample& CellMap::at(const std::vector<std::size_t>& index) const {
    std::size_t flat = 0;
    for (std::size_t d = 0; d < shape.size(); ++d) flat = flat * shape[d] + index[d];
    return samples.at(flat);
}

namespace {

std::string fingerprint_of(const CounterPolicy& pi) {
    std::string out = "s";
    for (std::size_t a : pi.base.choice) out += "." + std::to_string(a);
    out += "/p";
    for (std::size_t b : pi.choice) out += "." + std::to_string(b);
    return out;
}

SampleVerdict from_uniqueness(Uniqueness u) {
    switch (u) {
    case Uniqueness::Unique: return SampleVerdict::Unique;
    case Uniqueness::NotUnique: return SampleVerdict::NotUnique;
    case Uniqueness::Inconclusive: return SampleVerdict::Inconclusive;
    }
    return SampleVerdict::Failed;
}

} // namespace

CellMap explore_slice(const GameSpec& game, const AffineSlice& slice, const ExploreOptions& options) {
    slice.validate(game);
    if (game.state_count() <= options.structural.state_cap &&
        !structural_verdict(game, options.structural).solvable())
        throw Error(ErrorCode::NotStructurallySolvable, "slice exploration needs a structurally solvable game");

    const std::size_t dims = slice.directions.size();
    CellMap map;
    map.shape.assign(dims, slice.resolution);
    std::size_t total = 1;
    for (std::size_t d = 0; d < dims; ++d) total *= slice.resolution;

    HoffmanKarpOptions hk = options.solver;
    hk.solver.anchor = options.anchor;
    CertifyOptions cert_opts = options.certify;
    cert_opts.solver.anchor = options.anchor;

    map.samples.reserve(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
        CellSample s;
        s.index.assign(dims, 0);
        std::size_t rest = flat;
        for (std::size_t d = dims; d-- > 0;) {
            s.index[d] = rest % slice.resolution;
            rest /= slice.resolution;
        }
        for (std::size_t d = 0; d < dims; ++d) s.coords.push_back(slice.coordinate(d, s.index[d]));
        try {
            const PaymentVector r = slice.at(s.coords);
            const HoffmanKarpResult res = hoffman_karp(game, r, first_policy(game), hk);
            s.fingerprint = fingerprint_of(res.final_policies);
            if (!res.well_posed()) {
                s.failure = "NotWellPosed";
            } else {
                s.lambda = res.pair->lambda;
                s.bias = res.pair->bias;
                s.residual = res.pair->residual;
                s.verdict = from_uniqueness(certify_uniqueness(game, r, *res.pair, cert_opts).verdict);
            }
        } catch (const Error& e) {
            s.verdict = SampleVerdict::Failed;
            s.failure = std::string(to_string(e.code()));
        }
        map.samples.push_back(std::move(s));
    }

    std::vector<std::size_t> stride(dims, 1);
    for (std::size_t d = dims; d-- > 1;) stride[d - 1] = stride[d] * slice.resolution;
    for (std::size_t flat = 0; flat < total; ++flat) {
        const CellSample& a = map.samples[flat];
        for (std::size_t d = 0; d < dims; ++d) {
            if (a.index[d] + 1 >= slice.resolution) continue;
            const CellSample& b = map.samples[flat + stride[d]];
            BoundarySegment seg;
            seg.from = flat;
            seg.to = flat + stride[d];
            seg.verdict_change = a.verdict != b.verdict;
            seg.fingerprint_change = a.fingerprint != b.fingerprint;
            if (!seg.verdict_change && !seg.fingerprint_change) continue;
            for (std::size_t e = 0; e < dims; ++e) seg.midpoint.push_back(0.5 * (a.coords[e] + b.coords[e]));
            map.boundaries.push_back(std::move(seg));
        }
    }
    return map;
}

double BoundaryLine::distance(double t1, double t2) const {
    return std::abs(a * t1 + b * t2 - c) / std::hypot(a, b);
}

namespace {

// Elementary circuits as node sequences, each listed once from its smallest node.
void circuits_from(const Adjacency& g, std::size_t start, std::size_t v, std::vector<std::size_t>& path,
                   std::vector<bool>& on_path, std::vector<std::vector<std::size_t>>& out) {
    for (std::size_t w : g[v]) {
        if (w == start) {
            out.push_back(path);
        } else if (w > start && !on_path[w]) {
            on_path[w] = true;
            path.push_back(w);
            circuits_from(g, start, w, path, on_path, out);
            path.pop_back();
            on_path[w] = false;
        }
    }
}

struct Affine {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
};

} // namespace

std::vector<BoundaryLine> exact_deterministic_cells_2d(const GameSpec& game, const AffineSlice& slice,
                                                       std::uint64_t circuit_cap) {
    if (!game.is_deterministic()) throw Error(ErrorCode::NotDeterministic, "exact cells need a deterministic game");
    slice.validate(game);
    if (slice.directions.size() != 2) throw Error(ErrorCode::InvalidSlice, "exact cells need a 2-D slice");
    const std::size_t n = game.state_count();

    // Every slot is an arc; an elementary circuit visits each state once, so it uses one MIN
    // action per visited state and is a circuit of M^sigma for some sigma.
    std::vector<std::map<std::size_t, std::vector<std::size_t>>> parallel(n);
    Adjacency g(n);
    for (std::size_t k = 0; k < game.key_count(); ++k) {
        const SlotKey& key = game.key(k);
        const std::size_t j = game.branch(key.state, key.min_action, key.max_action).support.front();
        auto& keys = parallel[key.state][j];
        if (keys.empty()) g[key.state].push_back(j);
        keys.push_back(k);
    }
    for (auto& out : g) std::sort(out.begin(), out.end());

    std::vector<std::vector<std::size_t>> node_circuits;
    std::vector<bool> on_path(n, false);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> path{s};
        on_path[s] = true;
        circuits_from(g, s, s, path, on_path, node_circuits);
        on_path[s] = false;
    }

    std::uint64_t circuits = 0;
    std::vector<Affine> means;
    for (const auto& cyc : node_circuits) {
        const std::size_t len = cyc.size();
        std::vector<std::size_t> pick(len, 0);
        for (;;) {
            if (++circuits > circuit_cap)
                throw Error(ErrorCode::CircuitCapExceeded,
                            "more than " + std::to_string(circuit_cap) + " elementary circuits");
            Affine m;
            for (std::size_t t = 0; t < len; ++t) {
                const std::size_t k = parallel[cyc[t]].at(cyc[(t + 1) % len])[pick[t]];
                m.c0 += slice.base[k];
                m.c1 += slice.directions[0][k];
                m.c2 += slice.directions[1][k];
            }
            const auto l = static_cast<double>(len);
            means.push_back({m.c0 / l, m.c1 / l, m.c2 / l});
            std::size_t t = len;
            while (t-- > 0) {
                if (++pick[t] < parallel[cyc[t]].at(cyc[(t + 1) % len]).size()) break;
                pick[t] = 0;
            }
            if (t == static_cast<std::size_t>(-1)) break;
        }
    }

    std::vector<BoundaryLine> lines;
    for (std::size_t p = 0; p < means.size(); ++p)
        for (std::size_t q = p + 1; q < means.size(); ++q) {
            BoundaryLine line{means[p].c1 - means[q].c1, means[p].c2 - means[q].c2, means[q].c0 - means[p].c0};
            const double scale = std::max(std::abs(line.a), std::abs(line.b));
            if (scale <= 1e-12) continue;
            line.a /= scale;
            line.b /= scale;
            line.c /= scale;
            const double lead = std::abs(line.a) > 1e-12 ? line.a : line.b;
            if (lead < 0) {
                line.a = -line.a;
                line.b = -line.b;
                line.c = -line.c;
            }
            lines.push_back(line);
        }

    std::sort(lines.begin(), lines.end(), [](const BoundaryLine& x, const BoundaryLine& y) {
        if (x.a != y.a) return x.a < y.a;
        if (x.b != y.b) return x.b < y.b;
        return x.c < y.c;
    });
    std::vector<BoundaryLine> unique;
    for (const auto& l : lines) {
        const bool dup = std::any_of(unique.begin(), unique.end(), [&](const BoundaryLine& u) {
            return std::abs(u.a - l.a) <= 1e-9 && std::abs(u.b - l.b) <= 1e-9 && std::abs(u.c - l.c) <= 1e-9;
        });
        if (!dup) unique.push_back(l);
    }
    return unique;
}

ExampleFixture example_fixture() {
    const double half = 0.5;
    RawGame raw;
    raw.states = {"1", "2", "3"};
    raw.entries = {
        {"1", "a1", "b1", 0.0, {{"1", half}, {"3", half}}},
        {"1", "a2", "b1", 1.0, {{"1", half}, {"2", half}}},
        {"2", "a1", "b1", 2.0, {{"1", half}, {"3", half}}},
        {"2", "a2", "b1", 1.0, {{"1", half}, {"2", half}}},
        {"2", "a2", "b2", -2.0, {{"3", 1.0}}},
        {"3", "a1", "b1", -3.0, {{"1", half}, {"3", half}}},
        {"3", "a1", "b2", 1.0, {{"3", 1.0}}},
    };
    GameSpec game = validate(raw);
    PaymentVector r0 = game.payments();
    return {std::move(game), std::move(r0)};
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string cellmap_to_csv(const GameSpec& game, const CellMap& map) {
    std::ostringstream os;
    for (std::size_t d = 0; d < map.shape.size(); ++d) os << "t" << (d + 1) << ",";
    os << "lambda,verdict";
    for (const auto& id : game.state_ids()) os << ",bias_" << id;
    os << ",residual,fingerprint,failure\n";
    for (const auto& s : map.samples) {
        for (double c : s.coords) os << num(c) << ",";
        const bool ok = s.verdict != SampleVerdict::Failed;
        os << (ok ? num(s.lambda) : "") << "," << to_string(s.verdict);
        for (std::size_t i = 0; i < game.state_count(); ++i)
            os << "," << (ok ? num(s.bias[static_cast<Eigen::Index>(i)]) : "");
        os << "," << (ok ? num(s.residual) : "") << "," << s.fingerprint << "," << s.failure << "\n";
    }
    return os.str();
}

} // namespace mpg
