#include "mpg/maxplus.hpp"

#include <limits>

namespace mpg {

double maxplus_residual(const MaxPlusMatrix& m, double lambda, const MaxPlusVector<double>& u) {
    const auto lhs = m.apply(u);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (lhs[i].is_finite() != u[i].is_finite()) return std::numeric_limits<double>::infinity();
        if (!u[i].is_finite()) continue;
        worst = std::max(worst, std::abs(lhs[i].value() - lambda - u[i].value()));
    }
    return worst;
}

MaxPlusVector<double> to_maxplus(const StateVector& x) {
    MaxPlusVector<double> out;
    out.reserve(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) out.emplace_back(x[i]);
    return out;
}

bool eigenvalue_is_rho(const MaxPlusMatrix& m, double lambda, const StateVector& u, double tol) {
    if (static_cast<std::size_t>(u.size()) != m.size() || !u.allFinite())
        throw Error(ErrorCode::InvalidArgument, "eigenvalue check needs a finite vector of matching size");
    if (maxplus_residual(m, lambda, to_maxplus(u)) > tol) return false;
    const double rho = maximal_circuit_mean(m);
    if (std::abs(rho - lambda) > tol)
        throw std::logic_error("finite tropical eigenvector with eigenvalue different from rho(M)");
    return true;
}

MaxPlusMatrix deterministic_matrix(const GameSpec& game, const PaymentVector& r, const Policy& sigma) {
    if (!game.is_deterministic()) throw Error(ErrorCode::NotDeterministic, "game has a non-deterministic transition");
    game.check_payments(r);
    game.check_policy(sigma);
    const std::size_t n = game.state_count();
    std::vector<MaxPlusVector<double>> rows(n, MaxPlusVector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (const Branch& br : game.action(i, sigma.choice[i]).branches) {
            auto& cell = rows[i][br.support.front()];
            cell = cell + MaxPlus<double>(r[br.key]);
        }
    return MaxPlusMatrix(std::move(rows));
}

} // namespace mpg
