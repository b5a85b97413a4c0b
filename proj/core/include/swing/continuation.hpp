#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "swing/basis.hpp"
#include "swing/contract.hpp"
#include "swing/grid.hpp"
#include "swing/mlp.hpp"

namespace swing {

enum class ContinuationKind { linear, mlp };

/// Fitted continuation estimators, one per (date k, level of date k+1):
/// entry [k][l] approximates E[V_{k+1}(X_{k+1}, Q_l) | X_k] for k = 0..n-2.
struct ContinuationModel {
    ContinuationKind kind = ContinuationKind::linear;
    BasisSpec basis;
    MlpSpec network;
    QGrid grid;
    std::vector<std::vector<Eigen::VectorXd>> coefficients;  ///< linear kind
    std::vector<std::vector<MlpParams>> networks;            ///< mlp kind
    std::vector<std::vector<bool>> fitted;
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;
    std::string contract_hash;

    [[nodiscard]] int n_dates() const noexcept { return grid.n_dates(); }

    /// Continuation estimate at date k for level `level` of date k+1 and
    /// state x. Throws DomainError for levels that were never fitted.
    [[nodiscard]] double value(int k, std::size_t level, double x) const;
};

/// Stable digest of the contract terms recorded in snapshots.
std::string contract_hash(const SwingContract& contract);

inline constexpr int kSnapshotVersion = 1;

/// Versioned JSON snapshot: basis or network spec, grid, per-(k, Q) arrays.
void write_snapshot(std::ostream& out, const ContinuationModel& model);
ContinuationModel read_snapshot(std::istream& in);

}  // namespace swing
