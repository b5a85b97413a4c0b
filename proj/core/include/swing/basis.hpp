#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace swing {

enum class BasisKind { normalized_hermite, monomial, indicator_partition };

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string& name);

/// Regression family e^m = (e_1, ..., e_m) on a scalar (standardized) state.
struct BasisSpec {
    BasisKind kind = BasisKind::normalized_hermite;
    std::size_t size = 1;
    /// Indicator kind: m - 1 strictly increasing cut points; cell i is
    /// [cut_{i-1}, cut_i) with open outer cells.
    std::vector<double> breakpoints;

    void validate() const;
    friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

/// Physicists' Hermite polynomial H_k by H_{k+1} = 2x H_k - 2k H_{k-1}.
double hermite_raw(unsigned degree, double x) noexcept;

/// Probabilists' Hermite polynomial He_k by He_{k+1} = x He_k - k He_{k-1}.
double hermite_probabilists(unsigned degree, double x) noexcept;

void eval_basis(const BasisSpec& spec, double x, std::span<double> out);
Eigen::VectorXd eval_basis(const BasisSpec& spec, double x);

/// Feature matrix with one row per sample.
Eigen::MatrixXd design_matrix(const BasisSpec& spec, std::span<const double> xs);

/// Empirical Gram matrix (1/N) F^T F of an N x m feature matrix.
struct GramMatrix {
    Eigen::MatrixXd values;
    std::size_t samples = 0;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
    [[nodiscard]] double min_eigenvalue() const;
    [[nodiscard]] bool singular(double tolerance = 1e-10) const;
};

GramMatrix empirical_gram(const Eigen::MatrixXd& features);

/// Regression coordinates theta with solve diagnostics.
struct CoefficientVector {
    Eigen::VectorXd theta;
    std::size_t rank = 0;
    double min_singular_value = 0.0;
    double condition_number = 0.0;
    bool pseudo_inverse = false;  ///< minimal-norm fallback was used
};

/// Above this condition number the normal equations are solved by
/// minimal-norm pseudo-inverse.
inline constexpr double kConditionLimit = 1e12;

/// Factorizes a Gram matrix once and solves for any number of moment vectors.
/// Tries a Cholesky factorization first; a singular or ill-conditioned Gram
/// falls back to the SVD pseudo-inverse.
class GramSolver {
public:
    explicit GramSolver(const GramMatrix& gram);

    [[nodiscard]] CoefficientVector solve(const Eigen::VectorXd& moment) const;
    [[nodiscard]] bool uses_pseudo_inverse() const noexcept { return pseudo_; }
    [[nodiscard]] std::size_t rank() const noexcept { return rank_; }

private:
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::MatrixXd pinv_;
    std::size_t rank_ = 0;
    double min_singular_ = 0.0;
    double condition_ = 0.0;
    bool pseudo_ = false;
};

/// theta solving gram * theta = moment (minimal norm when singular).
/// Throws NumericalError on non-finite input.
CoefficientVector solve_coefficients(const GramMatrix& gram, const Eigen::VectorXd& moment);

/// Both sides of the Gram determinant identity
/// G(x, x_1..x_n) = ||x - p(x)||^2 G(x_1..x_n), with p the orthogonal
/// projection onto span(x_1..x_n), all under the empirical inner product
/// <u, v> = (1/N) sum u_i v_i. Throws DomainError when G(x_1..x_n) <= 1e-12.
std::pair<double, double> gram_determinant_residual(std::span<const double> x,
                                                    const std::vector<std::vector<double>>& basis_samples);

}  // namespace swing
