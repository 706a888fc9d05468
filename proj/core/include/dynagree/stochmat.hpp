#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynagree/digraph.hpp"
#include "dynagree/process_set.hpp"

namespace dynagree {

/// Per-round value vector x(k); entry p is the value held by process p.
using ValueVector = std::vector<double>;

/// Row-stochastic matrix of averaging weights. Row p holds the weights
/// process p applies, indexed by sender: entry (p,q) = w_qp, so the
/// associated graph has edge (q,p) exactly when (p,q) is positive.
///
/// Construction from weights validates nonnegativity and row sums to 1
/// within 1e-12. Products are NOT renormalized; their row-sum drift is a
/// measured quantity, checked against a looser 1e-9 in debug builds.
class StochasticMatrix {
public:
    StochasticMatrix() = default;

    /// Validating constructor; `rows` is row-major with n*n entries.
    static StochasticMatrix from_rows(int n, std::span<const double> rows);

    static StochasticMatrix identity(int n);

    /// Rank-one matrix whose every row equals `row` (must be a validated
    /// weight row).
    static StochasticMatrix rank_one(std::span<const double> row);

    /// Unvalidated adoption of raw entries; products use this.
    static StochasticMatrix unchecked(int n, std::vector<double> rows);

    int size() const { return n_; }
    double operator()(Process p, Process q) const { return a_[p * n_ + q]; }
    std::span<const double> row(Process p) const {
        return {a_.data() + static_cast<std::size_t>(p) * n_, static_cast<std::size_t>(n_)};
    }
    std::span<const double> data() const { return a_; }

    /// Largest |row sum - 1| over all rows.
    double row_sum_drift() const;

    friend bool operator==(const StochasticMatrix&, const StochasticMatrix&) = default;

private:
    int n_ = 0;
    std::vector<double> a_;
};

/// Shared accumulation kernel: sum of w[q]*x[q] over ascending q, skipping
/// exact zeros. Every execution path that must be bit-comparable (engine
/// rounds, delayed rounds, virtual rounds, matrix application) funnels
/// through this loop.
double row_apply(std::span<const double> weights, std::span<const double> x);

/// max(x) - min(x); the seminorm whose contraction the whole theory tracks.
double delta_seminorm(std::span<const double> x);

/// Dobrushin coefficient of ergodicity:
/// 1 - min over row pairs (p,q) of sum_r min(W_pr, W_qr). In [0, 1]; equals
/// the operator seminorm of W with respect to delta_seminorm.
double delta_coeff(const StochasticMatrix& w);

/// Matrix product a*b with row sums accumulated in ascending index order.
StochasticMatrix multiply(const StochasticMatrix& a, const StochasticMatrix& b);

/// W x, rows applied through row_apply.
ValueVector apply_matrix(const StochasticMatrix& w, std::span<const double> x);

/// Backward product of per-round matrices given oldest first:
/// rounds = [W(1), ..., W(k)] yields W(k)·...·W(1), the matrix that maps
/// x(0) to x(k). No renormalization.
StochasticMatrix backward_product(std::span<const StochasticMatrix> rounds);

/// Graph of the positive entries, oriented so in-neighborhoods equal the
/// rows' positive supports (entry (p,q) > 0 puts q among p's in-neighbors:
/// q delivered a value that p weighted). Under this orientation the matrix
/// graph of a round equals its delivery graph, and the rooted/nonsplit
/// characterizations read off directly. Self-loops are not implied;
/// virtual-round matrices legitimately lack most of them.
Digraph associated_graph(const StochasticMatrix& w);

/// Strongly connected with aperiodic positive-entry graph.
bool is_primitive(const StochasticMatrix& w);

/// Positive left fixed point of w (W^T pi = pi, sum pi = 1) by power
/// iteration on the transpose with 1-norm renormalization. Requires a
/// primitive matrix; residual ||W^T pi - pi||_inf <= tol on return.
ValueVector perron_vector(const StochasticMatrix& w, double tol = 1e-12,
                          long long max_iter = 1'000'000);

/// Bottleneck ratio of the subset S as printed: pi(S)^{-1} times the sum of
/// pi_q * W_pq over p in S, q not in S. (Note the weight pi_q on the target
/// side; this is asymmetric and kept verbatim.)
double phi_subset(const StochasticMatrix& w, std::span<const double> pi,
                  const ProcessSet& s);

struct CheegerResult {
    double value = 0.0;
    ProcessSet minimizer;
};

/// Minimum of phi_subset over all nonempty S with pi(S) <= 1/2, by
/// exhaustive subset enumeration (n <= 24, else BudgetError).
CheegerResult cheeger_constant(const StochasticMatrix& w, std::span<const double> pi);

/// |lambda_2|: the largest modulus among eigenvalues other than the Perron
/// eigenvalue 1. Dense eigensolve; requires a primitive matrix.
double second_eigenvalue_modulus(const StochasticMatrix& w);

struct SpectralReport {
    ValueVector perron;
    double second_modulus = 0.0;
    double cheeger = 0.0;
    double pi_min = 0.0;
};

/// Perron vector, |lambda_2|, Cheeger constant and pi_min in one sweep.
SpectralReport spectral_report(const StochasticMatrix& w);

/// Row-major CSV with shortest round-trip decimals; parse validates
/// squareness and stochasticity.
std::string to_csv(const StochasticMatrix& w);
StochasticMatrix matrix_from_csv(std::string_view text);

}  // namespace dynagree
