#include "dynagree/stochmat.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include "dynagree/errors.hpp"

namespace dynagree {

namespace {
constexpr double kRowSumTol = 1e-12;
constexpr double kProductDriftTol = 1e-9;
}  // namespace

StochasticMatrix StochasticMatrix::from_rows(int n, std::span<const double> rows) {
    if (n < 1) throw DomainError("StochasticMatrix: dimension must be >= 1");
    if (rows.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw DomainError("StochasticMatrix: entry count does not match dimension");
    for (int p = 0; p < n; ++p) {
        double sum = 0.0;
        for (int q = 0; q < n; ++q) {
            const double w = rows[p * n + q];
            if (!(w >= 0.0) || !std::isfinite(w))
                throw ValidationError("StochasticMatrix: negative or non-finite entry at row " +
                                      std::to_string(p + 1));
            sum += w;
        }
        if (std::abs(sum - 1.0) > kRowSumTol)
            throw ValidationError("StochasticMatrix: row " + std::to_string(p + 1) +
                                  " sums to " + std::to_string(sum));
    }
    StochasticMatrix m;
    m.n_ = n;
    m.a_.assign(rows.begin(), rows.end());
    return m;
}

StochasticMatrix StochasticMatrix::identity(int n) {
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    for (int p = 0; p < n; ++p) a[p * n + p] = 1.0;
    return unchecked(n, std::move(a));
}

StochasticMatrix StochasticMatrix::rank_one(std::span<const double> row) {
    const int n = static_cast<int>(row.size());
    std::vector<double> a;
    a.reserve(static_cast<std::size_t>(n) * n);
    for (int p = 0; p < n; ++p) a.insert(a.end(), row.begin(), row.end());
    return from_rows(n, a);
}

StochasticMatrix StochasticMatrix::unchecked(int n, std::vector<double> rows) {
    if (n < 1 || rows.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw DomainError("StochasticMatrix::unchecked: bad dimensions");
    StochasticMatrix m;
    m.n_ = n;
    m.a_ = std::move(rows);
    return m;
}

double StochasticMatrix::row_sum_drift() const {
    double drift = 0.0;
    for (int p = 0; p < n_; ++p) {
        double sum = 0.0;
        for (int q = 0; q < n_; ++q) sum += a_[p * n_ + q];
        drift = std::max(drift, std::abs(sum - 1.0));
    }
    return drift;
}

double row_apply(std::span<const double> weights, std::span<const double> x) {
    double acc = 0.0;
    const std::size_t n = weights.size();
    for (std::size_t q = 0; q < n; ++q) {
        const double w = weights[q];
        if (w == 0.0) continue;
        acc += w * x[q];
    }
    return acc;
}

double delta_seminorm(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double lo = x[0], hi = x[0];
    for (double v : x) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

double delta_coeff(const StochasticMatrix& w) {
    const int n = w.size();
    double best = 1.0;
    for (int p = 0; p < n; ++p) {
        const auto rp = w.row(p);
        for (int q = p + 1; q < n; ++q) {
            const auto rq = w.row(q);
            double s = 0.0;
            for (int r = 0; r < n; ++r) s += std::min(rp[r], rq[r]);
            best = std::min(best, s);
        }
    }
    return 1.0 - best;
}

StochasticMatrix multiply(const StochasticMatrix& a, const StochasticMatrix& b) {
    if (a.size() != b.size()) throw DomainError("multiply: dimension mismatch");
    const int n = a.size();
    std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            double acc = 0.0;
            for (int r = 0; r < n; ++r) {
                const double w = a(p, r);
                if (w == 0.0) continue;
                acc += w * b(r, q);
            }
            out[p * n + q] = acc;
        }
    }
    auto result = StochasticMatrix::unchecked(n, std::move(out));
    assert(result.row_sum_drift() <= kProductDriftTol);
    return result;
}

ValueVector apply_matrix(const StochasticMatrix& w, std::span<const double> x) {
    if (static_cast<int>(x.size()) != w.size()) throw DomainError("apply_matrix: dimension mismatch");
    ValueVector out(x.size());
    for (int p = 0; p < w.size(); ++p) out[p] = row_apply(w.row(p), x);
    return out;
}

StochasticMatrix backward_product(std::span<const StochasticMatrix> rounds) {
    if (rounds.empty()) throw DomainError("backward_product: empty sequence");
    StochasticMatrix acc = rounds.front();
    for (std::size_t k = 1; k < rounds.size(); ++k) acc = multiply(rounds[k], acc);
    return acc;
}

Digraph associated_graph(const StochasticMatrix& w) {
    // Entry (p,q) > 0 means p uses q's value, i.e. q delivered to p: the
    // graph edge runs q -> p so that in-neighborhoods are the positive row
    // supports. This is the orientation under which the round's delivery
    // graph and the matrix graph coincide.
    Digraph g(w.size());
    for (int p = 0; p < w.size(); ++p)
        for (int q = 0; q < w.size(); ++q)
            if (w(p, q) > 0.0) g.add_edge(q, p);
    return g;
}

namespace {

// Period of a strongly connected digraph: gcd over edges (u,v) of
// level(u) + 1 - level(v), levels from a BFS rooted anywhere.
int graph_period(const Digraph& g) {
    const int n = g.node_count();
    std::vector<int> level(n, -1);
    std::vector<Process> queue{0};
    level[0] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Process u = queue[head];
        g.out_set(u).for_each([&](Process v) {
            if (level[v] == -1) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        });
    }
    int period = 0;
    for (Process u = 0; u < n; ++u)
        g.out_set(u).for_each([&](Process v) {
            period = std::gcd(period, std::abs(level[u] + 1 - level[v]));
        });
    return period == 0 ? 1 : period;
}

}  // namespace

bool is_primitive(const StochasticMatrix& w) {
    const Digraph g = associated_graph(w);
    if (!is_strongly_connected(g)) return false;
    for (int p = 0; p < g.node_count(); ++p)
        if (g.has_edge(p, p)) return true;  // a self-loop forces period 1
    return graph_period(g) == 1;
}

ValueVector perron_vector(const StochasticMatrix& w, double tol, long long max_iter) {
    if (!is_primitive(w)) throw DomainError("perron_vector: matrix is not primitive");
    const int n = w.size();

    auto transpose_apply = [&](const ValueVector& v) {
        ValueVector out(n, 0.0);
        for (int p = 0; p < n; ++p) {
            const double vp = v[p];
            const auto rp = w.row(p);
            for (int q = 0; q < n; ++q) out[q] += rp[q] * vp;
        }
        return out;
    };

    ValueVector pi(n, 1.0 / n);
    ValueVector next = transpose_apply(pi);
    for (long long it = 0; it < max_iter; ++it) {
        double sum = 0.0;
        for (double v : next) sum += v;
        for (double& v : next) v /= sum;
        ValueVector ahead = transpose_apply(next);
        double residual = 0.0;
        for (int q = 0; q < n; ++q) residual = std::max(residual, std::abs(ahead[q] - next[q]));
        if (residual <= tol) {
            for (double v : next)
                if (!(v > 0.0))
                    throw IterationError("perron_vector: converged to a non-positive entry");
            return next;
        }
        next = std::move(ahead);
    }
    throw IterationError("perron_vector: no convergence within iteration cap");
}

double phi_subset(const StochasticMatrix& w, std::span<const double> pi, const ProcessSet& s) {
    const int n = w.size();
    double pi_s = 0.0;
    s.for_each([&](Process p) { pi_s += pi[p]; });
    if (pi_s <= 0.0) throw DomainError("phi_subset: pi(S) must be positive");
    double cross = 0.0;
    for (Process p = 0; p < n; ++p) {
        if (!s.contains(p)) continue;
        for (Process q = 0; q < n; ++q) {
            if (s.contains(q)) continue;
            cross += pi[q] * w(p, q);
        }
    }
    return cross / pi_s;
}

CheegerResult cheeger_constant(const StochasticMatrix& w, std::span<const double> pi) {
    const int n = w.size();
    if (n > 24) throw BudgetError("cheeger_constant: subset enumeration capped at n = 24");
    if (static_cast<int>(pi.size()) != n) throw DomainError("cheeger_constant: pi size mismatch");

    // Gray-code walk over subsets; cross-sum and pi(S) updated per toggle,
    // refreshed from scratch periodically to stop drift accumulating.
    const std::uint32_t total = std::uint32_t{1} << n;
    double cross = 0.0, pi_s = 0.0;
    std::uint32_t mask = 0;
    CheegerResult best;
    bool found = false;

    auto recompute = [&](std::uint32_t m) {
        cross = 0.0;
        pi_s = 0.0;
        for (int p = 0; p < n; ++p) {
            if (!(m >> p & 1)) continue;
            pi_s += pi[p];
            for (int q = 0; q < n; ++q)
                if (!(m >> q & 1)) cross += pi[q] * w(p, q);
        }
    };

    for (std::uint32_t i = 1; i < total; ++i) {
        const std::uint32_t gray = i ^ (i >> 1);
        const int e = std::countr_zero(i);  // toggled element
        const bool added = gray >> e & 1;
        const std::uint32_t prev = mask;
        mask = gray;
        if (i % 4096 == 0) {
            recompute(mask);
        } else if (added) {
            double gain = 0.0, loss = 0.0;
            for (int q = 0; q < n; ++q)
                if (!(mask >> q & 1)) gain += pi[q] * w(e, q);
            for (int p = 0; p < n; ++p)
                if ((prev >> p & 1)) loss += pi[e] * w(p, e);
            cross += gain - loss;
            pi_s += pi[e];
        } else {
            double gain = 0.0, loss = 0.0;
            for (int p = 0; p < n; ++p)
                if ((mask >> p & 1)) gain += pi[e] * w(p, e);
            for (int q = 0; q < n; ++q)
                if (!(prev >> q & 1)) loss += pi[q] * w(e, q);
            cross += gain - loss;
            pi_s -= pi[e];
        }
        if (mask == 0 || mask + 1 == total) continue;
        if (pi_s > 0.0 && pi_s <= 0.5 + 1e-12) {
            const double phi = cross / pi_s;
            if (!found || phi < best.value) {
                found = true;
                best.value = phi;
                ProcessSet s(n);
                for (int p = 0; p < n; ++p)
                    if (mask >> p & 1) s.insert(p);
                best.minimizer = std::move(s);
            }
        }
    }
    if (!found) throw DomainError("cheeger_constant: no admissible subset");
    return best;
}

double second_eigenvalue_modulus(const StochasticMatrix& w) {
    if (!is_primitive(w)) throw DomainError("second_eigenvalue_modulus: matrix is not primitive");
    const int n = w.size();
    Eigen::MatrixXd m(n, n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) m(p, q) = w(p, q);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw IterationError("second_eigenvalue_modulus: eigensolver failed");
    const auto& ev = solver.eigenvalues();
    // Drop the single eigenvalue closest to 1 (the Perron eigenvalue).
    int perron = 0;
    double perron_dist = std::abs(ev[0] - std::complex<double>(1.0, 0.0));
    for (int i = 1; i < n; ++i) {
        const double d = std::abs(ev[i] - std::complex<double>(1.0, 0.0));
        if (d < perron_dist) {
            perron = i;
            perron_dist = d;
        }
    }
    double second = 0.0;
    for (int i = 0; i < n; ++i)
        if (i != perron) second = std::max(second, std::abs(ev[i]));
    return second;
}

SpectralReport spectral_report(const StochasticMatrix& w) {
    SpectralReport rep;
    rep.perron = perron_vector(w);
    rep.second_modulus = second_eigenvalue_modulus(w);
    rep.cheeger = cheeger_constant(w, rep.perron).value;
    rep.pi_min = *std::min_element(rep.perron.begin(), rep.perron.end());
    return rep;
}

namespace {

std::string format_double_local(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string to_csv(const StochasticMatrix& w) {
    std::ostringstream os;
    for (int p = 0; p < w.size(); ++p) {
        for (int q = 0; q < w.size(); ++q) {
            if (q) os << ',';
            os << format_double_local(w(p, q));
        }
        os << '\n';
    }
    return os.str();
}

StochasticMatrix matrix_from_csv(std::string_view text) {
    std::vector<double> entries;
    int rows = 0;
    long long cols = -1;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        ++rows;
        long long count = 0;
        std::size_t field = 0;
        while (field <= line.size()) {
            std::size_t comma = line.find(',', field);
            if (comma == std::string_view::npos) comma = line.size();
            std::string_view tok = line.substr(field, comma - field);
            double v = 0.0;
            auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
                throw ConfigError("matrix CSV: bad number at line " + std::to_string(rows));
            entries.push_back(v);
            ++count;
            if (comma == line.size()) break;
            field = comma + 1;
        }
        if (cols == -1) cols = count;
        if (count != cols)
            throw ConfigError("matrix CSV: ragged row at line " + std::to_string(rows));
    }
    if (rows == 0) throw ConfigError("matrix CSV: empty input");
    if (cols != rows) throw ConfigError("matrix CSV: matrix must be square");
    return StochasticMatrix::from_rows(rows, entries);
}

}  // namespace dynagree
