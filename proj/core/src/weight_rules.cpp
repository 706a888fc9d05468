#include "dynagree/weight_rules.hpp"

#include <algorithm>
#include <cmath>

#include "dynagree/errors.hpp"
#include "dynagree/stochmat.hpp"

namespace dynagree {

namespace {
constexpr double kReduceSentinel = -1.0;
}

WeightRule WeightRule::equal_neighbor() { return {}; }

WeightRule WeightRule::fixed_weight(std::vector<double> alpha) {
    WeightRule r;
    r.kind = Kind::FixedWeight;
    r.alpha = std::move(alpha);
    return r;
}

WeightRule WeightRule::reduce(int f) {
    WeightRule r;
    r.kind = Kind::Reduce;
    r.f = f;
    return r;
}

WeightRule WeightRule::center(int f) {
    WeightRule r;
    r.kind = Kind::Center;
    r.f = f;
    return r;
}

WeightRule WeightRule::macro_round() {
    WeightRule r;
    r.kind = Kind::MacroRound;
    return r;
}

double WeightRule::rho(int n) const {
    switch (kind) {
        case Kind::EqualNeighbor:
        case Kind::MacroRound:
            return 1.0 / n;
        case Kind::FixedWeight: {
            if (alpha.empty()) return 1.0 / n;  // default alpha_p = n
            double rho = 1.0;
            double inv_sum = 0.0;
            for (double a : alpha) {
                rho = std::min(rho, 1.0 / a);
                inv_sum += 1.0 / a;
            }
            // Worst-case self weight over any communication graph: every
            // other process an in-neighbor. When positive it can undercut
            // min 1/alpha_q and is then the honest guarantee.
            double worst_self = 1.0;
            for (double a : alpha) worst_self = std::min(worst_self, 1.0 - (inv_sum - 1.0 / a));
            if (worst_self > 0.0) rho = std::min(rho, worst_self);
            return rho;
        }
        case Kind::Reduce:
            return 1.0 / (n - f);
        case Kind::Center:
            return 1.0 / (2.0 * (n - f));
    }
    return 0.0;
}

void WeightRule::validate(int n) const {
    switch (kind) {
        case Kind::EqualNeighbor:
        case Kind::MacroRound:
            break;
        case Kind::FixedWeight:
            if (!alpha.empty() && static_cast<int>(alpha.size()) != n)
                throw ConfigError("rule.alpha: expected " + std::to_string(n) + " entries");
            for (double a : alpha)
                if (!(a > 0.0)) throw ConfigError("rule.alpha: entries must be positive");
            break;
        case Kind::Reduce:
            if (f < 0 || f > n - 1) throw ConfigError("rule.f: must be in [0, n-1]");
            if (n <= 2 * f) throw ConfigError("rule.f: reduce requires n > 2f");
            break;
        case Kind::Center:
            if (f < 0 || f > n - 1) throw ConfigError("rule.f: must be in [0, n-1]");
            if (n <= 2 * f) throw ConfigError("rule.f: center requires n > 2f");
            break;
    }
}

std::string WeightRule::name() const {
    switch (kind) {
        case Kind::EqualNeighbor: return "equal_neighbor";
        case Kind::FixedWeight: return "fixed_weight";
        case Kind::Reduce: return "reduce";
        case Kind::Center: return "center";
        case Kind::MacroRound: return "macro_round";
    }
    return "?";
}

ReceiverUpdate equal_neighbor_update(int n, Process receiver, const ProcessSet& in,
                                     std::span<const double> gathered) {
    if (in.empty()) throw DomainError("equal_neighbor: empty in-neighborhood");
    if (!in.contains(receiver)) throw DomainError("equal_neighbor: receiver must hear itself");
    ReceiverUpdate up;
    up.weights.assign(n, 0.0);
    const double w = 1.0 / in.size();
    in.for_each([&](Process q) { up.weights[q] = w; });
    up.value = row_apply(up.weights, gathered);
    return up;
}

ReceiverUpdate fixed_weight_update(int n, Process receiver, const ProcessSet& in,
                                   std::span<const double> gathered,
                                   std::span<const double> alpha, int round) {
    if (!in.contains(receiver)) throw DomainError("fixed_weight: receiver must hear itself");
    ReceiverUpdate up;
    up.weights.assign(n, 0.0);
    double others = 0.0;
    in.for_each([&](Process q) {
        if (q == receiver) return;
        const double w = alpha.empty() ? 1.0 / n : 1.0 / alpha[q];
        up.weights[q] = w;
        others += w;
    });
    const double self = 1.0 - others;
    if (!(self > 0.0))
        throw ConfigError("fixed_weight: nonpositive self weight at round " +
                          std::to_string(round) + ", receiver " + std::to_string(receiver + 1));
    up.weights[receiver] = self;
    up.value = row_apply(up.weights, gathered);
    return up;
}

namespace {

// Sorted (value, sender) pairs; the id tie-break keeps trimming stable.
std::vector<std::pair<double, Process>> sorted_received(
    int n, const ProcessSet& in, std::span<const double> gathered, bool fill_missing) {
    std::vector<std::pair<double, Process>> vals;
    vals.reserve(n);
    for (Process q = 0; q < n; ++q) {
        if (in.contains(q))
            vals.emplace_back(gathered[q], q);
        else if (fill_missing)
            vals.emplace_back(kReduceSentinel, q);
    }
    std::sort(vals.begin(), vals.end());
    return vals;
}

}  // namespace

ReceiverUpdate reduce_update(int n, int f, Process receiver, const ProcessSet& in,
                             std::span<const double> gathered, int round) {
    if (n <= 2 * f) throw ConfigError("reduce: requires n > 2f");
    const int received = in.size();
    if (received < n - f)
        throw ConfigError("reduce: only " + std::to_string(received) + " of " +
                          std::to_string(n) + " values received at round " +
                          std::to_string(round) + ", receiver " + std::to_string(receiver + 1));
    auto vals = sorted_received(n, in, gathered, /*fill_missing=*/true);
    ReceiverUpdate up;
    up.weights.assign(n, 0.0);
    const double w = 1.0 / (n - f);
    for (int i = f; i < n; ++i) up.weights[vals[i].second] = w;
    up.value = row_apply(up.weights, gathered);
    return up;
}

ReceiverUpdate center_update(int n, int f, Process receiver, const ProcessSet& in,
                             std::span<const double> gathered, int round) {
    if (n <= 2 * f) throw ConfigError("center: requires n > 2f");
    const int t = n - in.size();
    if (t > f)
        throw ConfigError("center: " + std::to_string(t) + " missing senders exceed f = " +
                          std::to_string(f) + " at round " + std::to_string(round) +
                          ", receiver " + std::to_string(receiver + 1));
    auto vals = sorted_received(n, in, gathered, /*fill_missing=*/false);
    const int count = static_cast<int>(vals.size());  // n - t
    ReceiverUpdate up;
    up.weights.assign(n, 0.0);
    const double w = 1.0 / (n - f);
    if ((f - t) % 2 == 0) {
        const int drop = (f - t) / 2;
        for (int i = drop; i < count - drop; ++i) up.weights[vals[i].second] = w;
    } else {
        const int drop = (f - t - 1) / 2;
        for (int i = drop; i < count - drop; ++i) up.weights[vals[i].second] = w;
        up.weights[vals[drop].second] = w / 2.0;
        up.weights[vals[count - drop - 1].second] = w / 2.0;
    }
    up.value = row_apply(up.weights, gathered);
    return up;
}

ReceiverUpdate rule_update(const WeightRule& rule, int n, int round, Process receiver,
                           const ProcessSet& in, std::span<const double> gathered) {
    switch (rule.kind) {
        case WeightRule::Kind::EqualNeighbor:
            return equal_neighbor_update(n, receiver, in, gathered);
        case WeightRule::Kind::FixedWeight:
            return fixed_weight_update(n, receiver, in, gathered, rule.alpha, round);
        case WeightRule::Kind::Reduce:
            return reduce_update(n, rule.f, receiver, in, gathered, round);
        case WeightRule::Kind::Center:
            return center_update(n, rule.f, receiver, in, gathered, round);
        case WeightRule::Kind::MacroRound:
            throw ConfigError("macro_round is evaluated per block, not per receiver");
    }
    throw ConfigError("unknown rule kind");
}

std::vector<ProcessSet> flood_block(std::span<const CommGraph> block) {
    if (block.empty()) throw DomainError("flood_block: empty block");
    const int n = block.front().node_count();
    std::vector<ProcessSet> heard(n, ProcessSet(n));
    for (Process p = 0; p < n; ++p) heard[p].insert(p);
    for (const CommGraph& g : block) {
        if (g.node_count() != n) throw DomainError("flood_block: node count mismatch");
        std::vector<ProcessSet> next(n, ProcessSet(n));
        for (Process p = 0; p < n; ++p)
            g.graph().in_set(p).for_each([&](Process q) { next[p] |= heard[q]; });
        heard = std::move(next);
    }
    return heard;
}

std::vector<double> macro_round_equal_neighbor(std::span<const CommGraph> block,
                                               std::span<const double> start) {
    const int n = static_cast<int>(start.size());
    if (static_cast<int>(block.size()) != n - 1)
        throw DomainError("macro_round: block length must be n-1");
    auto heard = flood_block(block);
    std::vector<double> out(n);
    std::vector<double> weights(n);
    for (Process p = 0; p < n; ++p) {
        std::fill(weights.begin(), weights.end(), 0.0);
        const double w = 1.0 / heard[p].size();
        heard[p].for_each([&](Process q) { weights[q] = w; });
        out[p] = row_apply(weights, start);
    }
    return out;
}

}  // namespace dynagree
