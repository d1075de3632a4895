#include "hkdelay/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hkdelay/assignment.hpp"

namespace hkdelay {
namespace {

void check_order(double p) {
    if (!(p >= 1.0)) {
        throw InvalidArgument("Wasserstein order must satisfy p >= 1, got " + std::to_string(p));
    }
}

void require_uniform_pair(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (a.size() != b.size()) {
        throw UnsupportedInput("assignment transport needs equal atom counts (" +
                               std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    if (a.dim() != b.dim()) {
        throw InvalidArgument("measures live in different dimensions");
    }
    if (!a.is_uniform() || !b.is_uniform()) {
        throw UnsupportedInput("assignment transport needs uniform weights");
    }
}

double permutation_cost(const assignment::CostMatrix& m, const std::vector<std::size_t>& perm) {
    std::vector<double> entries(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        entries[i] = m(i, perm[i]);
    }
    return assignment_total(std::move(entries));
}

// Pairwise swaps that strictly lower the total.
void polish(const assignment::CostMatrix& m, std::vector<std::size_t>& perm) {
    const std::size_t n = perm.size();
    double best = permutation_cost(m, perm);
    for (int pass = 0; pass < 4; ++pass) {
        bool improved = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double local = m(i, perm[i]) + m(j, perm[j]);
                const double swapped = m(i, perm[j]) + m(j, perm[i]);
                if (!(swapped < local)) {
                    continue;
                }
                std::swap(perm[i], perm[j]);
                const double total = permutation_cost(m, perm);
                if (total < best) {
                    best = total;
                    improved = true;
                } else {
                    std::swap(perm[i], perm[j]);
                }
            }
        }
        if (!improved) {
            break;
        }
    }
}

// Permutations that tie with the optimum in exact arithmetic can differ by a
// few ulps once their float entries are summed. Every such permutation uses
// only edges whose reduced cost is within rounding of zero, so enumerate the
// perfect matchings of that tight subgraph (lexicographically, first strict
// minimum wins). The walk is capped; past the cap the best seen so far competes
// with the polished Hungarian answer.
class TightMatchings {
public:
    static constexpr std::size_t kNodeCap = 200'000;

    TightMatchings(const assignment::CostMatrix& m, const assignment::AssignmentSolution& sol)
        : m_(m), adj_(m.n), used_(m.n, 0), current_(m.n) {
        double scale = 1.0;
        for (double c : m.cost) {
            scale = std::max(scale, std::abs(c));
        }
        const double tol = 1e-12 * scale * static_cast<double>(m.n + 1);
        for (std::size_t i = 0; i < m.n; ++i) {
            for (std::size_t j = 0; j < m.n; ++j) {
                if (m(i, j) - sol.row_potential[i] - sol.col_potential[j] <= tol) {
                    adj_[i].push_back(j);
                }
            }
        }
    }

    void run() { visit(0); }
    bool complete() const { return nodes_ <= kNodeCap; }
    bool found() const { return !best_perm_.empty(); }
    double best_cost() const { return best_; }
    const std::vector<std::size_t>& best_perm() const { return best_perm_; }

private:
    void visit(std::size_t row) {
        if (++nodes_ > kNodeCap) {
            return;
        }
        if (row == m_.n) {
            const double total = permutation_cost(m_, current_);
            if (total < best_) {
                best_ = total;
                best_perm_ = current_;
            }
            return;
        }
        for (std::size_t j : adj_[row]) {
            if (used_[j]) {
                continue;
            }
            used_[j] = 1;
            current_[row] = j;
            visit(row + 1);
            used_[j] = 0;
            if (nodes_ > kNodeCap) {
                return;
            }
        }
    }

    const assignment::CostMatrix& m_;
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<char> used_;
    std::vector<std::size_t> current_;
    std::size_t nodes_ = 0;
    double best_ = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_perm_;
};

std::vector<std::size_t> float_optimal_assignment(const assignment::CostMatrix& m) {
    const assignment::AssignmentSolution sol = assignment::solve_assignment(m);
    TightMatchings tight(m, sol);
    tight.run();
    if (tight.complete() && tight.found()) {
        return tight.best_perm();
    }
    std::vector<std::size_t> perm = sol.row_to_col;
    polish(m, perm);
    if (tight.found() && tight.best_cost() < permutation_cost(m, perm)) {
        return tight.best_perm();
    }
    return perm;
}

struct SortedAtoms {
    std::vector<double> x;
    std::vector<double> w;
};

SortedAtoms sorted_line(const EmpiricalMeasure& m) {
    std::vector<std::size_t> order(m.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto coords = m.atoms().coords();
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return coords[i] < coords[j]; });
    SortedAtoms s;
    s.x.reserve(order.size());
    s.w.reserve(order.size());
    for (std::size_t i : order) {
        s.x.push_back(coords[i]);
        s.w.push_back(m.weights()[i]);
    }
    return s;
}

}  // namespace

double assignment_total(std::vector<double> entries) {
    std::sort(entries.begin(), entries.end());
    double total = 0.0;
    for (double c : entries) {
        total += c;
    }
    return total;
}

double transport_cost(std::span<const double> x, std::span<const double> y, double p) {
    const double d = distance(x, y);
    return p == 1.0 ? d : std::pow(d, p);
}

TransportResult dp_uniform(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p) {
    check_order(p);
    if (std::isinf(p)) {
        return dinf_uniform(a, b);
    }
    require_uniform_pair(a, b);
    const std::size_t n = a.size();
    assignment::CostMatrix m{n, std::vector<double>(n * n)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m.cost[i * n + j] = transport_cost(a.atoms()[i], b.atoms()[j], p);
        }
    }
    const std::vector<std::size_t> perm = float_optimal_assignment(m);

    TransportResult r;
    r.plan.cost = permutation_cost(m, perm);
    const double mass = 1.0 / static_cast<double>(n);
    r.plan.pairs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.plan.pairs.push_back({i, perm[i], mass});
    }
    const double mean = r.plan.cost / static_cast<double>(n);
    r.distance = p == 1.0 ? mean : std::pow(mean, 1.0 / p);
    return r;
}

TransportResult dinf_uniform(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    require_uniform_pair(a, b);
    const std::size_t n = a.size();
    std::vector<double> dist(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            dist[i * n + j] = distance(a.atoms()[i], b.atoms()[j]);
        }
    }
    std::vector<double> levels = dist;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    const auto match_below = [&](double threshold) {
        assignment::BipartiteGraph g{n, n, std::vector<std::vector<std::size_t>>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (dist[i * n + j] <= threshold) {
                    g.adjacency[i].push_back(j);
                }
            }
        }
        return assignment::max_bipartite_matching(g);
    };

    // Smallest level admitting a perfect matching; the largest level always does.
    std::size_t lo = 0;
    std::size_t hi = levels.size() - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (match_below(levels[mid]).size == n) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    const assignment::Matching matching = match_below(levels[lo]);

    TransportResult r;
    r.distance = levels[lo];
    const double mass = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = matching.left_to_right[i];
        r.plan.pairs.push_back({i, j, mass});
        r.plan.cost = std::max(r.plan.cost, dist[i * n + j]);
    }
    return r;
}

double dp_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p) {
    check_order(p);
    if (a.dim() != 1 || b.dim() != 1) {
        throw UnsupportedInput("dp_1d needs one-dimensional measures");
    }
    const SortedAtoms sa = sorted_line(a);
    const SortedAtoms sb = sorted_line(b);
    const bool bottleneck = std::isinf(p);
    constexpr double kMassFloor = 1e-15;

    std::size_t i = 0;
    std::size_t j = 0;
    double left_a = sa.w[0];
    double left_b = sb.w[0];
    double total = 0.0;
    while (i < sa.x.size() && j < sb.x.size()) {
        const double mass = std::min(left_a, left_b);
        const double gap = std::abs(sa.x[i] - sb.x[j]);
        if (mass > kMassFloor) {
            total = bottleneck ? std::max(total, gap) : total + mass * (p == 1.0 ? gap : std::pow(gap, p));
        }
        left_a -= mass;
        left_b -= mass;
        // Advance whichever side ran out; both may within roundoff.
        const bool next_a = left_a <= kMassFloor;
        const bool next_b = left_b <= kMassFloor;
        if (next_a) {
            if (++i < sa.x.size()) {
                left_a = sa.w[i];
            }
        }
        if (next_b) {
            if (++j < sb.x.size()) {
                left_b = sb.w[j];
            }
        }
        if (!next_a && !next_b) {
            break;  // unreachable with consistent masses
        }
    }
    if (bottleneck || p == 1.0) {
        return total;
    }
    return std::pow(total, 1.0 / p);
}

double wasserstein_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p) {
    check_order(p);
    if (a.size() == b.size() && a.is_uniform() && b.is_uniform()) {
        return std::isinf(p) ? dinf_uniform(a, b).distance : dp_uniform(a, b, p).distance;
    }
    if (a.dim() == 1 && b.dim() == 1) {
        return dp_1d(a, b, p);
    }
    throw UnsupportedInput("weighted transport is only supported in one dimension");
}

bool plan_is_coupling(const TransportPlan& plan, std::span<const double> a_weights,
                      std::span<const double> b_weights, double tol) {
    std::vector<double> ma(a_weights.size(), 0.0), mb(b_weights.size(), 0.0);
    for (const TransportPair& pr : plan.pairs) {
        if (!(pr.mass > 0.0) || pr.source >= ma.size() || pr.target >= mb.size()) {
            return false;
        }
        ma[pr.source] += pr.mass;
        mb[pr.target] += pr.mass;
    }
    for (std::size_t i = 0; i < ma.size(); ++i) {
        if (std::abs(ma[i] - a_weights[i]) > tol) {
            return false;
        }
    }
    for (std::size_t j = 0; j < mb.size(); ++j) {
        if (std::abs(mb[j] - b_weights[j]) > tol) {
            return false;
        }
    }
    return true;
}

}  // namespace hkdelay
