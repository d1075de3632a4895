#pragma once

#include <cstddef>
#include <vector>

namespace hkdelay::assignment {

/// Dense n x n cost matrix, row-major.
struct CostMatrix {
    std::size_t n = 0;
    std::vector<double> cost;

    double operator()(std::size_t i, std::size_t j) const { return cost[i * n + j]; }
};

struct AssignmentSolution {
    std::vector<std::size_t> row_to_col;
    /// Dual potentials: cost(i, j) - row_potential[i] - col_potential[j] >= 0 up to
    /// rounding, with equality on the chosen entries.
    std::vector<double> row_potential;
    std::vector<double> col_potential;
};

AssignmentSolution solve_assignment(const CostMatrix& m);

/// Minimum-cost perfect assignment (Hungarian method with potentials, O(n^3)).
/// Returns row_to_col. Ties resolve toward the smallest column index.
std::vector<std::size_t> min_cost_assignment(const CostMatrix& m);

/// Bipartite graph with `left` and `right` vertex counts; adjacency[u] lists right vertices.
struct BipartiteGraph {
    std::size_t left = 0;
    std::size_t right = 0;
    std::vector<std::vector<std::size_t>> adjacency;
};

struct Matching {
    std::size_t size = 0;
    std::vector<std::size_t> left_to_right;  ///< npos when unmatched
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Maximum cardinality matching by Hopcroft-Karp, O(E sqrt(V)).
Matching max_bipartite_matching(const BipartiteGraph& g);

}  // namespace hkdelay::assignment
