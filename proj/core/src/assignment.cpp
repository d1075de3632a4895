#include "hkdelay/assignment.hpp"

#include <limits>
#include <queue>

#include "hkdelay/types.hpp"

namespace hkdelay::assignment {

AssignmentSolution solve_assignment(const CostMatrix& m) {
    const std::size_t n = m.n;
    if (m.cost.size() != n * n) {
        throw InvalidArgument("min_cost_assignment: cost matrix is not square");
    }
    AssignmentSolution out;
    if (n == 0) {
        return out;
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is the virtual start column.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
    std::vector<double> min_slack(n + 1);
    std::vector<char> used(n + 1);

    for (std::size_t row = 1; row <= n; ++row) {
        owner[0] = row;
        std::size_t col0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col0] = 1;
            const std::size_t r0 = owner[col0];
            double delta = inf;
            std::size_t col1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = m(r0 - 1, j - 1) - u[r0] - v[j];
                if (cur < min_slack[j]) {
                    min_slack[j] = cur;
                    way[j] = col0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    col1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            col0 = col1;
        } while (owner[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            owner[col0] = owner[col1];
            col0 = col1;
        } while (col0 != 0);
    }

    out.row_to_col.resize(n);
    for (std::size_t j = 1; j <= n; ++j) {
        out.row_to_col[owner[j] - 1] = j - 1;
    }
    out.row_potential.assign(u.begin() + 1, u.end());
    out.col_potential.assign(v.begin() + 1, v.end());
    return out;
}

std::vector<std::size_t> min_cost_assignment(const CostMatrix& m) {
    return solve_assignment(m).row_to_col;
}

Matching max_bipartite_matching(const BipartiteGraph& g) {
    constexpr std::size_t npos = Matching::npos;
    constexpr std::size_t unreached = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> match_left(g.left, npos), match_right(g.right, npos);
    std::vector<std::size_t> dist(g.left);

    const auto bfs = [&]() {
        std::queue<std::size_t> q;
        bool found_free = false;
        for (std::size_t u = 0; u < g.left; ++u) {
            if (match_left[u] == npos) {
                dist[u] = 0;
                q.push(u);
            } else {
                dist[u] = unreached;
            }
        }
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (std::size_t w : g.adjacency[u]) {
                const std::size_t next = match_right[w];
                if (next == npos) {
                    found_free = true;
                } else if (dist[next] == unreached) {
                    dist[next] = dist[u] + 1;
                    q.push(next);
                }
            }
        }
        return found_free;
    };

    // Iterative DFS along the BFS layering.
    std::vector<std::size_t> edge_cursor(g.left);
    const auto dfs = [&](std::size_t root) {
        std::vector<std::size_t> stack{root};
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            bool advanced = false;
            while (edge_cursor[u] < g.adjacency[u].size()) {
                const std::size_t w = g.adjacency[u][edge_cursor[u]];
                const std::size_t next = match_right[w];
                if (next == npos) {
                    // Augment along the stack.
                    for (std::size_t k = stack.size(); k-- > 0;) {
                        const std::size_t a = stack[k];
                        const std::size_t b = g.adjacency[a][edge_cursor[a]];
                        match_left[a] = b;
                        match_right[b] = a;
                    }
                    return true;
                }
                if (dist[next] == dist[u] + 1) {
                    stack.push_back(next);
                    advanced = true;
                    break;
                }
                ++edge_cursor[u];
            }
            if (!advanced) {
                dist[u] = unreached;
                stack.pop_back();
                if (!stack.empty()) {
                    ++edge_cursor[stack.back()];
                }
            }
        }
        return false;
    };

    Matching result;
    while (bfs()) {
        std::fill(edge_cursor.begin(), edge_cursor.end(), 0);
        for (std::size_t u = 0; u < g.left; ++u) {
            if (match_left[u] == npos && dfs(u)) {
                ++result.size;
            }
        }
    }
    result.left_to_right = std::move(match_left);
    return result;
}

}  // namespace hkdelay::assignment
