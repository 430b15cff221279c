#pragma once

// Dense exact maximum/minimum weight perfect matching (Edmonds' blossom
// algorithm, O(V^3)). Works on a complete weight matrix; absent edges are
// modelled with an infinite weight in the minimisation wrapper.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

namespace radqec {

namespace detail {

// Primal-dual blossom solver for MAXIMUM weight matching, 1-indexed inside.
// Vertices 1..n, blossom pseudo-nodes n+1..2n. Weights must be positive;
// a weight of zero marks "no edge". Deterministic: all scans run in index
// order and ties keep the first candidate.
class BlossomSolver {
public:
    explicit BlossomSolver(int n) : n_(n), n_x_(n) {
        if (n < 1) throw std::invalid_argument("BlossomSolver: need at least one vertex");
        int cap = 2 * n + 1;
        g_.assign(static_cast<size_t>(cap), std::vector<E>(static_cast<size_t>(cap)));
        for (int u = 1; u <= n; ++u)
            for (int v = 1; v <= n; ++v) g_[u][v] = E{u, v, 0.0};
        lab_.assign(static_cast<size_t>(cap), 0.0);
        match_.assign(static_cast<size_t>(cap), 0);
        slack_.assign(static_cast<size_t>(cap), 0);
        st_.assign(static_cast<size_t>(cap), 0);
        pa_.assign(static_cast<size_t>(cap), 0);
        s_.assign(static_cast<size_t>(cap), -1);
        vis_.assign(static_cast<size_t>(cap), 0);
        flower_.assign(static_cast<size_t>(cap), {});
        flower_from_.assign(static_cast<size_t>(cap), std::vector<int>(static_cast<size_t>(cap), 0));
    }

    void add_edge(int u, int v, double w) {
        if (u < 1 || u > n_ || v < 1 || v > n_ || u == v)
            throw std::invalid_argument("BlossomSolver: bad edge endpoints");
        if (w <= 0.0) throw std::invalid_argument("BlossomSolver: weights must be positive");
        g_[u][v].w = g_[v][u].w = w;
    }

    // Runs the solver; afterwards mate(u) gives the partner of u (0 if
    // unmatched, only possible when no positive-weight cover exists).
    void solve() {
        for (int u = 1; u <= n_; ++u) {
            st_[u] = u;
            flower_from_[u][u] = u;
        }
        n_x_ = n_;
        double w_max = 0.0;
        for (int u = 1; u <= n_; ++u)
            for (int v = 1; v <= n_; ++v) w_max = std::max(w_max, g_[u][v].w);
        for (int u = 1; u <= n_; ++u) lab_[u] = w_max;
        while (matching()) {}
    }

    int mate(int u) const { return match_[static_cast<size_t>(u)]; }

    double matched_weight() const {
        double total = 0.0;
        for (int u = 1; u <= n_; ++u)
            if (match_[u] > u) total += g_[u][match_[u]].w;
        return total;
    }

private:
    struct E {
        int u = 0, v = 0;
        double w = 0.0;
    };

    static constexpr double kEps = 1e-9;

    double e_delta(const E& e) const { return lab_[e.u] + lab_[e.v] - g_[e.u][e.v].w * 2.0; }

    void update_slack(int u, int x) {
        if (!slack_[x] || e_delta(g_[u][x]) < e_delta(g_[slack_[x]][x])) slack_[x] = u;
    }

    void set_slack(int x) {
        slack_[x] = 0;
        for (int u = 1; u <= n_; ++u)
            if (g_[u][x].w > 0.0 && st_[u] != x && s_[st_[u]] == 0) update_slack(u, x);
    }

    void q_push(int x) {
        if (x <= n_) {
            q_.push_back(x);
        } else {
            for (int y : flower_[x]) q_push(y);
        }
    }

    void set_st(int x, int b) {
        st_[x] = b;
        if (x > n_)
            for (int y : flower_[x]) set_st(y, b);
    }

    // Rotates xr to an even position inside blossom b; returns its index.
    int get_pr(int b, int xr) {
        int pr = static_cast<int>(std::find(flower_[b].begin(), flower_[b].end(), xr) -
                                  flower_[b].begin());
        if (pr % 2 == 1) {
            std::reverse(flower_[b].begin() + 1, flower_[b].end());
            return static_cast<int>(flower_[b].size()) - pr;
        }
        return pr;
    }

    // Commits the concrete edge e (e.u lies inside u) rather than re-reading
    // g_[.][v] at each nesting level: the aggregated rows of two blossoms may
    // quote different tight edges at different levels, and mixing them leaves
    // asymmetric mates.
    void set_match(int u, const E& e) {
        match_[u] = e.v;
        if (u <= n_) return;
        int xr = flower_from_[u][e.u];
        int pr = get_pr(u, xr);
        for (int i = 0; i < pr; ++i) {
            int a = flower_[u][i], b = flower_[u][i ^ 1];
            set_match(a, g_[a][b]);
        }
        set_match(xr, e);
        std::rotate(flower_[u].begin(), flower_[u].begin() + pr, flower_[u].end());
    }

    void augment(int u, int v) {
        while (true) {
            int xnv = st_[match_[u]];
            set_match(u, g_[u][v]);
            if (!xnv) return;
            set_match(xnv, g_[xnv][st_[pa_[xnv]]]);
            u = st_[pa_[xnv]];
            v = xnv;
        }
    }

    int get_lca(int u, int v) {
        ++vis_t_;
        while (u || v) {
            if (u) {
                if (vis_[u] == vis_t_) return u;
                vis_[u] = vis_t_;
                u = st_[match_[u]];
                if (u) u = st_[pa_[u]];
            }
            std::swap(u, v);
        }
        return 0;
    }

    void add_blossom(int u, int lca, int v) {
        int b = n_ + 1;
        while (b <= n_x_ && st_[b]) ++b;
        if (b > n_x_) ++n_x_;
        lab_[b] = 0.0;
        s_[b] = 0;
        match_[b] = match_[lca];
        flower_[b].clear();
        flower_[b].push_back(lca);
        for (int x = u, y; x != lca; x = st_[pa_[y]]) {
            flower_[b].push_back(x);
            flower_[b].push_back(y = st_[match_[x]]);
            q_push(y);
        }
        std::reverse(flower_[b].begin() + 1, flower_[b].end());
        for (int x = v, y; x != lca; x = st_[pa_[y]]) {
            flower_[b].push_back(x);
            flower_[b].push_back(y = st_[match_[x]]);
            q_push(y);
        }
        set_st(b, b);
        for (int x = 1; x <= n_x_; ++x) g_[b][x].w = g_[x][b].w = 0.0;
        for (int x = 1; x <= n_; ++x) flower_from_[b][x] = 0;
        for (int xs : flower_[b]) {
            for (int x = 1; x <= n_x_; ++x)
                if (g_[b][x].w == 0.0 || e_delta(g_[xs][x]) < e_delta(g_[b][x])) {
                    g_[b][x] = g_[xs][x];
                    g_[x][b] = g_[x][xs];
                }
            for (int x = 1; x <= n_; ++x)
                if (flower_from_[xs][x]) flower_from_[b][x] = xs;
        }
        set_slack(b);
    }

    void expand_blossom(int b) {
        for (int x : flower_[b]) set_st(x, x);
        int xr = flower_from_[b][g_[b][pa_[b]].u];
        int pr = get_pr(b, xr);
        for (int i = 0; i < pr; i += 2) {
            int xs = flower_[b][i];
            int xns = flower_[b][i + 1];
            pa_[xs] = g_[xns][xs].u;
            s_[xs] = 1;
            s_[xns] = 0;
            slack_[xs] = 0;
            set_slack(xns);
            q_push(xns);
        }
        s_[xr] = 1;
        pa_[xr] = pa_[b];
        for (size_t i = static_cast<size_t>(pr) + 1; i < flower_[b].size(); ++i) {
            int xs = flower_[b][i];
            s_[xs] = -1;
            set_slack(xs);
        }
        st_[b] = 0;
    }

    bool on_found_edge(const E& e) {
        int u = st_[e.u];
        int v = st_[e.v];
        if (s_[v] == -1) {
            pa_[v] = e.u;
            s_[v] = 1;
            int nu = st_[match_[v]];
            slack_[v] = slack_[nu] = 0;
            s_[nu] = 0;
            q_push(nu);
        } else if (s_[v] == 0) {
            int lca = get_lca(u, v);
            if (!lca) {
                augment(u, v);
                augment(v, u);
                return true;
            }
            add_blossom(u, lca, v);
        }
        return false;
    }

    bool matching() {
        std::fill(s_.begin() + 1, s_.begin() + n_x_ + 1, -1);
        std::fill(slack_.begin() + 1, slack_.begin() + n_x_ + 1, 0);
        q_.clear();
        for (int x = 1; x <= n_x_; ++x)
            if (st_[x] == x && !match_[x]) {
                pa_[x] = 0;
                s_[x] = 0;
                q_push(x);
            }
        if (q_.empty()) return false;
        // Each dual adjustment strictly shrinks some slack; n^2 rounds is a
        // generous bound whose breach means the arithmetic went inconsistent.
        long max_rounds = static_cast<long>(n_) * n_ + 16;
        for (long round = 0; round < max_rounds; ++round) {
            while (!q_.empty()) {
                int u = q_.front();
                q_.pop_front();
                if (s_[st_[u]] != 0) continue;
                for (int v = 1; v <= n_; ++v)
                    if (g_[u][v].w > 0.0 && st_[u] != st_[v]) {
                        if (e_delta(g_[u][v]) <= kEps) {
                            if (on_found_edge(g_[u][v])) return true;
                        } else {
                            update_slack(u, st_[v]);
                        }
                    }
            }
            double d = std::numeric_limits<double>::infinity();
            for (int b = n_ + 1; b <= n_x_; ++b)
                if (st_[b] == b && s_[b] == 1) d = std::min(d, lab_[b] / 2.0);
            for (int x = 1; x <= n_x_; ++x)
                if (st_[x] == x && slack_[x]) {
                    if (s_[x] == -1)
                        d = std::min(d, e_delta(g_[slack_[x]][x]));
                    else if (s_[x] == 0)
                        d = std::min(d, e_delta(g_[slack_[x]][x]) / 2.0);
                }
            for (int u = 1; u <= n_; ++u)
                if (s_[st_[u]] == 0) d = std::min(d, lab_[u]);
            if (!std::isfinite(d)) return false;  // exposed vertices are unreachable
            for (int u = 1; u <= n_; ++u) {
                if (s_[st_[u]] == 0)
                    lab_[u] -= d;
                else if (s_[st_[u]] == 1)
                    lab_[u] += d;
            }
            for (int b = n_ + 1; b <= n_x_; ++b)
                if (st_[b] == b) {
                    if (s_[b] == 0)
                        lab_[b] += d * 2.0;
                    else if (s_[b] == 1)
                        lab_[b] -= d * 2.0;
                }
            bool vertex_exhausted = false;
            for (int u = 1; u <= n_; ++u)
                if (s_[st_[u]] == 0 && lab_[u] <= kEps) vertex_exhausted = true;
            for (int x = 1; x <= n_x_; ++x)
                if (st_[x] == x && slack_[x] && st_[slack_[x]] != x &&
                    e_delta(g_[slack_[x]][x]) <= kEps) {
                    if (on_found_edge(g_[slack_[x]][x])) return true;
                }
            for (int b = n_ + 1; b <= n_x_; ++b)
                if (st_[b] == b && s_[b] == 1 && lab_[b] <= kEps) expand_blossom(b);
            // A zero dual on an exposed-tree vertex means no augmenting path
            // can improve the matching through it; stop the phase.
            if (vertex_exhausted) return false;
        }
        throw std::logic_error("BlossomSolver: dual adjustment failed to converge");
    }

    int n_, n_x_;
    std::vector<std::vector<E>> g_;
    std::vector<double> lab_;
    std::vector<int> match_, slack_, st_, pa_, s_, vis_;
    std::vector<std::vector<int>> flower_;
    std::vector<std::vector<int>> flower_from_;
    std::deque<int> q_;
    int vis_t_ = 0;
};

}  // namespace detail

// Minimum-weight perfect matching over a symmetric weight matrix. Entries
// that are infinite (or NaN) mark forbidden pairs. Returns mate[i] for every
// vertex; throws if no perfect matching over allowed pairs exists.
inline std::vector<int32_t> min_weight_perfect_matching(
    const std::vector<std::vector<double>>& w) {
    size_t n = w.size();
    if (n == 0) return {};
    if (n % 2 != 0)
        throw std::invalid_argument("min_weight_perfect_matching: odd vertex count");
    for (const auto& row : w)
        if (row.size() != n)
            throw std::invalid_argument("min_weight_perfect_matching: ragged matrix");

    double w_max = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            double v = w[i][j];
            if (!std::isfinite(v)) continue;
            if (v < 0.0)
                throw std::invalid_argument("min_weight_perfect_matching: negative weight");
            w_max = std::max(w_max, v);
        }
    // Shift to a positive maximisation problem; a perfect matching maximises
    // the shifted total exactly when it minimises the original one.
    double shift = w_max + 1.0;
    detail::BlossomSolver solver(static_cast<int>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            double v = w[i][j];
            if (!std::isfinite(v)) continue;
            solver.add_edge(static_cast<int>(i) + 1, static_cast<int>(j) + 1, shift - v);
        }
    solver.solve();

    std::vector<int32_t> mate(n, -1);
    for (size_t i = 0; i < n; ++i) {
        int m = solver.mate(static_cast<int>(i) + 1);
        if (m == 0)
            throw std::runtime_error("min_weight_perfect_matching: no perfect matching exists");
        mate[i] = static_cast<int32_t>(m - 1);
    }
    for (size_t i = 0; i < n; ++i)
        if (mate[static_cast<size_t>(mate[i])] != static_cast<int32_t>(i))
            throw std::logic_error("min_weight_perfect_matching: inconsistent mates");
    return mate;
}

}  // namespace radqec
