#include "contour/pixel_match.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace contour {

Tolerance Tolerance::from_diagonal(int width, int height, double fraction) {
    if (width <= 0 || height <= 0 || !(fraction > 0.0)) {
        throw std::invalid_argument("tolerance needs positive dimensions and fraction");
    }
    return {fraction * std::hypot(static_cast<double>(width), static_cast<double>(height))};
}

namespace {

struct CandidateEdge {
    int pred = 0;
    int gt = 0;
    double cost = 0.0;
};

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

std::vector<CandidateEdge> candidate_edges(const std::vector<Pixel>& pred, const std::vector<Pixel>& gt,
                                           double d_max) {
    const int cell = std::max(1, static_cast<int>(std::ceil(d_max)));
    auto key = [](int cx, int cy) {
        return (static_cast<std::int64_t>(cx) << 32) ^ static_cast<std::uint32_t>(cy);
    };
    auto cell_of = [cell](int v) { return v >= 0 ? v / cell : -((-v + cell - 1) / cell); };

    std::unordered_map<std::int64_t, std::vector<int>> buckets;
    for (int j = 0; j < static_cast<int>(gt.size()); ++j) {
        buckets[key(cell_of(gt[j].x), cell_of(gt[j].y))].push_back(j);
    }

    const double d2_max = d_max * d_max;
    std::vector<CandidateEdge> edges;
    for (int i = 0; i < static_cast<int>(pred.size()); ++i) {
        const int cx = cell_of(pred[i].x);
        const int cy = cell_of(pred[i].y);
        for (int oy = -1; oy <= 1; ++oy) {
            for (int ox = -1; ox <= 1; ++ox) {
                auto it = buckets.find(key(cx + ox, cy + oy));
                if (it == buckets.end()) {
                    continue;
                }
                for (int j : it->second) {
                    const double dx = pred[i].x - gt[j].x;
                    const double dy = pred[i].y - gt[j].y;
                    const double d2 = dx * dx + dy * dy;
                    if (d2 <= d2_max) {
                        edges.push_back({i, j, std::sqrt(d2)});
                    }
                }
            }
        }
    }
    return edges;
}

// Unit-capacity min-cost flow solved by primal-dual successive shortest
// paths: Dijkstra on reduced costs, then as many augmentations as fit on the
// zero-reduced-cost subgraph before the next Dijkstra.
class MinCostFlow {
public:
    explicit MinCostFlow(int nodes) : adj_(nodes), potential_(nodes, 0.0) {}

    int add_edge(int from, int to, double cost) {
        adj_[from].push_back(static_cast<int>(edges_.size()));
        edges_.push_back({to, 1, cost});
        adj_[to].push_back(static_cast<int>(edges_.size()));
        edges_.push_back({from, 0, -cost});
        return static_cast<int>(edges_.size()) - 2;
    }

    void push_unit(int edge) {
        edges_[edge].cap -= 1;
        edges_[edge ^ 1].cap += 1;
    }

    bool saturated(int edge) const { return edges_[edge].cap == 0; }

    void run(int source, int sink) {
        while (shortest_paths(source, sink)) {
            while (augment_admissible(source, sink)) {
            }
        }
    }

private:
    struct Edge {
        int to;
        int cap;
        double cost;
    };

    static constexpr double kAdmissibleEps = 1e-9;

    double reduced(int from, const Edge& e) const { return e.cost + potential_[from] - potential_[e.to]; }

    bool shortest_paths(int source, int sink) {
        const auto n = adj_.size();
        std::vector<double> dist(n, std::numeric_limits<double>::infinity());
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[source] = 0.0;
        heap.push({0.0, source});
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) {
                continue;
            }
            for (int id : adj_[u]) {
                const Edge& e = edges_[id];
                if (e.cap <= 0) {
                    continue;
                }
                const double nd = d + std::max(0.0, reduced(u, e));
                if (nd < dist[e.to]) {
                    dist[e.to] = nd;
                    heap.push({nd, e.to});
                }
            }
        }
        if (!std::isfinite(dist[sink])) {
            return false;
        }
        // Unreached nodes can never become reachable again, so their
        // potentials are irrelevant.
        for (std::size_t v = 0; v < n; ++v) {
            if (std::isfinite(dist[v])) {
                potential_[v] += dist[v];
            }
        }
        return true;
    }

    bool augment_admissible(int source, int sink) {
        std::vector<char> visited(adj_.size(), 0);
        std::vector<int> via(adj_.size(), -1);
        std::vector<std::pair<int, std::size_t>> stack{{source, 0}};
        visited[source] = 1;
        while (!stack.empty()) {
            auto& [u, next] = stack.back();
            if (u == sink) {
                break;
            }
            if (next == adj_[u].size()) {
                stack.pop_back();
                continue;
            }
            const int id = adj_[u][next++];
            const Edge& e = edges_[id];
            if (e.cap <= 0 || visited[e.to] || reduced(u, e) > kAdmissibleEps) {
                continue;
            }
            visited[e.to] = 1;
            via[e.to] = id;
            stack.push_back({e.to, 0});
        }
        if (stack.empty()) {
            return false;
        }
        for (int v = sink; v != source; v = edges_[via[v] ^ 1].to) {
            push_unit(via[v]);
        }
        return true;
    }

    std::vector<std::vector<int>> adj_;
    std::vector<Edge> edges_;
    std::vector<double> potential_;
};

}  // namespace

namespace {

void require_distinct(const std::vector<Pixel>& pixels, const char* what) {
    std::vector<Pixel> sorted = pixels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument(std::string(what) + " pixel list contains duplicates");
    }
}

}  // namespace

MatchResult match_pixel_sets(const std::vector<Pixel>& pred, const std::vector<Pixel>& gt, Tolerance tol) {
    if (!(tol.d_max > 0.0) || !std::isfinite(tol.d_max)) {
        throw std::invalid_argument("tolerance d_max must be positive and finite");
    }
    require_distinct(pred, "predicted");
    require_distinct(gt, "ground-truth");
    const auto edges = candidate_edges(pred, gt, tol.d_max);

    const std::size_t n_pred = pred.size();
    DisjointSets sets(n_pred + gt.size());
    for (const auto& e : edges) {
        sets.unite(static_cast<std::size_t>(e.pred), n_pred + static_cast<std::size_t>(e.gt));
    }
    std::unordered_map<std::size_t, std::vector<std::size_t>> component_edges;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        component_edges[sets.find(static_cast<std::size_t>(edges[k].pred))].push_back(k);
    }

    std::vector<int> pred_match(n_pred, -1);
    std::vector<double> pred_cost(n_pred, 0.0);
    std::vector<char> gt_taken(gt.size(), 0);

    std::unordered_map<int, int> local_pred;
    std::unordered_map<int, int> local_gt;
    for (const auto& [root, ids] : component_edges) {
        local_pred.clear();
        local_gt.clear();
        for (std::size_t k : ids) {
            local_pred.try_emplace(edges[k].pred, static_cast<int>(local_pred.size()));
            local_gt.try_emplace(edges[k].gt, static_cast<int>(local_gt.size()));
        }
        const int n_left = static_cast<int>(local_pred.size());
        const int n_right = static_cast<int>(local_gt.size());
        const int source = 0;
        const int sink = n_left + n_right + 1;
        MinCostFlow flow(n_left + n_right + 2);

        std::vector<int> source_edge(n_left);
        std::vector<int> sink_edge(n_right);
        for (int l = 0; l < n_left; ++l) {
            source_edge[l] = flow.add_edge(source, 1 + l, 0.0);
        }
        for (int r = 0; r < n_right; ++r) {
            sink_edge[r] = flow.add_edge(1 + n_left + r, sink, 0.0);
        }
        std::vector<int> pair_edge(ids.size());
        for (std::size_t q = 0; q < ids.size(); ++q) {
            const auto& e = edges[ids[q]];
            pair_edge[q] = flow.add_edge(1 + local_pred[e.pred], 1 + n_left + local_gt[e.gt], e.cost);
        }
        // Coincident pixels are a zero-cost partial matching; any matching
        // built only from zero-cost edges is already cost-optimal for its
        // size, so successive shortest paths may start from it.
        for (std::size_t q = 0; q < ids.size(); ++q) {
            const auto& e = edges[ids[q]];
            const int l = local_pred[e.pred];
            const int r = local_gt[e.gt];
            if (e.cost == 0.0 && !flow.saturated(source_edge[l]) && !flow.saturated(sink_edge[r])) {
                flow.push_unit(source_edge[l]);
                flow.push_unit(pair_edge[q]);
                flow.push_unit(sink_edge[r]);
            }
        }
        flow.run(source, sink);

        for (std::size_t q = 0; q < ids.size(); ++q) {
            if (flow.saturated(pair_edge[q])) {
                const auto& e = edges[ids[q]];
                pred_match[e.pred] = e.gt;
                pred_cost[e.pred] = e.cost;
                gt_taken[e.gt] = 1;
            }
        }
    }

    MatchResult result;
    for (std::size_t i = 0; i < n_pred; ++i) {
        if (pred_match[i] >= 0) {
            result.pairs.push_back({pred[i], gt[static_cast<std::size_t>(pred_match[i])], pred_cost[i]});
            result.total_cost += pred_cost[i];
        } else {
            result.unmatched_pred.push_back(pred[i]);
        }
    }
    for (std::size_t j = 0; j < gt.size(); ++j) {
        if (!gt_taken[j]) {
            result.unmatched_gt.push_back(gt[j]);
        }
    }
    return result;
}

MatchResult match_pixels(const BinaryMap& pred, const BinaryMap& gt, Tolerance tol) {
    require_same_shape(pred, gt, "match_pixels");
    return match_pixel_sets(pred.pixels(), gt.pixels(), tol);
}

PrecisionRecall precision_recall(std::size_t n_matched, std::size_t n_pred, std::size_t n_gt) {
    if (n_matched > n_pred || n_matched > n_gt) {
        throw std::invalid_argument("matched count exceeds prediction or ground-truth count");
    }
    PrecisionRecall pr;
    pr.precision = n_pred == 0 ? 1.0 : static_cast<double>(n_matched) / static_cast<double>(n_pred);
    pr.recall = n_gt == 0 ? 1.0 : static_cast<double>(n_matched) / static_cast<double>(n_gt);
    return pr;
}

PrecisionRecall pr_from_match(const MatchResult& r, std::size_t n_pred, std::size_t n_gt) {
    return precision_recall(r.pairs.size(), n_pred, n_gt);
}

double f1_score(double precision, double recall) {
    const double sum = precision + recall;
    return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

}  // namespace contour
