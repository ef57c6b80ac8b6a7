#include "gramcent/netgraph.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gramcent/rng.hpp"

namespace gramcent {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Dense eigensolves stay tractable well past this size, but the fallback
// keeps very large instances from going O(n^3) with a big constant.
constexpr int kDenseEigenLimit = 2000;

using Pattern = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

Pattern pattern_of(const Eigen::MatrixXd& adj) {
    const int n = static_cast<int>(adj.rows());
    Pattern pat = Pattern::Zero(n, n);
    for (int src = 0; src < n; ++src) {
        for (int dst = 0; dst < n; ++dst) {
            if (adj(dst, src) != 0.0) pat(dst, src) = 1;
        }
    }
    return pat;
}

// Iterative Tarjan on the sparsity pattern; pat(d, s) nonzero means s -> d.
// Raw ids come out in discovery-dependent order and are remapped afterwards
// so the component holding the smallest node index gets id 0.
std::vector<int> scc_ids_pattern(const Pattern& pat) {
    const int n = static_cast<int>(pat.rows());
    std::vector<int> index(n, -1), lowlink(n, 0), comp(n, -1);
    std::vector<std::uint8_t> on_stack(n, 0);
    std::vector<int> stack;
    int next_index = 0;
    int next_comp = 0;

    struct Frame {
        int node;
        int next_succ;
    };
    std::vector<Frame> frames;

    for (int start = 0; start < n; ++start) {
        if (index[start] != -1) continue;
        frames.push_back({start, 0});
        while (!frames.empty()) {
            Frame& f = frames.back();
            const int v = f.node;
            if (f.next_succ == 0) {
                index[v] = lowlink[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (f.next_succ < n) {
                const int w = f.next_succ++;
                if (!pat(w, v)) continue;
                if (index[w] == -1) {
                    frames.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
            }
            if (descended) continue;
            if (lowlink[v] == index[v]) {
                for (;;) {
                    const int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = next_comp;
                    if (w == v) break;
                }
                ++next_comp;
            }
            frames.pop_back();
            if (!frames.empty()) {
                Frame& parent = frames.back();
                lowlink[parent.node] = std::min(lowlink[parent.node], lowlink[v]);
            }
        }
    }

    // Remap so ids follow the smallest member index of each component.
    std::vector<int> smallest(next_comp, n);
    for (int v = 0; v < n; ++v) smallest[comp[v]] = std::min(smallest[comp[v]], v);
    std::vector<int> order(next_comp);
    for (int c = 0; c < next_comp; ++c) order[c] = c;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return smallest[a] < smallest[b]; });
    std::vector<int> remap(next_comp);
    for (int rank = 0; rank < next_comp; ++rank) remap[order[rank]] = rank;
    for (int v = 0; v < n; ++v) comp[v] = remap[comp[v]];
    return comp;
}

bool has_directed_cycle(const Eigen::MatrixXd& adj) {
    const int n = static_cast<int>(adj.rows());
    for (int i = 0; i < n; ++i) {
        if (adj(i, i) != 0.0) return true;
    }
    const std::vector<int> comp = scc_ids_pattern(pattern_of(adj));
    std::vector<int> sizes(n, 0);
    for (int c : comp) {
        if (++sizes[c] > 1) return true;
    }
    return false;
}

double nonzero_normal(Rng& rng) {
    double w = rng.normal();
    while (w == 0.0) w = rng.normal();
    return w;
}

// Edges (as (src, dst) pairs) that link the condensation components into one
// cycle, ordered by smallest member index. Pairs that already have an edge in
// the needed direction are skipped and consume no draws. Mutates the pattern
// so later checks (and the final verification) see the added links.
std::vector<std::pair<int, int>> plan_connectivity_links(Pattern& pat, Rng& rng) {
    const int n = static_cast<int>(pat.rows());
    const std::vector<int> comp = scc_ids_pattern(pat);
    const int k = 1 + *std::max_element(comp.begin(), comp.end());
    if (k == 1) return {};

    std::vector<std::vector<int>> members(k);
    for (int v = 0; v < n; ++v) members[comp[v]].push_back(v);

    std::vector<std::pair<int, int>> links;
    for (int c = 0; c < k; ++c) {
        const std::vector<int>& from = members[c];
        const std::vector<int>& to = members[(c + 1) % k];
        bool connected = false;
        for (int s : from) {
            for (int d : to) {
                if (pat(d, s)) {
                    connected = true;
                    break;
                }
            }
            if (connected) break;
        }
        if (connected) continue;
        const int s = from[rng.uniform_index(from.size())];
        const int d = to[rng.uniform_index(to.size())];
        pat(d, s) = 1;
        links.emplace_back(s, d);
    }
    return links;
}

// Growth core shared by the public multigraph accessor and the full
// generator, so both consume the stream identically.
std::vector<std::pair<int, int>> grow_multigraph(const GeneratorParams& p, Rng& rng) {
    const int n = p.n;
    const int n0 = std::min(n, 3);

    std::vector<std::pair<int, int>> edges;
    std::vector<double> din(n, 0.0), dout(n, 0.0);
    auto add_edge = [&](int src, int dst) {
        edges.emplace_back(src, dst);
        dout[src] += 1.0;
        din[dst] += 1.0;
    };

    // Seed graph: a directed cycle on min(n, 3) nodes (a self-loop for n=1)
    // so both attachment weights start positive.
    if (n0 == 1) {
        add_edge(0, 0);
    } else {
        for (int v = 0; v < n0; ++v) add_edge(v, (v + 1) % n0);
    }

    int nodes = n0;
    // Attachment picks are linear scans over cumulative weights; degree plus
    // offset sums are maintained incrementally via the edge count.
    auto pick_by_in = [&](int count) {
        const double total = static_cast<double>(edges.size()) + p.sf_delta_in * count;
        double x = rng.uniform() * total;
        for (int i = 0; i < count; ++i) {
            x -= din[i] + p.sf_delta_in;
            if (x < 0.0) return i;
        }
        return count - 1;
    };
    auto pick_by_out = [&](int count) {
        const double total = static_cast<double>(edges.size()) + p.sf_delta_out * count;
        double x = rng.uniform() * total;
        for (int i = 0; i < count; ++i) {
            x -= dout[i] + p.sf_delta_out;
            if (x < 0.0) return i;
        }
        return count - 1;
    };

    while (nodes < n) {
        const double u = rng.uniform();
        if (u < p.sf_alpha) {
            // New source with an edge toward an in-degree-weighted target.
            const int dst = pick_by_in(nodes);
            const int src = nodes++;
            add_edge(src, dst);
        } else if (u < p.sf_alpha + p.sf_beta) {
            // Internal edge, source by out-degree then target by in-degree.
            const int src = pick_by_out(nodes);
            const int dst = pick_by_in(nodes);
            add_edge(src, dst);
        } else {
            // New target receiving an edge from an out-degree-weighted source.
            const int src = pick_by_out(nodes);
            const int dst = nodes++;
            add_edge(src, dst);
        }
    }
    return edges;
}

}  // namespace

Network::Network(Eigen::MatrixXd adjacency) : adj_(std::move(adjacency)), radius_(kNan) {
    if (adj_.rows() == 0 || adj_.rows() != adj_.cols()) {
        throw ValidationError("adjacency matrix must be square and non-empty");
    }
}

Network::Network(Eigen::MatrixXd adjacency, double known_spectral_radius)
    : adj_(std::move(adjacency)), radius_(known_spectral_radius) {
    if (adj_.rows() == 0 || adj_.rows() != adj_.cols()) {
        throw ValidationError("adjacency matrix must be square and non-empty");
    }
}

double Network::spectral_radius() const {
    double r = radius_.load(std::memory_order_relaxed);
    if (std::isnan(r)) {
        r = spectral_radius_of(adj_);
        radius_.store(r, std::memory_order_relaxed);
    }
    return r;
}

Network network_from_matrix(const Eigen::MatrixXd& mat) {
    if (mat.rows() == 0 || mat.rows() != mat.cols()) {
        throw ValidationError("adjacency matrix must be square and non-empty, got " +
                              std::to_string(mat.rows()) + "x" + std::to_string(mat.cols()));
    }
    if (!mat.allFinite()) {
        for (int j = 0; j < mat.rows(); ++j) {
            for (int i = 0; i < mat.cols(); ++i) {
                if (!std::isfinite(mat(j, i))) {
                    throw ValidationError("adjacency entry (" + std::to_string(j + 1) + "," +
                                          std::to_string(i + 1) + ") is not finite");
                }
            }
        }
    }
    return Network(mat);
}

double spectral_radius_of(const Eigen::MatrixXd& mat) {
    if (mat.rows() != mat.cols() || mat.rows() == 0) {
        throw ValidationError("spectral radius needs a non-empty square matrix");
    }
    const int n = static_cast<int>(mat.rows());
    if (n == 1) return std::abs(mat(0, 0));
    if (n <= kDenseEigenLimit) {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(mat, /*computeEigenvectors=*/false);
        if (solver.info() != Eigen::Success) {
            throw NumericError("eigenvalue computation failed");
        }
        return solver.eigenvalues().cwiseAbs().maxCoeff();
    }
    return spectral_radius_iterative(mat);
}

double spectral_radius_iterative(const Eigen::MatrixXd& mat, int block, int max_iter) {
    const int n = static_cast<int>(mat.rows());
    block = std::min(block, n);
    // Fixed-seed start keeps the estimate reproducible; a multi-vector block
    // tracks complex conjugate dominant pairs that a single vector cannot.
    Rng rng(0x5eed5eedULL);
    Eigen::MatrixXd q(n, block);
    for (int j = 0; j < block; ++j) {
        for (int i = 0; i < n; ++i) q(i, j) = rng.normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
    q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);

    double prev = -1.0;
    int settled = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::MatrixXd z = mat * q;
        const Eigen::MatrixXd h = q.transpose() * z;  // block x block projection
        Eigen::EigenSolver<Eigen::MatrixXd> small(h, /*computeEigenvectors=*/false);
        const double est = small.eigenvalues().cwiseAbs().maxCoeff();
        if (std::abs(est - prev) <= 1e-10 * std::max(est, 1e-300)) {
            if (++settled >= 3) return est;
        } else {
            settled = 0;
        }
        prev = est;
        Eigen::HouseholderQR<Eigen::MatrixXd> step(z);
        q = step.householderQ() * Eigen::MatrixXd::Identity(n, block);
    }
    throw ConvergenceError("spectral radius iteration did not settle", max_iter);
}

Network rescale_to_radius(const Network& net, double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw ValidationError("target spectral radius must be positive and finite");
    }
    const Eigen::MatrixXd& adj = net.adjacency();
    const double max_abs = adj.cwiseAbs().maxCoeff();
    if (max_abs == 0.0) {
        throw ValidationError("cannot rescale an all-zero network (spectral radius 0)");
    }
    if (!has_directed_cycle(adj)) {
        throw ValidationError("cannot rescale a network without directed cycles (spectral radius 0)");
    }
    const double r = net.spectral_radius();
    if (r <= 1e-12 * max_abs) {
        throw NumericError("spectral radius too close to zero to rescale reliably");
    }
    // Scaling the matrix scales every eigenvalue, so the result's radius is
    // rho up to the accuracy of r itself.
    return Network(adj * (rho / r), rho);
}

GeneratorParams GeneratorParams::erdos_renyi_params(int n, double edge_prob, double target_rho,
                                                    std::uint64_t seed) {
    GeneratorParams p;
    p.kind = Kind::erdos_renyi;
    p.n = n;
    p.edge_prob = edge_prob;
    p.target_rho = target_rho;
    p.seed = seed;
    return p;
}

GeneratorParams GeneratorParams::scale_free_params(int n, double target_rho, std::uint64_t seed) {
    GeneratorParams p;
    p.kind = Kind::directed_scale_free;
    p.n = n;
    p.target_rho = target_rho;
    p.seed = seed;
    return p;
}

void GeneratorParams::validate() const {
    if (n < 1) throw ValidationError("generator needs at least one node");
    if (!(target_rho > 0.0) || !std::isfinite(target_rho)) {
        throw ValidationError("target spectral radius must be positive and finite");
    }
    if (kind == Kind::erdos_renyi) {
        if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
            throw ValidationError("edge probability must lie in [0, 1]");
        }
        return;
    }
    if (sf_alpha < 0.0 || sf_beta < 0.0 || sf_gamma < 0.0) {
        throw ValidationError("growth event probabilities must be nonnegative");
    }
    if (std::abs(sf_alpha + sf_beta + sf_gamma - 1.0) > 1e-12) {
        throw ValidationError("growth event probabilities must sum to 1");
    }
    if (sf_delta_in < 0.0 || sf_delta_out < 0.0) {
        throw ValidationError("attachment offsets must be nonnegative");
    }
    if (n > 3 && sf_alpha + sf_gamma <= 0.0) {
        throw ValidationError("growth cannot add nodes when alpha + gamma = 0");
    }
}

double GeneratorParams::indegree_exponent() const {
    return 1.0 + (1.0 + sf_delta_in * (sf_alpha + sf_gamma)) / (sf_alpha + sf_beta);
}

double GeneratorParams::outdegree_exponent() const {
    return 1.0 + (1.0 + sf_delta_out * (sf_alpha + sf_gamma)) / (sf_gamma + sf_beta);
}

GeneratedNetwork generate_erdos_renyi(const GeneratorParams& params) {
    params.validate();
    if (params.kind != GeneratorParams::Kind::erdos_renyi) {
        throw ValidationError("params are not for the Erdos-Renyi generator");
    }
    const int n = params.n;
    Rng rng(params.seed);
    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
    // One pass in (src, dst) order; a present edge draws its weight
    // immediately so the stream layout is independent of the realization.
    for (int src = 0; src < n; ++src) {
        for (int dst = 0; dst < n; ++dst) {
            if (src == dst) continue;
            if (rng.bernoulli(params.edge_prob)) {
                adj(dst, src) = nonzero_normal(rng);
            }
        }
    }
    if (!has_directed_cycle(adj)) {
        return {Network(adj), false};
    }
    return {rescale_to_radius(Network(std::move(adj)), params.target_rho), true};
}

std::vector<std::pair<int, int>> scale_free_multigraph(const GeneratorParams& params) {
    params.validate();
    if (params.kind != GeneratorParams::Kind::directed_scale_free) {
        throw ValidationError("params are not for the scale-free generator");
    }
    Rng rng(params.seed);
    return grow_multigraph(params, rng);
}

GeneratedNetwork generate_directed_scale_free(const GeneratorParams& params) {
    params.validate();
    if (params.kind != GeneratorParams::Kind::directed_scale_free) {
        throw ValidationError("params are not for the scale-free generator");
    }
    const int n = params.n;
    Rng rng(params.seed);

    // Pipeline: grow, collapse multi-edges, repair connectivity, add
    // self-loops, assign weights in (src, dst) order, rescale last.
    const auto edges = grow_multigraph(params, rng);
    Pattern pat = Pattern::Zero(n, n);
    for (const auto& [src, dst] : edges) pat(dst, src) = 1;

    plan_connectivity_links(pat, rng);
    for (int i = 0; i < n; ++i) pat(i, i) = 1;

    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
    for (int src = 0; src < n; ++src) {
        for (int dst = 0; dst < n; ++dst) {
            if (pat(dst, src)) adj(dst, src) = nonzero_normal(rng);
        }
    }

    const std::vector<int> comp = scc_ids_pattern(pat);
    if (*std::max_element(comp.begin(), comp.end()) != 0) {
        throw NumericError("internal: connectivity repair left multiple components");
    }
    return {rescale_to_radius(Network(std::move(adj)), params.target_rho), true};
}

GeneratedNetwork generate_network(const GeneratorParams& params) {
    return params.kind == GeneratorParams::Kind::erdos_renyi ? generate_erdos_renyi(params)
                                                             : generate_directed_scale_free(params);
}

Network ensure_strongly_connected(const Network& net, std::uint64_t seed) {
    Eigen::MatrixXd adj = net.adjacency();
    Pattern pat = pattern_of(adj);
    Rng rng(seed);

    const auto links = plan_connectivity_links(pat, rng);
    for (const auto& [src, dst] : links) adj(dst, src) = nonzero_normal(rng);
    for (int i = 0; i < net.size(); ++i) {
        if (adj(i, i) == 0.0) adj(i, i) = nonzero_normal(rng);
    }

    for (int i = 0; i < net.size(); ++i) pat(i, i) = 1;
    const std::vector<int> comp = scc_ids_pattern(pat);
    if (*std::max_element(comp.begin(), comp.end()) != 0) {
        throw NumericError("internal: connectivity repair left multiple components");
    }
    return Network(std::move(adj));
}

std::vector<int> scc_ids(const Network& net) {
    return scc_ids_pattern(pattern_of(net.adjacency()));
}

int scc_count(const Network& net) {
    const std::vector<int> comp = scc_ids(net);
    return 1 + *std::max_element(comp.begin(), comp.end());
}

RootsAndLeaves roots_and_leaves(const Network& net) {
    const Eigen::MatrixXd& adj = net.adjacency();
    const int n = net.size();
    RootsAndLeaves result;
    for (int j = 0; j < n; ++j) {
        if (adj.row(j).cwiseAbs().maxCoeff() == 0.0) result.roots.push_back(j);
    }
    for (int i = 0; i < n; ++i) {
        if (adj.col(i).cwiseAbs().maxCoeff() == 0.0) result.leaves.push_back(i);
    }
    return result;
}

}  // namespace gramcent
