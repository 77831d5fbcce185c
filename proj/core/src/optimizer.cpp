#include "gridseg/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>

namespace gridseg {

namespace {

constexpr double kMinImprovement = 1e-10;
constexpr int kMaxSweeps = 200;
constexpr int kMaxTuneRounds = 20;

using Rng = std::mt19937_64;

/// One level of the search. Units are leaves or aggregates of leaves; arcs
/// between distinct units only. `exit_extra` is flow that leaves the whole
/// (sub)network from this unit and always counts as module exit.
struct Level {
    std::vector<double> flow;
    std::vector<double> exit_extra;
    std::vector<std::vector<std::pair<std::size_t, double>>> out;
    std::vector<std::vector<std::pair<std::size_t, double>>> in;
    std::vector<double> out_total;

    std::size_t size() const { return flow.size(); }
};

void finish(Level& level) {
    const auto n = level.size();
    level.in.assign(n, {});
    level.out_total.assign(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        std::sort(level.out[u].begin(), level.out[u].end());
        double total = level.exit_extra[u];
        for (const auto& [v, f] : level.out[u]) {
            level.in[v].emplace_back(u, f);
            total += f;
        }
        level.out_total[u] = total;
    }
}

Level leaf_level(const FlowNetwork& flows) {
    Level level;
    const auto n = flows.node_count();
    level.flow = flows.node_flow;
    level.exit_extra.assign(n, 0.0);
    level.out.assign(n, {});
    for (const auto& arc : flows.arcs) {
        if (arc.source != arc.target) {
            level.out[arc.source].emplace_back(arc.target, arc.flow);
        }
    }
    finish(level);
    return level;
}

/// Collapses units into `groups` super-units; arcs inside a group vanish.
Level aggregate(const Level& level, const std::vector<std::size_t>& group, std::size_t groups) {
    Level next;
    next.flow.assign(groups, 0.0);
    next.exit_extra.assign(groups, 0.0);
    next.out.assign(groups, {});
    std::vector<std::map<std::size_t, double>> merged(groups);
    for (std::size_t u = 0; u < level.size(); ++u) {
        const auto gu = group[u];
        next.flow[gu] += level.flow[u];
        next.exit_extra[gu] += level.exit_extra[u];
        for (const auto& [v, f] : level.out[u]) {
            const auto gv = group[v];
            if (gu != gv) {
                merged[gu][gv] += f;
            }
        }
    }
    for (std::size_t g = 0; g < groups; ++g) {
        next.out[g].assign(merged[g].begin(), merged[g].end());
    }
    finish(next);
    return next;
}

/// Sub-network on `members` (indices into `level`); flow to non-members
/// becomes exit_extra.
Level induced(const Level& level, const std::vector<std::size_t>& members) {
    constexpr auto absent = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> local(level.size(), absent);
    for (std::size_t k = 0; k < members.size(); ++k) {
        local[members[k]] = k;
    }
    Level sub;
    sub.flow.reserve(members.size());
    sub.exit_extra.reserve(members.size());
    sub.out.assign(members.size(), {});
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto u = members[k];
        sub.flow.push_back(level.flow[u]);
        double extra = level.exit_extra[u];
        for (const auto& [v, f] : level.out[u]) {
            if (local[v] == absent) {
                extra += f;
            } else {
                sub.out[k].emplace_back(local[v], f);
            }
        }
        sub.exit_extra.push_back(extra);
    }
    finish(sub);
    return sub;
}

/// Dense relabeling in first-appearance order; returns the label count.
std::size_t compact(std::vector<std::size_t>& labels) {
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::size_t top = 0;
    for (auto l : labels) {
        top = std::max(top, l + 1);
    }
    std::vector<std::size_t> remap(top, unset);
    std::size_t next = 0;
    for (auto& l : labels) {
        if (remap[l] == unset) {
            remap[l] = next++;
        }
        l = remap[l];
    }
    return next;
}

/// Codelength bookkeeping for one level. The objective omits the constant
/// -sum plogp(leaf visit rate); `offset` is the exit rate of the enclosing
/// module (0 at the top), whose codeword shares the index codebook.
class Search {
public:
    Search(const Level& level, std::vector<std::size_t>& module, double offset)
        : level_(level), module_(module), offset_(offset) {
        rebuild();
    }

    double objective() const {
        double value = plogp(offset_ + sum_exit_) - plogp(offset_);
        for (std::size_t m = 0; m < exit_.size(); ++m) {
            if (size_[m] > 0) {
                value += plogp(exit_[m] + flow_[m]) - 2.0 * plogp(exit_[m]);
            }
        }
        return value;
    }

    /// Moves units until a sweep yields no net improvement. Appends the
    /// objective after every productive sweep to `trace` (when non-null).
    /// Returns whether anything moved.
    bool sweep_until_stable(Rng& rng, std::vector<double>* trace, double constant) {
        const auto n = level_.size();
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) {
            order[i] = i;
        }
        bool any = false;
        double current = objective();
        for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
            for (std::size_t i = n; i > 1; --i) {
                std::swap(order[i - 1], order[rng() % i]);
            }
            std::size_t moves = 0;
            for (auto u : order) {
                moves += try_move(u) ? 1 : 0;
            }
            if (moves == 0) {
                break;
            }
            any = true;
            rebuild();
            const double next = objective();
            if (trace != nullptr) {
                trace->push_back(next + constant);
            }
            const bool stalled = current - next < kMinImprovement;
            current = next;
            if (stalled) {
                break;
            }
        }
        return any;
    }

private:
    void rebuild() {
        const auto n = level_.size();
        flow_.assign(n, 0.0);
        exit_.assign(n, 0.0);
        size_.assign(n, 0);
        for (std::size_t u = 0; u < n; ++u) {
            const auto m = module_[u];
            flow_[m] += level_.flow[u];
            ++size_[m];
            exit_[m] += level_.exit_extra[u];
            for (const auto& [v, f] : level_.out[u]) {
                if (module_[v] != m) {
                    exit_[m] += f;
                }
            }
        }
        sum_exit_ = 0.0;
        free_.clear();
        for (std::size_t m = 0; m < n; ++m) {
            sum_exit_ += exit_[m];
            if (size_[m] == 0) {
                free_.push_back(m);
            }
        }
        std::reverse(free_.begin(), free_.end());  // pop lowest id first
        touched_out_.assign(n, 0.0);
        touched_in_.assign(n, 0.0);
        marked_.assign(n, false);
    }

    bool try_move(std::size_t u) {
        const auto from = module_[u];
        std::vector<std::size_t>& candidates = candidates_;
        candidates.clear();
        auto touch = [&](std::size_t m) {
            if (!marked_[m]) {
                marked_[m] = true;
                candidates.push_back(m);
            }
        };
        touch(from);
        for (const auto& [v, f] : level_.out[u]) {
            touch(module_[v]);
            touched_out_[module_[v]] += f;
        }
        for (const auto& [v, f] : level_.in[u]) {
            touch(module_[v]);
            touched_in_[module_[v]] += f;
        }

        const double unit_exit = level_.out_total[u];
        const double unit_flow = level_.flow[u];
        const double out_from = touched_out_[from];
        const double in_from = touched_in_[from];
        const double exit_from_new = exit_[from] - unit_exit + out_from + in_from;
        const double flow_from_new = flow_[from] - unit_flow;

        auto delta_to = [&](std::size_t to, double out_to, double in_to) {
            const double exit_to_new = exit_[to] + unit_exit - out_to - in_to;
            const double flow_to_new = flow_[to] + unit_flow;
            const double sum_new = sum_exit_ - exit_[from] - exit_[to] + exit_from_new + exit_to_new;
            return plogp(offset_ + sum_new) - plogp(offset_ + sum_exit_) -
                   2.0 * (plogp(exit_from_new) + plogp(exit_to_new) - plogp(exit_[from]) - plogp(exit_[to])) +
                   plogp(exit_from_new + flow_from_new) + plogp(exit_to_new + flow_to_new) -
                   plogp(exit_[from] + flow_[from]) - plogp(exit_[to] + flow_[to]);
        };

        double best_delta = 0.0;
        std::size_t best = from;
        double best_out = 0.0;
        double best_in = 0.0;
        for (auto to : candidates) {
            if (to == from) {
                continue;
            }
            const double d = delta_to(to, touched_out_[to], touched_in_[to]);
            if (d < best_delta || (d == best_delta && best != from && to < best)) {
                best_delta = d;
                best = to;
                best_out = touched_out_[to];
                best_in = touched_in_[to];
            }
        }
        if (size_[from] > 1 && !free_.empty()) {
            const auto empty = free_.back();
            const double d = delta_to(empty, 0.0, 0.0);
            if (d < best_delta) {
                best_delta = d;
                best = empty;
                best_out = 0.0;
                best_in = 0.0;
            }
        }

        for (auto m : candidates) {
            touched_out_[m] = 0.0;
            touched_in_[m] = 0.0;
            marked_[m] = false;
        }

        if (best == from || best_delta >= -kMinImprovement) {
            return false;
        }

        const bool into_empty = size_[best] == 0;
        const double exit_to_new = exit_[best] + unit_exit - best_out - best_in;
        sum_exit_ += exit_from_new + exit_to_new - exit_[from] - exit_[best];
        exit_[from] = std::max(0.0, exit_from_new);
        exit_[best] = std::max(0.0, exit_to_new);
        flow_[from] = flow_from_new;
        flow_[best] += unit_flow;
        --size_[from];
        ++size_[best];
        if (into_empty) {
            free_.pop_back();
        }
        if (size_[from] == 0) {
            free_.push_back(from);
        }
        module_[u] = best;
        return true;
    }

    const Level& level_;
    std::vector<std::size_t>& module_;
    double offset_;
    std::vector<double> flow_;
    std::vector<double> exit_;
    std::vector<std::size_t> size_;
    double sum_exit_ = 0.0;
    std::vector<std::size_t> free_;
    std::vector<double> touched_out_;
    std::vector<double> touched_in_;
    std::vector<bool> marked_;
    std::vector<std::size_t> candidates_;
};

double leaf_constant(const Level& leaves) {
    double c = 0.0;
    for (double p : leaves.flow) {
        c -= plogp(p);
    }
    return c;
}

double objective_of(const Level& leaves, std::vector<std::size_t> assignment, double offset) {
    Search search(leaves, assignment, offset);
    return search.objective();
}

/// Repeated move-then-aggregate passes starting from `assignment`.
void multilevel(const Level& leaves, std::vector<std::size_t>& assignment, Rng& rng, double offset,
                std::vector<double>* trace, double constant) {
    while (true) {
        auto group = assignment;
        const auto groups = compact(group);
        const auto units = aggregate(leaves, group, groups);
        std::vector<std::size_t> unit_module(groups);
        for (std::size_t g = 0; g < groups; ++g) {
            unit_module[g] = g;
        }
        Search search(units, unit_module, offset);
        if (!search.sweep_until_stable(rng, trace, constant)) {
            assignment = std::move(group);
            return;
        }
        for (std::size_t leaf = 0; leaf < leaves.size(); ++leaf) {
            assignment[leaf] = unit_module[group[leaf]];
        }
    }
}

/// Sub-module labels (global, dense) obtained by partitioning each module on
/// its own.
std::vector<std::size_t> submodules(const Level& leaves, const std::vector<std::size_t>& assignment, Rng& rng) {
    std::size_t modules = 0;
    for (auto m : assignment) {
        modules = std::max(modules, m + 1);
    }
    std::vector<std::vector<std::size_t>> members(modules);
    for (std::size_t leaf = 0; leaf < leaves.size(); ++leaf) {
        members[assignment[leaf]].push_back(leaf);
    }
    std::vector<std::size_t> sub(leaves.size());
    std::size_t next = 0;
    for (const auto& group : members) {
        if (group.size() <= 1) {
            for (auto leaf : group) {
                sub[leaf] = next++;
            }
            continue;
        }
        const auto local = induced(leaves, group);
        std::vector<std::size_t> local_assignment(group.size());
        for (std::size_t k = 0; k < group.size(); ++k) {
            local_assignment[k] = k;
        }
        multilevel(local, local_assignment, rng, 0.0, nullptr, 0.0);
        std::size_t count = 0;
        for (std::size_t k = 0; k < group.size(); ++k) {
            sub[group[k]] = next + local_assignment[k];
            count = std::max(count, local_assignment[k] + 1);
        }
        next += count;
    }
    return sub;
}

struct TrialResult {
    std::vector<std::size_t> assignment;
    double objective = 0.0;
    std::vector<double> trace;
};

TrialResult run_trial(const Level& leaves, double offset, double constant, Rng& rng) {
    TrialResult result;
    auto& assignment = result.assignment;
    assignment.resize(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        assignment[i] = i;
    }
    multilevel(leaves, assignment, rng, offset, &result.trace, constant);
    double best = objective_of(leaves, assignment, offset);

    for (int round = 0; round < kMaxTuneRounds; ++round) {
        auto candidate = assignment;
        std::vector<double> candidate_trace;

        // Fine tuning: single leaves move between the current modules.
        {
            Search search(leaves, candidate, offset);
            search.sweep_until_stable(rng, &candidate_trace, constant);
        }
        multilevel(leaves, candidate, rng, offset, &candidate_trace, constant);

        // Coarse tuning: sub-modules move as units between the current modules.
        {
            const auto sub = submodules(leaves, candidate, rng);
            std::size_t subs = 0;
            for (auto s : sub) {
                subs = std::max(subs, s + 1);
            }
            const auto units = aggregate(leaves, sub, subs);
            std::vector<std::size_t> unit_module(subs);
            for (std::size_t leaf = 0; leaf < leaves.size(); ++leaf) {
                unit_module[sub[leaf]] = candidate[leaf];
            }
            Search search(units, unit_module, offset);
            search.sweep_until_stable(rng, &candidate_trace, constant);
            for (std::size_t leaf = 0; leaf < leaves.size(); ++leaf) {
                candidate[leaf] = unit_module[sub[leaf]];
            }
        }
        multilevel(leaves, candidate, rng, offset, &candidate_trace, constant);

        const double value = objective_of(leaves, candidate, offset);
        if (value < best - kMinImprovement) {
            assignment = std::move(candidate);
            best = value;
            result.trace.insert(result.trace.end(), candidate_trace.begin(), candidate_trace.end());
        } else {
            break;
        }
    }
    compact(assignment);
    result.objective = best;
    return result;
}

Rng trial_rng(std::uint64_t seed, std::uint64_t stream, unsigned trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), trial};
    return Rng(seq);
}

/// Best-of-`trials` search on one level; `stream` separates sub-problems.
TrialResult best_of(const Level& leaves, double offset, std::uint64_t seed, std::uint64_t stream, unsigned trials) {
    const double constant = leaf_constant(leaves);
    TrialResult best;
    bool have = false;
    for (unsigned t = 0; t < std::max(1u, trials); ++t) {
        auto rng = trial_rng(seed, stream, t);
        auto result = run_trial(leaves, offset, constant, rng);
        if (!have || result.objective < best.objective) {
            best = std::move(result);
            have = true;
        }
    }
    return best;
}

std::size_t label_count(const std::vector<std::size_t>& labels) {
    std::size_t count = 0;
    for (auto l : labels) {
        count = std::max(count, l + 1);
    }
    return count;
}

HierarchyNode make_leaf(std::vector<std::size_t> nodes, double codelength) {
    HierarchyNode leaf;
    std::sort(nodes.begin(), nodes.end());
    leaf.nodes = std::move(nodes);
    leaf.codelength = codelength;
    return leaf;
}

/// Flat codebook cost of a module: its exit plus its members' visits.
double flat_cost(const Level& level, double exit) {
    double flow = 0.0;
    double members = 0.0;
    for (double p : level.flow) {
        flow += p;
        members += plogp(p);
    }
    return plogp(exit + flow) - plogp(exit) - members;
}

double module_exit(const Level& level) {
    double exit = 0.0;
    for (double e : level.exit_extra) {
        exit += e;
    }
    return exit;
}

/// Module on `level` (already induced, global ids in `ids`) with exit rate
/// `exit`; returns a leaf unless splitting it shortens the code.
HierarchyNode refine(const Level& level, const std::vector<std::size_t>& ids, double exit, std::uint64_t seed,
                     std::uint64_t stream, unsigned trials) {
    const double flat = flat_cost(level, exit);
    if (level.size() < 2) {
        return make_leaf(ids, flat);
    }
    const auto best = best_of(level, exit, seed, stream, trials);
    const auto subs = label_count(best.assignment);
    const double split = best.objective + leaf_constant(level);
    if (subs < 2 || !(split < flat - kMinImprovement)) {
        return make_leaf(ids, flat);
    }

    std::vector<std::vector<std::size_t>> members(subs);
    for (std::size_t k = 0; k < level.size(); ++k) {
        members[best.assignment[k]].push_back(k);
    }
    HierarchyNode node;
    double child_exit_sum = 0.0;
    double own = 0.0;
    for (std::size_t s = 0; s < subs; ++s) {
        const auto sub = induced(level, members[s]);
        const double sub_exit = module_exit(sub);
        child_exit_sum += sub_exit;
        own -= plogp(sub_exit);
        std::vector<std::size_t> sub_ids;
        sub_ids.reserve(members[s].size());
        for (auto k : members[s]) {
            sub_ids.push_back(ids[k]);
        }
        node.children.push_back(refine(sub, sub_ids, sub_exit, seed, stream * 1000003ULL + s + 1, trials));
    }
    own += plogp(exit + child_exit_sum) - plogp(exit);
    node.codelength = own;
    for (const auto& child : node.children) {
        node.codelength += child.codelength;
    }
    // Deeper refinement never loses to the flat split it started from.
    return node;
}

void collect_paths(const HierarchyNode& node, std::vector<std::size_t>& path,
                   std::vector<std::vector<std::size_t>>& out) {
    if (node.is_leaf()) {
        for (auto v : node.nodes) {
            out.at(v) = path;
        }
        return;
    }
    for (std::size_t c = 0; c < node.children.size(); ++c) {
        path.push_back(c);
        collect_paths(node.children[c], path, out);
        path.pop_back();
    }
}

} // namespace

std::size_t HierarchyNode::depth() const {
    std::size_t d = 0;
    for (const auto& child : children) {
        d = std::max(d, child.depth() + 1);
    }
    return d;
}

std::vector<std::size_t> HierarchyNode::collect_nodes() const {
    if (is_leaf()) {
        return nodes;
    }
    std::vector<std::size_t> all;
    for (const auto& child : children) {
        auto sub = child.collect_nodes();
        all.insert(all.end(), sub.begin(), sub.end());
    }
    std::sort(all.begin(), all.end());
    return all;
}

TwoLevelResult optimize_two_level(const FlowNetwork& flows, std::uint64_t seed, unsigned trials) {
    const auto n = flows.node_count();
    if (n == 0) {
        throw std::invalid_argument("cannot partition an empty network");
    }
    const auto leaves = leaf_level(flows);
    const double constant = leaf_constant(leaves);

    TwoLevelResult result;
    for (unsigned t = 0; t < std::max(1u, trials); ++t) {
        auto rng = trial_rng(seed, 0, t);
        auto trial = run_trial(leaves, 0.0, constant, rng);
        auto partition = Partition::from_labels(trial.assignment);
        const double length = codelength(flows, partition).codelength;
        if (t == 0 || length < result.codelength) {
            result.partition = std::move(partition);
            result.codelength = length;
            result.trace = std::move(trial.trace);
            result.best_trial = t;
        }
    }

    for (auto candidate : {Partition::single_module(n), Partition::singletons(n)}) {
        const double length = codelength(flows, candidate).codelength;
        if (length < result.codelength) {
            result.partition = std::move(candidate);
            result.codelength = length;
            result.trace.push_back(length);
        }
    }
    return result;
}

namespace {
double annotate(const FlowNetwork& flows, HierarchyNode& root);
} // namespace

HierarchyNode optimize_hierarchical(const FlowNetwork& flows, std::uint64_t seed, unsigned trials) {
    const auto n = flows.node_count();
    const auto two = optimize_two_level(flows, seed, trials);
    std::vector<std::size_t> all(n);
    for (std::size_t v = 0; v < n; ++v) {
        all[v] = v;
    }
    if (two.partition.module_count <= 1) {
        return make_leaf(all, two.codelength);
    }

    const auto leaves = leaf_level(flows);
    const auto members = two.partition.members();
    std::vector<HierarchyNode> tops;
    for (std::size_t m = 0; m < members.size(); ++m) {
        const auto sub = induced(leaves, members[m]);
        tops.push_back(refine(sub, members[m], module_exit(sub), seed, m + 1, trials));
    }

    // Upward: group the current top modules into super-modules while the
    // extra index level shortens the code. Units code with their exit rates.
    auto units = aggregate(leaves, two.partition.module, two.partition.module_count);
    units.flow = units.out_total;
    for (std::uint64_t round = 1; tops.size() > 2; ++round) {
        const auto best = best_of(units, 0.0, seed, (std::uint64_t{1} << 40) + round, trials);
        const auto supers = label_count(best.assignment);
        if (supers < 2 || supers == tops.size()) {
            break;
        }
        const double flat = flat_cost(units, 0.0);
        const double split = best.objective + leaf_constant(units);
        if (!(split < flat - kMinImprovement)) {
            break;
        }
        std::vector<HierarchyNode> grouped(supers);
        for (std::size_t u = 0; u < tops.size(); ++u) {
            grouped[best.assignment[u]].children.push_back(std::move(tops[u]));
        }
        tops = std::move(grouped);
        units = aggregate(units, best.assignment, supers);
        units.flow = units.out_total;
    }

    HierarchyNode root;
    root.children = std::move(tops);
    annotate(flows, root);
    return root;
}

namespace {

/// Stores the bits of every subtree in its `codelength` and returns the root's.
double annotate(const FlowNetwork& flows, HierarchyNode& root) {
    const auto n = flows.node_count();
    if (root.is_leaf()) {
        double h = 0.0;
        for (double p : flows.node_flow) {
            h -= plogp(p);
        }
        root.codelength = h;
        return h;
    }

    std::vector<std::vector<std::size_t>> node_path(n);
    std::vector<std::size_t> path;
    collect_paths(root, path, node_path);

    // Exit rate of the tree node identified by a path prefix.
    auto exit_of = [&](const std::vector<std::size_t>& prefix) {
        auto inside = [&](std::size_t v) {
            const auto& p = node_path[v];
            return p.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), p.begin());
        };
        double exit = 0.0;
        for (const auto& arc : flows.arcs) {
            if (inside(arc.source) && !inside(arc.target)) {
                exit += arc.flow;
            }
        }
        return exit;
    };

    std::vector<std::size_t> prefix;
    auto visit = [&](auto&& self, HierarchyNode& node) -> double {
        const double exit = prefix.empty() ? 0.0 : exit_of(prefix);
        double rate = exit;
        double sum_plogp = plogp(exit);
        if (node.is_leaf()) {
            for (auto v : node.nodes) {
                rate += flows.node_flow[v];
                sum_plogp += plogp(flows.node_flow[v]);
            }
        } else {
            for (std::size_t c = 0; c < node.children.size(); ++c) {
                prefix.push_back(c);
                const double child_exit = exit_of(prefix);
                prefix.pop_back();
                rate += child_exit;
                sum_plogp += plogp(child_exit);
            }
        }
        double bits = plogp(rate) - sum_plogp;
        for (std::size_t c = 0; c < node.children.size(); ++c) {
            prefix.push_back(c);
            bits += self(self, node.children[c]);
            prefix.pop_back();
        }
        node.codelength = bits;
        return bits;
    };
    return visit(visit, root);
}

void find_leaves(HierarchyNode& node, std::vector<HierarchyNode*>& leaves) {
    if (node.is_leaf()) {
        leaves.push_back(&node);
        return;
    }
    for (auto& child : node.children) {
        find_leaves(child, leaves);
    }
}

/// Removes empty leaves and replaces single-child internal nodes by the child.
/// Returns false when `node` itself became empty.
bool prune(HierarchyNode& node) {
    if (node.is_leaf()) {
        return !node.nodes.empty();
    }
    std::vector<HierarchyNode> kept;
    for (auto& child : node.children) {
        if (prune(child)) {
            kept.push_back(std::move(child));
        }
    }
    if (kept.empty()) {
        node.children.clear();
        return false;
    }
    if (kept.size() == 1) {
        HierarchyNode only = std::move(kept.front());
        node = std::move(only);
        return true;
    }
    node.children = std::move(kept);
    return true;
}

} // namespace

double hierarchical_codelength(const FlowNetwork& flows, const HierarchyNode& root) {
    auto copy = root;
    return annotate(flows, copy);
}

void attach_zero_flow_nodes(HierarchyNode& root, const FlowNetwork& flows,
                            const std::vector<std::vector<std::size_t>>& neighbors) {
    const auto n = flows.node_count();
    if (neighbors.size() != n) {
        throw std::invalid_argument("neighbor lists do not match the flow network");
    }
    std::vector<HierarchyNode*> leaves;
    find_leaves(root, leaves);
    constexpr auto none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> leaf_of(n, none);
    std::vector<double> leaf_flow(leaves.size(), 0.0);
    for (std::size_t l = 0; l < leaves.size(); ++l) {
        for (auto v : leaves[l]->nodes) {
            leaf_of.at(v) = l;
            leaf_flow[l] += flows.node_flow[v];
        }
    }

    std::vector<std::size_t> target(n, none);
    for (std::size_t v = 0; v < n; ++v) {
        if (flows.node_flow[v] > 0.0 || leaf_flow[leaf_of[v]] > 0.0) {
            continue;
        }
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> queue{v};
        seen[v] = true;
        for (std::size_t head = 0; head < queue.size() && target[v] == none; ++head) {
            auto next = neighbors[queue[head]];
            std::sort(next.begin(), next.end());
            for (auto u : next) {
                if (seen.at(u)) {
                    continue;
                }
                seen[u] = true;
                if (flows.node_flow[u] > 0.0) {
                    target[v] = leaf_of[u];
                    break;
                }
                queue.push_back(u);
            }
        }
    }

    bool moved = false;
    for (std::size_t v = 0; v < n; ++v) {
        if (target[v] == none) {
            continue;
        }
        auto& from = leaves[leaf_of[v]]->nodes;
        from.erase(std::find(from.begin(), from.end(), v));
        auto& to = leaves[target[v]]->nodes;
        to.insert(std::lower_bound(to.begin(), to.end(), v), v);
        moved = true;
    }
    if (moved) {
        prune(root);
        annotate(flows, root);
    }
}

Partition top_level_partition(const HierarchyNode& root, std::size_t node_count) {
    if (root.is_leaf()) {
        return Partition::single_module(node_count);
    }
    std::vector<std::size_t> labels(node_count, 0);
    for (std::size_t c = 0; c < root.children.size(); ++c) {
        for (auto v : root.children[c].collect_nodes()) {
            labels.at(v) = c;
        }
    }
    return Partition::from_labels(labels);
}

std::vector<std::vector<std::size_t>> module_paths(const HierarchyNode& root, std::size_t node_count) {
    std::vector<std::vector<std::size_t>> out(node_count);
    std::vector<std::size_t> path;
    collect_paths(root, path, out);
    return out;
}

std::vector<std::size_t> modules_per_level(const HierarchyNode& root) {
    std::vector<std::size_t> counts;
    const auto depth = root.depth();
    std::vector<const HierarchyNode*> frontier{&root};
    for (std::size_t level = 1; level <= depth; ++level) {
        std::vector<const HierarchyNode*> next;
        for (const auto* node : frontier) {
            if (node->is_leaf()) {
                next.push_back(node);
            } else {
                for (const auto& child : node->children) {
                    next.push_back(&child);
                }
            }
        }
        counts.push_back(next.size());
        frontier = std::move(next);
    }
    return counts;
}

} // namespace gridseg
