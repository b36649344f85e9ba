#include "nsgapinn/nsga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace nsgapinn::nsga {

bool dominates(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DimensionError("objective vector length", static_cast<long>(a.size()),
                             static_cast<long>(b.size()));
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strict = true;
    }
    return strict;
}

FrontPartition non_dominated_sort(std::span<Individual> population) {
    const std::size_t n = population.size();
    if (n == 0) throw Error("non_dominated_sort: empty population");

    std::vector<std::vector<std::size_t>> dominated(n);  // S_p
    std::vector<int> count(n, 0);                        // n_p
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            if (dominates(population[p].objectives, population[q].objectives))
                dominated[p].push_back(q);
            else if (dominates(population[q].objectives, population[p].objectives))
                ++count[p];
        }
    }

    FrontPartition out;
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        if (count[p] == 0) {
            population[p].rank = 1;
            current.push_back(p);
        }
    }
    int rank = 1;
    while (!current.empty()) {
        std::vector<std::uint64_t> labels;
        labels.reserve(current.size());
        for (std::size_t p : current) labels.push_back(population[p].label);
        out.fronts.push_back(std::move(labels));

        std::vector<std::size_t> next;
        for (std::size_t p : current) {
            for (std::size_t q : dominated[p]) {
                if (--count[q] == 0) {
                    population[q].rank = rank + 1;
                    next.push_back(q);
                }
            }
        }
        current = std::move(next);
        ++rank;
    }
    return out;
}

void crowding_distance(std::span<Individual> front) {
    const std::size_t n = front.size();
    if (n == 0) return;
    const double inf = std::numeric_limits<double>::infinity();
    if (n <= 2) {
        for (auto& ind : front) ind.crowding = inf;
        return;
    }
    for (auto& ind : front) ind.crowding = 0.0;
    const std::size_t n_obj = front[0].objectives.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t m = 0; m < n_obj; ++m) {
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const double fa = front[a].objectives[m], fb = front[b].objectives[m];
            if (fa != fb) return fa < fb;
            return front[a].label < front[b].label;
        });
        front[idx.front()].crowding = inf;
        front[idx.back()].crowding = inf;
        const double span =
            front[idx.back()].objectives[m] - front[idx.front()].objectives[m];
        if (span <= 0.0) continue;  // degenerate range: no diversity signal
        for (std::size_t i = 1; i + 1 < n; ++i) {
            Individual& ind = front[idx[i]];
            if (std::isinf(ind.crowding)) continue;
            ind.crowding += (front[idx[i + 1]].objectives[m] -
                             front[idx[i - 1]].objectives[m]) /
                            span;
        }
    }
}

void assign_crowding(std::span<Individual> population, const FrontPartition& fronts) {
    std::unordered_map<std::uint64_t, std::size_t> by_label;
    by_label.reserve(population.size());
    for (std::size_t i = 0; i < population.size(); ++i)
        by_label[population[i].label] = i;
    for (const auto& front : fronts.fronts) {
        std::vector<Individual> members;
        members.reserve(front.size());
        for (std::uint64_t label : front) {
            Individual slim;  // crowding needs only objectives and label
            slim.label = label;
            slim.objectives = population[by_label.at(label)].objectives;
            members.push_back(std::move(slim));
        }
        crowding_distance(members);
        for (const Individual& m : members)
            population[by_label.at(m.label)].crowding = m.crowding;
    }
}

namespace {

// lower rank wins; ties by higher crowding; remaining ties by coin flip
std::size_t duel(std::span<const Individual> pop, std::size_t a, std::size_t b,
                 std::mt19937_64& rng) {
    if (pop[a].rank != pop[b].rank) return pop[a].rank < pop[b].rank ? a : b;
    if (pop[a].crowding != pop[b].crowding)
        return pop[a].crowding > pop[b].crowding ? a : b;
    return std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? a : b;
}

}  // namespace

std::vector<std::uint64_t> tournament_select(std::span<const Individual> population,
                                             std::size_t pool_size,
                                             std::mt19937_64& rng) {
    if (population.size() < 2)
        throw Error("tournament_select: population must have at least 2 members");
    for (const Individual& ind : population)
        if (ind.rank <= 0 || ind.crowding < 0.0)
            throw Error("tournament_select: ranks and crowding must be assigned");

    std::vector<std::uint64_t> pool;
    pool.reserve(pool_size);
    std::vector<std::size_t> order;
    bool carried = false;
    std::size_t carry = 0;
    while (pool.size() < pool_size) {
        order.resize(population.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        if (carried) order.push_back(carry);
        carried = order.size() % 2 != 0;
        if (carried) {
            carry = order.back();
            order.pop_back();
        }
        for (std::size_t i = 0; i + 1 < order.size() && pool.size() < pool_size;
             i += 2) {
            const std::size_t winner = duel(population, order[i], order[i + 1], rng);
            pool.push_back(population[winner].label);
        }
    }
    return pool;
}

std::vector<Individual> truncate_population(std::vector<Individual> pool,
                                            std::size_t n) {
    if (n > pool.size())
        throw DimensionError("survivor count", static_cast<long>(pool.size()),
                             static_cast<long>(n));
    const FrontPartition partition = non_dominated_sort(pool);
    assign_crowding(pool, partition);

    std::unordered_map<std::uint64_t, std::size_t> by_label;
    by_label.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) by_label[pool[i].label] = i;

    std::vector<Individual> survivors;
    survivors.reserve(n);
    for (const auto& front : partition.fronts) {
        if (survivors.size() == n) break;
        if (survivors.size() + front.size() <= n) {
            for (std::uint64_t label : front)
                survivors.push_back(pool[by_label.at(label)]);
            continue;
        }
        std::vector<std::uint64_t> order = front;
        std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
            const double ca = pool[by_label.at(a)].crowding;
            const double cb = pool[by_label.at(b)].crowding;
            if (ca != cb) return ca > cb;
            return a < b;
        });
        for (std::uint64_t label : order) {
            if (survivors.size() == n) break;
            survivors.push_back(pool[by_label.at(label)]);
        }
    }
    return survivors;
}

std::vector<Individual> environmental_select(std::span<const Individual> combined,
                                             std::size_t n) {
    if (combined.size() != 2 * n)
        throw DimensionError("combined population size", static_cast<long>(2 * n),
                             static_cast<long>(combined.size()));
    return truncate_population(std::vector<Individual>(combined.begin(), combined.end()),
                               n);
}

}  // namespace nsgapinn::nsga
