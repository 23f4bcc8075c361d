#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "addperm/add.hpp"
#include "addperm/matrix.hpp"

namespace addperm {

enum class Algorithm { BruteForce, RyserGray, Monolithic, EarlyAbstraction };

/// How rows are assigned to clusters under a cluster rank-order.
enum class ClusterHeuristic {
    BucketElimination,  // minimum rank of the row's support
    BouquetList,        // maximum rank of the row's support
    Monolithic,         // every row in cluster 1
};

/// Source of the cluster rank-order.
enum class RankOrder { Index, Mcs };

std::string_view toString(Algorithm a);
std::string_view toString(ClusterHeuristic h);
std::string_view toString(RankOrder o);
Algorithm algorithmFromString(std::string_view s);
ClusterHeuristic heuristicFromString(std::string_view s);
RankOrder rankOrderFromString(std::string_view s);

struct RunLimits {
    int bruteForceMaxN = 12;
    int ryserMaxN = 30;
    std::size_t nodeBudget = 50'000'000;
    std::optional<std::chrono::duration<double>> timeout;
};

struct PermanentStats {
    double wallTimeMillis = 0.0;
    /// Largest reachable size of any intermediate diagram held by the algorithm.
    std::size_t peakAddNodes = 0;
    std::size_t totalAddNodesCreated = 0;
    std::size_t clustersProcessed = 0;
};

struct PermanentResult {
    BigInt value;
    Algorithm algorithm = Algorithm::BruteForce;
    std::optional<ClusterHeuristic> heuristic;
    PermanentStats stats;
};

/// Sum over all permutations, skipping zero entries. Throws LimitError above the limit.
PermanentResult permBruteForce(const Matrix01& m, const RunLimits& limits = {});

/// Explicit Ryser over the binary reflected Gray code. With `nijenhuisWilf` the
/// 2^(n-1)-subset variant is used, carried out on doubled integer row values.
PermanentResult permRyserGray(const Matrix01& m, const RunLimits& limits = {}, bool nijenhuisWilf = false);

/// Closed form for an n x n matrix whose rows all share one support of size k.
BigInt permIdenticalRows(int n, int k);

/// Row-sum ADD of row i: the number of the row's ones among the chosen columns.
Add buildRowSumAdd(AddManager& mgr, const Matrix01& m, int row);
/// (-1)^|tau| over the first n column variables.
Add buildParityAdd(AddManager& mgr, int n);
/// Product of all row-sum ADDs in row order. `peakNodes` receives the largest
/// reachable node count over the intermediate products.
Add buildRowSumProductAdd(AddManager& mgr, const Matrix01& m, std::size_t* peakNodes = nullptr);

/// Builds the full Ryser ADD and sums out every variable at the end.
PermanentResult permMonolithic(const Matrix01& m, const RunLimits& limits = {});

/// Maximum cardinality search: picks the vertex with most already-ordered
/// neighbours, ties to the smallest index. The result is used as a cluster rank-order.
VariableOrder mcsOrder(const AdjacencyList& graph);

/// 1-based cluster rank of `row` under `eta` (rank of x is eta.levelOf(x) + 1).
/// Throws std::invalid_argument for an all-zero row.
int clusterRank(int row, const Matrix01& m, const VariableOrder& eta, ClusterHeuristic h);

struct ClusterPlan {
    VariableOrder eta;
    ClusterHeuristic heuristic = ClusterHeuristic::BouquetList;
    /// clusters[i - 1] holds the rows of rank i; size() is m.
    std::vector<std::vector<int>> clusters;

    int count() const noexcept { return static_cast<int>(clusters.size()); }
};

ClusterPlan planClusters(const Matrix01& m, const VariableOrder& eta, ClusterHeuristic h);

/// Clustered product with early abstraction of variables no later cluster mentions.
PermanentResult permEarlyAbstraction(const Matrix01& m, const VariableOrder& pi, const VariableOrder& eta,
                                     ClusterHeuristic h, const RunLimits& limits = {});

struct PermConfig {
    Algorithm algorithm = Algorithm::EarlyAbstraction;
    ClusterHeuristic heuristic = ClusterHeuristic::BouquetList;
    RankOrder rankOrder = RankOrder::Mcs;
    bool nijenhuisWilf = false;
    RunLimits limits;
};

/// Monolithic for dense and similar-rows matrices, BM-List with MCS for sparse ones.
PermConfig defaultConfigFor(Family family);

/// Dispatches on `config`; matrices without a perfect matching return 0 immediately.
PermanentResult perm(const Matrix01& m, const PermConfig& config = {});

}  // namespace addperm
