#include <random>

#include "addperm/errors.hpp"
#include "addperm/permanent.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace addperm;

namespace {

BigInt oracleValue(const Matrix01& m) { return BigInt(std::to_string(oracle::permanentByPermutations(m))); }

VariableOrder randomOrder(std::mt19937_64& rng, int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), 0);
    std::shuffle(v.begin(), v.end(), rng);
    return VariableOrder::fromSequence(v);
}

BigInt early(const Matrix01& m, ClusterHeuristic h, bool mcs = true) {
    const VariableOrder eta = mcs ? mcsOrder(primalGraph(m)) : VariableOrder::identity(m.size());
    return permEarlyAbstraction(m, VariableOrder::identity(m.size()), eta, h).value;
}

}  // namespace

TEST_CASE("brute force") {
    CHECK(permBruteForce(Matrix01::identity(3)).value == 1);
    CHECK(permBruteForce(Matrix01::allOnes(4)).value == 24);
    CHECK(permBruteForce(Matrix01::fromRows({{0, 1}, {1, 1}})).value == 1);
    CHECK_THROWS_AS(permBruteForce(Matrix01::allOnes(13)), LimitError);
    RunLimits small;
    small.bruteForceMaxN = 3;
    CHECK_THROWS_AS(permBruteForce(Matrix01::allOnes(4), small), LimitError);
}

TEST_CASE("explicit Gray-code Ryser") {
    CHECK(permRyserGray(Matrix01::identity(2)).value == 1);
    CHECK(permRyserGray(Matrix01::allOnes(5)).value == 120);
    CHECK(permRyserGray(Matrix01::allOnes(1)).value == 1);
    CHECK(permRyserGray(Matrix01(1)).value == 0);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix01 m = oracle::randomMatrix(rng, 8, 0.3 + 0.01 * trial);
        const BigInt expected = oracleValue(m);
        CHECK(permRyserGray(m).value == expected);
        CHECK(permRyserGray(m, {}, true).value == expected);
    }
    RunLimits small;
    small.ryserMaxN = 5;
    CHECK_THROWS_AS(permRyserGray(Matrix01::allOnes(6), small), LimitError);
}

TEST_CASE("Nijenhuis-Wilf variant on small and full matrices") {
    for (int n = 1; n <= 9; ++n) {
        BigInt fact = 1;
        for (int k = 2; k <= n; ++k) fact *= k;
        CHECK(permRyserGray(Matrix01::allOnes(n), {}, true).value == fact);
        CHECK(permRyserGray(Matrix01::identity(n), {}, true).value == 1);
    }
}

TEST_CASE("identical-rows closed form") {
    CHECK(permIdenticalRows(2, 2) == 2);
    CHECK(permIdenticalRows(4, 4) == 24);
    for (int n = 1; n <= 6; ++n) CHECK(permIdenticalRows(n, 0) == 0);
    CHECK_THROWS_AS(permIdenticalRows(3, 4), std::invalid_argument);
    for (int n = 1; n <= 7; ++n) {
        for (int k = 1; k <= n; ++k) {
            Matrix01 m(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < k; ++j) m.set(i, j, true);
            CHECK(permIdenticalRows(n, k) == oracleValue(m));
        }
    }
}

TEST_CASE("row-sum ADD construction") {
    const Matrix01 m = Matrix01::fromRows({{1, 0, 0, 0}, {1, 1, 1, 1}, {0, 0, 0, 0}, {0, 1, 0, 1}});
    AddManager mgr(VariableOrder::identity(4));
    CHECK(buildRowSumAdd(mgr, m, 0) == mgr.variable(0));
    CHECK(mgr.nodeCount(buildRowSumAdd(mgr, m, 1)) == NodeCount{10, 5});
    CHECK(buildRowSumAdd(mgr, m, 2) == mgr.zero());
    CHECK(buildRowSumAdd(mgr, m, 3) == mgr.sum(mgr.variable(3), mgr.variable(1)));
    CHECK_THROWS_AS(buildRowSumAdd(mgr, m, 4), std::out_of_range);
}

TEST_CASE("monolithic symbolic Ryser") {
    CHECK(permMonolithic(Matrix01::allOnes(4)).value == 24);
    CHECK(permMonolithic(Matrix01::identity(5)).value == 1);
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix01 m = oracle::randomMatrix(rng, 8, 0.3 + 0.01 * trial);
        CHECK(permMonolithic(m).value == oracleValue(m));
    }
}

TEST_CASE("maximum cardinality search") {
    auto seq = [](const AdjacencyList& g) { return mcsOrder(g).vars(); };
    CHECK(seq(AdjacencyList(3)) == std::vector<int>{0, 1, 2});
    CHECK(seq(AdjacencyList{{1, 2}, {0, 2}, {0, 1}}) == std::vector<int>{0, 1, 2});
    CHECK(seq(AdjacencyList{{1}, {0, 2}, {1}}) == std::vector<int>{0, 1, 2});
    // Star centred on vertex 3 (1-based): 1, then the centre, then 2 and 4.
    CHECK(seq(AdjacencyList{{2}, {2}, {0, 1, 3}, {2}}) == std::vector<int>{0, 2, 1, 3});
    // Path 1-3-2: from 1 the only weighted vertex is 3.
    CHECK(seq(AdjacencyList{{2}, {2}, {0, 1}}) == std::vector<int>{0, 2, 1});
}

TEST_CASE("cluster ranks") {
    Matrix01 m(5);
    m.set(0, 1, true);
    m.set(0, 4, true);
    const VariableOrder eta = VariableOrder::identity(5);
    CHECK(clusterRank(0, m, eta, ClusterHeuristic::BouquetList) == 5);
    CHECK(clusterRank(0, m, eta, ClusterHeuristic::BucketElimination) == 2);
    CHECK(clusterRank(0, m, eta, ClusterHeuristic::Monolithic) == 1);
    CHECK_THROWS_AS(clusterRank(1, m, eta, ClusterHeuristic::BouquetList), std::invalid_argument);

    const VariableOrder reversed = VariableOrder::fromSequence({4, 3, 2, 1, 0});
    CHECK(clusterRank(0, m, reversed, ClusterHeuristic::BouquetList) == 4);
    CHECK(clusterRank(0, m, reversed, ClusterHeuristic::BucketElimination) == 1);
}

TEST_CASE("cluster plans partition the rows") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + trial % 6;
        Matrix01 m = oracle::randomMatrix(rng, n, 0.4);
        for (int i = 0; i < n; ++i) m.set(i, i, true);
        for (ClusterHeuristic h :
             {ClusterHeuristic::BucketElimination, ClusterHeuristic::BouquetList, ClusterHeuristic::Monolithic}) {
            const ClusterPlan plan = planClusters(m, randomOrder(rng, n), h);
            std::vector<int> seen(static_cast<std::size_t>(n), 0);
            for (const auto& cluster : plan.clusters)
                for (int row : cluster) ++seen[row];
            CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
            CHECK(plan.count() <= n);
            if (h == ClusterHeuristic::Monolithic) CHECK((plan.count() == 1));
        }
    }
}

TEST_CASE("early abstraction") {
    Matrix01 zeroCol = Matrix01::allOnes(4);
    for (int i = 0; i < 4; ++i) zeroCol.set(i, 2, false);
    CHECK(early(zeroCol, ClusterHeuristic::BouquetList) == 0);
    CHECK(early(Matrix01::allOnes(6), ClusterHeuristic::BouquetList) == 720);

    for (int trial = 0; trial < 50; ++trial) {
        const Matrix01 m = generate(GenParams{Family::Sparse, 10, 4.0, 0.0, static_cast<std::uint64_t>(trial)});
        const BigInt expected = permRyserGray(m).value;
        CHECK(expected == oracle::permanentByRyserSubsets(m));
        CHECK(early(m, ClusterHeuristic::BucketElimination) == expected);
        CHECK(early(m, ClusterHeuristic::BouquetList) == expected);
    }
}

TEST_CASE("early abstraction abstracts every variable and reports clusters") {
    const Matrix01 band = Matrix01::tridiagonal(12);
    const auto r = permEarlyAbstraction(band, VariableOrder::identity(12), VariableOrder::identity(12),
                                        ClusterHeuristic::BouquetList);
    CHECK(r.value == 233);  // tridiagonal 0-1 permanents are Fibonacci numbers: F(13)
    CHECK(r.value == oracle::permanentByRyserSubsets(band));
    CHECK(r.stats.clustersProcessed > 1);
    CHECK(r.stats.peakAddNodes > 0);
    CHECK(r.stats.totalAddNodesCreated >= r.stats.peakAddNodes);
    CHECK((r.heuristic == ClusterHeuristic::BouquetList));
}

TEST_CASE("dispatcher") {
    Matrix01 zeroRow = Matrix01::allOnes(4);
    for (int j = 0; j < 4; ++j) zeroRow.set(1, j, false);
    for (Algorithm a : {Algorithm::BruteForce, Algorithm::RyserGray, Algorithm::Monolithic,
                        Algorithm::EarlyAbstraction}) {
        PermConfig c;
        c.algorithm = a;
        const auto r = perm(zeroRow, c);
        CHECK(r.value == 0);
        CHECK(r.stats.totalAddNodesCreated == 0);
    }
    CHECK(perm(Matrix01::identity(4)).value == 1);
    CHECK(perm(Matrix01::allOnes(4)).value == 24);

    PermConfig timeout;
    timeout.limits.timeout = std::chrono::duration<double>(0.0);
    CHECK_THROWS_AS(perm(Matrix01::allOnes(4), timeout), TimeoutError);

    PermConfig budget;
    budget.algorithm = Algorithm::Monolithic;
    budget.limits.nodeBudget = 30;
    CHECK_THROWS_AS(perm(Matrix01::allOnes(8), budget), NodeBudgetError);
    budget.algorithm = Algorithm::EarlyAbstraction;
    CHECK_THROWS_AS(perm(Matrix01::allOnes(8), budget), NodeBudgetError);

    CHECK((defaultConfigFor(Family::Dense).heuristic == ClusterHeuristic::Monolithic));
    CHECK((defaultConfigFor(Family::Similar).heuristic == ClusterHeuristic::Monolithic));
    CHECK((defaultConfigFor(Family::Sparse).heuristic == ClusterHeuristic::BouquetList));
    CHECK((defaultConfigFor(Family::Sparse).rankOrder == RankOrder::Mcs));
}

TEST_CASE("names round-trip") {
    for (Algorithm a :
         {Algorithm::BruteForce, Algorithm::RyserGray, Algorithm::Monolithic, Algorithm::EarlyAbstraction})
        CHECK((algorithmFromString(toString(a)) == a));
    for (ClusterHeuristic h :
         {ClusterHeuristic::BucketElimination, ClusterHeuristic::BouquetList, ClusterHeuristic::Monolithic})
        CHECK((heuristicFromString(toString(h)) == h));
    CHECK((rankOrderFromString("MCS") == RankOrder::Mcs));
    CHECK_THROWS_AS(algorithmFromString("fast"), std::invalid_argument);
}

// ---------------------------------------------------------------- invariants

TEST_CASE("cross-algorithm agreement, exhaustive for n <= 3") {
    for (int n = 1; n <= 3; ++n) {
        const int cells = n * n;
        for (int bits = 0; bits < (1 << cells); ++bits) {
            Matrix01 m(n);
            for (int c = 0; c < cells; ++c) m.set(c / n, c % n, (bits >> c) & 1);
            const BigInt expected = oracleValue(m);
            REQUIRE(permBruteForce(m).value == expected);
            REQUIRE(permRyserGray(m).value == expected);
            REQUIRE(permMonolithic(m).value == expected);
            REQUIRE(early(m, ClusterHeuristic::BucketElimination) == expected);
            REQUIRE(early(m, ClusterHeuristic::BouquetList) == expected);
        }
    }
}

TEST_CASE("cross-algorithm agreement on random matrices, 4 <= n <= 10") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 4 + trial % 7;
        const Matrix01 m = oracle::randomMatrix(rng, n, 0.2 + 0.6 * (trial % 10) / 9.0);
        const BigInt expected = oracle::permanentByRyserSubsets(m);
        CHECK(permBruteForce(m).value == expected);
        CHECK(permRyserGray(m).value == expected);
        CHECK(permMonolithic(m).value == expected);
        CHECK(early(m, ClusterHeuristic::BucketElimination) == expected);
        CHECK(early(m, ClusterHeuristic::BouquetList) == expected);
    }
}

TEST_CASE("value is independent of orders and heuristics") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 5 + trial % 4;
        const Matrix01 m = oracle::randomMatrix(rng, n, 0.5);
        const BigInt expected = oracle::permanentByRyserSubsets(m);
        for (int k = 0; k < 3; ++k) {
            const VariableOrder pi = randomOrder(rng, n);
            const VariableOrder eta = randomOrder(rng, n);
            for (ClusterHeuristic h : {ClusterHeuristic::BucketElimination, ClusterHeuristic::BouquetList,
                                       ClusterHeuristic::Monolithic})
                CHECK(permEarlyAbstraction(m, pi, eta, h).value == expected);
        }
    }
}

TEST_CASE("column permutation and transpose invariance") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 4 + trial % 5;
        const Matrix01 m = oracle::randomMatrix(rng, n, 0.5);
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const Matrix01 shuffled = m.permuteColumns(perm);
        const Matrix01 t = m.transposed();
        const BigInt v = permMonolithic(m).value;
        for (const Matrix01* other : {&shuffled, &t}) {
            CHECK(permBruteForce(*other).value == v);
            CHECK(permRyserGray(*other).value == v);
            CHECK(permMonolithic(*other).value == v);
            CHECK(early(*other, ClusterHeuristic::BucketElimination) == v);
            CHECK(early(*other, ClusterHeuristic::BouquetList, false) == v);
        }
    }
}

TEST_CASE("monolithic heuristic is the single-pass special case") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 4 + trial % 5;
        Matrix01 m = oracle::randomMatrix(rng, n, 0.6);
        for (int i = 0; i < n; ++i) m.set(i, (i + 1) % n, true);
        const auto r = permEarlyAbstraction(m, VariableOrder::identity(n), randomOrder(rng, n),
                                            ClusterHeuristic::Monolithic);
        CHECK(r.value == permMonolithic(m).value);
        CHECK(r.stats.clustersProcessed == 1);
    }
}

TEST_CASE("fully abstracted Ryser ADD carries the (-1)^n sign") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + trial % 5;
        const Matrix01 m = oracle::randomMatrix(rng, n, 0.6);
        AddManager mgr(VariableOrder::identity(n));
        Add f = mgr.product(buildRowSumProductAdd(mgr, m), buildParityAdd(mgr, n));
        for (int x = 0; x < n; ++x) f = mgr.abstractSum(f, x);
        const BigInt sign = n % 2 ? -1 : 1;
        CHECK(mgr.constantValue(f) == sign * oracleValue(m));
    }
}
