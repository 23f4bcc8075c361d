#include "addperm/permanent.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "addperm/errors.hpp"

namespace addperm {

namespace {

using Clock = std::chrono::steady_clock;

std::string lower(std::string_view s) {
    std::string r(s);
    std::transform(r.begin(), r.end(), r.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return r;
}

std::optional<Clock::time_point> deadlineFrom(const RunLimits& limits, Clock::time_point start) {
    if (!limits.timeout) return std::nullopt;
    return start + std::chrono::duration_cast<Clock::duration>(*limits.timeout);
}

void checkDeadline(const std::optional<Clock::time_point>& deadline) {
    if (deadline && Clock::now() >= *deadline) throw TimeoutError("permanent computation exceeded its deadline");
}

double millisSince(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

BigInt signFor(int n) { return (n % 2 == 0) ? BigInt(1) : BigInt(-1); }

// Abstracts the listed variables deepest level first.
Add abstractVars(AddManager& mgr, Add f, std::vector<int> vars) {
    const VariableOrder& order = mgr.order();
    std::sort(vars.begin(), vars.end(), [&](int a, int b) { return order.levelOf(a) > order.levelOf(b); });
    for (int x : vars) f = mgr.abstractSum(f, x);
    return f;
}

}  // namespace

std::string_view toString(Algorithm a) {
    switch (a) {
        case Algorithm::BruteForce: return "brute";
        case Algorithm::RyserGray: return "gray";
        case Algorithm::Monolithic: return "mono";
        case Algorithm::EarlyAbstraction: return "early";
    }
    return "unknown";
}

std::string_view toString(ClusterHeuristic h) {
    switch (h) {
        case ClusterHeuristic::BucketElimination: return "be";
        case ClusterHeuristic::BouquetList: return "bm-list";
        case ClusterHeuristic::Monolithic: return "mono";
    }
    return "unknown";
}

std::string_view toString(RankOrder o) { return o == RankOrder::Index ? "index" : "mcs"; }

Algorithm algorithmFromString(std::string_view s) {
    const std::string l = lower(s);
    if (l == "brute") return Algorithm::BruteForce;
    if (l == "gray") return Algorithm::RyserGray;
    if (l == "mono") return Algorithm::Monolithic;
    if (l == "early") return Algorithm::EarlyAbstraction;
    throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

ClusterHeuristic heuristicFromString(std::string_view s) {
    const std::string l = lower(s);
    if (l == "be") return ClusterHeuristic::BucketElimination;
    if (l == "bm-list") return ClusterHeuristic::BouquetList;
    if (l == "mono") return ClusterHeuristic::Monolithic;
    throw std::invalid_argument("unknown heuristic '" + std::string(s) + "'");
}

RankOrder rankOrderFromString(std::string_view s) {
    const std::string l = lower(s);
    if (l == "index") return RankOrder::Index;
    if (l == "mcs") return RankOrder::Mcs;
    throw std::invalid_argument("unknown order '" + std::string(s) + "'");
}

// ------------------------------------------------------------- explicit

PermanentResult permBruteForce(const Matrix01& m, const RunLimits& limits) {
    const int n = m.size();
    if (n > limits.bruteForceMaxN || n > 20)
        throw LimitError("brute force is limited to n <= " + std::to_string(std::min(limits.bruteForceMaxN, 20)));
    const auto start = Clock::now();
    const auto deadline = deadlineFrom(limits, start);
    checkDeadline(deadline);

    std::vector<std::vector<int>> support(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) support[i] = m.rowSupport(i);

    std::uint64_t count = 0;
    std::uint64_t steps = 0;
    auto extend = [&](auto&& self, int row, std::uint32_t used) -> void {
        if (row == n) {
            ++count;
            return;
        }
        if ((++steps & 0xfffff) == 0) checkDeadline(deadline);
        for (int j : support[row])
            if (!(used & (1u << j))) self(self, row + 1, used | (1u << j));
    };
    extend(extend, 0, 0);

    PermanentResult r;
    r.value = BigInt(std::to_string(count));
    r.algorithm = Algorithm::BruteForce;
    r.stats.wallTimeMillis = millisSince(start);
    return r;
}

namespace {

// Multiplies signed factors, batching them in 64-bit words before touching GMP.
void productInto(BigInt& out, const std::vector<long>& factors) {
    out = 1;
    bool negative = false;
    std::uint64_t acc = 1;
    for (long f : factors) {
        if (f == 0) {
            out = 0;
            return;
        }
        const auto mag = static_cast<std::uint64_t>(f < 0 ? -f : f);
        if (f < 0) negative = !negative;
        if (acc > std::numeric_limits<std::uint64_t>::max() / mag) {
            mpz_mul_ui(out.get_mpz_t(), out.get_mpz_t(), static_cast<unsigned long>(acc));
            acc = 1;
        }
        acc *= mag;
    }
    mpz_mul_ui(out.get_mpz_t(), out.get_mpz_t(), static_cast<unsigned long>(acc));
    if (negative) out = -out;
}

}  // namespace

PermanentResult permRyserGray(const Matrix01& m, const RunLimits& limits, bool nijenhuisWilf) {
    const int n = m.size();
    if (n > limits.ryserMaxN || n > 62)
        throw LimitError("explicit Ryser is limited to n <= " + std::to_string(std::min(limits.ryserMaxN, 62)));
    const auto start = Clock::now();
    const auto deadline = deadlineFrom(limits, start);
    checkDeadline(deadline);

    // Columns iterated by the Gray code; the NW variant fixes the last column.
    const int cols = nijenhuisWilf ? n - 1 : n;
    std::vector<long> rowValue(static_cast<std::size_t>(n), 0);
    long step = 1;
    if (nijenhuisWilf) {
        // Doubled values: 2 * (a_{i,n} - rowsum_i / 2) = 2 a_{i,n} - rowsum_i.
        for (int i = 0; i < n; ++i)
            rowValue[i] = 2 * static_cast<long>(m.at(i, n - 1)) - static_cast<long>(m.rowSupport(i).size());
        step = 2;
    }
    std::vector<std::vector<long>> column(static_cast<std::size_t>(std::max(cols, 0)));
    for (int j = 0; j < cols; ++j) {
        column[j].resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) column[j][i] = m.at(i, j) ? step : 0;
    }

    BigInt total = 0;
    BigInt term;
    int zeroRows = static_cast<int>(std::count(rowValue.begin(), rowValue.end(), 0L));
    if (nijenhuisWilf && zeroRows == 0) {
        productInto(term, rowValue);  // empty subset
        total += term;
    }

    const std::uint64_t subsets = std::uint64_t{1} << cols;
    std::uint64_t gray = 0;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        if ((k & 0xffff) == 0) checkDeadline(deadline);
        const int j = std::countr_zero(k);
        gray ^= std::uint64_t{1} << j;
        const bool added = (gray >> j) & 1;
        const auto& col = column[j];
        for (int i = 0; i < n; ++i) {
            if (col[i] == 0) continue;
            const long before = rowValue[i];
            rowValue[i] += added ? col[i] : -col[i];
            zeroRows += (rowValue[i] == 0) - (before == 0);
        }
        if (zeroRows != 0) continue;
        productInto(term, rowValue);
        if (std::popcount(gray) & 1)
            total -= term;
        else
            total += term;
    }

    PermanentResult r;
    r.algorithm = Algorithm::RyserGray;
    if (nijenhuisWilf) {
        // perm = (-1)^(n-1) * 2 * sum / 2^n
        mpz_tdiv_q_2exp(total.get_mpz_t(), total.get_mpz_t(), static_cast<mp_bitcnt_t>(n - 1));
        r.value = signFor(n - 1) * total;
    } else {
        r.value = signFor(n) * total;
    }
    r.stats.wallTimeMillis = millisSince(start);
    return r;
}

BigInt permIdenticalRows(int n, int k) {
    if (n < 1 || k < 0 || k > n) throw std::invalid_argument("permIdenticalRows requires 0 <= k <= n, n >= 1");
    BigInt total = 0, a, b, p;
    for (int j = 0; j <= k; ++j) {
        mpz_bin_uiui(a.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(j));
        mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(j), static_cast<unsigned long>(n));
        for (int r = j; r <= n - k + j; ++r) {
            mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n - k), static_cast<unsigned long>(r - j));
            BigInt t = a * b * p;
            if (r % 2) total -= t;
            else total += t;
        }
    }
    return signFor(n) * total;
}

// ------------------------------------------------------------- symbolic

Add buildRowSumAdd(AddManager& mgr, const Matrix01& m, int row) {
    if (row < 0 || row >= m.size()) throw std::out_of_range("row index out of range");
    std::vector<int> support = m.rowSupport(row);
    const VariableOrder& order = mgr.order();
    std::sort(support.begin(), support.end(), [&](int a, int b) { return order.levelOf(a) < order.levelOf(b); });
    Add f = mgr.zero();
    for (int j : support) f = mgr.sum(f, mgr.variable(j));
    return f;
}

Add buildParityAdd(AddManager& mgr, int n) {
    if (n < 1) throw std::invalid_argument("parity ADD needs at least one variable");
    std::vector<int> vars(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) vars[j] = j;
    return mgr.ite(mgr.xorAll(vars), mgr.constant(-1), mgr.constant(1));
}

Add buildRowSumProductAdd(AddManager& mgr, const Matrix01& m, std::size_t* peakNodes) {
    Add f = mgr.one();
    std::size_t peak = mgr.nodeCount(f).total();
    for (int i = 0; i < m.size(); ++i) {
        f = mgr.product(f, buildRowSumAdd(mgr, m, i));
        peak = std::max(peak, mgr.nodeCount(f).total());
    }
    if (peakNodes) *peakNodes = peak;
    return f;
}

PermanentResult permMonolithic(const Matrix01& m, const RunLimits& limits) {
    const auto start = Clock::now();
    const int n = m.size();
    PermanentResult r;
    r.algorithm = Algorithm::Monolithic;
    if (m.hasZeroRow() || m.hasZeroColumn()) {
        r.value = 0;
        r.stats.wallTimeMillis = millisSince(start);
        return r;
    }

    AddManager mgr(VariableOrder::identity(n));
    mgr.setNodeBudget(limits.nodeBudget);
    mgr.setDeadline(deadlineFrom(limits, start));
    mgr.checkDeadline();

    std::size_t peak = 0;
    const Add rsp = buildRowSumProductAdd(mgr, m, &peak);
    Add ryser = mgr.product(rsp, buildParityAdd(mgr, n));
    peak = std::max(peak, mgr.nodeCount(ryser).total());

    std::vector<int> all(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) all[j] = j;
    ryser = abstractVars(mgr, ryser, all);

    r.value = signFor(n) * mgr.constantValue(ryser);
    if (r.value < 0) throw InternalError("negative permanent from monolithic Ryser");
    r.stats.peakAddNodes = peak;
    r.stats.totalAddNodesCreated = mgr.stats().totalCreated;
    r.stats.clustersProcessed = 1;
    r.stats.wallTimeMillis = millisSince(start);
    return r;
}

VariableOrder mcsOrder(const AdjacencyList& graph) {
    const int n = static_cast<int>(graph.size());
    std::vector<int> weight(static_cast<std::size_t>(n), 0);
    std::vector<bool> numbered(static_cast<std::size_t>(n), false);
    std::vector<int> sequence;
    sequence.reserve(static_cast<std::size_t>(n));
    for (int step = 0; step < n; ++step) {
        int best = -1;
        for (int v = 0; v < n; ++v)
            if (!numbered[v] && (best < 0 || weight[v] > weight[best])) best = v;
        numbered[best] = true;
        sequence.push_back(best);
        for (int u : graph[best])
            if (!numbered[u]) ++weight[u];
    }
    return VariableOrder::fromSequence(std::move(sequence));
}

int clusterRank(int row, const Matrix01& m, const VariableOrder& eta, ClusterHeuristic h) {
    if (h == ClusterHeuristic::Monolithic) return 1;
    const auto support = m.rowSupport(row);
    if (support.empty()) throw std::invalid_argument("cluster rank of an all-zero row is undefined");
    int lo = std::numeric_limits<int>::max();
    int hi = 0;
    for (int j : support) {
        const int rank = eta.levelOf(j) + 1;
        lo = std::min(lo, rank);
        hi = std::max(hi, rank);
    }
    return h == ClusterHeuristic::BucketElimination ? lo : hi;
}

ClusterPlan planClusters(const Matrix01& m, const VariableOrder& eta, ClusterHeuristic h) {
    if (eta.size() != m.size()) throw std::invalid_argument("cluster rank-order does not match the matrix size");
    ClusterPlan plan;
    plan.eta = eta;
    plan.heuristic = h;
    const int clusters = h == ClusterHeuristic::Monolithic ? 1 : eta.size();
    plan.clusters.resize(static_cast<std::size_t>(clusters));
    for (int i = 0; i < m.size(); ++i) plan.clusters[clusterRank(i, m, eta, h) - 1].push_back(i);
    return plan;
}

PermanentResult permEarlyAbstraction(const Matrix01& m, const VariableOrder& pi, const VariableOrder& eta,
                                     ClusterHeuristic h, const RunLimits& limits) {
    const auto start = Clock::now();
    const int n = m.size();
    if (pi.size() != n) throw std::invalid_argument("diagram order does not match the matrix size");
    PermanentResult r;
    r.algorithm = Algorithm::EarlyAbstraction;
    r.heuristic = h;
    if (m.hasZeroRow() || m.hasZeroColumn()) {
        r.value = 0;
        r.stats.wallTimeMillis = millisSince(start);
        return r;
    }

    AddManager mgr(pi);
    mgr.setNodeBudget(limits.nodeBudget);
    mgr.setDeadline(deadlineFrom(limits, start));
    mgr.checkDeadline();

    const ClusterPlan plan = planClusters(m, eta, h);
    const int clusterCount = plan.count();

    // lastCluster[x]: highest cluster rank whose rows mention x (0 if none), so x
    // is outside Vars of every later cluster once cluster lastCluster[x] is done.
    std::vector<int> lastCluster(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<Add>> kappa(static_cast<std::size_t>(clusterCount));
    for (int c = 0; c < clusterCount; ++c) {
        for (int row : plan.clusters[c]) {
            kappa[c].push_back(buildRowSumAdd(mgr, m, row));
            for (int j : m.rowSupport(row)) lastCluster[j] = std::max(lastCluster[j], c + 1);
        }
    }

    Add ryser = buildParityAdd(mgr, n);
    // Variables of the function ryser is defined over; starts as all of X.
    std::vector<bool> inScope(static_cast<std::size_t>(n), true);
    std::size_t peak = mgr.nodeCount(ryser).total();

    for (int c = 1; c <= clusterCount; ++c) {
        const auto& cluster = kappa[c - 1];
        if (cluster.empty()) continue;
        for (const Add& g : cluster) {
            ryser = mgr.product(ryser, g);
            peak = std::max(peak, mgr.nodeCount(ryser).total());
        }
        std::vector<int> done;
        for (int x = 0; x < n; ++x)
            if (inScope[x] && lastCluster[x] <= c) done.push_back(x);
        ryser = abstractVars(mgr, ryser, done);
        for (int x : done) inScope[x] = false;
        peak = std::max(peak, mgr.nodeCount(ryser).total());
        ++r.stats.clustersProcessed;
    }

    for (int x = 0; x < n; ++x)
        if (inScope[x]) throw InternalError("variable x" + std::to_string(x + 1) + " was never abstracted");

    r.value = signFor(n) * mgr.constantValue(ryser);
    if (r.value < 0) throw InternalError("negative permanent from early-abstraction Ryser");
    r.stats.peakAddNodes = peak;
    r.stats.totalAddNodesCreated = mgr.stats().totalCreated;
    r.stats.wallTimeMillis = millisSince(start);
    return r;
}

PermConfig defaultConfigFor(Family family) {
    PermConfig c;
    c.algorithm = Algorithm::EarlyAbstraction;
    if (family == Family::Sparse) {
        c.heuristic = ClusterHeuristic::BouquetList;
        c.rankOrder = RankOrder::Mcs;
    } else {
        c.heuristic = ClusterHeuristic::Monolithic;
        c.rankOrder = RankOrder::Index;
    }
    return c;
}

PermanentResult perm(const Matrix01& m, const PermConfig& config) {
    if (config.limits.timeout && config.limits.timeout->count() <= 0.0)
        throw TimeoutError("permanent computation exceeded its deadline");
    if (!hasPerfectMatching(m)) {
        PermanentResult r;
        r.value = 0;
        r.algorithm = config.algorithm;
        if (config.algorithm == Algorithm::EarlyAbstraction) r.heuristic = config.heuristic;
        return r;
    }
    switch (config.algorithm) {
        case Algorithm::BruteForce: return permBruteForce(m, config.limits);
        case Algorithm::RyserGray: return permRyserGray(m, config.limits, config.nijenhuisWilf);
        case Algorithm::Monolithic: return permMonolithic(m, config.limits);
        case Algorithm::EarlyAbstraction: {
            const VariableOrder eta = config.rankOrder == RankOrder::Mcs ? mcsOrder(primalGraph(m))
                                                                          : VariableOrder::identity(m.size());
            return permEarlyAbstraction(m, VariableOrder::identity(m.size()), eta, config.heuristic, config.limits);
        }
    }
    throw InternalError("unhandled algorithm");
}

}  // namespace addperm
