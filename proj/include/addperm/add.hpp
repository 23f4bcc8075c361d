#pragma once

// Reduced ordered algebraic decision diagrams over arbitrary-precision integers.
//
// Every node lives in one AddManager and is hash-consed: two handles denote the
// same function iff they carry the same node id. Internal nodes store the level
// (position in the diagram order) of their variable, so ordering checks and
// cofactoring never consult the order table.

#include <chrono>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <gmpxx.h>

namespace addperm {

using BigInt = mpz_class;
using NodeId = std::uint32_t;

/// Diagram variable order: vars()[level] is the column variable at that level.
class VariableOrder {
public:
    VariableOrder() = default;
    static VariableOrder identity(int n);
    /// Throws std::invalid_argument unless `vars` is a permutation of 0..n-1.
    static VariableOrder fromSequence(std::vector<int> vars);

    int size() const noexcept { return static_cast<int>(vars_.size()); }
    int varAt(int level) const { return vars_.at(level); }
    int levelOf(int var) const { return level_.at(var); }
    const std::vector<int>& vars() const noexcept { return vars_; }

    friend bool operator==(const VariableOrder&, const VariableOrder&) = default;

private:
    std::vector<int> vars_;
    std::vector<int> level_;
};

class AddManager;

/// Handle to a function 2^X -> Z owned by an AddManager.
class Add {
public:
    Add() = default;
    Add(const AddManager* mgr, NodeId id) : mgr_(mgr), id_(id) {}

    NodeId id() const noexcept { return id_; }
    const AddManager* manager() const noexcept { return mgr_; }

    friend bool operator==(const Add& a, const Add& b) { return a.mgr_ == b.mgr_ && a.id_ == b.id_; }

private:
    const AddManager* mgr_ = nullptr;
    NodeId id_ = 0;
};

struct NodeCount {
    std::size_t internal = 0;
    std::size_t terminal = 0;
    std::size_t total() const noexcept { return internal + terminal; }
    friend bool operator==(const NodeCount&, const NodeCount&) = default;
};

namespace detail {

// Open-addressing hash map from a trivially copyable key to NodeId. No erase.
template <class Key, class Hash>
class FlatMap {
public:
    explicit FlatMap(std::size_t initialCapacity = 1u << 12) { rehash(initialCapacity); }

    const NodeId* find(const Key& k) const {
        std::size_t mask = slots_.size() - 1;
        for (std::size_t i = Hash{}(k) & mask;; i = (i + 1) & mask) {
            const Slot& s = slots_[i];
            if (!s.used) return nullptr;
            if (s.key == k) return &s.value;
        }
    }

    void insert(const Key& k, NodeId v) {
        if ((size_ + 1) * 10 > slots_.size() * 7) rehash(slots_.size() * 2);
        place(k, v);
        ++size_;
    }

    void clear() {
        slots_.assign(1u << 12, Slot{});
        size_ = 0;
    }

    std::size_t size() const noexcept { return size_; }

private:
    struct Slot {
        Key key{};
        NodeId value = 0;
        bool used = false;
    };

    void place(const Key& k, NodeId v) {
        std::size_t mask = slots_.size() - 1;
        std::size_t i = Hash{}(k) & mask;
        while (slots_[i].used) {
            if (slots_[i].key == k) {
                slots_[i].value = v;
                --size_;
                return;
            }
            i = (i + 1) & mask;
        }
        slots_[i] = Slot{k, v, true};
    }

    void rehash(std::size_t capacity) {
        std::vector<Slot> old;
        old.swap(slots_);
        slots_.assign(capacity, Slot{});
        for (const Slot& s : old)
            if (s.used) place(s.key, s.value);
    }

    std::vector<Slot> slots_;
    std::size_t size_ = 0;
};

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

struct NodeKey {
    std::uint32_t level;
    NodeId low;
    NodeId high;
    friend bool operator==(const NodeKey&, const NodeKey&) = default;
};

struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const noexcept {
        return mix64((std::uint64_t{k.level} << 40) ^ (std::uint64_t{k.low} << 20) ^ k.high ^
                     (std::uint64_t{k.high} << 44));
    }
};

struct OpKey {
    std::uint32_t op;
    NodeId a;
    NodeId b;
    NodeId c;
    friend bool operator==(const OpKey&, const OpKey&) = default;
};

struct OpKeyHash {
    std::size_t operator()(const OpKey& k) const noexcept {
        return mix64(mix64((std::uint64_t{k.op} << 32) | k.a) ^ ((std::uint64_t{k.b} << 32) | k.c));
    }
};

struct BigIntHash {
    std::size_t operator()(const BigInt& v) const noexcept;
};

}  // namespace detail

/// Live counters of a manager. Without intra-instance collection, live == peak.
struct ManagerStats {
    std::size_t liveNodes = 0;
    std::size_t peakNodes = 0;
    std::size_t totalCreated = 0;
    std::size_t cacheLookups = 0;
    std::size_t cacheHits = 0;
};

class AddManager {
public:
    using Clock = std::chrono::steady_clock;

    explicit AddManager(VariableOrder order);
    AddManager(const AddManager&) = delete;
    AddManager& operator=(const AddManager&) = delete;

    const VariableOrder& order() const noexcept { return order_; }
    int numVars() const noexcept { return order_.size(); }

    // Resource limits; checked cooperatively inside the apply recursion.
    void setNodeBudget(std::size_t maxLiveNodes) { nodeBudget_ = maxLiveNodes; }
    void setDeadline(std::optional<Clock::time_point> deadline) { deadline_ = deadline; }
    /// Throws TimeoutError if the deadline has passed.
    void checkDeadline() const;

    Add constant(const BigInt& v);
    Add constant(long v) { return constant(BigInt(v)); }
    Add zero() const { return Add(this, zero_); }
    Add one() const { return Add(this, one_); }
    /// Indicator of column variable `var`. Throws std::out_of_range for unknown vars.
    Add variable(int var);

    Add sum(Add f, Add g);
    Add product(Add f, Add g);
    /// c * g + (1 - c) * h. Throws std::invalid_argument if c is not 0/1-valued.
    Add ite(Add c, Add g, Add h);
    /// Additive quantification f|x=0 + f|x=1; doubles f when x is not in its support.
    Add abstractSum(Add f, int var);
    /// 0/1 ADD of the exclusive-or of distinct variables, combined as a balanced tree.
    Add xorAll(std::span<const int> vars);
    Add xorAll(std::initializer_list<int> vars) { return xorAll(std::span<const int>(vars.begin(), vars.size())); }

    /// `assignment[var]` true means var is in tau.
    BigInt evaluate(Add f, const std::vector<bool>& assignment) const;
    /// Evaluate with tau given as the set of true variables.
    BigInt evaluateSet(Add f, std::initializer_list<int> tau) const;
    BigInt evaluateSet(Add f, std::span<const int> tau) const;

    NodeCount nodeCount(Add f) const;
    /// Variables f depends on, ascending by level.
    std::vector<int> support(Add f) const;
    /// Distinct terminal values reachable from f, ascending.
    std::vector<BigInt> terminalValues(Add f) const;
    /// Value of a single-terminal diagram. Throws InternalError otherwise.
    const BigInt& constantValue(Add f) const;

    /// Graphviz dump: solid edges are the true branch, dotted edges the false branch.
    void writeDot(std::ostream& out, Add f) const;

    // Raw node access for structural checks.
    bool isTerminal(NodeId id) const { return nodes_[id].level == kTerminalLevel; }
    int levelOf(NodeId id) const { return static_cast<int>(nodes_[id].level); }
    NodeId low(NodeId id) const { return nodes_[id].low; }
    NodeId high(NodeId id) const { return nodes_[id].high; }
    const BigInt& value(NodeId id) const { return values_[nodes_[id].low]; }

    ManagerStats stats() const;
    /// Drops every node and cache entry; previously returned handles become invalid.
    void reset();

private:
    static constexpr std::uint32_t kTerminalLevel = 0xffffffffu;

    enum Op : std::uint32_t { kSum = 1, kProduct, kXor, kIte, kAbstract, kNot };

    struct Node {
        std::uint32_t level;
        NodeId low;   // value index for terminals
        NodeId high;
    };

    NodeId makeTerminal(const BigInt& v);
    NodeId makeNode(std::uint32_t level, NodeId low, NodeId high);
    void requireOwned(Add f) const;

    NodeId applyBinary(Op op, NodeId f, NodeId g);
    NodeId applyIte(NodeId c, NodeId g, NodeId h);
    NodeId applyAbstract(NodeId f, std::uint32_t level);
    NodeId xorRange(std::span<const int> vars);

    const NodeId* cacheFind(const detail::OpKey& k);
    void tick();

    VariableOrder order_;
    std::vector<Node> nodes_;
    std::vector<BigInt> values_;
    detail::FlatMap<detail::NodeKey, detail::NodeKeyHash> unique_;
    std::unordered_map<BigInt, NodeId, detail::BigIntHash> terminals_;
    detail::FlatMap<detail::OpKey, detail::OpKeyHash> cache_;
    NodeId zero_ = 0;
    NodeId one_ = 0;

    std::size_t nodeBudget_ = 50'000'000;
    std::optional<Clock::time_point> deadline_;
    std::size_t peak_ = 0;
    std::size_t totalCreated_ = 0;
    std::size_t lookups_ = 0;
    std::size_t hits_ = 0;
};

}  // namespace addperm
