#include "addperm/add.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "addperm/errors.hpp"

namespace addperm {

VariableOrder VariableOrder::identity(int n) {
    std::vector<int> vars(static_cast<std::size_t>(n));
    std::iota(vars.begin(), vars.end(), 0);
    return fromSequence(std::move(vars));
}

VariableOrder VariableOrder::fromSequence(std::vector<int> vars) {
    VariableOrder o;
    const int n = static_cast<int>(vars.size());
    o.level_.assign(vars.size(), -1);
    for (int level = 0; level < n; ++level) {
        int v = vars[level];
        if (v < 0 || v >= n || o.level_[v] != -1)
            throw std::invalid_argument("variable order is not a permutation of 0.." + std::to_string(n - 1));
        o.level_[v] = level;
    }
    o.vars_ = std::move(vars);
    return o;
}

std::size_t detail::BigIntHash::operator()(const BigInt& v) const noexcept {
    const __mpz_struct* z = v.get_mpz_t();
    std::uint64_t h = static_cast<std::uint64_t>(z->_mp_size);
    const int limbs = std::abs(z->_mp_size);
    for (int i = 0; i < limbs; ++i) h = mix64(h ^ static_cast<std::uint64_t>(z->_mp_d[i]));
    return mix64(h);
}

AddManager::AddManager(VariableOrder order) : order_(std::move(order)) {
    zero_ = makeTerminal(0);
    one_ = makeTerminal(1);
}

void AddManager::reset() {
    nodes_.clear();
    values_.clear();
    unique_.clear();
    terminals_.clear();
    cache_.clear();
    peak_ = totalCreated_ = lookups_ = hits_ = 0;
    zero_ = makeTerminal(0);
    one_ = makeTerminal(1);
}

ManagerStats AddManager::stats() const {
    return ManagerStats{nodes_.size(), peak_, totalCreated_, lookups_, hits_};
}

void AddManager::checkDeadline() const {
    if (deadline_ && Clock::now() >= *deadline_) throw TimeoutError("ADD computation exceeded its deadline");
}

void AddManager::tick() {
    if ((++lookups_ & 0xffff) == 0) checkDeadline();
}

const NodeId* AddManager::cacheFind(const detail::OpKey& k) {
    tick();
    const NodeId* r = cache_.find(k);
    if (r) ++hits_;
    return r;
}

void AddManager::requireOwned(Add f) const {
    if (f.manager() != this || f.id() >= nodes_.size())
        throw std::invalid_argument("ADD handle does not belong to this manager");
}

NodeId AddManager::makeTerminal(const BigInt& v) {
    if (auto it = terminals_.find(v); it != terminals_.end()) return it->second;
    if (nodes_.size() >= nodeBudget_)
        throw NodeBudgetError("ADD node budget of " + std::to_string(nodeBudget_) + " nodes exceeded");
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(Node{kTerminalLevel, static_cast<NodeId>(values_.size()), 0});
    values_.push_back(v);
    terminals_.emplace(v, id);
    ++totalCreated_;
    peak_ = std::max(peak_, nodes_.size());
    return id;
}

NodeId AddManager::makeNode(std::uint32_t level, NodeId low, NodeId high) {
    if (low == high) return low;
    const detail::NodeKey key{level, low, high};
    if (const NodeId* found = unique_.find(key)) return *found;
    if (nodes_.size() >= nodeBudget_)
        throw NodeBudgetError("ADD node budget of " + std::to_string(nodeBudget_) + " nodes exceeded");
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(Node{level, low, high});
    unique_.insert(key, id);
    ++totalCreated_;
    peak_ = std::max(peak_, nodes_.size());
    return id;
}

Add AddManager::constant(const BigInt& v) { return Add(this, makeTerminal(v)); }

Add AddManager::variable(int var) {
    if (var < 0 || var >= numVars()) throw std::out_of_range("unknown variable x" + std::to_string(var + 1));
    return Add(this, makeNode(static_cast<std::uint32_t>(order_.levelOf(var)), zero_, one_));
}

NodeId AddManager::applyBinary(Op op, NodeId f, NodeId g) {
    const bool fTerm = isTerminal(f);
    const bool gTerm = isTerminal(g);
    switch (op) {
        case kSum:
            if (f == zero_) return g;
            if (g == zero_) return f;
            if (fTerm && gTerm) return makeTerminal(value(f) + value(g));
            break;
        case kProduct:
            if (f == zero_ || g == zero_) return zero_;
            if (f == one_) return g;
            if (g == one_) return f;
            if (fTerm && gTerm) return makeTerminal(value(f) * value(g));
            break;
        case kXor:
            if (f == zero_) return g;
            if (g == zero_) return f;
            if (f == g) return zero_;
            if (fTerm && gTerm) return makeTerminal(value(f) != value(g) ? 1 : 0);
            break;
        default:
            throw InternalError("applyBinary called with a non-binary operation");
    }
    if (f > g) std::swap(f, g);  // all binary ops here are commutative
    const detail::OpKey key{op, f, g, 0};
    if (const NodeId* hit = cacheFind(key)) return *hit;

    const std::uint32_t lf = nodes_[f].level;
    const std::uint32_t lg = nodes_[g].level;
    const std::uint32_t top = std::min(lf, lg);
    const NodeId f0 = lf == top ? nodes_[f].low : f;
    const NodeId f1 = lf == top ? nodes_[f].high : f;
    const NodeId g0 = lg == top ? nodes_[g].low : g;
    const NodeId g1 = lg == top ? nodes_[g].high : g;
    const NodeId lo = applyBinary(op, f0, g0);
    const NodeId hi = applyBinary(op, f1, g1);
    const NodeId r = makeNode(top, lo, hi);
    cache_.insert(key, r);
    return r;
}

Add AddManager::sum(Add f, Add g) {
    requireOwned(f);
    requireOwned(g);
    return Add(this, applyBinary(kSum, f.id(), g.id()));
}

Add AddManager::product(Add f, Add g) {
    requireOwned(f);
    requireOwned(g);
    return Add(this, applyBinary(kProduct, f.id(), g.id()));
}

NodeId AddManager::applyIte(NodeId c, NodeId g, NodeId h) {
    if (c == one_) return g;
    if (c == zero_) return h;
    if (g == h) return g;
    const detail::OpKey key{kIte, c, g, h};
    if (const NodeId* hit = cacheFind(key)) return *hit;

    const std::uint32_t top = std::min({nodes_[c].level, nodes_[g].level, nodes_[h].level});
    auto cof = [&](NodeId x, bool hiBranch) {
        if (nodes_[x].level != top) return x;
        return hiBranch ? nodes_[x].high : nodes_[x].low;
    };
    const NodeId lo = applyIte(cof(c, false), cof(g, false), cof(h, false));
    const NodeId hi = applyIte(cof(c, true), cof(g, true), cof(h, true));
    const NodeId r = makeNode(top, lo, hi);
    cache_.insert(key, r);
    return r;
}

Add AddManager::ite(Add c, Add g, Add h) {
    requireOwned(c);
    requireOwned(g);
    requireOwned(h);
    for (const BigInt& v : terminalValues(c))
        if (v != 0 && v != 1) throw std::invalid_argument("ite condition has a terminal outside {0,1}");
    return Add(this, applyIte(c.id(), g.id(), h.id()));
}

NodeId AddManager::applyAbstract(NodeId f, std::uint32_t level) {
    const std::uint32_t lf = nodes_[f].level;
    if (lf > level) return applyBinary(kSum, f, f);  // includes terminals
    if (lf == level) return applyBinary(kSum, nodes_[f].low, nodes_[f].high);

    const detail::OpKey key{kAbstract, f, level, 0};
    if (const NodeId* hit = cacheFind(key)) return *hit;
    const NodeId lo = applyAbstract(nodes_[f].low, level);
    const NodeId hi = applyAbstract(nodes_[f].high, level);
    const NodeId r = makeNode(lf, lo, hi);
    cache_.insert(key, r);
    return r;
}

Add AddManager::abstractSum(Add f, int var) {
    requireOwned(f);
    if (var < 0 || var >= numVars()) throw std::out_of_range("unknown variable x" + std::to_string(var + 1));
    return Add(this, applyAbstract(f.id(), static_cast<std::uint32_t>(order_.levelOf(var))));
}

NodeId AddManager::xorRange(std::span<const int> vars) {
    if (vars.size() == 1) return makeNode(static_cast<std::uint32_t>(order_.levelOf(vars[0])), zero_, one_);
    const std::size_t half = vars.size() / 2;
    const NodeId left = xorRange(vars.first(half));
    const NodeId right = xorRange(vars.subspan(half));
    return applyBinary(kXor, left, right);
}

Add AddManager::xorAll(std::span<const int> vars) {
    if (vars.empty()) throw std::invalid_argument("xorAll needs at least one variable");
    std::vector<bool> seen(static_cast<std::size_t>(numVars()), false);
    for (int v : vars) {
        if (v < 0 || v >= numVars()) throw std::out_of_range("unknown variable x" + std::to_string(v + 1));
        if (seen[v]) throw std::invalid_argument("duplicate variable x" + std::to_string(v + 1) + " in xorAll");
        seen[v] = true;
    }
    return Add(this, xorRange(vars));
}

BigInt AddManager::evaluate(Add f, const std::vector<bool>& assignment) const {
    requireOwned(f);
    NodeId cur = f.id();
    while (!isTerminal(cur)) {
        const int var = order_.varAt(levelOf(cur));
        const bool bit = static_cast<std::size_t>(var) < assignment.size() && assignment[var];
        cur = bit ? high(cur) : low(cur);
    }
    return value(cur);
}

BigInt AddManager::evaluateSet(Add f, std::span<const int> tau) const {
    std::vector<bool> assignment(static_cast<std::size_t>(numVars()), false);
    for (int v : tau) assignment.at(static_cast<std::size_t>(v)) = true;
    return evaluate(f, assignment);
}

BigInt AddManager::evaluateSet(Add f, std::initializer_list<int> tau) const {
    return evaluateSet(f, std::span<const int>(tau.begin(), tau.size()));
}

namespace {

template <class Visit>
void forEachReachable(const AddManager& mgr, NodeId root, Visit&& visit) {
    std::unordered_set<NodeId> seen;
    std::vector<NodeId> stack{root};
    seen.insert(root);
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        visit(id);
        if (mgr.isTerminal(id)) continue;
        for (NodeId child : {mgr.low(id), mgr.high(id)})
            if (seen.insert(child).second) stack.push_back(child);
    }
}

}  // namespace

NodeCount AddManager::nodeCount(Add f) const {
    requireOwned(f);
    NodeCount c;
    forEachReachable(*this, f.id(), [&](NodeId id) { ++(isTerminal(id) ? c.terminal : c.internal); });
    return c;
}

std::vector<int> AddManager::support(Add f) const {
    requireOwned(f);
    std::vector<bool> present(static_cast<std::size_t>(numVars()), false);
    forEachReachable(*this, f.id(), [&](NodeId id) {
        if (!isTerminal(id)) present[levelOf(id)] = true;
    });
    std::vector<int> vars;
    for (int level = 0; level < numVars(); ++level)
        if (present[level]) vars.push_back(order_.varAt(level));
    return vars;
}

std::vector<BigInt> AddManager::terminalValues(Add f) const {
    requireOwned(f);
    std::vector<BigInt> out;
    forEachReachable(*this, f.id(), [&](NodeId id) {
        if (isTerminal(id)) out.push_back(value(id));
    });
    std::sort(out.begin(), out.end());
    return out;
}

const BigInt& AddManager::constantValue(Add f) const {
    requireOwned(f);
    if (!isTerminal(f.id())) throw InternalError("diagram is not a single terminal");
    return value(f.id());
}

void AddManager::writeDot(std::ostream& out, Add f) const {
    requireOwned(f);
    out << "digraph add {\n";
    std::vector<NodeId> internal;
    forEachReachable(*this, f.id(), [&](NodeId id) {
        if (isTerminal(id))
            out << "  n" << id << " [shape=box,label=\"" << value(id).get_str() << "\"];\n";
        else
            internal.push_back(id);
    });
    std::sort(internal.begin(), internal.end());
    for (NodeId id : internal) {
        out << "  n" << id << " [label=\"x" << order_.varAt(levelOf(id)) + 1 << "\"];\n";
        out << "  n" << id << " -> n" << low(id) << " [style=dotted,label=0];\n";
        out << "  n" << id << " -> n" << high(id) << " [style=solid,label=1];\n";
    }
    out << "}\n";
}

}  // namespace addperm
