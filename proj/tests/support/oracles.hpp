#pragma once

// Independent reference computations for tests. Nothing here calls into the
// permanent algorithms or the CNF encoder; each oracle works from first principles.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "addperm/matrix.hpp"

namespace oracle {

/// Sum over all n! permutations via std::next_permutation.
inline std::uint64_t permanentByPermutations(const addperm::Matrix01& m) {
    const int n = m.size();
    std::vector<int> sigma(static_cast<std::size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    std::uint64_t total = 0;
    do {
        bool all = true;
        for (int i = 0; i < n && all; ++i) all = m.at(i, sigma[i]);
        total += all ? 1 : 0;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return total;
}

/// Ryser's inclusion-exclusion over all 2^n column subsets in plain counting order.
inline mpz_class permanentByRyserSubsets(const addperm::Matrix01& m) {
    const int n = m.size();
    mpz_class total = 0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        mpz_class prod = 1;
        for (int i = 0; i < n; ++i) {
            long rs = 0;
            for (int j = 0; j < n; ++j)
                if ((s >> j) & 1) rs += m.at(i, j);
            prod *= rs;
        }
        if (__builtin_popcountll(s) % 2) total -= prod;
        else total += prod;
    }
    return (n % 2 ? -1 : 1) * total;
}

/// Matrix with each entry 1 with probability `density`.
inline addperm::Matrix01 randomMatrix(std::mt19937_64& rng, int n, double density) {
    std::bernoulli_distribution bit(density);
    addperm::Matrix01 m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.set(i, j, bit(rng));
    return m;
}

// ------------------------------------------------------------------ DIMACS

struct Dimacs {
    int vars = 0;
    std::vector<std::vector<int>> clauses;
};

/// Minimal reader written separately from the library's DIMACS parser.
inline Dimacs readDimacs(const std::string& text) {
    Dimacs d;
    std::istringstream in(text);
    std::string line;
    std::size_t declared = 0;
    std::vector<int> cur;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        if (line[0] == 'p') {
            std::string p, cnf;
            ls >> p >> cnf >> d.vars >> declared;
            continue;
        }
        int lit;
        while (ls >> lit) {
            if (lit == 0) {
                d.clauses.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(lit);
            }
        }
    }
    if (d.clauses.size() != declared) throw std::runtime_error("clause count mismatch in DIMACS");
    return d;
}

/// Exhaustive model enumeration with unit propagation pruning: every
/// assignment is either counted or refuted by a falsified clause.
inline std::uint64_t countModels(const Dimacs& d) {
    std::vector<int> value(static_cast<std::size_t>(d.vars) + 1, 0);  // 0 unassigned, 1 true, -1 false

    auto litValue = [&](int lit) {
        int v = value[static_cast<std::size_t>(std::abs(lit))];
        return lit > 0 ? v : -v;
    };

    auto recurse = [&](auto&& self) -> std::uint64_t {
        std::vector<int> trail;
        auto undo = [&] {
            for (int v : trail) value[v] = 0;
        };
        // Unit propagation to a fixed point.
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& clause : d.clauses) {
                int unassigned = 0, last = 0;
                bool sat = false;
                for (int lit : clause) {
                    int lv = litValue(lit);
                    if (lv == 1) {
                        sat = true;
                        break;
                    }
                    if (lv == 0) {
                        ++unassigned;
                        last = lit;
                    }
                }
                if (sat) continue;
                if (unassigned == 0) {
                    undo();
                    return 0;
                }
                if (unassigned == 1) {
                    value[static_cast<std::size_t>(std::abs(last))] = last > 0 ? 1 : -1;
                    trail.push_back(std::abs(last));
                    changed = true;
                }
            }
        }
        int branch = 0;
        for (const auto& clause : d.clauses) {
            bool sat = false;
            int free = 0;
            for (int lit : clause) {
                if (litValue(lit) == 1) sat = true;
                if (litValue(lit) == 0 && free == 0) free = std::abs(lit);
            }
            if (!sat) {
                branch = free;
                break;
            }
        }
        std::uint64_t result;
        if (branch == 0) {
            int freeVars = 0;
            for (int v = 1; v <= d.vars; ++v) freeVars += value[v] == 0;
            result = std::uint64_t{1} << freeVars;
        } else {
            value[branch] = 1;
            result = self(self);
            value[branch] = -1;
            result += self(self);
            value[branch] = 0;
        }
        undo();
        return result;
    };
    return recurse(recurse);
}

/// Plain 2^vars enumeration, for formulas small enough to afford it.
inline std::uint64_t countModelsBruteForce(const Dimacs& d) {
    if (d.vars > 24) throw std::invalid_argument("too many variables for plain enumeration");
    std::uint64_t count = 0;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << d.vars); ++a) {
        bool ok = true;
        for (const auto& clause : d.clauses) {
            bool sat = false;
            for (int lit : clause) {
                bool bit = (a >> (std::abs(lit) - 1)) & 1;
                if ((lit > 0) == bit) {
                    sat = true;
                    break;
                }
            }
            if (!sat) {
                ok = false;
                break;
            }
        }
        count += ok;
    }
    return count;
}

}  // namespace oracle
