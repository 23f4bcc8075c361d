#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "addperm/matrix.hpp"

namespace addperm {

/// CNF whose models are exactly the perfect matchings of a 0-1 matrix.
struct CnfFormula {
    int numVars = 0;
    std::vector<std::vector<int>> clauses;
    /// 0-based (row, column) of each 1 entry to its 1-based propositional variable.
    std::map<std::pair<int, int>, int> varMap;
    /// Fresh variable carrying the (v), (-v) contradiction, or 0 when unused.
    int contradictionVar = 0;
};

/// Exact-one per row and per column: one at-least-one clause plus pairwise
/// at-most-one clauses. Empty supports become the contradiction pair.
CnfFormula encodePermanent(const Matrix01& m);

/// DIMACS with `c map <i> <j> <var>` comment lines (1-based i, j) before the header.
void writeDimacs(const CnfFormula& f, std::ostream& out);
std::string toDimacs(const CnfFormula& f);

/// Reads DIMACS CNF, including any `c map` lines. Throws ParseError.
CnfFormula parseDimacs(std::string_view text);

}  // namespace addperm
