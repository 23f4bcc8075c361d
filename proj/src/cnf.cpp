#include "addperm/cnf.hpp"

#include <cctype>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "addperm/errors.hpp"

namespace addperm {

namespace {

void exactlyOne(CnfFormula& f, const std::vector<int>& vars) {
    if (vars.empty()) {
        if (f.contradictionVar == 0) f.contradictionVar = ++f.numVars;
        f.clauses.push_back({f.contradictionVar});
        f.clauses.push_back({-f.contradictionVar});
        return;
    }
    f.clauses.push_back(vars);
    for (std::size_t a = 0; a < vars.size(); ++a)
        for (std::size_t b = a + 1; b < vars.size(); ++b) f.clauses.push_back({-vars[a], -vars[b]});
}

}  // namespace

CnfFormula encodePermanent(const Matrix01& m) {
    CnfFormula f;
    const int n = m.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (m.at(i, j)) f.varMap[{i, j}] = ++f.numVars;

    auto var = [&](int i, int j) { return f.varMap.at({i, j}); };
    for (int i = 0; i < n; ++i) {
        std::vector<int> vars;
        for (int j : m.rowSupport(i)) vars.push_back(var(i, j));
        exactlyOne(f, vars);
    }
    for (int j = 0; j < n; ++j) {
        std::vector<int> vars;
        for (int i : m.columnSupport(j)) vars.push_back(var(i, j));
        exactlyOne(f, vars);
    }
    return f;
}

void writeDimacs(const CnfFormula& f, std::ostream& out) {
    out << "c perfect matchings: exactly one per row and column, pairwise at-most-one\n";
    if (f.contradictionVar != 0)
        out << "c empty row or column support encoded as (" << f.contradictionVar << ") and (-"
            << f.contradictionVar << ")\n";
    for (const auto& [cell, v] : f.varMap) out << "c map " << cell.first + 1 << ' ' << cell.second + 1 << ' ' << v << '\n';
    out << "p cnf " << f.numVars << ' ' << f.clauses.size() << '\n';
    for (const auto& clause : f.clauses) {
        for (int lit : clause) out << lit << ' ';
        out << "0\n";
    }
}

std::string toDimacs(const CnfFormula& f) {
    std::ostringstream out;
    writeDimacs(f, out);
    return out.str();
}

CnfFormula parseDimacs(std::string_view text) {
    CnfFormula f;
    bool header = false;
    std::size_t declaredClauses = 0;
    std::vector<int> pending;
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(pos, end - pos));
        pos = end + 1;
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) {
            if (end == text.size()) break;
            continue;
        }
        if (first == "c") {
            std::string tag;
            if (ls >> tag && tag == "map") {
                int i = 0, j = 0, v = 0;
                if (!(ls >> i >> j >> v) || i < 1 || j < 1 || v < 1) throw ParseError("malformed map comment", lineNo);
                f.varMap[{i - 1, j - 1}] = v;
            }
        } else if (first == "p") {
            std::string kind;
            long vars = -1, clauses = -1;
            if (header) throw ParseError("duplicate problem line", lineNo);
            if (!(ls >> kind >> vars >> clauses) || kind != "cnf" || vars < 0 || clauses < 0)
                throw ParseError("malformed problem line", lineNo);
            header = true;
            f.numVars = static_cast<int>(vars);
            declaredClauses = static_cast<std::size_t>(clauses);
        } else {
            if (!header) throw ParseError("clause before problem line", lineNo);
            std::istringstream cs(line);
            long lit = 0;
            while (cs >> lit) {
                if (lit == 0) {
                    f.clauses.push_back(pending);
                    pending.clear();
                } else {
                    if (std::labs(lit) > f.numVars) throw ParseError("literal exceeds declared variable count", lineNo);
                    pending.push_back(static_cast<int>(lit));
                }
            }
            if (!cs.eof()) throw ParseError("non-integer token in clause", lineNo);
        }
        if (end == text.size()) break;
    }
    if (!header) throw ParseError("missing problem line");
    if (!pending.empty()) throw ParseError("last clause is not 0-terminated", lineNo);
    if (f.clauses.size() != declaredClauses)
        throw ParseError("declared " + std::to_string(declaredClauses) + " clauses, found " +
                         std::to_string(f.clauses.size()));
    return f;
}

}  // namespace addperm
