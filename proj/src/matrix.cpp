#include "addperm/matrix.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

#include "addperm/errors.hpp"

namespace addperm {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(line == 0 ? what
                                   : what + " (line " + std::to_string(line) +
                                         (column ? ", column " + std::to_string(column) : std::string()) + ")"),
      line_(line),
      column_(column) {}

Matrix01::Matrix01(int n, std::string source) : n_(n), source_(std::move(source)) {
    if (n < 1) throw std::invalid_argument("matrix dimension must be at least 1");
    cells_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
}

Matrix01 Matrix01::fromRows(const std::vector<std::vector<int>>& rows, std::string source) {
    Matrix01 m(static_cast<int>(rows.size()), std::move(source));
    for (int i = 0; i < m.n_; ++i) {
        if (static_cast<int>(rows[i].size()) != m.n_) throw std::invalid_argument("matrix rows must be square");
        for (int j = 0; j < m.n_; ++j) {
            int v = rows[i][j];
            if (v != 0 && v != 1) throw std::invalid_argument("matrix entries must be 0 or 1");
            m.set(i, j, v == 1);
        }
    }
    return m;
}

Matrix01 Matrix01::allOnes(int n) {
    Matrix01 m(n, "ones:" + std::to_string(n));
    std::fill(m.cells_.begin(), m.cells_.end(), 1);
    return m;
}

Matrix01 Matrix01::identity(int n) {
    Matrix01 m(n, "identity:" + std::to_string(n));
    for (int i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

Matrix01 Matrix01::tridiagonal(int n) {
    Matrix01 m(n, "tridiagonal:" + std::to_string(n));
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 1); ++j) m.set(i, j, true);
    return m;
}

std::size_t Matrix01::index(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) throw std::out_of_range("matrix index out of range");
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
}

std::vector<int> Matrix01::rowSupport(int i) const {
    std::vector<int> s;
    for (int j = 0; j < n_; ++j)
        if (at(i, j)) s.push_back(j);
    return s;
}

std::vector<int> Matrix01::columnSupport(int j) const {
    std::vector<int> s;
    for (int i = 0; i < n_; ++i)
        if (at(i, j)) s.push_back(i);
    return s;
}

std::size_t Matrix01::countOnes() const { return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1)); }

bool Matrix01::hasZeroRow() const {
    for (int i = 0; i < n_; ++i)
        if (rowSupport(i).empty()) return true;
    return false;
}

bool Matrix01::hasZeroColumn() const {
    for (int j = 0; j < n_; ++j)
        if (columnSupport(j).empty()) return true;
    return false;
}

Matrix01 Matrix01::transposed() const {
    Matrix01 t(n_, source_.empty() ? std::string() : source_ + "^T");
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) t.set(j, i, at(i, j));
    return t;
}

Matrix01 Matrix01::permuteColumns(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != n_) throw std::invalid_argument("column permutation has wrong length");
    std::vector<int> check = perm;
    std::sort(check.begin(), check.end());
    for (int j = 0; j < n_; ++j)
        if (check[j] != j) throw std::invalid_argument("column permutation is not a permutation");
    Matrix01 out(n_, source_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) out.set(i, j, at(i, perm[j]));
    return out;
}

// ---------------------------------------------------------------- dense text

namespace {

std::string slurp(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string_view> splitLines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (end == text.size()) break;
        start = end + 1;
    }
    return lines;
}

bool isBlank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// Returns the [first, last) range of non-whitespace characters.
std::pair<std::size_t, std::size_t> trimmedRange(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return {a, b};
}

long parsePositive(std::string_view tok, std::size_t line, std::size_t col, const char* what) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw ParseError(std::string("malformed ") + what + " '" + std::string(tok) + "'", line, col);
    if (tok.size() > 9) throw ParseError(std::string(what) + " is too large", line, col);
    return std::stol(std::string(tok));
}

}  // namespace

Matrix01 parseDense(std::string_view text, std::string source) {
    const auto lines = splitLines(text);
    std::size_t li = 0;
    while (li < lines.size() && isBlank(lines[li])) ++li;
    if (li == lines.size()) throw ParseError("missing matrix dimension", 1, 1);

    auto [a, b] = trimmedRange(lines[li]);
    const long n = parsePositive(lines[li].substr(a, b - a), li + 1, a + 1, "dimension");
    if (n < 1) throw ParseError("matrix dimension must be at least 1", li + 1, a + 1);
    ++li;

    Matrix01 m(static_cast<int>(n), std::move(source));
    int row = 0;
    for (; li < lines.size() && row < n; ++li) {
        if (isBlank(lines[li])) continue;
        auto [s, e] = trimmedRange(lines[li]);
        std::string_view body = lines[li].substr(s, e - s);
        for (std::size_t k = 0; k < body.size(); ++k) {
            if (body[k] != '0' && body[k] != '1')
                throw ParseError(std::string("illegal character '") + body[k] + "'", li + 1, s + k + 1);
        }
        if (static_cast<long>(body.size()) != n)
            throw ParseError("row has " + std::to_string(body.size()) + " entries, expected " + std::to_string(n),
                             li + 1, s + std::min<std::size_t>(body.size(), static_cast<std::size_t>(n)) + 1);
        for (int j = 0; j < n; ++j) m.set(row, j, body[j] == '1');
        ++row;
    }
    if (row < n)
        throw ParseError("expected " + std::to_string(n) + " rows, found " + std::to_string(row), lines.size(), 0);
    for (; li < lines.size(); ++li)
        if (!isBlank(lines[li])) throw ParseError("unexpected content after the last row", li + 1, 1);
    return m;
}

Matrix01 parseDense(std::istream& in, std::string source) { return parseDense(slurp(in), std::move(source)); }

std::string serializeDense(const Matrix01& m) {
    std::string out = std::to_string(m.size()) + "\n";
    out.reserve(out.size() + static_cast<std::size_t>(m.size()) * (m.size() + 1));
    for (int i = 0; i < m.size(); ++i) {
        for (int j = 0; j < m.size(); ++j) out.push_back(m.at(i, j) ? '1' : '0');
        out.push_back('\n');
    }
    return out;
}

// ------------------------------------------------------------- Matrix Market

namespace {

std::string lower(std::string_view s) {
    std::string r(s);
    std::transform(r.begin(), r.end(), r.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return r;
}

std::vector<std::pair<std::string_view, std::size_t>> tokens(std::string_view line) {
    std::vector<std::pair<std::string_view, std::size_t>> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.emplace_back(line.substr(start, i - start), start + 1);
    }
    return out;
}

}  // namespace

Matrix01 parseMatrixMarketPattern(std::string_view text, std::string source) {
    const auto lines = splitLines(text);
    if (lines.empty() || lines[0].rfind("%%MatrixMarket", 0) != 0)
        throw ParseError("missing %%MatrixMarket banner", 1, 1);

    const auto banner = tokens(lines[0]);
    if (banner.size() != 5) throw ParseError("banner must have five fields", 1, 1);
    if (lower(banner[1].first) != "matrix")
        throw ParseError("unsupported object '" + std::string(banner[1].first) + "'", 1, banner[1].second);
    if (lower(banner[2].first) != "coordinate")
        throw ParseError("unsupported format '" + std::string(banner[2].first) + "'", 1, banner[2].second);
    if (lower(banner[3].first) != "pattern")
        throw ParseError("unsupported field type '" + std::string(banner[3].first) + "', only pattern is accepted", 1,
                         banner[3].second);
    const std::string symmetry = lower(banner[4].first);
    if (symmetry != "general" && symmetry != "symmetric")
        throw ParseError("unsupported symmetry '" + std::string(banner[4].first) + "'", 1, banner[4].second);
    const bool symmetric = symmetry == "symmetric";

    std::size_t li = 1;
    auto skipComments = [&] {
        while (li < lines.size() && (isBlank(lines[li]) || lines[li].front() == '%')) ++li;
    };
    skipComments();
    if (li == lines.size()) throw ParseError("missing size line", li, 0);
    const auto size = tokens(lines[li]);
    if (size.size() != 3) throw ParseError("size line must be 'rows cols entries'", li + 1, 1);
    const long rows = parsePositive(size[0].first, li + 1, size[0].second, "row count");
    const long cols = parsePositive(size[1].first, li + 1, size[1].second, "column count");
    const long nnz = parsePositive(size[2].first, li + 1, size[2].second, "entry count");
    if (rows != cols)
        throw ParseError("matrix is not square (" + std::to_string(rows) + "x" + std::to_string(cols) + ")", li + 1,
                         size[0].second);
    if (rows < 1) throw ParseError("matrix dimension must be at least 1", li + 1, size[0].second);
    ++li;

    Matrix01 m(static_cast<int>(rows), std::move(source));
    long seen = 0;
    for (; li < lines.size(); ++li) {
        if (isBlank(lines[li]) || lines[li].front() == '%') continue;
        const auto t = tokens(lines[li]);
        if (t.size() != 2) throw ParseError("pattern entry must have exactly two indices", li + 1, 1);
        const long i = parsePositive(t[0].first, li + 1, t[0].second, "row index");
        const long j = parsePositive(t[1].first, li + 1, t[1].second, "column index");
        if (i < 1 || i > rows) throw ParseError("row index out of range", li + 1, t[0].second);
        if (j < 1 || j > cols) throw ParseError("column index out of range", li + 1, t[1].second);
        if (++seen > nnz) throw ParseError("more entries than declared", li + 1, 1);
        m.set(static_cast<int>(i - 1), static_cast<int>(j - 1), true);
        if (symmetric) m.set(static_cast<int>(j - 1), static_cast<int>(i - 1), true);
    }
    if (seen != nnz)
        throw ParseError("declared " + std::to_string(nnz) + " entries, found " + std::to_string(seen), lines.size(), 0);
    return m;
}

Matrix01 parseMatrixMarketPattern(std::istream& in, std::string source) {
    return parseMatrixMarketPattern(slurp(in), std::move(source));
}

std::string serializeMatrixMarketPattern(const Matrix01& m) {
    std::ostringstream out;
    out << "%%MatrixMarket matrix coordinate pattern general\n";
    out << m.size() << ' ' << m.size() << ' ' << m.countOnes() << '\n';
    for (int j = 0; j < m.size(); ++j)
        for (int i = 0; i < m.size(); ++i)
            if (m.at(i, j)) out << i + 1 << ' ' << j + 1 << '\n';
    return out.str();
}

Matrix01 readMatrixFile(const std::string& path, std::optional<MatrixFormat> format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    MatrixFormat fmt = format.value_or(path.size() >= 4 && lower(path.substr(path.size() - 4)) == ".mtx"
                                           ? MatrixFormat::MatrixMarket
                                           : MatrixFormat::Dense);
    return fmt == MatrixFormat::MatrixMarket ? parseMatrixMarketPattern(in, path) : parseDense(in, path);
}

// ------------------------------------------------------------------- graphs

std::vector<std::pair<int, int>> bipartiteEdges(const Matrix01& m) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j)
            if (m.at(i, j)) edges.emplace_back(i, j);
    return edges;
}

int maximumMatchingSize(const Matrix01& m) {
    const int n = m.size();
    constexpr int kNil = -1;
    constexpr int kInf = std::numeric_limits<int>::max();
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) adj[i] = m.rowSupport(i);

    std::vector<int> matchRow(n, kNil), matchCol(n, kNil), dist(n);

    auto bfs = [&] {
        std::queue<int> q;
        bool found = false;
        for (int u = 0; u < n; ++u) {
            if (matchRow[u] == kNil) {
                dist[u] = 0;
                q.push(u);
            } else {
                dist[u] = kInf;
            }
        }
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[u]) {
                int w = matchCol[v];
                if (w == kNil) {
                    found = true;
                } else if (dist[w] == kInf) {
                    dist[w] = dist[u] + 1;
                    q.push(w);
                }
            }
        }
        return found;
    };

    auto dfs = [&](auto&& self, int u) -> bool {
        for (int v : adj[u]) {
            int w = matchCol[v];
            if (w == kNil || (dist[w] == dist[u] + 1 && self(self, w))) {
                matchRow[u] = v;
                matchCol[v] = u;
                return true;
            }
        }
        dist[u] = kInf;
        return false;
    };

    int matching = 0;
    while (bfs())
        for (int u = 0; u < n; ++u)
            if (matchRow[u] == kNil && dfs(dfs, u)) ++matching;
    return matching;
}

bool hasPerfectMatching(const Matrix01& m) { return maximumMatchingSize(m) == m.size(); }

AdjacencyList primalGraph(const Matrix01& m) {
    const int n = m.size();
    std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) {
        const auto s = m.rowSupport(i);
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t b = a + 1; b < s.size(); ++b) edge[s[a]][s[b]] = edge[s[b]][s[a]] = true;
    }
    AdjacencyList adj(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (edge[j][k]) adj[j].push_back(k);
    return adj;
}

// ---------------------------------------------------------------- generators

std::string_view toString(Family f) {
    switch (f) {
        case Family::Dense: return "dense";
        case Family::Sparse: return "sparse";
        case Family::Similar: return "similar";
    }
    return "unknown";
}

Family familyFromString(std::string_view s) {
    const std::string l = lower(s);
    if (l == "dense") return Family::Dense;
    if (l == "sparse") return Family::Sparse;
    if (l == "similar") return Family::Similar;
    throw std::invalid_argument("unknown family '" + std::string(s) + "'");
}

int roundHalfUp(double x) { return static_cast<int>(std::floor(x + 0.5)); }

void GenParams::validate() const {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (!(flipFactor >= 0.0) || !std::isfinite(flipFactor)) throw std::invalid_argument("C_f must be non-negative");
    if (!(rowDensity >= 0.0 && rowDensity <= 1.0)) throw std::invalid_argument("row density must lie in [0,1]");
    switch (family) {
        case Family::Dense:
            if (rowDensity != 1.0) throw std::invalid_argument("dense family requires row density 1");
            break;
        case Family::Sparse:
            if (rowDensity != 0.0) throw std::invalid_argument("sparse family requires row density 0");
            break;
        case Family::Similar:
            if (rowDensity <= 0.0 || rowDensity >= 1.0)
                throw std::invalid_argument("similar family requires 0 < row density < 1");
            break;
    }
    const double flips = flipFactor * n;
    if (flips > static_cast<double>(n) * n) throw std::invalid_argument("cannot flip more cells than the matrix has");
    if (maxRetries < 1) throw std::invalid_argument("retry budget must be at least 1");
}

std::uint64_t mixSeed(std::uint64_t base, std::uint64_t word) {
    // splitmix64 finalizer over the combined state
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (word + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

// Unbiased draw from [0, bound) independent of the standard library's distributions.
std::uint64_t uniformBelow(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t r = rng();
        if (r >= threshold) return r % bound;
    }
}

// First k entries of a partial Fisher-Yates shuffle of 0..count-1.
std::vector<std::size_t> sampleDistinct(std::mt19937_64& rng, std::size_t count, std::size_t k) {
    std::vector<std::size_t> pool(count);
    for (std::size_t i = 0; i < count; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + uniformBelow(rng, count - i)]);
    pool.resize(k);
    return pool;
}

}  // namespace

Matrix01 generate(const GenParams& p) {
    p.validate();
    const int n = p.n;
    const int ones = roundHalfUp(p.rowDensity * n);
    const int flips = roundHalfUp(p.flipFactor * n);
    std::ostringstream desc;
    desc << "gen:" << toString(p.family) << ":n=" << n << ":cf=" << p.flipFactor << ":rho=" << p.rowDensity
         << ":seed=" << p.seed;

    for (int attempt = 0; attempt < p.maxRetries; ++attempt) {
        std::mt19937_64 rng(mixSeed(p.seed, static_cast<std::uint64_t>(attempt)));
        Matrix01 m(n, desc.str());
        for (std::size_t j : sampleDistinct(rng, static_cast<std::size_t>(n), static_cast<std::size_t>(ones)))
            for (int i = 0; i < n; ++i) m.set(i, static_cast<int>(j), true);
        const auto cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
        for (std::size_t c : sampleDistinct(rng, cells, static_cast<std::size_t>(flips)))
            m.flip(static_cast<int>(c / n), static_cast<int>(c % n));
        if (hasPerfectMatching(m)) return m;
    }
    std::ostringstream msg;
    msg << "no matrix with a perfect matching after " << p.maxRetries << " attempts for " << desc.str();
    throw GenerationError(msg.str());
}

}  // namespace addperm
