#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace addperm {

/// Square 0-1 matrix. Indices are 0-based in the API; file formats are 1-based.
class Matrix01 {
public:
    Matrix01() = default;
    explicit Matrix01(int n, std::string source = {});
    static Matrix01 fromRows(const std::vector<std::vector<int>>& rows, std::string source = {});
    static Matrix01 allOnes(int n);
    static Matrix01 identity(int n);
    /// Tridiagonal band: a_ij = 1 iff |i - j| <= 1.
    static Matrix01 tridiagonal(int n);

    int size() const noexcept { return n_; }
    bool at(int i, int j) const { return cells_[index(i, j)] != 0; }
    void set(int i, int j, bool v) { cells_[index(i, j)] = v ? 1 : 0; }
    void flip(int i, int j) { cells_[index(i, j)] ^= 1; }

    const std::string& source() const noexcept { return source_; }
    void setSource(std::string s) { source_ = std::move(s); }

    /// Column indices j with a_ij = 1, ascending.
    std::vector<int> rowSupport(int i) const;
    /// Row indices i with a_ij = 1, ascending.
    std::vector<int> columnSupport(int j) const;
    std::size_t countOnes() const;
    bool hasZeroRow() const;
    bool hasZeroColumn() const;

    Matrix01 transposed() const;
    /// Column j of the result is column perm[j] of this matrix.
    Matrix01 permuteColumns(const std::vector<int>& perm) const;

    /// Equality compares entries only, never the provenance tag.
    friend bool operator==(const Matrix01& a, const Matrix01& b) {
        return a.n_ == b.n_ && a.cells_ == b.cells_;
    }

private:
    std::size_t index(int i, int j) const;

    int n_ = 0;
    std::vector<std::uint8_t> cells_;
    std::string source_;
};

/// Dense text: first token n, then n lines of n characters from {0,1}.
Matrix01 parseDense(std::istream& in, std::string source = {});
Matrix01 parseDense(std::string_view text, std::string source = {});
std::string serializeDense(const Matrix01& m);

/// Matrix Market `matrix coordinate pattern` with `general` or `symmetric` symmetry.
Matrix01 parseMatrixMarketPattern(std::istream& in, std::string source = {});
Matrix01 parseMatrixMarketPattern(std::string_view text, std::string source = {});
std::string serializeMatrixMarketPattern(const Matrix01& m);

enum class MatrixFormat { Dense, MatrixMarket };
/// Reads a file; format is inferred from the `.mtx` extension when not given.
Matrix01 readMatrixFile(const std::string& path, std::optional<MatrixFormat> format = std::nullopt);

/// Edges of the bipartite view G_A: (row, column) pairs with a_ij = 1.
std::vector<std::pair<int, int>> bipartiteEdges(const Matrix01& m);

/// Hopcroft-Karp maximum matching size of the bipartite view.
int maximumMatchingSize(const Matrix01& m);
bool hasPerfectMatching(const Matrix01& m);

/// Primal (Gaifman) graph over columns: adjacency lists, sorted, no self loops.
using AdjacencyList = std::vector<std::vector<int>>;
AdjacencyList primalGraph(const Matrix01& m);

enum class Family { Dense, Sparse, Similar };
std::string_view toString(Family f);
Family familyFromString(std::string_view s);

struct GenParams {
    Family family = Family::Dense;
    int n = 1;
    double flipFactor = 0.0;
    double rowDensity = 1.0;
    std::uint64_t seed = 0;
    int maxRetries = 1000;

    /// Throws std::invalid_argument when the family/density/flip invariants fail.
    void validate() const;
};

/// Half-up rounding of a non-negative real, as used for flip and ones counts.
int roundHalfUp(double x);

Matrix01 generate(const GenParams& p);

/// Stable 64-bit mixing of a base seed with a sequence of words.
std::uint64_t mixSeed(std::uint64_t base, std::uint64_t word);

}  // namespace addperm
