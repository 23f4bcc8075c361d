#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "addperm/matrix.hpp"
#include "addperm/permanent.hpp"

namespace addperm {

// ------------------------------------------------------------ instance files

/// Seed of instance `index` in a generated family; independent of how many
/// instances are generated.
std::uint64_t instanceSeed(std::uint64_t baseSeed, Family family, int n, double flipFactor, double rowDensity,
                           int index);

/// `<family>_n<n>_cf<C_f>_rho<rho>_seed<seed>_i<index>.txt`
std::string instanceFileName(const GenParams& p, int index);

struct InstanceInfo {
    std::string id;
    std::string path;
    int n = 0;
    std::optional<Family> family;
    std::optional<double> flipFactor;
    std::optional<double> rowDensity;
    std::optional<std::uint64_t> seed;
};

/// Recovers generation parameters from a file name written by instanceFileName.
std::optional<InstanceInfo> parseInstanceFileName(std::string_view fileName);

/// Writes `count` instances of the family described by `base` (its seed is the
/// base seed) into `outDir`. Returns the written paths.
std::vector<std::string> generateInstances(const GenParams& base, int count, const std::string& outDir);

/// Instance files (.txt dense, .mtx Matrix Market) in a directory, sorted by name.
std::vector<InstanceInfo> scanInstances(const std::string& dir);

// ---------------------------------------------------------------- benchmarks

struct BenchConfig {
    Algorithm algorithm = Algorithm::EarlyAbstraction;
    ClusterHeuristic heuristic = ClusterHeuristic::BouquetList;
    RankOrder rankOrder = RankOrder::Mcs;

    /// "brute", "gray", "mono" or "early:<heuristic>:<order>".
    std::string label() const;
    PermConfig toPermConfig(const RunLimits& limits) const;
};

/// Parses a label as produced by BenchConfig::label(); "early" alone means early:bm-list:mcs.
BenchConfig parseBenchConfig(std::string_view label);

enum class Outcome { Ok, Timeout, NodeBudget, Error };
std::string_view toString(Outcome o);

struct BenchRecord {
    std::string instanceId;
    std::string family;
    int n = 0;
    std::string flipFactor;
    std::string rowDensity;
    std::string seed;
    std::string algorithm;
    std::string heuristic;
    std::string value;
    double wallTimeMillis = 0.0;
    std::size_t peakAddNodes = 0;
    std::size_t totalAddNodesCreated = 0;
    Outcome outcome = Outcome::Ok;
    std::string message;
};

struct BenchOptions {
    std::vector<BenchConfig> configs;
    RunLimits limits = [] {
        RunLimits l;
        l.timeout = std::chrono::duration<double>(1800.0);
        return l;
    }();
    int jobs = 1;
    /// Once every instance of a size times out for a config, larger sizes of the
    /// same family and parameters are recorded as timeouts without running.
    bool extrapolateTimeouts = false;
};

/// Runs one configuration on one matrix, mapping failures to outcomes.
BenchRecord runBenchOne(const Matrix01& m, const InstanceInfo& info, const BenchConfig& config,
                        const RunLimits& limits);

/// Runs every (instance, config) pair. `sink` is called once per record from a
/// single thread at a time. Returns all records.
std::vector<BenchRecord> runBench(const std::vector<InstanceInfo>& instances, const BenchOptions& options,
                                  const std::function<void(const BenchRecord&)>& sink = {});

std::string_view benchCsvHeader();
void writeCsvHeader(std::ostream& out);
void writeCsvRow(std::ostream& out, const BenchRecord& r);
/// Parses rows written by writeCsvRow (header line included). Throws ParseError.
std::vector<BenchRecord> readCsv(std::string_view text);

struct SummaryRow {
    std::string family;
    int n = 0;
    std::string flipFactor;
    std::string config;
    std::size_t ok = 0;
    std::size_t timeouts = 0;
    std::size_t other = 0;
    std::optional<double> medianWallTimeMillis;  // over ok rows only
};

std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& records);
void writeSummary(std::ostream& out, const std::vector<SummaryRow>& rows);

double median(std::vector<double> values);
/// Spearman rank correlation with average ranks for ties. Needs >= 2 points.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace addperm
