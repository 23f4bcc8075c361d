#include "addperm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "addperm/errors.hpp"

namespace addperm {

namespace fs = std::filesystem;

namespace {

std::string formatReal(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace

std::uint64_t instanceSeed(std::uint64_t baseSeed, Family family, int n, double flipFactor, double rowDensity,
                           int index) {
    std::uint64_t s = mixSeed(baseSeed, static_cast<std::uint64_t>(family));
    s = mixSeed(s, static_cast<std::uint64_t>(n));
    s = mixSeed(s, std::bit_cast<std::uint64_t>(flipFactor));
    s = mixSeed(s, std::bit_cast<std::uint64_t>(rowDensity));
    return mixSeed(s, static_cast<std::uint64_t>(index));
}

std::string instanceFileName(const GenParams& p, int index) {
    char idx[16];
    std::snprintf(idx, sizeof idx, "%03d", index);
    return std::string(toString(p.family)) + "_n" + std::to_string(p.n) + "_cf" + formatReal(p.flipFactor) + "_rho" +
           formatReal(p.rowDensity) + "_seed" + std::to_string(p.seed) + "_i" + idx + ".txt";
}

std::optional<InstanceInfo> parseInstanceFileName(std::string_view fileName) {
    static const std::regex pattern(
        R"(^(dense|sparse|similar)_n(\d+)_cf([0-9.eE+-]+)_rho([0-9.eE+-]+)_seed(\d+)_i(\d+)\.txt$)");
    std::cmatch match;
    if (!std::regex_match(fileName.begin(), fileName.end(), match, pattern)) return std::nullopt;
    InstanceInfo info;
    info.id = std::string(fileName.substr(0, fileName.size() - 4));
    info.family = familyFromString(match[1].str());
    info.n = std::stoi(match[2].str());
    info.flipFactor = std::stod(match[3].str());
    info.rowDensity = std::stod(match[4].str());
    info.seed = std::stoull(match[5].str());
    return info;
}

std::vector<std::string> generateInstances(const GenParams& base, int count, const std::string& outDir) {
    base.validate();
    if (count < 0) throw std::invalid_argument("instance count must be non-negative");
    fs::create_directories(outDir);
    std::vector<std::string> paths;
    for (int k = 0; k < count; ++k) {
        GenParams p = base;
        p.seed = instanceSeed(base.seed, base.family, base.n, base.flipFactor, base.rowDensity, k);
        const Matrix01 m = generate(p);
        const fs::path path = fs::path(outDir) / instanceFileName(p, k);
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << serializeDense(m);
        if (!out) throw std::runtime_error("failed writing " + path.string());
        paths.push_back(path.string());
    }
    return paths;
}

std::vector<InstanceInfo> scanInstances(const std::string& dir) {
    std::vector<InstanceInfo> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext != ".txt" && ext != ".mtx") continue;
        const std::string name = entry.path().filename().string();
        InstanceInfo info = parseInstanceFileName(name).value_or(InstanceInfo{});
        if (info.id.empty()) info.id = entry.path().stem().string();
        info.path = entry.path().string();
        try {
            info.n = readMatrixFile(info.path).size();
        } catch (const std::exception&) {
            info.n = 0;  // reported as an error row when run
        }
        out.push_back(std::move(info));
    }
    std::sort(out.begin(), out.end(), [](const InstanceInfo& a, const InstanceInfo& b) { return a.path < b.path; });
    return out;
}

// ---------------------------------------------------------------- configs

std::string BenchConfig::label() const {
    switch (algorithm) {
        case Algorithm::BruteForce:
        case Algorithm::RyserGray:
        case Algorithm::Monolithic: return std::string(toString(algorithm));
        case Algorithm::EarlyAbstraction:
            return "early:" + std::string(toString(heuristic)) + ":" + std::string(toString(rankOrder));
    }
    return "unknown";
}

PermConfig BenchConfig::toPermConfig(const RunLimits& limits) const {
    PermConfig c;
    c.algorithm = algorithm;
    c.heuristic = heuristic;
    c.rankOrder = rankOrder;
    c.limits = limits;
    return c;
}

BenchConfig parseBenchConfig(std::string_view label) {
    BenchConfig c;
    const std::size_t colon = label.find(':');
    c.algorithm = algorithmFromString(label.substr(0, colon));
    if (colon == std::string_view::npos) return c;
    if (c.algorithm != Algorithm::EarlyAbstraction)
        throw std::invalid_argument("only early abstraction takes a heuristic: '" + std::string(label) + "'");
    std::string_view rest = label.substr(colon + 1);
    const std::size_t second = rest.find(':');
    c.heuristic = heuristicFromString(rest.substr(0, second));
    if (second != std::string_view::npos) c.rankOrder = rankOrderFromString(rest.substr(second + 1));
    return c;
}

std::string_view toString(Outcome o) {
    switch (o) {
        case Outcome::Ok: return "ok";
        case Outcome::Timeout: return "timeout";
        case Outcome::NodeBudget: return "node-budget";
        case Outcome::Error: return "error";
    }
    return "error";
}

namespace {

Outcome outcomeFromString(std::string_view s) {
    if (s == "ok") return Outcome::Ok;
    if (s == "timeout") return Outcome::Timeout;
    if (s == "node-budget") return Outcome::NodeBudget;
    if (s == "error") return Outcome::Error;
    throw ParseError("unknown outcome '" + std::string(s) + "'");
}

BenchRecord blankRecord(const InstanceInfo& info, const BenchConfig& config) {
    BenchRecord r;
    r.instanceId = info.id;
    r.n = info.n;
    if (info.family) r.family = std::string(toString(*info.family));
    if (info.flipFactor) r.flipFactor = formatReal(*info.flipFactor);
    if (info.rowDensity) r.rowDensity = formatReal(*info.rowDensity);
    if (info.seed) r.seed = std::to_string(*info.seed);
    r.algorithm = std::string(toString(config.algorithm));
    if (config.algorithm == Algorithm::EarlyAbstraction)
        r.heuristic = std::string(toString(config.heuristic)) + ":" + std::string(toString(config.rankOrder));
    return r;
}

}  // namespace

BenchRecord runBenchOne(const Matrix01& m, const InstanceInfo& info, const BenchConfig& config,
                        const RunLimits& limits) {
    BenchRecord r = blankRecord(info, config);
    r.n = m.size();
    const auto start = std::chrono::steady_clock::now();
    try {
        const PermanentResult res = perm(m, config.toPermConfig(limits));
        r.value = res.value.get_str();
        r.peakAddNodes = res.stats.peakAddNodes;
        r.totalAddNodesCreated = res.stats.totalAddNodesCreated;
        r.outcome = Outcome::Ok;
        // Includes the matching pre-check; algorithm time alone is in res.stats.
        r.wallTimeMillis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return r;
    } catch (const TimeoutError& e) {
        r.outcome = Outcome::Timeout;
        r.message = e.what();
    } catch (const NodeBudgetError& e) {
        r.outcome = Outcome::NodeBudget;
        r.message = e.what();
    } catch (const std::exception& e) {
        r.outcome = Outcome::Error;
        r.message = e.what();
    }
    r.wallTimeMillis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<BenchRecord> runBench(const std::vector<InstanceInfo>& instances, const BenchOptions& options,
                                  const std::function<void(const BenchRecord&)>& sink) {
    std::vector<BenchRecord> records;
    std::mutex mu;
    auto emit = [&](BenchRecord r) {
        std::lock_guard lock(mu);
        if (sink) sink(r);
        records.push_back(std::move(r));
    };

    // Group by family parameters so timeouts can be extrapolated to larger sizes.
    using GroupKey = std::tuple<std::string, std::string, std::string>;
    std::map<GroupKey, std::map<int, std::vector<const InstanceInfo*>>> groups;
    for (const InstanceInfo& info : instances) {
        GroupKey key{info.family ? std::string(toString(*info.family)) : std::string(),
                     info.flipFactor ? formatReal(*info.flipFactor) : std::string(),
                     info.rowDensity ? formatReal(*info.rowDensity) : std::string()};
        groups[key][info.n].push_back(&info);
    }

    struct Task {
        const InstanceInfo* info;
        const BenchConfig* config;
    };
    auto runTasks = [&](const std::vector<Task>& tasks) -> std::vector<Outcome> {
        std::vector<Outcome> outcomes(tasks.size(), Outcome::Error);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t k = next++; k < tasks.size(); k = next++) {
                BenchRecord r;
                try {
                    const Matrix01 m = readMatrixFile(tasks[k].info->path);
                    r = runBenchOne(m, *tasks[k].info, *tasks[k].config, options.limits);
                } catch (const std::exception& e) {
                    r = blankRecord(*tasks[k].info, *tasks[k].config);
                    r.outcome = Outcome::Error;
                    r.message = e.what();
                }
                outcomes[k] = r.outcome;
                emit(std::move(r));
            }
        };
        const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(tasks.size())));
        if (jobs == 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        }
        return outcomes;
    };

    for (const auto& [key, bySize] : groups) {
        std::vector<bool> skip(options.configs.size(), false);
        for (const auto& [n, members] : bySize) {
            std::vector<Task> tasks;
            for (const InstanceInfo* info : members) {
                for (std::size_t c = 0; c < options.configs.size(); ++c) {
                    if (skip[c]) {
                        BenchRecord r = blankRecord(*info, options.configs[c]);
                        r.outcome = Outcome::Timeout;
                        r.message = "extrapolated from smaller instances";
                        emit(std::move(r));
                    } else {
                        tasks.push_back(Task{info, &options.configs[c]});
                    }
                }
            }
            const std::vector<Outcome> outcomes = runTasks(tasks);
            if (!options.extrapolateTimeouts || std::get<0>(key).empty()) continue;
            for (std::size_t c = 0; c < options.configs.size(); ++c) {
                if (skip[c]) continue;
                bool any = false, allTimedOut = true;
                for (std::size_t k = 0; k < tasks.size(); ++k) {
                    if (tasks[k].config != &options.configs[c]) continue;
                    any = true;
                    allTimedOut = allTimedOut && outcomes[k] == Outcome::Timeout;
                }
                if (any && allTimedOut) skip[c] = true;
            }
        }
    }
    return records;
}

// -------------------------------------------------------------------- CSV

std::string_view benchCsvHeader() {
    return "instanceId,family,n,C_f,rho,seed,algorithm,heuristic,value,wallTimeMillis,peakAddNodes,"
           "totalAddNodesCreated,outcome";
}

void writeCsvHeader(std::ostream& out) { out << benchCsvHeader() << '\n'; }

namespace {

std::string csvField(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q.push_back('"');
        q.push_back(c);
    }
    q.push_back('"');
    return q;
}

std::vector<std::string> splitCsvLine(std::string_view line, std::size_t lineNo) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw ParseError("unterminated quoted CSV field", lineNo);
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace

void writeCsvRow(std::ostream& out, const BenchRecord& r) {
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", r.wallTimeMillis);
    out << csvField(r.instanceId) << ',' << csvField(r.family) << ',' << r.n << ',' << csvField(r.flipFactor) << ','
        << csvField(r.rowDensity) << ',' << csvField(r.seed) << ',' << csvField(r.algorithm) << ','
        << csvField(r.heuristic) << ',' << csvField(r.value) << ',' << wall << ',' << r.peakAddNodes << ','
        << r.totalAddNodesCreated << ',' << toString(r.outcome) << '\n';
}

std::vector<BenchRecord> readCsv(std::string_view text) {
    std::vector<BenchRecord> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineNo == 1) {
            if (line != benchCsvHeader()) throw ParseError("unexpected CSV header", 1);
            continue;
        }
        const auto f = splitCsvLine(line, lineNo);
        if (f.size() != 13) throw ParseError("expected 13 CSV fields, found " + std::to_string(f.size()), lineNo);
        BenchRecord r;
        r.instanceId = f[0];
        r.family = f[1];
        r.n = std::stoi(f[2]);
        r.flipFactor = f[3];
        r.rowDensity = f[4];
        r.seed = f[5];
        r.algorithm = f[6];
        r.heuristic = f[7];
        r.value = f[8];
        r.wallTimeMillis = std::stod(f[9]);
        r.peakAddNodes = std::stoull(f[10]);
        r.totalAddNodesCreated = std::stoull(f[11]);
        r.outcome = outcomeFromString(f[12]);
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------- summary

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& records) {
    using Key = std::tuple<std::string, int, std::string, std::string>;
    std::map<Key, std::pair<SummaryRow, std::vector<double>>> acc;
    for (const BenchRecord& r : records) {
        const std::string config = r.heuristic.empty() ? r.algorithm : r.algorithm + ":" + r.heuristic;
        auto& [row, times] = acc[Key{r.family, r.n, r.flipFactor, config}];
        row.family = r.family;
        row.n = r.n;
        row.flipFactor = r.flipFactor;
        row.config = config;
        switch (r.outcome) {
            case Outcome::Ok:
                ++row.ok;
                times.push_back(r.wallTimeMillis);
                break;
            case Outcome::Timeout: ++row.timeouts; break;
            default: ++row.other; break;
        }
    }
    std::vector<SummaryRow> out;
    for (auto& [key, entry] : acc) {
        if (!entry.second.empty()) entry.first.medianWallTimeMillis = median(entry.second);
        out.push_back(entry.first);
    }
    return out;
}

void writeSummary(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "# summary: family,n,C_f,config,ok,timeouts,other,medianWallTimeMillis\n";
    for (const SummaryRow& s : rows) {
        out << "# " << s.family << ',' << s.n << ',' << s.flipFactor << ',' << s.config << ',' << s.ok << ','
            << s.timeouts << ',' << s.other << ',';
        if (s.medianWallTimeMillis) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", *s.medianWallTimeMillis);
            out << buf;
        }
        out << '\n';
    }
}

namespace {

std::vector<double> averageRanks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman needs two equal-length samples");
    const auto rx = averageRanks(x);
    const auto ry = averageRanks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace addperm
