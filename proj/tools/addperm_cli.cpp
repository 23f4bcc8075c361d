// addperm: permanents of 0-1 matrices via symbolic Ryser over ADDs.
//
//   addperm perm   [--algo ...] [--heuristic ...] [--order ...] MATRIX
//   addperm gen    --family F --n N --cf C [--rho R] --count K --seed S --out-dir DIR
//   addperm bench  [--configs gray,mono,early:bm-list:mcs] [--jobs J] DIR
//   addperm encode [--out FILE] MATRIX
//   addperm dot    [--what rs|rsp|ryser] [--row I] MATRIX
//
// Exit codes: 0 ok, 1 other failure, 2 usage, 3 parse, 4 timeout, 5 node budget,
// 6 internal assertion.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "addperm/add.hpp"
#include "addperm/bench.hpp"
#include "addperm/cnf.hpp"
#include "addperm/errors.hpp"
#include "addperm/matrix.hpp"
#include "addperm/permanent.hpp"

namespace {

using namespace addperm;

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kParse = 3, kTimeout = 4, kNodeBudget = 5, kInternal = 6 };

std::optional<MatrixFormat> formatFlag(const std::string& f) {
    if (f.empty() || f == "auto") return std::nullopt;
    if (f == "dense") return MatrixFormat::Dense;
    if (f == "mm") return MatrixFormat::MatrixMarket;
    throw CLI::ValidationError("--format", "expected dense, mm or auto");
}

struct PermArgs {
    std::string input;
    std::string format;
    std::string algo = "early";
    std::string heuristic = "bm-list";
    std::string order = "mcs";
    double timeoutSecs = -1;
    std::size_t nodeBudget = 50'000'000;
    int bruteLimit = 12;
    int ryserLimit = 30;
    bool nw = false;
    bool quiet = false;
};

int runPerm(const PermArgs& a) {
    const Matrix01 m = readMatrixFile(a.input, formatFlag(a.format));
    PermConfig cfg;
    cfg.algorithm = algorithmFromString(a.algo);
    cfg.heuristic = heuristicFromString(a.heuristic);
    cfg.rankOrder = rankOrderFromString(a.order);
    cfg.nijenhuisWilf = a.nw;
    cfg.limits.nodeBudget = a.nodeBudget;
    cfg.limits.bruteForceMaxN = a.bruteLimit;
    cfg.limits.ryserMaxN = a.ryserLimit;
    if (a.timeoutSecs >= 0) cfg.limits.timeout = std::chrono::duration<double>(a.timeoutSecs);

    const PermanentResult r = perm(m, cfg);
    std::cout << r.value.get_str() << '\n';
    if (!a.quiet) {
        std::cerr << "algorithm=" << toString(r.algorithm);
        if (r.heuristic) std::cerr << " heuristic=" << toString(*r.heuristic) << " order=" << toString(cfg.rankOrder);
        std::cerr << " n=" << m.size() << " wallTimeMillis=" << r.stats.wallTimeMillis
                  << " peakAddNodes=" << r.stats.peakAddNodes
                  << " totalAddNodesCreated=" << r.stats.totalAddNodesCreated
                  << " clustersProcessed=" << r.stats.clustersProcessed << '\n';
    }
    return kOk;
}

struct GenArgs {
    std::string family;
    int n = 0;
    double cf = 0;
    std::optional<double> rho;
    int count = 1;
    std::uint64_t seed = 0;
    std::string outDir = ".";
    int maxRetries = 1000;
};

int runGen(const GenArgs& a) {
    GenParams p;
    p.family = familyFromString(a.family);
    p.n = a.n;
    p.flipFactor = a.cf;
    p.seed = a.seed;
    p.maxRetries = a.maxRetries;
    if (a.rho) {
        p.rowDensity = *a.rho;
    } else if (p.family == Family::Similar) {
        throw std::invalid_argument("--rho is required for the similar family");
    } else {
        p.rowDensity = p.family == Family::Dense ? 1.0 : 0.0;
    }
    for (const std::string& path : generateInstances(p, a.count, a.outDir)) std::cout << path << '\n';
    return kOk;
}

struct BenchArgs {
    std::string dir;
    std::string configs = "gray,mono,early:bm-list:mcs";
    double timeoutSecs = 1800;
    std::size_t nodeBudget = 50'000'000;
    int jobs = 1;
    bool extrapolate = false;
    std::string out;
    std::string summary;
};

int runBenchCmd(const BenchArgs& a) {
    BenchOptions opts;
    std::string list = a.configs;
    std::size_t start = 0;
    while (start <= list.size()) {
        std::size_t comma = list.find(',', start);
        if (comma == std::string::npos) comma = list.size();
        if (comma > start) opts.configs.push_back(parseBenchConfig(list.substr(start, comma - start)));
        start = comma + 1;
    }
    if (opts.configs.empty()) throw std::invalid_argument("--configs is empty");
    opts.limits.timeout = std::chrono::duration<double>(a.timeoutSecs);
    opts.limits.nodeBudget = a.nodeBudget;
    opts.jobs = a.jobs;
    opts.extrapolateTimeouts = a.extrapolate;

    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + a.out);
    }
    std::ostream& csv = a.out.empty() ? std::cout : file;
    writeCsvHeader(csv);
    const auto records = runBench(scanInstances(a.dir), opts, [&](const BenchRecord& r) {
        writeCsvRow(csv, r);
        csv.flush();
    });

    const auto rows = summarize(records);
    if (a.summary.empty()) {
        writeSummary(std::cerr, rows);
    } else {
        std::ofstream s(a.summary, std::ios::binary);
        if (!s) throw std::runtime_error("cannot write " + a.summary);
        writeSummary(s, rows);
    }
    return kOk;
}

struct EncodeArgs {
    std::string input;
    std::string format;
    std::string out;
};

int runEncode(const EncodeArgs& a) {
    const Matrix01 m = readMatrixFile(a.input, formatFlag(a.format));
    const CnfFormula f = encodePermanent(m);
    if (a.out.empty()) {
        writeDimacs(f, std::cout);
        std::cerr << "variables=" << f.numVars << " clauses=" << f.clauses.size() << '\n';
    } else {
        std::ofstream out(a.out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + a.out);
        writeDimacs(f, out);
        if (!out) throw std::runtime_error("failed writing " + a.out);
        std::cout << "variables=" << f.numVars << " clauses=" << f.clauses.size() << '\n';
    }
    return kOk;
}

struct DotArgs {
    std::string input;
    std::string format;
    std::string what = "rsp";
    int row = 1;
};

int runDot(const DotArgs& a) {
    const Matrix01 m = readMatrixFile(a.input, formatFlag(a.format));
    AddManager mgr(VariableOrder::identity(m.size()));
    Add f;
    if (a.what == "rs") {
        f = buildRowSumAdd(mgr, m, a.row - 1);
    } else if (a.what == "rsp") {
        f = buildRowSumProductAdd(mgr, m);
    } else if (a.what == "ryser") {
        f = mgr.product(buildRowSumProductAdd(mgr, m), buildParityAdd(mgr, m.size()));
    } else {
        throw std::invalid_argument("--what must be rs, rsp or ryser");
    }
    mgr.writeDot(std::cout, f);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Permanents of 0-1 matrices with algebraic decision diagrams"};
    app.require_subcommand(1);

    PermArgs perm;
    auto* permCmd = app.add_subcommand("perm", "Compute the permanent of a matrix file");
    permCmd->add_option("input", perm.input, "Matrix file")->required();
    permCmd->add_option("--format", perm.format, "dense, mm or auto (by extension)");
    permCmd->add_option("--algo", perm.algo, "brute, gray, mono or early")->capture_default_str();
    permCmd->add_option("--heuristic", perm.heuristic, "be, bm-list or mono")->capture_default_str();
    permCmd->add_option("--order", perm.order, "Cluster rank-order: index or mcs")->capture_default_str();
    permCmd->add_option("--timeout-secs", perm.timeoutSecs, "Wall-clock limit (negative: none)");
    permCmd->add_option("--node-budget", perm.nodeBudget, "Maximum live ADD nodes")->capture_default_str();
    permCmd->add_option("--brute-limit", perm.bruteLimit, "Largest n for brute force")->capture_default_str();
    permCmd->add_option("--ryser-limit", perm.ryserLimit, "Largest n for explicit Ryser")->capture_default_str();
    permCmd->add_flag("--nw", perm.nw, "Use the 2^(n-1) subset variant of explicit Ryser");
    permCmd->add_flag("-q,--quiet", perm.quiet, "Do not print statistics to stderr");

    GenArgs gen;
    auto* genCmd = app.add_subcommand("gen", "Generate random benchmark matrices");
    genCmd->add_option("--family", gen.family, "dense, sparse or similar")->required();
    genCmd->add_option("--n", gen.n, "Matrix size")->required();
    genCmd->add_option("--cf", gen.cf, "Flip factor C_f (round(C_f*n) cells flipped)")->required();
    genCmd->add_option("--rho", gen.rho, "Starting row density");
    genCmd->add_option("--count", gen.count, "Number of instances")->capture_default_str();
    genCmd->add_option("--seed", gen.seed, "Base seed")->capture_default_str();
    genCmd->add_option("--out-dir", gen.outDir, "Output directory")->capture_default_str();
    genCmd->add_option("--max-retries", gen.maxRetries, "Resampling budget per instance")->capture_default_str();

    BenchArgs bench;
    auto* benchCmd = app.add_subcommand("bench", "Run configurations over a directory of instances");
    benchCmd->add_option("dir", bench.dir, "Instance directory")->required();
    benchCmd->add_option("--configs", bench.configs, "Comma-separated configurations")->capture_default_str();
    benchCmd->add_option("--timeout-secs", bench.timeoutSecs, "Per-run wall-clock limit")->capture_default_str();
    benchCmd->add_option("--node-budget", bench.nodeBudget, "Maximum live ADD nodes")->capture_default_str();
    benchCmd->add_option("--jobs", bench.jobs, "Worker threads")->capture_default_str();
    benchCmd->add_flag("--extrapolate-timeouts", bench.extrapolate,
                       "Skip larger sizes once every instance of a size timed out");
    benchCmd->add_option("--out", bench.out, "CSV output file (default stdout)");
    benchCmd->add_option("--summary", bench.summary, "Summary output file (default stderr)");

    EncodeArgs encode;
    auto* encodeCmd = app.add_subcommand("encode", "Emit the perfect-matching CNF in DIMACS format");
    encodeCmd->add_option("input", encode.input, "Matrix file")->required();
    encodeCmd->add_option("--format", encode.format, "dense, mm or auto");
    encodeCmd->add_option("--out", encode.out, "DIMACS output file (default stdout)");

    DotArgs dot;
    auto* dotCmd = app.add_subcommand("dot", "Print a Ryser ADD in Graphviz format");
    dotCmd->add_option("input", dot.input, "Matrix file")->required();
    dotCmd->add_option("--format", dot.format, "dense, mm or auto");
    dotCmd->add_option("--what", dot.what, "rs, rsp or ryser")->capture_default_str();
    dotCmd->add_option("--row", dot.row, "1-based row for --what rs")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*permCmd) return runPerm(perm);
        if (*genCmd) return runGen(gen);
        if (*benchCmd) return runBenchCmd(bench);
        if (*encodeCmd) return runEncode(encode);
        if (*dotCmd) return runDot(dot);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const TimeoutError& e) {
        std::cerr << "timeout: " << e.what() << '\n';
        return kTimeout;
    } catch (const NodeBudgetError& e) {
        std::cerr << "node budget: " << e.what() << '\n';
        return kNodeBudget;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return kUsage;
    } catch (const LimitError& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
