#include <chrono>
#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "addperm/cnf.hpp"
#include "addperm/errors.hpp"
#include "addperm/matrix.hpp"
#include "addperm/permanent.hpp"

namespace py = pybind11;
using namespace addperm;

namespace {

py::int_ toPyInt(const BigInt& v) {
    PyObject* obj = PyLong_FromString(v.get_str().c_str(), nullptr, 10);
    if (!obj) throw py::error_already_set();
    return py::reinterpret_steal<py::int_>(obj);
}

RunLimits makeLimits(std::optional<double> timeoutSecs, std::size_t nodeBudget) {
    RunLimits l;
    l.nodeBudget = nodeBudget;
    if (timeoutSecs) l.timeout = std::chrono::duration<double>(*timeoutSecs);
    return l;
}

py::dict resultDict(const PermanentResult& r) {
    py::dict d;
    d["value"] = toPyInt(r.value);
    d["algorithm"] = std::string(toString(r.algorithm));
    d["heuristic"] = r.heuristic ? py::object(py::str(std::string(toString(*r.heuristic)))) : py::object(py::none());
    d["wall_time_ms"] = r.stats.wallTimeMillis;
    d["peak_add_nodes"] = r.stats.peakAddNodes;
    d["total_add_nodes_created"] = r.stats.totalAddNodesCreated;
    d["clusters_processed"] = r.stats.clustersProcessed;
    return d;
}

}  // namespace

PYBIND11_MODULE(_addperm, mod) {
    mod.doc() = "Permanents of 0-1 matrices via algebraic decision diagrams";

    static py::exception<ParseError> parseError(mod, "ParseError", PyExc_ValueError);
    static py::exception<GenerationError> generationError(mod, "GenerationError", PyExc_RuntimeError);
    static py::exception<LimitError> limitError(mod, "LimitError", PyExc_ValueError);
    static py::exception<TimeoutError> timeoutError(mod, "TimeoutError", PyExc_TimeoutError);
    static py::exception<NodeBudgetError> nodeBudgetError(mod, "NodeBudgetError", PyExc_MemoryError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            parseError(e.what());
        } catch (const GenerationError& e) {
            generationError(e.what());
        } catch (const LimitError& e) {
            limitError(e.what());
        } catch (const TimeoutError& e) {
            timeoutError(e.what());
        } catch (const NodeBudgetError& e) {
            nodeBudgetError(e.what());
        }
    });

    py::class_<Matrix01>(mod, "Matrix01")
        .def(py::init<int>(), py::arg("n"))
        .def_static("from_rows", [](const std::vector<std::vector<int>>& rows) { return Matrix01::fromRows(rows); })
        .def_static("all_ones", &Matrix01::allOnes)
        .def_static("identity", &Matrix01::identity)
        .def_static("tridiagonal", &Matrix01::tridiagonal)
        .def_property_readonly("n", &Matrix01::size)
        .def_property_readonly("source", &Matrix01::source)
        .def("__len__", &Matrix01::size)
        .def("__getitem__", [](const Matrix01& m, std::pair<int, int> ij) { return m.at(ij.first, ij.second); })
        .def("__setitem__",
             [](Matrix01& m, std::pair<int, int> ij, bool v) { m.set(ij.first, ij.second, v); })
        .def("count_ones", &Matrix01::countOnes)
        .def("to_rows",
             [](const Matrix01& m) {
                 std::vector<std::vector<int>> rows(static_cast<std::size_t>(m.size()));
                 for (int i = 0; i < m.size(); ++i)
                     for (int j = 0; j < m.size(); ++j) rows[i].push_back(m.at(i, j) ? 1 : 0);
                 return rows;
             })
        .def("to_dense", &serializeDense)
        .def("to_matrix_market", &serializeMatrixMarketPattern)
        .def("__eq__", [](const Matrix01& a, const Matrix01& b) { return a == b; })
        .def("__repr__", [](const Matrix01& m) { return "Matrix01(n=" + std::to_string(m.size()) + ")"; });

    mod.def("parse_dense", [](const std::string& text) { return parseDense(std::string_view(text)); });
    mod.def("parse_matrix_market",
            [](const std::string& text) { return parseMatrixMarketPattern(std::string_view(text)); });
    mod.def("read_matrix_file", [](const std::string& path) { return readMatrixFile(path); });
    mod.def("has_perfect_matching", &hasPerfectMatching);

    mod.def(
        "generate",
        [](const std::string& family, int n, double cf, std::optional<double> rho, std::uint64_t seed,
           int maxRetries) {
            const Family f = familyFromString(family);
            GenParams p{f, n, cf, rho.value_or(f == Family::Dense ? 1.0 : 0.0), seed};
            p.maxRetries = maxRetries;
            return generate(p);
        },
        py::arg("family"), py::arg("n"), py::arg("cf"), py::arg("rho") = py::none(), py::arg("seed") = 1,
        py::arg("max_retries") = 1000);

    mod.def(
        "perm",
        [](const Matrix01& m, const std::string& algorithm, const std::string& heuristic, const std::string& order,
           bool nijenhuisWilf, std::optional<double> timeout, std::size_t nodeBudget) {
            PermConfig c;
            c.algorithm = algorithmFromString(algorithm);
            c.heuristic = heuristicFromString(heuristic);
            c.rankOrder = rankOrderFromString(order);
            c.nijenhuisWilf = nijenhuisWilf;
            c.limits = makeLimits(timeout, nodeBudget);
            PermanentResult r;
            {
                py::gil_scoped_release release;
                r = perm(m, c);
            }
            return resultDict(r);
        },
        py::arg("m"), py::arg("algorithm") = "early", py::arg("heuristic") = "bm-list", py::arg("order") = "mcs",
        py::arg("nijenhuis_wilf") = false, py::arg("timeout") = py::none(), py::arg("node_budget") = 50'000'000);

    mod.def("perm_brute_force", [](const Matrix01& m) { return toPyInt(permBruteForce(m).value); });
    mod.def(
        "perm_ryser_gray",
        [](const Matrix01& m, bool nw) { return toPyInt(permRyserGray(m, {}, nw).value); }, py::arg("m"),
        py::arg("nijenhuis_wilf") = false);
    mod.def("perm_monolithic", [](const Matrix01& m) { return toPyInt(permMonolithic(m).value); });
    mod.def(
        "perm_early_abstraction",
        [](const Matrix01& m, const std::string& heuristic, const std::string& order) {
            const VariableOrder eta = rankOrderFromString(order) == RankOrder::Mcs
                                          ? mcsOrder(primalGraph(m))
                                          : VariableOrder::identity(m.size());
            return toPyInt(
                permEarlyAbstraction(m, VariableOrder::identity(m.size()), eta, heuristicFromString(heuristic))
                    .value);
        },
        py::arg("m"), py::arg("heuristic") = "bm-list", py::arg("order") = "mcs");
    mod.def("perm_identical_rows", [](int n, int k) { return toPyInt(permIdenticalRows(n, k)); });

    mod.def("encode_dimacs", [](const Matrix01& m) { return toDimacs(encodePermanent(m)); });
}
