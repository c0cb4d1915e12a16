// Copyright 2026 The wmchsh Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "wmchsh/analysis.hpp"
#include "wmchsh/cli.hpp"
#include "wmchsh/error.hpp"
#include "wmchsh/io.hpp"
#include "wmchsh/transient.hpp"

namespace py = pybind11;
using namespace wmchsh;

namespace {

using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

ComplexArray to_numpy(const ComplexMatrix &m) {
    const auto n = static_cast<py::ssize_t>(m.dim());
    ComplexArray out({n, n});
    auto view = out.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < n; ++i) {
        for (py::ssize_t j = 0; j < n; ++j) {
            view(i, j) = m(i, j);
        }
    }
    return out;
}

ComplexMatrix from_numpy(const ComplexArray &a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) {
        throw ValidationError("expected a square matrix");
    }
    const auto n = static_cast<std::size_t>(a.shape(0));
    if (n != 2 && n != 4) {
        throw ValidationError("matrix dimension must be 2 or 4");
    }
    ComplexMatrix m(n);
    auto view = a.unchecked<2>();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = view(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j));
        }
    }
    return m;
}

// {(x, z, p, q): value} for two-sided tables, {(x, z, b): value} for
// one-sided ones; undefined entries map to None.
py::dict table_dict(const WeakJointTable &t) {
    py::dict d;
    for (const auto &e : t.entries()) {
        py::object key;
        if (t.mode() == WeakJointTable::Mode::TwoSided) {
            key = py::make_tuple(e.x, e.z, e.p, e.q);
        } else {
            key = py::make_tuple(e.x, e.z, e.p);
        }
        d[key] = e.value ? py::cast(*e.value) : py::none();
    }
    return d;
}

MeasurementFrame frame_for(WeakBasis basis) {
    return basis == WeakBasis::Z ? MeasurementFrame::standard() : MeasurementFrame::weak_x();
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Weak-measurement CHSH toolkit";
    m.attr("__version__") = kVersion;

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());

    py::enum_<WeakBasis>(m, "WeakBasis").value("Z", WeakBasis::Z).value("X", WeakBasis::X);
    py::enum_<BobSetting>(m, "BobSetting").value("P", BobSetting::P).value("Q", BobSetting::Q);

    py::class_<DensityMatrix>(m, "DensityMatrix")
        .def(py::init([](const ComplexArray &a) { return DensityMatrix(from_numpy(a)); }), py::arg("matrix"))
        .def_property_readonly("matrix", [](const DensityMatrix &r) { return to_numpy(r.matrix()); })
        .def_property_readonly("dim", &DensityMatrix::dim)
        .def("min_eigenvalue", &DensityMatrix::min_eigenvalue)
        .def("is_physical", &DensityMatrix::is_physical, py::arg("tol") = kReconstructionTol);

    m.def("singlet", [] { return DensityMatrix::from_pure(singlet()); });
    m.def("werner", &werner, py::arg("visibility"));
    m.def("compensated_pair", [](double theta, double phi) { return DensityMatrix::from_pure(compensated_pair(theta, phi)); },
          py::arg("theta_deg"), py::arg("phi_rad") = 0.0);
    m.def("tangle", &tangle);
    m.def("concurrence", &concurrence);
    m.def("fidelity_singlet", [](const DensityMatrix &rho) { return fidelity(rho, singlet()); });
    m.def("werner_visibility_for_tangle", &werner_visibility_for_tangle);
    m.def("theta_for_tangle", &theta_for_tangle);

    py::class_<ChshOutcome>(m, "ChshOutcome")
        .def_readonly("p_plus", &ChshOutcome::p_plus)
        .def_readonly("p_minus", &ChshOutcome::p_minus)
        .def_readonly("chsh", &ChshOutcome::chsh_value)
        .def("__repr__", [](const ChshOutcome &o) {
            std::ostringstream s;
            s << "ChshOutcome(p_plus=" << o.p_plus << ", p_minus=" << o.p_minus << ", chsh=" << o.chsh_value << ")";
            return s.str();
        });

    m.def("weak_joint_table",
          [](const DensityMatrix &rho, WeakBasis basis) { return table_dict(weak_joint_table(rho, frame_for(basis))); },
          py::arg("rho"), py::arg("weak_basis") = WeakBasis::Z);
    m.def("weak_joint_one_sided",
          [](const DensityMatrix &rho, BobSetting s, WeakBasis basis) {
              return table_dict(weak_joint_one_sided(rho, frame_for(basis), s));
          },
          py::arg("rho"), py::arg("setting"), py::arg("weak_basis") = WeakBasis::Z);
    m.def("analytic_outcome",
          [](const DensityMatrix &rho, WeakBasis basis) { return analytic_outcome(rho, frame_for(basis)); },
          py::arg("rho"), py::arg("weak_basis") = WeakBasis::Z);
    m.def("transient_outcome",
          [](const DensityMatrix &rho, WeakBasis basis) { return transient_outcome(rho, frame_for(basis)); },
          py::arg("rho"), py::arg("weak_basis") = WeakBasis::Z);

    /// List of (matrix, selection probability) pairs in one-sided table order.
    m.def(
        "transients",
        [](const DensityMatrix &rho, BobSetting s, WeakBasis basis) {
            py::list out;
            for (const auto &t : transient_set(rho, frame_for(basis), s)) {
                out.append(py::make_tuple(to_numpy(t.matrix), t.selection_prob));
            }
            return out;
        },
        py::arg("rho"), py::arg("setting"), py::arg("weak_basis") = WeakBasis::Z);

    py::class_<SourceConfig>(m, "SourceConfig")
        .def(py::init<>())
        .def_readwrite("theta", &SourceConfig::theta)
        .def_readwrite("phi", &SourceConfig::phi)
        .def_readwrite("werner_v", &SourceConfig::werner_v)
        .def_readwrite("pair_rate", &SourceConfig::pair_rate);
    py::class_<ScanConfig>(m, "ScanConfig")
        .def(py::init<>())
        .def_readwrite("slit_width", &ScanConfig::slit_width)
        .def_readwrite("step", &ScanConfig::step)
        .def_readwrite("range", &ScanConfig::range)
        .def_readwrite("dwell", &ScanConfig::dwell)
        .def_readwrite("repeats", &ScanConfig::repeats)
        .def_readwrite("accidental_rate", &ScanConfig::accidental_rate)
        .def("positions", &ScanConfig::positions);
    py::class_<PointerConfig>(m, "PointerConfig")
        .def(py::init<>())
        .def_readwrite("r_H", &PointerConfig::r_H)
        .def_readwrite("r_V", &PointerConfig::r_V)
        .def_readwrite("sigma", &PointerConfig::sigma)
        .def_static("from_ratio", &PointerConfig::from_ratio, py::arg("ratio"), py::arg("sigma") = 350.0);

    py::class_<CountRecord>(m, "CountRecord")
        .def(py::init<>())
        .def_readwrite("condition", &CountRecord::condition)
        .def_readwrite("slit_position", &CountRecord::slit_position)
        .def_readwrite("repeat", &CountRecord::repeat)
        .def_readwrite("coincidences", &CountRecord::coincidences)
        .def_readwrite("accidentals", &CountRecord::accidentals);

    m.def(
        "simulate",
        [](const SourceConfig &src, const ScanConfig &scan, const PointerConfig &pointer, WeakBasis basis,
           std::uint64_t seed, unsigned threads) {
            py::gil_scoped_release release;
            return simulate_run(src, scan, pointer, basis, seed, threads).records;
        },
        py::arg("source") = SourceConfig{}, py::arg("scan") = ScanConfig{}, py::arg("pointer") = PointerConfig{},
        py::arg("weak_basis") = WeakBasis::Z, py::arg("seed") = 0, py::arg("threads") = 1);

    /// Same JSON document the `analyze` command writes.
    m.def(
        "analyze_json",
        [](const std::vector<CountRecord> &records, bool weighted) {
            FitOptions options;
            options.weighted = weighted;
            return io::analysis_json(analyze_records(records, options));
        },
        py::arg("records"), py::arg("weighted") = false);

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "wmchsh");
            std::vector<const char *> argv;
            for (const auto &a : args) {
                argv.push_back(a.c_str());
            }
            std::ostringstream out;
            std::ostringstream err;
            const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
