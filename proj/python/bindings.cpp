#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ieikit/fixture.hpp"
#include "ieikit/iei.hpp"
#include "ieikit/ood_split.hpp"
#include "ieikit/probe.hpp"
#include "ieikit/report.hpp"
#include "ieikit/selection.hpp"
#include "ieikit/table.hpp"

namespace py = pybind11;
using namespace ieikit;

namespace {

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v, std::vector<py::ssize_t> shape) {
    py::array_t<T> out(shape);
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

template <typename T>
std::vector<T> to_vector(const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
    return {a.data(), a.data() + a.size()};
}

EmbeddingTable build_table(const py::array_t<SampleId, py::array::c_style | py::array::forcecast>& ids,
                           const py::array_t<ClassLabel, py::array::c_style | py::array::forcecast>& labels,
                           const py::array_t<float, py::array::c_style | py::array::forcecast>& features,
                           std::optional<py::array_t<float, py::array::c_style | py::array::forcecast>> logits,
                           std::size_t n_classes, const std::string& domain, std::vector<std::string> class_names,
                           const std::string& provenance) {
    if (features.ndim() != 2) throw Error(ErrorCode::DimMismatch, "features must be 2-D");
    const auto n = static_cast<std::size_t>(features.shape(0));
    const auto dim = static_cast<std::size_t>(features.shape(1));
    if (static_cast<std::size_t>(ids.size()) != n || static_cast<std::size_t>(labels.size()) != n) {
        throw Error(ErrorCode::DimMismatch, "ids, labels and features disagree on the row count");
    }
    if (n_classes == 0) {
        for (py::ssize_t i = 0; i < labels.size(); ++i) {
            n_classes = std::max<std::size_t>(n_classes, labels.data()[i] + std::size_t{1});
        }
    }
    if (logits && (logits->ndim() != 2 || static_cast<std::size_t>(logits->shape(0)) != n ||
                   static_cast<std::size_t>(logits->shape(1)) != n_classes)) {
        throw Error(ErrorCode::DimMismatch, "logits must be n_samples x n_classes");
    }
    std::vector<TableRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i].id = ids.data()[i];
        rows[i].label = labels.data()[i];
        rows[i].features.assign(features.data() + i * dim, features.data() + (i + 1) * dim);
        if (logits) rows[i].logits.assign(logits->data() + i * n_classes, logits->data() + (i + 1) * n_classes);
    }
    TableManifest manifest;
    manifest.class_names = std::move(class_names);
    manifest.provenance = provenance;
    return make_table(std::move(rows), dim, n_classes, logits.has_value(), parse_domain_tag(domain),
                      std::move(manifest));
}

std::string dumps(const nlohmann::json& j) { return j.dump(); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Information evaluation indicators for training-data selection";
    m.attr("__version__") = std::string(kToolkitVersion);

    static const py::handle error_type = py::exception<Error>(m, "IeikitError").release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(error_type.ptr(), (std::string(error_code_name(e.code())) + ": " + e.what()).c_str());
        }
    });

    py::class_<EmbeddingTable>(m, "EmbeddingTable")
        .def(py::init(&build_table), py::arg("ids"), py::arg("labels"), py::arg("features"),
             py::arg("logits") = py::none(), py::arg("n_classes") = 0, py::arg("domain") = "train",
             py::arg("class_names") = std::vector<std::string>{}, py::arg("provenance") = "")
        .def_property_readonly("dim", [](const EmbeddingTable& t) { return t.dim; })
        .def_property_readonly("n_classes", [](const EmbeddingTable& t) { return t.n_classes; })
        .def_property_readonly("domain", [](const EmbeddingTable& t) { return std::string(domain_tag_name(t.domain)); })
        .def_property_readonly("ids", [](const EmbeddingTable& t) {
            return to_array(t.sample_ids, {static_cast<py::ssize_t>(t.size())});
        })
        .def_property_readonly("labels", [](const EmbeddingTable& t) {
            return to_array(t.labels, {static_cast<py::ssize_t>(t.size())});
        })
        .def_property_readonly("features", [](const EmbeddingTable& t) {
            return to_array(t.features, {static_cast<py::ssize_t>(t.size()), static_cast<py::ssize_t>(t.dim)});
        })
        .def_property_readonly("logits", [](const EmbeddingTable& t) -> py::object {
            if (!t.logits) return py::none();
            return to_array(*t.logits, {static_cast<py::ssize_t>(t.size()), static_cast<py::ssize_t>(t.n_classes)});
        })
        .def_property_readonly("class_names", [](const EmbeddingTable& t) { return t.manifest.class_names; })
        .def_property_readonly("provenance", [](const EmbeddingTable& t) { return t.manifest.provenance; })
        .def_property_readonly("checksum", [](const EmbeddingTable& t) { return payload_checksum(t); })
        .def("__len__", &EmbeddingTable::size)
        .def("__eq__", [](const EmbeddingTable& a, const EmbeddingTable& b) { return a == b; })
        .def("subset", [](const EmbeddingTable& t, std::vector<SampleId> ids) { return subset(t, ids); })
        .def("merge", [](const EmbeddingTable& a, const EmbeddingTable& b) { return merge(a, b); })
        .def("save", [](const EmbeddingTable& t, const std::string& path) { save_table(t, path); })
        .def("to_bytes", [](const EmbeddingTable& t) {
            const auto bytes = encode_table(t);
            return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        })
        .def_static("load", [](const std::string& path) { return load_table(path); })
        .def_static("from_bytes", [](const py::bytes& b) {
            const std::string s = b;
            return decode_table(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
        });

    py::class_<ScoreTable>(m, "ScoreTable")
        .def_property_readonly("indicator", [](const ScoreTable& s) { return std::string(indicator_name(s.indicator)); })
        .def_property_readonly("n_classes", [](const ScoreTable& s) { return s.n_classes; })
        .def_property_readonly("ids", [](const ScoreTable& s) {
            return to_array(s.sample_ids, {static_cast<py::ssize_t>(s.size())});
        })
        .def_property_readonly("labels", [](const ScoreTable& s) {
            return to_array(s.labels, {static_cast<py::ssize_t>(s.size())});
        })
        .def_property_readonly("scores", [](const ScoreTable& s) {
            return to_array(s.scores, {static_cast<py::ssize_t>(s.size())});
        })
        .def("__len__", &ScoreTable::size)
        .def("to_csv", [](const ScoreTable& s) { return scores_to_csv(s); })
        .def_static("from_csv", [](const std::string& text) { return scores_from_csv(text); });

    m.def(
        "score",
        [](const EmbeddingTable& table, const std::string& indicator, std::optional<EmbeddingTable> prototypes_from,
           bool l2_normalize) {
            const Indicator ind = parse_indicator(indicator);
            const ScoringOptions options{l2_normalize};
            ClassPrototypes protos;
            if (ind != Indicator::probability_entropy) {
                protos = class_prototypes(prototypes_from ? *prototypes_from : table, options);
            }
            return score_table(ind, table, protos, options);
        },
        py::arg("table"), py::arg("indicator") = "distance-entropy", py::arg("prototypes_from") = py::none(),
        py::arg("l2_normalize") = false, "Score every row with an indicator.");

    m.def("softmax", [](std::vector<double> x) { return softmax(x); }, py::arg("logits"));
    m.def("shannon_entropy", [](std::vector<double> p) { return shannon_entropy(p); }, py::arg("p"));

    m.def("_class_stats", [](const ScoreTable& s) { return dumps(to_json(aci(class_distribution_stats(s)))); });
    m.def(
        "_select",
        [](const ScoreTable& s, std::size_t budget, const std::string& scheme, const std::string& direction,
           bool allow_exhaustion) {
            const auto stats = aci(class_distribution_stats(s));
            return dumps(to_json(select(s, {parse_budget_kind(scheme), budget}, parse_direction(direction), stats,
                                        allow_exhaustion)));
        },
        py::arg("scores"), py::arg("budget"), py::arg("scheme") = "balanced", py::arg("direction") = "goodset",
        py::arg("allow_exhaustion") = false);
    m.def(
        "_migration_split",
        [](const EmbeddingTable& train, const EmbeddingTable& test, double fraction, bool per_class) {
            return dumps(to_json(
                migration_split(migration_distances(train, test_domain_prototypes(test)), fraction, per_class)));
        },
        py::arg("train"), py::arg("test"), py::arg("fraction") = 0.4, py::arg("per_class") = true);

    py::class_<ProbeModel>(m, "ProbeModel")
        .def_property_readonly("kind", [](const ProbeModel& p) { return std::string(probe_kind_name(p.config.kind)); })
        .def_property_readonly("train_accuracy", [](const ProbeModel& p) { return p.train_accuracy; })
        .def_property_readonly("loss_history", [](const ProbeModel& p) { return p.loss_history; })
        .def("predict_logits", [](const ProbeModel& p, const EmbeddingTable& t) {
            return to_array(predict_logits(p, t), {static_cast<py::ssize_t>(t.size()), static_cast<py::ssize_t>(p.n_classes)});
        })
        .def("predict", [](const ProbeModel& p, const EmbeddingTable& t) {
            return to_array(predict_labels(p, t), {static_cast<py::ssize_t>(t.size())});
        })
        .def("evaluate", [](const ProbeModel& p, const EmbeddingTable& t) { return evaluate(p, t); })
        .def("attach_logits", [](const ProbeModel& p, const EmbeddingTable& t) { return attach_logits(p, t); })
        .def("save", [](const ProbeModel& p, const std::string& path) { save_probe(p, path); })
        .def_static("load", [](const std::string& path) { return load_probe(path); });

    m.def(
        "fit_probe",
        [](const EmbeddingTable& train, const std::string& kind, double step, std::uint32_t epochs, double l2,
           std::uint64_t seed) {
            return fit_probe(train, ProbeConfig{parse_probe_kind(kind), step, epochs, l2, seed});
        },
        py::arg("train"), py::arg("kind") = "linear", py::arg("step") = 0.1, py::arg("epochs") = 200,
        py::arg("l2") = 1e-4, py::arg("seed") = 42);

    m.def(
        "_simulate",
        [](const std::string& mode, const EmbeddingTable& universe, const EmbeddingTable& eval,
           const std::string& arm, const std::string& indicator, const std::string& scheme, std::size_t round_budget,
           std::size_t rounds, double base_fraction, const std::string& probe, double step, std::uint32_t epochs,
           double l2, std::uint64_t seed) {
            if (mode != "add" && mode != "reduce") throw Error(ErrorCode::InvalidArgument, "mode must be add or reduce");
            const bool adding = mode == "add";
            LoopOptions o;
            o.indicator = parse_indicator(indicator);
            o.scheme = parse_budget_kind(scheme);
            o.round_budget = round_budget;
            o.rounds = rounds;
            o.probe = ProbeConfig{parse_probe_kind(probe), step, epochs, l2, seed};
            o.arm = arm;
            if (arm == "random") {
                o.provider = random_provider(seed);
                o.score_label = "random";
            } else if (arm == "HID" || arm == "LID") {
                o.direction = ((arm == "HID") == adding) ? Direction::goodset : Direction::badset;
            } else {
                throw Error(ErrorCode::InvalidArgument, "arm must be HID, LID or random");
            }
            py::gil_scoped_release release;
            CurveRecord curve;
            if (adding) {
                const auto [base, pool] = random_base_split(universe, base_fraction, seed);
                curve = addition_loop(base, pool, eval, o);
            } else {
                curve = reduction_loop(universe, eval, o);
            }
            return dumps(to_json(curve));
        },
        py::arg("mode"), py::arg("universe"), py::arg("eval"), py::arg("arm") = "HID",
        py::arg("indicator") = "distance-entropy", py::arg("scheme") = "balanced", py::arg("round_budget") = 0,
        py::arg("rounds") = 9, py::arg("base_fraction") = 0.1, py::arg("probe") = "linear", py::arg("step") = 0.1,
        py::arg("epochs") = 200, py::arg("l2") = 1e-4, py::arg("seed") = 42);

    m.def(
        "make_fixture",
        [](std::size_t classes, std::size_t dim, std::size_t per_class, std::size_t eval_per_class, double separation,
           double noise, double anisotropy, double difficulty_spread, double separation_spread, double shift,
           std::uint64_t seed) {
            MixtureSpec spec{classes, dim, separation, noise, difficulty_spread, anisotropy, separation_spread};
            if (shift > 0.0) {
                auto f = make_ood_fixture(spec, per_class, eval_per_class, shift, seed);
                return std::make_pair(std::move(f.train), std::move(f.test));
            }
            auto f = make_iid_fixture(spec, per_class, eval_per_class, seed);
            return std::make_pair(std::move(f.universe), std::move(f.eval));
        },
        py::arg("classes") = 10, py::arg("dim") = 16, py::arg("per_class") = 500, py::arg("eval_per_class") = 200,
        py::arg("separation") = 3.0, py::arg("noise") = 1.0, py::arg("anisotropy") = 1.0,
        py::arg("difficulty_spread") = 0.0, py::arg("separation_spread") = 0.0, py::arg("shift") = 0.0,
        py::arg("seed") = 42,
        "Synthetic Gaussian mixture: (universe, eval), or (train, test) when shift > 0.");
}
