// Python bindings for the main operations: dataset generation, model
// construction, the training schedule, and the evaluation metrics.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "srda/config.hpp"
#include "srda/gradcheck.hpp"
#include "srda/metrics.hpp"
#include "srda/model.hpp"
#include "srda/perturb.hpp"
#include "srda/train.hpp"

namespace py = pybind11;
using namespace srda;

namespace {

using NpArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const NpArray& arr) {
    const auto buf = arr.request();
    if (buf.ndim != 2) throw ShapeError("expected a 2-d array");
    Matrix m(static_cast<std::size_t>(buf.shape[0]), static_cast<std::size_t>(buf.shape[1]));
    const double* src = static_cast<const double*>(buf.ptr);
    std::copy(src, src + m.size(), m.data().begin());
    return m;
}

py::array_t<double> to_numpy(const Matrix& m) {
    py::array_t<double> arr({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), arr.mutable_data());
    return arr;
}

NoisePlan make_plan(const std::string& kind, double epsilon, double vat_xi, int vat_power_iters) {
    NoisePlan plan;
    plan.kind = plan_kind_from_string(kind);
    plan.epsilon = epsilon;
    plan.vat_xi = vat_xi;
    plan.vat_power_iters = vat_power_iters;
    plan.validate();
    return plan;
}

py::dict record_to_dict(const RunRecord& r) {
    py::dict d;
    d["epoch"] = r.epoch;
    d["step"] = r.step;
    d["source_loss"] = r.source_loss;
    d["mean_lsd"] = r.mean_lsd;
    d["target_accuracy"] =
        r.target_accuracy ? py::object(py::float_(*r.target_accuracy)) : py::object(py::none());
    d["hdh_proxy"] = r.hdh_proxy;
    return d;
}

} // namespace

PYBIND11_MODULE(_srda, m) {
    m.doc() = "smoothness-regularized unsupervised domain adaptation";

    py::register_exception<Error>(m, "SrdaError");

    py::class_<Dataset>(m, "Dataset")
        .def(py::init([](const NpArray& features, py::object labels, std::string name) {
                 Dataset ds;
                 ds.features = to_matrix(features);
                 ds.name = std::move(name);
                 if (!labels.is_none()) {
                     ds.labels = labels.cast<std::vector<int>>();
                     int maxy = 0;
                     for (int y : *ds.labels) maxy = std::max(maxy, y);
                     ds.num_classes = maxy + 1;
                     ds.validate();
                 }
                 return ds;
             }),
             py::arg("features"), py::arg("labels") = py::none(), py::arg("name") = "dataset")
        .def_property_readonly("features", [](const Dataset& ds) { return to_numpy(ds.features); })
        .def_property_readonly("labels",
                               [](const Dataset& ds) -> py::object {
                                   if (!ds.labels) return py::none();
                                   return py::cast(*ds.labels);
                               })
        .def_readonly("name", &Dataset::name)
        .def_readonly("num_classes", &Dataset::num_classes)
        .def("__len__", &Dataset::size)
        .def("__repr__", [](const Dataset& ds) {
            return "<Dataset '" + ds.name + "' n=" + std::to_string(ds.size()) +
                   " dim=" + std::to_string(ds.dim()) +
                   (ds.labeled() ? " labeled>" : " unlabeled>");
        });

    m.def(
        "two_moons",
        [](std::size_t n, double noise_sd, std::uint64_t seed) {
            Rng rng(seed);
            return gen_two_moons(n, noise_sd, rng);
        },
        py::arg("n"), py::arg("noise_sd") = 0.1, py::arg("seed") = 1);
    m.def(
        "blobs",
        [](std::size_t n, std::size_t k, double noise_sd, std::uint64_t seed) {
            Rng rng(seed);
            return gen_blobs(n, k, noise_sd, rng);
        },
        py::arg("n"), py::arg("classes") = 3, py::arg("noise_sd") = 0.5, py::arg("seed") = 1);
    m.def("rotate_domain", &rotate_domain, py::arg("dataset"), py::arg("degrees"));
    m.def("translate_domain", &translate_domain, py::arg("dataset"), py::arg("offset"));
    m.def("standardize", &standardize, py::arg("fit"), py::arg("apply"));
    m.def(
        "subsample",
        [](const Dataset& ds, std::size_t n_keep, std::uint64_t seed) {
            Rng rng(seed);
            return subsample(ds, n_keep, rng);
        },
        py::arg("dataset"), py::arg("n_keep"), py::arg("seed") = 1);
    m.def("load_idx", &load_idx_dataset, py::arg("images_path"), py::arg("labels_path") = "",
          py::arg("name") = "idx");
    m.def("read_csv", &read_dataset_csv_file, py::arg("path"));
    m.def("write_csv", &write_dataset_csv_file, py::arg("dataset"), py::arg("path"));

    m.def("softmax", [](const NpArray& logits) { return to_numpy(softmax(to_matrix(logits))); });
    m.def("cross_entropy", [](const NpArray& q, const NpArray& p) {
        return cross_entropy(to_matrix(q), to_matrix(p));
    });

    py::class_<Model>(m, "Model")
        .def(py::init([](const std::vector<std::size_t>& generator,
                         const std::vector<std::size_t>& classifier, std::uint64_t seed) {
                 Rng rng(seed);
                 return Model(GeneratorSpec{generator}, ClassifierSpec{classifier}, rng);
             }),
             py::arg("generator"), py::arg("classifier"), py::arg("seed") = 1)
        .def_property_readonly("input_width", &Model::input_width)
        .def_property_readonly("feature_width", &Model::feature_width)
        .def_property_readonly("num_classes", &Model::num_classes)
        .def("features",
             [](const Model& mm, const NpArray& x) {
                 return to_numpy(mm.forward_features(to_matrix(x)));
             })
        .def("probabilities",
             [](const Model& mm, const NpArray& x) {
                 return to_numpy(mm.classify(mm.forward_features(to_matrix(x))));
             })
        .def("predict",
             [](const Model& mm, const NpArray& x) { return mm.predict_labels(to_matrix(x)); })
        .def("save", [](const Model& mm, const std::string& path) { save_checkpoint(mm, path); })
        .def_static("load", [](const std::string& path) { return load_checkpoint(path); })
        .def("__repr__", [](const Model& mm) {
            return "<Model " + std::to_string(mm.input_width()) + "->" +
                   std::to_string(mm.feature_width()) + "->" +
                   std::to_string(mm.num_classes()) + " classes>";
        });

    m.def(
        "train",
        [](Model& model, const Dataset& source, const Dataset& target, const std::string& plan,
           std::size_t epochs, std::size_t batch_size, double epsilon, double lr_source,
           double lr_smooth, const std::string& optimizer, double entropy_weight,
           const std::string& entropy_stage, std::size_t warmup_epochs, std::uint64_t seed,
           std::size_t eval_every, double vat_xi, int vat_power_iters) {
            TrainConfig cfg;
            cfg.epochs = epochs;
            cfg.batch_size = batch_size;
            cfg.plan.kind = plan_kind_from_string(plan);
            cfg.plan.epsilon = epsilon;
            cfg.plan.vat_xi = vat_xi;
            cfg.plan.vat_power_iters = vat_power_iters;
            cfg.lr_source = lr_source;
            cfg.lr_smooth = lr_smooth;
            if (optimizer == "adam") cfg.optimizer = OptimizerKind::Adam;
            else if (optimizer == "sgd") cfg.optimizer = OptimizerKind::Sgd;
            else throw InvalidInput("optimizer must be adam or sgd");
            cfg.entropy_weight = entropy_weight;
            if (entropy_stage == "smooth") cfg.entropy_stage = EntropyStage::Smooth;
            else if (entropy_stage == "source") cfg.entropy_stage = EntropyStage::Source;
            else throw InvalidInput("entropy_stage must be smooth or source");
            cfg.warmup_epochs = warmup_epochs;
            cfg.seed = seed;
            cfg.eval_every = eval_every;

            TrainState st = train_schedule(std::move(model), source, target, cfg);
            model = std::move(st.model);
            py::list history;
            for (const auto& rec : st.history) history.append(record_to_dict(rec));
            return history;
        },
        py::arg("model"), py::arg("source"), py::arg("target"), py::arg("plan") = "isotropic",
        py::arg("epochs") = 150, py::arg("batch_size") = 128, py::arg("epsilon") = 0.5,
        py::arg("lr_source") = 0.0, py::arg("lr_smooth") = 0.0, py::arg("optimizer") = "adam",
        py::arg("entropy_weight") = 0.0, py::arg("entropy_stage") = "smooth",
        py::arg("warmup_epochs") = 50, py::arg("seed") = 1, py::arg("eval_every") = 1,
        py::arg("vat_xi") = 0.1, py::arg("vat_power_iters") = 1,
        "Runs the three-step schedule in place; returns the per-epoch history.");

    m.def("accuracy", &accuracy, py::arg("model"), py::arg("dataset"));
    m.def(
        "mean_lsd",
        [](const Model& model, const Dataset& ds, const std::string& plan, double epsilon,
           std::uint64_t seed, double vat_xi, int vat_power_iters) {
            return mean_lsd(model, ds, make_plan(plan, epsilon, vat_xi, vat_power_iters), seed);
        },
        py::arg("model"), py::arg("dataset"), py::arg("plan") = "isotropic",
        py::arg("epsilon") = 0.5, py::arg("seed") = 1, py::arg("vat_xi") = 0.1,
        py::arg("vat_power_iters") = 1);
    m.def(
        "hdh_proxy",
        [](const Model& model, const Dataset& ds, const std::string& plan, double epsilon,
           std::uint64_t seed, double vat_xi, int vat_power_iters) {
            return hdh_proxy(model, ds, make_plan(plan, epsilon, vat_xi, vat_power_iters), seed);
        },
        py::arg("model"), py::arg("dataset"), py::arg("plan") = "isotropic",
        py::arg("epsilon") = 0.5, py::arg("seed") = 1, py::arg("vat_xi") = 0.1,
        py::arg("vat_power_iters") = 1);
    m.def("spearman", [](const std::vector<double>& xs, const std::vector<double>& ys) {
        const TraceResult t = spearman(xs, ys);
        return py::make_tuple(t.rho, t.degenerate);
    });
    m.def(
        "lsd_accuracy_trace",
        [](const py::list& history) {
            std::vector<RunRecord> records;
            for (const auto& item : history) {
                const py::dict d = item.cast<py::dict>();
                RunRecord r;
                r.mean_lsd = d["mean_lsd"].cast<double>();
                if (!d["target_accuracy"].is_none())
                    r.target_accuracy = d["target_accuracy"].cast<double>();
                records.push_back(r);
            }
            const TraceResult t = lsd_accuracy_trace(records);
            return py::make_tuple(t.rho, t.degenerate);
        },
        py::arg("history"),
        "Spearman rank correlation between mean LSD and target accuracy.");

    m.def(
        "gradcheck",
        [](std::uint64_t seed) {
            const auto rep = gradcheck_losses(seed);
            py::dict out;
            for (const auto& e : rep.entries) out[e.loss_name.c_str()] = e.max_rel_error;
            return out;
        },
        py::arg("seed") = 1, "Max relative backprop-vs-finite-difference error per loss.");
}
