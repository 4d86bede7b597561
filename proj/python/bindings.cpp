// Python bindings for the main operations: distance transform, level-set
// conversion, the classic baseline, phantoms, metrics, and trained-model
// inference. Fields cross the boundary as 2-D numpy arrays (float64 for
// scalar fields, uint8 for masks), row-major.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rlseg/config.hpp"
#include "rlseg/distance.hpp"
#include "rlseg/image_io.hpp"
#include "rlseg/levelset.hpp"
#include "rlseg/metrics.hpp"
#include "rlseg/phantom.hpp"
#include "rlseg/pipeline.hpp"

namespace py = pybind11;
using namespace rlseg;

namespace {

ScalarField2D field_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw ShapeError("expected a 2-D array");
    ScalarField2D f{Grid2D(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)))};
    std::copy(arr.data(), arr.data() + f.values.size(), f.values.begin());
    return f;
}

py::array_t<double> array_from_field(const ScalarField2D& f) {
    py::array_t<double> arr({f.grid.height, f.grid.width});
    std::copy(f.values.begin(), f.values.end(), arr.mutable_data());
    return arr;
}

BinaryMask mask_from_array(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw ShapeError("expected a 2-D array");
    BinaryMask m{Grid2D(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)))};
    for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] = arr.data()[i] ? 1 : 0;
    return m;
}

py::array_t<std::uint8_t> array_from_mask(const BinaryMask& m) {
    py::array_t<std::uint8_t> arr({m.grid.height, m.grid.width});
    std::copy(m.values.begin(), m.values.end(), arr.mutable_data());
    return arr;
}

} // namespace

PYBIND11_MODULE(_rlseg, m) {
    m.doc() = "Recurrent level-set segmentation engine";

    py::register_exception<Error>(m, "RlsegError");

    py::class_<EnergyWeights>(m, "EnergyWeights")
        .def(py::init<>())
        .def_readwrite("mu", &EnergyWeights::mu)
        .def_readwrite("nu", &EnergyWeights::nu)
        .def_readwrite("alpha", &EnergyWeights::alpha)
        .def_readwrite("lambda1", &EnergyWeights::lambda1)
        .def_readwrite("lambda2", &EnergyWeights::lambda2)
        .def_readwrite("epsilon", &EnergyWeights::epsilon);

    py::class_<EvolutionConfig>(m, "EvolutionConfig")
        .def(py::init<>())
        .def_readwrite("eta", &EvolutionConfig::eta)
        .def_readwrite("inner_iters", &EvolutionConfig::inner_iters)
        .def_readwrite("nsteps", &EvolutionConfig::nsteps)
        .def_readwrite("include_supervision_in_evolution",
                       &EvolutionConfig::include_supervision_in_evolution);

    py::class_<Model>(m, "Model");

    m.def("heaviside", &heaviside, py::arg("tau"), py::arg("epsilon"));
    m.def("dirac", &dirac, py::arg("tau"), py::arg("epsilon"));

    m.def(
        "edt",
        [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& mask) {
            return array_from_field(edt(mask_from_array(mask)));
        },
        py::arg("mask"), "Exact Euclidean distance to the nearest zero pixel");

    m.def(
        "to_levelset",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& y,
           double threshold) {
            ConversionOptions opts;
            opts.binarize_threshold = threshold;
            return array_from_field(to_levelset(field_from_array(y), opts));
        },
        py::arg("y"), py::arg("threshold") = 0.5,
        "Signed, normalized distance field of the binarized input");

    m.def(
        "initialize_phi",
        [](int width, int height, const std::string& kind, double size_param) {
            const PhiInit init =
                kind == "checkerboard" ? PhiInit::checkerboard : PhiInit::centered_circle;
            return array_from_field(initialize_phi(Grid2D(width, height), init, size_param));
        },
        py::arg("width"), py::arg("height"), py::arg("kind"), py::arg("size_param"));

    m.def(
        "chan_vese_segment",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& image,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& phi0,
           const EnergyWeights& w, double eta, int max_iters) {
            EvolutionConfig cfg;
            cfg.eta = eta;
            const SegmentationResult r =
                chan_vese_segment(field_from_array(image), field_from_array(phi0), w, cfg,
                                  max_iters);
            return py::make_tuple(array_from_mask(r.mask), array_from_field(r.phi), r.iterations);
        },
        py::arg("image"), py::arg("phi0"), py::arg("weights"), py::arg("eta") = 0.5,
        py::arg("max_iters") = 500, "Classic two-region baseline; returns (mask, phi, iterations)");

    m.def(
        "generate_phantom",
        [](int width, int height, const std::string& shape, double radius, double noise_sigma,
           double inhomogeneity, std::uint64_t seed) {
            PhantomSpec spec;
            spec.width = width;
            spec.height = height;
            spec.shape = shape == "blob"      ? PhantomShape::blob
                         : shape == "ellipse" ? PhantomShape::ellipse
                                              : PhantomShape::disk;
            spec.radius = radius;
            spec.ellipse_a = radius;
            spec.ellipse_b = 0.6 * radius;
            spec.noise_sigma = noise_sigma;
            spec.inhomogeneity_strength = inhomogeneity;
            spec.seed = seed;
            const Phantom p = generate_phantom(spec);
            return py::make_tuple(array_from_field(p.image), array_from_mask(p.gt));
        },
        py::arg("width"), py::arg("height"), py::arg("shape") = "disk", py::arg("radius") = 12.0,
        py::arg("noise_sigma") = 0.0, py::arg("inhomogeneity") = 0.0, py::arg("seed") = 0,
        "Synthetic phantom; returns (image, ground_truth)");

    m.def("dice", [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& p,
                     const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& t) {
        return dice(mask_from_array(p), mask_from_array(t));
    });
    m.def("sensitivity",
          [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& p,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& t) {
              return sensitivity(mask_from_array(p), mask_from_array(t));
          });
    m.def("specificity",
          [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& p,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& t) {
              return specificity(mask_from_array(p), mask_from_array(t));
          });
    m.def("hausdorff95",
          [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& p,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& t) {
              return hausdorff95(mask_from_array(p), mask_from_array(t));
          });

    m.def("load_model", &load_model_bundle, py::arg("bundle_dir"));
    m.def(
        "segment",
        [](const Model& model, const py::array_t<double, py::array::c_style | py::array::forcecast>& image) {
            const ForwardResult r = recurrent_forward(model, field_from_array(image), nullptr);
            py::list energies;
            for (const auto& s : r.trace.steps) energies.append(s.energy);
            return py::make_tuple(array_from_mask(r.mask), energies);
        },
        py::arg("model"), py::arg("image"),
        "Recurrent forward pass; returns (mask, per-step energies)");
}
