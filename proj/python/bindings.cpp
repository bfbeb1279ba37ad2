#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "upbwit/decay_fit.hpp"
#include "upbwit/gilbert.hpp"
#include "upbwit/upb_tiles.hpp"
#include "upbwit/witness.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace upbwit;

namespace {

py::dict witness_dict(const WitnessReport& w) {
  return py::dict("w"_a = w.w.matrix(), "lambda_"_a = w.lambda,
                  "value_on_rho0"_a = w.value_on_rho0, "valid"_a = w.valid,
                  "hyperplane_distance"_a = w.hyperplane_distance,
                  "saturator"_a = w.saturator.joint());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "UPB bound-entangled states, Gilbert approximation and witnesses";

  py::register_exception<NumericalFault>(m, "NumericalFault", PyExc_ArithmeticError);

  m.def("enumerate_layouts", [](int d1, int d2) {
    std::vector<std::string> names;
    for (const auto& t : enumerate_layouts({d1, d2})) names.push_back(t.name());
    return names;
  }, "d1"_a, "d2"_a);

  m.def("build_state", [](const std::string& name) {
    const UpbState s = build_state(TileLayout::parse(name));
    return py::dict("rho"_a = s.rho.matrix(), "support"_a = s.support.matrix(),
                    "d1"_a = s.layout.dims().d1, "d2"_a = s.layout.dims().d2);
  }, "layout"_a);

  m.def("partial_transpose", [](const CMatrix& a, int d1, int d2) {
    return partial_transpose(HermitianOp(a), {d1, d2}).matrix();
  }, "a"_a, "d1"_a, "d2"_a);

  m.def("hs_distance", [](const CMatrix& a, const CMatrix& b) {
    return hs_distance(HermitianOp(a), HermitianOp(b));
  }, "a"_a, "b"_a);

  m.def("run_gilbert", [](const CMatrix& rho0, int d1, int d2, long long corrections,
                          std::uint64_t seed, bool real_only, int log_every) {
    GilbertConfig cfg;
    cfg.max_corrections = corrections;
    cfg.seed = seed;
    cfg.real_only = real_only;
    cfg.log_every = log_every;
    GilbertState s = [&] {
      py::gil_scoped_release release;
      return run(DensityMatrix(HermitianOp(rho0)), {d1, d2}, cfg);
    }();
    std::vector<long long> c;
    std::vector<double> d2s;
    for (const auto& p : s.trace().points) c.push_back(p.correction), d2s.push_back(p.squared_distance);
    return py::dict("rho1"_a = s.rho1().matrix(), "corrections"_a = c,
                    "squared_distances"_a = d2s, "distance"_a = s.distance(),
                    "trials"_a = s.trace().trials_used, "halt"_a = to_string(s.halt_reason()));
  }, "rho0"_a, "d1"_a, "d2"_a, "corrections"_a = 1000, "seed"_a = 0, "real_only"_a = false,
     "log_every"_a = 50);

  m.def("fit_decay", [](const std::vector<long long>& corrections,
                        const std::vector<double>& squared_distances) {
    if (corrections.size() != squared_distances.size())
      throw std::invalid_argument("fit_decay: length mismatch");
    GilbertTrace t;
    for (std::size_t k = 0; k < corrections.size(); ++k)
      t.points.push_back({corrections[k], squared_distances[k]});
    const DecayFit f = fit_decay(t);
    return py::dict("a"_a = f.a, "sqrt_a"_a = f.sqrt_a(), "b"_a = f.b, "r"_a = f.r,
                    "classification"_a = to_string(f.classification));
  }, "corrections"_a, "squared_distances"_a);

  m.def("gilbert_witness", [](const CMatrix& rho0, const CMatrix& rho1, int d1, int d2,
                              int restarts, std::uint64_t seed) {
    Rng rng(seed);
    return witness_dict(gilbert_witness(DensityMatrix(HermitianOp(rho0)),
                                        DensityMatrix::assume_valid(HermitianOp(rho1)),
                                        {d1, d2}, restarts, rng));
  }, "rho0"_a, "rho1"_a, "d1"_a, "d2"_a, "restarts"_a = kDefaultLambdaRestarts, "seed"_a = 0);

  m.def("bgr_witness", [](const std::string& name, int restarts, std::uint64_t seed) {
    Rng rng(seed);
    return witness_dict(bgr_witness(build_state(TileLayout::parse(name)), restarts, rng));
  }, "layout"_a, "restarts"_a = kDefaultLambdaRestarts, "seed"_a = 0);

  m.def("hyperplane_distance", [](const CMatrix& w, const CMatrix& rho0, const CVector& a,
                                  const CVector& b) {
    return hyperplane_distance(HermitianOp(w), DensityMatrix(HermitianOp(rho0)),
                               ProductVector::normalized(a, b));
  }, "w"_a, "rho0"_a, "a"_a, "b"_a);
}
