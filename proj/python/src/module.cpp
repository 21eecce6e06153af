#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <memory>
#include <string>
#include <vector>

#include "lpcascade/bench.hpp"
#include "lpcascade/block_projection.hpp"
#include "lpcascade/covariance_pca.hpp"
#include "lpcascade/dataset_io.hpp"
#include "lpcascade/error.hpp"
#include "lpcascade/index_io.hpp"
#include "lpcascade/lp_norms.hpp"
#include "lpcascade/oracle.hpp"
#include "lpcascade/subspace_tree.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace lpcascade;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IdArray = py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast>;

// 1, 2.0, "l4", "inf", math.inf
NormOrder to_norm(const py::handle& p) {
  if (py::isinstance<py::str>(p)) return NormOrder::parse(p.cast<std::string>());
  const double v = p.cast<double>();
  return std::isinf(v) && v > 0 ? NormOrder::infinity() : NormOrder::finite(v);
}

py::object from_norm(NormOrder p) {
  if (p.is_infinite()) return py::float_(INFINITY);
  return py::float_(p.p());
}

std::vector<double> vec(const Array& a) {
  if (a.ndim() != 1) throw InputError("expected a 1-d array");
  return std::vector<double>(a.data(), a.data() + a.size());
}

DataSet to_dataset(const Array& a, const std::optional<IdArray>& ids) {
  if (a.ndim() != 2) throw InputError("expected a 2-d array of shape (s, n)");
  std::vector<double> values(a.data(), a.data() + a.size());
  std::vector<std::uint64_t> id_values;
  if (ids) id_values.assign(ids->data(), ids->data() + ids->size());
  return DataSet(static_cast<std::size_t>(a.shape(1)), std::move(values), std::move(id_values));
}

Array to_array(const DataSet& d) {
  Array out({d.size(), d.dim()});
  std::copy(d.values().begin(), d.values().end(), out.mutable_data());
  return out;
}

Array matrix(std::span<const double> values, std::size_t rows, std::size_t cols) {
  Array out({rows, cols});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

py::dict report_dict(const QueryReport& r) {
  py::dict d;
  std::vector<std::uint64_t> ids;
  std::vector<double> dists;
  for (const auto& m : r.matches) {
    ids.push_back(m.id);
    dists.push_back(m.distance);
  }
  d["ids"] = ids;
  d["distances"] = dists;
  d["survivors"] = r.survivors;
  d["cost_s"] = r.cost_s;
  d["cost_l"] = r.cost_l;
  d["ratio"] = r.ratio;
  d["epsilon"] = r.epsilon;
  return d;
}

py::dict row_dict(const BenchRow& r) {
  py::dict d;
  d["mode"] = std::string(to_string(r.mode));
  d["p"] = from_norm(r.norm);
  d["epsilon"] = r.epsilon;
  d["mean_cost_s"] = r.mean_cost_s;
  d["mean_ratio"] = r.mean_ratio;
  d["mean_sigma"] = r.mean_sigma;
  d["fitted_const"] = r.fitted_const;
  d["estimated_cost"] = r.estimated_cost;
  d["queries"] = r.queries;
  d["cost_l"] = r.cost_l;
  return d;
}

// A built or loaded index together with the data it refers to.
struct PyIndex {
  std::shared_ptr<const DataSet> data;
  SubspaceIndex index;
};

SubspaceIndex build_index(std::shared_ptr<const DataSet> data, const std::vector<std::size_t>& schedule,
                          const std::string& mode, const py::handle& p, const std::string& moment) {
  BuildOptions opts{parse_projection_mode(mode), to_norm(p), parse_moment_kind(moment)};
  py::gil_scoped_release release;
  return SubspaceIndex::build(std::move(data), DimensionSchedule(schedule), opts);
}

}  // namespace

PYBIND11_MODULE(_lpcascade, m) {
  m.doc() = "Exact l_p range search over cascaded 1-Lipschitz projections";

  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<InvariantError> invariant_error(m, "InvariantError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr ep) {
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const InputError& e) {
      py::set_error(input_error, e.what());
    } catch (const InvariantError& e) {
      py::set_error(invariant_error, e.what());
    }
  });

  m.def("lp_norm", [](const Array& v, const py::handle& p) { return lp_norm(vec(v), to_norm(p)); },
        py::arg("v"), py::arg("p"));
  m.def("lp_distance",
        [](const Array& x, const Array& y, const py::handle& p) { return lp_distance(vec(x), vec(y), to_norm(p)); },
        py::arg("x"), py::arg("y"), py::arg("p"));
  m.def("check_norm_equivalence",
        [](const Array& v, const py::handle& q, const py::handle& p) {
          return check_norm_equivalence(vec(v), to_norm(q), to_norm(p));
        },
        py::arg("v"), py::arg("q"), py::arg("p"));
  m.def("dual_exponent", [](const py::handle& p) { return from_norm(to_norm(p).dual()); }, py::arg("p"));

  m.def("orthogonal_feature", [](const Array& b, const py::handle& p) { return orthogonal_feature(vec(b), to_norm(p)); },
        py::arg("block"), py::arg("p"));
  m.def("adaptive_feature",
        [](const Array& b, const Array& direction, const py::handle& p) {
          const auto norm = to_norm(p);
          return adaptive_feature(vec(b), BlockProjector::adaptive(vec(direction), norm), norm);
        },
        py::arg("block"), py::arg("direction"), py::arg("p"));
  m.def("diversion",
        [](const Array& direction) {
          const auto z = vec(direction);
          return diversion(BlockProjector::adaptive(z, NormOrder::finite(2)), z.size());
        },
        py::arg("direction"));
  m.def("q_mapping_norm", [](std::size_t mm, const py::handle& p) { return q_mapping_norm(mm, to_norm(p)); },
        py::arg("m"), py::arg("p"));
  m.def("project_orthogonal",
        [](const Array& x, std::size_t dim_out, const py::handle& p) {
          const auto level = ProjectionLevel::orthogonal(BlockPartition::split(static_cast<std::size_t>(x.size()), dim_out), to_norm(p));
          return level.project(vec(x));
        },
        py::arg("x"), py::arg("dim_out"), py::arg("p"));

  m.def("covariance",
        [](const Array& blocks, const std::string& moment) {
          if (blocks.ndim() != 2) throw InputError("expected a 2-d array of blocks");
          const auto mdim = static_cast<std::size_t>(blocks.shape(1));
          CovarianceAccumulator acc(mdim);
          for (py::ssize_t r = 0; r < blocks.shape(0); ++r) {
            acc.add(std::span<const double>(blocks.data() + r * mdim, mdim));
          }
          const auto c = acc.finalize(parse_moment_kind(moment));
          return matrix(c.values(), mdim, mdim);
        },
        py::arg("blocks"), py::arg("moment") = "centered");
  m.def("first_principal_component",
        [](const Array& c) {
          if (c.ndim() != 2 || c.shape(0) != c.shape(1)) throw InputError("expected a square matrix");
          const auto pc = first_principal_component(SymmetricMatrix::from_values(
              static_cast<std::size_t>(c.shape(0)), std::vector<double>(c.data(), c.data() + c.size())));
          return py::make_tuple(pc.direction, pc.eigenvalue, pc.converged);
        },
        py::arg("c"));

  m.def("generate",
        [](std::size_t s, std::size_t n, const std::string& model, std::size_t block_size, double rho,
           std::size_t window, std::uint64_t seed) {
          SyntheticSpec spec{s, n, parse_synthetic_model(model), block_size, rho, window, seed};
          return to_array(generate(spec));
        },
        py::arg("s"), py::arg("n"), py::arg("model") = "iid", py::arg("block_size") = 4, py::arg("rho") = 0.8,
        py::arg("window") = 4, py::arg("seed") = 7);
  m.def("load_vectors", [](const fs::path& path) { return to_array(load_vectors(path)); }, py::arg("path"));
  m.def("save_fvecs", [](const Array& a, const fs::path& path) { save_fvecs(to_dataset(a, std::nullopt), path); },
        py::arg("data"), py::arg("path"));
  m.def("save_csv", [](const Array& a, const fs::path& path) { save_csv(to_dataset(a, std::nullopt), path); },
        py::arg("data"), py::arg("path"));

  m.def("brute_force_range",
        [](const Array& data, const Array& y, double eps, const py::handle& p) {
          const auto d = to_dataset(data, std::nullopt);
          const auto r = brute_force_range(d, vec(y), eps, to_norm(p));
          QueryReport rep;
          rep.matches = r.matches;
          rep.cost_l = r.cost_l;
          py::dict out = report_dict(rep);
          return out;
        },
        py::arg("data"), py::arg("y"), py::arg("epsilon"), py::arg("p"));
  m.def("calibrate_epsilon",
        [](const Array& data, const py::handle& p, std::size_t target_nn, std::size_t sample_size,
           std::uint64_t seed) {
          const auto d = to_dataset(data, std::nullopt);
          return calibrate_epsilon(d, {sample_size, target_nn, seed}, to_norm(p));
        },
        py::arg("data"), py::arg("p"), py::arg("target_nn") = 52, py::arg("sample_size") = 400,
        py::arg("seed") = 1);

  m.def("cascade_cost",
        [](const std::vector<std::size_t>& schedule, const std::vector<std::size_t>& survivors, std::size_t s) {
          return cascade_cost(DimensionSchedule(schedule), survivors, s);
        },
        py::arg("schedule"), py::arg("survivors"), py::arg("s"));
  m.def("estimate_cost",
        [](const std::vector<std::size_t>& schedule, std::size_t s, double c) {
          return estimate_cost(DimensionSchedule(schedule), s, c);
        },
        py::arg("schedule"), py::arg("s"), py::arg("const"));

  py::class_<PyIndex>(m, "Index")
      .def_static(
          "build",
          [](const Array& data, const std::vector<std::size_t>& schedule, const std::string& mode,
             const py::handle& p, const std::string& moment, std::optional<IdArray> ids) {
            auto d = std::make_shared<const DataSet>(to_dataset(data, ids));
            auto index = build_index(d, schedule, mode, p, moment);
            return PyIndex{d, std::move(index)};
          },
          py::arg("data"), py::arg("schedule"), py::arg("mode") = "orthogonal", py::arg("p") = 2.0,
          py::arg("moment") = "raw", py::arg("ids") = py::none())
      .def_static(
          "load",
          [](const fs::path& path, const Array& data, std::optional<IdArray> ids) {
            auto d = std::make_shared<const DataSet>(to_dataset(data, ids));
            auto index = load_index(path, d);
            return PyIndex{d, std::move(index)};
          },
          py::arg("path"), py::arg("data"), py::arg("ids") = py::none())
      .def("save", [](const PyIndex& self, const fs::path& path) { save_index(self.index, path); }, py::arg("path"))
      .def(
          "range_query",
          [](const PyIndex& self, const Array& y, double eps, unsigned threads) {
            const auto q = vec(y);
            QueryReport rep;
            {
              py::gil_scoped_release release;
              rep = self.index.range_query(q, eps, {threads});
            }
            return report_dict(rep);
          },
          py::arg("y"), py::arg("epsilon"), py::arg("threads") = 1)
      .def("project", [](const PyIndex& self, const Array& y) { return self.index.project_query(vec(y)); },
           py::arg("y"))
      .def("features",
           [](const PyIndex& self, std::size_t level) {
             if (level < 1 || level > self.index.depth()) throw InputError("level out of range");
             return matrix(self.index.feature_matrix(level), self.index.size(), self.index.schedule().dim(level));
           },
           py::arg("level"))
      .def_property_readonly("schedule", [](const PyIndex& self) {
        const auto dims = self.index.schedule().dims();
        return std::vector<std::size_t>(dims.begin(), dims.end());
      })
      .def_property_readonly("mode", [](const PyIndex& self) { return std::string(to_string(self.index.mode())); })
      .def_property_readonly("p", [](const PyIndex& self) { return from_norm(self.index.norm()); })
      .def_property_readonly("size", [](const PyIndex& self) { return self.index.size(); })
      .def_property_readonly("diversion", [](const PyIndex& self) {
        std::vector<std::vector<double>> out;
        for (const auto& d : self.index.diagnostics()) out.push_back(d.diversion.per_block);
        return out;
      })
      .def("__len__", [](const PyIndex& self) { return self.index.size(); });

  m.def("run_bench",
        [](const std::map<std::string, std::string>& config) {
          const auto cfg = BenchConfig::from_map(config);
          std::vector<BenchRow> rows;
          {
            py::gil_scoped_release release;
            rows = run_bench(cfg).rows();
          }
          py::list out;
          for (const auto& r : rows) out.append(row_dict(r));
          return out;
        },
        py::arg("config"));
}
