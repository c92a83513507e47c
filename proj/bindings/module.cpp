// Copyright 2026 The wala Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wala/dataset.hpp"
#include "wala/metrics.hpp"
#include "wala/pipeline.hpp"

namespace py = pybind11;
using namespace wala;

namespace {

WaveletFilterPair filters_from(const std::string& family) {
  if (family == "haar") return WaveletFilterPair::haar();
  if (family == "cdf97") return WaveletFilterPair::cdf97();
  throw ParameterError("family must be 'haar' or 'cdf97'");
}

// Grids cross the boundary as float32 arrays of shape (N, N, N), C order,
// indexed [z, y, x] to match the x-fastest storage.
py::array_t<float> grid_values(const SdfGrid& g) {
  const int n = g.spec.resolution;
  py::array_t<float> out({n, n, n});
  std::copy(g.values.begin(), g.values.end(), out.mutable_data());
  return out;
}

SdfGrid grid_from(
    const GridSpec& spec,
    py::array_t<float, py::array::c_style | py::array::forcecast> values) {
  if (values.ndim() != 3 || values.shape(0) != spec.resolution ||
      values.shape(1) != spec.resolution ||
      values.shape(2) != spec.resolution) {
    throw ParameterError("values must have shape (N, N, N)");
  }
  std::vector<float> v(values.data(), values.data() + values.size());
  return SdfGrid(spec, std::move(v));
}

TriangleMesh mesh_from(
    py::array_t<double, py::array::c_style | py::array::forcecast> vertices,
    py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>
        triangles) {
  if (vertices.ndim() != 2 || vertices.shape(1) != 3) {
    throw ParameterError("vertices must have shape (V, 3)");
  }
  if (triangles.ndim() != 2 || triangles.shape(1) != 3) {
    throw ParameterError("triangles must have shape (T, 3)");
  }
  TriangleMesh mesh;
  mesh.vertices.resize(static_cast<std::size_t>(vertices.shape(0)));
  for (py::ssize_t i = 0; i < vertices.shape(0); ++i) {
    mesh.vertices[static_cast<std::size_t>(i)] = {
        vertices.at(i, 0), vertices.at(i, 1), vertices.at(i, 2)};
  }
  mesh.triangles.resize(static_cast<std::size_t>(triangles.shape(0)));
  for (py::ssize_t i = 0; i < triangles.shape(0); ++i) {
    mesh.triangles[static_cast<std::size_t>(i)] = {
        triangles.at(i, 0), triangles.at(i, 1), triangles.at(i, 2)};
  }
  mesh.check_indices();
  return mesh;
}

py::tuple mesh_to(const TriangleMesh& mesh) {
  py::array_t<double> verts(
      {static_cast<py::ssize_t>(mesh.vertices.size()), py::ssize_t(3)});
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      verts.mutable_at(static_cast<py::ssize_t>(i), a) =
          mesh.vertices[i][static_cast<std::size_t>(a)];
    }
  }
  py::array_t<std::uint32_t> tris(
      {static_cast<py::ssize_t>(mesh.triangles.size()), py::ssize_t(3)});
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      tris.mutable_at(static_cast<py::ssize_t>(i), a) =
          mesh.triangles[i][static_cast<std::size_t>(a)];
    }
  }
  return py::make_tuple(verts, tris);
}

py::array_t<double> tree_values(const DiffusibleTree& t) {
  py::array_t<double> out({py::ssize_t(64), py::ssize_t(t.side),
                           py::ssize_t(t.side), py::ssize_t(t.side)});
  std::copy(t.data.begin(), t.data.end(), out.mutable_data());
  return out;
}

py::array_t<double> latent_values(const LatentGrid& z) {
  py::array_t<double> out({py::ssize_t(z.side), py::ssize_t(z.side),
                           py::ssize_t(z.side), py::ssize_t(z.dim)});
  std::copy(z.cells.begin(), z.cells.end(), out.mutable_data());
  return out;
}

LatentGrid latent_from(
    py::array_t<double, py::array::c_style | py::array::forcecast> values) {
  if (values.ndim() != 4 || values.shape(0) != values.shape(1) ||
      values.shape(1) != values.shape(2)) {
    throw ParameterError("latent must have shape (S, S, S, d)");
  }
  LatentGrid z(static_cast<int>(values.shape(0)),
               static_cast<int>(values.shape(3)));
  std::copy(values.data(), values.data() + values.size(), z.cells.begin());
  return z;
}

}  // namespace

PYBIND11_MODULE(_wala, m) {
  m.doc() = "wavelet-latent shape compression and generation toolkit";

  py::register_exception<ParameterError>(m, "ParameterError");
  py::register_exception<GeometryError>(m, "GeometryError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<FitError>(m, "FitError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_static("centered", &GridSpec::centered, py::arg("resolution"),
                  py::arg("half_extent"))
      .def_readwrite("resolution", &GridSpec::resolution)
      .def_readwrite("origin", &GridSpec::origin)
      .def_readwrite("spacing", &GridSpec::spacing)
      .def_readwrite("truncation", &GridSpec::truncation);

  py::class_<SdfGrid>(m, "SdfGrid")
      .def(py::init(&grid_from), py::arg("spec"), py::arg("values"))
      .def_property_readonly("spec", [](const SdfGrid& g) { return g.spec; })
      .def_property_readonly("values", &grid_values);

  py::class_<WaveletDecomposition>(m, "WaveletDecomposition")
      .def_property_readonly(
          "coarse_side",
          [](const WaveletDecomposition& d) { return d.c0.side; })
      .def_property_readonly("levels", &WaveletDecomposition::level_count);

  py::class_<DiffusibleTree>(m, "DiffusibleTree")
      .def_property_readonly("side",
                             [](const DiffusibleTree& t) { return t.side; })
      .def_property_readonly("values", &tree_values);

  py::class_<ImportanceSet>(m, "ImportanceSet")
      .def_property_readonly("rho",
                             [](const ImportanceSet& s) { return s.rho; })
      .def("count", &ImportanceSet::p0_count, py::arg("level"));

  py::class_<LinearCodec>(m, "LinearCodec")
      .def_property_readonly("block",
                             [](const LinearCodec& c) { return c.block; })
      .def_property_readonly(
          "latent_dim", [](const LinearCodec& c) { return c.latent_dim; });

  py::class_<LatentGrid>(m, "LatentGrid")
      .def(py::init(&latent_from), py::arg("values"))
      .def_property_readonly("side",
                             [](const LatentGrid& z) { return z.side; })
      .def_property_readonly("dim", [](const LatentGrid& z) { return z.dim; })
      .def_property_readonly("values", &latent_values);

  py::class_<Codebook>(m, "Codebook")
      .def_property_readonly("size", &Codebook::size)
      .def_property_readonly("dim", [](const Codebook& b) { return b.dim; })
      .def_property_readonly("fit_errors",
                             [](const Codebook& b) { return b.fit_errors; })
      .def_property_readonly("entries", [](const Codebook& b) {
        py::array_t<double> out({py::ssize_t(b.size()), py::ssize_t(b.dim)});
        std::copy(b.entries.begin(), b.entries.end(), out.mutable_data());
        return out;
      });

  py::class_<NoiseSchedule>(m, "NoiseSchedule")
      .def_property_readonly(
          "total_steps", [](const NoiseSchedule& s) { return s.total_steps; })
      .def_property_readonly(
          "alpha_bar", [](const NoiseSchedule& s) { return s.alpha_bar; })
      .def("at", &NoiseSchedule::at, py::arg("t"));

  py::class_<AnalyticGaussianDenoiser>(m, "AnalyticGaussianDenoiser")
      .def(py::init([](py::array_t<double, py::array::c_style |
                                               py::array::forcecast> mean,
                       double variance, const NoiseSchedule& schedule,
                       bool exact_reverse) {
             return AnalyticGaussianDenoiser(latent_from(mean), variance,
                                             schedule, exact_reverse);
           }),
           py::arg("mean"), py::arg("variance"), py::arg("schedule"),
           py::arg("exact_reverse") = true);

  // Geometry.
  m.def(
      "sdf_from_shape",
      [](const std::string& shape_json, const GridSpec& spec) {
        return sdf_from_shape(ShapeSpec::from_json(shape_json), spec);
      },
      py::arg("shape_json"), py::arg("spec"),
      "Evaluate an analytic shape (JSON description) on a TSDF grid.");
  m.def(
      "voxelize_mesh",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> v,
         py::array_t<std::uint32_t,
                     py::array::c_style | py::array::forcecast>
             t,
         const GridSpec& spec) {
        return voxelize_mesh(mesh_from(v, t), spec);
      },
      py::arg("vertices"), py::arg("triangles"), py::arg("spec"));
  m.def(
      "marching_cubes",
      [](const SdfGrid& grid, double iso) {
        return mesh_to(marching_cubes(grid, iso));
      },
      py::arg("grid"), py::arg("iso") = 0.0,
      "Extract the iso-surface as (vertices, triangles).");
  m.def(
      "occupancy",
      [](const SdfGrid& grid) {
        const BinaryGrid occ = occupancy(grid);
        py::array_t<bool> out({occ.resolution, occ.resolution,
                               occ.resolution});
        for (std::size_t i = 0; i < occ.values.size(); ++i) {
          out.mutable_data()[i] = occ.values[i] != 0;
        }
        return out;
      },
      py::arg("grid"));
  m.def(
      "sample_surface_points",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> v,
         py::array_t<std::uint32_t,
                     py::array::c_style | py::array::forcecast>
             t,
         std::size_t n, std::uint64_t seed) {
        const PointCloud pts =
            sample_surface_points(mesh_from(v, t), n, seed);
        py::array_t<double> out(
            {static_cast<py::ssize_t>(pts.size()), py::ssize_t(3)});
        for (std::size_t i = 0; i < pts.size(); ++i) {
          for (int a = 0; a < 3; ++a) {
            out.mutable_at(static_cast<py::ssize_t>(i), a) =
                pts[i][static_cast<std::size_t>(a)];
          }
        }
        return out;
      },
      py::arg("vertices"), py::arg("triangles"), py::arg("n"),
      py::arg("seed"));

  // Wavelets.
  m.def(
      "analysis_sides",
      [](int n, int levels, const std::string& family) {
        const auto f = filters_from(family);
        return analysis_sides(n, levels, f.family, f.boundary);
      },
      py::arg("n"), py::arg("levels"), py::arg("family"),
      "Coarse-side chain for the given resolution and wavelet family.");
  m.def(
      "dwt3",
      [](const SdfGrid& grid, const std::string& family, int levels) {
        return dwt3(grid, filters_from(family), levels);
      },
      py::arg("grid"), py::arg("family") = "cdf97", py::arg("levels") = 3);
  m.def(
      "idwt3",
      [](const WaveletDecomposition& decomp) {
        return idwt3(decomp,
                     WaveletFilterPair::make(decomp.family, decomp.boundary));
      },
      py::arg("decomposition"));
  m.def("pack_tree", &pack_tree, py::arg("decomposition"));
  m.def("unpack_tree", &unpack_tree, py::arg("tree"));
  m.def("importance_set", &importance_set, py::arg("decomposition"),
        py::arg("rho"));
  m.def("subband_filter", &subband_filter, py::arg("decomposition"),
        py::arg("keep"));

  // Codec.
  m.def("adaptive_block_weights", &adaptive_block_weights, py::arg("trees"),
        py::arg("block"), py::arg("rho"));
  m.def(
      "fit_codec",
      [](const std::vector<DiffusibleTree>& trees, int b, int d,
         const std::vector<double>& weights, std::uint64_t seed) {
        return fit_codec(trees, b, d, weights, seed);
      },
      py::arg("trees"), py::arg("block"), py::arg("latent_dim"),
      py::arg("weights") = std::vector<double>{}, py::arg("seed") = 0);
  m.def("encode", &encode, py::arg("codec"), py::arg("tree"));
  m.def(
      "decode",
      [](const LinearCodec& codec, const LatentGrid& latent) {
        return decode(codec, latent);
      },
      py::arg("codec"), py::arg("latent"));
  m.def(
      "fit_codebook",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> data,
         int k, int iters, std::uint64_t seed) {
        if (data.ndim() != 2) throw ParameterError("data must be (n, dim)");
        std::vector<double> rows(data.data(), data.data() + data.size());
        return fit_codebook(rows, static_cast<int>(data.shape(1)), k, iters,
                            seed);
      },
      py::arg("data"), py::arg("k"), py::arg("iters") = 25,
      py::arg("seed") = 0);
  m.def(
      "quantize",
      [](const LatentGrid& z, const Codebook& book) {
        const auto [q, losses] = quantize(z, book);
        py::array_t<std::uint32_t> idx(
            {py::ssize_t(q.side), py::ssize_t(q.side), py::ssize_t(q.side)});
        std::copy(q.indices.begin(), q.indices.end(), idx.mutable_data());
        return py::make_tuple(idx, losses.codebook_loss,
                              losses.commitment_loss);
      },
      py::arg("latent"), py::arg("codebook"),
      "Returns (indices, codebook_loss, commitment_loss).");
  m.def("snap", &snap, py::arg("latent"), py::arg("codebook"));
  m.def("adaptive_recon_loss", &adaptive_recon_loss, py::arg("tree"),
        py::arg("other"), py::arg("importance"), py::arg("seed"));
  m.def("compression_ratio", &compression_ratio, py::arg("spec"),
        py::arg("latent"));

  // Diffusion.
  m.def("cosine_schedule", &cosine_schedule, py::arg("total_steps"));
  m.def(
      "forward_noise",
      [](const LatentGrid& z0, int t, const LatentGrid& eps,
         const NoiseSchedule& s) { return forward_noise(z0, t, eps, s); },
      py::arg("z0"), py::arg("t"), py::arg("eps"), py::arg("schedule"));
  m.def("make_step_list", &make_step_list, py::arg("total_steps"),
        py::arg("count"));
  m.def(
      "sample_analytic",
      [](const AnalyticGaussianDenoiser& den, const std::vector<int>& steps,
         std::uint64_t seed, int side, int dim) {
        SamplerConfig cfg;
        cfg.steps = steps;
        cfg.seed = seed;
        return sample(den, Condition::none(), cfg, den.schedule(), side, dim);
      },
      py::arg("denoiser"), py::arg("steps"), py::arg("seed"), py::arg("side"),
      py::arg("dim"),
      "Unconditional ancestral sampling with the analytic denoiser.");

  // Metrics.
  m.def(
      "iou",
      [](const SdfGrid& a, const SdfGrid& b) {
        return iou(occupancy(a), occupancy(b));
      },
      py::arg("a"), py::arg("b"), "Occupancy IoU of two TSDF grids.");
  m.def(
      "chamfer",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> va,
         py::array_t<std::uint32_t,
                     py::array::c_style | py::array::forcecast>
             ta,
         py::array_t<double, py::array::c_style | py::array::forcecast> vb,
         py::array_t<std::uint32_t,
                     py::array::c_style | py::array::forcecast>
             tb,
         std::size_t n, std::uint64_t seed) {
        return chamfer(mesh_from(va, ta), mesh_from(vb, tb), n, seed);
      },
      py::arg("vertices_a"), py::arg("triangles_a"), py::arg("vertices_b"),
      py::arg("triangles_b"), py::arg("n_samples") = 2048,
      py::arg("seed") = 0);
}
