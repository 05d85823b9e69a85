#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdfplan/brute_force.hpp"
#include "sdfplan/gradcheck.hpp"
#include "sdfplan/planner.hpp"
#include "sdfplan/runner.hpp"
#include "sdfplan/shapes.hpp"

namespace py = pybind11;
using namespace sdfplan;

namespace {

Vec3 to_vec3(py::handle obj) {
    const auto seq = py::cast<std::array<double, 3>>(obj);
    return {seq[0], seq[1], seq[2]};
}

py::array_t<double> points_to_numpy(std::span<const Vec3> pts) {
    py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
    auto r = out.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < r.shape(0); ++i) {
        r(i, 0) = pts[static_cast<size_t>(i)].x;
        r(i, 1) = pts[static_cast<size_t>(i)].y;
        r(i, 2) = pts[static_cast<size_t>(i)].z;
    }
    return out;
}

std::vector<Vec3> points_from_numpy(py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
    if (arr.ndim() != 2 || arr.shape(1) != 3)
        throw InvalidInput("expected an (N, 3) float array");
    std::vector<Vec3> pts(static_cast<size_t>(arr.shape(0)));
    auto r = arr.unchecked<2>();
    for (py::ssize_t i = 0; i < r.shape(0); ++i)
        pts[static_cast<size_t>(i)] = {r(i, 0), r(i, 1), r(i, 2)};
    return pts;
}

py::array_t<double> doubles_to_numpy(std::span<const double> v) {
    py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<uint64_t> keys_to_numpy(std::span<const uint64_t> v) {
    py::array_t<uint64_t> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<double> eval_field(const TsdfField& f,
                               py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
    const std::vector<Vec3> pts = points_from_numpy(arr);
    std::vector<double> vals(pts.size());
    f.eval_batch(pts, vals);
    return doubles_to_numpy(vals);
}

Aabb make_aabb(py::handle lo, py::handle hi) { return {to_vec3(lo), to_vec3(hi)}; }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "inspection planning on learned truncated signed-distance fields";
    m.attr("__version__") = kVersion;
    m.attr("MISS_DEPTH") = kMissDepth;

    py::register_exception<InvalidInput>(m, "InvalidInputError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_IOError);
    py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);
    py::register_exception<EmptyObservation>(m, "EmptyObservationError", PyExc_RuntimeError);
    py::register_exception<DegenerateField>(m, "DegenerateFieldError", PyExc_RuntimeError);

    py::class_<Aabb>(m, "Aabb")
        .def(py::init(&make_aabb), py::arg("min"), py::arg("max"))
        .def_property_readonly("min", [](const Aabb& b) { return py::make_tuple(b.min.x, b.min.y, b.min.z); })
        .def_property_readonly("max", [](const Aabb& b) { return py::make_tuple(b.max.x, b.max.y, b.max.z); })
        .def("contains", [](const Aabb& b, py::handle p) { return b.contains(to_vec3(p)); });

    py::class_<TriangleMesh>(m, "TriangleMesh")
        .def_property_readonly("vertices",
                               [](const TriangleMesh& me) { return points_to_numpy(me.vertices); })
        .def_property_readonly("faces",
                               [](const TriangleMesh& me) {
                                   py::array_t<uint32_t> out(
                                       {static_cast<py::ssize_t>(me.faces.size()), py::ssize_t{3}});
                                   auto r = out.mutable_unchecked<2>();
                                   for (py::ssize_t i = 0; i < r.shape(0); ++i)
                                       for (py::ssize_t j = 0; j < 3; ++j)
                                           r(i, j) = me.faces[static_cast<size_t>(i)]
                                                              [static_cast<size_t>(j)];
                                   return out;
                               })
        .def_property_readonly("bounds", [](const TriangleMesh& me) { return me.bounds; })
        .def_property_readonly("vertex_count", &TriangleMesh::vertex_count)
        .def_property_readonly("face_count", &TriangleMesh::face_count)
        .def("total_area", &TriangleMesh::total_area);

    py::enum_<MeshFormat>(m, "MeshFormat")
        .value("AUTO", MeshFormat::Auto)
        .value("OBJ", MeshFormat::Obj)
        .value("PLY", MeshFormat::Ply);
    m.def("load_mesh", &load_mesh, py::arg("path"), py::arg("format") = MeshFormat::Auto);
    m.def("make_icosphere",
          [](py::handle center, double radius, int subdivisions) {
              return make_icosphere(to_vec3(center), radius, subdivisions);
          },
          py::arg("center"), py::arg("radius"), py::arg("subdivisions") = 3);
    m.def("make_cuboid", &make_cuboid, py::arg("box"), py::arg("flip_normals") = false);
    m.def("write_obj", &write_obj);
    m.def("write_ply_mesh", &write_ply_mesh);

    py::enum_<SignMode>(m, "SignMode")
        .value("RAY_PARITY", SignMode::RayParity)
        .value("NORMAL_VOTE", SignMode::NormalVote);

    py::class_<DistanceOracle>(m, "DistanceOracle")
        .def(py::init<const TriangleMesh&, SignMode>(), py::arg("mesh"),
             py::arg("sign_mode") = SignMode::RayParity)
        .def("signed_distance",
             [](const DistanceOracle& o, py::handle p) { return o.signed_distance(to_vec3(p)); })
        .def("unsigned_distance",
             [](const DistanceOracle& o, py::handle p) { return o.unsigned_distance(to_vec3(p)); })
        .def("ray_cast",
             [](const DistanceOracle& o, py::handle origin, py::handle dir, double max_range)
                 -> std::optional<double> { return o.ray_cast(to_vec3(origin), to_vec3(dir), max_range); },
             py::arg("origin"), py::arg("dir"), py::arg("max_range"));

    m.def("brute_force_signed_distance",
          [](const TriangleMesh& mesh, py::handle p) {
              return brute::signed_distance(mesh, to_vec3(p));
          });

    py::class_<TsdfSampleSet>(m, "TsdfSampleSet")
        .def_property_readonly("points",
                               [](const TsdfSampleSet& s) { return points_to_numpy(s.points); })
        .def_property_readonly("values",
                               [](const TsdfSampleSet& s) { return doubles_to_numpy(s.values); })
        .def_readonly("truncation", &TsdfSampleSet::truncation)
        .def("__len__", &TsdfSampleSet::size);

    py::class_<TsdfSamplingParams>(m, "TsdfSamplingParams")
        .def(py::init<>())
        .def_readwrite("n_near", &TsdfSamplingParams::n_near)
        .def_readwrite("n_far", &TsdfSamplingParams::n_far)
        .def_readwrite("near_band", &TsdfSamplingParams::near_band)
        .def_readwrite("truncation", &TsdfSamplingParams::truncation)
        .def_readwrite("seed", &TsdfSamplingParams::seed);

    m.def("sample_tsdf_training_set", &sample_tsdf_training_set, py::arg("mesh"),
          py::arg("oracle"), py::arg("params"), py::arg("bounds"));

    py::class_<HashGridConfig>(m, "HashGridConfig")
        .def(py::init<>())
        .def_readwrite("levels", &HashGridConfig::levels)
        .def_readwrite("features_per_level", &HashGridConfig::features_per_level)
        .def_readwrite("table_size_log2", &HashGridConfig::table_size_log2)
        .def_readwrite("base_resolution", &HashGridConfig::base_resolution)
        .def_readwrite("growth", &HashGridConfig::growth);

    py::class_<EnvFieldConfig>(m, "EnvFieldConfig")
        .def(py::init<>())
        .def_readwrite("hash", &EnvFieldConfig::hash)
        .def_readwrite("oneblob_bins", &EnvFieldConfig::oneblob_bins)
        .def_readwrite("head_hidden", &EnvFieldConfig::head_hidden)
        .def_readwrite("truncation", &EnvFieldConfig::truncation)
        .def_readwrite("world_box", &EnvFieldConfig::world_box)
        .def_readwrite("cell_size", &EnvFieldConfig::cell_size)
        .def_readwrite("kappa", &EnvFieldConfig::kappa)
        .def_property_readonly("feature_width", &EnvFieldConfig::feature_width);

    py::class_<AdamWParams>(m, "AdamWParams")
        .def(py::init<>())
        .def_readwrite("lr", &AdamWParams::lr)
        .def_readwrite("beta1", &AdamWParams::beta1)
        .def_readwrite("beta2", &AdamWParams::beta2)
        .def_readwrite("eps", &AdamWParams::eps)
        .def_readwrite("weight_decay", &AdamWParams::weight_decay);

    py::class_<TrainSettings>(m, "TrainSettings")
        .def(py::init<>())
        .def_readwrite("epochs", &TrainSettings::epochs)
        .def_readwrite("batch_size", &TrainSettings::batch_size)
        .def_readwrite("adam", &TrainSettings::adam)
        .def_readwrite("seed", &TrainSettings::seed);

    py::class_<TsdfField>(m, "TsdfField")
        .def("eval", &eval_field)
        .def_property_readonly("truncation", &TsdfField::truncation)
        .def_property_readonly("world_box", &TsdfField::world_box);

    py::class_<AnalyticTsdfField, TsdfField>(m, "AnalyticTsdfField")
        .def_static("sphere",
                    [](py::handle center, double radius, double truncation, const Aabb& box,
                       double cell_size) {
                        return AnalyticTsdfField::sphere(to_vec3(center), radius, truncation,
                                                         box, cell_size);
                    },
                    py::arg("center"), py::arg("radius"), py::arg("truncation"), py::arg("box"),
                    py::arg("cell_size"))
        .def_static("cuboid", &AnalyticTsdfField::cuboid, py::arg("solid"),
                    py::arg("truncation"), py::arg("box"), py::arg("cell_size"));

    py::class_<EnvField, TsdfField>(m, "EnvField")
        .def(py::init<const EnvFieldConfig&, uint64_t>(), py::arg("config"), py::arg("seed"))
        .def_property_readonly("feature_width", &EnvField::feature_width)
        .def_property_readonly("param_count", &EnvField::param_count)
        .def_property_readonly("extractor_checksum", &EnvField::extractor_checksum)
        .def("save", &EnvField::save)
        .def_static("load", &EnvField::load);

    py::class_<TrainReport>(m, "TrainReport")
        .def_readonly("epoch_loss", &TrainReport::epoch_loss)
        .def_readonly("final_loss", &TrainReport::final_loss);

    m.def("train_env_field",
          [](const TsdfSampleSet& samples, const EnvFieldConfig& cfg,
             const TrainSettings& settings) {
              auto [field, report] = train_env_field(samples, cfg, settings);
              return py::make_tuple(std::move(field), report);
          },
          py::arg("samples"), py::arg("config"), py::arg("settings"));

    py::class_<SurfacePointSet>(m, "SurfacePointSet")
        .def_property_readonly("points",
                               [](const SurfacePointSet& s) { return points_to_numpy(s.points); })
        .def_property_readonly("edge_keys",
                               [](const SurfacePointSet& s) { return keys_to_numpy(s.edge_keys); })
        .def("__len__", &SurfacePointSet::count);

    m.def("global_surface_points", &global_surface_points, py::arg("field"),
          py::arg("kappa") = 1.0);

    py::class_<RobotConfig>(m, "RobotConfig")
        .def(py::init([](py::handle position, double yaw, double pitch) {
                 RobotConfig q;
                 q.position = to_vec3(position);
                 q.yaw = yaw;
                 q.pitch = pitch;
                 q.normalize_angles();
                 return q;
             }),
             py::arg("position"), py::arg("yaw") = 0.0, py::arg("pitch") = 0.0)
        .def_property_readonly("position",
                               [](const RobotConfig& q) {
                                   return py::make_tuple(q.position.x, q.position.y, q.position.z);
                               })
        .def_readonly("yaw", &RobotConfig::yaw)
        .def_readonly("pitch", &RobotConfig::pitch);

    py::class_<RobotGeometry>(m, "RobotGeometry")
        .def_static("drone_cube", &RobotGeometry::drone_cube, py::arg("side"),
                    py::arg("grid_step"))
        .def_readonly("spacing", &RobotGeometry::spacing)
        .def_readonly("characteristic_size", &RobotGeometry::characteristic_size)
        .def_property_readonly("control_points", [](const RobotGeometry& g) {
            return points_to_numpy(g.control_points);
        });

    py::class_<SensorModel>(m, "SensorModel")
        .def(py::init<>())
        .def_readwrite("width", &SensorModel::width)
        .def_readwrite("height", &SensorModel::height)
        .def_readwrite("hfov", &SensorModel::hfov)
        .def_readwrite("vfov", &SensorModel::vfov)
        .def_readwrite("range", &SensorModel::range);

    py::class_<DepthImage>(m, "DepthImage")
        .def_property_readonly("origin",
                               [](const DepthImage& d) {
                                   return py::make_tuple(d.origin.x, d.origin.y, d.origin.z);
                               })
        .def_readonly("width", &DepthImage::width)
        .def_readonly("height", &DepthImage::height)
        .def_readonly("max_depth", &DepthImage::max_depth)
        .def_property_readonly("depths",
                               [](const DepthImage& d) {
                                   py::array_t<double> out({d.height, d.width});
                                   std::copy(d.depths.begin(), d.depths.end(),
                                             out.mutable_data());
                                   return out;
                               })
        .def_property_readonly("hit_count", &DepthImage::hit_count);

    m.def("write_depth_pgm", &write_depth_pgm);

    py::class_<MarchParams>(m, "MarchParams")
        .def(py::init<>())
        .def_readwrite("step_factor", &MarchParams::step_factor)
        .def_readwrite("bisect_iters", &MarchParams::bisect_iters);

    py::class_<SnappedBoundingBox>(m, "SnappedBoundingBox")
        .def_property_readonly("min",
                               [](const SnappedBoundingBox& b) {
                                   return py::make_tuple(b.min.x, b.min.y, b.min.z);
                               })
        .def_property_readonly("max",
                               [](const SnappedBoundingBox& b) {
                                   return py::make_tuple(b.max.x, b.max.y, b.max.z);
                               })
        .def("contains",
             [](const SnappedBoundingBox& b, py::handle p) { return b.contains(to_vec3(p)); })
        .def("intersects", &SnappedBoundingBox::intersects);

    m.def("collision_free_config", &collision_free_config, py::arg("field"), py::arg("q"),
          py::arg("geom"), py::arg("xi"));
    m.def("collision_free_segment", &collision_free_segment, py::arg("field"), py::arg("q_from"),
          py::arg("q_to"), py::arg("geom"), py::arg("xi"), py::arg("step"));
    m.def("simulate_observation", &simulate_observation, py::arg("field"), py::arg("q"),
          py::arg("sensor"), py::arg("march") = MarchParams{});
    m.def("observation_bounding_box", &observation_bounding_box, py::arg("obs"),
          py::arg("field"), py::arg("pad") = 0.0);

    py::class_<LocalTrainSettings>(m, "LocalTrainSettings")
        .def(py::init<>())
        .def_readwrite("head_param_target", &LocalTrainSettings::head_param_target)
        .def_readwrite("max_iters", &LocalTrainSettings::max_iters)
        .def_readwrite("rays_per_step", &LocalTrainSettings::rays_per_step)
        .def_readwrite("visible_samples", &LocalTrainSettings::visible_samples)
        .def_readwrite("occluded_samples", &LocalTrainSettings::occluded_samples)
        .def_readwrite("lambda_vis", &LocalTrainSettings::lambda_vis)
        .def_readwrite("lambda_occ", &LocalTrainSettings::lambda_occ)
        .def_readwrite("pad", &LocalTrainSettings::pad)
        .def_readwrite("adam", &LocalTrainSettings::adam);

    py::class_<LocalSdf>(m, "LocalSdf")
        .def("eval",
             [](const LocalSdf& l,
                py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
                 const std::vector<Vec3> pts = points_from_numpy(arr);
                 std::vector<double> vals(pts.size());
                 for (size_t i = 0; i < pts.size(); ++i) vals[i] = l.eval(pts[i]);
                 return doubles_to_numpy(vals);
             })
        .def_property_readonly("box", &LocalSdf::box)
        .def_property_readonly("param_count", &LocalSdf::param_count)
        .def("save", &LocalSdf::save);

    m.def("represent_observation", &represent_observation, py::arg("obs"), py::arg("field"),
          py::arg("settings"), py::arg("seed"));
    m.def("local_surface_points", &local_surface_points);
    m.def("total_coverage",
          [](const SurfacePointSet& pts, const SnappedBoundingBox& box,
             const std::vector<const LocalSdf*>& ancestors, double prior, size_t s_e_count,
             double eps) {
              std::vector<AncestorObservation> anc;
              anc.reserve(ancestors.size());
              for (const LocalSdf* l : ancestors) anc.push_back({&l->box(), l});
              const CoverageResult r = total_coverage(pts, box, anc, prior, s_e_count, eps);
              return py::make_tuple(r.coverage, r.surviving);
          },
          py::arg("new_points"), py::arg("new_box"), py::arg("ancestors"), py::arg("prior_cov"),
          py::arg("s_e_count"), py::arg("eps"));

    py::class_<PlannerSettings>(m, "PlannerSettings")
        .def(py::init<>())
        .def_readwrite("alpha", &PlannerSettings::alpha)
        .def_readwrite("crowding_radius", &PlannerSettings::crowding_radius)
        .def_readwrite("angular_weight", &PlannerSettings::angular_weight)
        .def_readwrite("prune_interval", &PlannerSettings::prune_interval)
        .def_readwrite("edge_length", &PlannerSettings::edge_length)
        .def_readwrite("max_yaw_step", &PlannerSettings::max_yaw_step)
        .def_readwrite("max_pitch_step", &PlannerSettings::max_pitch_step)
        .def_readwrite("collision_step", &PlannerSettings::collision_step)
        .def_readwrite("xi", &PlannerSettings::xi)
        .def_readwrite("coverage_eps", &PlannerSettings::coverage_eps)
        .def_readwrite("time_budget_s", &PlannerSettings::time_budget_s)
        .def_readwrite("node_budget", &PlannerSettings::node_budget)
        .def_readwrite("memory_budget_bytes", &PlannerSettings::memory_budget_bytes)
        .def_readwrite("iteration_budget", &PlannerSettings::iteration_budget)
        .def_readwrite("seed", &PlannerSettings::seed)
        .def_readwrite("root", &PlannerSettings::root)
        .def_readwrite("local_train", &PlannerSettings::local_train)
        .def_readwrite("march", &PlannerSettings::march);

    py::class_<TrajectoryPoint>(m, "TrajectoryPoint")
        .def_readonly("q", &TrajectoryPoint::q)
        .def_readonly("coverage", &TrajectoryPoint::coverage)
        .def_readonly("cost", &TrajectoryPoint::cost);

    py::class_<HistoryRow>(m, "HistoryRow")
        .def_readonly("iteration", &HistoryRow::iteration)
        .def_readonly("elapsed_s", &HistoryRow::elapsed_s)
        .def_readonly("nodes", &HistoryRow::nodes)
        .def_readonly("coverage", &HistoryRow::coverage)
        .def_readonly("cost", &HistoryRow::cost);

    py::class_<MemoryReport>(m, "MemoryReport")
        .def_readonly("field_param_bytes", &MemoryReport::field_param_bytes)
        .def_readonly("node_count", &MemoryReport::node_count)
        .def_readonly("nodes_with_observation", &MemoryReport::nodes_with_observation)
        .def_readonly("node_bytes", &MemoryReport::node_bytes)
        .def_readonly("baseline_bytes", &MemoryReport::baseline_bytes)
        .def_readonly("explicit_bytes_per_node", &MemoryReport::explicit_bytes_per_node)
        .def_readonly("explicit_to_implicit_ratio", &MemoryReport::explicit_to_implicit_ratio);

    py::class_<PlanResult>(m, "PlanResult")
        .def_readonly("trajectory", &PlanResult::trajectory)
        .def_readonly("coverage", &PlanResult::coverage)
        .def_readonly("cost", &PlanResult::cost)
        .def_readonly("nodes_added", &PlanResult::nodes_added)
        .def_readonly("rejected_collision", &PlanResult::rejected_collision)
        .def_readonly("rejected_empty_observation", &PlanResult::rejected_empty_observation)
        .def_readonly("rejected_training", &PlanResult::rejected_training)
        .def_readonly("iterations", &PlanResult::iterations)
        .def_readonly("prune_iterations", &PlanResult::prune_iterations)
        .def_readonly("history", &PlanResult::history)
        .def_readonly("peak_baseline_bytes", &PlanResult::peak_baseline_bytes)
        .def_readonly("elapsed_s", &PlanResult::elapsed_s)
        .def_readonly("memory", &PlanResult::memory);

    py::class_<Planner>(m, "Planner")
        .def(py::init<const EnvField&, const RobotGeometry&, const SensorModel&,
                      const PlannerSettings&>(),
             py::arg("field"), py::arg("geom"), py::arg("sensor"), py::arg("settings"),
             py::keep_alive<1, 2>())
        .def("plan", &Planner::plan)
        .def_property_readonly("global_surface_count", &Planner::global_surface_count);
}
