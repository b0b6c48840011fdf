#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ddcur/agents.hpp"
#include "ddcur/harness.hpp"

namespace py = pybind11;
using namespace ddcur;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Self-paced goal curriculum: environments, replay, distance "
            "bins, goal generation, and the training harness.";

  // ---- errors
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);

  // ---- rng
  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
           py::arg("stream") = 0)
      .def_property_readonly("seed", &Rng::seed)
      .def_property_readonly("stream", &Rng::stream)
      .def("uniform", py::overload_cast<>(&Rng::uniform))
      .def("uniform", py::overload_cast<double, double>(&Rng::uniform))
      .def("uniform_int", &Rng::uniform_int)
      .def("index", &Rng::index)
      .def("normal", py::overload_cast<>(&Rng::normal))
      .def("normal", py::overload_cast<double, double>(&Rng::normal))
      .def("bernoulli", &Rng::bernoulli);

  // ---- core types
  m.def("goal_distance", &goal_distance);
  m.def("sparse_reward", &sparse_reward, py::arg("achieved"),
        py::arg("desired"), py::arg("epsilon"));

  py::class_<Transition>(m, "Transition")
      .def(py::init<>())
      .def_readwrite("state", &Transition::state)
      .def_readwrite("action", &Transition::action)
      .def_readwrite("next_state", &Transition::next_state)
      .def_readwrite("achieved_goal", &Transition::achieved_goal)
      .def_readwrite("desired_goal", &Transition::desired_goal)
      .def_readwrite("reward", &Transition::reward)
      .def_readwrite("done", &Transition::done);

  py::class_<Episode>(m, "Episode")
      .def(py::init<>())
      .def_readwrite("transitions", &Episode::transitions)
      .def("append",
           [](Episode& ep, const Transition& t) { ep.transitions.push_back(t); })
      .def("__len__", &Episode::length)
      .def("validate", &Episode::validate);

  // ---- environments
  py::class_<Cell>(m, "Cell")
      .def(py::init<int, int>(), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Cell::x)
      .def_readwrite("y", &Cell::y)
      .def("__eq__", [](const Cell& a, const Cell& b) { return a == b; })
      .def("__repr__", [](const Cell& c) {
        return "Cell(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")";
      });

  py::class_<EnvSpec>(m, "EnvSpec")
      .def_readonly("state_dim", &EnvSpec::state_dim)
      .def_readonly("goal_dim", &EnvSpec::goal_dim)
      .def_readonly("horizon", &EnvSpec::horizon)
      .def_readonly("epsilon", &EnvSpec::epsilon);

  py::class_<GoalEnv>(m, "GoalEnv")
      .def("spec", &GoalEnv::spec, py::return_value_policy::reference_internal)
      .def("reset", &GoalEnv::reset)
      .def("step", &GoalEnv::step)
      .def("achieved_goal", &GoalEnv::achieved_goal)
      .def("sample_uniform_goal", &GoalEnv::sample_uniform_goal)
      .def("goal_valid", &GoalEnv::goal_valid)
      .def("start_state", &GoalEnv::start_state)
      .def("oracle_goal_distance", &GoalEnv::oracle_goal_distance)
      .def("episode_active", &GoalEnv::episode_active)
      .def("steps_taken", &GoalEnv::steps_taken);

  py::class_<GridNavEnv, GoalEnv>(m, "GridNavEnv")
      .def_static("two_room", &GridNavEnv::two_room, py::arg("width") = 20,
                  py::arg("height") = 20, py::arg("horizon") = 60)
      .def_static("open", &GridNavEnv::open, py::arg("width"),
                  py::arg("height"), py::arg("horizon"))
      .def_static("from_map_file", &GridNavEnv::from_map_file, py::arg("path"),
                  py::arg("horizon"))
      .def_property_readonly("width", &GridNavEnv::width)
      .def_property_readonly("height", &GridNavEnv::height)
      .def("start_cell", &GridNavEnv::start_cell)
      .def("agent_cell", &GridNavEnv::agent_cell)
      .def("is_wall", &GridNavEnv::is_wall)
      .def("free_cells", &GridNavEnv::free_cells)
      .def("encode_cell", &GridNavEnv::encode_cell)
      .def("decode_point", &GridNavEnv::decode_point)
      .def("oracle_distance", &GridNavEnv::oracle_distance);

  py::class_<PointReachEnv, GoalEnv>(m, "PointReachEnv")
      .def(py::init<double, int, double>(), py::arg("max_step") = 0.03,
           py::arg("horizon") = 50, py::arg("epsilon") = 0.05)
      .def_property_readonly("max_step", &PointReachEnv::max_step);

  // ---- replay
  py::class_<HerConfig>(m, "HerConfig")
      .def(py::init([](int k) {
             HerConfig her;
             her.k = k;
             return her;
           }),
           py::arg("k") = 4)
      .def_readwrite("k", &HerConfig::k);

  py::class_<ReplayBuffer>(m, "ReplayBuffer")
      .def(py::init<std::int64_t>(), py::arg("capacity_transitions"))
      .def("push_episode", &ReplayBuffer::push_episode)
      .def("capacity", &ReplayBuffer::capacity)
      .def("size", &ReplayBuffer::size)
      .def("total_steps_stored", &ReplayBuffer::total_steps_stored)
      .def("episode_count", &ReplayBuffer::episode_count)
      .def("empty", &ReplayBuffer::empty)
      .def("sample_her_batch", &ReplayBuffer::sample_her_batch,
           py::arg("batch_size"), py::arg("her"), py::arg("epsilon"),
           py::arg("rng"))
      .def("recent_slice", &ReplayBuffer::recent_slice)
      .def("sample_states", &ReplayBuffer::sample_states);

  // ---- distance bins and the distance model
  py::class_<BinSpec>(m, "BinSpec")
      .def_readonly("num_bins", &BinSpec::num_bins)
      .def_readonly("horizon", &BinSpec::horizon)
      .def_readonly("upper_bounds", &BinSpec::upper_bounds);

  m.def("make_bin_spec", &make_bin_spec, py::arg("horizon"), py::arg("num_bins"));
  m.def("bin_of", &bin_of, py::arg("steps"), py::arg("spec"));

  py::class_<DistancePair>(m, "DistancePair")
      .def_readonly("from_state", &DistancePair::from)
      .def_readonly("to_state", &DistancePair::to)
      .def_readonly("steps", &DistancePair::steps);

  m.def("build_pair_dataset", &build_pair_dataset, py::arg("episodes"),
        py::arg("pairs_per_episode"), py::arg("spec"), py::arg("rng"));

  py::class_<DdfModel>(m, "DdfModel")
      .def_static("create", &DdfModel::create, py::arg("state_dim"),
                  py::arg("spec"), py::arg("hidden"), py::arg("rng"))
      .def_readonly("bin_spec", &DdfModel::bin_spec);

  m.def("train_ddf", &train_ddf, py::arg("model"), py::arg("dataset"),
        py::arg("epochs"), py::arg("batch_size"), py::arg("rng"),
        py::arg("learning_rate") = 1e-3,
        py::call_guard<py::gil_scoped_release>());
  m.def("predict_bin", &predict_bin, py::arg("model"), py::arg("s0"),
        py::arg("s"));
  m.def("exact_bin_accuracy", &exact_bin_accuracy, py::arg("model"),
        py::arg("dataset"));
  m.def("save_ddf_file", &save_ddf_file, py::arg("path"), py::arg("model"));
  m.def("load_ddf_file", &load_ddf_file, py::arg("path"));

  // ---- goal generation
  py::enum_<GoalSource>(m, "GoalSource")
      .value("curriculum", GoalSource::curriculum)
      .value("uniform_fallback", GoalSource::uniform_fallback)
      .value("uniform_mix", GoalSource::uniform_mix)
      .value("warmup", GoalSource::warmup);

  py::class_<GoalGenConfig>(m, "GoalGenConfig")
      .def(py::init<>())
      .def_readwrite("candidate_batch_size", &GoalGenConfig::candidate_batch_size)
      .def_readwrite("target_bins", &GoalGenConfig::target_bins)
      .def_readwrite("min_candidates", &GoalGenConfig::min_candidates)
      .def_readwrite("uniform_mix_prob", &GoalGenConfig::uniform_mix_prob)
      .def_readwrite("min_buffer_steps", &GoalGenConfig::min_buffer_steps);

  py::class_<GoalSample>(m, "GoalSample")
      .def_readonly("goal", &GoalSample::goal)
      .def_readonly("source", &GoalSample::source)
      .def_readonly("predicted_bin", &GoalSample::predicted_bin)
      .def_readonly("candidate_count_in_bin", &GoalSample::candidate_count_in_bin);

  m.def("generate_goal",
        py::overload_cast<const Vec&, const ReplayBuffer&, const DdfModel&,
                          const GoalEnv&, const GoalGenConfig&, Rng&>(
            &generate_goal),
        py::arg("s0"), py::arg("buffer"), py::arg("model"), py::arg("env"),
        py::arg("config"), py::arg("rng"));

  // ---- agents
  py::class_<QAgentConfig>(m, "QAgentConfig")
      .def(py::init<>())
      .def_readwrite("hidden", &QAgentConfig::hidden)
      .def_readwrite("gamma", &QAgentConfig::gamma)
      .def_readwrite("learning_rate", &QAgentConfig::learning_rate)
      .def_readwrite("tau", &QAgentConfig::tau)
      .def_readwrite("eps_start", &QAgentConfig::eps_start)
      .def_readwrite("eps_end", &QAgentConfig::eps_end)
      .def_readwrite("eps_anneal_steps", &QAgentConfig::eps_anneal_steps);

  py::class_<QAgent>(m, "QAgent")
      .def(py::init<const EnvSpec&, const QAgentConfig&, Rng&>(),
           py::arg("spec"), py::arg("config"), py::arg("init_rng"))
      .def("act", &QAgent::act, py::arg("state"), py::arg("goal"),
           py::arg("explore"), py::arg("rng"))
      .def("update", &QAgent::update,
           py::call_guard<py::gil_scoped_release>())
      .def("num_actions", &QAgent::num_actions);

  m.def("evaluate",
        py::overload_cast<const QAgent&, GoalEnv&, const std::vector<Vec>&>(
            &evaluate),
        py::arg("agent"), py::arg("env"), py::arg("goals"),
        py::call_guard<py::gil_scoped_release>());

  // ---- config and harness
  py::enum_<Method>(m, "Method")
      .value("curriculum", Method::curriculum)
      .value("uniform_baseline", Method::uniform_baseline);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("method", &ExperimentConfig::method)
      .def_readwrite("total_env_steps", &ExperimentConfig::total_env_steps)
      .def_readwrite("eval_every", &ExperimentConfig::eval_every)
      .def_readwrite("eval_goal_count", &ExperimentConfig::eval_goal_count)
      .def_readwrite("seeds", &ExperimentConfig::seeds)
      .def_readwrite("snapshot_every", &ExperimentConfig::snapshot_every)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def("validate", &ExperimentConfig::validate);

  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config_file", &load_config_file, py::arg("path"));
  m.def("serialize_config", &serialize_config, py::arg("config"));

  py::class_<MetricsRow>(m, "MetricsRow")
      .def_readonly("env_steps", &MetricsRow::env_steps)
      .def_readonly("success_rate", &MetricsRow::success_rate)
      .def_readonly("mean_episode_return", &MetricsRow::mean_episode_return)
      .def_readonly("mean_goal_oracle_distance",
                    &MetricsRow::mean_goal_oracle_distance)
      .def_readonly("ddf_holdout_accuracy", &MetricsRow::ddf_holdout_accuracy)
      .def_readonly("goal_source_counts", &MetricsRow::goal_source_counts);

  py::class_<RunMetrics>(m, "RunMetrics")
      .def_readonly("rows", &RunMetrics::rows);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("method", &RunResult::method)
      .def_readonly("seed", &RunResult::seed)
      .def_readonly("metrics", &RunResult::metrics)
      .def_readonly("ddf_train_count", &RunResult::ddf_train_count)
      .def_readonly("env_steps", &RunResult::env_steps)
      .def_readonly("episode_count", &RunResult::episode_count);

  m.def("run_training", &run_training, py::arg("config"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def("steps_to_threshold", &steps_to_threshold, py::arg("metrics"),
        py::arg("threshold"));
  m.def("steps_to_sustained_threshold", &steps_to_sustained_threshold,
        py::arg("metrics"), py::arg("threshold"));
  m.def("write_run_files", &write_run_files, py::arg("config"), py::arg("run"),
        py::arg("out_dir"));
}
