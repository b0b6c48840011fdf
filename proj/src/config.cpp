#include "ddcur/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "text_format.hpp"

namespace ddcur {

const char* to_string(EnvChoice env) {
  switch (env) {
    case EnvChoice::gridnav: return "gridnav";
    case EnvChoice::pointreach: return "pointreach";
  }
  throw ConfigError("to_string: unknown env");
}

const char* to_string(Method method) {
  switch (method) {
    case Method::curriculum: return "curriculum";
    case Method::uniform_baseline: return "uniform";
  }
  throw ConfigError("to_string: unknown method");
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw ConfigError("config: bad value '" + value + "' for key '" + key + "'");
}

std::int64_t parse_i64(const std::string& key, const std::string& value) {
  std::int64_t out = 0;
  const char* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) bad_value(key, value);
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  const std::int64_t v = parse_i64(key, value);
  if (v < INT32_MIN || v > INT32_MAX) bad_value(key, value);
  return static_cast<int>(v);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) bad_value(key, value);
  return out;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& value,
                          Parse parse_one) {
  std::vector<T> out;
  std::stringstream ss(value);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (item.empty()) bad_value(key, value);
    out.push_back(parse_one(key, item));
  }
  if (out.empty()) bad_value(key, value);
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  return parse_list<int>(key, value, parse_int);
}

std::vector<std::uint64_t> parse_u64_list(const std::string& key,
                                          const std::string& value) {
  return parse_list<std::uint64_t>(key, value, [](const std::string& k,
                                                  const std::string& v) {
    const std::int64_t parsed = parse_i64(k, v);
    if (parsed < 0) bad_value(k, v);
    return static_cast<std::uint64_t>(parsed);
  });
}

EnvChoice parse_env(const std::string& key, const std::string& value) {
  if (value == "gridnav") return EnvChoice::gridnav;
  if (value == "pointreach") return EnvChoice::pointreach;
  bad_value(key, value);
}

Method parse_method_value(const std::string& key, const std::string& value) {
  if (value == "curriculum") return Method::curriculum;
  if (value == "uniform" || value == "uniform_baseline") {
    return Method::uniform_baseline;
  }
  bad_value(key, value);
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key,
                                  const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto add = [&t](const char* name, Setter setter) {
      t.emplace(name, std::move(setter));
    };
    // [experiment]
    add("experiment.env", [](auto& c, auto& k, auto& v) { c.env = parse_env(k, v); });
    add("experiment.method",
        [](auto& c, auto& k, auto& v) { c.method = parse_method_value(k, v); });
    add("experiment.total_env_steps",
        [](auto& c, auto& k, auto& v) { c.total_env_steps = parse_i64(k, v); });
    add("experiment.eval_every",
        [](auto& c, auto& k, auto& v) { c.eval_every = parse_i64(k, v); });
    add("experiment.eval_goal_count",
        [](auto& c, auto& k, auto& v) { c.eval_goal_count = parse_int(k, v); });
    add("experiment.seeds",
        [](auto& c, auto& k, auto& v) { c.seeds = parse_u64_list(k, v); });
    add("experiment.snapshot_every",
        [](auto& c, auto& k, auto& v) { c.snapshot_every = parse_i64(k, v); });
    add("experiment.snapshot_goal_count", [](auto& c, auto& k, auto& v) {
      c.snapshot_goal_count = parse_int(k, v);
    });
    add("experiment.snapshot_pool_size", [](auto& c, auto& k, auto& v) {
      c.snapshot_pool_size = parse_int(k, v);
    });
    add("experiment.out_dir", [](auto& c, auto&, auto& v) { c.out_dir = v; });
    // [gridnav]
    add("gridnav.width",
        [](auto& c, auto& k, auto& v) { c.gridnav.width = parse_int(k, v); });
    add("gridnav.height",
        [](auto& c, auto& k, auto& v) { c.gridnav.height = parse_int(k, v); });
    add("gridnav.horizon",
        [](auto& c, auto& k, auto& v) { c.gridnav.horizon = parse_int(k, v); });
    add("gridnav.layout", [](auto& c, auto&, auto& v) { c.gridnav.layout = v; });
    add("gridnav.map_file",
        [](auto& c, auto&, auto& v) { c.gridnav.map_file = v; });
    // [pointreach]
    add("pointreach.max_step", [](auto& c, auto& k, auto& v) {
      c.pointreach.max_step = parse_double(k, v);
    });
    add("pointreach.epsilon", [](auto& c, auto& k, auto& v) {
      c.pointreach.epsilon = parse_double(k, v);
    });
    add("pointreach.horizon", [](auto& c, auto& k, auto& v) {
      c.pointreach.horizon = parse_int(k, v);
    });
    // [replay]
    add("replay.capacity",
        [](auto& c, auto& k, auto& v) { c.replay.capacity = parse_i64(k, v); });
    add("replay.her_k",
        [](auto& c, auto& k, auto& v) { c.replay.her_k = parse_int(k, v); });
    // [ddf]
    add("ddf.bins", [](auto& c, auto& k, auto& v) { c.ddf.bins = parse_int(k, v); });
    add("ddf.hidden",
        [](auto& c, auto& k, auto& v) { c.ddf.hidden = parse_int_list(k, v); });
    add("ddf.pairs_per_retrain", [](auto& c, auto& k, auto& v) {
      c.ddf.pairs_per_retrain = parse_int(k, v);
    });
    add("ddf.epochs",
        [](auto& c, auto& k, auto& v) { c.ddf.epochs = parse_int(k, v); });
    add("ddf.batch_size",
        [](auto& c, auto& k, auto& v) { c.ddf.batch_size = parse_int(k, v); });
    add("ddf.learning_rate", [](auto& c, auto& k, auto& v) {
      c.ddf.learning_rate = parse_double(k, v);
    });
    add("ddf.retrain_interval", [](auto& c, auto& k, auto& v) {
      c.ddf.retrain_interval = parse_i64(k, v);
    });
    add("ddf.recent_steps",
        [](auto& c, auto& k, auto& v) { c.ddf.recent_steps = parse_i64(k, v); });
    add("ddf.holdout_fraction", [](auto& c, auto& k, auto& v) {
      c.ddf.holdout_fraction = parse_double(k, v);
    });
    // [goalgen]
    add("goalgen.candidate_batch_size", [](auto& c, auto& k, auto& v) {
      c.goalgen.candidate_batch_size = parse_int(k, v);
    });
    add("goalgen.target_bins", [](auto& c, auto& k, auto& v) {
      c.goalgen.target_bins = parse_int(k, v);
    });
    add("goalgen.min_candidates", [](auto& c, auto& k, auto& v) {
      c.goalgen.min_candidates = parse_int(k, v);
    });
    add("goalgen.uniform_mix_prob", [](auto& c, auto& k, auto& v) {
      c.goalgen.uniform_mix_prob = parse_double(k, v);
    });
    add("goalgen.min_buffer_steps", [](auto& c, auto& k, auto& v) {
      c.goalgen.min_buffer_steps = parse_i64(k, v);
    });
    // [agent]
    add("agent.hidden",
        [](auto& c, auto& k, auto& v) { c.agent.hidden = parse_int_list(k, v); });
    add("agent.gamma",
        [](auto& c, auto& k, auto& v) { c.agent.gamma = parse_double(k, v); });
    add("agent.learning_rate", [](auto& c, auto& k, auto& v) {
      c.agent.learning_rate = parse_double(k, v);
    });
    add("agent.batch_size",
        [](auto& c, auto& k, auto& v) { c.agent.batch_size = parse_int(k, v); });
    add("agent.tau",
        [](auto& c, auto& k, auto& v) { c.agent.tau = parse_double(k, v); });
    add("agent.eps_start",
        [](auto& c, auto& k, auto& v) { c.agent.eps_start = parse_double(k, v); });
    add("agent.eps_end",
        [](auto& c, auto& k, auto& v) { c.agent.eps_end = parse_double(k, v); });
    add("agent.eps_anneal_frac", [](auto& c, auto& k, auto& v) {
      c.agent.eps_anneal_frac = parse_double(k, v);
    });
    add("agent.noise_scale", [](auto& c, auto& k, auto& v) {
      c.agent.noise_scale = parse_double(k, v);
    });
    add("agent.learn_start",
        [](auto& c, auto& k, auto& v) { c.agent.learn_start = parse_i64(k, v); });
    add("agent.updates_per_step", [](auto& c, auto& k, auto& v) {
      c.agent.updates_per_step = parse_int(k, v);
    });
    return t;
  }();
  return table;
}

void check_positive_widths(const char* name, const std::vector<int>& hidden) {
  if (hidden.empty()) {
    throw ConfigError(std::string("config: ") + name + " hidden layers empty");
  }
  for (int h : hidden) {
    if (h < 1) {
      throw ConfigError(std::string("config: ") + name +
                        " hidden widths must be positive");
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (eval_every < 1) throw ConfigError("config: eval_every must be >= 1");
  if (total_env_steps < eval_every) {
    throw ConfigError("config: total_env_steps must be >= eval_every");
  }
  if (eval_goal_count < 1) throw ConfigError("config: eval_goal_count must be >= 1");
  if (seeds.empty()) throw ConfigError("config: seeds must be nonempty");
  if (snapshot_every < 0) throw ConfigError("config: snapshot_every must be >= 0");
  if (snapshot_goal_count < 0) {
    throw ConfigError("config: snapshot_goal_count must be >= 0");
  }
  if (snapshot_pool_size < 1) {
    throw ConfigError("config: snapshot_pool_size must be >= 1");
  }
  if (out_dir.empty()) throw ConfigError("config: out_dir must be set");

  int horizon = 0;
  if (env == EnvChoice::gridnav) {
    if (gridnav.width < 1 || gridnav.height < 1) {
      throw ConfigError("config: grid dimensions must be positive");
    }
    if (gridnav.horizon < 1) throw ConfigError("config: horizon must be >= 1");
    if (gridnav.map_file.empty() && gridnav.layout != "two_room" &&
        gridnav.layout != "open") {
      throw ConfigError("config: layout must be two_room or open");
    }
    horizon = gridnav.horizon;
  } else {
    if (pointreach.max_step <= 0.0) {
      throw ConfigError("config: max_step must be > 0");
    }
    if (pointreach.epsilon <= 0.0) throw ConfigError("config: epsilon must be > 0");
    if (pointreach.horizon < 1) throw ConfigError("config: horizon must be >= 1");
    horizon = pointreach.horizon;
  }

  if (replay.capacity < horizon) {
    throw ConfigError("config: replay capacity must hold at least one episode");
  }
  if (replay.her_k < 0) throw ConfigError("config: her_k must be >= 0");

  if (ddf.bins < 1) throw ConfigError("config: ddf bins must be >= 1");
  if (ddf.bins > horizon) {
    throw ConfigError("config: ddf bins must not exceed the horizon");
  }
  check_positive_widths("ddf", ddf.hidden);
  if (ddf.pairs_per_retrain < 1) {
    throw ConfigError("config: pairs_per_retrain must be >= 1");
  }
  if (ddf.epochs < 1 || ddf.batch_size < 1) {
    throw ConfigError("config: ddf epochs and batch_size must be >= 1");
  }
  if (ddf.learning_rate <= 0.0) {
    throw ConfigError("config: ddf learning_rate must be > 0");
  }
  if (ddf.retrain_interval < 1) {
    throw ConfigError("config: retrain_interval must be >= 1");
  }
  if (ddf.recent_steps < 1) throw ConfigError("config: recent_steps must be >= 1");
  if (ddf.holdout_fraction < 0.0 || ddf.holdout_fraction >= 1.0) {
    throw ConfigError("config: holdout_fraction must lie in [0, 1)");
  }

  if (goalgen.candidate_batch_size < 1) {
    throw ConfigError("config: candidate_batch_size must be >= 1");
  }
  if (goalgen.target_bins < 1 || goalgen.target_bins > ddf.bins) {
    throw ConfigError("config: target_bins must lie in [1, bins]");
  }
  if (goalgen.min_candidates < 1) {
    throw ConfigError("config: min_candidates must be >= 1");
  }
  if (goalgen.uniform_mix_prob < 0.0 || goalgen.uniform_mix_prob > 1.0) {
    throw ConfigError("config: uniform_mix_prob must lie in [0, 1]");
  }
  if (goalgen.min_buffer_steps < 0) {
    throw ConfigError("config: min_buffer_steps must be >= 0");
  }

  check_positive_widths("agent", agent.hidden);
  if (agent.gamma < 0.0 || agent.gamma >= 1.0) {
    throw ConfigError("config: gamma must lie in [0, 1)");
  }
  if (agent.learning_rate <= 0.0) {
    throw ConfigError("config: agent learning_rate must be > 0");
  }
  if (agent.batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
  if (agent.tau <= 0.0 || agent.tau > 1.0) {
    throw ConfigError("config: tau must lie in (0, 1]");
  }
  if (agent.eps_start < 0.0 || agent.eps_start > 1.0 || agent.eps_end < 0.0 ||
      agent.eps_end > agent.eps_start) {
    throw ConfigError("config: need 0 <= eps_end <= eps_start <= 1");
  }
  if (agent.eps_anneal_frac <= 0.0 || agent.eps_anneal_frac > 1.0) {
    throw ConfigError("config: eps_anneal_frac must lie in (0, 1]");
  }
  if (agent.noise_scale < 0.0) {
    throw ConfigError("config: noise_scale must be >= 0");
  }
  if (agent.learn_start < 0) throw ConfigError("config: learn_start must be >= 0");
  if (agent.updates_per_step < 0) {
    throw ConfigError("config: updates_per_step must be >= 0");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string section;
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": empty section name");
      }
      static const std::set<std::string> known = {
          "experiment", "gridnav", "pointreach", "replay",
          "ddf",        "goalgen", "agent",      "meta"};
      if (!known.count(section)) {
        throw ConfigError("config: unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    if (section.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": key before any section");
    }
    if (section == "meta") continue;  // manifests carry extra metadata
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full_key = section + "." + key;
    const auto it = setters().find(full_key);
    if (it == setters().end()) {
      throw ConfigError("config: unknown key '" + full_key + "'");
    }
    it->second(config, full_key, value);
  }
  return config;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  auto list_int = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      s += format_int(v[i]);
    }
    return s;
  };
  std::string seed_list;
  for (std::size_t i = 0; i < c.seeds.size(); ++i) {
    if (i) seed_list += ",";
    seed_list += format_int(static_cast<std::int64_t>(c.seeds[i]));
  }
  out << "[experiment]\n"
      << "env = " << to_string(c.env) << "\n"
      << "method = " << to_string(c.method) << "\n"
      << "total_env_steps = " << format_int(c.total_env_steps) << "\n"
      << "eval_every = " << format_int(c.eval_every) << "\n"
      << "eval_goal_count = " << format_int(c.eval_goal_count) << "\n"
      << "seeds = " << seed_list << "\n"
      << "snapshot_every = " << format_int(c.snapshot_every) << "\n"
      << "snapshot_goal_count = " << format_int(c.snapshot_goal_count) << "\n"
      << "snapshot_pool_size = " << format_int(c.snapshot_pool_size) << "\n"
      << "out_dir = " << c.out_dir << "\n\n"
      << "[gridnav]\n"
      << "width = " << format_int(c.gridnav.width) << "\n"
      << "height = " << format_int(c.gridnav.height) << "\n"
      << "horizon = " << format_int(c.gridnav.horizon) << "\n"
      << "layout = " << c.gridnav.layout << "\n"
      << "map_file = " << c.gridnav.map_file << "\n\n"
      << "[pointreach]\n"
      << "max_step = " << format_double(c.pointreach.max_step) << "\n"
      << "epsilon = " << format_double(c.pointreach.epsilon) << "\n"
      << "horizon = " << format_int(c.pointreach.horizon) << "\n\n"
      << "[replay]\n"
      << "capacity = " << format_int(c.replay.capacity) << "\n"
      << "her_k = " << format_int(c.replay.her_k) << "\n\n"
      << "[ddf]\n"
      << "bins = " << format_int(c.ddf.bins) << "\n"
      << "hidden = " << list_int(c.ddf.hidden) << "\n"
      << "pairs_per_retrain = " << format_int(c.ddf.pairs_per_retrain) << "\n"
      << "epochs = " << format_int(c.ddf.epochs) << "\n"
      << "batch_size = " << format_int(c.ddf.batch_size) << "\n"
      << "learning_rate = " << format_double(c.ddf.learning_rate) << "\n"
      << "retrain_interval = " << format_int(c.ddf.retrain_interval) << "\n"
      << "recent_steps = " << format_int(c.ddf.recent_steps) << "\n"
      << "holdout_fraction = " << format_double(c.ddf.holdout_fraction) << "\n\n"
      << "[goalgen]\n"
      << "candidate_batch_size = " << format_int(c.goalgen.candidate_batch_size)
      << "\n"
      << "target_bins = " << format_int(c.goalgen.target_bins) << "\n"
      << "min_candidates = " << format_int(c.goalgen.min_candidates) << "\n"
      << "uniform_mix_prob = " << format_double(c.goalgen.uniform_mix_prob)
      << "\n"
      << "min_buffer_steps = " << format_int(c.goalgen.min_buffer_steps)
      << "\n\n"
      << "[agent]\n"
      << "hidden = " << list_int(c.agent.hidden) << "\n"
      << "gamma = " << format_double(c.agent.gamma) << "\n"
      << "learning_rate = " << format_double(c.agent.learning_rate) << "\n"
      << "batch_size = " << format_int(c.agent.batch_size) << "\n"
      << "tau = " << format_double(c.agent.tau) << "\n"
      << "eps_start = " << format_double(c.agent.eps_start) << "\n"
      << "eps_end = " << format_double(c.agent.eps_end) << "\n"
      << "eps_anneal_frac = " << format_double(c.agent.eps_anneal_frac) << "\n"
      << "noise_scale = " << format_double(c.agent.noise_scale) << "\n"
      << "learn_start = " << format_int(c.agent.learn_start) << "\n"
      << "updates_per_step = " << format_int(c.agent.updates_per_step) << "\n";
  return out.str();
}

}  // namespace ddcur
