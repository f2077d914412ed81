#include "arc_cli/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "arc/error.hpp"
#include "arc/rng.hpp"

namespace arc::cli {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t as_count(const json& v) {
  if (!v.is_number_unsigned()) throw ConfigError("expected a nonnegative integer");
  return v.get<std::size_t>();
}

double as_number(const json& v) {
  if (!v.is_number()) throw ConfigError("expected a number");
  return v.get<double>();
}

std::string as_string(const json& v) {
  if (!v.is_string()) throw ConfigError("expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v) {
  if (!v.is_boolean()) throw ConfigError("expected true or false");
  return v.get<bool>();
}

std::vector<double> as_numbers(const json& v) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError("expected a number or a list of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_number(e));
  return out;
}

std::vector<std::size_t> as_counts(const json& v) {
  if (v.is_number_unsigned()) return {v.get<std::size_t>()};
  if (!v.is_array()) throw ConfigError("expected an integer or a list of integers");
  std::vector<std::size_t> out;
  for (const auto& e : v) out.push_back(as_count(e));
  return out;
}

std::vector<AttackKind> as_attacks(const json& v) {
  auto one = [](const std::string& name) -> std::vector<AttackKind> {
    if (name == "all") return all_attacks();
    if (name == "none") return {};
    return {parse_attack(name)};
  };
  if (v.is_string()) return one(v.get<std::string>());
  if (!v.is_array()) throw ConfigError("expected an attack name, \"all\", \"none\" or a list");
  std::vector<AttackKind> out;
  for (const auto& e : v) {
    for (AttackKind k : one(as_string(e))) out.push_back(k);
  }
  return out;
}

using Setter = std::function<void(const json&, RunConfig&)>;

struct KeyInfo {
  const char* help;
  Setter set;
};

const std::map<std::string, KeyInfo>& keys() {
  static const std::map<std::string, KeyInfo> table = {
      {"n", {"total workers (integer)", [](const json& v, RunConfig& c) { c.training.n = as_count(v); }}},
      {"f", {"tolerated adversaries (integer, f < n/2)", [](const json& v, RunConfig& c) { c.training.f = as_count(v); }}},
      {"steps", {"iterations T (integer >= 1)", [](const json& v, RunConfig& c) { c.training.steps = as_count(v); }}},
      {"gamma", {"learning rate (number >= 0)", [](const json& v, RunConfig& c) { c.training.gamma = as_number(v); }}},
      {"lr_milestones", {"steps where the learning rate decays (list)", [](const json& v, RunConfig& c) { c.training.lr_milestones = as_counts(v); }}},
      {"lr_decay", {"decay factor applied at each milestone", [](const json& v, RunConfig& c) { c.training.lr_decay = as_number(v); }}},
      {"beta", {"momentum in [0, 1)", [](const json& v, RunConfig& c) { c.training.beta = as_number(v); }}},
      {"batch_size", {"minibatch size, 0 = full local gradient", [](const json& v, RunConfig& c) { c.training.batch_size = as_count(v); }}},
      {"aggregator", {"pipeline such as \"cwtm+nnm+arc\"", [](const json& v, RunConfig& c) { c.training.aggregator = AggregatorSpec::parse(as_string(v)); }}},
      {"init_scale", {"initialisation multiplier mu >= 1", [](const json& v, RunConfig& c) { c.training.init_scale = as_number(v); }}},
      {"heterogeneity", {"\"extreme\" or \"dirichlet\"", [](const json& v, RunConfig& c) {
         const auto s = as_string(v);
         if (s == "extreme") c.training.heterogeneity.kind = Heterogeneity::Kind::Extreme;
         else if (s == "dirichlet") c.training.heterogeneity.kind = Heterogeneity::Kind::Dirichlet;
         else throw ConfigError("expected \"extreme\" or \"dirichlet\"");
       }}},
      {"heterogeneity.alpha", {"Dirichlet concentration (number > 0)", [](const json& v, RunConfig& c) { c.training.heterogeneity.alpha = as_number(v); }}},
      {"attacks", {"\"all\", \"none\", a name (SF, LF, mimic, FOE, ALIE) or a list", [](const json& v, RunConfig& c) { c.attacks = as_attacks(v); }}},
      {"attack.foe_grid", {"FOE factor grid (list)", [](const json& v, RunConfig& c) { c.foe_grid = as_numbers(v); }}},
      {"attack.alie_grid", {"ALIE factor grid (list)", [](const json& v, RunConfig& c) { c.alie_grid = as_numbers(v); }}},
      {"seeds", {"seed or list of seeds", [](const json& v, RunConfig& c) {
         c.seeds.clear();
         for (std::size_t s : as_counts(v)) c.seeds.push_back(s);
       }}},
      {"model.kind", {"\"logistic\", \"mlp\" or \"quadratic\"", [](const json& v, RunConfig& c) { c.training.model.kind = parse_model_kind(as_string(v)); }}},
      {"model.hidden", {"MLP hidden width", [](const json& v, RunConfig& c) { c.training.model.hidden = as_count(v); }}},
      {"model.l2_reg", {"l2 regularisation", [](const json& v, RunConfig& c) { c.training.model.l2_reg = as_number(v); }}},
      {"model.curvature", {"quadratic curvature: number or list of data.dim numbers", [](const json& v, RunConfig& c) { c.training.model.curvature = as_numbers(v); }}},
      {"model.linear", {"quadratic linear term (list of data.dim numbers)", [](const json& v, RunConfig& c) { c.training.model.linear = as_numbers(v); }}},
      {"data.source", {"\"synthetic\" or \"idx\"", [](const json& v, RunConfig& c) {
         const auto s = as_string(v);
         if (s == "synthetic") c.data.source = DataConfig::Source::Synthetic;
         else if (s == "idx") c.data.source = DataConfig::Source::Idx;
         else throw ConfigError("expected \"synthetic\" or \"idx\"");
       }}},
      {"data.classes", {"class count K", [](const json& v, RunConfig& c) { c.data.classes = static_cast<int>(as_count(v)); }}},
      {"data.dim", {"input dimension (synthetic)", [](const json& v, RunConfig& c) { c.data.dim = as_count(v); }}},
      {"data.per_class", {"training samples per class (synthetic)", [](const json& v, RunConfig& c) { c.data.per_class = as_count(v); }}},
      {"data.test_per_class", {"test samples per class (synthetic)", [](const json& v, RunConfig& c) { c.data.test_per_class = as_count(v); }}},
      {"data.spread", {"noise std of the synthetic blobs", [](const json& v, RunConfig& c) { c.data.spread = as_number(v); }}},
      {"data.train_images", {"IDX training images path", [](const json& v, RunConfig& c) { c.data.train_images = as_string(v); }}},
      {"data.train_labels", {"IDX training labels path", [](const json& v, RunConfig& c) { c.data.train_labels = as_string(v); }}},
      {"data.test_images", {"IDX test images path", [](const json& v, RunConfig& c) { c.data.test_images = as_string(v); }}},
      {"data.test_labels", {"IDX test labels path", [](const json& v, RunConfig& c) { c.data.test_labels = as_string(v); }}},
      {"output.dir", {"output directory", [](const json& v, RunConfig& c) { c.output_dir = as_string(v); }}},
      {"threads", {"worker threads (ARC_ROBUST_THREADS overrides)", [](const json& v, RunConfig& c) { c.threads = as_count(v); }}},
      {"emit.csv", {"write per-run metrics CSV", [](const json& v, RunConfig& c) { c.emit_csv = as_bool(v); }}},
      {"emit.json", {"write per-run and merged JSON summaries", [](const json& v, RunConfig& c) { c.emit_json = as_bool(v); }}},
      {"emit.plot_data", {"write seed-averaged accuracy curves", [](const json& v, RunConfig& c) { c.emit_plot_data = as_bool(v); }}},
  };
  return table;
}

void finish(RunConfig& c) {
  if (c.seeds.empty()) throw ConfigError("seeds: the seed list must not be empty");
  auto& model = c.training.model;
  model.num_classes = c.data.classes;
  if (c.data.source == DataConfig::Source::Synthetic) {
    model.input_dim = c.data.dim;
  } else {
    if (c.data.train_images.empty() || c.data.train_labels.empty()) {
      throw ConfigError("data.train_images / data.train_labels are required for data.source = \"idx\"");
    }
    // Real dimension comes from the file header; validated after loading.
    if (model.input_dim == 0) model.input_dim = 1;
  }
  if (model.kind == ModelKind::Quadratic && model.curvature.size() == 1 && model.input_dim > 1) {
    model.curvature.assign(model.input_dim, model.curvature.front());
  }
  if (model.kind == ModelKind::Quadratic && model.curvature.empty()) {
    model.curvature.assign(model.input_dim, 1.0);
  }
  try {
    TrainingConfig probe = c.training;
    for (AttackKind k : c.attacks) {
      probe.attack = AttackSpec::defaults(k);
      probe.validate();
    }
    probe.attack.reset();
    if (c.data.source == DataConfig::Source::Synthetic) probe.validate();
    if (c.data.classes < 2) throw ConfigError("data.classes: need at least two classes");
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  if (c.foe_grid.empty()) throw ConfigError("attack.foe_grid: grid must not be empty");
  if (c.alie_grid.empty()) throw ConfigError("attack.alie_grid: grid must not be empty");
}

}  // namespace

TrainingConfig RunConfig::for_run(std::optional<AttackKind> attack, std::uint64_t seed) const {
  TrainingConfig t = training;
  t.seed = seed;
  t.attack.reset();
  if (attack) {
    AttackSpec spec = AttackSpec::defaults(*attack);
    if (*attack == AttackKind::FallOfEmpires) spec.tau_grid = foe_grid;
    if (*attack == AttackKind::LittleIsEnough) spec.tau_grid = alie_grid;
    t.attack = spec;
  }
  return t;
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected `key = value`");
    const std::string key = trim(body.substr(0, eq));
    const std::string raw = trim(body.substr(eq + 1));
    const auto it = keys().find(key);
    if (it == keys().end()) throw ConfigError(where + ": unknown key '" + key + "'");
    if (auto prev = seen.find(key); prev != seen.end()) {
      throw ConfigError(where + ": key '" + key + "' already set on line " +
                        std::to_string(prev->second));
    }
    seen[key] = line_no;
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      throw ConfigError(where + ": value of '" + key + "' is not valid JSON: " + raw);
    }
    try {
      it->second.set(value, config);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + key + ": " + e.what());
    } catch (const Error& e) {
      throw ConfigError(where + ": " + key + ": " + e.what());
    }
  }
  finish(config);
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_schema() {
  std::ostringstream out;
  out << "config file: one `key = <json value>` per line, '#' starts a comment\n";
  for (const auto& [key, info] : keys()) out << "  " << key << "  " << info.help << '\n';
  return out.str();
}

std::pair<Dataset, Dataset> build_datasets(const RunConfig& config, std::uint64_t seed) {
  const DataConfig& d = config.data;
  if (d.source == DataConfig::Source::Idx) {
    Dataset train = idx_load(d.train_images, d.train_labels, d.classes);
    Dataset test;
    test.dim = train.dim;
    test.num_classes = train.num_classes;
    if (!d.test_images.empty()) test = idx_load(d.test_images, d.test_labels, d.classes);
    return {std::move(train), std::move(test)};
  }
  const RngStream stream = rng_stream(seed, streams::kData);
  Dataset train = synth_generate(d.classes, d.dim, d.per_class, d.spread, stream.child(0));
  Dataset test;
  test.dim = d.dim;
  test.num_classes = d.classes;
  if (d.test_per_class > 0) {
    test = synth_generate(d.classes, d.dim, d.test_per_class, d.spread, stream.child(1));
  }
  return {std::move(train), std::move(test)};
}

}  // namespace arc::cli
