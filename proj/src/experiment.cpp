#include "trihet/experiment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <omp.h>

#include <json.hpp>

#include "trihet/model.hpp"
#include "trihet/rng.hpp"

namespace trihet {

namespace {

const std::array<DatasetEntry, 9> kRegistry{{
    {"cora", 2708, 5278, 1433, true, 0.01, 128, false, 0},
    {"citeseer", 3312, 4660, 3703, true, 0.01, 384, false, 0},
    {"pubmed", 19717, 44327, 500, true, 0.005, 128, false, 0},
    {"dblp", 17716, 52867, 1639, true, 0.01, 128, false, 0},
    {"cs", 18333, 81894, 6805, true, 0.001, 384, false, 0},
    {"facebook", 4039, 88234, 1283, true, 0.003, 384, false, 0},
    {"power", 4941, 6594, 150, false, 0.001, 256, false, 0},
    {"twitter", 256491, 327374, 150, false, 0.005, 256, true, 4},
    {"int", 26848, 41262, 600, false, 0.005, 256, false, 0},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::uint64_t parse_hex64(const std::string& s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc{} || p != s.data() + s.size()) throw std::runtime_error("bad hex value '" + s + "'");
  return v;
}

// Key/value parsing for config files.
std::map<std::string, std::string> parse_kv(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("config line {}: expected 'key = value'", line_no));
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (!kv.emplace(key, value).second) throw ConfigError(fmt::format("config line {}: duplicate key '{}'", line_no, key));
  }
  return kv;
}

template <class T>
T parse_number(const std::string& key, const std::string& s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ConfigError(fmt::format("config key '{}': cannot parse '{}'", key, s));
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(fmt::format("config key '{}': expected true or false, got '{}'", key, s));
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

bool is_model_method(std::string_view m) { return m == "trihet" || m == "gcn" || m == "gcn_cn" || m == "gcn_hi"; }

std::string_view to_string(Activation a) { return a == Activation::relu ? "relu" : "mish"; }

}  // namespace

std::span<const DatasetEntry> dataset_registry() { return kRegistry; }

const DatasetEntry* find_dataset(std::string_view name) {
  const auto key = lower(name);
  for (const auto& e : kRegistry) {
    if (e.name == key) return &e;
  }
  return nullptr;
}

PreparedSummary cmd_prepare(const PrepareOptions& opt) {
  if (opt.out_dir.empty()) throw ConfigError("prepare needs an output directory");
  if (!std::filesystem::exists(opt.edges)) throw ConfigError("edge file not found: " + opt.edges.string());
  const auto* entry = find_dataset(opt.dataset);
  if (entry && entry->intrinsic_features && opt.features.empty()) {
    throw ConfigError(fmt::format("dataset '{}' expects an intrinsic feature file", entry->name));
  }
  if (!opt.features.empty() && !std::filesystem::exists(opt.features)) {
    throw ConfigError("feature file not found: " + opt.features.string());
  }

  const auto format = opt.edges.extension() == ".csv" ? EdgeFormat::csv : EdgeFormat::tsv;
  auto loaded = load_edge_list(opt.edges, format);
  const Graph& g = loaded.graph;

  PreparedSummary s;
  s.nodes = g.num_nodes();
  s.edges = g.num_edges();
  s.self_loops = loaded.self_loops;
  s.duplicates = loaded.duplicates;
  if (entry && opt.check_counts && (s.nodes != entry->nodes || s.edges != entry->edges)) {
    throw ConfigError(fmt::format("dataset '{}': expected {} nodes and {} edges, found {} nodes and {} edges",
                                  entry->name, entry->nodes, entry->edges, s.nodes, s.edges));
  }

  FeatureMatrix x;
  if (!opt.features.empty()) {
    x = import_features_csv(opt.features, g);
  } else {
    const auto anchors = select_anchors(g, opt.anchors);
    x = build_anchor_features(g, anchors);
  }
  s.feature_dims = x.values.cols();
  s.feature_kind = x.kind;
  if (entry && s.feature_dims != entry->feature_dims) {
    const auto msg = fmt::format("dataset '{}': expected {} feature columns, built {}", entry->name,
                                 entry->feature_dims, s.feature_dims);
    if (x.kind == FeatureKind::intrinsic && opt.check_counts) throw ConfigError(msg);
    s.warnings.push_back(msg);
  }

  const auto split = random_link_split(g, opt.ratios, opt.seed);

  std::filesystem::create_directories(opt.out_dir);
  write_edge_list(g, opt.out_dir / "graph.tsv");
  write_id_map(g, opt.out_dir / "ids.tsv");
  save_features(x, opt.out_dir / "features.bin");
  save_split(split, opt.out_dir / "split.txt");
  write_file(opt.out_dir / "dataset.txt",
             fmt::format("name = {}\nnodes = {}\nedges = {}\nfeature_dims = {}\nfeature_kind = {}\n"
                         "graph_hash = {}\nseed = {}\nratio_train = {}\nratio_val = {}\nratio_test = {}\nprng = {}\n",
                         entry ? entry->name : lower(opt.dataset), s.nodes, s.edges, s.feature_dims,
                         x.kind == FeatureKind::intrinsic ? "intrinsic" : "anchor", hex64(g.hash()), opt.seed,
                         fmt_double(opt.ratios.train), fmt_double(opt.ratios.val), fmt_double(opt.ratios.test),
                         kPrngId));
  return s;
}

PreparedData load_prepared(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / "dataset.txt")) {
    throw ConfigError("not a prepared dataset directory: " + dir.string());
  }
  const auto kv = parse_kv(read_file(dir / "dataset.txt"));
  auto get = [&](const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw std::runtime_error(fmt::format("{}: missing '{}'", (dir / "dataset.txt").string(), k));
    return it->second;
  };
  PreparedData d;
  d.dataset = get("name");
  d.seed = parse_number<std::uint64_t>("seed", get("seed"));
  d.ratios = {parse_number<double>("ratio_train", get("ratio_train")),
              parse_number<double>("ratio_val", get("ratio_val")),
              parse_number<double>("ratio_test", get("ratio_test"))};
  // Every node has an edge, so the stored compact ids reload unchanged.
  d.graph = load_edge_list(dir / "graph.tsv").graph;
  if (d.graph.num_nodes() != parse_number<std::size_t>("nodes", get("nodes")) ||
      hex64(d.graph.hash()) != get("graph_hash")) {
    throw std::runtime_error("prepared graph does not match its recorded hash: " + dir.string());
  }
  d.features = load_features(dir / "features.bin");
  if (d.features.values.rows() != d.graph.num_nodes()) {
    throw std::runtime_error("prepared features do not match the graph's node count");
  }
  return d;
}

bool RunConfig::is_model() const { return is_model_method(method); }

void RunConfig::validate() const {
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (!is_model()) {
    try {
      parse_heuristic(method);
    } catch (const std::invalid_argument&) {
      throw ConfigError(fmt::format("unknown method '{}'", method));
    }
  }
  if (ratios.train <= 0.0 || ratios.val <= 0.0 || ratios.test <= 0.0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be positive and sum to 1");
  }
  if (is_model()) {
    try {
      train.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (heuristic.katz_beta <= 0.0 || heuristic.rwr_c <= 0.0 || heuristic.rwr_c >= 1.0 ||
             heuristic.lp_alpha < 0.0 || heuristic.lrw_steps < 1) {
    throw ConfigError("heuristic parameters out of range");
  }
}

std::string RunConfig::to_text() const {
  std::map<std::string, std::string> kv;
  kv["method"] = method;
  kv["repeats"] = std::to_string(repeats);
  kv["seed"] = std::to_string(seed);
  kv["ratio_train"] = fmt_double(ratios.train);
  kv["ratio_val"] = fmt_double(ratios.val);
  kv["ratio_test"] = fmt_double(ratios.test);
  kv["prng"] = std::string(kPrngId);
  if (is_model()) {
    kv["epochs"] = std::to_string(train.epochs);
    kv["patience"] = std::to_string(train.patience);
    kv["dropout"] = fmt_double(train.dropout);
    kv["lr"] = fmt_double(train.main_lr);
    kv["scalar_lr"] = fmt_double(train.scalar_lr);
    kv["hidden"] = std::to_string(train.hidden);
    kv["layers"] = std::to_string(train.layers);
    kv["activation"] = std::string(to_string(train.activation));
    if (train.s_cn_init) kv["s_cn_init"] = fmt_double(*train.s_cn_init);
    if (train.s_hi_init) kv["s_hi_init"] = fmt_double(*train.s_hi_init);
    if (train.train_s_cn) kv["train_s_cn"] = *train.train_s_cn ? "true" : "false";
    if (train.train_s_hi) kv["train_s_hi"] = *train.train_s_hi ? "true" : "false";
    if (allow_large) kv["allow_large"] = "true";
  } else {
    switch (parse_heuristic(method)) {
      case HeuristicMethod::katz: kv["katz_beta"] = fmt_double(heuristic.katz_beta); break;
      case HeuristicMethod::rwr: kv["rwr_c"] = fmt_double(heuristic.rwr_c); break;
      case HeuristicMethod::lp: kv["lp_alpha"] = fmt_double(heuristic.lp_alpha); break;
      case HeuristicMethod::lrw: kv["lrw_steps"] = std::to_string(heuristic.lrw_steps); break;
      default: break;
    }
    if (heuristic_hops) kv["heuristic_hops"] = std::to_string(*heuristic_hops);
  }
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const {
  Fnv1a h;
  h.str(to_text());
  return h.value();
}

RunConfig RunConfig::from_text(std::string_view text) {
  auto kv = parse_kv(text);
  RunConfig c;
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    auto v = it->second;
    kv.erase(it);
    return v;
  };
  if (auto v = take("method")) c.method = *v;
  if (auto v = take("prepared")) c.prepared = *v;
  if (auto v = take("out_dir")) c.out_dir = *v;
  if (auto v = take("repeats")) c.repeats = parse_number<std::size_t>("repeats", *v);
  if (auto v = take("seed")) c.seed = parse_number<std::uint64_t>("seed", *v);
  if (auto v = take("workers")) c.workers = parse_number<std::size_t>("workers", *v);
  if (auto v = take("ratio_train")) c.ratios.train = parse_number<double>("ratio_train", *v);
  if (auto v = take("ratio_val")) c.ratios.val = parse_number<double>("ratio_val", *v);
  if (auto v = take("ratio_test")) c.ratios.test = parse_number<double>("ratio_test", *v);
  if (auto v = take("prng"); v && *v != kPrngId) {
    throw ConfigError(fmt::format("config was written for generator '{}', this build uses '{}'", *v, kPrngId));
  }

  const bool model = is_model_method(c.method);
  const std::vector<std::string_view> model_keys = {"epochs",     "patience",   "dropout",    "lr",         "scalar_lr",  "hidden",
                              "layers",     "activation", "s_cn_init",  "s_hi_init",  "train_s_cn", "train_s_hi",
                              "allow_large"};
  const std::vector<std::string_view> heuristic_keys = {"katz_beta", "rwr_c", "lp_alpha", "lrw_steps", "heuristic_hops"};
  for (std::string_view k : model ? heuristic_keys : model_keys) {
    if (kv.count(std::string(k))) {
      throw ConfigError(fmt::format("config key '{}' does not apply to method '{}'", k, c.method));
    }
  }
  if (model) {
    c.train.mode = parse_ablation(c.method);
    if (auto v = take("epochs")) c.train.epochs = parse_number<std::size_t>("epochs", *v);
    if (auto v = take("patience")) c.train.patience = parse_number<std::size_t>("patience", *v);
    if (auto v = take("dropout")) c.train.dropout = parse_number<double>("dropout", *v);
    if (auto v = take("lr")) c.train.main_lr = parse_number<double>("lr", *v);
    if (auto v = take("scalar_lr")) c.train.scalar_lr = parse_number<double>("scalar_lr", *v);
    if (auto v = take("hidden")) c.train.hidden = parse_number<std::size_t>("hidden", *v);
    if (auto v = take("layers")) c.train.layers = parse_number<std::size_t>("layers", *v);
    if (auto v = take("activation")) {
      if (*v == "relu") c.train.activation = Activation::relu;
      else if (*v == "mish") c.train.activation = Activation::mish;
      else throw ConfigError("activation must be relu or mish");
    }
    if (auto v = take("s_cn_init")) c.train.s_cn_init = parse_number<double>("s_cn_init", *v);
    if (auto v = take("s_hi_init")) c.train.s_hi_init = parse_number<double>("s_hi_init", *v);
    if (auto v = take("train_s_cn")) c.train.train_s_cn = parse_bool("train_s_cn", *v);
    if (auto v = take("train_s_hi")) c.train.train_s_hi = parse_bool("train_s_hi", *v);
    if (auto v = take("allow_large")) c.allow_large = parse_bool("allow_large", *v);
  } else {
    if (auto v = take("katz_beta")) c.heuristic.katz_beta = parse_number<double>("katz_beta", *v);
    if (auto v = take("rwr_c")) c.heuristic.rwr_c = parse_number<double>("rwr_c", *v);
    if (auto v = take("lp_alpha")) c.heuristic.lp_alpha = parse_number<double>("lp_alpha", *v);
    if (auto v = take("lrw_steps")) c.heuristic.lrw_steps = parse_number<std::size_t>("lrw_steps", *v);
    if (auto v = take("heuristic_hops")) c.heuristic_hops = parse_number<std::size_t>("heuristic_hops", *v);
  }
  if (!kv.empty()) throw ConfigError(fmt::format("unknown config key '{}'", kv.begin()->first));
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  return from_text(read_file(path));
}

void apply_dataset_defaults(RunConfig& cfg, std::string_view dataset) {
  if (const auto* e = find_dataset(dataset)) {
    cfg.train.main_lr = e->lr;
    cfg.train.hidden = e->hidden;
  }
}

namespace {

struct RepeatOutcome {
  bool ok = false;
  RepeatMetrics metrics;
  std::uint64_t eval_hash = 0;
  std::string error;
};

RepeatOutcome run_repeat(const RunConfig& cfg, const PreparedData& data, const Graph& graph, std::size_t r) {
  RepeatOutcome out;
  const std::uint64_t seed = repeat_seed(cfg.seed, r);
  const auto split = random_link_split(graph, cfg.ratios, seed);
  out.eval_hash = split.eval_pairs_hash();
  const auto labels = stacked_labels(split.test_pos.size(), split.test_neg.size());

  if (!cfg.is_model()) {
    std::vector<NodePair> pairs(split.test_pos);
    pairs.insert(pairs.end(), split.test_neg.begin(), split.test_neg.end());
    const auto scored = score_pairs(parse_heuristic(cfg.method), split.train_graph, pairs, cfg.heuristic);
    out.metrics = {auc(scored.scores, labels), average_precision(scored.scores, labels)};
    out.ok = true;
    return out;
  }

  TrainConfig tc = cfg.train;
  tc.mode = parse_ablation(cfg.method);
  tc.seed = seed;
  const auto result = train(split, data.features, tc);
  if (result.best_epoch == 0) {
    out.error = result.diagnostics.empty() ? "no completed epoch" : result.diagnostics;
    return out;
  }
  const auto op = build_phi_static(split.train_graph);
  const auto input = FeatureInput::from_dense(data.features.values);
  const auto m = evaluate_pairs(op, input, result.best, split.test_pos, split.test_neg);
  out.metrics = {m.auc, m.ap};
  out.ok = true;
  if (!cfg.out_dir.empty()) {
    const auto dir = cfg.out_dir / fmt::format("{}_repeat{:03}", cfg.method, r);
    std::filesystem::create_directories(dir);
    save_history_csv(result.history, dir / "history.csv");
    save_checkpoint(result.best, cfg.hash(), seed, dir / "checkpoint.bin");
  }
  return out;
}

}  // namespace

EvalReport cmd_run(const RunConfig& cfg) {
  return cmd_run(cfg, load_prepared(cfg.prepared));
}

EvalReport cmd_run(const RunConfig& cfg, const PreparedData& data) {
  cfg.validate();
  const auto* entry = find_dataset(data.dataset);
  if (cfg.is_model() && entry && entry->large && !cfg.allow_large) {
    throw ConfigError(fmt::format("full-graph training on '{}' needs allow_large", entry->name));
  }

  Graph sub;
  const Graph* graph = &data.graph;
  const std::size_t hops = cfg.heuristic_hops.value_or(entry ? entry->heuristic_hops : 0);
  if (!cfg.is_model() && hops > 0) {
    sub = khop_ego_subgraph(data.graph, cfg.seed, hops).graph;
    graph = &sub;
  }

  std::vector<RepeatOutcome> outcomes(cfg.repeats);
  const int workers = static_cast<int>(
      cfg.workers > 0 ? cfg.workers : std::min<std::size_t>(cfg.repeats, static_cast<std::size_t>(omp_get_max_threads())));
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    try {
      outcomes[r] = run_repeat(cfg, data, *graph, r);
    } catch (const std::exception& e) {
      outcomes[r].error = e.what();
    }
  }

  std::vector<RepeatMetrics> ok;
  std::vector<std::uint64_t> seeds;
  Fnv1a pairs_hash;
  std::size_t failures = 0;
  std::string first_error;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    pairs_hash.u64(outcomes[r].eval_hash);
    if (outcomes[r].ok) {
      ok.push_back(outcomes[r].metrics);
      seeds.push_back(repeat_seed(cfg.seed, r));
    } else {
      ++failures;
      if (first_error.empty()) first_error = outcomes[r].error;
    }
  }
  if (ok.empty()) throw std::runtime_error(fmt::format("all {} repeats failed: {}", cfg.repeats, first_error));
  auto report = aggregate(ok);
  report.dataset = data.dataset;
  report.method = cfg.method;
  report.failures = failures;
  report.config_hash = cfg.hash();
  report.eval_pairs_hash = pairs_hash.value();
  report.seeds = std::move(seeds);
  return report;
}

std::vector<EvalReport> cmd_baseline(const RunConfig& base, std::span<const HeuristicMethod> methods,
                                     const PreparedData& data) {
  std::vector<EvalReport> out;
  for (auto m : methods) {
    RunConfig c = base;
    c.method = std::string(to_string(m));
    out.push_back(cmd_run(c, data));
  }
  return out;
}

std::vector<EvalReport> cmd_ablate(const RunConfig& base, const PreparedData& data) {
  std::vector<EvalReport> out;
  for (auto m : {AblationMode::gcn, AblationMode::gcn_cn, AblationMode::gcn_hi, AblationMode::trihet}) {
    RunConfig c = base;
    c.method = std::string(to_string(m));
    c.train.mode = m;
    out.push_back(cmd_run(c, data));
  }
  return out;
}

void save_report_json(const EvalReport& r, const std::filesystem::path& path) {
  nlohmann::json j;
  j["dataset"] = r.dataset;
  j["method"] = r.method;
  j["repeats"] = r.repeats;
  j["failures"] = r.failures;
  j["auc_mean"] = r.auc_mean;
  j["auc_std"] = r.auc_std;
  j["ap_mean"] = r.ap_mean;
  j["ap_std"] = r.ap_std;
  j["std_undefined"] = r.std_undefined;
  j["config_hash"] = hex64(r.config_hash);
  j["eval_pairs_hash"] = hex64(r.eval_pairs_hash);
  j["prng"] = kPrngId;
  j["seeds"] = r.seeds;
  auto& per = j["per_repeat"] = nlohmann::json::array();
  for (const auto& m : r.per_repeat) per.push_back({{"auc", m.auc}, {"ap", m.ap}});
  write_file(path, j.dump(2) + "\n");
}

EvalReport load_report_json(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
    EvalReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.repeats = j.at("repeats").get<std::size_t>();
    r.failures = j.at("failures").get<std::size_t>();
    r.auc_mean = j.at("auc_mean").get<double>();
    r.auc_std = j.at("auc_std").get<double>();
    r.ap_mean = j.at("ap_mean").get<double>();
    r.ap_std = j.at("ap_std").get<double>();
    r.std_undefined = j.at("std_undefined").get<bool>();
    r.config_hash = parse_hex64(j.at("config_hash").get<std::string>());
    r.eval_pairs_hash = parse_hex64(j.at("eval_pairs_hash").get<std::string>());
    r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    for (const auto& m : j.at("per_repeat")) r.per_repeat.push_back({m.at("auc").get<double>(), m.at("ap").get<double>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string report_csv(std::span<const EvalReport> reports) {
  std::string out = "dataset,method,repeats,auc_mean,auc_std,ap_mean,ap_std,config_hash\n";
  for (const auto& r : reports) {
    out += fmt::format("{},{},{},{:.2f},{:.2f},{:.2f},{:.2f},{}\n", r.dataset, r.method, r.repeats, r.auc_mean,
                       r.auc_std, r.ap_mean, r.ap_std, hex64(r.config_hash));
  }
  return out;
}

std::string report_markdown(std::span<const EvalReport> reports) {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  auto note = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  for (const auto& r : reports) {
    note(datasets, r.dataset);
    note(methods, r.method);
  }
  auto table = [&](const char* title, bool use_auc) {
    std::string t = fmt::format("### {}\n\n| Dataset |", title);
    for (const auto& m : methods) t += " " + m + " |";
    t += "\n|---|";
    for (std::size_t i = 0; i < methods.size(); ++i) t += "---|";
    t += "\n";
    for (const auto& d : datasets) {
      t += "| " + d + " |";
      for (const auto& m : methods) {
        auto it = std::find_if(reports.begin(), reports.end(),
                               [&](const EvalReport& r) { return r.dataset == d && r.method == m; });
        if (it == reports.end()) {
          t += " - |";
        } else {
          t += use_auc ? fmt::format(" {:.2f} ± {:.2f} |", it->auc_mean, it->auc_std)
                       : fmt::format(" {:.2f} ± {:.2f} |", it->ap_mean, it->ap_std);
        }
      }
      t += "\n";
    }
    return t;
  };
  return table("AUC (%)", true) + "\n" + table("AP (%)", false);
}

StructureStats structure_stats(std::string dataset, const Graph& g) {
  return {std::move(dataset), g.num_nodes(), g.num_edges(), global_clustering_coefficient(g), degree_cv(g)};
}

std::string stats_csv(std::span<const StructureStats> rows) {
  std::string out = "dataset,nodes,edges,clustering,degree_cv\n";
  for (const auto& s : rows) {
    out += fmt::format("{},{},{},{:.6f},{:.6f}\n", s.dataset, s.nodes, s.edges, s.clustering, s.degree_cv);
  }
  return out;
}

}  // namespace trihet
