// Command-line driver: prepare, run, baseline, ablate, report, gradcheck, stats.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "trihet/experiment.hpp"

namespace fs = std::filesystem;
using namespace trihet;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

// Flags shared by run/ablate; values are applied only when given.
struct TrainFlags {
  std::size_t epochs = 0, patience = 0, hidden = 0, layers = 0, workers = 0, repeats = 0;
  double lr = 0, scalar_lr = 0, dropout = 0;
  std::string activation;
  std::uint64_t seed = 0;
  bool allow_large = false;
  CLI::Option *o_epochs{}, *o_patience{}, *o_hidden{}, *o_layers{}, *o_workers{}, *o_repeats{}, *o_lr{},
      *o_scalar_lr{}, *o_dropout{}, *o_activation{}, *o_seed{};

  void add(CLI::App* app) {
    o_repeats = app->add_option("--repeats", repeats, "Independent repeats");
    o_seed = app->add_option("--seed", seed, "Base seed for splits and initialization");
    o_epochs = app->add_option("--epochs", epochs);
    o_patience = app->add_option("--patience", patience);
    o_lr = app->add_option("--lr", lr, "Learning rate for layer and decoder weights");
    o_scalar_lr = app->add_option("--scalar-lr", scalar_lr);
    o_hidden = app->add_option("--hidden", hidden);
    o_layers = app->add_option("--layers", layers);
    o_dropout = app->add_option("--dropout", dropout);
    o_activation = app->add_option("--activation", activation)->check(CLI::IsMember({"relu", "mish"}));
    o_workers = app->add_option("--workers", workers, "Concurrent repeats (0: all cores)");
    app->add_flag("--allow-large", allow_large, "Permit full-graph training on very large datasets");
  }

  void apply(RunConfig& c) const {
    if (*o_repeats) c.repeats = repeats;
    if (*o_seed) c.seed = seed;
    if (*o_epochs) c.train.epochs = epochs;
    if (*o_patience) c.train.patience = patience;
    if (*o_lr) c.train.main_lr = lr;
    if (*o_scalar_lr) c.train.scalar_lr = scalar_lr;
    if (*o_hidden) c.train.hidden = hidden;
    if (*o_layers) c.train.layers = layers;
    if (*o_dropout) c.train.dropout = dropout;
    if (*o_activation) c.train.activation = activation == "mish" ? Activation::mish : Activation::relu;
    if (*o_workers) c.workers = workers;
    if (allow_large) c.allow_large = true;
  }
};

struct HeuristicFlags {
  double katz_beta = 0, rwr_c = 0, lp_alpha = 0;
  std::size_t lrw_steps = 0, hops = 0;
  CLI::Option *o_beta{}, *o_c{}, *o_alpha{}, *o_steps{}, *o_hops{};

  void add(CLI::App* app) {
    o_beta = app->add_option("--katz-beta", katz_beta);
    o_c = app->add_option("--rwr-c", rwr_c);
    o_alpha = app->add_option("--lp-alpha", lp_alpha);
    o_steps = app->add_option("--lrw-steps", lrw_steps);
    o_hops = app->add_option("--hops", hops, "Score on the ego subgraph of this radius (0: whole graph)");
  }
  void apply(RunConfig& c) const {
    if (*o_beta) c.heuristic.katz_beta = katz_beta;
    if (*o_c) c.heuristic.rwr_c = rwr_c;
    if (*o_alpha) c.heuristic.lp_alpha = lp_alpha;
    if (*o_steps) c.heuristic.lrw_steps = lrw_steps;
    if (*o_hops) c.heuristic_hops = hops;
  }
};

void print_report(const EvalReport& r) {
  fmt::print("{:<10} {:<8} repeats={:<3} AUC {:6.2f} ± {:5.2f}  AP {:6.2f} ± {:5.2f}{}{}\n", r.dataset, r.method,
             r.repeats, r.auc_mean, r.auc_std, r.ap_mean, r.ap_std, r.std_undefined ? "  (single repeat)" : "",
             r.failures ? fmt::format("  failures={}", r.failures) : "");
}

void write_outputs(const EvalReport& r, const RunConfig& c, const fs::path& out) {
  if (out.empty()) return;
  fs::create_directories(out);
  const auto stem = fmt::format("{}_{}", r.dataset, r.method);
  save_report_json(r, out / (stem + ".json"));
  std::ofstream(out / (stem + ".cfg")) << c.to_text();
}

RunConfig base_config(const fs::path& config_file, const PreparedData& data) {
  RunConfig c;
  if (!config_file.empty()) {
    c = RunConfig::load(config_file);
  } else {
    apply_dataset_defaults(c, data.dataset);
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-aware GCN link prediction toolkit"};
  app.require_subcommand(1);

  // prepare
  PrepareOptions prep;
  std::string anchor_rule = "coverage";
  bool no_count_check = false;
  auto* c_prep = app.add_subcommand("prepare", "Validate a dataset and write graph, features and split");
  c_prep->add_option("--dataset", prep.dataset, "Dataset name (registry entries are validated)")->required();
  c_prep->add_option("--edges", prep.edges, "Edge list (.tsv/.txt whitespace, .csv comma)")->required();
  c_prep->add_option("--features", prep.features, "CSV 'id,v1,...,vk'; omit for anchor features");
  c_prep->add_option("--out", prep.out_dir, "Output directory")->required();
  c_prep->add_option("--seed", prep.seed, "Split seed");
  c_prep->add_option("--anchor-rate", prep.anchors.rate);
  c_prep->add_option("--anchor-cap", prep.anchors.cap);
  c_prep->add_option("--anchor-coverage", prep.anchors.coverage);
  c_prep->add_option("--anchor-rule", anchor_rule)->check(CLI::IsMember({"coverage", "percentile"}));
  c_prep->add_flag("--no-count-check", no_count_check, "Do not enforce the registry node/edge counts");

  // run
  fs::path prepared;
  fs::path config_file;
  fs::path out_dir;
  std::string method;
  TrainFlags tf;
  HeuristicFlags hf;
  auto* c_run = app.add_subcommand("run", "Train/evaluate one method over repeated splits");
  c_run->add_option("--prepared", prepared, "Directory written by 'prepare'")->required();
  c_run->add_option("--config", config_file, "Key-value config file");
  auto* o_method = c_run->add_option("--method", method, "trihet, gcn, gcn_cn, gcn_hi, cn, aa, ra, katz, rwr, lp, lrw");
  c_run->add_option("--out", out_dir, "Report directory (per-repeat histories go to <out>/runs)");
  tf.add(c_run);
  hf.add(c_run);

  // baseline
  std::vector<std::string> methods{"cn", "aa", "ra", "katz", "rwr", "lp", "lrw"};
  TrainFlags bf;
  HeuristicFlags bhf;
  auto* c_base = app.add_subcommand("baseline", "Evaluate heuristic scorers on shared splits");
  c_base->add_option("--prepared", prepared)->required();
  c_base->add_option("--methods", methods)->delimiter(',');
  c_base->add_option("--out", out_dir);
  bf.add(c_base);
  bhf.add(c_base);

  // ablate
  TrainFlags af;
  auto* c_abl = app.add_subcommand("ablate", "Train gcn, gcn_cn, gcn_hi and trihet on identical splits");
  c_abl->add_option("--prepared", prepared)->required();
  c_abl->add_option("--config", config_file);
  c_abl->add_option("--out", out_dir);
  af.add(c_abl);

  // report
  std::vector<fs::path> report_files;
  fs::path csv_out;
  fs::path md_out;
  auto* c_rep = app.add_subcommand("report", "Combine report files into CSV and Markdown tables");
  c_rep->add_option("reports", report_files, "Report JSON files")->required()->check(CLI::ExistingFile);
  c_rep->add_option("--csv", csv_out);
  c_rep->add_option("--md", md_out);

  // gradcheck
  std::size_t gc_instances = 20, gc_nodes = 8, gc_hidden = 4;
  std::uint64_t gc_seed = 1;
  auto* c_gc = app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  c_gc->add_option("--instances", gc_instances);
  c_gc->add_option("--max-nodes", gc_nodes);
  c_gc->add_option("--max-hidden", gc_hidden);
  c_gc->add_option("--seed", gc_seed);

  // stats
  std::vector<fs::path> stat_inputs;
  auto* c_stats = app.add_subcommand("stats", "Clustering coefficient and degree CV per graph");
  c_stats->add_option("inputs", stat_inputs, "Prepared directories or edge files")->required();
  c_stats->add_option("--out", csv_out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*c_prep) {
      prep.anchors.rule =
          anchor_rule == "percentile" ? ComponentRule::size_percentile : ComponentRule::cumulative_coverage;
      prep.check_counts = !no_count_check;
      const auto s = cmd_prepare(prep);
      for (const auto& w : s.warnings) fmt::print(stderr, "warning: {}\n", w);
      fmt::print("{}: {} nodes, {} edges ({} self-loops, {} duplicates dropped), {} {} feature columns -> {}\n",
                 prep.dataset, s.nodes, s.edges, s.self_loops, s.duplicates, s.feature_dims,
                 s.feature_kind == FeatureKind::intrinsic ? "intrinsic" : "anchor", prep.out_dir.string());
      return 0;
    }

    if (*c_run) {
      const auto data = load_prepared(prepared);
      auto cfg = base_config(config_file, data);
      if (*o_method) {
        cfg.method = method;
        if (cfg.is_model()) cfg.train.mode = parse_ablation(method);
      }
      tf.apply(cfg);
      hf.apply(cfg);
      if (!out_dir.empty()) cfg.out_dir = out_dir / "runs";
      const auto r = cmd_run(cfg, data);
      print_report(r);
      write_outputs(r, cfg, out_dir);
      return 0;
    }

    if (*c_base) {
      const auto data = load_prepared(prepared);
      RunConfig cfg;
      cfg.repeats = 100;
      bf.apply(cfg);
      bhf.apply(cfg);
      std::vector<HeuristicMethod> ms;
      for (const auto& m : methods) {
        try {
          ms.push_back(parse_heuristic(m));
        } catch (const std::invalid_argument&) {
          throw ConfigError(fmt::format("unknown heuristic '{}'", m));
        }
      }
      for (const auto& r : cmd_baseline(cfg, ms, data)) {
        print_report(r);
        RunConfig rc = cfg;
        rc.method = r.method;
        write_outputs(r, rc, out_dir);
      }
      return 0;
    }

    if (*c_abl) {
      const auto data = load_prepared(prepared);
      auto cfg = base_config(config_file, data);
      af.apply(cfg);
      if (!out_dir.empty()) cfg.out_dir = out_dir / "runs";
      const auto reports = cmd_ablate(cfg, data);
      for (const auto& r : reports) {
        print_report(r);
        RunConfig rc = cfg;
        rc.method = r.method;
        rc.train.mode = parse_ablation(r.method);
        write_outputs(r, rc, out_dir);
      }
      return 0;
    }

    if (*c_rep) {
      std::vector<EvalReport> reports;
      for (const auto& f : report_files) reports.push_back(load_report_json(f));
      const auto csv = report_csv(reports);
      const auto md = report_markdown(reports);
      if (!csv_out.empty()) std::ofstream(csv_out) << csv;
      if (!md_out.empty()) std::ofstream(md_out) << md;
      std::cout << md;
      return 0;
    }

    if (*c_gc) {
      const auto rep = gradcheck(gc_instances, gc_nodes, gc_seed, gc_hidden);
      fmt::print("instances={} entries={} max_rel_error={:.3e} scalar_grads_nonzero={}\n", rep.instances,
                 rep.entries_checked, rep.max_rel_error, rep.scalar_grads_nonzero);
      return rep.max_rel_error < 1e-4 ? 0 : kExitRuntime;
    }

    if (*c_stats) {
      std::vector<StructureStats> rows;
      for (const auto& in : stat_inputs) {
        if (fs::is_directory(in)) {
          const auto data = load_prepared(in);
          rows.push_back(structure_stats(data.dataset, data.graph));
        } else {
          const auto fmt_kind = in.extension() == ".csv" ? EdgeFormat::csv : EdgeFormat::tsv;
          rows.push_back(structure_stats(in.stem().string(), load_edge_list(in, fmt_kind).graph));
        }
      }
      const auto csv = stats_csv(rows);
      if (csv_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(csv_out) << csv;
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
