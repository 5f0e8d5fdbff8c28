// blockwatch — temporal-graph forensics for blockchain transaction logs.
//
// Subcommands wire the full pipeline: ingest -> features -> select ->
// cluster -> classify -> behavior, plus distribution fitting and report
// aggregation. All outputs are written atomically under --out, every source
// of randomness derives from the config seed, and a rerun with the same
// config is byte-identical.

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "blockwatch/config.hpp"
#include "blockwatch/error.hpp"
#include "blockwatch/io.hpp"
#include "blockwatch/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using blockwatch::Granularity;
using blockwatch::PipelineConfig;

struct GlobalOptions {
  std::string config_path;
  std::string out = "out";
  std::string granularity;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

PipelineConfig resolve_config(const GlobalOptions& opt) {
  PipelineConfig cfg;
  if (!opt.config_path.empty()) {
    if (!fs::exists(opt.config_path))
      throw blockwatch::Error(blockwatch::Errc::IoError,
                              "missing config file '" + opt.config_path + "'");
    cfg = PipelineConfig::parse(blockwatch::io::read_file(opt.config_path));
  }
  if (opt.seed_set) cfg.seed = opt.seed;
  if (!opt.granularity.empty())
    cfg.granularities = {blockwatch::parse_granularity(opt.granularity)};
  return cfg;
}

Granularity single_granularity(const PipelineConfig& cfg) {
  return cfg.granularities.empty() ? Granularity::All : cfg.granularities.front();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"temporal-graph feature extraction and malicious-account detection"};
  app.require_subcommand(1);

  GlobalOptions opt;
  app.add_option("--config", opt.config_path, "pipeline configuration file (key = value)");
  app.add_option("--out", opt.out, "output directory")->capture_default_str();
  app.add_option("--granularity", opt.granularity,
                 "restrict to one granularity (Day..Year, All)");
  auto* seed_opt = app.add_option("--seed", opt.seed, "override the root seed");

  long sd_index = -1;
  std::string fitdist_series = "indegree";

  auto* c_ingest = app.add_subcommand("ingest", "parse inputs, write canonical store + manifest");
  auto* c_segment = app.add_subcommand("segment", "write the segmentation manifest");
  auto* c_features = app.add_subcommand("features", "extract per-account feature matrices");
  c_features->add_option("--sd", sd_index, "restrict to one sub-dataset index");
  auto* c_select = app.add_subcommand("select", "gini top-k, correlation prune, PCA");
  auto* c_cluster = app.add_subcommand("cluster", "k-means sweep + cosine suspect flagging");
  auto* c_classify = app.add_subcommand("classify", "extra-trees training and metrics");
  auto* c_behavior = app.add_subcommand("behavior", "per-sub-dataset behavior vectors");
  auto* c_fitdist = app.add_subcommand("fitdist", "power-law fit of a sample distribution");
  c_fitdist->add_option("--series", fitdist_series, "indegree | outdegree | iet")
      ->capture_default_str();
  auto* c_report = app.add_subcommand("report", "aggregate stage outputs into report.json");
  auto* c_print = app.add_subcommand("print-config", "print the resolved configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    opt.seed_set = seed_opt->count() > 0;
    const PipelineConfig cfg = resolve_config(opt);
    const fs::path out = opt.out;

    if (c_print->parsed()) {
      std::cout << cfg.serialize();
      return 0;
    }
    fs::create_directories(out);
    if (c_ingest->parsed()) blockwatch::pipeline::run_ingest(cfg, out);
    else if (c_segment->parsed()) blockwatch::pipeline::run_segment(cfg, out);
    else if (c_features->parsed())
      blockwatch::pipeline::run_features(cfg, out, single_granularity(cfg), sd_index);
    else if (c_select->parsed())
      blockwatch::pipeline::run_select(cfg, out, single_granularity(cfg));
    else if (c_cluster->parsed()) blockwatch::pipeline::run_cluster(cfg, out);
    else if (c_classify->parsed()) blockwatch::pipeline::run_classify(cfg, out);
    else if (c_behavior->parsed()) blockwatch::pipeline::run_behavior(cfg, out);
    else if (c_fitdist->parsed()) blockwatch::pipeline::run_fitdist(cfg, out, fitdist_series);
    else if (c_report->parsed()) blockwatch::pipeline::run_report(cfg, out);
  } catch (const blockwatch::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return blockwatch::is_io_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
