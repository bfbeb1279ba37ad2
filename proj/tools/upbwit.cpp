// upbwit: command-line driver for the UPB bound-entangled family.
//
//   upbwit enumerate 4 4
//   upbwit validate 3x3-2.2-2.2
//   upbwit run 3x3-2.2-2.2 --config run.cfg --output out/
//   upbwit batch --dims 3,4 --config run.cfg --output out/ --parallel 4
//   upbwit report out/results.csv --output out/plots

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "upbwit/harness.hpp"

namespace fs = std::filesystem;
using namespace upbwit;

namespace {

RunConfig config_or_default(const std::string& path) {
  return path.empty() ? RunConfig{} : load_config(path);
}

int cmd_enumerate(int d1, int d2) {
  if (d1 < 3 || d2 < 3 || d1 > 12 || d2 > 12) {
    std::cerr << "enumerate: dimensions must lie in [3, 12]\n";
    return kExitUsage;
  }
  const auto layouts = enumerate_layouts({d1, d2});
  for (const auto& t : layouts) std::cout << t.name() << '\n';
  std::cerr << layouts.size() << " layouts\n";
  return kExitOk;
}

int cmd_validate(const std::vector<std::string>& targets, int restarts, std::uint64_t seed) {
  std::vector<TileLayout> layouts;
  if (targets.size() == 2 && targets[0].find('x') == std::string::npos) {
    layouts = enumerate_layouts({std::stoi(targets[0]), std::stoi(targets[1])});
  } else {
    for (const auto& t : targets) layouts.push_back(TileLayout::parse(t));
  }
  int failures = 0;
  for (const auto& layout : layouts) {
    const UpbState state = build_state(layout);
    Rng rng(state_seed(seed, layout));
    const StateReport r = validate_state(state, restarts, rng);
    std::cout << layout.name() << " rank=" << r.rank << " trace=" << r.trace
              << " min_eig=" << r.min_eigenvalue << " ppt_min_eig=" << r.ppt_min_eigenvalue
              << " stopper_res=" << r.stopper_residual << " tile_res=" << r.tile_residual
              << " max_product_overlap=" << r.max_product_overlap
              << (r.ok() ? " ok" : " FAILED") << '\n';
    failures += r.ok() ? 0 : 1;
  }
  return failures ? kExitNumerical : kExitOk;
}

int cmd_run(const std::string& layout_name, const std::string& config, std::string output,
            bool resume_run) {
  const TileLayout layout = TileLayout::parse(layout_name);
  const RunConfig cfg = config_or_default(config);
  if (output.empty()) output = cfg.output_dir;
  fs::create_directories(output);
  try {
    const PipelineResult res = run_pipeline(layout, cfg, output, resume_run);
    auto records = read_records((fs::path(output) / kResultsFile).string());
    std::erase_if(records, [&](const auto& r) { return r.layout == res.record.layout; });
    records.push_back(res.record);
    write_records((fs::path(output) / kResultsFile).string(), records);

    const auto& r = res.record;
    std::cout << "layout                   " << r.layout << '\n'
              << "corrections              " << r.corrections << " (halt: "
              << to_string(res.halt) << ")\n"
              << "final distance           " << r.final_distance << '\n'
              << "extrapolated distance    " << r.extrapolated_distance << " (a=" << res.fit.a
              << ", b=" << res.fit.b << ", r=" << res.fit.r << ", "
              << to_string(res.fit.classification) << ")\n"
              << "gilbert witness distance " << r.gilbert_witness_distance
              << (r.gilbert_valid ? " (valid)" : " (invalid)") << '\n'
              << "bgr witness distance     " << r.bgr_distance << '\n'
              << "sandwich ordering        " << (r.sandwich_ok() ? "ok" : "VIOLATED") << '\n';
  } catch (const NumericalFault& e) {
    std::ofstream err(fs::path(output) / kErrorsFile, std::ios::app);
    err << layout.name() << "," << state_seed(cfg.seed, layout) << "," << e.what() << '\n';
    std::cerr << "run: numerical fault: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_batch(std::vector<int> dims, const std::string& config, std::string output,
              int parallel, bool force) {
  const RunConfig cfg = config_or_default(config);
  if (dims.empty()) dims = cfg.dims;
  if (dims.empty()) {
    std::cerr << "batch: no dimensions given (use --dims or the 'dims' config key)\n";
    return kExitUsage;
  }
  for (int d : dims) {
    if (d < 3 || d > 12) {
      std::cerr << "batch: dimensions must lie in [3, 12]\n";
      return kExitUsage;
    }
  }
  if (output.empty()) output = cfg.output_dir;
  const BatchSummary s = run_batch(dims, cfg, output, parallel, force, std::cerr);
  std::cout << "states " << s.total << ", completed " << s.completed << ", skipped "
            << s.skipped << ", failed " << s.failed << '\n'
            << "valid gilbert witnesses " << s.gilbert_valid << ", gilbert beats bgr "
            << s.beats_bgr << ", classified entangled " << s.entangled
            << ", sandwich violations " << s.sandwich_violations << '\n';
  return s.failed ? kExitPartial : kExitOk;
}

int cmd_report(const std::string& csv, std::string output) {
  if (output.empty()) output = fs::path(csv).parent_path().string();
  if (output.empty()) output = ".";
  const ReportSummary s = write_report(csv, output);
  std::cout << s.rows << " rows, " << s.files << " data files, " << s.sandwich_violations
            << " sandwich violations, " << s.bgr_not_beaten << " states with bgr >= gilbert\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UPB bound entangled states: Gilbert projections and entanglement witnesses"};
  app.require_subcommand(1);

  int d1 = 0, d2 = 0;
  auto* enumerate = app.add_subcommand("enumerate", "List the five-tile layouts for d1 x d2");
  enumerate->add_option("d1", d1)->required();
  enumerate->add_option("d2", d2)->required();

  std::vector<std::string> targets;
  int restarts = 1000;
  std::uint64_t seed = 1;
  auto* validate = app.add_subcommand("validate", "Check rank, PPT and kernel structure of states");
  validate->add_option("targets", targets, "layout names, or 'd1 d2' for a whole family")
      ->required();
  validate->add_option("--restarts", restarts, "seesaw restarts for the product-overlap check")
      ->check(CLI::PositiveNumber);
  validate->add_option("--seed", seed);

  std::string layout, config, output;
  bool resume_run = false;
  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline for one layout");
  run_cmd->add_option("layout", layout, "e.g. 3x3-2.2-2.2")->required();
  run_cmd->add_option("--config,-c", config, "key = value configuration file");
  run_cmd->add_option("--output,-o", output, "output directory (overrides output_dir)");
  run_cmd->add_flag("--resume", resume_run, "continue from an existing checkpoint");

  std::vector<int> dims;
  int parallel = 1;
  bool force = false;
  auto* batch = app.add_subcommand("batch", "Run every layout of the given d x d families");
  batch->add_option("--dims", dims, "comma-separated d values")->delimiter(',');
  batch->add_option("--config,-c", config);
  batch->add_option("--output,-o", output);
  batch->add_option("--parallel,-j", parallel)->check(CLI::PositiveNumber);
  batch->add_flag("--force", force, "recompute layouts that already have records");

  std::string csv;
  auto* report = app.add_subcommand("report", "Split a results CSV into per-dimension data files");
  report->add_option("csv", csv)->required();
  report->add_option("--output,-o", output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*enumerate) return cmd_enumerate(d1, d2);
    if (*validate) return cmd_validate(targets, restarts, seed);
    if (*run_cmd) return cmd_run(layout, config, output, resume_run);
    if (*batch) return cmd_batch(dims, config, output, parallel, force);
    if (*report) return cmd_report(csv, output);
  } catch (const NumericalFault& e) {
    std::cerr << "numerical fault: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
