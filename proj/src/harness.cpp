#include "upbwit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace upbwit {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    T v{};
    if constexpr (std::is_same_v<T, double>) {
      v = std::stod(text, &used);
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!text.empty() && text[0] == '-') throw std::invalid_argument("");
      v = std::stoull(text, &used);
    } else {
      v = static_cast<T>(std::stoll(text, &used));
    }
    if (used != text.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: invalid value '" + text + "' for key '" + key + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config: invalid boolean '" + text + "' for key '" + key + "'");
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double parse_double_field(const std::string& text, const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("results: bad value '" + text + "' in column " + column);
  }
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "layout",       "tile_area",   "corrections",
      "final_distance", "extrapolated_distance", "gilbert_witness_distance",
      "bgr_distance", "gilbert_valid", "beats_bgr",
      "seed",         "seconds"};
  return cols;
}

// Report order: by dimension, then central tile area, then layout indices.
bool record_less(const ExperimentRecord& x, const ExperimentRecord& y) {
  const TileLayout lx = TileLayout::parse(x.layout);
  const TileLayout ly = TileLayout::parse(y.layout);
  const auto kx = std::tuple(lx.dims().d1, lx.dims().d2, x.tile_area, lx.l(), lx.n(), lx.m(), lx.o());
  const auto ky = std::tuple(ly.dims().d1, ly.dims().d2, y.tile_area, ly.l(), ly.n(), ly.m(), ly.o());
  return kx < ky;
}

void append_line(const fs::path& path, const std::string& header, const std::string& line) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream os(path, std::ios::app | std::ios::binary);
  if (!os) throw std::runtime_error("cannot append to " + path.string());
  if (fresh) os << header << '\n';
  os << line << '\n';
}

std::string fit_header() { return "layout,a,sqrt_a,b,r,classification"; }

std::string fit_row(const std::string& layout, const DecayFit& fit) {
  return layout + "," + fmt_double(fit.a) + "," + fmt_double(fit.sqrt_a()) + "," +
         fmt_double(fit.b) + "," + fmt_double(fit.r) + "," + to_string(fit.classification);
}

std::string csv_escape(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

long long default_corrections(const BipartiteDims& dims) {
  const int d = std::max(dims.d1, dims.d2);
  if (d <= 3) return 25100;
  if (d <= 5) return 4000;
  return 3500;
}

long long RunConfig::corrections_for(const BipartiteDims& dims) const {
  return corrections ? *corrections : default_corrections(dims);
}

GilbertConfig RunConfig::gilbert_config(const BipartiteDims& d, std::uint64_t seed_) const {
  GilbertConfig g;
  g.max_corrections = corrections_for(d);
  g.max_trials = trials;
  g.max_seconds = seconds;
  g.log_every = log_every;
  g.seesaw_iters = seesaw_iters;
  g.real_only = real_only;
  g.seed = seed_;
  return g;
}

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError("config: duplicate key '" + key + "'");
    }
    if (key == "dims") {
      cfg.dims.clear();
      for (const std::string& tok : split(value, ',')) {
        const int d = parse_number<int>(key, trim(tok));
        if (d < 3 || d > 12) throw ConfigError("config: dims must lie in [3, 12]");
        cfg.dims.push_back(d);
      }
    } else if (key == "corrections") {
      cfg.corrections = parse_number<long long>(key, value);
    } else if (key == "trials") {
      cfg.trials = parse_number<long long>(key, value);
    } else if (key == "seconds") {
      cfg.seconds = parse_number<double>(key, value);
    } else if (key == "log_every") {
      cfg.log_every = parse_number<int>(key, value);
    } else if (key == "seesaw_iters") {
      cfg.seesaw_iters = parse_number<int>(key, value);
    } else if (key == "lambda_restarts") {
      cfg.lambda_restarts = parse_number<int>(key, value);
    } else if (key == "real_only") {
      cfg.real_only = parse_bool(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "output_dir") {
      if (value.empty()) throw ConfigError("config: output_dir is empty");
      cfg.output_dir = value;
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  if ((cfg.corrections && *cfg.corrections < 1) || cfg.trials < 1 || !(cfg.seconds > 0) ||
      cfg.log_every < 1 || cfg.seesaw_iters < 1 || cfg.lambda_restarts < 1) {
    throw ConfigError("config: numeric limits must be positive");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  return parse_config(is);
}

std::uint64_t state_seed(std::uint64_t master_seed, const TileLayout& layout) {
  return master_seed ^ stable_hash(layout.name());
}

// ---------------------------------------------------------------------------
// Records

bool ExperimentRecord::sandwich_ok(double slack) const {
  if (final_distance + slack < extrapolated_distance) return false;
  if (gilbert_valid && extrapolated_distance + slack < gilbert_witness_distance) return false;
  return true;
}

std::string csv_header() {
  std::string h;
  for (const auto& c : csv_columns()) h += (h.empty() ? "" : ",") + c;
  return h;
}

std::string to_csv_row(const ExperimentRecord& r) {
  std::ostringstream os;
  os << r.layout << ',' << r.tile_area << ',' << r.corrections << ','
     << fmt_double(r.final_distance) << ',' << fmt_double(r.extrapolated_distance) << ','
     << fmt_double(r.gilbert_witness_distance) << ',' << fmt_double(r.bgr_distance) << ','
     << (r.gilbert_valid ? "true" : "false") << ',' << (r.beats_bgr ? "true" : "false")
     << ',' << r.seed << ',' << fmt_double(r.seconds);
  return os.str();
}

ExperimentRecord parse_csv_row(const std::string& line) {
  const auto f = split(line, ',');
  if (f.size() != csv_columns().size()) {
    throw std::invalid_argument("results: expected " + std::to_string(csv_columns().size()) +
                                " fields, got " + std::to_string(f.size()) + " in '" + line +
                                "'");
  }
  auto boolean = [](const std::string& s, const char* col) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw std::invalid_argument(std::string("results: bad boolean in column ") + col);
  };
  ExperimentRecord r;
  r.layout = f[0];
  TileLayout::parse(r.layout);
  r.tile_area = static_cast<int>(parse_double_field(f[1], "tile_area"));
  r.corrections = static_cast<long long>(parse_double_field(f[2], "corrections"));
  r.final_distance = parse_double_field(f[3], "final_distance");
  r.extrapolated_distance = parse_double_field(f[4], "extrapolated_distance");
  r.gilbert_witness_distance = parse_double_field(f[5], "gilbert_witness_distance");
  r.bgr_distance = parse_double_field(f[6], "bgr_distance");
  r.gilbert_valid = boolean(f[7], "gilbert_valid");
  r.beats_bgr = boolean(f[8], "beats_bgr");
  try {
    r.seed = std::stoull(f[9]);
  } catch (const std::exception&) {
    throw std::invalid_argument("results: bad seed '" + f[9] + "'");
  }
  r.seconds = parse_double_field(f[10], "seconds");
  return r;
}

std::vector<ExperimentRecord> read_records(const std::string& path) {
  std::vector<ExperimentRecord> out;
  std::ifstream is(path);
  if (!is) return out;
  std::string line;
  if (!std::getline(is, line)) return out;
  line = trim(line);
  if (line.empty()) return out;
  const auto cols = split(line, ',');
  for (const auto& want : csv_columns()) {
    if (std::find(cols.begin(), cols.end(), want) == cols.end()) {
      throw std::invalid_argument("results: missing column '" + want + "' in " + path);
    }
  }
  if (cols != csv_columns()) {
    throw std::invalid_argument("results: unexpected column order in " + path);
  }
  while (std::getline(is, line)) {
    line = trim(line);
    if (!line.empty()) out.push_back(parse_csv_row(line));
  }
  return out;
}

void write_records(const std::string& path, std::vector<ExperimentRecord> records) {
  std::stable_sort(records.begin(), records.end(), record_less);
  std::ofstream os(path, std::ios::trunc | std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << csv_header() << '\n';
  for (const auto& r : records) os << to_csv_row(r) << '\n';
}

// ---------------------------------------------------------------------------
// Pipeline

PipelineResult run_pipeline(const TileLayout& layout, const RunConfig& cfg,
                            const std::string& output_dir, bool resume_run) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string name = layout.name();
  const fs::path dir = fs::path(output_dir) / name;
  fs::create_directories(dir);

  const std::uint64_t seed = state_seed(cfg.seed, layout);
  Rng validation_rng(splitmix64(seed + 1));
  Rng witness_rng(splitmix64(seed + 2));
  const std::uint64_t gilbert_seed = splitmix64(seed + 3);

  const UpbState state = build_state(layout);
  const StateReport validation = validate_state(state, cfg.lambda_restarts, validation_rng);
  if (!validation.ok()) {
    throw NumericalFault("state " + name + " failed validation (rank " +
                         std::to_string(validation.rank) + ", PPT min eig " +
                         std::to_string(validation.ppt_min_eigenvalue) + ")");
  }
  {
    std::ofstream os(dir / "rho0.txt", std::ios::binary);
    write_operator(os, state.rho.op());
  }

  const GilbertConfig gcfg = cfg.gilbert_config(layout.dims(), gilbert_seed);
  const fs::path ckpt = dir / "checkpoint.txt";
  GilbertState gstate = [&] {
    if (resume_run && fs::exists(ckpt)) {
      GilbertState s = checkpoint_load_file(ckpt.string(), state.rho);
      resume(s, gcfg);
      return s;
    }
    return run(state.rho, layout.dims(), gcfg, name);
  }();
  checkpoint_save_file(ckpt.string(), gstate);
  {
    std::ofstream os(dir / "trace.csv", std::ios::binary);
    write_trace_csv(os, gstate.trace());
  }

  const DecayFit fit = fit_decay(gstate.trace());
  {
    std::ofstream os(dir / "fit.csv", std::ios::binary);
    os << fit_header() << '\n' << fit_row(name, fit) << '\n';
  }

  WitnessReport gw =
      gilbert_witness(state.rho, gstate.rho1(), layout.dims(), cfg.lambda_restarts, witness_rng);
  WitnessReport bw = bgr_witness(state, cfg.lambda_restarts, witness_rng);
  write_witness((dir / "gilbert_witness").string(), gw, name, seed);
  write_witness((dir / "bgr_witness").string(), bw, name, seed);

  ExperimentRecord rec;
  rec.layout = name;
  rec.tile_area = layout.central_area();
  rec.corrections = gstate.trace().corrections_done;
  rec.final_distance = gstate.distance();
  rec.extrapolated_distance = fit.sqrt_a();
  rec.gilbert_witness_distance = gw.hyperplane_distance;
  rec.bgr_distance = bw.hyperplane_distance;
  rec.gilbert_valid = gw.valid;
  rec.beats_bgr = gw.valid && gw.hyperplane_distance > bw.hyperplane_distance;
  rec.seed = seed;
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  return PipelineResult{rec, validation, fit, std::move(gw), std::move(bw), gstate.halt_reason()};
}

// ---------------------------------------------------------------------------
// Batch

BatchSummary run_batch(const std::vector<int>& ds, const RunConfig& cfg,
                       const std::string& output_dir, int parallel, bool force,
                       std::ostream& log) {
  fs::create_directories(output_dir);
  const fs::path results = fs::path(output_dir) / kResultsFile;
  const fs::path fits = fs::path(output_dir) / kFitsFile;
  const fs::path errors = fs::path(output_dir) / kErrorsFile;

  std::vector<ExperimentRecord> existing = read_records(results.string());
  std::set<std::string> done;
  for (const auto& r : existing) done.insert(r.layout);

  BatchSummary summary;
  std::vector<TileLayout> work;
  std::set<std::string> requested;
  for (int d : ds) {
    for (const TileLayout& t : enumerate_layouts({d, d})) {
      ++summary.total;
      requested.insert(t.name());
      if (!force && done.count(t.name())) {
        ++summary.skipped;
        continue;
      }
      work.push_back(t);
    }
  }
  if (force) {
    std::erase_if(existing, [&](const ExperimentRecord& r) { return requested.count(r.layout) > 0; });
    write_records(results.string(), existing);
  }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= work.size()) return;
      const TileLayout& layout = work[k];
      try {
        const PipelineResult res = run_pipeline(layout, cfg, output_dir);
        std::lock_guard lock(mu);
        append_line(results, csv_header(), to_csv_row(res.record));
        append_line(fits, fit_header(), fit_row(layout.name(), res.fit));
        ++summary.completed;
        log << layout.name() << ": final " << res.record.final_distance << " extrapolated "
            << res.record.extrapolated_distance << " gilbert "
            << res.record.gilbert_witness_distance << (res.record.gilbert_valid ? "" : " (invalid)")
            << " bgr " << res.record.bgr_distance << '\n';
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        ++summary.failed;
        summary.failures.push_back(layout.name() + ": " + e.what());
        append_line(errors, "layout,seed,message",
                    layout.name() + "," + std::to_string(state_seed(cfg.seed, layout)) + "," +
                        csv_escape(e.what()));
        log << layout.name() << ": FAILED " << e.what() << '\n';
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(parallel, static_cast<int>(work.size())));
  std::vector<std::jthread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  pool.clear();

  // Single final rewrite in report order, one row per layout.
  std::map<std::string, ExperimentRecord> latest;
  for (auto& r : read_records(results.string())) latest[r.layout] = r;
  std::vector<ExperimentRecord> all;
  for (auto& [_, r] : latest) all.push_back(r);
  write_records(results.string(), all);

  for (const auto& r : all) {
    if (!requested.count(r.layout)) continue;
    summary.gilbert_valid += r.gilbert_valid ? 1 : 0;
    summary.beats_bgr += r.beats_bgr ? 1 : 0;
    summary.entangled +=
        classify(r.extrapolated_distance * r.extrapolated_distance) == Classification::Entangled;
    summary.sandwich_violations += r.sandwich_ok() ? 0 : 1;
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Report

ReportSummary write_report(const std::string& csv_path, const std::string& out_dir) {
  if (!fs::exists(csv_path)) {
    throw std::invalid_argument("report: no such file " + csv_path);
  }
  const std::vector<ExperimentRecord> records = read_records(csv_path);
  fs::create_directories(out_dir);

  std::map<std::pair<int, int>, std::vector<ExperimentRecord>> by_dims;
  for (const auto& r : records) {
    const TileLayout t = TileLayout::parse(r.layout);
    by_dims[{t.dims().d1, t.dims().d2}].push_back(r);
  }

  ReportSummary summary;
  summary.rows = static_cast<int>(records.size());
  std::ostringstream text;
  for (auto& [dims, rows] : by_dims) {
    std::stable_sort(rows.begin(), rows.end(), record_less);
    const std::string tag = std::to_string(dims.first) + "x" + std::to_string(dims.second);
    std::ofstream dat(fs::path(out_dir) / ("fig2_" + tag + ".dat"), std::ios::binary);
    dat << "# tile_area blue green black red\n";
    int valid = 0, beats = 0, not_beaten = 0, violations = 0;
    std::vector<std::string> bad;
    for (const auto& r : rows) {
      dat << r.tile_area << ' ' << fmt_double(r.final_distance) << ' '
          << fmt_double(r.extrapolated_distance) << ' ' << fmt_double(r.gilbert_witness_distance)
          << ' ' << fmt_double(r.bgr_distance) << '\n';
      valid += r.gilbert_valid;
      beats += r.beats_bgr;
      if (r.bgr_distance >= r.gilbert_witness_distance) ++not_beaten;
      if (!r.sandwich_ok()) {
        ++violations;
        bad.push_back(r.layout);
      }
    }
    ++summary.files;
    summary.sandwich_violations += violations;
    summary.bgr_not_beaten += not_beaten;
    text << tag << ": states " << rows.size() << ", valid gilbert witnesses " << valid
         << ", gilbert beats bgr " << beats << ", bgr >= gilbert distance " << not_beaten
         << ", sandwich violations " << violations << '\n';
    for (const auto& name : bad) text << "  sandwich violated: " << name << '\n';
  }
  std::ofstream os(fs::path(out_dir) / "summary.txt", std::ios::binary);
  os << text.str();
  return summary;
}

}  // namespace upbwit
