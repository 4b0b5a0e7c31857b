#include "fairdrift/cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fairdrift/regimes.hpp"

#ifndef FAIRDRIFT_VERSION
#define FAIRDRIFT_VERSION "0.0.0"
#endif

namespace fairdrift::cli {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

struct Workspace {
  RunConfig config;
  nlohmann::json resolved;
  std::string hash;
  std::vector<Batch> stream;
};

RunConfig apply_overrides(RunConfig config, const CommandOptions& options) {
  if (options.out_dir) config.out_dir = *options.out_dir;
  if (options.seed) {
    config.train.seed = *options.seed;
    if (config.synthetic) config.synthetic->seed = *options.seed;
  }
  if (options.alphas) config.alphas = *options.alphas;
  return config;
}

Workspace prepare(const CommandOptions& options) {
  Workspace ws;
  ws.config = apply_overrides(load_run_config(options.config), options);
  ws.resolved = resolved_config(ws.config);
  ws.hash = config_hash(ws.resolved);
  if (ws.config.synthetic) {
    ws.stream = generate(*ws.config.synthetic);
  } else {
    ws.stream = ingest_csv(ws.config.csv->path, ws.config.csv->schema).batches;
  }
  std::filesystem::create_directories(ws.config.out_dir);
  return ws;
}

ExperimentConfig experiment_for(const RunConfig& config, RegimeId regime) {
  ExperimentConfig e;
  e.regime = regime;
  e.train = config.train;
  e.growing_window = config.growing_window;
  e.delta_metric = config.delta_metric;
  e.threshold = config.threshold;
  if (regime == RegimeId::Abc) e.anticipation = config.anticipation;
  return e;
}

std::string missing_flags(const MetricRecord& rec) {
  std::vector<std::string> flags;
  if (rec.fit_failed) flags.emplace_back("fit_failed");
  if (!rec.auc) flags.emplace_back("auc");
  if (!rec.delta_sp) flags.emplace_back("delta_sp");
  if (!rec.delta_tpr) flags.emplace_back("delta_tpr");
  if (!rec.delta_fpr) flags.emplace_back("delta_fpr");
  std::string out;
  for (const auto& f : flags) out += (out.empty() ? "" : ";") + f;
  return out;
}

nlohmann::json temporal_json(const TemporalReport& t) {
  return {{"mb", optional_json(t.mb)},
          {"ts", optional_json(t.ts)},
          {"mbd", optional_json(t.mbd)},
          {"n_steps", t.n_steps},
          {"n_excluded", t.n_excluded}};
}

nlohmann::json means_json(const MetricMeans& m) {
  return {{"auc", optional_json(m.auc)},
          {"delta_sp", optional_json(m.delta_sp)},
          {"delta_tpr", optional_json(m.delta_tpr)},
          {"delta_fpr", optional_json(m.delta_fpr)}};
}

void write_manifest(const Workspace& ws, std::vector<std::string> outputs,
                    const std::string& started) {
  RunManifest manifest{ws.hash, ws.resolved, std::move(outputs), started, utc_now(),
                       std::string(tool_version())};
  auto f = open_output(ws.config.out_dir / "manifest.json");
  f << nlohmann::json(manifest).dump(2) << '\n';
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace

std::string_view tool_version() { return FAIRDRIFT_VERSION; }

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  const auto& data = j.at("data");
  if (data.contains("synthetic") == data.contains("csv"))
    throw ConfigError("data section needs exactly one of 'synthetic' or 'csv'");
  if (data.contains("synthetic")) {
    c.synthetic = data.at("synthetic").get<DriftSpec>();
  } else {
    const auto& csv = data.at("csv");
    CsvSource source;
    source.path = csv.at("path").get<std::string>();
    if (source.path.is_relative()) source.path = base_dir / source.path;
    if (csv.contains("schema")) {
      source.schema = csv.at("schema").get<CsvSchema>();
    } else {
      std::filesystem::path schema_path = csv.at("schema_path").get<std::string>();
      if (schema_path.is_relative()) schema_path = base_dir / schema_path;
      std::ifstream in(schema_path);
      if (!in) throw ConfigError("cannot open schema " + schema_path.string());
      source.schema = nlohmann::json::parse(in).get<CsvSchema>();
    }
    c.csv = std::move(source);
  }

  const auto regimes =
      j.value("regimes", std::vector<std::string>{"vanilla", "static", "dynamic", "abc"});
  for (const auto& name : regimes) c.regimes.push_back(parse_regime(name));
  if (c.regimes.empty()) throw ConfigError("no regimes configured");

  if (j.contains("train")) {
    const auto& t = j.at("train");
    c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
    c.train.epochs = t.value("epochs", c.train.epochs);
    c.train.l2 = t.value("l2", c.train.l2);
    c.train.seed = t.value("seed", c.train.seed);
    c.growing_window = t.value("growing_window", c.growing_window);
  }
  c.train.validate();

  if (j.contains("anticipation")) {
    const auto& a = j.at("anticipation");
    c.anticipation.window = a.value("window", c.anticipation.window);
    c.anticipation.alpha = a.value("alpha", c.anticipation.alpha);
    c.alphas = a.value("alphas", std::vector<double>{});
  }
  c.anticipation.validate();
  if (c.alphas.empty()) c.alphas = default_alpha_grid();

  if (j.contains("output")) {
    const auto& o = j.at("output");
    c.out_dir = o.value("dir", c.out_dir.string());
    c.delta_metric = parse_delta_metric(o.value("delta_metric", std::string("delta_sp")));
    c.threshold = o.value("threshold", c.threshold);
  }
  return c;
}

nlohmann::json resolved_config(const RunConfig& c) {
  nlohmann::json data;
  if (c.synthetic) data["synthetic"] = *c.synthetic;
  if (c.csv) data["csv"] = {{"path", c.csv->path.string()}, {"schema", c.csv->schema}};
  auto regimes = nlohmann::json::array();
  for (auto r : c.regimes) regimes.push_back(std::string(to_string(r)));
  return {{"data", data},
          {"regimes", regimes},
          {"train",
           {{"learning_rate", c.train.learning_rate},
            {"epochs", c.train.epochs},
            {"l2", c.train.l2},
            {"seed", c.train.seed},
            {"growing_window", c.growing_window}}},
          {"anticipation",
           {{"window", c.anticipation.window},
            {"alpha", c.anticipation.alpha},
            {"alphas", c.alphas}}},
          {"output",
           {{"delta_metric", std::string(to_string(c.delta_metric))},
            {"threshold", c.threshold}}}};
}

std::string config_hash(const nlohmann::json& resolved) {
  const auto text = resolved.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

std::vector<double> parse_alpha_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    std::string s(item);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad alpha '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("bad alpha '" + s + "'");
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("alpha out of range");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

void to_json(nlohmann::json& j, const RunManifest& m) {
  j = nlohmann::json{{"config_hash", m.config_hash}, {"config", m.config},
                     {"outputs", m.outputs},         {"started", m.started},
                     {"finished", m.finished},       {"tool_version", m.tool_version}};
}

int cmd_run(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto started = utc_now();
    const auto ws = prepare(options);

    std::vector<std::future<RegimeRun>> pending;
    for (auto regime : ws.config.regimes) {
      const auto cfg = experiment_for(ws.config, regime);
      pending.push_back(std::async(std::launch::async,
                                   [&ws, cfg] { return run_regime(ws.stream, cfg); }));
    }
    std::vector<RegimeRun> runs;
    for (auto& f : pending) runs.push_back(f.get());

    const auto per_step = ws.config.out_dir / "per_step.csv";
    {
      auto f = open_output(per_step);
      f << "regime,t,auc,delta_sp,delta_tpr,delta_fpr,missing_flags\n";
      for (const auto& run : runs)
        for (const auto& rec : run.series.records())
          f << to_string(run.series.regime()) << ',' << rec.time_index << ','
            << optional_cell(rec.auc) << ',' << optional_cell(rec.delta_sp) << ','
            << optional_cell(rec.delta_tpr) << ',' << optional_cell(rec.delta_fpr) << ','
            << missing_flags(rec) << '\n';
    }

    nlohmann::json summary;
    summary["config_hash"] = ws.hash;
    summary["delta_metric"] = std::string(to_string(ws.config.delta_metric));
    summary["n_batches"] = ws.stream.size();
    bool numeric_failure = false;
    for (const auto& run : runs) {
      std::size_t failed = 0;
      for (const auto& rec : run.series.records()) failed += rec.fit_failed ? 1 : 0;
      numeric_failure = numeric_failure || failed == run.series.size();
      summary["regimes"][std::string(to_string(run.series.regime()))] = {
          {"means", means_json(mean_metrics(run.series))},
          {"temporal", temporal_json(run.temporal)},
          {"evaluated_steps", run.series.size()},
          {"failed_fits", failed}};
    }
    const auto summary_path = ws.config.out_dir / "summary.json";
    {
      auto f = open_output(summary_path);
      f << summary.dump(2) << '\n';
    }
    write_manifest(ws, {per_step.filename().string(), summary_path.filename().string()}, started);

    if (numeric_failure) {
      err << "numeric failure: every fit of at least one regime diverged\n";
      return kExitNumeric;
    }
    out << "wrote " << per_step.string() << " and " << summary_path.string() << '\n';
    return kExitOk;
  });
}

int cmd_sweep(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto started = utc_now();
    const auto ws = prepare(options);
    auto base = experiment_for(ws.config, RegimeId::Abc);
    const auto rows = sweep_alpha(ws.stream, base, ws.config.alphas);

    const auto path = ws.config.out_dir / "sweep.csv";
    {
      auto f = open_output(path);
      f << "alpha,auc,delta_sp,delta_tpr,delta_fpr,mb,ts,mbd\n";
      for (const auto& row : rows)
        f << format_real(row.alpha) << ',' << optional_cell(row.means.auc) << ','
          << optional_cell(row.means.delta_sp) << ',' << optional_cell(row.means.delta_tpr)
          << ',' << optional_cell(row.means.delta_fpr) << ',' << optional_cell(row.temporal.mb)
          << ',' << optional_cell(row.temporal.ts) << ',' << optional_cell(row.temporal.mbd)
          << '\n';
    }
    write_manifest(ws, {path.filename().string()}, started);
    out << "wrote " << path.string() << '\n';
    return kExitOk;
  });
}

int cmd_gen(const std::filesystem::path& spec_path, const std::filesystem::path& out_path,
            std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(spec_path);
    if (!in) throw ConfigError("cannot open spec " + spec_path.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(spec_path.string() + ": " + e.what());
    }
    auto spec = j.get<DriftSpec>();
    if (seed) spec.seed = *seed;
    const auto stream = generate(spec);

    if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
    {
      auto f = open_output(out_path);
      write_csv(f, stream);
    }
    auto schema_path = out_path;
    schema_path.replace_extension(".schema.json");
    {
      auto f = open_output(schema_path);
      f << nlohmann::json(generated_csv_schema(spec.dim)).dump(2) << '\n';
    }
    out << "wrote " << spec.n_batches * spec.batch_size << " rows to " << out_path.string()
        << '\n';
    return kExitOk;
  });
}

}  // namespace fairdrift::cli
