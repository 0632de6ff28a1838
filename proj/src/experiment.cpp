// Copyright 2026 The psro-jbr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jbr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace jbr {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T out{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("bad value '" + text + "' for " + key);
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

bool has_exploration(const std::string& method) {
  return method.ends_with("-dr") || method.ends_with("-dt");
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void set_spec_key(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  try {
    if (key == "game") {
      spec.game = GameId::parse(value);
    } else if (key == "methods" || key == "method") {
      spec.methods = split_list(value);
      if (spec.methods.empty()) throw ConfigError("methods must not be empty");
    } else if (key == "deltas" || key == "delta") {
      spec.deltas.clear();
      for (const auto& d : split_list(value)) spec.deltas.push_back(parse_value<double>(key, d));
    } else if (key == "seeds") {
      spec.seeds.clear();
      for (const auto& s : split_list(value)) spec.seeds.push_back(parse_value<std::uint64_t>(key, s));
      if (spec.seeds.empty()) throw ConfigError("seeds must not be empty");
    } else if (key == "iterations") {
      spec.iterations = parse_value<int>(key, value);
    } else if (key == "budget") {
      spec.budget = parse_value<std::uint64_t>(key, value);
    } else if (key == "hybrid_k") {
      spec.hybrid_k = parse_value<int>(key, value);
    } else if (key == "spi_n_wedge") {
      spec.spi_n_wedge = value == "sweep" ? -1 : parse_value<std::int64_t>(key, value);
      if (spec.spi_n_wedge < -1 || (value != "sweep" && spec.spi_n_wedge < 0)) {
        throw ConfigError("spi_n_wedge must be 'sweep' or a nonnegative integer");
      }
    } else if (key == "prd_steps") {
      spec.prd.steps = parse_value<int>(key, value);
    } else if (key == "prd_dt") {
      spec.prd.dt = parse_value<double>(key, value);
    } else if (key == "prd_floor") {
      spec.prd.floor = parse_value<double>(key, value);
    } else if (key == "jobs") {
      spec.jobs = parse_value<int>(key, value);
      if (spec.jobs < 1) throw ConfigError("jobs must be >= 1");
    } else if (key == "out") {
      spec.out_dir = value;
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentSpec parse_spec(std::istream& in) {
  ExperimentSpec spec;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    }
    set_spec_key(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return spec;
}

ExperimentSpec load_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read spec file " + path.string());
  return parse_spec(in);
}

std::vector<RunConfig> ExperimentSpec::expand() const {
  std::vector<RunConfig> out;
  for (const auto& method : methods) {
    std::vector<double> grid{-1.0};
    if (has_exploration(method) && !deltas.empty()) grid = deltas;
    for (double delta : grid) {
      for (std::uint64_t seed : seeds) {
        RunConfig cfg;
        cfg.game = game;
        try {
          apply_method(cfg, method);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        if (hybrid_k && cfg.mode != OracleMode::kIndependent) cfg.hybrid_k = *hybrid_k;
        cfg.iterations = iterations;
        cfg.budget = budget;
        cfg.delta = delta;
        cfg.spi_n_wedge = spi_n_wedge;
        cfg.seed = seed;
        cfg.prd = prd;
        try {
          cfg.validate();
        } catch (const std::invalid_argument& e) {
          throw ConfigError(run_stem(cfg) + ": " + e.what());
        }
        out.push_back(cfg);
      }
    }
  }
  return out;
}

void ExperimentSpec::write(std::ostream& out) const {
  auto join = [](const auto& items, auto fmt) {
    std::string s;
    for (const auto& item : items) s += (s.empty() ? "" : ", ") + fmt(item);
    return s;
  };
  auto same = [](const std::string& s) { return s; };
  out << "game = " << game.to_string() << '\n'
      << "methods = " << join(methods, same) << '\n';
  if (!deltas.empty()) out << "deltas = " << join(deltas, format_double) << '\n';
  out << "seeds = " << join(seeds, [](std::uint64_t s) { return std::to_string(s); }) << '\n'
      << "iterations = " << iterations << '\n'
      << "budget = " << budget << '\n';
  if (hybrid_k) out << "hybrid_k = " << *hybrid_k << '\n';
  out << "spi_n_wedge = " << (spi_n_wedge < 0 ? "sweep" : std::to_string(spi_n_wedge)) << '\n'
      << "prd_steps = " << prd.steps << '\n'
      << "prd_dt = " << format_double(prd.dt) << '\n'
      << "prd_floor = " << format_double(prd.floor) << '\n'
      << "jobs = " << jobs << '\n'
      << "out = " << out_dir << '\n';
}

std::string run_stem(const RunConfig& cfg) {
  std::string game = cfg.game.to_string();
  std::replace(game.begin(), game.end(), ':', '-');
  std::string stem = game + "_" + cfg.method();
  if (cfg.exploration != ExplorationKind::kNone) stem += "_d" + format_double(cfg.effective_delta());
  return stem + "_s" + std::to_string(cfg.seed);
}

namespace {

// One run with incremental CSV output. Returns false on failure.
bool execute(const RunConfig& cfg, const fs::path& runs_dir, std::ostream& log, std::mutex& log_mu) {
  const auto stem = run_stem(cfg);
  const int players = 2;  // every supported game is two-player
  try {
    std::ofstream meta(runs_dir / (stem + ".json"));
    write_metadata(meta, cfg, players);
    std::ofstream csv(runs_dir / (stem + ".csv"));
    csv << run_csv_header(players) << '\n';
    if (!meta || !csv) throw std::runtime_error("cannot write run files for " + stem);
    const auto result = run_psro(cfg, [&csv, &stem](const IterationRecord& record) {
      csv << run_csv_row(record) << '\n';
      csv.flush();
      if (!csv) throw std::runtime_error("write failed for " + stem + ".csv");
    });
    std::lock_guard lock(log_mu);
    log << stem << ": min NashConv " << result.records.back().min_nashconv << '\n';
    return true;
  } catch (const std::exception& e) {
    std::ofstream(runs_dir / (stem + ".error")) << e.what() << '\n';
    std::lock_guard lock(log_mu);
    log << stem << ": FAILED: " << e.what() << '\n';
    return false;
  }
}

fs::path runs_dir_of(const ExperimentSpec& spec) { return fs::path(spec.out_dir) / "runs"; }

}  // namespace

ExperimentOutcome run_experiment(const ExperimentSpec& spec, std::ostream& log) {
  const auto configs = spec.expand();
  const auto runs_dir = runs_dir_of(spec);
  std::error_code ec;
  fs::create_directories(runs_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + runs_dir.string());

  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (std::size_t k = next++; k < configs.size(); k = next++) {
      if (!execute(configs[k], runs_dir, log, log_mu)) ++failures;
    }
  };
  const int threads = std::max(1, std::min<int>(spec.jobs, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  write_summary(fs::path(spec.out_dir) / "summary.csv", summarize(spec.out_dir));
  return {static_cast<int>(configs.size()), failures.load()};
}

// ---------------------------------------------------------------------------
// Aggregation

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct RunSummary {
  bool complete = false;
  double min_nashconv = 0.0;
  double final_nashconv = 0.0;
  double episodes = 0.0;
};

RunSummary read_run_csv(const fs::path& file) {
  std::ifstream in(file);
  std::string header, line, last;
  std::getline(in, header);
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  RunSummary out;
  if (last.empty()) return out;
  const auto cells = split_csv_line(last);
  if (cells.size() < 5) return out;
  out.complete = true;
  out.final_nashconv = std::stod(cells[2]);
  out.min_nashconv = std::stod(cells[3]);
  out.episodes = std::stod(cells[4]);
  return out;
}

}  // namespace

std::vector<SummaryRow> summarize(const fs::path& out_dir) {
  using Key = std::tuple<std::string, std::string, double>;
  std::map<Key, std::vector<RunSummary>> groups;
  const auto runs_dir = out_dir / "runs";
  if (!fs::exists(runs_dir)) return {};
  std::vector<fs::path> metas;
  for (const auto& entry : fs::directory_iterator(runs_dir)) {
    if (entry.path().extension() == ".json") metas.push_back(entry.path());
  }
  std::sort(metas.begin(), metas.end());
  for (const auto& meta_path : metas) {
    nlohmann::json meta;
    try {
      std::ifstream(meta_path) >> meta;
    } catch (const nlohmann::json::exception&) {
      continue;
    }
    auto csv = meta_path;
    csv.replace_extension(".csv");
    if (!fs::exists(csv)) continue;
    const auto run = read_run_csv(csv);
    if (!run.complete) continue;
    groups[{meta.value("game", ""), meta.value("method", ""), meta.value("delta", 0.0)}].push_back(run);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, runs] : groups) {
    SummaryRow row;
    std::tie(row.game, row.method, row.delta) = key;
    row.runs = static_cast<int>(runs.size());
    std::vector<double> mins, finals, episodes;
    for (const auto& r : runs) {
      mins.push_back(r.min_nashconv);
      finals.push_back(r.final_nashconv);
      episodes.push_back(r.episodes);
    }
    row.median_min_nashconv = median(mins);
    row.median_final_nashconv = median(finals);
    row.br_episodes = static_cast<std::uint64_t>(median(episodes));
    rows.push_back(row);
  }
  return rows;
}

void write_summary(const fs::path& file, const std::vector<SummaryRow>& rows) {
  std::ofstream out(file);
  out << kSummaryHeader << '\n';
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%g,%d,%.17g,%.17g,%llu\n", r.game.c_str(), r.method.c_str(),
                  r.delta, r.runs, r.median_min_nashconv, r.median_final_nashconv,
                  static_cast<unsigned long long>(r.br_episodes));
    out << buf;
  }
}

ExperimentOutcome run_delta_sweep(ExperimentSpec base, const std::vector<std::string>& kinds,
                                  std::ostream& log) {
  base.methods = {"jbr"};
  for (const auto& kind : kinds) {
    ExplorationKind parsed;
    try {
      parsed = parse_exploration_kind(kind);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (parsed == ExplorationKind::kRandom) base.methods.push_back("jbr-dr");
    else if (parsed == ExplorationKind::kTargeted) base.methods.push_back("jbr-dt");
    else throw ConfigError("delta sweep kinds are random and targeted");
  }
  for (double d : base.deltas) {
    if (!(d >= 0.0 && d <= 1.0)) throw ConfigError("delta values must lie in [0, 1]");
  }
  if (base.deltas.empty()) throw ConfigError("delta sweep needs at least one delta");
  const auto outcome = run_experiment(base, log);

  const auto rows = summarize(base.out_dir);
  std::ofstream out(fs::path(base.out_dir) / "delta_sweep.csv");
  out << kDeltaSweepHeader << '\n';
  char buf[160];
  const std::string game = base.game.to_string();
  for (const auto& r : rows) {
    if (r.game != game) continue;
    const char* series = r.method == "jbr" ? "naive" : r.method == "jbr-dr" ? "random"
                         : r.method == "jbr-dt"                   ? "targeted"
                                                                  : nullptr;
    if (series == nullptr) continue;
    std::snprintf(buf, sizeof buf, "%s,%g,%.17g,%d\n", series, r.delta, r.median_min_nashconv, r.runs);
    out << buf;
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// Schema check

namespace {

bool check_csv(const fs::path& file, const std::string& expected_header, std::size_t numeric_from,
               std::ostream& log) {
  std::ifstream in(file);
  std::string header;
  std::getline(in, header);
  if (header != expected_header) {
    log << file.string() << ": header mismatch\n  expected: " << expected_header
        << "\n  found:    " << header << '\n';
    return false;
  }
  const std::size_t columns = split_csv_line(expected_header).size();
  std::string line;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    const auto cells = split_csv_line(line);
    if (cells.size() != columns) {
      log << file.string() << ":" << number << ": " << cells.size() << " columns, expected "
          << columns << '\n';
      return false;
    }
    for (std::size_t c = numeric_from; c < cells.size(); ++c) {
      double v = 0.0;
      const auto* end = cells[c].data() + cells[c].size();
      auto [ptr, ec] = std::from_chars(cells[c].data(), end, v);
      if (cells[c].empty() || ec != std::errc() || ptr != end) {
        log << file.string() << ":" << number << ": column " << c + 1 << " is not numeric\n";
        return false;
      }
    }
  }
  return true;
}

}  // namespace

bool schema_check(const fs::path& out_dir, std::ostream& log) {
  bool ok = true;
  int checked = 0;
  const auto runs_dir = out_dir / "runs";
  if (fs::exists(runs_dir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(runs_dir)) {
      if (entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      int players = 2;
      auto meta_path = file;
      meta_path.replace_extension(".json");
      try {
        nlohmann::json meta;
        std::ifstream(meta_path) >> meta;
        players = meta.at("num_players").get<int>();
      } catch (const std::exception&) {
        log << meta_path.string() << ": missing or malformed run metadata\n";
        ok = false;
        continue;
      }
      // Column 2 is the oracle kind; the rest are numbers.
      ok = check_csv(file, run_csv_header(players), 2, log) && ok;
      ++checked;
    }
  }
  if (fs::exists(out_dir / "summary.csv")) {
    ok = check_csv(out_dir / "summary.csv", kSummaryHeader, 2, log) && ok;
    ++checked;
  }
  if (fs::exists(out_dir / "delta_sweep.csv")) {
    ok = check_csv(out_dir / "delta_sweep.csv", kDeltaSweepHeader, 1, log) && ok;
    ++checked;
  }
  log << "checked " << checked << " file(s): " << (ok ? "ok" : "schema errors") << '\n';
  return ok;
}

}  // namespace jbr
