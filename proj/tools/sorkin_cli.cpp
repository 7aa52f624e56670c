// Copyright 2026 The sorkin-sim Authors
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

// sorkin-cli: run | sweep | check | convergence <scenario.cfg>
//
// Exit codes: 0 ok, 2 schema/usage error, 3 numerical diagnostic (including a
// failed check or convergence report), 4 I/O error, 5 sweep stopped early by
// --max-points (rerun to resume).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sorkin/config.hpp"
#include "sorkin/io.hpp"
#include "sorkin/parallel.hpp"
#include "sorkin/scenario.hpp"

namespace {

namespace fs = std::filesystem;
using sorkin::config::json;
using sorkin::scenario::PointResult;

constexpr const char* kGenerator = "sorkin-cli 0.1.0";

enum ExitCode { kOk = 0, kSchema = 2, kNumerical = 3, kIo = 4, kIncomplete = 5 };

struct Options {
  std::string config;
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<std::string> format;
  std::optional<std::size_t> max_points;
  std::vector<std::string> sets;
};

struct Job {
  sorkin::config::Document doc;
  std::vector<sorkin::config::Resolved> points;
  std::string source;
};

void report_error(int code, std::string_view type, const std::string& message, const std::string& path = {}) {
  json err = {{"exit_code", code}, {"type", type}, {"message", message}};
  if (!path.empty()) err["path"] = path;
  std::cerr << json{{"error", err}}.dump() << std::endl;
}

Job load(const Options& opt) {
  Job job;
  job.source = fs::path(opt.config).filename().string();
  const auto text = sorkin::io::read_file(opt.config);
  job.doc = sorkin::config::parse_document(text, fs::path(opt.config).stem().string());
  if (opt.seed) job.doc.seed = *opt.seed;
  if (opt.format) job.doc.format = *opt.format;
  for (const auto& kv : opt.sets) {
    const auto eq = kv.find('=');
    const std::string name = kv.substr(0, eq);
    if (eq == std::string::npos || name.empty()) throw sorkin::config::ConfigError("", "--set expects name=value");
    if (!job.doc.vars.contains(name)) throw sorkin::config::ConfigError("/vars/" + name, "--set names an undeclared variable");
    if (job.doc.sweep && job.doc.sweep->var == name) {
      throw sorkin::config::ConfigError("/vars/" + name, "--set cannot override the sweep variable");
    }
    const std::string value = kv.substr(eq + 1);
    const json parsed = json::parse(value, nullptr, false);
    job.doc.vars[name] = parsed.is_number() ? parsed : json(value);
  }
  for (std::size_t i = 0; i < job.doc.point_count(); ++i) job.points.push_back(sorkin::config::resolve(job.doc, i));
  return job;
}

json base_meta(const Job& job) {
  json meta = {{"schema_version", sorkin::config::kSchemaVersion},
               {"created", sorkin::io::utc_timestamp()},
               {"generator", kGenerator},
               {"source", job.source},
               {"kind", sorkin::config::kind_name(job.doc.kind)},
               {"seed", job.doc.seed},
               {"config", sorkin::config::effective(job.points.front())}};
  if (job.doc.sweep) {
    const auto& s = *job.doc.sweep;
    meta["sweep"] = {{"var", s.var},
                     {"column", s.column()},
                     {"unit", s.dim ? std::string(sorkin::config::si_unit(*s.dim)) : std::string("1")},
                     {"points", s.values.size()}};
  }
  return meta;
}

/// Leading cells of every row: point index and, for sweeps, the swept value.
std::vector<std::string> lead(const Job& job, std::size_t i) {
  std::vector<std::string> cells{std::to_string(i)};
  if (job.doc.sweep) cells.push_back(sorkin::io::num(job.doc.sweep->scalar(i)));
  return cells;
}

std::vector<std::string> lead_columns(const Job& job) {
  std::vector<std::string> c{"point"};
  if (job.doc.sweep) c.push_back(job.doc.sweep->column());
  return c;
}

std::string point_key(const Job& job, std::size_t i) {
  const std::string ident = std::string(kGenerator) + '|' + std::string(sorkin::config::kind_name(job.doc.kind)) + '|' +
                            std::to_string(job.doc.seed) + '|' + sorkin::config::effective(job.points[i]).dump();
  return sorkin::config::hex64(sorkin::config::fnv1a(ident));
}

/// Computes every point. Sweeps keep one completion marker per point in
/// <stem>_sweep.d/ so an interrupted sweep resumes where it stopped. Returns
/// nothing when --max-points left points pending.
std::optional<std::vector<PointResult>> compute(const Job& job, const Options& opt) {
  const std::size_t n = job.points.size();
  std::vector<std::optional<PointResult>> results(n);
  const fs::path marker_dir = fs::path(opt.out_dir) / (job.doc.stem + "_sweep.d");
  const bool markers = job.doc.sweep.has_value();
  auto marker = [&](std::size_t i) { return marker_dir / ("point_" + std::to_string(i) + ".json"); };

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < n; ++i) {
    if (markers && fs::exists(marker(i))) {
      try {
        const auto j = json::parse(sorkin::io::read_file(marker(i)));
        if (j.at("key") == point_key(job, i)) {
          results[i] = sorkin::scenario::from_json(j.at("result"));
          continue;
        }
      } catch (const json::exception&) {
        // Unreadable marker: recompute the point.
      }
    }
    pending.push_back(i);
  }
  bool stopped = false;
  if (opt.max_points && pending.size() > *opt.max_points) {
    pending.resize(*opt.max_points);
    stopped = true;
  }
  if (markers && !pending.empty()) {
    std::error_code ec;
    fs::create_directories(marker_dir, ec);
    if (ec) throw sorkin::io::IoError("cannot create " + marker_dir.string() + ": " + ec.message());
  }
  const std::size_t outer = pending.size() > 1 ? opt.workers : 1;
  const std::size_t inner = pending.size() > 1 ? 1 : opt.workers;
  sorkin::parallel_for(pending.size(), outer, [&](std::size_t k) {
    const std::size_t i = pending[k];
    auto r = sorkin::scenario::run_point(job.points[i], inner);
    if (markers) {
      sorkin::io::write_atomic(marker(i), json{{"key", point_key(job, i)}, {"result", sorkin::scenario::to_json(r)}}.dump());
    }
    results[i] = std::move(r);
  });
  if (stopped) return std::nullopt;
  std::vector<PointResult> out;
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

struct OutputFile {
  fs::path path;
  std::string content;
};

std::string table_text(const Job& job, const json& meta, const sorkin::io::Table& t) {
  return job.doc.format == "csv" ? sorkin::io::to_csv(meta, t) : sorkin::io::to_json_text(meta, t);
}

std::vector<OutputFile> render(const Job& job, const Options& opt, const std::vector<PointResult>& results) {
  const fs::path dir(opt.out_dir);
  const std::string ext = "." + job.doc.format;
  const json meta = base_meta(job);
  std::vector<OutputFile> files;

  json points = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    json p = {{"point", i}, {"config", sorkin::config::effective(job.points[i])}};
    if (job.doc.sweep) p[job.doc.sweep->column()] = job.doc.sweep->scalar(i);
    json res = {{"M", r.modes}, {"extra", r.extra}};
    if (job.doc.kind == sorkin::config::ScenarioKind::kGpe) {
      res["max_abs_I_3_per_um"] = r.sorkin * 1e-6;
    } else {
      res["I_M"] = r.sorkin;
      res["oracle"] = r.oracle ? json(*r.oracle) : json(nullptr);
    }
    if (job.doc.kind == sorkin::config::ScenarioKind::kFock) {
      json table = json::object();
      for (std::size_t x = 0; x < r.intensities.size(); ++x) {
        table[sorkin::BlockPattern::from_index(r.modes, x).to_string()] = r.intensities[x];
      }
      res["intensities"] = table;
      res["truncation_mass"] = r.truncation_mass;
      res["circuit_hash"] = r.circuit_hash;
    }
    p["result"] = std::move(res);
    points.push_back(std::move(p));
  }
  json sorkin_json = meta;
  sorkin_json["points"] = std::move(points);
  files.push_back({dir / (job.doc.stem + "_sorkin.json"), sorkin_json.dump(2) + "\n"});

  if (job.doc.kind == sorkin::config::ScenarioKind::kGpe) {
    sorkin::io::Table t{lead_columns(job), {}};
    for (auto c : {"x_um", "I_3", "I_3_N"}) t.columns.push_back(c);
    for (std::size_t x = 0; x < 8; ++x) t.columns.push_back("rho_" + sorkin::BlockPattern::from_index(3, x).to_string());
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& g = std::get<sorkin::config::GpeScenario>(job.points[i]);
      const auto& r = results[i];
      for (std::size_t j = 0; j < r.i3.size(); ++j) {
        auto row = lead(job, i);
        row.push_back(sorkin::io::num(g.grid.x(j) * 1e6));
        row.push_back(sorkin::io::num(r.i3[j] * 1e-6));
        row.push_back(sorkin::io::num(r.i3[j] * 1e-6 * g.params.atom_count));
        for (std::size_t x = 0; x < 8; ++x) row.push_back(sorkin::io::num(r.densities[x][j] * 1e-6));
        t.rows.push_back(std::move(row));
      }
    }
    json m = meta;
    m["units"] = "x_um in um; I_3 and rho_* in 1/um (|psi|^2 normalized to 1); I_3_N = atom_count * I_3";
    files.push_back({dir / (job.doc.stem + "_profile" + ext), table_text(job, m, t)});
    return files;
  }

  sorkin::io::Table terms{lead_columns(job), {}};
  for (auto c : {"M", "I_M", "oracle", "truncation_mass", "circuit_hash"}) terms.columns.push_back(c);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    auto row = lead(job, i);
    row.push_back(std::to_string(r.modes));
    row.push_back(sorkin::io::num(r.sorkin));
    row.push_back(r.oracle ? sorkin::io::num(*r.oracle) : "");
    row.push_back(sorkin::io::num(r.truncation_mass));
    row.push_back(r.circuit_hash);
    terms.rows.push_back(std::move(row));
  }
  files.push_back({dir / (job.doc.stem + "_terms" + ext), table_text(job, meta, terms)});

  if (job.doc.kind == sorkin::config::ScenarioKind::kFock) {
    sorkin::io::Table t{lead_columns(job), {}};
    for (auto c : {"pattern", "blocked", "intensity"}) t.columns.push_back(c);
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      for (std::size_t x = 0; x < r.intensities.size(); ++x) {
        const auto p = sorkin::BlockPattern::from_index(r.modes, x);
        auto row = lead(job, i);
        row.push_back(p.to_string());
        row.push_back(std::to_string(p.blocked_count()));
        row.push_back(sorkin::io::num(r.intensities[x]));
        t.rows.push_back(std::move(row));
      }
    }
    files.push_back({dir / (job.doc.stem + "_intensities" + ext), table_text(job, meta, t)});
  }
  return files;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw sorkin::io::IoError("cannot create output directory " + dir);
}

void write_all(const std::vector<OutputFile>& files) {
  for (const auto& f : files) sorkin::io::write_atomic(f.path, f.content);
}

int cmd_run(const Options& opt, bool require_sweep) {
  const Job job = load(opt);
  if (require_sweep && !job.doc.sweep) throw sorkin::config::ConfigError("/sweep", "sweep needs a sweep spec");
  ensure_dir(opt.out_dir);
  const auto results = compute(job, opt);
  if (!results) {
    std::cerr << "sweep incomplete; rerun to resume" << std::endl;
    return kIncomplete;
  }
  write_all(render(job, opt, *results));
  if (job.doc.sweep) {
    std::error_code ec;
    fs::remove_all(fs::path(opt.out_dir) / (job.doc.stem + "_sweep.d"), ec);
  }
  for (std::size_t i = 0; i < results->size(); ++i) {
    const auto& r = (*results)[i];
    std::cout << "point " << i << ": "
              << (job.doc.kind == sorkin::config::ScenarioKind::kGpe ? "max|I_3| [1/um] = " : "I_M = ")
              << sorkin::io::num(job.doc.kind == sorkin::config::ScenarioKind::kGpe ? r.sorkin * 1e-6 : r.sorkin)
              << '\n';
  }
  return kOk;
}

int cmd_check(const Options& opt) {
  const Job job = load(opt);
  ensure_dir(opt.out_dir);
  json points = json::array();
  bool all = true;
  for (std::size_t i = 0; i < job.points.size(); ++i) {
    const auto checks = sorkin::scenario::run_checks(job.points[i], opt.workers);
    json list = json::array();
    for (const auto& c : checks) {
      all = all && c.pass;
      list.push_back(sorkin::scenario::to_json(c));
      std::cout << (c.skipped ? "SKIP" : c.pass ? "PASS" : "FAIL") << " point " << i << ' ' << c.name;
      if (!c.skipped) std::cout << " value=" << sorkin::io::num(c.value) << " tol=" << sorkin::io::num(c.tolerance);
      if (!c.note.empty()) std::cout << " (" << c.note << ')';
      std::cout << '\n';
    }
    points.push_back({{"point", i}, {"checks", std::move(list)}});
  }
  json out = base_meta(job);
  out["points"] = std::move(points);
  out["pass"] = all;
  sorkin::io::write_atomic(fs::path(opt.out_dir) / (job.doc.stem + "_check.json"), out.dump(2) + "\n");
  return all ? kOk : kNumerical;
}

int cmd_convergence(const Options& opt) {
  const Job job = load(opt);
  if (job.doc.kind != sorkin::config::ScenarioKind::kGpe) {
    throw sorkin::config::ConfigError("/kind", "convergence needs a gpe scenario");
  }
  ensure_dir(opt.out_dir);
  json points = json::array();
  bool all = true;
  for (std::size_t i = 0; i < job.points.size(); ++i) {
    const auto r = sorkin::scenario::run_convergence(std::get<sorkin::config::GpeScenario>(job.points[i]), opt.workers);
    all = all && r.pass;
    points.push_back({{"point", i},
                      {"coarse_max_per_um", r.coarse_max * 1e-6},
                      {"fine_max_per_um", r.fine_max * 1e-6},
                      {"max_change_per_um", r.max_change * 1e-6},
                      {"relative_change", r.relative_change},
                      {"absolute_floor_per_um", r.absolute_floor * 1e-6},
                      {"used_absolute", r.used_absolute},
                      {"threshold", r.threshold},
                      {"pass", r.pass}});
    std::cout << (r.pass ? "PASS" : "FAIL") << " point " << i << " relative_change=" << sorkin::io::num(r.relative_change)
              << " threshold=" << sorkin::io::num(r.threshold) << (r.used_absolute ? " (absolute floor)" : "") << '\n';
  }
  json out = base_meta(job);
  out["points"] = std::move(points);
  out["pass"] = all;
  sorkin::io::write_atomic(fs::path(opt.out_dir) / (job.doc.stem + "_convergence.json"), out.dump(2) + "\n");
  return all ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order interference simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--workers", opt.workers, "Worker threads (0 = hardware concurrency)");
  app.add_option("--seed", opt.seed, "Seed for random circuit elements (overrides the config)");
  app.add_option("--out-dir", opt.out_dir, "Output directory");
  app.add_option("--format", opt.format, "Tabular output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--set", opt.sets, "Override a config variable, name=value (repeatable)");
  app.add_option("--max-points", opt.max_points, "Compute at most N new sweep points, then stop with exit 5");

  std::string command;
  for (auto [name, help] : {std::pair{"run", "Run a scenario (every sweep point if a sweep is given)"},
                            std::pair{"sweep", "Run every point of the scenario's sweep"},
                            std::pair{"check", "Run the invariant suite on a scenario"},
                            std::pair{"convergence", "Grid/time-step self-convergence report (gpe)"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", opt.config, "Scenario file")->required();
    sub->callback([&command, name = std::string(name)] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error(kSchema, "usage", e.what());
    return kSchema;
  }
  opt.workers = sorkin::resolve_workers(opt.workers);

  try {
    if (command == "run") return cmd_run(opt, false);
    if (command == "sweep") return cmd_run(opt, true);
    if (command == "check") return cmd_check(opt);
    return cmd_convergence(opt);
  } catch (const sorkin::config::ConfigError& e) {
    report_error(kSchema, "schema", e.what(), e.path());
    return kSchema;
  } catch (const sorkin::io::IoError& e) {
    report_error(kIo, "io", e.what());
    return kIo;
  } catch (const fs::filesystem_error& e) {
    report_error(kIo, "io", e.what());
    return kIo;
  } catch (const sorkin::InvalidArgument& e) {
    report_error(kSchema, "schema", e.what());
    return kSchema;
  } catch (const sorkin::DimensionMismatch& e) {
    report_error(kSchema, "schema", e.what());
    return kSchema;
  } catch (const sorkin::Error& e) {
    report_error(kNumerical, "numerical", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    report_error(kNumerical, "internal", e.what());
    return kNumerical;
  }
}
