#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "taftwin/cosim/recording.hpp"
#include "taftwin/cosim/server.hpp"
#include "taftwin/ingest/object_list.hpp"
#include "taftwin/ingest/pipeline.hpp"
#include "taftwin/scenario/experiment.hpp"
#include "taftwin/scenario/security.hpp"
#include "taftwin/signals/program_io.hpp"
#include "taftwin/v2x/threats.hpp"

#ifndef TAFTWIN_DEFAULT_THREATS
#define TAFTWIN_DEFAULT_THREATS "data/threats.json"
#endif

namespace fs = std::filesystem;
using namespace taftwin;

namespace {

// Exit-code contract: 0 success, 1 usage or configuration error, 2 runtime failure.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop.store(true); }

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::optional<double> dt;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Override the scenario seed");
  cmd->add_option("--duration", o.duration, "Override the simulated duration [s]");
  cmd->add_option("--dt", o.dt, "Override the step size [s]");
}

scenario::ScenarioConfig load_with(const std::string& path, const Overrides& o) {
  auto cfg = scenario::load_config(path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.duration) cfg.duration = *o.duration;
  if (o.dt) cfg.dt = *o.dt;
  scenario::validate_config(cfg);
  return cfg;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + p.string() + "'");
  return os;
}

std::string stem_of(const std::string& config_path) { return fs::path(config_path).stem().string(); }

std::string fmt_ratio(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

// ---- run ----

int cmd_run(const std::string& config, const Overrides& o, const std::string& out_dir) {
  const auto cfg = load_with(config, o);
  const fs::path base = fs::path(out_dir) / stem_of(config);
  fs::create_directories(out_dir);
  cosim::RecordingWriter rec(base.string() + ".dtrec", scenario::recording_header(cfg));
  scenario::RunOptions opt;
  opt.on_frame = [&](const cosim::Frame& f) { rec.append(f); };
  const auto r = scenario::run_scenario(cfg, opt);
  rec.finish();
  {
    auto os = open_out(base.string() + "_lost_time.csv");
    signals::write_lost_time_csv(os, r.lost);
  }
  const json summary = scenario::summary_json(cfg, r);
  open_out(base.string() + "_summary.json") << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

// ---- serve ----

struct ServeArgs {
  std::uint16_t port = 7878;
  std::string host = "127.0.0.1";
  bool realtime = true;
  int timeout_ms = 200;
  std::size_t wait_clients = 0;
  int wait_ms = 10000;
  std::string record;
};

int cmd_serve(const std::string& config, const Overrides& o, const ServeArgs& a) {
  const auto cfg = load_with(config, o);
  scenario::World world(cfg, std::nullopt);
  cosim::ServerConfig sc;
  sc.host = a.host;
  sc.port = a.port;
  sc.dt = cfg.dt;
  sc.timeout_ms = a.timeout_ms;
  sc.realtime = a.realtime;
  cosim::CosimServer server(world, sc);
  const auto port = server.start();
  std::cerr << "taf-twin: serving on " << a.host << ":" << port << "\n";
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  if (a.wait_clients > 0 && !server.wait_for_hellos(a.wait_clients, std::chrono::milliseconds(a.wait_ms))) {
    std::cerr << "taf-twin: fewer than " << a.wait_clients << " clients connected; starting anyway\n";
  }
  std::optional<cosim::RecordingWriter> rec;
  if (!a.record.empty()) {
    rec.emplace(a.record, scenario::recording_header(cfg));
    rec->append(server.kernel().current());
  }
  server.run(scenario::step_count(cfg), [&](const cosim::Frame& f, const cosim::TickReport&) {
    if (rec) rec->append(f);
  }, &g_stop);
  server.stop();
  if (rec) rec->finish();
  const auto& st = server.stats();
  std::cerr << "taf-twin: " << st.frames << " frames, " << server.malformed_lines() << " malformed lines\n";
  for (const auto& [cid, n] : st.lagging_frames) std::cerr << "  client " << cid << " lagged " << n << " frames\n";
  return kExitOk;
}

// ---- signal-exp ----

int cmd_signal_exp(const std::string& base_path, const std::string& opt_path, const Overrides& o, std::size_t reps,
                   const std::string& csv) {
  const auto base = load_with(base_path, o);
  const auto opt = load_with(opt_path, o);
  const auto r = scenario::signal_experiment(base, opt, reps);
  if (!csv.empty()) {
    auto os = open_out(csv);
    scenario::write_experiment_csv(os, r);
  }
  scenario::write_experiment_table(std::cout, r);
  return kExitOk;
}

// ---- attack ----

int cmd_attack(const std::string& config, const std::string& attack_path, const Overrides& o,
               const std::string& out_dir) {
  const auto cfg = load_with(config, o);
  const auto attack = scenario::attack_from_json(read_json_file(attack_path));
  const fs::path base = fs::path(out_dir) / (stem_of(config) + "_attack");
  fs::create_directories(out_dir);
  cosim::RecordingWriter rec(base.string() + ".dtrec", scenario::recording_header(cfg));
  const auto out = scenario::run_attack(cfg, attack, [&](const cosim::Frame& f) { rec.append(f); });
  rec.finish();
  {
    auto os = open_out(base.string() + "_verdicts.csv");
    scenario::write_verdicts_csv(os, out.verdicts, out.run.labels);
  }
  {
    auto os = open_out(base.string() + "_labels.csv");
    scenario::write_labels_csv(os, out.run.labels);
  }
  json summary{{"verdicts", out.score.verdicts},
               {"spoofed_stations", out.score.spoofed_stations},
               {"detected_stations", out.score.detected_stations},
               {"precision", out.score.precision ? json(*out.score.precision) : json(nullptr)},
               {"recall", out.score.recall ? json(*out.score.recall) : json(nullptr)},
               {"per_rule", out.score.per_rule}};
  open_out(base.string() + "_detection.json") << summary.dump(2) << "\n";
  std::cout << "verdicts " << out.score.verdicts << ", precision " << fmt_ratio(out.score.precision) << ", recall "
            << fmt_ratio(out.score.recall) << "\n";
  return kExitOk;
}

// ---- ingest ----

int cmd_ingest(const std::string& calib_path, const std::string& det_path, const std::vector<double>& anchor_v,
               const std::string& out) {
  if (anchor_v.size() < 2) throw ConfigError("--anchor needs lat,lon[,alt]");
  const GeoAnchor anchor{anchor_v[0], anchor_v[1], anchor_v.size() > 2 ? anchor_v[2] : 0.0};
  const auto calib = ingest::parse_calibrations(read_json_file(calib_path));
  std::ifstream in(det_path);
  if (!in) throw ConfigError("cannot open '" + det_path + "'");
  const auto tracks = ingest::run_ingest(calib, ingest::read_detections(in), anchor);
  if (out.empty() || out == "-") {
    ingest::export_object_list(tracks, anchor, std::cout);
  } else {
    auto os = open_out(out);
    ingest::export_object_list(tracks, anchor, os);
  }
  return kExitOk;
}

// ---- replay / overdub ----

int cmd_replay(const std::string& path, double speed, const std::string& out) {
  const auto rec = cosim::read_recording(path);
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!out.empty() && out != "-") {
    file = open_out(out);
    os = &file;
  }
  playback(rec, speed, [&](const cosim::Frame& f) {
    *os << cosim::encode_message(cosim::to_message(f));
    os->flush();
  });
  return kExitOk;
}

int cmd_overdub(const std::string& base, const std::vector<std::string>& overlays, const std::string& out) {
  auto rec = cosim::read_recording(base);
  for (const auto& o : overlays) rec = cosim::overdub(rec, cosim::read_recording(o));
  cosim::write_recording(out, rec);
  std::cout << rec.frames.size() << " frames, " << rec.header.remap.size() << " remapped ids\n";
  return kExitOk;
}

// ---- validate / threats ----

int cmd_validate(const std::string& path) {
  const json doc = read_json_file(path);
  const auto net = doc.get<RoadNetwork>();
  const auto report = validate_network(net);
  for (const auto& f : report.findings) std::cout << f.code << ": " << f.message << "\n";
  std::size_t bad_programs = 0;
  for (const auto& [name, program] : scenario::programs_from(doc)) {
    try {
      signals::validate_program(program, net);
    } catch (const Error& e) {
      std::cout << "signal_program " << name << ": " << e.what() << "\n";
      ++bad_programs;
    }
  }
  if (report.ok() && bad_programs == 0) {
    std::cout << "ok: " << net.lanes.size() << " lanes, " << net.signal_groups.size() << " signal groups\n";
    return kExitOk;
  }
  return kExitConfig;
}

int cmd_threats(const std::string& path, int threshold, bool as_json) {
  const auto ranked = v2x::score_threats(v2x::load_threat_register(path));
  if (as_json) {
    std::cout << json(ranked).dump(2) << "\n";
    return kExitOk;
  }
  char buf[256];
  for (const auto& e : ranked) {
    std::snprintf(buf, sizeof buf, "%-4s %2d  %s%s%s\n", e.id.c_str(), e.score, e.score >= threshold ? "* " : "  ",
                  e.name.c_str(), e.analysis_only ? "  [analysis only]" : "");
    std::cout << buf;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"taf-twin: headless digital-twin traffic co-simulation kernel"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config, config2, attack_path, out_dir = ".", csv, calib, dets, out, rec_path, register_path;
  std::vector<std::string> overlays;
  std::vector<double> anchor;
  std::size_t reps = 5;
  double speed = 1.0;
  int threshold = 20;
  bool as_json = false;
  ServeArgs serve;
  bool fast = false;

  auto* run = app.add_subcommand("run", "Run a scenario; write recording, lost-time CSV and summary JSON");
  run->add_option("config", config, "Scenario config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out-dir", out_dir, "Output directory");
  add_overrides(run, ov);

  auto* srv = app.add_subcommand("serve", "Serve the co-simulation master over TCP");
  srv->add_option("config", config, "Scenario config JSON")->required()->check(CLI::ExistingFile);
  srv->add_option("--port", serve.port, "TCP port (0 picks a free one)");
  srv->add_option("--host", serve.host, "Listen address");
  srv->add_option("--timeout-ms", serve.timeout_ms, "Per-frame barrier timeout");
  srv->add_option("--wait-clients", serve.wait_clients, "Wait for this many HELLOs before ticking");
  srv->add_option("--wait-ms", serve.wait_ms, "How long to wait for clients");
  srv->add_option("--record", serve.record, "Write the served frames to this recording");
  srv->add_flag("--fast", fast, "Tick as fast as clients allow instead of at wall-clock pace");
  add_overrides(srv, ov);

  auto* exp = app.add_subcommand("signal-exp", "Compare a baseline and an optimized signal program");
  exp->add_option("base", config, "Baseline config")->required()->check(CLI::ExistingFile);
  exp->add_option("optimized", config2, "Optimized config")->required()->check(CLI::ExistingFile);
  exp->add_option("-r,--repetitions", reps, "Seeds per variant")->check(CLI::PositiveNumber);
  exp->add_option("--csv", csv, "Write the comparison CSV here");
  add_overrides(exp, ov);

  auto* atk = app.add_subcommand("attack", "Inject a ghost vehicle and score the misbehavior detector");
  atk->add_option("config", config, "Scenario config JSON")->required()->check(CLI::ExistingFile);
  atk->add_option("attack", attack_path, "Attack spec JSON")->required()->check(CLI::ExistingFile);
  atk->add_option("-o,--out-dir", out_dir, "Output directory");
  add_overrides(atk, ov);

  auto* ing = app.add_subcommand("ingest", "Turn camera detections into an object-list CSV");
  ing->add_option("--calibration", calib, "Calibration JSON")->required()->check(CLI::ExistingFile);
  ing->add_option("--detections", dets, "Detections JSON-lines")->required()->check(CLI::ExistingFile);
  ing->add_option("--anchor", anchor, "lat lon [alt] of the local frame origin")->required()->expected(2, 3);
  ing->add_option("-o,--out", out, "Output CSV (default stdout)");

  auto* rep = app.add_subcommand("replay", "Play a recording back as a protocol FRAME stream");
  rep->add_option("recording", rec_path, "Recording file")->required()->check(CLI::ExistingFile);
  rep->add_option("--speed", speed, "Playback speed factor")->check(CLI::PositiveNumber);
  rep->add_option("-o,--out", out, "Output file (default stdout)");

  auto* dub = app.add_subcommand("overdub", "Layer recordings onto a base recording");
  dub->add_option("base", rec_path, "Base recording")->required()->check(CLI::ExistingFile);
  dub->add_option("overlays", overlays, "Overlay recordings")->required()->check(CLI::ExistingFile);
  dub->add_option("-o,--out", out, "Output recording")->required();

  auto* val = app.add_subcommand("validate", "Validate a network file and its signal programs");
  val->add_option("network", config, "Network JSON")->required()->check(CLI::ExistingFile);

  auto* thr = app.add_subcommand("threats", "Print the ranked threat register");
  register_path = TAFTWIN_DEFAULT_THREATS;
  thr->add_option("--register", register_path, "Threat register JSON")->check(CLI::ExistingFile);
  thr->add_option("--threshold", threshold, "Top-tier score threshold");
  thr->add_flag("--json", as_json, "Emit JSON instead of a table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, ov, out_dir);
    if (*srv) {
      serve.realtime = !fast;
      return cmd_serve(config, ov, serve);
    }
    if (*exp) return cmd_signal_exp(config, config2, ov, reps, csv);
    if (*atk) return cmd_attack(config, attack_path, ov, out_dir);
    if (*ing) return cmd_ingest(calib, dets, anchor, out);
    if (*rep) return cmd_replay(rec_path, speed, out);
    if (*dub) return cmd_overdub(rec_path, overlays, out);
    if (*val) return cmd_validate(config);
    if (*thr) return cmd_threats(register_path, threshold, as_json);
  } catch (const ConfigError& e) {
    std::cerr << "taf-twin: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "taf-twin: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "taf-twin: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
