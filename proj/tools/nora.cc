// nora: check-in service, replay, mood reports and preference statistics.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "nora/config.h"
#include "nora/server.h"
#include "nora/session.h"
#include "nora/stats.h"
#include "nora/store.h"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> tick_ms;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "key=value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Seed for every random choice");
  cmd->add_option("--tick-ms", o.tick_ms, "Clock tick in milliseconds");
}

nora::RuntimeConfig make_config(const CommonOptions& o) {
  nora::RuntimeConfig c;
  if (!o.config_path.empty()) c = nora::load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.tick_ms) c.tick_ms = *o.tick_ms;
  c.validate();
  return c;
}

void report_corrupt(const nora::Store& store) {
  for (const auto& bad : store.load_errors()) {
    std::cerr << "warning: skipped " << bad.file << ":" << bad.line << ": " << bad.reason
              << "\n";
  }
}

int run_serve(const CommonOptions& common, int port, const std::string& data_dir) {
  nora::Store store(data_dir);
  report_corrupt(store);
  nora::SessionHost host(store, make_config(common));
  nora::Server server(host, static_cast<std::uint16_t>(port));
  server.stop_on_signals();
  std::cout << "listening on ws://127.0.0.1:" << server.port() << std::endl;
  server.run();
  return 0;
}

int run_replay(const CommonOptions& common, const std::string& in_path,
               const std::string& out_path, const std::string& data_dir) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  const auto inbound = nora::read_trace(in);

  std::optional<nora::Store> store;
  if (data_dir.empty()) {
    store.emplace();
  } else {
    store.emplace(data_dir);
    report_corrupt(*store);
  }
  nora::SessionHost host(*store, make_config(common));
  const auto outbound = nora::replay(inbound, host);

  if (out_path == "-") {
    nora::write_trace(std::cout, outbound);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    nora::write_trace(out, outbound);
  }
  return 0;
}

int run_report(const std::string& user, const std::string& data_dir) {
  const nora::LoadResult loaded = nora::load_store(data_dir);
  for (const auto& bad : loaded.corrupt) {
    std::cerr << "warning: skipped " << bad.file << ":" << bad.line << ": " << bad.reason
              << "\n";
  }
  auto it = loaded.store.timelines.find(user);
  if (it == loaded.store.timelines.end() || it->second.entries.empty()) {
    std::cout << "no mood timeline for '" << user << "'\n";
    return 0;
  }
  std::cout << "mood timeline for " << user << "\n";
  std::cout << std::left << std::setw(12) << "date" << std::right << std::setw(11)
            << "sentiment" << std::setw(9) << "stress" << "  emotion\n";
  std::cout << std::fixed << std::setprecision(3);
  for (const auto& e : it->second.entries) {
    std::cout << std::left << std::setw(12) << e.date.iso() << std::right << std::setw(11)
              << e.mean_sentiment << std::setw(9) << e.mean_stress << "  "
              << nora::to_string(e.dominant_emotion) << "\n";
  }
  return 0;
}

int run_stats(const std::string& path, double alpha, const std::string& label_a,
              const std::string& label_b) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const auto rows = nora::stats::significance_table(nora::stats::read_tallies_csv(in), alpha);
  nora::stats::print_report(std::cout, rows, label_a, label_b, alpha);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empathetic quarantine check-in service"};
  app.require_subcommand(1);

  CommonOptions serve_common;
  int port = 8765;
  std::string serve_dir = "nora-data";
  auto* serve = app.add_subcommand("serve", "Run the WebSocket service");
  serve->add_option("--port", port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--data-dir", serve_dir, "Store directory");
  add_common(serve, serve_common);

  CommonOptions replay_common;
  std::string in_path, out_path = "-", replay_dir;
  auto* replay = app.add_subcommand("replay", "Replay an inbound trace headlessly");
  replay->add_option("--in", in_path, "Inbound trace")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", out_path, "Outbound trace ('-' for stdout)");
  replay->add_option("--data-dir", replay_dir, "Store directory (default: in memory)");
  add_common(replay, replay_common);

  std::string user, report_dir = "nora-data";
  auto* report = app.add_subcommand("report", "Print a user's mood timeline");
  report->add_option("--user", user, "User id")->required();
  report->add_option("--data-dir", report_dir, "Store directory");

  std::string tallies;
  double alpha = 0.1;
  std::string label_a = "Android", label_b = "Virtual agent";
  auto* stats = app.add_subcommand("stats", "Sign-test preference tallies");
  stats->add_option("--tallies", tallies, "CSV with question,n,wins_a")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  stats->add_option("--label-a", label_a, "Name of agent A");
  stats->add_option("--label-b", label_b, "Name of agent B");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return run_serve(serve_common, port, serve_dir);
    if (*replay) return run_replay(replay_common, in_path, out_path, replay_dir);
    if (*report) return run_report(user, report_dir);
    if (*stats) return run_stats(tallies, alpha, label_a, label_b);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
