// trinodal: command-line front end.
//
// Exit codes: 0 success, 1 usage or input error, 2 verification failure.
// Every file output is accompanied by <output>.manifest.json, which records
// the canonical arguments and output hashes; `trinodal replay` re-runs a
// manifest and checks the hashes.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trinodal/csv.hpp"
#include "trinodal/graph_io.hpp"
#include "trinodal/modes.hpp"
#include "trinodal/nodal_graph.hpp"
#include "trinodal/oracle.hpp"
#include "trinodal/parallel.hpp"
#include "trinodal/pipeline.hpp"
#include "trinodal/recursion.hpp"
#include "trinodal/stats.hpp"
#include "trinodal/trace.hpp"

namespace {

using namespace trinodal;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitMismatch = 2;

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream s;
  for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return s.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out.flush()) throw std::runtime_error("write failed for " + path);
}

// "dir/c.csv" + "spectrum" -> "dir/c.spectrum.csv"
std::string sibling(const std::string& path, const std::string& tag) {
  std::filesystem::path p(path);
  const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
  p.replace_extension();
  return p.string() + "." + tag + ext;
}

// Files of one run, written together with the manifest.
class Run {
 public:
  Run(std::string command, std::vector<std::string> arguments, json parameters)
      : command_(std::move(command)), arguments_(std::move(arguments)), parameters_(std::move(parameters)) {}

  void add(const std::string& path, std::string content) { files_.emplace_back(path, std::move(content)); }

  void commit(const std::string& primary) const {
    json outputs = json::array();
    for (const auto& [path, content] : files_) {
      write_file(path, content);
      outputs.push_back(json{{"path", path}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    }
    json m;
    m["command"] = command_;
    m["arguments"] = arguments_;
    m["parameters"] = parameters_;
    m["tool_version"] = TRINODAL_VERSION;
    m["input_hashes"] = json{{"parameters_sha256", sha256_hex(parameters_.dump())}};
    m["outputs"] = std::move(outputs);
    write_file(primary + ".manifest.json", m.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> arguments_;
  json parameters_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string num(double v) { return format_double(v); }
std::string num(std::int64_t v) { return std::to_string(v); }

std::string summary_line(const NodalSummary& s) {
  std::ostringstream o;
  o << to_string(s.method) << ": nu=" << s.nu;
  if (s.method != Method::oracle) {
    o << " eta=" << s.eta << " I=" << s.loops;
    if (s.tiles > 1) o << " (per tile)";
  }
  o << " tiles=" << s.tiles << " reduced=" << to_string(s.reduced);
  return o.str();
}

// ---------------------------------------------------------------- count

struct CountArgs {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::string method = "recursion";
};

int cmd_count(const CountArgs& a, unsigned workers) {
  const ModePair mode = make_mode(a.m, a.n);
  std::cout << "mode " << to_string(mode) << " lambda=" << mode.lambda() << "\n";
  if (a.method == "recursion") {
    std::cout << summary_line(nodal_count(mode)) << "\n";
  } else if (a.method == "graph") {
    std::cout << summary_line(graph_nodal_count(mode, workers)) << "\n";
  } else if (a.method == "oracle") {
    std::cout << summary_line(oracle_nodal_count(mode)) << "\n";
  } else {
    const NodalSummary r = nodal_count(mode);
    const NodalSummary g = graph_nodal_count(mode, workers);
    std::cout << summary_line(r) << "\n" << summary_line(g) << "\n";
    const bool agree = same_counts(r, g);
    std::cout << "agreement: " << (agree ? "yes" : "NO") << "\n";
    if (!agree) return kExitMismatch;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::int64_t max_lambda = 0;
  std::int64_t oracle_bound = 0;
  std::string out;
};

int cmd_verify(const VerifyArgs& a, unsigned workers) {
  const VerifyReport rep = run_verify(a.max_lambda, a.oracle_bound, workers);
  if (rep.rows.empty()) {
    std::cout << "empty sweep: no modes with lambda <= " << a.max_lambda << "\n";
  } else {
    std::cout << "modes " << rep.rows.size() << " (non-tiling " << rep.nontiling << ", tiling "
              << rep.rows.size() - static_cast<std::size_t>(rep.nontiling) << ")\n";
    std::cout << "oracle-checked " << rep.oracle_checked << " (max(m,n) <= " << a.oracle_bound << ")\n";
    std::cout << "four-corner cells " << rep.stats.four_corner << ", empty shaded boundary cells "
              << rep.stats.empty_shaded_boundary << ", extended-precision signs "
              << rep.stats.extended_precision << "\n";
    for (const auto& r : rep.rows) {
      if (!r.ok) std::cout << "MISMATCH " << to_string(r.mode) << "\n";
    }
  }
  std::cout << "mismatches " << rep.mismatches << "\n";
  if (!a.out.empty()) {
    std::ostringstream csv;
    write_verify_csv(csv, rep);
    Run run("verify",
            {"verify", num(a.max_lambda), "--oracle-bound", num(a.oracle_bound), "--out", a.out},
            json{{"max_lambda", a.max_lambda}, {"oracle_bound", a.oracle_bound}});
    run.add(a.out, csv.str());
    run.commit(a.out);
  }
  return rep.mismatches == 0 ? kExitOk : kExitMismatch;
}

// ---------------------------------------------------------------- sequence

struct SequenceArgs {
  std::int64_t max_lambda = 0;
  std::string out;
};

int cmd_sequence(const SequenceArgs& a, unsigned workers) {
  std::ostringstream csv;
  bool header = true;
  std::int64_t rows = 0;
  for_each_nodal_block(5, a.max_lambda, workers, [&](const std::vector<NodalRow>& block) {
    write_sequence_csv(csv, block, header);
    header = false;
    rows += static_cast<std::int64_t>(block.size());
  });
  if (header) csv << "N,m,n,lambda,nu,eta,loops,tiles,xi\n";
  Run run("sequence", {"sequence", "--max-lambda", num(a.max_lambda), "--out", a.out},
          json{{"max_lambda", a.max_lambda}});
  run.add(a.out, csv.str());
  run.commit(a.out);
  std::cout << "wrote " << rows << " rows to " << a.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- distribution

struct DistributionArgs {
  std::int64_t lambda = 0;
  double g = 1.0;
  std::int64_t bins = 1000;
  std::string xi_max;  // "num/den"; empty means the window maximum
  std::string out;
};

Ratio parse_ratio(const std::string& s) {
  const auto slash = s.find('/');
  try {
    std::size_t used = 0;
    Ratio r;
    r.num = std::stoll(s.substr(0, slash), &used);
    if (used != (slash == std::string::npos ? s.size() : slash)) throw std::invalid_argument(s);
    r.den = slash == std::string::npos ? 1 : std::stoll(s.substr(slash + 1), &used);
    if (slash != std::string::npos && used != s.size() - slash - 1) throw std::invalid_argument(s);
    if (r.num <= 0 || r.den <= 0) throw std::invalid_argument(s);
    return r;
  } catch (const std::logic_error&) {
    throw invalid_input("--xi-max expects a positive ratio p/q, got '" + s + "'");
  }
}

int cmd_distribution(const DistributionArgs& a, unsigned workers) {
  if (a.bins <= 0) throw invalid_input("--bins must be positive");
  std::optional<Ratio> range;
  if (!a.xi_max.empty()) range = parse_ratio(a.xi_max);
  const DistributionHistogram h =
      distribution_streamed(a.lambda, a.g, static_cast<std::size_t>(a.bins), workers, range);
  std::ostringstream csv;
  write_histogram_csv(csv, h);
  std::vector<std::string> args{"distribution", "--lambda", num(a.lambda), "--g", num(a.g),
                                "--bins", num(a.bins)};
  json params{{"lambda", a.lambda}, {"g", a.g}, {"bins", a.bins}};
  if (!a.xi_max.empty()) {
    args.insert(args.end(), {"--xi-max", a.xi_max});
    params["xi_max"] = a.xi_max;
  } else {
    params["xi_max"] = "window maximum";
  }
  params["note"] = "bin count and xi range are tool defaults unless given explicitly";
  args.insert(args.end(), {"--out", a.out});
  Run run("distribution", args, params);
  run.add(a.out, csv.str());
  run.commit(a.out);
  std::cout << "window lambda in [" << h.lambda_low << ", " << h.lambda_high << "]: " << h.total
            << " eigenfunctions, xi_max=" << h.xi_max.num << "/" << h.xi_max.den << "\n";
  std::cout << "interior local maxima above 1%: " << interior_local_maxima(h, 0.01).size() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- trace

struct TraceArgs {
  std::string kind = "C";
  double kmin = 0.0;  // 0 means kmax / 4
  double kmax = 400.0;
  double step = 0.01;
  int degree = 0;        // 0 means the default for the kind
  double fit_from = 0.0; // 0 means kmin
  double lmax = 40.0;
  double lstep = 0.005;
  double min_length = 1.0;
  double tolerance = 0.05;
  double threshold = 5.0;
  std::string out;
};

int cmd_trace(const TraceArgs& a, unsigned workers) {
  TraceParams p;
  p.kind = parse_curve_kind(a.kind);
  p.kmax = a.kmax;
  p.kmin = a.kmin > 0.0 ? a.kmin : a.kmax / 4.0;
  p.step = a.step;
  if (a.degree > 0) p.degree = a.degree;
  if (a.fit_from > 0.0) p.fit_from = a.fit_from;
  p.lengths = LengthGrid{0.0, a.lmax, a.lstep};
  p.min_length = a.min_length;
  p.tolerance = a.tolerance;
  p.threshold_factor = a.threshold;
  const TraceResult r = run_trace(p, workers);

  std::ostringstream curve, spectrum, peaks;
  write_curve_csv(curve, r.curve, &r.fit);
  write_spectrum_csv(spectrum, r.spectrum);
  write_peaks_csv(peaks, r.spectrum.peaks);

  std::vector<std::string> args{"trace", "--kind", to_string(p.kind), "--kmin", num(p.kmin), "--kmax",
                                num(p.kmax), "--step", num(p.step)};
  json params{{"kind", to_string(p.kind)}, {"kmin", p.kmin}, {"kmax", p.kmax}, {"step", p.step}};
  if (p.degree) {
    args.insert(args.end(), {"--degree", num(std::int64_t{*p.degree})});
    params["degree"] = *p.degree;
  }
  if (p.fit_from) {
    args.insert(args.end(), {"--fit-from", num(*p.fit_from)});
    params["fit_from"] = *p.fit_from;
  }
  args.insert(args.end(), {"--lmax", num(a.lmax), "--lstep", num(a.lstep), "--min-length", num(a.min_length),
                           "--tolerance", num(a.tolerance), "--threshold", num(a.threshold), "--out", a.out});
  params["lmax"] = a.lmax;
  params["lstep"] = a.lstep;
  params["min_length"] = a.min_length;
  params["tolerance"] = a.tolerance;
  params["threshold"] = a.threshold;
  params["note"] = "polynomial smooth part, Hann taper and median-based peak threshold are tool defaults";

  Run run("trace", args, params);
  run.add(a.out, curve.str());
  run.add(sibling(a.out, "spectrum"), spectrum.str());
  run.add(sibling(a.out, "peaks"), peaks.str());
  run.commit(a.out);

  std::cout << "curve " << to_string(p.kind) << " from " << r.sequence_length << " eigenfunctions (lambda <= "
            << r.max_lambda << ")\n";
  std::cout << "smooth fit degree " << r.fit.degree << " on [" << r.fit.fit_x0 << ", " << r.fit.fit_x1
            << "], condition " << r.fit.condition << "\n";
  std::vector<Peak> matched;
  for (const auto& pk : r.spectrum.peaks) {
    if (pk.orbit) matched.push_back(pk);
  }
  std::stable_sort(matched.begin(), matched.end(), [](const Peak& x, const Peak& y) { return x.power > y.power; });
  std::cout << "peaks " << r.spectrum.peaks.size() << ", matched " << matched.size() << "\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(5, matched.size()); ++i) {
    const auto& pk = matched[i];
    std::cout << "  l=" << pk.length << " power=" << pk.power << " " << to_string(pk.orbit->kind) << " ("
              << pk.orbit->p << "," << pk.orbit->q << ")\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- render / graph

struct ModeArgs {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::string format = "dot";
  std::string out;
};

int cmd_render(const ModeArgs& a) {
  const ModePair mode = make_mode(a.m, a.n);
  Run run("render", {"render", num(a.m), num(a.n), "--out", a.out}, json{{"m", a.m}, {"n", a.n}});
  run.add(a.out, render_svg(mode));
  run.commit(a.out);
  const Reduction r = reduce(mode);
  std::cout << "rendered " << to_string(mode) << " as " << r.tiles << " tile(s) of " << to_string(r.reduced)
            << "\n";
  return kExitOk;
}

int cmd_graph(const ModeArgs& a, unsigned workers) {
  const ModePair mode = make_mode(a.m, a.n);
  const GraphFormat format = parse_graph_format(a.format);
  require_nontiling(mode);
  const NodalGraph g = build_graph(mode, workers);
  Run run("graph", {"graph", num(a.m), num(a.n), "--format", a.format, "--out", a.out},
          json{{"m", a.m}, {"n", a.n}, {"format", a.format}});
  run.add(a.out, export_graph(g, format));
  run.commit(a.out);
  std::cout << "graph " << to_string(mode) << ": " << g.vertices.size() << " nodes, " << g.edges.size()
            << " edges\n";
  return kExitOk;
}

int run(std::vector<std::string> argv);

// ---------------------------------------------------------------- replay

int cmd_replay(const std::string& manifest_path) {
  const json m = json::parse(read_file(manifest_path));
  std::vector<std::string> args{"trinodal"};
  for (const auto& a : m.at("arguments")) args.push_back(a.get<std::string>());
  const int code = run(args);
  if (code != kExitOk) return code;
  std::int64_t differing = 0;
  for (const auto& o : m.at("outputs")) {
    const std::string path = o.at("path").get<std::string>();
    const bool same = sha256_hex(read_file(path)) == o.at("sha256").get<std::string>();
    std::cout << (same ? "identical " : "DIFFERS ") << path << "\n";
    if (!same) ++differing;
  }
  return differing == 0 ? kExitOk : kExitMismatch;
}

int run(std::vector<std::string> argv) {
  CLI::App app{"Nodal domains of the right isosceles triangle billiard", "trinodal"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(TRINODAL_VERSION));
  unsigned workers = default_workers();
  app.add_option("--workers", workers, "worker threads (default: TRINODAL_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);

  CountArgs count;
  auto* c_count = app.add_subcommand("count", "nodal counts of one eigenfunction");
  c_count->add_option("m", count.m)->required();
  c_count->add_option("n", count.n)->required();
  c_count->add_option("--method", count.method)
      ->check(CLI::IsMember({"recursion", "graph", "both", "oracle"}))
      ->capture_default_str();

  VerifyArgs verify;
  auto* c_verify = app.add_subcommand("verify", "compare counting methods over all modes up to a cutoff");
  c_verify->add_option("max_lambda", verify.max_lambda)->required();
  c_verify->add_option("--oracle-bound", verify.oracle_bound, "also run the grid oracle for max(m,n) <= bound")
      ->capture_default_str();
  c_verify->add_option("--out", verify.out, "per-mode CSV report");

  SequenceArgs sequence;
  auto* c_sequence = app.add_subcommand("sequence", "nodal count sequence in spectral order");
  c_sequence->add_option("--max-lambda", sequence.max_lambda)->required();
  c_sequence->add_option("--out", sequence.out)->required();

  DistributionArgs dist;
  auto* c_dist = app.add_subcommand("distribution", "histogram of xi = nu/N over a lambda window");
  c_dist->add_option("--lambda", dist.lambda)->required();
  c_dist->add_option("--g", dist.g)->capture_default_str();
  c_dist->add_option("--bins", dist.bins)->capture_default_str();
  c_dist->add_option("--xi-max", dist.xi_max, "upper end of the xi range as p/q (default: window maximum)");
  c_dist->add_option("--out", dist.out)->required();

  TraceArgs trace;
  auto* c_trace = app.add_subcommand("trace", "cumulative curve, smooth fit and orbit spectrum");
  c_trace->add_option("--kind", trace.kind, "C, Q or eta")->capture_default_str();
  c_trace->add_option("--kmin", trace.kmin, "transform window start (default kmax/4)");
  c_trace->add_option("--kmax", trace.kmax)->capture_default_str();
  c_trace->add_option("--step", trace.step)->capture_default_str();
  c_trace->add_option("--degree", trace.degree, "smooth-fit degree (default 4, or 2 in N for Q)");
  c_trace->add_option("--fit-from", trace.fit_from, "fit window start (default kmin)");
  c_trace->add_option("--lmax", trace.lmax)->capture_default_str();
  c_trace->add_option("--lstep", trace.lstep)->capture_default_str();
  c_trace->add_option("--min-length", trace.min_length)->capture_default_str();
  c_trace->add_option("--tolerance", trace.tolerance)->capture_default_str();
  c_trace->add_option("--threshold", trace.threshold, "peak threshold in units of the median power")
      ->capture_default_str();
  c_trace->add_option("--out", trace.out)->required();

  ModeArgs render;
  auto* c_render = app.add_subcommand("render", "schematic SVG of the nodal pattern");
  c_render->add_option("m", render.m)->required();
  c_render->add_option("n", render.n)->required();
  c_render->add_option("--out", render.out)->required();

  ModeArgs graph;
  auto* c_graph = app.add_subcommand("graph", "export the nodal graph");
  c_graph->add_option("m", graph.m)->required();
  c_graph->add_option("n", graph.n)->required();
  c_graph->add_option("--format", graph.format)->check(CLI::IsMember({"dot", "json"}))->capture_default_str();
  c_graph->add_option("--out", graph.out)->required();

  std::string manifest;
  auto* c_replay = app.add_subcommand("replay", "re-run a manifest and compare output hashes");
  c_replay->add_option("manifest", manifest)->required();

  std::vector<const char*> cargs;
  for (const auto& a : argv) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*c_count) return cmd_count(count, workers);
    if (*c_verify) return cmd_verify(verify, workers);
    if (*c_sequence) return cmd_sequence(sequence, workers);
    if (*c_dist) return cmd_distribution(dist, workers);
    if (*c_trace) return cmd_trace(trace, workers);
    if (*c_render) return cmd_render(render);
    if (*c_graph) return cmd_graph(graph, workers);
    if (*c_replay) return cmd_replay(manifest);
  } catch (const invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const invariant_violation& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }
