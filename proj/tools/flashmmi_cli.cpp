// flashmmi command-line front end.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "flashmmi/baselines.hpp"
#include "flashmmi/density_evolution.hpp"
#include "flashmmi/gaussian.hpp"
#include "flashmmi/harness.hpp"
#include "flashmmi/io.hpp"
#include "flashmmi/ldpc.hpp"
#include "flashmmi/mi.hpp"
#include "flashmmi/quantopt.hpp"

using namespace flashmmi;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Range {
  std::string name;
  double lo = 0, hi = 0, step = 1;
  std::vector<double> values() const {
    std::vector<double> v;
    if (lo > hi) return v;
    const long count = std::lround(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) v.push_back(lo + i * step);
    return v;
  }
};

// "name:lo:hi:step" or "lo:hi:step".
Range parse_range(const std::string& text, bool named) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  const std::size_t want = named ? 4 : 3;
  if (parts.size() != want) throw ConfigError("bad range '" + text + "'");
  Range r;
  std::size_t i = 0;
  if (named) r.name = parts[i++];
  try {
    r.lo = std::stod(parts[i]);
    r.hi = std::stod(parts[i + 1]);
    r.step = std::stod(parts[i + 2]);
  } catch (const std::exception&) {
    throw ConfigError("bad range '" + text + "'");
  }
  if (!(r.step > 0)) throw ConfigError("range step must be positive");
  return r;
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Output goes to the named file or stdout.
struct Sink {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;
  explicit Sink(const std::string& path, bool append = false) {
    if (path.empty() || path == "-") return;
    file = std::make_unique<std::ofstream>(path, append ? std::ios::app : std::ios::trunc);
    if (!*file) throw ConfigError("cannot write " + path);
    os = file.get();
  }
  std::ostream& operator*() { return *os; }
};

void provenance(std::ostream& os, const std::string& command, const Json& args) {
  os << "# flashmmi " << kVersion << ' ' << command << " config_hash=" << config_hash(args) << '\n';
}

DegreeDistribution load_dd(const std::string& spec) {
  if (spec == "1" || spec == "2" || spec == "3") return DegreeDistribution::builtin(std::stoi(spec));
  return degree_distribution_from_json(load_json(spec));
}

ChannelSpec model_spec(const std::string& model_file, const std::string& channel, double snr) {
  ChannelSpec spec;
  if (!model_file.empty()) {
    spec = channel_spec_from_json(load_json(model_file));
  } else {
    spec.type = channel;
  }
  if (!std::isnan(snr)) spec.snr_db = snr;
  return spec;
}

// ---------------------------------------------------------------------------

int cmd_mi_sweep(const std::string& model_file, const std::string& channel, double snr, int reads,
                 const std::string& param, const std::string& out) {
  const auto model = resolve_channel(model_spec(model_file, channel, snr));
  const auto range = parse_range(param, true);
  const bool slc = model.num_levels() == 2;
  if (range.name != "q" && range.name != "R") throw ConfigError("--param must sweep q or R");
  if (range.name == "q" && slc && reads != 2 && reads != 3)
    throw ConfigError("SLC q sweeps take --reads 2 or 3");
  const bool analytic = range.name == "q" && slc && model.is_symmetric_slc();

  Sink sink(out);
  provenance(*sink, "mi-sweep", {{"model", to_json(model)}, {"reads", reads}, {"param", param}});
  *sink << range.name << ",mi" << (analytic ? ",dmi_dq" : "") << '\n';
  for (double x : range.values()) {
    std::vector<double> th;
    if (range.name == "R") {
      th = thresholds_from_ratio(model, x);
    } else if (slc) {
      th = reads == 2 ? std::vector<double>{-x, x} : std::vector<double>{-x, 0.0, x};
    } else {
      th = single_q_thresholds(model, x);
    }
    *sink << fmt(x) << ',' << fmt(quantized_mi(model, th), 12);
    if (analytic)
      *sink << ',' << fmt(reads == 2 ? mi_derivative_two_reads(model, x) : mi_derivative_three_reads(model, x), 12);
    *sink << '\n';
  }
  return 0;
}

int cmd_optimize(const std::string& model_file, const std::string& channel, double snr,
                 const std::string& strategy, int reads, const std::string& out) {
  const auto model = resolve_channel(model_spec(model_file, channel, snr));
  QuantSpec qs;
  try {
    qs.strategy = strategy_from_string(strategy);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  qs.reads = reads;
  const auto scheme = resolve_quantization(model, qs);

  std::printf("strategy   %s\n", to_string(scheme.strategy).c_str());
  std::printf("mi         %s bits\n", fmt(scheme.achieved_mi).c_str());
  if (!std::isnan(scheme.q)) std::printf("q          %s\n", fmt(scheme.q).c_str());
  if (!std::isnan(scheme.ratio)) std::printf("ratio      %s\n", fmt(scheme.ratio).c_str());
  for (std::size_t i = 0; i < scheme.thresholds.size(); ++i)
    std::printf("t%-9zu %s\n", i + 1, fmt(scheme.thresholds[i]).c_str());
  if (!out.empty()) {
    Sink sink(out);
    Json j = to_json(scheme);
    j["model"] = to_json(model);
    *sink << j.dump(2) << '\n';
  }
  return 0;
}

int cmd_de(const std::string& dd_spec, const std::string& channel, int bins, int max_iters,
           double target, const std::string& trace) {
  const auto dd = load_dd(dd_spec);
  DeConfig cfg;
  cfg.num_bins = bins;
  cfg.max_de_iters = max_iters;
  cfg.target_error = target;

  std::unique_ptr<Sink> sink;
  if (!trace.empty()) {
    sink = std::make_unique<Sink>(trace);
    provenance(**sink, "de", {{"dd", to_json(dd)}, {"channel", channel}, {"bins", bins}});
    **sink << "parameter,converged,iterations,final_error\n";
  }
  auto probe = [&](double p, const DeRun& r) {
    if (sink)
      **sink << fmt(p) << ',' << (r.converged ? 1 : 0) << ',' << r.iterations << ','
             << fmt(r.final_error, 6) << '\n';
  };

  std::printf("code %s  design rate %s\n", dd.name().empty() ? dd_spec.c_str() : dd.name().c_str(),
              fmt(dd.design_rate(), 6).c_str());
  if (channel == "awgn") {
    const auto t = de_threshold_awgn(dd, cfg, probe);
    std::printf("awgn  sigma* %s  snr* %s dB\n", fmt(t.sigma).c_str(), fmt(t.snr_db, 6).c_str());
  } else if (channel == "bsc") {
    const auto t = de_threshold_bsc(dd, cfg, probe);
    std::printf("bsc   eps* %s  snr* %s dB\n", fmt(t.epsilon).c_str(), fmt(t.snr_db, 6).c_str());
  } else if (channel.rfind("dmc:", 0) == 0) {
    // {"channel": ChannelSpec without snr, "quantization": QuantSpec, "snr_db_range": [lo, hi]}
    const Json j = load_json(channel.substr(4));
    const ChannelSpec base = channel_spec_from_json(j.at("channel"));
    const QuantSpec qs = quant_spec_from_json(j.at("quantization"));
    const auto range = j.at("snr_db_range").get<std::vector<double>>();
    if (range.size() != 2 || !(range[0] < range[1])) throw ConfigError("snr_db_range must be [lo, hi]");
    auto make = [base](double snr) {
      ChannelSpec s = base;
      s.snr_db = snr;
      return resolve_channel(s);
    };
    const auto levels = make(range[1]).num_levels();
    // Parameter is -SNR so that larger means worse.
    DmcFamily family{[&](double p) {
                       const auto model = make(-p);
                       return crossover_probabilities(model, resolve_quantization(model, qs).thresholds);
                     },
                     BitLabeling::default_for(levels), -range[1], -range[0]};
    const auto t = de_threshold_dmc(dd, family, cfg, probe);
    std::printf("dmc   snr* %s dB%s\n", fmt(-t.parameter, 6).c_str(),
                t.monotone ? "" : "  (bracket not monotone)");
  } else {
    throw ConfigError("--channel must be awgn, bsc or dmc:<file>");
  }
  return 0;
}

int cmd_construct(int dd_id, const std::string& dd_file, int n, std::uint64_t seed, int ace_d,
                  int ace_eta, const std::string& out) {
  const auto dd = dd_file.empty() ? DegreeDistribution::builtin(dd_id) : load_dd(dd_file);
  PegOptions opt;
  opt.ace_d = ace_d;
  opt.ace_eta = ace_eta;
  const auto code = construct_peg_ace(dd, n, seed, opt);
  Json meta = to_json(code.metadata);
  meta["n"] = code.n();
  meta["m"] = code.m();
  meta["k"] = code.k();
  meta["rate"] = code.rate();
  meta["edges"] = code.num_edges();
  meta["version"] = kVersion;
  if (out.empty()) {
    write_alist(std::cout, code);
  } else {
    std::ofstream a(out);
    if (!a) throw ConfigError("cannot write " + out);
    write_alist(a, code);
    std::ofstream m(out + ".json");
    m << meta.dump(2) << '\n';
  }
  std::fprintf(stderr, "n=%d m=%d k=%d rate=%s\n", code.n(), code.m(), code.k(), fmt(code.rate(), 6).c_str());
  return 0;
}

int cmd_fer(const std::string& config, const std::string& out, const std::string& manifest) {
  const Json j = load_json(config);
  std::vector<SimConfig> configs;
  try {
    if (j.is_array()) {
      for (const auto& e : j) configs.push_back(sim_config_from_json(e));
    } else {
      configs.push_back(sim_config_from_json(j));
    }
  } catch (const Json::exception& e) {
    throw ConfigError(config + ": " + e.what());
  }
  SweepOutput so{out, manifest.empty() && !out.empty() ? out + ".manifest.json" : manifest};
  const auto results = sweep(configs, so, [](const SimResult& r) {
    std::fprintf(stderr, "%s: frames=%llu errors=%llu fer=%s [%s, %s]\n", r.config.label.c_str(),
                 static_cast<unsigned long long>(r.frames),
                 static_cast<unsigned long long>(r.frame_errors), fmt(r.fer, 4).c_str(),
                 fmt(r.ci.low, 4).c_str(), fmt(r.ci.high, 4).c_str());
  });
  if (out.empty()) {
    provenance(std::cout, "fer", j);
    std::cout << sim_csv_header() << '\n';
    for (const auto& r : results) std::cout << sim_csv_row(r) << '\n';
  }
  return 0;
}

int cmd_bch(int n, int t, const std::string& p_range, std::uint64_t trials, std::uint64_t seed,
            const std::string& out) {
  const auto range = parse_range(p_range, false);
  Sink sink(out);
  provenance(*sink, "bch-fer", {{"n", n}, {"t", t}, {"p", p_range}, {"trials", trials}, {"seed", seed}});
  *sink << "p,fer" << (trials ? ",mc_fer,ci_low,ci_high" : "") << '\n';
  for (double p : range.values()) {
    *sink << fmt(p) << ',' << fmt(bch_fer_analytic(n, t, p));
    if (trials) {
      const auto mc = bch_fer_mc(n, t, p, trials, seed);
      *sink << ',' << fmt(mc.fer) << ',' << fmt(mc.ci.low) << ',' << fmt(mc.ci.high);
    }
    *sink << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Read-threshold optimization and LDPC evaluation for Flash channels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("flashmmi ") + kVersion);

  std::string model, channel = "slc", param, out, strategy = "unconstrained";
  double snr = kUnset;
  int reads = 2;
  auto* mi = app.add_subcommand("mi-sweep", "MI (and dI/dq where analytic) along a q or R grid");
  mi->add_option("--model", model, "channel JSON file");
  mi->add_option("--channel", channel, "slc | mlc | surrogate (when no --model)");
  mi->add_option("--snr", snr, "SNR in dB, overrides the model file");
  mi->add_option("--reads", reads, "reads for SLC q sweeps (2 or 3)");
  mi->add_option("--param", param, "q:lo:hi:step or R:lo:hi:step")->required();
  mi->add_option("--out", out, "CSV output (default stdout)");

  auto* opt = app.add_subcommand("optimize", "MMI read thresholds");
  opt->add_option("--model", model, "channel JSON file");
  opt->add_option("--channel", channel, "slc | mlc | surrogate (when no --model)");
  opt->add_option("--snr", snr, "SNR in dB, overrides the model file");
  opt->add_option("--strategy", strategy, "hard | symmetric-q | single-q | cr | unconstrained | uniform");
  opt->add_option("--reads", reads, "number of thresholds");
  opt->add_option("--out", out, "scheme JSON output");

  std::string dd = "2", de_channel = "awgn", trace;
  int bins = 4096, max_iters = 2000;
  double target = 1e-10;
  auto* de = app.add_subcommand("de", "density-evolution threshold");
  de->add_option("--dd", dd, "1 | 2 | 3 | degree-distribution JSON");
  de->add_option("--channel", de_channel, "awgn | bsc | dmc:<file>");
  de->add_option("--bins", bins, "LLR grid bins");
  de->add_option("--max-iters", max_iters, "DE iteration cap");
  de->add_option("--target", target, "error probability declared as convergence");
  de->add_option("--trace", trace, "CSV of bisection probes");

  int dd_id = 2, n = 9118, ace_d = 4, ace_eta = 4;
  std::uint64_t seed = 7;
  std::string dd_file;
  auto* con = app.add_subcommand("construct", "PEG/ACE parity-check matrix (alist)");
  con->add_option("--dd", dd_id, "built-in degree distribution 1 | 2 | 3");
  con->add_option("--dd-file", dd_file, "degree-distribution JSON instead of --dd");
  con->add_option("--n", n, "code length");
  con->add_option("--seed", seed, "construction seed");
  con->add_option("--ace-d", ace_d);
  con->add_option("--ace-eta", ace_eta);
  con->add_option("--out", out, "alist path; metadata goes to <out>.json");

  std::string config, manifest;
  auto* fer = app.add_subcommand("fer", "Monte Carlo FER from a JSON config (object or array)");
  fer->add_option("--config", config)->required();
  fer->add_option("--out", out, "CSV to append to");
  fer->add_option("--manifest", manifest, "resume manifest (default <out>.manifest.json)");

  int bch_n = kBchLength, bch_t = kBchCorrectable;
  std::string p_range;
  std::uint64_t trials = 0, bch_seed = 1;
  auto* bch = app.add_subcommand("bch-fer", "bounded-distance BCH baseline");
  bch->add_option("--n", bch_n);
  bch->add_option("--t", bch_t);
  bch->add_option("--p", p_range, "lo:hi:step")->required();
  bch->add_option("--mc-trials", trials, "also run Monte Carlo with this many trials");
  bch->add_option("--seed", bch_seed);
  bch->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*mi) return cmd_mi_sweep(model, channel, snr, reads, param, out);
    if (*opt) return cmd_optimize(model, channel, snr, strategy, reads, out);
    if (*de) return cmd_de(dd, de_channel, bins, max_iters, target, trace);
    if (*con) return cmd_construct(dd_id, dd_file, n, seed, ace_d, ace_eta, out);
    if (*fer) return cmd_fer(config, out, manifest);
    if (*bch) return cmd_bch(bch_n, bch_t, p_range, trials, bch_seed, out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
