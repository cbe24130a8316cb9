#include "flashmmi/harness.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#include "flashmmi/io.hpp"
#include "flashmmi/mi.hpp"

namespace flashmmi {

ChannelModel resolve_channel(const ChannelSpec& spec) {
  auto need_snr = [&] {
    if (std::isnan(spec.snr_db)) throw std::invalid_argument("channel '" + spec.type + "' needs snr_db");
    return spec.snr_db;
  };
  if (spec.type == "slc") return make_slc_gaussian(need_snr());
  if (spec.type == "mlc") return make_mlc_gaussian_snr(need_snr());
  if (spec.type == "surrogate") return make_retention_surrogate(RetentionSurrogateParams::calibrated());
  if (spec.type == "gaussian") {
    if (spec.levels.empty()) throw std::invalid_argument("channel 'gaussian' needs levels");
    std::vector<LevelDensity> levels(spec.levels.begin(), spec.levels.end());
    return ChannelModel(std::move(levels), spec.prior, ChannelKind::Custom);
  }
  if (spec.type == "tabulated") {
    if (spec.table_csv.empty()) throw std::invalid_argument("channel 'tabulated' needs table_csv");
    return ChannelModel(tabulated_levels_from_csv(spec.table_csv), spec.prior, ChannelKind::Tabulated);
  }
  throw std::invalid_argument("unknown channel type '" + spec.type + "'");
}

QuantizationScheme resolve_quantization(const ChannelModel& model, const QuantSpec& spec) {
  if (!spec.thresholds.empty()) {
    QuantizationScheme s;
    s.strategy = spec.strategy;
    s.thresholds = spec.thresholds;
    std::sort(s.thresholds.begin(), s.thresholds.end());
    s.thresholds.erase(std::unique(s.thresholds.begin(), s.thresholds.end()), s.thresholds.end());
    s.achieved_mi = quantized_mi(model, s.thresholds);
    return s;
  }
  switch (spec.strategy) {
    case Strategy::Hard:
      return hard_scheme(model);
    case Strategy::SymmetricQ: {
      if (spec.reads != 2 && spec.reads != 3)
        throw std::invalid_argument("symmetric-q quantization takes 2 or 3 reads");
      if (std::isnan(spec.q)) return optimize_symmetric_q(model, spec.reads);
      QuantizationScheme s;
      s.strategy = Strategy::SymmetricQ;
      s.q = spec.q;
      s.thresholds = spec.reads == 2 ? std::vector<double>{-spec.q, spec.q}
                                     : std::vector<double>{-spec.q, 0.0, spec.q};
      s.achieved_mi = quantized_mi(model, s.thresholds);
      return s;
    }
    case Strategy::SingleQ: {
      if (std::isnan(spec.q)) return optimize_single_q_mlc(model);
      QuantizationScheme s;
      s.strategy = Strategy::SingleQ;
      s.q = spec.q;
      s.thresholds = single_q_thresholds(model, spec.q);
      s.achieved_mi = quantized_mi(model, s.thresholds);
      return s;
    }
    case Strategy::ConstantRatio: {
      if (std::isnan(spec.ratio)) return optimize_constant_ratio(model, default_ratio_grid());
      QuantizationScheme s;
      s.strategy = Strategy::ConstantRatio;
      s.ratio = spec.ratio;
      s.thresholds = thresholds_from_ratio(model, spec.ratio);
      s.achieved_mi = quantized_mi(model, s.thresholds);
      return s;
    }
    case Strategy::Unconstrained:
      return optimize_unconstrained(model, spec.reads);
    case Strategy::Uniform: {
      QuantizationScheme s;
      s.strategy = Strategy::Uniform;
      s.thresholds = uniform_thresholds(model, spec.reads);
      s.achieved_mi = quantized_mi(model, s.thresholds);
      return s;
    }
  }
  throw std::invalid_argument("unhandled quantization strategy");
}

LdpcCode resolve_code(const CodeSpec& spec) {
  if (!spec.alist.empty()) {
    std::ifstream in(spec.alist);
    if (!in) throw std::invalid_argument("cannot open alist file " + spec.alist);
    return read_alist(in);
  }
  return construct_peg_ace(DegreeDistribution::builtin(spec.dd), spec.n, spec.seed);
}

namespace {

struct FrameOutcome {
  bool error = false;
  int bit_errors = 0;
  int iterations = 0;
};

}  // namespace

SimResult run_fer(const LdpcCode& code, const ChannelModel& model,
                  const std::vector<double>& thresholds, const SimConfig& cfg) {
  if (cfg.target_frame_errors < 1) throw std::invalid_argument("target_frame_errors must be >= 1");
  if (cfg.max_frames < cfg.target_frame_errors)
    throw std::invalid_argument("max_frames must be >= target_frame_errors");
  const auto start = std::chrono::steady_clock::now();

  std::vector<double> th = thresholds;
  std::sort(th.begin(), th.end());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  const Dmc dmc = crossover_probabilities(model, th);
  const BitLabeling labeling = BitLabeling::default_for(model.num_levels());
  const LlrTable table = bit_llrs(dmc, labeling);
  const std::size_t width = labeling.width();
  const int n = code.n();
  const std::size_t cells = (n + width - 1) / width;
  const auto& info = code.info_positions();

  SimResult res;
  res.config = cfg;
  res.thresholds = th;
  res.mi = mutual_information(dmc);
  res.channel_ber = hard_bit_error_probability(model, labeling);

  auto simulate = [&](std::uint64_t frame) {
    auto rng = stream_rng(cfg.seed, frame);
    Bits msg(code.k());
    for (std::size_t i = 0; i < msg.size(); i += 64) {
      const std::uint64_t word = rng();
      for (std::size_t b = 0; b < 64 && i + b < msg.size(); ++b) msg[i + b] = (word >> b) & 1;
    }
    const Bits cw = code.encode(msg);
    std::vector<double> llr(n);
    std::uint8_t bits[8] = {};
    for (std::size_t c = 0; c < cells; ++c) {
      for (std::size_t b = 0; b < width; ++b) {
        const std::size_t j = c * width + b;
        bits[b] = j < static_cast<std::size_t>(n) ? cw[j] : 0;
      }
      const std::size_t level = labeling.level_of({bits, width});
      const double v = model.sample(level, rng);
      const std::size_t region = std::upper_bound(th.begin(), th.end(), v) - th.begin();
      for (std::size_t b = 0; b < width; ++b) {
        const std::size_t j = c * width + b;
        if (j < static_cast<std::size_t>(n)) llr[j] = table.at(region, b);
      }
    }
    DecodeOptions opt;
    opt.max_iter = cfg.max_iter;
    const auto dec = decode_bp(code, llr, opt);
    if (dec.converged && !code.is_codeword(dec.bits))
      throw std::logic_error("decoder reported convergence on a non-codeword");
    FrameOutcome out;
    out.iterations = dec.iterations;
    out.error = dec.bits != cw;
    if (out.error)
      for (int v : info) out.bit_errors += dec.bits[v] != cw[v];
    return out;
  };

  // Frames are simulated in blocks and tallied in frame order, so the stopping
  // point (and hence the result) does not depend on the worker count.
  const int workers = std::max(1, cfg.workers);
  const std::uint64_t block = workers == 1 ? 1 : static_cast<std::uint64_t>(workers) * 8;
  std::vector<FrameOutcome> outcomes(block);
  std::uint64_t iterations = 0;
  std::uint64_t next = 0;
  res.stop_reason = "max_frames";
  while (next < cfg.max_frames) {
    const std::uint64_t count = std::min(block, cfg.max_frames - next);
    if (workers == 1) {
      outcomes[0] = simulate(next);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(workers);
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          try {
            for (std::uint64_t i = w; i < count; i += workers) outcomes[i] = simulate(next + i);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      for (auto& t : pool) t.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    bool done = false;
    for (std::uint64_t i = 0; i < count && !done; ++i) {
      ++res.frames;
      iterations += outcomes[i].iterations;
      if (outcomes[i].error) {
        ++res.frame_errors;
        res.bit_errors += outcomes[i].bit_errors;
      }
      if (res.frame_errors >= cfg.target_frame_errors) {
        res.stop_reason = "frame_errors";
        done = true;
      }
    }
    next += count;
    if (done) break;
    if (cfg.max_seconds > 0.0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >
            cfg.max_seconds) {
      res.stop_reason = "time_budget";
      break;
    }
  }

  res.fer = res.frames ? static_cast<double>(res.frame_errors) / res.frames : 0.0;
  res.ber = res.frames ? static_cast<double>(res.bit_errors) / (static_cast<double>(res.frames) * info.size())
                       : 0.0;
  res.mean_iterations = res.frames ? static_cast<double>(iterations) / res.frames : 0.0;
  res.ci = wilson_interval(res.frame_errors, res.frames);
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

SimResult run_fer(const SimConfig& cfg) {
  const auto model = resolve_channel(cfg.channel);
  const auto scheme = resolve_quantization(model, cfg.quant);
  const auto code = resolve_code(cfg.code);
  return run_fer(code, model, scheme.thresholds, cfg);
}

namespace {

void write_atomically(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::vector<SimResult> sweep(const std::vector<SimConfig>& configs, const SweepOutput& out,
                             const std::function<void(const SimResult&)>& on_result) {
  std::vector<SimResult> results;
  if (configs.empty()) return results;

  Json manifest = {{"version", kVersion}, {"completed", Json::object()}};
  if (!out.manifest_path.empty() && std::filesystem::exists(out.manifest_path)) {
    std::ifstream in(out.manifest_path);
    manifest = Json::parse(in);
  }

  const bool fresh_csv = !out.csv_path.empty() && (!std::filesystem::exists(out.csv_path) ||
                                                   std::filesystem::file_size(out.csv_path) == 0);
  if (fresh_csv) {
    std::ofstream csv(out.csv_path);
    csv << "# flashmmi " << kVersion << " fer sweep\n" << sim_csv_header() << '\n';
  }

  std::map<std::string, std::unique_ptr<LdpcCode>> codes;
  for (const auto& cfg : configs) {
    const std::string key = config_hash(to_json(cfg));
    auto& done = manifest["completed"];
    if (done.contains(key)) {
      results.push_back(sim_result_from_json(done[key]));
      if (on_result) on_result(results.back());
      continue;
    }
    const std::string code_key = to_json(cfg).at("code").dump();
    auto& code = codes[code_key];
    if (!code) code = std::make_unique<LdpcCode>(resolve_code(cfg.code));
    const auto model = resolve_channel(cfg.channel);
    const auto scheme = resolve_quantization(model, cfg.quant);
    results.push_back(run_fer(*code, model, scheme.thresholds, cfg));

    if (!out.csv_path.empty()) {
      std::ofstream csv(out.csv_path, std::ios::app);
      csv << sim_csv_row(results.back()) << '\n';
    }
    done[key] = to_json(results.back());
    if (!out.manifest_path.empty()) write_atomically(out.manifest_path, manifest.dump(2));
    if (!out.csv_path.empty()) {
      Json side = Json::array();
      for (const auto& r : results) side.push_back(to_json(r));
      write_atomically(out.csv_path + ".json", side.dump(2));
    }
    if (on_result) on_result(results.back());
  }
  return results;
}

}  // namespace flashmmi
