#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "flashmmi/gaussian.hpp"
#include "flashmmi/harness.hpp"
#include "flashmmi/io.hpp"

using namespace flashmmi;
namespace fs = std::filesystem;

namespace {

const LdpcCode& small_code() {
  static const LdpcCode code = construct_peg_ace(DegreeDistribution::builtin(3), 901, 4);
  return code;
}

SimConfig slc_config(double snr_db, int reads) {
  SimConfig c;
  c.channel.type = "slc";
  c.channel.snr_db = snr_db;
  c.quant.strategy = reads == 1 ? Strategy::Hard : Strategy::SymmetricQ;
  c.quant.reads = reads;
  c.code.dd = 3;
  c.code.n = 901;
  c.code.seed = 4;
  c.max_frames = 300;
  c.target_frame_errors = 10;
  return c;
}

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("flashmmi_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int count_data_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++n;
  return n - 1;  // header
}

}  // namespace

TEST(Harness, NoiselessChannelNeverFails) {
  auto cfg = slc_config(40.0, 1);
  cfg.max_frames = 30;
  const auto model = resolve_channel(cfg.channel);
  const auto r = run_fer(small_code(), model, hard_thresholds(model), cfg);
  EXPECT_EQ(r.frames, 30u);
  EXPECT_EQ(r.frame_errors, 0u);
  EXPECT_EQ(r.fer, 0.0);
  EXPECT_EQ(r.stop_reason, "max_frames");
  EXPECT_EQ(r.mean_iterations, 0.0);
}

TEST(Harness, ChannelBerIsAnalytic) {
  const auto cfg = slc_config(5.0, 1);
  const auto model = resolve_channel(cfg.channel);
  auto c = cfg;
  c.max_frames = 1;
  c.target_frame_errors = 1;
  const auto r = run_fer(small_code(), model, hard_thresholds(model), c);
  EXPECT_NEAR(r.channel_ber, q_function(1.0 / model.spread(0)), 1e-15);
  EXPECT_NEAR(r.mi, quantized_mi(model, hard_thresholds(model)), 1e-15);
}

TEST(Harness, StopsAtTargetErrors) {
  auto cfg = slc_config(4.0, 1);  // far above this code's threshold
  cfg.target_frame_errors = 5;
  const auto model = resolve_channel(cfg.channel);
  const auto r = run_fer(small_code(), model, hard_thresholds(model), cfg);
  EXPECT_EQ(r.frame_errors, 5u);
  EXPECT_EQ(r.stop_reason, "frame_errors");
  EXPECT_LE(r.ci.low, r.fer);
  EXPECT_GE(r.ci.high, r.fer);
  EXPECT_GT(r.ber, 0.0);
}

TEST(Harness, DeterministicAcrossRunsAndWorkers) {
  auto cfg = slc_config(7.6, 2);
  const auto model = resolve_channel(cfg.channel);
  const auto th = resolve_quantization(model, cfg.quant).thresholds;
  const auto a = run_fer(small_code(), model, th, cfg);
  const auto b = run_fer(small_code(), model, th, cfg);
  cfg.workers = 3;
  const auto c = run_fer(small_code(), model, th, cfg);
  EXPECT_GT(a.frame_errors, 0u);
  for (const auto* r : {&b, &c}) {
    EXPECT_EQ(r->frames, a.frames);
    EXPECT_EQ(r->frame_errors, a.frame_errors);
    EXPECT_EQ(r->bit_errors, a.bit_errors);
    EXPECT_DOUBLE_EQ(r->mean_iterations, a.mean_iterations);
  }
}

TEST(Harness, MlcWithOddLength) {
  SimConfig cfg;
  cfg.channel.type = "mlc";
  cfg.channel.snr_db = 30.0;
  cfg.quant.strategy = Strategy::ConstantRatio;
  cfg.quant.ratio = 7.0;
  cfg.max_frames = 10;
  cfg.target_frame_errors = 1;
  const auto model = resolve_channel(cfg.channel);
  const auto s = resolve_quantization(model, cfg.quant);
  ASSERT_EQ(s.thresholds.size(), 6u);
  ASSERT_EQ(small_code().n() % 2, 1);
  const auto r = run_fer(small_code(), model, s.thresholds, cfg);
  EXPECT_EQ(r.frame_errors, 0u);
  EXPECT_EQ(r.frames, 10u);
}

TEST(Harness, ResolveSpecs) {
  ChannelSpec ch;
  ch.type = "gaussian";
  ch.levels = {{-1.0, 0.4}, {1.0, 0.6}};
  EXPECT_EQ(resolve_channel(ch).num_levels(), 2u);
  ch.type = "slc";
  EXPECT_THROW(resolve_channel(ch), std::invalid_argument);  // no snr
  ch.type = "nope";
  ch.snr_db = 3.0;
  EXPECT_THROW(resolve_channel(ch), std::invalid_argument);

  const auto m = make_slc_gaussian(4.0);
  QuantSpec q;
  q.strategy = Strategy::SymmetricQ;
  q.reads = 3;
  q.q = 0.25;
  EXPECT_EQ(resolve_quantization(m, q).thresholds, (std::vector<double>{-0.25, 0.0, 0.25}));
  q.thresholds = {0.5, -0.5, 0.5};
  EXPECT_EQ(resolve_quantization(m, q).thresholds, (std::vector<double>{-0.5, 0.5}));
  q = {};
  q.strategy = Strategy::SymmetricQ;
  q.reads = 5;
  EXPECT_THROW(resolve_quantization(m, q), std::invalid_argument);

  CodeSpec cs;
  cs.alist = "/nonexistent/file.alist";
  EXPECT_THROW(resolve_code(cs), std::invalid_argument);
}

TEST(Harness, RejectsBadBudgets) {
  auto cfg = slc_config(5.0, 1);
  cfg.target_frame_errors = 0;
  const auto model = resolve_channel(cfg.channel);
  EXPECT_THROW(run_fer(small_code(), model, hard_thresholds(model), cfg), std::invalid_argument);
  cfg.target_frame_errors = 10;
  cfg.max_frames = 5;
  EXPECT_THROW(run_fer(small_code(), model, hard_thresholds(model), cfg), std::invalid_argument);
}

TEST(Harness, SweepResumesFromManifest) {
  const auto dir = scratch_dir("sweep");
  SweepOutput out{(dir / "fer.csv").string(), (dir / "manifest.json").string()};
  std::vector<SimConfig> cfgs = {slc_config(4.0, 1), slc_config(4.5, 1)};
  for (auto& c : cfgs) c.target_frame_errors = 3;
  const auto first = sweep(cfgs, out);
  ASSERT_EQ(first.size(), 2u);
  EXPECT_EQ(count_data_lines(out.csv_path), 2);
  EXPECT_TRUE(fs::exists(out.csv_path + ".json"));

  cfgs.push_back(slc_config(5.0, 1));
  cfgs.back().target_frame_errors = 3;
  int calls = 0;
  const auto second = sweep(cfgs, out, [&](const SimResult&) { ++calls; });
  ASSERT_EQ(second.size(), 3u);
  EXPECT_EQ(calls, 3);
  // only the new point is appended; resumed points come back unchanged
  EXPECT_EQ(count_data_lines(out.csv_path), 3);
  EXPECT_EQ(second[0].wall_seconds, first[0].wall_seconds);
  EXPECT_EQ(second[1].frames, first[1].frames);
  fs::remove_all(dir);
}

TEST(Harness, EmptySweepWritesNothing) {
  const auto dir = scratch_dir("empty");
  SweepOutput out{(dir / "fer.csv").string(), (dir / "manifest.json").string()};
  EXPECT_TRUE(sweep({}, out).empty());
  EXPECT_FALSE(fs::exists(out.csv_path));
  EXPECT_FALSE(fs::exists(out.manifest_path));
  fs::remove_all(dir);
}

TEST(Io, ConfigJsonRoundTrip) {
  auto cfg = slc_config(6.5, 3);
  cfg.label = "x";
  cfg.quant.q = 0.125;
  cfg.channel.prior = {0.4, 0.6};
  cfg.workers = 4;
  const Json j = to_json(cfg);
  EXPECT_EQ(to_json(sim_config_from_json(j)), j);
  EXPECT_EQ(config_hash(j), config_hash(to_json(sim_config_from_json(j))));
  auto other = cfg;
  other.seed = 99;
  EXPECT_NE(config_hash(to_json(other)), config_hash(j));
  EXPECT_EQ(config_hash(j).size(), 16u);
}

TEST(Io, ResultJsonRoundTrip) {
  SimResult r;
  r.config = slc_config(3.0, 1);
  r.thresholds = {0.0};
  r.frames = 12;
  r.frame_errors = 3;
  r.fer = 0.25;
  r.ci = wilson_interval(3, 12);
  r.stop_reason = "frame_errors";
  EXPECT_EQ(to_json(sim_result_from_json(to_json(r))), to_json(r));
}

TEST(Io, NumericCsv) {
  std::stringstream ss("# comment\nv,f0,f1\n1,2,3\n4, 5 ,6\n");
  const auto rows = read_numeric_csv(ss);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (std::vector<double>{4, 5, 6}));
}

TEST(Io, TabulatedChannelFromCsv) {
  const auto dir = scratch_dir("table");
  const auto path = dir / "levels.csv";
  {
    std::ofstream out(path);
    out << "v,f0,f1\n";
    for (int i = 0; i <= 1000; ++i) {
      const double v = -5.0 + 10.0 * i / 1000.0;
      out << v << ',' << normal_pdf(v, -1.0, 0.5) << ',' << normal_pdf(v, 1.0, 0.5) << '\n';
    }
  }
  ChannelSpec ch;
  ch.type = "tabulated";
  ch.table_csv = path.string();
  const auto m = resolve_channel(ch);
  EXPECT_EQ(m.num_levels(), 2u);
  EXPECT_NEAR(m.mass_between(1, 0.0, INFINITY), 1.0 - q_function(2.0), 1e-4);
  fs::remove_all(dir);
}
