#include "flashmmi/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace flashmmi {

namespace {

// JSON has no NaN; unset optional numbers are simply left out.
void put_if_set(Json& j, const char* key, double x) {
  if (!std::isnan(x)) j[key] = x;
}

double get_or_unset(const Json& j, const char* key) {
  return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<double>() : kUnset;
}

Json terms_to_json(const std::vector<DegreeTerm>& terms) {
  Json a = Json::array();
  for (const auto& t : terms) a.push_back({t.degree, t.fraction});
  return a;
}

std::vector<DegreeTerm> terms_from_json(const Json& j) {
  std::vector<DegreeTerm> out;
  for (const auto& e : j) out.push_back({e.at(0).get<int>(), e.at(1).get<double>()});
  return out;
}

}  // namespace

Json to_json(const ChannelModel& model) {
  Json levels = Json::array();
  for (const auto& l : model.levels()) {
    if (const auto* g = std::get_if<GaussianLevel>(&l)) {
      levels.push_back({{"type", "gaussian"}, {"mean", g->mean}, {"sigma", g->sigma}});
    } else {
      const auto& t = std::get<TabulatedLevel>(l);
      levels.push_back({{"type", "tabulated"}, {"grid", t.grid()}, {"density", t.density()}});
    }
  }
  return {{"kind", to_string(model.kind())},
          {"prior", std::vector<double>(model.prior().begin(), model.prior().end())},
          {"levels", levels}};
}

Json to_json(const Dmc& dmc, const BitLabeling& labeling) {
  return {{"inputs", dmc.num_inputs()},
          {"outputs", dmc.num_outputs()},
          {"table", std::vector<double>(dmc.table().begin(), dmc.table().end())},
          {"prior", std::vector<double>(dmc.prior().begin(), dmc.prior().end())},
          {"labeling", labeling.labels()}};
}

Json to_json(const QuantizationScheme& s) {
  Json j = {{"strategy", to_string(s.strategy)}, {"thresholds", s.thresholds}, {"mi", s.achieved_mi}};
  put_if_set(j, "q", s.q);
  put_if_set(j, "ratio", s.ratio);
  put_if_set(j, "grid_step", s.grid_step);
  return j;
}

QuantizationScheme scheme_from_json(const Json& j) {
  QuantizationScheme s;
  s.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  s.thresholds = j.at("thresholds").get<std::vector<double>>();
  s.achieved_mi = j.value("mi", 0.0);
  s.q = get_or_unset(j, "q");
  s.ratio = get_or_unset(j, "ratio");
  s.grid_step = get_or_unset(j, "grid_step");
  return s;
}

Json to_json(const DegreeDistribution& dd) {
  return {{"name", dd.name()},
          {"lambda", terms_to_json(dd.lambda())},
          {"rho", terms_to_json(dd.rho())},
          {"design_rate", dd.design_rate()}};
}

DegreeDistribution degree_distribution_from_json(const Json& j) {
  std::optional<double> target;
  if (j.contains("target_rate")) target = j.at("target_rate").get<double>();
  return DegreeDistribution(terms_from_json(j.at("lambda")), terms_from_json(j.at("rho")), target,
                            j.value("name", std::string{}));
}

Json to_json(const CodeMetadata& meta) {
  Json hist = Json::object();
  for (auto [g, c] : meta.girth_histogram) hist[std::to_string(g)] = c;
  return {{"dd_name", meta.dd_name},
          {"lambda", terms_to_json(meta.lambda)},
          {"rho", terms_to_json(meta.rho)},
          {"seed", meta.seed},
          {"ace", {{"d", meta.ace_d}, {"eta", meta.ace_eta}}},
          {"girth_histogram", hist},
          {"ace_violations", meta.ace_violations},
          {"check_profile_deviation", meta.check_profile_deviation}};
}

Json to_json(const SimConfig& cfg) {
  Json ch = {{"type", cfg.channel.type}};
  put_if_set(ch, "snr_db", cfg.channel.snr_db);
  if (!cfg.channel.levels.empty()) {
    Json lv = Json::array();
    for (const auto& l : cfg.channel.levels) lv.push_back({{"mean", l.mean}, {"sigma", l.sigma}});
    ch["levels"] = lv;
  }
  if (!cfg.channel.prior.empty()) ch["prior"] = cfg.channel.prior;
  if (!cfg.channel.table_csv.empty()) ch["table_csv"] = cfg.channel.table_csv;

  Json q = {{"strategy", to_string(cfg.quant.strategy)}, {"reads", cfg.quant.reads}};
  put_if_set(q, "q", cfg.quant.q);
  put_if_set(q, "ratio", cfg.quant.ratio);
  if (!cfg.quant.thresholds.empty()) q["thresholds"] = cfg.quant.thresholds;

  Json code = {{"dd", cfg.code.dd}, {"n", cfg.code.n}, {"seed", cfg.code.seed}};
  if (!cfg.code.alist.empty()) code = {{"alist", cfg.code.alist}};

  return {{"label", cfg.label},
          {"channel", ch},
          {"quantization", q},
          {"code", code},
          {"max_iter", cfg.max_iter},
          {"max_frames", cfg.max_frames},
          {"target_frame_errors", cfg.target_frame_errors},
          {"seed", cfg.seed},
          {"workers", cfg.workers},
          {"max_seconds", cfg.max_seconds}};
}

ChannelSpec channel_spec_from_json(const Json& j) {
  ChannelSpec s;
  s.type = j.value("type", s.type);
  s.snr_db = get_or_unset(j, "snr_db");
  if (j.contains("levels"))
    for (const auto& l : j.at("levels"))
      s.levels.push_back({l.at("mean").get<double>(), l.at("sigma").get<double>()});
  if (j.contains("prior")) s.prior = j.at("prior").get<std::vector<double>>();
  s.table_csv = j.value("table_csv", std::string{});
  return s;
}

QuantSpec quant_spec_from_json(const Json& j) {
  QuantSpec s;
  if (j.contains("strategy")) s.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  s.reads = j.value("reads", s.reads);
  s.q = get_or_unset(j, "q");
  s.ratio = get_or_unset(j, "ratio");
  if (j.contains("thresholds")) s.thresholds = j.at("thresholds").get<std::vector<double>>();
  return s;
}

CodeSpec code_spec_from_json(const Json& j) {
  CodeSpec s;
  s.dd = j.value("dd", s.dd);
  s.n = j.value("n", s.n);
  s.seed = j.value("seed", s.seed);
  s.alist = j.value("alist", std::string{});
  return s;
}

SimConfig sim_config_from_json(const Json& j) {
  SimConfig c;
  c.label = j.value("label", std::string{});
  if (j.contains("channel")) c.channel = channel_spec_from_json(j.at("channel"));
  if (j.contains("quantization")) c.quant = quant_spec_from_json(j.at("quantization"));
  if (j.contains("code")) c.code = code_spec_from_json(j.at("code"));
  c.max_iter = j.value("max_iter", c.max_iter);
  c.max_frames = j.value("max_frames", c.max_frames);
  c.target_frame_errors = j.value("target_frame_errors", c.target_frame_errors);
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
  c.max_seconds = j.value("max_seconds", c.max_seconds);
  return c;
}

Json to_json(const SimResult& r) {
  return {{"config", to_json(r.config)},
          {"thresholds", r.thresholds},
          {"mi", r.mi},
          {"channel_ber", r.channel_ber},
          {"frames", r.frames},
          {"frame_errors", r.frame_errors},
          {"bit_errors", r.bit_errors},
          {"fer", r.fer},
          {"ber", r.ber},
          {"mean_iterations", r.mean_iterations},
          {"ci_low", r.ci.low},
          {"ci_high", r.ci.high},
          {"stop_reason", r.stop_reason},
          {"wall_seconds", r.wall_seconds}};
}

SimResult sim_result_from_json(const Json& j) {
  SimResult r;
  r.config = sim_config_from_json(j.at("config"));
  r.thresholds = j.at("thresholds").get<std::vector<double>>();
  r.mi = j.at("mi").get<double>();
  r.channel_ber = j.at("channel_ber").get<double>();
  r.frames = j.at("frames").get<std::uint64_t>();
  r.frame_errors = j.at("frame_errors").get<std::uint64_t>();
  r.bit_errors = j.at("bit_errors").get<std::uint64_t>();
  r.fer = j.at("fer").get<double>();
  r.ber = j.at("ber").get<double>();
  r.mean_iterations = j.at("mean_iterations").get<double>();
  r.ci = {j.at("ci_low").get<double>(), j.at("ci_high").get<double>()};
  r.stop_reason = j.at("stop_reason").get<std::string>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  return r;
}

std::vector<std::vector<double>> read_numeric_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw std::runtime_error("CSV: non-numeric row: " + line);
    }
    first = false;
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LevelDensity> tabulated_levels_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open density table " + path);
  const auto rows = read_numeric_csv(in);
  if (rows.empty() || rows[0].size() < 2) throw std::invalid_argument("density table needs v, f_0, ...");
  const std::size_t cols = rows[0].size();
  std::vector<double> grid;
  std::vector<std::vector<double>> dens(cols - 1);
  for (const auto& r : rows) {
    if (r.size() != cols) throw std::invalid_argument("density table: ragged row");
    grid.push_back(r[0]);
    for (std::size_t i = 1; i < cols; ++i) dens[i - 1].push_back(r[i]);
  }
  std::vector<LevelDensity> levels;
  for (auto& d : dens) levels.emplace_back(TabulatedLevel(grid, std::move(d)));
  return levels;
}

std::string config_hash(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string sim_csv_header() {
  return "label,channel,snr_db,strategy,reads,q,ratio,mi,channel_ber,frames,frame_errors,fer,"
         "ci_low,ci_high,ber,mean_iterations,stop_reason,wall_seconds";
}

std::string sim_csv_row(const SimResult& r) {
  const auto& c = r.config;
  auto opt = [](double x) { return std::isnan(x) ? std::string{} : fmt(x); };
  std::ostringstream os;
  os << c.label << ',' << c.channel.type << ',' << opt(c.channel.snr_db) << ','
     << to_string(c.quant.strategy) << ',' << c.quant.reads << ',' << opt(c.quant.q) << ','
     << opt(c.quant.ratio) << ',' << fmt(r.mi) << ',' << fmt(r.channel_ber) << ',' << r.frames << ','
     << r.frame_errors << ',' << fmt(r.fer) << ',' << fmt(r.ci.low) << ',' << fmt(r.ci.high) << ','
     << fmt(r.ber) << ',' << fmt(r.mean_iterations, 6) << ',' << r.stop_reason << ','
     << fmt(r.wall_seconds, 6);
  return os.str();
}

}  // namespace flashmmi
