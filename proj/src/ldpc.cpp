#include "flashmmi/ldpc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>

namespace flashmmi {

// ---------------------------------------------------------------------------
// Code container and encoder

LdpcCode::LdpcCode(int n, std::vector<std::vector<int>> rows) : n_(n), rows_(std::move(rows)) {
  if (n_ <= 0) throw std::invalid_argument("LDPC: n must be positive");
  cols_.assign(n_, {});
  check_start_.push_back(0);
  for (std::size_t c = 0; c < rows_.size(); ++c) {
    auto& r = rows_[c];
    std::sort(r.begin(), r.end());
    if (std::adjacent_find(r.begin(), r.end()) != r.end())
      throw std::invalid_argument("LDPC: repeated variable in a check");
    for (int v : r) {
      if (v < 0 || v >= n_) throw std::invalid_argument("LDPC: variable index out of range");
      cols_[v].push_back(static_cast<int>(c));
      edge_var_.push_back(v);
    }
    check_start_.push_back(static_cast<int>(edge_var_.size()));
  }

  // Reduced row echelon form over GF(2). Columns are scanned from the right so
  // that the parity positions collect at the end when H allows it.
  words_ = (static_cast<std::size_t>(n_) + 63) / 64;
  const std::size_t m = rows_.size();
  std::vector<std::uint64_t> mat(m * words_, 0);
  for (std::size_t c = 0; c < m; ++c)
    for (int v : rows_[c]) mat[c * words_ + v / 64] |= std::uint64_t{1} << (v % 64);

  std::size_t rank = 0;
  std::vector<char> is_pivot(n_, 0);
  for (int col = n_ - 1; col >= 0 && rank < m; --col) {
    const std::size_t w = col / 64;
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    std::size_t r = rank;
    while (r < m && !(mat[r * words_ + w] & bit)) ++r;
    if (r == m) continue;
    if (r != rank)
      std::swap_ranges(mat.begin() + r * words_, mat.begin() + (r + 1) * words_,
                       mat.begin() + rank * words_);
    const std::uint64_t* prow = mat.data() + rank * words_;
    for (std::size_t o = 0; o < m; ++o) {
      if (o == rank || !(mat[o * words_ + w] & bit)) continue;
      std::uint64_t* orow = mat.data() + o * words_;
      for (std::size_t k = 0; k < words_; ++k) orow[k] ^= prow[k];
    }
    pivots_.push_back(col);
    is_pivot[col] = 1;
    ++rank;
  }
  rref_.assign(mat.begin(), mat.begin() + rank * words_);
  for (int v = 0; v < n_; ++v)
    if (!is_pivot[v]) info_.push_back(v);
}

std::vector<int> LdpcCode::variable_degrees() const {
  std::vector<int> d(n_);
  for (int v = 0; v < n_; ++v) d[v] = static_cast<int>(cols_[v].size());
  return d;
}

std::vector<int> LdpcCode::check_degrees() const {
  std::vector<int> d(rows_.size());
  for (std::size_t c = 0; c < rows_.size(); ++c) d[c] = static_cast<int>(rows_[c].size());
  return d;
}

Bits LdpcCode::encode(std::span<const std::uint8_t> message) const {
  if (message.size() != info_.size())
    throw std::invalid_argument("LDPC encode: message length must equal k = " +
                                std::to_string(info_.size()));
  Bits cw(n_, 0);
  std::vector<std::uint64_t> packed(words_, 0);
  for (std::size_t i = 0; i < info_.size(); ++i) {
    const int v = info_[i];
    cw[v] = message[i] & 1;
    if (cw[v]) packed[v / 64] |= std::uint64_t{1} << (v % 64);
  }
  for (std::size_t r = 0; r < pivots_.size(); ++r) {
    const std::uint64_t* row = rref_.data() + r * words_;
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < words_; ++k) acc ^= row[k] & packed[k];
    cw[pivots_[r]] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
  }
  return cw;
}

Bits LdpcCode::extract_message(std::span<const std::uint8_t> codeword) const {
  if (codeword.size() != static_cast<std::size_t>(n_))
    throw std::invalid_argument("LDPC: codeword length must equal n");
  Bits msg(info_.size());
  for (std::size_t i = 0; i < info_.size(); ++i) msg[i] = codeword[info_[i]];
  return msg;
}

bool LdpcCode::is_codeword(std::span<const std::uint8_t> word) const {
  if (word.size() != static_cast<std::size_t>(n_)) return false;
  for (const auto& r : rows_) {
    int p = 0;
    for (int v : r) p ^= word[v] & 1;
    if (p) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Construction

std::vector<int> largest_remainder(std::span<const double> weights, int total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(sum > 0.0) || total < 0) throw std::invalid_argument("largest_remainder: bad input");
  std::vector<int> out(weights.size());
  std::vector<std::pair<double, std::size_t>> rem;
  int assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] / sum * total;
    out[i] = static_cast<int>(std::floor(exact));
    assigned += out[i];
    rem.emplace_back(exact - out[i], i);
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int i = 0; i < total - assigned; ++i) ++out[rem[i].second];
  return out;
}

namespace {

struct CheckPlan {
  std::vector<int> degrees;  // per check
  int deviation = 0;
};

// Counts per class, each the floor or ceiling of fraction * total, summing to
// total. Largest-remainder rounding comes first, then the other roundings by
// how many classes they flip.
std::vector<std::vector<int>> rounding_choices(std::span<const double> frac, int total) {
  const auto base = largest_remainder(frac, total);
  std::vector<std::vector<int>> out;
  std::vector<int> cur(frac.size());
  auto rec = [&](auto&& self, std::size_t i, int sum) -> void {
    if (out.size() >= 4096) return;
    if (i == frac.size()) {
      if (sum == total) out.push_back(cur);
      return;
    }
    const double exact = frac[i] * total;
    const int lo = static_cast<int>(std::floor(exact));
    const int hi = static_cast<int>(std::ceil(exact));
    for (int c = lo; c <= hi; ++c) {
      cur[i] = c;
      self(self, i + 1, sum + c);
    }
  };
  rec(rec, 0, 0);
  auto flips = [&](const std::vector<int>& c) {
    int k = 0;
    for (std::size_t i = 0; i < c.size(); ++i) k += c[i] != base[i];
    return k;
  };
  std::stable_sort(out.begin(), out.end(), [&](auto& a, auto& b) { return flips(a) < flips(b); });
  if (out.empty() || out.front() != base) out.insert(out.begin(), base);
  return out;
}

long edge_count(const std::vector<DegreeTerm>& terms, const std::vector<int>& counts) {
  long e = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) e += static_cast<long>(counts[i]) * terms[i].degree;
  return e;
}

// Check-node degrees whose total matches the number of edges exactly, with
// every class count rounded from its target (deviation <= 1).
std::optional<CheckPlan> exact_check_plan(const DegreeDistribution& dd, long edges) {
  const auto& rho = dd.rho();
  const auto frac = dd.check_node_fractions();
  double avg = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) avg += frac[i] * rho[i].degree;
  const long m0 = std::lround(edges / avg);
  for (long m : {m0, m0 - 1, m0 + 1, m0 - 2, m0 + 2, m0 - 3, m0 + 3}) {
    if (m < 1) continue;
    const auto base = largest_remainder(frac, static_cast<int>(m));
    for (const auto& counts : rounding_choices(frac, static_cast<int>(m))) {
      if (edge_count(rho, counts) != edges) continue;
      CheckPlan plan;
      for (std::size_t i = 0; i < rho.size(); ++i) {
        plan.deviation = std::max(plan.deviation, std::abs(counts[i] - base[i]));
        plan.degrees.insert(plan.degrees.end(), counts[i], rho[i].degree);
      }
      return plan;
    }
  }
  return std::nullopt;
}

// Fallback when no rounding matches: closest m, then single checks moved
// between adjacent degrees until the edge totals agree.
CheckPlan nearest_check_plan(const DegreeDistribution& dd, long edges) {
  const auto& rho = dd.rho();
  const auto frac = dd.check_node_fractions();
  double avg = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) avg += frac[i] * rho[i].degree;
  const long m0 = std::lround(edges / avg);

  long best_m = -1;
  long best_gap = std::numeric_limits<long>::max();
  std::vector<int> best_counts;
  for (long m = std::max(1L, m0 - 3); m <= m0 + 3; ++m) {
    const auto counts = largest_remainder(frac, static_cast<int>(m));
    const long gap = std::abs(edges - edge_count(rho, counts));
    if (gap < best_gap || (gap == best_gap && std::abs(m - m0) < std::abs(best_m - m0))) {
      best_gap = gap;
      best_m = m;
      best_counts = counts;
    }
  }

  std::map<int, int> count;
  for (std::size_t i = 0; i < rho.size(); ++i) count[rho[i].degree] = best_counts[i];
  const auto target = count;
  long sum = 0;
  for (auto [d, c] : count) sum += static_cast<long>(d) * c;
  while (sum != edges) {
    const int dir = sum < edges ? 1 : -1;
    int from = -1;
    for (auto [d, c] : count)
      if (c > 0 && count.contains(d + dir) && (from < 0 || c > count[from])) from = d;
    if (from < 0) {
      // No adjacent degree in the support: stretch the most common class.
      from = std::max_element(count.begin(), count.end(),
                              [](auto& a, auto& b) { return a.second < b.second; })->first;
    }
    --count[from];
    ++count[from + dir];
    sum += dir;
  }

  CheckPlan plan;
  for (auto [d, c] : count) {
    if (d < 1) throw std::invalid_argument("PEG: infeasible check degree sequence");
    const auto it = target.find(d);
    plan.deviation = std::max(plan.deviation, std::abs(c - (it == target.end() ? 0 : it->second)));
    for (int i = 0; i < c; ++i) plan.degrees.push_back(d);
  }
  return plan;
}

struct DegreePlan {
  std::vector<int> variable;  // per variable node, ascending
  CheckPlan check;
};

// Variable counts may take either rounding of their targets so that some
// rounding of the check counts meets the same edge total.
DegreePlan plan_degrees(const DegreeDistribution& dd, int n) {
  const auto& lambda = dd.lambda();
  const auto choices = rounding_choices(dd.variable_node_fractions(), n);
  DegreePlan plan;
  std::vector<int> counts = choices.front();
  std::optional<CheckPlan> exact;
  for (const auto& c : choices) {
    exact = exact_check_plan(dd, edge_count(lambda, c));
    if (exact) {
      counts = c;
      break;
    }
  }
  if (exact) {
    plan.check = *exact;
  } else {
    plan.check = nearest_check_plan(dd, edge_count(lambda, counts));
    for (const auto& c : choices) {
      auto p = nearest_check_plan(dd, edge_count(lambda, c));
      if (p.deviation < plan.check.deviation) {
        plan.check = std::move(p);
        counts = c;
      }
    }
  }
  for (std::size_t i = 0; i < lambda.size(); ++i)
    plan.variable.insert(plan.variable.end(), counts[i], lambda[i].degree);
  return plan;
}

}  // namespace

LdpcCode construct_peg_ace(const DegreeDistribution& dd, int n, std::uint64_t seed,
                           const PegOptions& opt) {
  if (n <= 0) throw std::invalid_argument("PEG: n must be positive");
  const auto degree_plan = plan_degrees(dd, n);
  const auto& vdeg = degree_plan.variable;
  const auto& plan = degree_plan.check;
  const int m = static_cast<int>(plan.degrees.size());
  if (vdeg.back() > m) throw std::invalid_argument("PEG: variable degree exceeds number of checks");

  std::mt19937_64 rng(seed);
  // Spread check degrees over indices so the layout does not depend on class order.
  std::vector<int> cdeg = plan.degrees;
  std::shuffle(cdeg.begin(), cdeg.end(), rng);

  std::vector<std::vector<int>> v2c(n), c2v(m);
  std::vector<int> cur(m, 0);
  int available = m;

  std::vector<int> check_mark(m, 0), var_mark(n, 0);
  std::vector<int> check_ace(m, 0), var_ace(n, 0);
  std::vector<int> check_level(m, 0);
  int stamp = 0;
  std::vector<int> chosen;

  auto pick = [&](std::vector<int>& cands, bool use_ace) {
    int best_ace = std::numeric_limits<int>::min();
    if (use_ace)
      for (int c : cands) best_ace = std::max(best_ace, check_ace[c]);
    // Most open sockets first: with mixed target degrees, lowest current
    // degree would leave the largest checks holding the last sockets.
    int best_open = 0;
    for (int c : cands)
      if (!use_ace || check_ace[c] == best_ace) best_open = std::max(best_open, cdeg[c] - cur[c]);
    std::vector<int> tied;
    for (int c : cands)
      if ((!use_ace || check_ace[c] == best_ace) && cdeg[c] - cur[c] == best_open) tied.push_back(c);
    return tied[rng() % tied.size()];
  };

  auto has = [](const std::vector<int>& list, int x) {
    return std::find(list.begin(), list.end(), x) != list.end();
  };
  // Every open socket sits on a check v already uses (happens near the end at
  // short lengths). Move an edge (u, c2), c2 not on v, over to an open check c
  // not on u, then give c2 to v. All degrees are preserved.
  auto reroute = [&](int v, const std::vector<int>& open) {
    for (int c : open)
      for (int c2 = 0; c2 < m; ++c2) {
        if (has(v2c[v], c2)) continue;
        for (int& u : c2v[c2]) {
          if (has(v2c[u], c)) continue;
          std::replace(v2c[u].begin(), v2c[u].end(), c2, c);
          c2v[c].push_back(u);
          u = v;
          v2c[v].push_back(c2);
          if (++cur[c] == cdeg[c]) --available;
          return true;
        }
      }
    return false;
  };

  for (int v = 0; v < n; ++v) {
    for (int e = 0; e < vdeg[v]; ++e) {
      if (available == 0) throw std::runtime_error("PEG: ran out of check sockets");
      chosen.clear();
      bool use_ace = false;
      bool rerouted = false;
      if (e == 0) {
        for (int c = 0; c < m; ++c)
          if (cur[c] < cdeg[c]) chosen.push_back(c);
      } else {
        ++stamp;
        var_mark[v] = stamp;
        var_ace[v] = vdeg[v] - 2;
        std::vector<int> frontier{v};
        std::vector<int> new_checks;
        int reached_avail = 0;
        int level = 0;
        for (;; ++level) {
          new_checks.clear();
          for (int u : frontier)
            for (int c : v2c[u]) {
              if (check_mark[c] != stamp) {
                check_mark[c] = stamp;
                check_ace[c] = var_ace[u];
                check_level[c] = level;
                new_checks.push_back(c);
                if (cur[c] < cdeg[c]) ++reached_avail;
              } else if (check_level[c] == level) {
                check_ace[c] = std::min(check_ace[c], var_ace[u]);
              }
            }
          if (new_checks.empty()) {
            // Growth stopped: any unreached check closes no cycle.
            for (int c = 0; c < m; ++c)
              if (cur[c] < cdeg[c] && check_mark[c] != stamp) chosen.push_back(c);
            break;
          }
          if (reached_avail == available) {
            for (int c : new_checks)
              if (cur[c] < cdeg[c]) chosen.push_back(c);
            if (level == 0) {
              if (!reroute(v, chosen)) throw std::runtime_error("PEG: only already-connected checks remain");
              rerouted = true;
            }
            use_ace = 2 * (level + 1) <= 2 * opt.ace_d;
            break;
          }
          std::vector<int> next;
          for (int c : new_checks)
            for (int u : c2v[c]) {
              const int a = check_ace[c] + vdeg[u] - 2;
              if (var_mark[u] != stamp) {
                var_mark[u] = stamp;
                var_ace[u] = a;
                next.push_back(u);
              } else if (u != v) {
                var_ace[u] = std::min(var_ace[u], a);
              }
            }
          frontier.swap(next);
          if (frontier.empty()) {
            for (int c = 0; c < m; ++c)
              if (cur[c] < cdeg[c] && check_mark[c] != stamp) chosen.push_back(c);
            break;
          }
        }
      }
      if (rerouted) continue;
      if (chosen.empty()) throw std::runtime_error("PEG: no admissible check");
      const int c = pick(chosen, use_ace);
      v2c[v].push_back(c);
      c2v[c].push_back(v);
      if (++cur[c] == cdeg[c]) --available;
    }
  }

  LdpcCode code(n, std::move(c2v));
  auto& meta = code.metadata;
  meta.dd_name = dd.name();
  meta.lambda = dd.lambda();
  meta.rho = dd.rho();
  meta.seed = seed;
  meta.ace_d = opt.ace_d;
  meta.ace_eta = opt.ace_eta;
  meta.check_profile_deviation = plan.deviation;
  const auto audit = audit_girth_ace(code);
  for (std::size_t u = 0; u < audit.local_girth.size(); ++u) {
    const int g = audit.local_girth[u];
    ++meta.girth_histogram[g];
    if (g > 0 && g <= 2 * opt.ace_d && audit.local_ace[u] < opt.ace_eta) ++meta.ace_violations;
  }
  return code;
}

GirthAudit audit_girth_ace(const LdpcCode& code) {
  const int n = code.n();
  const int m = code.m();
  const auto& cols = code.cols();
  const auto& rows = code.rows();
  const auto vdeg = code.variable_degrees();
  GirthAudit out;
  out.local_girth.assign(n, 0);
  out.local_ace.assign(n, 0);

  // Bipartite node ids: variables 0..n-1, checks n..n+m-1.
  const int total = n + m;
  std::vector<int> dist(total, -1), branch(total), parent(total), ace(total);
  std::vector<int> touched;
  auto contrib = [&](int x) { return x < n ? vdeg[x] - 2 : 0; };
  auto neighbours = [&](int x) -> const std::vector<int>& { return x < n ? cols[x] : rows[x - n]; };
  auto id = [&](int x, int y) { return x < n ? y + n : y; };

  for (int v = 0; v < n; ++v) {
    for (int x : touched) dist[x] = -1;
    touched.clear();
    int best_len = 0;
    int best_ace = 0;
    std::vector<int> queue{v};
    dist[v] = 0;
    branch[v] = -1;
    parent[v] = -1;
    ace[v] = contrib(v);
    touched.push_back(v);
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int x = queue[h];
      if (best_len > 0 && 2 * dist[x] >= best_len) break;
      for (int raw : neighbours(x)) {
        const int y = id(x, raw);
        if (y == parent[x]) continue;
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          branch[y] = x == v ? y : branch[x];
          parent[y] = x;
          ace[y] = ace[x] + contrib(y);
          touched.push_back(y);
          queue.push_back(y);
        } else if (branch[y] != branch[x]) {
          const int len = dist[x] + dist[y] + 1;
          const int a = ace[x] + ace[y] - contrib(v);
          if (best_len == 0 || len < best_len || (len == best_len && a < best_ace)) {
            best_len = len;
            best_ace = a;
          }
        } else if (dist[y] == dist[x] + 1) {
          ace[y] = std::min(ace[y], ace[x] + contrib(y));
        }
      }
    }
    out.local_girth[v] = best_len;
    out.local_ace[v] = best_ace;
    if (best_len > 0 && (out.girth == 0 || best_len < out.girth)) out.girth = best_len;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decoder

namespace {

// Messages beyond this magnitude carry no usable information in double
// precision (tanh(x/2) rounds to 1 near x = 37).
constexpr double kMessageMax = 50.0;

bool hard_decision_ok(const LdpcCode& code, const std::vector<double>& post, Bits& bits) {
  bool decided = true;
  for (std::size_t v = 0; v < post.size(); ++v) {
    bits[v] = post[v] < 0.0;
    if (post[v] == 0.0) decided = false;
  }
  return decided && code.is_codeword(bits);
}

}  // namespace

DecodeResult decode_bp(const LdpcCode& code, std::span<const double> channel_llrs,
                       const DecodeOptions& opt) {
  const int n = code.n();
  if (channel_llrs.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("decode_bp: LLR vector length must equal n");
  DecodeResult res;
  res.posterior.assign(channel_llrs.begin(), channel_llrs.end());
  for (double l : res.posterior)
    if (!std::isfinite(l)) throw std::invalid_argument("decode_bp: non-finite LLR");
  res.bits.assign(n, 0);
  if (hard_decision_ok(code, res.posterior, res.bits) && opt.early_stop) {
    res.converged = true;
    return res;
  }

  const auto& edge_var = code.edge_var();
  const auto& start = code.check_start();
  const int m = code.m();
  std::vector<double> r(edge_var.size(), 0.0);
  std::size_t max_deg = 0;
  for (int c = 0; c < m; ++c) max_deg = std::max<std::size_t>(max_deg, start[c + 1] - start[c]);
  std::vector<double> q(max_deg), th(max_deg), prefix(max_deg);
  auto& post = res.posterior;

  // Tanh rule with prefix/suffix products, so each extrinsic product skips
  // its own edge without dividing.
  for (int it = 1; it <= opt.max_iter; ++it) {
    for (int c = 0; c < m; ++c) {
      const int b = start[c];
      const int d = start[c + 1] - b;
      bool neg = false;
      double run = 1.0;
      for (int i = 0; i < d; ++i) {
        q[i] = post[edge_var[b + i]] - r[b + i];
        neg ^= q[i] < 0.0;
        const double t = std::exp(-std::abs(q[i]));
        th[i] = (1.0 - t) / (1.0 + t);
        prefix[i] = run;
        run *= th[i];
      }
      double suffix = 1.0;
      for (int i = d - 1; i >= 0; --i) {
        const double p = prefix[i] * suffix;
        const double mag = p < 1.0 ? std::min(std::log1p(2.0 * p / (1.0 - p)), kMessageMax)
                                   : kMessageMax;
        const double msg = (neg != (q[i] < 0.0)) ? -mag : mag;
        r[b + i] = msg;
        post[edge_var[b + i]] = q[i] + msg;
        suffix *= th[i];
      }
    }
    res.iterations = it;
    const bool ok = hard_decision_ok(code, post, res.bits);
    if (ok) res.converged = true;
    if (ok && opt.early_stop) return res;
  }
  res.converged = hard_decision_ok(code, post, res.bits);
  return res;
}

// ---------------------------------------------------------------------------
// Absorbing sets

bool is_absorbing_set(const LdpcCode& code, std::span<const int> variables, int* unsatisfied) {
  std::map<int, int> count;
  for (int v : variables)
    for (int c : code.cols()[v]) ++count[c];
  int odd = 0;
  for (auto [c, k] : count) odd += k & 1;
  if (unsatisfied) *unsatisfied = odd;
  for (int v : variables) {
    int sat = 0;
    int uns = 0;
    for (int c : code.cols()[v]) (count[c] & 1 ? uns : sat)++;
    if (sat <= uns) return false;
  }
  return !variables.empty();
}

namespace {

struct Esu {
  const LdpcCode& code;
  const std::vector<std::vector<int>>& adj;
  int max_a;
  int max_b;
  std::size_t budget;
  AbsorbingSetReport& report;
  std::vector<int> sub;
  std::vector<char> in_sub_or_nbr;  // membership counts for exclusive neighbourhoods
  std::vector<int> nbr_count;

  void visit() {
    if (++report.subsets_examined > budget) {
      report.truncated = true;
      return;
    }
    int b = 0;
    if (is_absorbing_set(code, sub, &b) && b <= max_b) {
      auto s = sub;
      std::sort(s.begin(), s.end());
      report.sets.push_back({static_cast<int>(s.size()), b, std::move(s)});
    }
  }

  void mark(int w, int delta) {
    nbr_count[w] += delta;
    for (int u : adj[w]) nbr_count[u] += delta;
  }

  void extend(std::vector<int> ext, int root) {
    visit();
    if (report.truncated || static_cast<int>(sub.size()) == max_a) return;
    while (!ext.empty() && !report.truncated) {
      const int w = ext.back();
      ext.pop_back();
      std::vector<int> next = ext;
      // Exclusive neighbours of w: not in sub and not adjacent to sub.
      for (int u : adj[w])
        if (u > root && nbr_count[u] == 0) next.push_back(u);
      sub.push_back(w);
      mark(w, 1);
      extend(std::move(next), root);
      mark(w, -1);
      sub.pop_back();
    }
  }
};

}  // namespace

AbsorbingSetReport scan_absorbing_sets(const LdpcCode& code, int max_a, int max_b,
                                       std::size_t budget) {
  if (max_a > 6) throw std::invalid_argument("scan_absorbing_sets: max_a must be <= 6");
  AbsorbingSetReport report;
  const int n = code.n();
  const auto& cols = code.cols();
  const auto& rows = code.rows();
  std::vector<char> eligible(n, 0);
  for (int v = 0; v < n; ++v) eligible[v] = !cols[v].empty() && cols[v].size() <= 3;

  std::vector<std::vector<int>> adj(n);
  for (int v = 0; v < n; ++v) {
    if (!eligible[v]) continue;
    for (int c : cols[v])
      for (int u : rows[c])
        if (u != v && eligible[u]) adj[v].push_back(u);
    std::sort(adj[v].begin(), adj[v].end());
    adj[v].erase(std::unique(adj[v].begin(), adj[v].end()), adj[v].end());
  }

  Esu esu{code, adj, max_a, max_b, budget, report, {}, {}, std::vector<int>(n, 0)};
  for (int v = 0; v < n && !report.truncated; ++v) {
    if (!eligible[v]) continue;
    std::vector<int> ext;
    for (int u : adj[v])
      if (u > v) ext.push_back(u);
    esu.sub = {v};
    esu.mark(v, 1);
    esu.extend(std::move(ext), v);
    esu.mark(v, -1);
  }
  return report;
}

// ---------------------------------------------------------------------------
// alist I/O

void write_alist(std::ostream& os, const LdpcCode& code) {
  const auto vd = code.variable_degrees();
  const auto cd = code.check_degrees();
  const int max_v = vd.empty() ? 0 : *std::max_element(vd.begin(), vd.end());
  const int max_c = cd.empty() ? 0 : *std::max_element(cd.begin(), cd.end());
  os << code.n() << ' ' << code.m() << '\n' << max_v << ' ' << max_c << '\n';
  for (std::size_t i = 0; i < vd.size(); ++i) os << vd[i] << (i + 1 < vd.size() ? ' ' : '\n');
  for (std::size_t i = 0; i < cd.size(); ++i) os << cd[i] << (i + 1 < cd.size() ? ' ' : '\n');
  auto emit = [&](const std::vector<int>& list, int width) {
    for (int i = 0; i < width; ++i) {
      os << (i < static_cast<int>(list.size()) ? list[i] + 1 : 0);
      os << (i + 1 < width ? ' ' : '\n');
    }
  };
  for (const auto& col : code.cols()) emit(col, max_v);
  for (const auto& row : code.rows()) emit(row, max_c);
}

LdpcCode read_alist(std::istream& is) {
  auto next = [&]() {
    long x;
    if (!(is >> x)) throw std::runtime_error("alist: truncated input");
    return x;
  };
  // Zero entries are padding; skip them.
  auto next_nonzero = [&]() {
    long x;
    do x = next();
    while (x == 0);
    return x;
  };
  const long n = next();
  const long m = next();
  if (n <= 0 || m < 0) throw std::runtime_error("alist: bad dimensions");
  next();
  next();
  std::vector<long> vd(n), cd(m);
  for (auto& d : vd) d = next();
  for (auto& d : cd) d = next();
  std::vector<std::vector<int>> cols(n);
  for (long v = 0; v < n; ++v)
    for (long i = 0; i < vd[v]; ++i) {
      const long c = next_nonzero();
      if (c < 1 || c > m) throw std::runtime_error("alist: check index out of range");
      cols[v].push_back(static_cast<int>(c - 1));
    }
  std::vector<std::vector<int>> rows(m);
  for (long c = 0; c < m; ++c)
    for (long i = 0; i < cd[c]; ++i) {
      const long v = next_nonzero();
      if (v < 1 || v > n) throw std::runtime_error("alist: variable index out of range");
      rows[c].push_back(static_cast<int>(v - 1));
    }
  // Both halves must describe the same matrix.
  std::vector<std::vector<int>> check(n);
  for (long c = 0; c < m; ++c)
    for (int v : rows[c]) check[v].push_back(static_cast<int>(c));
  for (long v = 0; v < n; ++v) {
    std::sort(cols[v].begin(), cols[v].end());
    if (cols[v] != check[v]) throw std::runtime_error("alist: column and row lists disagree");
  }
  return LdpcCode(static_cast<int>(n), std::move(rows));
}

}  // namespace flashmmi
