#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "flashmmi/degree_distribution.hpp"

namespace flashmmi {

using Bits = std::vector<std::uint8_t>;

/// Construction record stored next to a generated code.
struct CodeMetadata {
  std::string dd_name;
  std::vector<DegreeTerm> lambda;
  std::vector<DegreeTerm> rho;
  std::uint64_t seed = 0;
  int ace_d = 0;
  int ace_eta = 0;
  /// Shortest cycle through each variable node -> node count (0 = acyclic).
  std::map<int, int> girth_histogram;
  /// Variable nodes whose shortest cycle has length <= 2*ace_d and ACE < ace_eta.
  int ace_violations = 0;
  /// Largest |achieved - target| node count over all check degrees.
  int check_profile_deviation = 0;
};

/// Binary LDPC code given by a sparse parity-check matrix, with a dense
/// GF(2) encoder built from the reduced row echelon form of H.
class LdpcCode {
 public:
  /// rows[c] lists the variable nodes of check c (0-based, no repeats).
  LdpcCode(int n, std::vector<std::vector<int>> rows);

  int n() const { return n_; }
  int m() const { return static_cast<int>(rows_.size()); }
  int rank() const { return static_cast<int>(pivots_.size()); }
  int k() const { return n_ - rank(); }
  double rate() const { return static_cast<double>(k()) / n_; }
  std::size_t num_edges() const { return edge_var_.size(); }

  const std::vector<std::vector<int>>& rows() const { return rows_; }
  const std::vector<std::vector<int>>& cols() const { return cols_; }
  std::vector<int> variable_degrees() const;
  std::vector<int> check_degrees() const;

  /// Codeword positions that carry the message, in message order.
  const std::vector<int>& info_positions() const { return info_; }

  Bits encode(std::span<const std::uint8_t> message) const;
  Bits extract_message(std::span<const std::uint8_t> codeword) const;
  bool is_codeword(std::span<const std::uint8_t> word) const;

  // Check-major flattened edges, used by the decoder.
  const std::vector<int>& edge_var() const { return edge_var_; }
  const std::vector<int>& check_start() const { return check_start_; }

  CodeMetadata metadata;

 private:
  int n_;
  std::vector<std::vector<int>> rows_;
  std::vector<std::vector<int>> cols_;
  std::vector<int> edge_var_;
  std::vector<int> check_start_;
  // Encoder: RREF rows as bitsets over all n columns; pivot column of each.
  std::size_t words_ = 0;
  std::vector<std::uint64_t> rref_;
  std::vector<int> pivots_;
  std::vector<int> info_;
};

struct PegOptions {
  int ace_d = 4;
  int ace_eta = 4;
};

/// Progressive edge growth with ACE tie-breaking. Node degree counts follow
/// the node-perspective distributions with largest-remainder rounding.
LdpcCode construct_peg_ace(const DegreeDistribution& dd, int n, std::uint64_t seed,
                           const PegOptions& opt = {});

/// Largest-remainder split of total into integer counts proportional to weights.
std::vector<int> largest_remainder(std::span<const double> weights, int total);

struct GirthAudit {
  std::vector<int> local_girth;  // per variable node, 0 if none
  std::vector<int> local_ace;    // min ACE over shortest cycles through the node
  int girth = 0;                 // 0 for a forest
};

GirthAudit audit_girth_ace(const LdpcCode& code);

struct DecodeResult {
  Bits bits;
  bool converged = false;
  int iterations = 0;
  std::vector<double> posterior;
};

struct DecodeOptions {
  int max_iter = 50;
  /// Stop as soon as the hard decision satisfies every check.
  bool early_stop = true;
};

/// Check-serial (layered) sum-product decoding with the exact tanh rule.
/// LLR sign convention: positive favours bit 0. A zero posterior counts as
/// undecided, so the all-zero input never reports convergence.
DecodeResult decode_bp(const LdpcCode& code, std::span<const double> channel_llrs,
                       const DecodeOptions& opt = {});

struct AbsorbingSet {
  int a = 0;
  int b = 0;
  std::vector<int> variables;
};

struct AbsorbingSetReport {
  std::vector<AbsorbingSet> sets;
  /// True when the enumeration hit its work budget before finishing.
  bool truncated = false;
  std::size_t subsets_examined = 0;
};

/// Enumerates connected sets of up to max_a variable nodes, all of degree
/// <= 3, and reports those that are (a, b) absorbing sets with b <= max_b.
AbsorbingSetReport scan_absorbing_sets(const LdpcCode& code, int max_a = 5, int max_b = 2,
                                       std::size_t budget = 50'000'000);

bool is_absorbing_set(const LdpcCode& code, std::span<const int> variables, int* unsatisfied = nullptr);

void write_alist(std::ostream& os, const LdpcCode& code);
LdpcCode read_alist(std::istream& is);

}  // namespace flashmmi
