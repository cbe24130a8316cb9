#pragma once

#include <optional>
#include <string>
#include <vector>

namespace flashmmi {

/// One term a x^(d-1) of an edge-perspective degree polynomial.
struct DegreeTerm {
  int degree = 0;
  double fraction = 0.0;
};

/// Edge-perspective variable (lambda) and check (rho) degree distributions.
/// Fractions are normalized to sum to one at construction.
class DegreeDistribution {
 public:
  static constexpr double kRateTolerance = 2e-3;

  DegreeDistribution(std::vector<DegreeTerm> lambda, std::vector<DegreeTerm> rho,
                     std::optional<double> target_rate = std::nullopt, std::string name = {});

  /// Built-in Codes 1, 2 and 3 (rate 0.9021).
  static DegreeDistribution builtin(int id);

  const std::vector<DegreeTerm>& lambda() const { return lambda_; }
  const std::vector<DegreeTerm>& rho() const { return rho_; }
  const std::string& name() const { return name_; }

  /// 1 - (sum rho_d/d) / (sum lambda_d/d).
  double design_rate() const;
  int max_variable_degree() const;
  int max_check_degree() const;
  bool has_variable_degree(int d) const;

  /// Node-perspective fractions, same order as lambda()/rho().
  std::vector<double> variable_node_fractions() const;
  std::vector<double> check_node_fractions() const;

  /// Copy without degree-1 variable nodes, renormalized.
  DegreeDistribution without_degree_one() const;

 private:
  std::vector<DegreeTerm> lambda_;
  std::vector<DegreeTerm> rho_;
  std::string name_;
};

}  // namespace flashmmi
