#include "flashmmi/degree_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flashmmi {

namespace {

void normalize(std::vector<DegreeTerm>& terms, const char* side) {
  if (terms.empty()) throw std::invalid_argument(std::string(side) + ": empty degree list");
  std::sort(terms.begin(), terms.end(),
            [](const DegreeTerm& a, const DegreeTerm& b) { return a.degree < b.degree; });
  double sum = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].degree < 1) throw std::invalid_argument(std::string(side) + ": degree must be >= 1");
    if (i > 0 && terms[i].degree == terms[i - 1].degree)
      throw std::invalid_argument(std::string(side) + ": repeated degree");
    if (!(terms[i].fraction >= 0.0))
      throw std::invalid_argument(std::string(side) + ": negative fraction");
    sum += terms[i].fraction;
  }
  // Published coefficient lists are rounded to ~5 digits; anything further
  // off is a transcription error.
  if (std::abs(sum - 1.0) > 1e-4)
    throw std::invalid_argument(std::string(side) + ": fractions do not sum to 1");
  for (auto& t : terms) t.fraction /= sum;
}

double inverse_degree_sum(const std::vector<DegreeTerm>& terms) {
  double s = 0.0;
  for (const auto& t : terms) s += t.fraction / t.degree;
  return s;
}

std::vector<double> node_fractions(const std::vector<DegreeTerm>& terms) {
  const double s = inverse_degree_sum(terms);
  std::vector<double> out;
  for (const auto& t : terms) out.push_back(t.fraction / t.degree / s);
  return out;
}

}  // namespace

DegreeDistribution::DegreeDistribution(std::vector<DegreeTerm> lambda, std::vector<DegreeTerm> rho,
                                       std::optional<double> target_rate, std::string name)
    : lambda_(std::move(lambda)), rho_(std::move(rho)), name_(std::move(name)) {
  normalize(lambda_, "lambda");
  normalize(rho_, "rho");
  if (target_rate && std::abs(design_rate() - *target_rate) > kRateTolerance)
    throw std::invalid_argument("degree distribution: design rate misses the declared target");
}

DegreeDistribution DegreeDistribution::builtin(int id) {
  switch (id) {
    case 1:
      return DegreeDistribution(
          {{1, 2.0054e-5}, {2, 3.5776e-2}, {3, 0.39869}, {9, 8.4827e-3}, {10, 3.7701e-2},
           {19, 0.51933}},
          {{55, 0.15662}, {56, 0.84338}}, 0.9021, "code1");
    case 2:
      return DegreeDistribution(
          {{1, 1.7701e-5}, {2, 3.1579e-2}, {4, 0.46923}, {9, 7.4877e-3}, {10, 3.3278e-2},
           {19, 0.45841}},
          {{62, 1.0975e-3}, {63, 0.73267}, {64, 0.26623}}, 0.9021, "code2");
    case 3:
      return DegreeDistribution({{2, 3.2172e-2}, {3, 2.681e-3}, {4, 0.55764}, {24, 0.40751}},
                                {{58, 0.10366}, {59, 0.89634}}, 0.9021, "code3");
    default:
      throw std::invalid_argument("built-in degree distributions are 1, 2 and 3");
  }
}

double DegreeDistribution::design_rate() const {
  return 1.0 - inverse_degree_sum(rho_) / inverse_degree_sum(lambda_);
}

int DegreeDistribution::max_variable_degree() const { return lambda_.back().degree; }
int DegreeDistribution::max_check_degree() const { return rho_.back().degree; }

bool DegreeDistribution::has_variable_degree(int d) const {
  return std::any_of(lambda_.begin(), lambda_.end(),
                     [d](const DegreeTerm& t) { return t.degree == d && t.fraction > 0.0; });
}

std::vector<double> DegreeDistribution::variable_node_fractions() const {
  return node_fractions(lambda_);
}

std::vector<double> DegreeDistribution::check_node_fractions() const {
  return node_fractions(rho_);
}

DegreeDistribution DegreeDistribution::without_degree_one() const {
  std::vector<DegreeTerm> l;
  for (const auto& t : lambda_)
    if (t.degree > 1) l.push_back(t);
  double s = 0.0;
  for (const auto& t : l) s += t.fraction;
  for (auto& t : l) t.fraction /= s;
  return DegreeDistribution(std::move(l), rho_, std::nullopt, name_);
}

}  // namespace flashmmi
