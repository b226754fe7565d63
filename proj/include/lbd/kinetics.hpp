#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace lbd::kinetics {

/// One reaction: reactants -> products at a non-negative rate.
/// Entries are (species index, stoichiometry).
struct Reaction {
  std::vector<std::pair<int, int>> reactants;
  std::vector<std::pair<int, int>> products;
  double rate = 0.0;

  int reactant_order() const;
};

struct ReactionNetwork {
  int species = 0;
  std::vector<Reaction> reactions;

  /// Throws ValidationError when indices, stoichiometries or rates are invalid.
  void validate() const;

  /// Net stoichiometric change per species for reaction r.
  Eigen::VectorXi net_change(int r) const;
};

/// Quadratic vector field F_l(z) = sum_j linear(l,j) z_j + sum_{j<=k} quad(l,jk) z_j z_k.
/// Quadratic coefficients are stored once per monomial with the canonical
/// ordering j <= k; theta_{j,k} and theta_{k,j} are the same parameter.
class PolynomialField {
 public:
  PolynomialField() = default;
  explicit PolynomialField(int dim);

  int dim() const { return dim_; }
  static int pair_count(int dim) { return dim * (dim + 1) / 2; }
  /// Column index of the canonical monomial z_j z_k, j <= k.
  int pair_index(int j, int k) const;

  double linear(int l, int j) const { return linear_(l, j); }
  double quad(int l, int j, int k) const { return quad_(l, pair_index(j, k)); }
  const Eigen::MatrixXd& linear_matrix() const { return linear_; }
  const Eigen::MatrixXd& quad_matrix() const { return quad_; }

  void add_linear(int l, int j, double c);
  void add_quad(int l, int j, int k, double c);

  void eval(const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd eval(const Eigen::VectorXd& z) const;

  /// d F / d z at z (analytic).
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& z) const;

  PolynomialField& operator+=(const PolynomialField& other);
  friend PolynomialField operator+(PolynomialField a, const PolynomialField& b) {
    a += b;
    return a;
  }

  /// True where the coefficient is nonzero; layout [linear | quad] per row.
  Eigen::MatrixXd coefficients() const;

 private:
  void rebuild_terms();

  int dim_ = 0;
  Eigen::MatrixXd linear_;  // dim x dim
  Eigen::MatrixXd quad_;    // dim x pair_count

  struct LinTerm {
    int l, j;
    double c;
  };
  struct QuadTerm {
    int l, j, k;
    double c;
  };
  std::vector<LinTerm> lin_terms_;
  std::vector<QuadTerm> quad_terms_;
};

/// Law of mass action: each reaction contributes (net change) x rate x
/// (product of reactant concentrations to their stoichiometries).
/// Only orders 1 and 2 land in the quadratic class; anything else throws.
PolynomialField mass_action_compile(const ReactionNetwork& network);

/// The 15-species, 10-reaction benchmark network. Species 0..13 are Z1..Z14
/// and species 14 is the controlled output Y.
ReactionNetwork competition_network(const std::array<double, 10>& rates);

inline constexpr int kCompetitionSpecies = 15;
inline constexpr int kOutputSpecies = 14;  // Y

/// Integer basis of the left null space of the net-change matrix: every
/// returned v keeps v . z constant along any trajectory of the network.
std::vector<Eigen::VectorXi> conservation_laws(const ReactionNetwork& network);

nlohmann::json network_to_json(const ReactionNetwork& network);
ReactionNetwork network_from_json(const nlohmann::json& j);
nlohmann::json field_to_json(const PolynomialField& field);
PolynomialField field_from_json(const nlohmann::json& j);

}  // namespace lbd::kinetics
