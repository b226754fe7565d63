#include "lbd/kinetics.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "lbd/errors.hpp"

namespace lbd::kinetics {

int Reaction::reactant_order() const {
  int order = 0;
  for (const auto& entry : reactants) order += entry.second;
  return order;
}

void ReactionNetwork::validate() const {
  if (species <= 0) throw ValidationError("network needs a positive species count");
  for (std::size_t r = 0; r < reactions.size(); ++r) {
    const Reaction& rx = reactions[r];
    if (!(rx.rate >= 0.0))
      throw ValidationError("reaction " + std::to_string(r) + ": rate must be non-negative");
    auto check_side = [&](const std::vector<std::pair<int, int>>& side, const char* name) {
      for (const auto& [idx, st] : side) {
        if (idx < 0 || idx >= species)
          throw ValidationError("reaction " + std::to_string(r) + ": " + name +
                                " species index out of range");
        if (st <= 0)
          throw ValidationError("reaction " + std::to_string(r) + ": " + name +
                                " stoichiometry must be positive");
      }
    };
    check_side(rx.reactants, "reactant");
    check_side(rx.products, "product");
    if (rx.reactant_order() > 2)
      throw ValidationError("reaction " + std::to_string(r) +
                            ": total reactant order exceeds 2");
  }
}

Eigen::VectorXi ReactionNetwork::net_change(int r) const {
  Eigen::VectorXi d = Eigen::VectorXi::Zero(species);
  for (const auto& [idx, st] : reactions[r].reactants) d[idx] -= st;
  for (const auto& [idx, st] : reactions[r].products) d[idx] += st;
  return d;
}

PolynomialField::PolynomialField(int dim)
    : dim_(dim),
      linear_(Eigen::MatrixXd::Zero(dim, dim)),
      quad_(Eigen::MatrixXd::Zero(dim, pair_count(dim))) {}

int PolynomialField::pair_index(int j, int k) const {
  if (j > k) std::swap(j, k);
  return j * dim_ - j * (j - 1) / 2 + (k - j);
}

void PolynomialField::add_linear(int l, int j, double c) {
  linear_(l, j) += c;
  rebuild_terms();
}

void PolynomialField::add_quad(int l, int j, int k, double c) {
  quad_(l, pair_index(j, k)) += c;
  rebuild_terms();
}

void PolynomialField::rebuild_terms() {
  lin_terms_.clear();
  quad_terms_.clear();
  for (int l = 0; l < dim_; ++l)
    for (int j = 0; j < dim_; ++j)
      if (linear_(l, j) != 0.0) lin_terms_.push_back({l, j, linear_(l, j)});
  for (int l = 0; l < dim_; ++l)
    for (int j = 0; j < dim_; ++j)
      for (int k = j; k < dim_; ++k) {
        const double c = quad_(l, pair_index(j, k));
        if (c != 0.0) quad_terms_.push_back({l, j, k, c});
      }
}

void PolynomialField::eval(const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) const {
  out.setZero();
  for (const auto& t : lin_terms_) out[t.l] += t.c * z[t.j];
  for (const auto& t : quad_terms_) out[t.l] += t.c * z[t.j] * z[t.k];
}

Eigen::VectorXd PolynomialField::eval(const Eigen::VectorXd& z) const {
  Eigen::VectorXd out(dim_);
  eval(z, out);
  return out;
}

Eigen::MatrixXd PolynomialField::jacobian(const Eigen::VectorXd& z) const {
  Eigen::MatrixXd jac = linear_;
  for (const auto& t : quad_terms_) {
    if (t.j == t.k) {
      jac(t.l, t.j) += 2.0 * t.c * z[t.j];
    } else {
      jac(t.l, t.j) += t.c * z[t.k];
      jac(t.l, t.k) += t.c * z[t.j];
    }
  }
  return jac;
}

PolynomialField& PolynomialField::operator+=(const PolynomialField& other) {
  if (other.dim_ != dim_) throw ValidationError("field dimension mismatch");
  linear_ += other.linear_;
  quad_ += other.quad_;
  rebuild_terms();
  return *this;
}

Eigen::MatrixXd PolynomialField::coefficients() const {
  Eigen::MatrixXd out(dim_, dim_ + pair_count(dim_));
  out << linear_, quad_;
  return out;
}

PolynomialField mass_action_compile(const ReactionNetwork& network) {
  network.validate();
  PolynomialField field(network.species);
  for (std::size_t r = 0; r < network.reactions.size(); ++r) {
    const Reaction& rx = network.reactions[r];
    // Merge duplicate reactant entries so (A,1)+(A,1) behaves as (A,2).
    std::map<int, int> reactant_count;
    for (const auto& [idx, st] : rx.reactants) reactant_count[idx] += st;
    const int order =
        std::accumulate(reactant_count.begin(), reactant_count.end(), 0,
                        [](int a, const auto& p) { return a + p.second; });
    if (order == 0 || order > 2)
      throw ValidationError("reaction " + std::to_string(r) + ": order " +
                            std::to_string(order) +
                            " unsupported, the quadratic class covers orders 1 and 2 only");

    Eigen::VectorXi change = network.net_change(static_cast<int>(r));
    if (order == 1) {
      const int j = reactant_count.begin()->first;
      for (int l = 0; l < network.species; ++l)
        if (change[l] != 0) field.add_linear(l, j, change[l] * rx.rate);
    } else {
      int j, k;
      if (reactant_count.size() == 1) {
        j = k = reactant_count.begin()->first;  // 2A -> ... : rate term k [A]^2
      } else {
        auto it = reactant_count.begin();
        j = it->first;
        k = std::next(it)->first;
      }
      for (int l = 0; l < network.species; ++l)
        if (change[l] != 0) field.add_quad(l, j, k, change[l] * rx.rate);
    }
  }
  return field;
}

ReactionNetwork competition_network(const std::array<double, 10>& rates) {
  for (double k : rates)
    if (!(k >= 0.0)) throw ValidationError("competition network: negative rate");

  // 0-based species: Z1..Z14 are 0..13, Y is 14.
  constexpr int Z1 = 0, Z2 = 1, Z3 = 2, Z4 = 3, Z5 = 4, Z6 = 5, Z7 = 6, Z8 = 7, Z9 = 8,
                Z10 = 9, Z11 = 10, Z12 = 11, Z13 = 12, Z14 = 13, Y = kOutputSpecies;
  ReactionNetwork net;
  net.species = kCompetitionSpecies;
  net.reactions = {
      {{{Z1, 1}, {Z2, 1}}, {{Z9, 1}}, rates[0]},
      {{{Z3, 1}, {Z4, 1}}, {{Z10, 1}}, rates[1]},
      {{{Z5, 1}, {Z6, 1}}, {{Z11, 1}}, rates[2]},
      {{{Z7, 1}, {Z8, 1}}, {{Z12, 1}}, rates[3]},
      {{{Z10, 1}}, {{Y, 1}}, rates[4]},
      {{{Z11, 1}}, {{Y, 1}}, rates[5]},
      {{{Z9, 1}, {Y, 1}}, {{Z13, 1}}, rates[6]},
      {{{Z12, 1}, {Y, 1}}, {{Z14, 1}}, rates[7]},
      {{{Z13, 1}}, {{Z1, 1}, {Z2, 1}}, rates[8]},
      {{{Z14, 1}}, {{Z5, 1}, {Z6, 1}}, rates[9]},
  };
  return net;
}

namespace {

struct Fraction {
  long long num = 0;
  long long den = 1;

  static long long gcd_ll(long long a, long long b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b) {
      const long long t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = gcd_ll(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  Fraction() = default;
  Fraction(long long n) : num(n) {}
  Fraction(long long n, long long d) : num(n), den(d) { normalize(); }

  bool is_zero() const { return num == 0; }
  Fraction operator*(const Fraction& o) const { return Fraction(num * o.num, den * o.den); }
  Fraction operator-(const Fraction& o) const {
    return Fraction(num * o.den - o.num * den, den * o.den);
  }
  Fraction operator/(const Fraction& o) const { return Fraction(num * o.den, den * o.num); }
};

}  // namespace

std::vector<Eigen::VectorXi> conservation_laws(const ReactionNetwork& network) {
  network.validate();
  const int n = network.species;
  const int nr = static_cast<int>(network.reactions.size());

  // Kernel of the transposed net-change matrix, computed exactly over the
  // rationals (all entries are small integers).
  std::vector<std::vector<Fraction>> m(nr, std::vector<Fraction>(n));
  for (int r = 0; r < nr; ++r) {
    const Eigen::VectorXi d = network.net_change(r);
    for (int s = 0; s < n; ++s) m[r][s] = Fraction(d[s]);
  }

  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < n && row < nr; ++col) {
    int pr = -1;
    for (int r = row; r < nr; ++r)
      if (!m[r][col].is_zero()) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    std::swap(m[row], m[pr]);
    const Fraction inv = Fraction(1) / m[row][col];
    for (int c = col; c < n; ++c) m[row][c] = m[row][c] * inv;
    for (int r = 0; r < nr; ++r) {
      if (r == row || m[r][col].is_zero()) continue;
      const Fraction f = m[r][col];
      for (int c = col; c < n; ++c) m[r][c] = m[r][c] - f * m[row][c];
    }
    pivot_col.push_back(col);
    ++row;
  }

  std::vector<bool> is_pivot(n, false);
  for (int c : pivot_col) is_pivot[c] = true;

  std::vector<Eigen::VectorXi> basis;
  for (int fc = 0; fc < n; ++fc) {
    if (is_pivot[fc]) continue;
    // Rational kernel vector: v[fc] = 1, v[pivot_i] = -m(i, fc).
    std::vector<Fraction> v(n);
    v[fc] = Fraction(1);
    for (std::size_t i = 0; i < pivot_col.size(); ++i)
      v[pivot_col[i]] = Fraction(0) - m[static_cast<int>(i)][fc];

    long long lcm = 1;
    for (const auto& f : v) lcm = lcm / Fraction::gcd_ll(lcm, f.den) * f.den;
    Eigen::VectorXi vi(n);
    for (int s = 0; s < n; ++s) vi[s] = static_cast<int>(v[s].num * (lcm / v[s].den));
    long long g = 0;
    for (int s = 0; s < n; ++s) g = Fraction::gcd_ll(g, vi[s]);
    if (g > 1) vi /= static_cast<int>(g);
    for (int s = 0; s < n; ++s) {
      if (vi[s] == 0) continue;
      if (vi[s] < 0) vi = -vi;
      break;
    }
    basis.push_back(std::move(vi));
  }
  return basis;
}

nlohmann::json network_to_json(const ReactionNetwork& network) {
  nlohmann::json j;
  j["species"] = network.species;
  j["reactions"] = nlohmann::json::array();
  for (const auto& rx : network.reactions) {
    nlohmann::json r;
    r["reactants"] = nlohmann::json::array();
    for (const auto& [idx, st] : rx.reactants) r["reactants"].push_back({idx, st});
    r["products"] = nlohmann::json::array();
    for (const auto& [idx, st] : rx.products) r["products"].push_back({idx, st});
    r["rate"] = rx.rate;
    j["reactions"].push_back(std::move(r));
  }
  return j;
}

ReactionNetwork network_from_json(const nlohmann::json& j) {
  ReactionNetwork net;
  net.species = j.at("species").get<int>();
  for (const auto& r : j.at("reactions")) {
    Reaction rx;
    for (const auto& p : r.at("reactants"))
      rx.reactants.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    for (const auto& p : r.at("products"))
      rx.products.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    rx.rate = r.at("rate").get<double>();
    net.reactions.push_back(std::move(rx));
  }
  net.validate();
  return net;
}

nlohmann::json field_to_json(const PolynomialField& field) {
  const int n = field.dim();
  nlohmann::json j;
  j["dim"] = n;
  std::vector<double> lin;
  lin.reserve(n * n);
  for (int l = 0; l < n; ++l)
    for (int c = 0; c < n; ++c) lin.push_back(field.linear(l, c));
  j["linear"] = lin;
  nlohmann::json q = nlohmann::json::array();
  for (int l = 0; l < n; ++l)
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        const double c = field.quad(l, a, b);
        if (c != 0.0) q.push_back({l, a, b, c});
      }
  j["quadratic"] = std::move(q);
  return j;
}

PolynomialField field_from_json(const nlohmann::json& j) {
  const int n = j.at("dim").get<int>();
  PolynomialField f(n);
  const auto& lin = j.at("linear");
  if (static_cast<int>(lin.size()) != n * n)
    throw ValidationError("field JSON: linear block must hold dim*dim values");
  for (int l = 0; l < n; ++l)
    for (int c = 0; c < n; ++c) {
      const double v = lin[l * n + c].get<double>();
      if (v != 0.0) f.add_linear(l, c, v);
    }
  for (const auto& q : j.at("quadratic"))
    f.add_quad(q.at(0).get<int>(), q.at(1).get<int>(), q.at(2).get<int>(), q.at(3).get<double>());
  return f;
}

}  // namespace lbd::kinetics
