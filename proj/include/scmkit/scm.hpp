#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "scmkit/expr.hpp"
#include "scmkit/graph.hpp"
#include "scmkit/rational.hpp"

namespace scmkit {

using Atom = std::variant<std::int64_t, std::string>;
std::string atom_to_string(const Atom& a);

struct FiniteDomain {
  std::vector<Atom> values;

  std::size_t size() const { return values.size(); }
  std::optional<std::uint32_t> find(const Atom& a) const;
  std::uint32_t index_of(const Atom& a) const;  // throws
  bool operator==(const FiniteDomain&) const = default;
};

FiniteDomain int_domain(std::int64_t lo, std::int64_t hi);
FiniteDomain int_domain(std::initializer_list<std::int64_t> values);

struct VarRef {
  enum class Kind { endogenous, exogenous };
  Kind kind = Kind::endogenous;
  std::size_t index = 0;

  bool endo() const { return kind == Kind::endogenous; }
  auto operator<=>(const VarRef&) const = default;
};

inline VarRef endo_ref(std::size_t i) { return {VarRef::Kind::endogenous, i}; }
inline VarRef exo_ref(std::size_t j) { return {VarRef::Kind::exogenous, j}; }

// Lookup table over the product of the argument domains, first argument
// slowest. Entries are value indices into the target domain.
struct TabularMechanism {
  std::vector<VarRef> args;
  std::vector<std::uint32_t> table;
  ExprPtr expr;  // optional source form
};

struct EndogenousVar {
  std::string name;
  FiniteDomain domain;
};

struct ExogenousVar {
  std::string name;
  FiniteDomain domain;
  std::vector<Rational> probs;

  std::vector<std::uint32_t> support() const;
};

// Value assignment by value index, one slot per endogenous / exogenous var.
using Config = std::vector<std::uint32_t>;

struct FiniteScm {
  std::vector<EndogenousVar> endogenous;
  std::vector<ExogenousVar> exogenous;
  std::vector<TabularMechanism> mechanisms;

  std::size_t num_endo() const { return endogenous.size(); }
  std::size_t num_exo() const { return exogenous.size(); }
  std::size_t endo_index(const std::string& name) const;  // throws UnknownName
  std::size_t exo_index(const std::string& name) const;
  std::optional<VarRef> find(const std::string& name) const;
  const std::string& name(VarRef v) const;
  const FiniteDomain& domain(VarRef v) const;

  // f_k(x, e) as a value index.
  std::uint32_t eval(std::size_t k, const Config& x, const Config& e) const;
};

// Append / build a mechanism by tabulating fn over the argument product.
TabularMechanism tabulate(const FiniteScm& m, std::vector<VarRef> args,
                          const std::function<std::uint32_t(const std::vector<std::uint32_t>&)>& fn);

std::size_t table_size(const FiniteScm& m, const std::vector<VarRef>& args);

struct GaussianBlock {
  std::string name;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
};

struct LinearScm {
  std::vector<std::string> endogenous;
  std::vector<GaussianBlock> blocks;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Gamma;
  Eigen::VectorXd c;

  std::size_t num_endo() const { return endogenous.size(); }
  std::size_t exo_dim() const;
  std::size_t block_offset(std::size_t b) const;
  std::size_t block_of_coordinate(std::size_t coord) const;
  std::vector<std::string> coordinate_names() const;  // E, or E[i] for wide blocks
  Eigen::VectorXd exo_mean() const;
  Eigen::MatrixXd exo_cov() const;
  std::size_t endo_index(const std::string& name) const;
  std::size_t block_index(const std::string& name) const;
};

// Sized zero matrices for n endogenous variables and the given blocks.
LinearScm make_linear(std::vector<std::string> endogenous, std::vector<GaussianBlock> blocks);

using Scm = std::variant<FiniteScm, LinearScm>;

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const FiniteScm& m);
ValidationReport validate(const LinearScm& m);
// Throws InvalidArgument listing the violations.
void require_valid(const FiniteScm& m);
void require_valid(const LinearScm& m);

bool mechanisms_equivalent(const FiniteScm& m1, const FiniteScm& m2);

std::vector<VarRef> functional_parents(const FiniteScm& m, std::size_t k);
// Exogenous refs index blocks.
std::vector<VarRef> functional_parents(const LinearScm& m, std::size_t k);

MixedGraph augmented_graph(const FiniteScm& m);
MixedGraph augmented_graph(const LinearScm& m);
MixedGraph functional_graph(const FiniteScm& m);
MixedGraph functional_graph(const LinearScm& m);

FiniteScm canonicalize(const FiniteScm& m);
LinearScm canonicalize(const LinearScm& m);

// Cartesian product of per-slot choice lists, first slot slowest. An empty
// choice list makes the product empty; zero slots give one empty tuple.
class Product {
 public:
  explicit Product(std::vector<std::vector<std::uint32_t>> choices);
  const std::vector<std::uint32_t>& values() const { return values_; }
  bool done() const { return done_; }
  void next();

 private:
  std::vector<std::vector<std::uint32_t>> choices_;
  std::vector<std::size_t> pos_;
  std::vector<std::uint32_t> values_;
  bool done_ = false;
};

// Value indices of a variable: the whole domain, or for exogenous variables
// only the support when support_only is set.
std::vector<std::uint32_t> choices_of(const FiniteScm& m, VarRef v, bool support_only);

}  // namespace scmkit
