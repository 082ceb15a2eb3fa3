#include <stls/model.hpp>

#include <stls/error.hpp>
#include <stls/linalg.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace stls {

FixedMask FixedMask::from_indicator(const Matrix& mask) {
  FixedMask out;
  for (Index j = 0; j < mask.cols(); ++j)
    for (Index i = 0; i < mask.rows(); ++i)
      if (mask(i, j) != 0.0) out.entries.push_back({i, j, 0.0});
  return out;
}

std::string ErrorStructure::name() const {
  struct Visitor {
    std::string operator()(const Unconstrained&) const { return "none"; }
    std::string operator()(const FixedMask&) const { return "mask"; }
    std::string operator()(const Toeplitz&) const { return "toeplitz"; }
    std::string operator()(const GeneralLinear&) const { return "linear"; }
  };
  return std::visit(Visitor{}, kind_);
}

StlsProblem StlsProblem::make(Matrix a_bar, ErrorStructure structure) {
  StlsProblem p;
  p.weights = Matrix::Ones(a_bar.rows(), a_bar.cols());
  p.target_rank = a_bar.cols() - 1;
  p.a_bar = std::move(a_bar);
  p.structure = std::move(structure);
  return p;
}

namespace {

void check_structure(const ErrorStructure& s, Index m, Index n,
                     std::vector<std::string>& out) {
  if (const auto* mask = std::get_if<FixedMask>(&s.kind())) {
    std::map<std::pair<Index, Index>, double> seen;
    for (const auto& e : mask->entries) {
      if (e.row < 0 || e.row >= m || e.col < 0 || e.col >= n) {
        std::ostringstream os;
        os << "index out of range: (" << e.row << "," << e.col << ") for "
           << m << "x" << n << " matrix";
        out.push_back(os.str());
        continue;
      }
      if (!std::isfinite(e.value)) {
        out.push_back("non-finite fixed value");
        continue;
      }
      auto [it, inserted] = seen.emplace(std::pair{e.row, e.col}, e.value);
      if (!inserted && it->second != e.value) {
        std::ostringstream os;
        os << "conflicting fixed values at (" << e.row << "," << e.col << ")";
        out.push_back(os.str());
      }
    }
  } else if (const auto* lin = std::get_if<GeneralLinear>(&s.kind())) {
    for (std::size_t i = 0; i < lin->constraints.size(); ++i) {
      const auto& c = lin->constraints[i];
      if (c.l.rows() != m || c.l.cols() != n) {
        std::ostringstream os;
        os << "constraint " << i << " is " << c.l.rows() << "x" << c.l.cols()
           << ", expected " << m << "x" << n;
        out.push_back(os.str());
      } else if (!all_finite(c.l) || !std::isfinite(c.b)) {
        std::ostringstream os;
        os << "constraint " << i << " has non-finite entries";
        out.push_back(os.str());
      }
    }
  }
}

}  // namespace

const StlsProblem& validate_problem(const StlsProblem& p) {
  std::vector<std::string> v;
  const Index m = p.rows(), n = p.cols();
  if (m < n) v.push_back("M >= N required");
  if (n < 2) v.push_back("N >= 2 required");
  if (!all_finite(p.a_bar)) v.push_back("a_bar has non-finite entries");
  if (p.weights.rows() != m || p.weights.cols() != n) {
    std::ostringstream os;
    os << "dimension mismatch: weights are " << p.weights.rows() << "x"
       << p.weights.cols() << ", a_bar is " << m << "x" << n;
    v.push_back(os.str());
  } else if (!all_finite(p.weights) || (p.weights.array() < 0.0).any()) {
    v.push_back("negative or non-finite weight");
  }
  if (p.target_rank < 1 || p.target_rank > n - 1) {
    std::ostringstream os;
    os << "target_rank " << p.target_rank << " out of range [1, " << n - 1
       << "]";
    v.push_back(os.str());
  }
  check_structure(p.structure, m, n, v);
  if (!v.empty()) throw ValidationError(std::move(v));
  return p;
}

double relative_error(const Matrix& a_bar, const Matrix& a_hat) {
  const Vector s = singular_values(a_bar);
  const double smallest = s(s.size() - 1);
  const double cutoff = 10.0 * std::numeric_limits<double>::epsilon() *
                        static_cast<double>(std::max(a_bar.rows(), a_bar.cols())) *
                        s(0);
  if (!(smallest > cutoff))
    throw Error(ErrorCategory::degenerate,
                "degenerate baseline: A_bar is already rank-deficient");
  return (a_bar - a_hat).norm() / smallest;
}

double relative_error(const StlsProblem& p, const StlsSolution& sol) {
  return relative_error(p.a_bar, sol.a_hat);
}

}  // namespace stls
