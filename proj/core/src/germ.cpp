#include "folsing/germ.hpp"

#include <algorithm>

#include "folsing/errors.hpp"
#include "folsing/exact_linalg.hpp"

namespace folsing {

namespace {

std::size_t monomial_count(int vars, int low, int high) {
  std::size_t total = 0;
  for (int d = low; d <= high; ++d) total += monomials_of_degree(vars, d).size();
  return total;
}

}  // namespace

JetIdeal jacobian_ideal(const TruncatedPoly& f) {
  std::vector<TruncatedPoly> gens;
  for (int i = 0; i < f.ring().vars; ++i) {
    auto d = partial_derivative(f, i);
    if (!d.is_zero()) gens.push_back(std::move(d));
  }
  return JetIdeal(f.ring(), std::move(gens));
}

int default_working_order(const TruncatedPoly& f) { return 2 * std::max(f.degree(), 0) + 4; }

bool is_singular(const TruncatedPoly& f) {
  for (int i = 0; i < f.ring().vars; ++i) {
    if (f.coefficient(Monomial::variable(f.ring().vars, i)) != 0) return false;
  }
  return true;
}

JacobianCodim jacobian_codim(const TruncatedPoly& f, int working_order) {
  if (working_order < 2) throw InputError("jacobian_codim: working order must be >= 2");
  const auto lifted = f.with_order(working_order);
  const auto jac = jacobian_ideal(lifted);
  const int n = f.ring().vars;

  JacobianCodim out;
  out.working_order = working_order;
  out.sequence.push_back(0);  // c_1 = dim m/m
  if (!jac.is_proper()) {
    // J(f) is the unit ideal, so J(f) + m^j = E for all j.
    out.sequence.push_back(0);
    out.value = 0;
    return out;
  }
  for (int j = 2; j <= working_order; ++j) {
    const std::size_t quotient = monomial_count(n, 1, j - 1);
    const std::size_t inside = ideal_subspace_dimension(jac, j - 1);
    const std::size_t c = quotient - inside;
    const std::size_t previous = out.sequence.back();
    out.sequence.push_back(c);
    if (c == previous) {
      out.value = c;
      return out;
    }
  }
  return out;
}

JacobianCodim jacobian_codim(const TruncatedPoly& f) { return jacobian_codim(f, default_working_order(f)); }

std::optional<std::size_t> determinacy_bound(const TruncatedPoly& f, int working_order) {
  auto codim = jacobian_codim(f, working_order);
  if (!codim.value) return std::nullopt;
  return *codim.value + 2;
}

std::optional<std::size_t> determinacy_bound(const TruncatedPoly& f) {
  return determinacy_bound(f, default_working_order(f));
}

ZkPaths zk_paths(const TruncatedPoly& z, int k) {
  if (k < 2) throw PreconditionError("Z^k is defined for k >= 2");
  if (!is_singular(z)) throw PreconditionError("Z^k consists of singular jets; the jet has a linear part");
  const int n = z.ring().vars;
  const auto jet = z.with_order(k);

  ZkPaths out;

  // Path 1: explicit spanning set of (J + m^k)/m^k against monomials of
  // degree 1..k-1.
  const auto columns = monomials_up_to(n, k - 1);
  std::map<Monomial, std::size_t> index;
  for (std::size_t c = 1; c < columns.size(); ++c) index.emplace(columns[c], c - 1);
  std::vector<RationalRow> rows;
  for (int i = 0; i < n; ++i) {
    const auto d = partial_derivative(jet, i);
    for (const auto& alpha : monomials_up_to(n, k - 2)) {
      RationalRow row(index.size());
      bool nonzero = false;
      for (const auto& [m, c] : d.terms()) {
        auto product = m * alpha;
        if (product.degree() > k - 1 || product.degree() == 0) continue;
        row[index.at(product)] += c;
        nonzero = true;
      }
      if (nonzero) rows.push_back(std::move(row));
    }
  }
  out.span_dimension = bareiss_rank(rows);
  const std::size_t quotient = index.size();
  const std::size_t deficit = static_cast<std::size_t>(k - 2);
  out.threshold = quotient >= deficit ? quotient - deficit : 0;
  out.by_dimension = out.span_dimension < out.threshold;

  // Path 2: stabilized quotient at working order k.
  out.codim = jacobian_codim(jet, k);
  out.by_codim = !out.codim.value || *out.codim.value > deficit;
  return out;
}

bool zk_membership(const TruncatedPoly& z, int k) {
  const auto paths = zk_paths(z, k);
  if (paths.by_dimension != paths.by_codim) {
    throw InvariantViolation("zk_membership: dimension test and stabilized codimension disagree");
  }
  return paths.by_dimension;
}

bool isolated_certificate(const TruncatedPoly& f, int working_order) {
  return jacobian_codim(f, working_order).finite();
}

bool isolated_certificate(const TruncatedPoly& f) { return isolated_certificate(f, default_working_order(f)); }

GermReport germ_report(const TruncatedPoly& f, int working_order, int max_k) {
  GermReport report;
  report.jacobian_codim = jacobian_codim(f, working_order);
  if (report.jacobian_codim.value) report.determinacy_bound = *report.jacobian_codim.value + 2;
  report.isolated_certified = report.jacobian_codim.finite();
  if (is_singular(f)) {
    for (int k = 2; k <= max_k; ++k) report.zk_flags[k] = zk_membership(f, k);
  }
  return report;
}

}  // namespace folsing
