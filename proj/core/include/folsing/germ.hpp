#pragma once

// Jacobian ideals of function germs: codimension, determinacy, the Z^k
// membership test and isolated-singularity certificates.

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "folsing/jetring.hpp"

namespace folsing {

/// J(f) = (D_1 f, ..., D_n f) in the ring of f.
JetIdeal jacobian_ideal(const TruncatedPoly& f);

/// Result of the stabilized-quotient computation of dim m / J(f).
struct JacobianCodim {
  /// Exact codimension, or nullopt for "infinite-at-order-W": not certified
  /// finite within the working order (never a claim of true infinitude).
  std::optional<std::size_t> value;
  int working_order = 0;
  /// c_j = dim m / (J(f) + m^j) for j = 1, 2, ... as far as computed.
  std::vector<std::size_t> sequence;

  bool finite() const noexcept { return value.has_value(); }
};

/// Working order used when the caller does not pick one: 2 deg(f) + 4.
int default_working_order(const TruncatedPoly& f);

/// Computes c_j for j = 1..W and stops at the first r <= W-1 with
/// c_r = c_(r+1); then m^r lies in J(f) and c_r is the codimension.
/// f is treated as the polynomial it stores. Requires W >= 2.
JacobianCodim jacobian_codim(const TruncatedPoly& f, int working_order);
JacobianCodim jacobian_codim(const TruncatedPoly& f);

/// codim + 2 when the codimension is finite.
std::optional<std::size_t> determinacy_bound(const TruncatedPoly& f);
std::optional<std::size_t> determinacy_bound(const TruncatedPoly& f, int working_order);

/// Both evaluations of "codim J(z) > k - 2" for a singular k-jet z.
struct ZkPaths {
  /// dim span{ x^alpha D_i z mod m^k : |alpha| <= k-2 }.
  std::size_t span_dimension = 0;
  /// dim(m / m^k) - (k - 2).
  std::size_t threshold = 0;
  bool by_dimension = false;
  /// Stabilized-quotient codimension at working order k.
  JacobianCodim codim;
  bool by_codim = false;
};

/// Singular: no linear terms.
bool is_singular(const TruncatedPoly& f);

/// Both paths, no agreement check. Throws PreconditionError for a
/// nonsingular jet or k < 2.
ZkPaths zk_paths(const TruncatedPoly& z, int k);

/// z lies in Z^k. Throws InvariantViolation if the two paths disagree.
bool zk_membership(const TruncatedPoly& z, int k);

/// True iff the codimension is certified finite, which makes 0 an isolated
/// singularity. False means "not certified".
bool isolated_certificate(const TruncatedPoly& f);
bool isolated_certificate(const TruncatedPoly& f, int working_order);

struct GermReport {
  JacobianCodim jacobian_codim;
  std::optional<std::size_t> determinacy_bound;
  bool isolated_certified = false;
  /// Z^k membership for k = 2..max_k (singular germs only).
  std::map<int, bool> zk_flags;
};

GermReport germ_report(const TruncatedPoly& f, int working_order, int max_k);

}  // namespace folsing
