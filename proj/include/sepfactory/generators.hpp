#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sepfactory/bipartite.hpp"
#include "sepfactory/cholesky.hpp"
#include "sepfactory/rng.hpp"

namespace sepfactory {

enum class GeneratorKind { Example1, Example2, RandomSsppt, RandomDensity, MaximallyEntangled };

const char* to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(const std::string& name);

/// Everything a generator needs; identical specs produce bit-identical output.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::RandomSsppt;
  Index dim_a = 2;   // n for example1, d for maximally_entangled, fixed to 2 for example2
  Index dim_b = 2;
  std::uint64_t seed = 0;
  Index rank = 0;          // random_density; 0 means full rank
  bool aligned = false;    // example2: draw rho_11, D, T diagonal in one basis
};

struct GeneratedState {
  BipartiteOperator rho;
  std::optional<CholeskyCertificate> cert;
};

GeneratedState generate(const GeneratorSpec& spec);

/// Haar unitary: QR of a Ginibre matrix with R's diagonal phases absorbed into Q.
cmat random_unitary(Index d, Rng& rng);

/// U diag(z) U^dagger with complex Gaussian z.
cmat random_normal(Index d, Rng& rng);

/// Random contraction with operator norm drawn uniformly from [lo, hi].
cmat random_contraction(Index d, Rng& rng, double lo = 0.2, double hi = 1.0);

/// sum_{j=i+1}^{n} 4^{-j}, summed term by term.
double geometric_tail(int i, int n);

/// The n -> infinity limit 4^{-i} / 3.
double geometric_tail_limit(int i);

struct Example1 {
  BipartiteOperator rho;
  CholeskyCertificate cert;
};

/// n rows, S_ij = S_i / 2^j (1-based j) with S_i normal. X_i are rescaled so
/// sum Tr(X_i^dagger X_i) = 1/2 and each S_i so that row i carries
/// off-diagonal mass proportional to Tr(X_i^dagger X_i), totalling 1/2.
/// For n = 1 the single X_1 is scaled to unit trace.
Example1 example1_state(Index n, Index dim_b, std::uint64_t seed);

/// The two-block state with rho_22 = sqrt(rho_11) D D^dagger sqrt(rho_11) and
/// rho_12 = sqrt(rho_11) T rho_22^(1/2), normalized by Tr(rho_11 + rho_22).
BipartiteOperator example2_state(const cmat& rho11, const cmat& d, const cmat& t);

/// Draws rho_11, D and T for example2_state.
BipartiteOperator random_example2(Index dim_b, std::uint64_t seed, bool aligned = false);

struct RandomSsppt {
  BipartiteOperator rho;
  CholeskyCertificate cert;  // Tr(X^dagger X) = 1
};

/// Per row k: one unitary V_k and S_kj = V_k D_kj V_k^dagger with diagonal D_kj.
RandomSsppt random_semi_ssppt(Index dim_a, Index dim_b, std::uint64_t seed);

/// G G^dagger / Tr with G a dimA*dimB x rank Ginibre matrix (rank 0 = full).
BipartiteOperator random_density(Index dim_a, Index dim_b, Index rank, std::uint64_t seed);

/// |Phi><Phi| with |Phi> = sum_i |ii> / sqrt(d).
BipartiteOperator maximally_entangled(Index d);

}  // namespace sepfactory
