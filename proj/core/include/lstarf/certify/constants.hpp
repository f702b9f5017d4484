#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace lstarf::certify {

/// One evaluated constant with enough provenance to re-derive it.
struct Constant {
  std::string name;
  std::string formula;
  std::vector<std::pair<std::string, double>> inputs;
  double value;
};

/// max{r + ceil(3k/2), 2k}: the smallest RIP index that bounds both
/// cross-block inner products for the best choice of block split.
int mn_min_max(int r, int k);

/// Same quantity by enumerating every split m1 + m2 = n1 + n2 = r.
/// Throws ArgumentError when r > 64 (enumeration budget).
int mn_min_max_bruteforce(int r, int k);

/// Block split (m1, m2, n1, n2) attaining mn_min_max(r, k), from the explicit
/// construction (odd/even k cases, or m2 = n2 = 0 when k >= 2r). Falls back to
/// the enumeration argmin if the construction leaves the feasible set.
std::array<int, 4> optimal_block_split(int r, int k);

struct ConstrainedBoundParams {
  int r = 1;
  /// Block size, >= 2.
  int k = 2;
  /// delta_{2r+k}
  double delta_2r_plus_k = 0.0;
  /// delta at index max{r + ceil(3k/2), 2k}
  double delta_big = 0.0;
  double epsilon = 0.0;
};

struct ConstrainedConstants {
  double beta = 0.0;
  /// Present only when beta < 1.
  std::optional<double> alpha;
  std::optional<double> alpha_bar;
  bool hypothesis_ok = false;
  std::vector<Constant> provenance;
};

/// beta = sqrt(2) delta_big (sqrt(2r)+1) / ((1 - delta_{2r+k}) (sqrt(k)-1))
/// alpha = (2(sqrt(2r)+1) + 2 beta (sqrt(k)-1)) / ((sqrt(k)-1)(1-beta)(sqrt(2r)+1))
/// alpha_bar = 2(sqrt(k)+sqrt(2r)) sqrt(1+delta_{2r+k}) / ((sqrt(k)-1)(1-beta)(1-delta_{2r+k}))
ConstrainedConstants constrained_constants(const ConstrainedBoundParams& p);

/// (sqrt(2r)-1) / (sqrt(2r)-1 + sqrt(2)(sqrt(2r)+1)), the delta_{4r} threshold
/// obtained with k = 2r.
double delta4r_threshold(int r);

/// (2 + (2 sqrt(2) - 2) delta) / ((sqrt(2r)-1) - [(sqrt(2r)-1) + sqrt(2)(sqrt(2r)+1)] delta);
/// empty when delta is not below delta4r_threshold(r).
std::optional<double> alpha_hat(int r, double delta_4r);

struct RegularizedConstants {
  int t = 2;
  int k = 6;
  double delta_tk = 0.0;
  double eta = 0.0;
  double theta_k = 0.0;
  double threshold = 0.0;
  double beta1 = 0.0;
  double gamma1 = 0.0;
  double beta1_hat = 0.0;
  double gamma1_hat = 0.0;
  double xi1 = 0.0;
  double kappa1 = 0.0;
  /// Present only when beta1 < 1 and kappa1 > 0.
  std::optional<double> c1;
  std::optional<double> c2;
  bool hypothesis_ok = false;
  std::vector<Constant> provenance;
};

/// Constants of the regularized recovery bound ||X* - X||_F <= C1 ||X||_* + C2 lambda.
/// Requires t > 1, k >= 6, delta_tk in [0, 1), eta = epsilon / lambda >= 0.
RegularizedConstants regularized_constants(int t, int k, double delta_tk, double eta);

}  // namespace lstarf::certify
