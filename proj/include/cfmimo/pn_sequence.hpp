#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cfmimo {

class SequenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One cyclic shift of an m-sequence, chips normalized to +-1/sqrt(N).
struct PnSequence {
  std::vector<double> chips;
  int register_length = 0;
  int shift = 0;

  int length() const { return static_cast<int>(chips.size()); }
  /// Unit-magnitude chip (+1/-1) at index n.
  double bipolar(int n) const;
};

/// Primitive polynomial of degree n as a bit mask: bit i set means the x^i
/// term is present, for i < n (x^n implied).
std::uint32_t primitive_polynomial(int n);

/// LFSR recurrence a[k+n] = sum_i c_i a[k+i] mod 2, seeded with 1, 0, ..., 0.
PnSequence gen_mseq(int n, std::uint32_t poly, int shift);

/// Code family used for N devices: N = 1 gives the trivial chip [1];
/// otherwise N must be 2^n - 1 with 2 <= n <= 10.
PnSequence device_sequence(int N, int device);

/// Register length n with 2^n - 1 == N, or 0 if N is not of that form.
int register_length_for(int N);

/// Supported lengths (1, 3, 7, ..., 1023) closest to `target`; ties go to the shorter.
int nearest_sequence_length(double target);

/// Cyclic correlation sum_n a[n] b[(n + lag) mod N] of the normalized chips.
double cyclic_correlation(const PnSequence& a, const PnSequence& b, int lag);

}  // namespace cfmimo
