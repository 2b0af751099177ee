#include "cfmimo/pn_sequence.hpp"

#include <cmath>
#include <string>

namespace cfmimo {

double PnSequence::bipolar(int n) const { return chips[n] > 0.0 ? 1.0 : -1.0; }

std::uint32_t primitive_polynomial(int n) {
  switch (n) {
    case 2: return 0x3;    // x^2 + x + 1
    case 3: return 0x3;    // x^3 + x + 1
    case 4: return 0x3;    // x^4 + x + 1
    case 5: return 0x5;    // x^5 + x^2 + 1
    case 6: return 0x3;    // x^6 + x + 1
    case 7: return 0x3;    // x^7 + x + 1
    case 8: return 0x1D;   // x^8 + x^4 + x^3 + x^2 + 1
    case 9: return 0x11;   // x^9 + x^4 + 1
    case 10: return 0x9;   // x^10 + x^3 + 1
    default: throw SequenceError("no primitive polynomial tabulated for n = " + std::to_string(n));
  }
}

PnSequence gen_mseq(int n, std::uint32_t poly, int shift) {
  if (n < 2 || n > 10) throw SequenceError("register length must lie in [2, 10]");
  if ((poly & 1u) == 0 || poly >= (1u << n)) throw SequenceError("polynomial mask does not match degree");
  const int period = (1 << n) - 1;

  std::vector<int> bits(period);
  std::uint32_t state = 1;  // bit i holds a[k + i]
  const std::uint32_t initial = state;
  for (int k = 0; k < period; ++k) {
    bits[k] = static_cast<int>(state & 1u);
    const std::uint32_t feedback = static_cast<std::uint32_t>(__builtin_parity(state & poly));
    state = (state >> 1) | (feedback << (n - 1));
    if (state == initial && k + 1 < period) {
      throw SequenceError("polynomial is not primitive (period " + std::to_string(k + 1) + ")");
    }
  }
  if (state != initial) throw SequenceError("polynomial is not primitive");

  PnSequence out;
  out.register_length = n;
  out.shift = ((shift % period) + period) % period;
  out.chips.resize(period);
  const double amp = 1.0 / std::sqrt(static_cast<double>(period));
  for (int k = 0; k < period; ++k) out.chips[k] = bits[(k + out.shift) % period] ? -amp : amp;
  return out;
}

int register_length_for(int N) {
  for (int n = 2; n <= 10; ++n) {
    if ((1 << n) - 1 == N) return n;
  }
  return 0;
}

PnSequence device_sequence(int N, int device) {
  if (N == 1) {
    PnSequence out;
    out.chips = {1.0};
    return out;
  }
  const int n = register_length_for(N);
  if (n == 0) throw SequenceError("N = " + std::to_string(N) + " is not an m-sequence length");
  return gen_mseq(n, primitive_polynomial(n), device % N);
}

int nearest_sequence_length(double target) {
  int best = 1;
  for (int n = 2; n <= 10; ++n) {
    const int len = (1 << n) - 1;
    if (std::abs(len - target) < std::abs(best - target)) best = len;
  }
  return best;
}

double cyclic_correlation(const PnSequence& a, const PnSequence& b, int lag) {
  const int N = a.length();
  double acc = 0.0;
  for (int n = 0; n < N; ++n) acc += a.chips[n] * b.chips[(n + lag % N + N) % N];
  return acc;
}

}  // namespace cfmimo
