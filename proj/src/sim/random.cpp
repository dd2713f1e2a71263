#include "manet/sim/random.hpp"

#include <cmath>
#include <string>

#include "manet/error.hpp"

namespace manet::sim {

double RandomStream::exponential(double rate) {
  if (!(rate > 0.0)) {
    throw NonPositiveRate("exponential rate must be positive, got " +
                          std::to_string(rate));
  }
  // Inversion on 1-u keeps the argument of log in (0, 1].
  return -std::log1p(-uniform01()) / rate;
}

}  // namespace manet::sim
