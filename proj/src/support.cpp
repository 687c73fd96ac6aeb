#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "lyap/errors.hpp"
#include "lyap/parallel.hpp"
#include "lyap/rng.hpp"

namespace lyap {

namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

InvalidRadius::InvalidRadius(double r) : LyapError("InvalidRadius: radius must be positive, got " + fmt_double(r)) {}

CloudTooLarge::CloudTooLarge(std::size_t size)
    : LyapError("CloudTooLarge: chain metric supports at most 5000 points, got " + std::to_string(size)) {}

EmptyBowenSample::EmptyBowenSample(int n, double delta)
    : LyapError("EmptyBowenSample: no candidate survived the Bowen filter at n=" + std::to_string(n) +
                " (delta=" + fmt_double(delta) + ")"),
      n_(n),
      delta_(delta) {}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

SeededStream::SeededStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ (stream * 0xD1342543DE82EF95ULL + 1))) {}

double SeededStream::log_uniform(double lo, double hi) {
  const double a = std::log(lo);
  return std::exp(a + (std::log(hi) - a) * uniform());
}

unsigned thread_limit() {
  if (const char* env = std::getenv("LYAP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace lyap
