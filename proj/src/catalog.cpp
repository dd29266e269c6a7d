#include "dynlab/catalog.hpp"

namespace dynlab::catalog {

SystemPtr full_shift(int alphabet_size) {
  return std::make_shared<const systems::System>(
      systems::System(systems::FullShift{alphabet_size}));
}

SystemPtr cyclic(int64_t modulus) {
  return std::make_shared<const systems::System>(
      systems::System(systems::CyclicRotation{modulus}));
}

SystemPtr odometer(std::vector<int64_t> radixes) {
  return std::make_shared<const systems::System>(
      systems::System(systems::OdometerTruncation{std::move(radixes)}));
}

SystemPtr circle(const Rational& angle, int partition_resolution) {
  return std::make_shared<const systems::System>(
      systems::System(systems::CircleRotation{angle, partition_resolution}));
}

SystemPtr subshift(symseq::GeneratorPtr generator, uint64_t language_depth) {
  return std::make_shared<const systems::System>(systems::System(
      systems::SubshiftClosure{std::move(generator), language_depth}));
}

symseq::GeneratorPtr morse_generator() {
  return symseq::make_generator(
      symseq::Substitution{{{'0', "01"}, {'1', "10"}}, '0'});
}

symseq::GeneratorPtr fibonacci_generator() {
  return symseq::make_generator(
      symseq::Substitution{{{'0', "01"}, {'1', "0"}}, '0'});
}

std::vector<Rational> golden_convergents(uint64_t max_q) {
  // Fibonacci quotients F(n)/F(n+1): 1/2, 2/3, 3/5, 5/8, ...
  std::vector<Rational> out;
  uint64_t a = 1;
  uint64_t b = 2;
  while (b <= max_q) {
    out.emplace_back(a, b);
    const uint64_t next = a + b;
    a = b;
    b = next;
  }
  return out;
}

std::vector<SystemPtr> minimal_catalog() {
  std::vector<SystemPtr> out;
  for (int64_t m = 2; m <= 12; ++m) {
    out.push_back(cyclic(m));
  }
  out.push_back(odometer({2, 2, 2}));
  for (const auto& angle : golden_convergents(144)) {
    out.push_back(circle(angle, 8));
  }
  return out;
}

} // namespace dynlab::catalog
