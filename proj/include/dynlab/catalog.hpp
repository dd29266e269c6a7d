#ifndef DYNLAB_CATALOG_HPP
#define DYNLAB_CATALOG_HPP

#include <memory>
#include <vector>

#include "dynlab/symseq.hpp"
#include "dynlab/systems.hpp"

namespace dynlab::catalog {

using SystemPtr = std::shared_ptr<const systems::System>;

SystemPtr full_shift(int alphabet_size = 2);
SystemPtr cyclic(int64_t modulus);
SystemPtr odometer(std::vector<int64_t> radixes);
SystemPtr circle(const Rational& angle, int partition_resolution = 8);
SystemPtr subshift(symseq::GeneratorPtr generator, uint64_t language_depth);

symseq::GeneratorPtr morse_generator();
symseq::GeneratorPtr fibonacci_generator();

/// Continued-fraction convergents p/q of the golden mean
/// (sqrt(5)-1)/2 with q <= max_q: 1/2, 2/3, 3/5, 5/8, ...
std::vector<Rational> golden_convergents(uint64_t max_q);

/// The minimal-system catalog behind the disjointness scans:
/// CyclicRotation(2..12), OdometerTruncation(2,2,2), and circle
/// rotations at the golden-mean convergents with q <= 144.
std::vector<SystemPtr> minimal_catalog();

} // namespace dynlab::catalog

#endif
