#pragma once

// Shared fixtures for the test binaries.

#include <array>
#include <random>

#include "delyap/matcore.hpp"
#include "delyap/model.hpp"

namespace delyap::testing {

/// Entries uniform in [-1, 1].
Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols);

/// Scalar plant a0 x + a1 x(t-h) with an identically zero kernel (n_d = 1).
TimeDelaySystem scalar_system(double a0, double a1, double h);

/// Random plant whose A0 is shifted until its 2-norm log-norm is
/// -(‖A1‖ + ∫‖A_D‖ + margin). That makes it stable for every delay.
TimeDelaySystem random_stable_system(std::uint64_t seed, Index n, Index nd,
                                     double h, double margin = 0.5);

/// Random symmetric matrix.
Matrix random_symmetric(std::mt19937_64& rng, Index n);

/// Unstructured random plant (not necessarily stable), h in [0.1, 2].
TimeDelaySystem random_system(std::mt19937_64& rng, Index n, Index nd);

/// Random Ω1..Ω6 of the block shapes for (n, nd).
std::array<Matrix, 6> random_blocks(std::mt19937_64& rng, Index n, Index nd);

/// [vec Ω1; ...; vec Ω6]
Vector stack_blocks(const std::array<Matrix, 6>& w);

// Reference evaluations written straight from the matrix equations, used
// to check the Kronecker assembly.

/// Ω dynamics, block by block.
std::array<Matrix, 6> literal_omega_rhs(const TimeDelaySystem& s,
                                        const std::array<Matrix, 6>& w);

/// Boundary rows for the pair (Ω(0), Ω(h)) = (a, b): the algebraic
/// condition including the Ω3(0)Bd and BdᵀΩ6(h) terms (both vanish on
/// admissible pairs), Ω1(0) - Ω2(h), and the four endpoint blocks in state
/// order.
std::array<Matrix, 6> literal_boundary_rows(const TimeDelaySystem& s,
                                            const std::array<Matrix, 6>& a,
                                            const std::array<Matrix, 6>& b);

/// The algebraic boundary condition exactly as stated, without the
/// vanishing terms.
Matrix literal_algebraic(const TimeDelaySystem& s,
                         const std::array<Matrix, 6>& a,
                         const std::array<Matrix, 6>& b);

}  // namespace delyap::testing
