// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Optimal ate pairing on BLS12-381.

#pragma once

#include <span>
#include <utility>

#include "qfe/pairing/curve.hpp"

namespace qfe::bls12_381 {

using PairingTerm = std::pair<G1Affine, G2Affine>;

// Product of Miller loops sharing one accumulator; terms with an identity
// component are skipped.
Fp12 multi_miller_loop(std::span<const PairingTerm> terms);

// Raises to 3 (p^12 - 1) / r using the Hayashida-Hayasaka-Teruya chain for
// the hard part. The factor 3 is coprime to r, so the result is still a
// non-degenerate bilinear map.
Fp12 final_exponentiation(const Fp12& f);

// Slow reference: easy part followed by plain exponentiation to
// (p^4 - p^2 + 1) / r. final_exponentiation(f) equals its cube.
Fp12 final_exponentiation_reference(const Fp12& f);

Fp12 pairing(const G1Affine& p, const G2Affine& q);

// prod_i e(P_i, Q_i) with a single final exponentiation.
Fp12 multi_pairing(std::span<const PairingTerm> terms);

}  // namespace qfe::bls12_381
