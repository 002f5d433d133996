//! Seeded generators for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeffs::{CoeffFn, Poly};
use crate::number::{qr, Q};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small nonzero-denominator rational in [-3, 3] with denominator ≤ 3.
pub fn small_rational(rng: &mut TestRng) -> Q {
    let d = rng.gen_range(1..=3);
    let n = rng.gen_range(-3 * d..=3 * d);
    qr(n, d)
}

pub fn nonzero_rational(rng: &mut TestRng) -> Q {
    loop {
        let c = small_rational(rng);
        if c != Q::from_integer(0.into()) {
            return c;
        }
    }
}

/// Random polynomial with at most `nterms` terms of total degree ≤ `deg`.
pub fn random_poly(rng: &mut TestRng, nvars: usize, deg: u32, nterms: usize) -> Poly {
    let mut p = Poly::zero(nvars);
    for _ in 0..nterms {
        let mut m = vec![0u32; nvars];
        let mut budget = rng.gen_range(0..=deg);
        while budget > 0 && nvars > 0 {
            m[rng.gen_range(0..nvars)] += 1;
            budget -= 1;
        }
        p.add_term(m, small_rational(rng));
    }
    p
}

pub fn random_coeff(rng: &mut TestRng, nvars: usize, deg: u32) -> CoeffFn {
    CoeffFn::Poly(random_poly(rng, nvars, deg, 3))
}

/// Random enveloping-algebra element with PBW degree ≤ `deg`.
pub fn random_uea(
    rng: &mut TestRng,
    parent: &std::sync::Arc<crate::lie_rinehart::LieRinehart>,
    deg: u32,
    nterms: usize,
) -> crate::uea::UEAElement {
    let r = parent.rank();
    let n = parent.dim();
    let mut u = crate::uea::UEAElement::zero(parent);
    for _ in 0..nterms {
        let mut e = vec![0u32; r];
        let mut budget = if r == 0 { 0 } else { rng.gen_range(0..=deg) };
        while budget > 0 {
            e[rng.gen_range(0..r)] += 1;
            budget -= 1;
        }
        u.add_term(e, CoeffFn::Poly(random_poly(rng, n, 2, 2)));
    }
    u
}
