//! Shared samplers for the integration suites. Everything is seeded; no
//! test depends on ambient randomness.

#![allow(dead_code)]

use boundkey::criteria::{apply_twisting, polar_unitary, twirl_xx, twirl_zz, Twisting};
use boundkey::states::{ClassParams, UnitaryAngles, XYPair};
use boundkey::{C64, Operator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(r: &mut ChaCha8Rng, dims: Vec<usize>) -> Operator {
    Operator::from_fn(dims, |_, _| {
        C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
    })
    .expect("valid dims")
}

pub fn random_density(r: &mut ChaCha8Rng, dims: Vec<usize>) -> Operator {
    let g = random_matrix(r, dims);
    let rho = &g * &g.adjoint();
    let t = rho.trace().re;
    rho.scale(C64::new(1.0 / t, 0.0))
}

pub fn random_unitary(r: &mut ChaCha8Rng, dims: Vec<usize>) -> Operator {
    polar_unitary(&random_matrix(r, dims)).expect("Ginibre matrices are invertible")
}

/// A random state supported on the two key-parity sectors.
pub fn random_spider(r: &mut ChaCha8Rng, d: usize) -> Operator {
    twirl_zz(&random_density(r, vec![2, 2, d, d])).expect("twirl of a density matrix")
}

pub fn random_twisting(r: &mut ChaCha8Rng, d: usize) -> Twisting {
    let u = std::array::from_fn(|_| random_unitary(r, vec![d, d]));
    Twisting::new(u).expect("members are unitary")
}

/// A random spider state whose squeezed form is Bell diagonal: the XX-twirl
/// equalizes the sector block norms and a twisting preserves them.
pub fn random_bd_spider(r: &mut ChaCha8Rng, d: usize) -> Operator {
    let base = twirl_xx(&random_spider(r, d)).expect("spider structure");
    let tw = random_twisting(r, d);
    apply_twisting(&base, &tw).expect("matching shield dims")
}

pub fn random_angles(r: &mut ChaCha8Rng) -> UnitaryAngles {
    let pi = std::f64::consts::PI;
    UnitaryAngles {
        alpha: r.random_range(-pi..pi),
        beta: r.random_range(-pi..pi),
        gamma: r.random_range(-pi..pi),
        delta: r.random_range(-pi..pi),
    }
}

pub fn random_params(r: &mut ChaCha8Rng, d: usize) -> ClassParams {
    ClassParams::new(
        d,
        r.random_range(0.0..=1.0),
        r.random_range(-1.0..=1.0),
        r.random_range(-1.0..=1.0),
    )
    .expect("in-range parameters")
}

/// Parameters inside the simultaneous key + PPT region of a pair with the
/// given transpose norm: p strictly between 1/2 and p_max, alpha strictly
/// between the key boundary and the PPT bound, beta within its PPT bound.
pub fn coexistence_params(r: &mut ChaCha8Rng, xy: &XYPair) -> ClassParams {
    let nxg = xy.norm_x_gamma();
    let p_max = 1.0 / (1.0 + nxg * nxg);
    let p = 0.5 + r.random_range(0.02..0.98) * (p_max - 0.5);
    let lo = ((1.0 - p) / p).sqrt();
    let a1 = (1.0 - p) / p / nxg;
    let hi = a1.min(1.0);
    let alpha = lo + r.random_range(0.05..=1.0) * (hi - lo);
    let beta = r.random_range(0.0..=(1.0 / a1).min(1.0));
    ClassParams::new(xy.d(), p, alpha, beta).expect("in-range parameters")
}
