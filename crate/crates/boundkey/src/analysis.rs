//! Quantitative analysis of the class family: closed-form entropies and
//! their suprema over the PPT key-distillable region, coherent information
//! under erasure of the A side, and one-way distillable key rates of the
//! measured states.

use crate::criteria::ccq_state;
use crate::error::{Error, Result};
use crate::linops::{
    binary_entropy, from_key_blocks, partial_trace, shannon_entropy, validate_density,
    von_neumann_entropy, C64, Operator,
};
use crate::states::{
    add_white_noise, class_block_table, fourier_unitary, ppt_boundary_params, spider_y,
    ClassParams, UnitaryAngles, XYPair,
};

/// Entropy of a class state split into its closed-form pieces:
/// total = H(p) + p (H((1-alpha)/2) + S(sqrt(X+X))) + (1-p) (H((1-beta)/2) + S(sqrt(Y+Y))).
#[derive(Clone, Copy, Debug)]
pub struct EntropyBreakdown {
    pub total: f64,
    pub h_p: f64,
    pub h_alpha: f64,
    pub s_x: f64,
    pub h_beta: f64,
    pub s_y: f64,
}

fn check_square_shield(params: &ClassParams, xy: &XYPair) -> Result<()> {
    let d = params.d();
    if xy.x().dims() != [d, d] {
        return Err(Error::DimensionMismatch(format!(
            "shield dims {:?} do not match d = {d}",
            xy.x().dims()
        )));
    }
    Ok(())
}

/// Von Neumann entropy of the class state in bits, computed in closed form
/// from the sector weights and the singular value distributions of X and Y.
pub fn entropy_class_c(params: &ClassParams, xy: &XYPair) -> Result<EntropyBreakdown> {
    check_square_shield(params, xy)?;
    let s = xy.sqrt_blocks()?;
    let (p, alpha, beta) = (params.p(), params.alpha(), params.beta());
    let h_p = binary_entropy(p)?;
    let h_alpha = binary_entropy((1.0 - alpha) / 2.0)?;
    let h_beta = binary_entropy((1.0 - beta) / 2.0)?;
    let s_x = von_neumann_entropy(&s.sqrt_xdx)?;
    let s_y = von_neumann_entropy(&s.sqrt_ydy)?;
    let total = h_p + p * (h_alpha + s_x) + (1.0 - p) * (h_beta + s_y);
    Ok(EntropyBreakdown { total, h_p, h_alpha, s_x, h_beta, s_y })
}

/// Location and value of a one-dimensional maximum.
#[derive(Clone, Copy, Debug)]
pub struct MaxResult {
    pub value: f64,
    pub argmax: f64,
}

/// Maximize a smooth scalar function on [a, b]: coarse grid (endpoints
/// included exactly), then golden-section refinement around the best grid
/// point. Keeps whichever of the two candidates is higher, so maxima at
/// the interval ends are returned exactly.
fn maximize_scalar(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    n_grid: usize,
    tol: f64,
) -> Result<MaxResult> {
    let span = b - a;
    let mut best_x = a;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=n_grid {
        let x = if i == n_grid { b } else { a + span * (i as f64) / (n_grid as f64) };
        let v = f(x)?;
        if v > best_v {
            best_v = v;
            best_x = x;
        }
    }
    let h = span / (n_grid as f64);
    let (mut lo, mut hi) = ((best_x - h).max(a), (best_x + h).min(b));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while hi - lo > tol {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (lo + hi);
    let v = f(x)?;
    if v > best_v {
        Ok(MaxResult { value: v, argmax: x })
    } else {
        Ok(MaxResult { value: best_v, argmax: best_x })
    }
}

/// Supremum of the class-state entropy over the PPT key-distillable states
/// generated by the d-dimensional Fourier unitary: p runs over
/// [1/2, d/(d+1)], alpha sits on the key boundary sqrt((1-p)/p), beta = 0.
/// The returned argmax is the optimal p.
pub fn entropy_supremum_rho_u(d: usize) -> Result<MaxResult> {
    let xy = XYPair::from_unitary(&fourier_unitary(d)?)?;
    let s = xy.sqrt_blocks()?;
    let s_x = von_neumann_entropy(&s.sqrt_xdx)?;
    let s_y = von_neumann_entropy(&s.sqrt_ydy)?;
    let nxg = xy.norm_x_gamma();
    let p_max = 1.0 / (1.0 + nxg * nxg);
    let mut objective = |p: f64| -> Result<f64> {
        let alpha = ((1.0 - p) / p).sqrt();
        Ok(binary_entropy(p)?
            + p * (binary_entropy((1.0 - alpha) / 2.0)? + s_x)
            + (1.0 - p) * (1.0 + s_y))
    };
    let best = maximize_scalar(&mut objective, 0.5, p_max, 10_000, 1e-6)?;
    let alpha = ((1.0 - best.argmax) / best.argmax).sqrt();
    let params = ClassParams::new(d, best.argmax, alpha, 0.0)?;
    let closed = entropy_class_c(&params, &xy)?.total;
    if (closed - best.value).abs() > 1e-9 {
        return Err(Error::CrossCheck(format!(
            "entropy objective {} disagrees with the closed form {closed} at p = {}",
            best.value, best.argmax
        )));
    }
    Ok(best)
}

fn spider_family_entropy(u1: &UnitaryAngles, u2: &UnitaryAngles, q: f64) -> Result<f64> {
    let xy = spider_y(u1, u2, q)?;
    let nxg = xy.norm_x_gamma();
    let p = 1.0 / (1.0 + nxg * nxg);
    let params = ClassParams::new(2, p, nxg, 0.0)?;
    Ok(entropy_class_c(&params, &xy)?.total)
}

/// Maximum class-state entropy over the interpolation family
/// Y(q) = q Y_1 + (1-q) S Y_2 S, each member evaluated at the corner of its
/// own PPT key-distillable region: p = 1/(1 + n^2), alpha = n, beta = 0
/// with n = ||X(q)^Gamma||. The returned argmax is the optimal q; when the
/// two unitaries coincide the entropy is symmetric under q -> 1-q and the
/// larger of the two tied maximizers is reported.
pub fn entropy_max_spider_y(u1: &UnitaryAngles, u2: &UnitaryAngles) -> Result<MaxResult> {
    let mut objective = |q: f64| spider_family_entropy(u1, u2, q);
    let mut best = maximize_scalar(&mut objective, 0.0, 1.0, 2_000, 1e-6)?;
    if u1 == u2 {
        let mirrored = 1.0 - best.argmax;
        let v = spider_family_entropy(u1, u2, mirrored)?;
        if (v - best.value).abs() <= 1e-9 && mirrored > best.argmax {
            best.argmax = mirrored;
            best.value = v;
        }
    }
    let xy = spider_y(u1, u2, best.argmax)?;
    let nxg = xy.norm_x_gamma();
    let params = ClassParams::new(2, 1.0 / (1.0 + nxg * nxg), nxg, 0.0)?;
    let closed = entropy_class_c(&params, &xy)?.total;
    if (closed - best.value).abs() > 1e-9 {
        return Err(Error::CrossCheck(format!(
            "spider entropy {} disagrees with the closed form {closed} at q = {}",
            best.value, best.argmax
        )));
    }
    Ok(best)
}

/// Entropies entering the erasure coherent information, all in bits.
/// System names follow the (A, B, A', B') factor order of the states.
#[derive(Clone, Copy, Debug)]
pub struct ErasureReport {
    pub d: usize,
    /// (1/2)(s_apbbp - s_total) + (1/2)(s_bbp - s_abbp).
    pub i_coh: f64,
    pub s_total: f64,
    /// Entropy of the marginal on (A', B, B').
    pub s_apbbp: f64,
    /// Entropy of the marginal on (B, B').
    pub s_bbp: f64,
    /// Entropy of the marginal on (A, B, B').
    pub s_abbp: f64,
}

/// Coherent information of the class state through a 50% erasure channel
/// on A, computed from sector marginals without assembling the full state.
/// `d_cap` guards against accidentally huge shields.
pub fn coherent_information_erasure(
    params: &ClassParams,
    xy: &XYPair,
    d_cap: usize,
) -> Result<ErasureReport> {
    check_square_shield(params, xy)?;
    let d = params.d();
    if d > d_cap {
        return Err(Error::InvalidParameter(format!(
            "shield dimension {d} exceeds the cap {d_cap}"
        )));
    }
    let p = params.p();
    let s_total = entropy_class_c(params, xy)?.total;

    let s = xy.sqrt_blocks()?;
    let mix = |a: &Operator, b: &Operator| -> Operator {
        &(a * p) + &(b * (1.0 - p))
    };
    let m0 = mix(&s.sqrt_xxd, &s.sqrt_ydy);
    let m1 = mix(&s.sqrt_xdx, &s.sqrt_yyd);
    let s_apbbp = 1.0 + 0.5 * (von_neumann_entropy(&m0)? + von_neumann_entropy(&m1)?);
    let s_bbp = 1.0
        + 0.5
            * (von_neumann_entropy(&partial_trace(&m0, &[0])?)?
                + von_neumann_entropy(&partial_trace(&m1, &[0])?)?);

    let table = class_block_table(params, xy)?;
    let mut traced: [[Option<Operator>; 4]; 4] = Default::default();
    for (r, row) in table.iter().enumerate() {
        for (c, b) in row.iter().enumerate() {
            if let Some(b) = b {
                traced[r][c] = Some(partial_trace(b, &[0])?);
            }
        }
    }
    let refs: [[Option<&Operator>; 4]; 4] =
        std::array::from_fn(|r| std::array::from_fn(|c| traced[r][c].as_ref()));
    let s_abbp = von_neumann_entropy(&from_key_blocks(&[d], refs)?)?;

    let i_coh = 0.5 * (s_apbbp - s_total) + 0.5 * (s_bbp - s_abbp);
    Ok(ErasureReport { d, i_coh, s_total, s_apbbp, s_bbp, s_abbp })
}

/// The two Fourier-generated families scanned for an erasure threshold:
/// the PPT boundary state (alpha = beta = 1) and its beta = 0 variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErasureFamily {
    PptBoundary,
    PptBoundaryBeta0,
}

impl ErasureFamily {
    /// Family member at shield dimension d: p = sqrt(d)/(sqrt(d) + 1).
    pub fn params_for(self, d: usize) -> Result<(ClassParams, XYPair)> {
        let xy = XYPair::from_unitary(&fourier_unitary(d)?)?;
        let base = ppt_boundary_params(&xy)?;
        let params = match self {
            ErasureFamily::PptBoundary => base,
            ErasureFamily::PptBoundaryBeta0 => ClassParams::new(d, base.p(), 1.0, 0.0)?,
        };
        Ok((params, xy))
    }
}

/// Smallest shield dimension in 2..=d_max where the erasure coherent
/// information of the family member turns positive, if any.
pub fn erasure_threshold_d(family: ErasureFamily, d_max: usize) -> Result<Option<usize>> {
    for d in 2..=d_max {
        let (params, xy) = family.params_for(d)?;
        let report = coherent_information_erasure(&params, &xy, d_max)?;
        if report.i_coh > 0.0 {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// One-way distillable key rate of the measured state (Devetak-Winter):
/// I(A:B) of the key bits minus I(A:E) with the eavesdropper holding a
/// purification. Positive means the state yields secret key under one-way
/// processing of the measurement outcomes.
pub fn dw_rate_ccq(rho: &Operator) -> Result<f64> {
    let ccq = ccq_state(rho)?;
    let p = ccq.probs();
    let pa = [p[0] + p[1], p[2] + p[3]];
    let pb = [p[0] + p[2], p[1] + p[3]];
    let i_ab = shannon_entropy(&pa)? + shannon_entropy(&pb)? - shannon_entropy(&p)?;

    let eve_total = &(ccq.eve_unnormalized(0) + ccq.eve_unnormalized(1))
        + &(ccq.eve_unnormalized(2) + ccq.eve_unnormalized(3));
    let s_e = von_neumann_entropy(&eve_total)?;
    let mut s_cond = 0.0;
    for a in 0..2 {
        let q_a = pa[a];
        if q_a < 1e-14 {
            continue;
        }
        let block = ccq.eve_unnormalized(2 * a) + ccq.eve_unnormalized(2 * a + 1);
        s_cond += q_a * von_neumann_entropy(&block.scale(C64::new(1.0 / q_a, 0.0)))?;
    }
    let i_ae = s_e - s_cond;
    Ok(i_ab - i_ae)
}

/// White-noise level at which the one-way key rate of `rho` crosses zero,
/// bisected to an interval of 1e-4. Requires a positive rate at zero noise
/// and a negative rate at `eps_max`.
pub fn noise_threshold_dw(rho: &Operator, eps_max: f64) -> Result<f64> {
    validate_density(rho)?;
    if !(eps_max > 0.0 && eps_max <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps_max = {eps_max} outside (0, 1]")));
    }
    let rate_zero = dw_rate_ccq(rho)?;
    if rate_zero <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rate at zero noise is {rate_zero}, nothing to threshold"
        )));
    }
    let rate_max = dw_rate_ccq(&add_white_noise(rho, eps_max)?)?;
    if rate_max >= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rate at eps_max = {eps_max} is still {rate_max}; increase eps_max"
        )));
    }
    let (mut lo, mut hi) = (0.0, eps_max);
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if dw_rate_ccq(&add_white_noise(rho, mid)?)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::gamma;
    use crate::states::{class_c_state, hadamard, private_bit};

    fn boundary_hadamard() -> (ClassParams, XYPair) {
        let xy = XYPair::from_unitary(&hadamard()).unwrap();
        let params = ppt_boundary_params(&xy).unwrap();
        (params, xy)
    }

    #[test]
    fn boundary_state_entropy_closed_form() {
        let (params, xy) = boundary_hadamard();
        let e = entropy_class_c(&params, &xy).unwrap();
        assert!((e.total - 2.5644465219770645).abs() < 1e-12);
        let rho = class_c_state(&params, &xy).unwrap();
        let numeric = von_neumann_entropy(&rho).unwrap();
        assert!((e.total - numeric).abs() < 1e-9);
    }

    #[test]
    fn pure_sector_unimodular_entropy_is_two_log_d() {
        for d in [2usize, 3] {
            let xy = XYPair::from_unitary(&fourier_unitary(d).unwrap()).unwrap();
            let params = ClassParams::new(d, 1.0, 1.0, 0.0).unwrap();
            let e = entropy_class_c(&params, &xy).unwrap();
            assert!((e.total - 2.0 * (d as f64).log2()).abs() < 1e-10);
        }
    }

    #[test]
    fn fourier_entropy_supremum_values_and_monotonicity() {
        let s2 = entropy_supremum_rho_u(2).unwrap();
        assert!((s2.value - 3.318879858516394).abs() < 1e-9, "got {}", s2.value);
        assert!((s2.argmax - 2.0 / 3.0).abs() < 1e-9);
        let s3 = entropy_supremum_rho_u(3).unwrap();
        assert!((s3.value - 4.392968).abs() < 1e-5, "got {}", s3.value);
        assert!((s3.argmax - 0.75).abs() < 1e-9);
        let s4 = entropy_supremum_rho_u(4).unwrap();
        assert!((s4.value - 5.170951).abs() < 1e-5, "got {}", s4.value);
        assert!(s2.value < s3.value && s3.value < s4.value);
    }

    #[test]
    fn spider_entropy_maximum_and_symmetry() {
        let h = UnitaryAngles::HADAMARD;
        let m = entropy_max_spider_y(&h, &h).unwrap();
        assert!((m.value - 3.5239402975555594).abs() < 1e-6, "got {}", m.value);
        assert!((m.argmax - 0.6831).abs() < 1e-3, "got {}", m.argmax);
        let left = spider_family_entropy(&h, &h, 0.3).unwrap();
        let right = spider_family_entropy(&h, &h, 0.7).unwrap();
        assert!((left - right).abs() < 1e-9);
        let edge = spider_family_entropy(&h, &h, 1.0).unwrap();
        assert!((edge - 3.318879858516394).abs() < 1e-9);
    }

    #[test]
    fn erasure_closed_form_matches_full_state_marginals() {
        for family in [ErasureFamily::PptBoundary, ErasureFamily::PptBoundaryBeta0] {
            let (params, xy) = family.params_for(3).unwrap();
            let report = coherent_information_erasure(&params, &xy, 10).unwrap();
            let rho = class_c_state(&params, &xy).unwrap();
            let s_total = von_neumann_entropy(&rho).unwrap();
            let s_apbbp = von_neumann_entropy(&partial_trace(&rho, &[0]).unwrap()).unwrap();
            let s_bbp = von_neumann_entropy(&partial_trace(&rho, &[0, 2]).unwrap()).unwrap();
            let s_abbp = von_neumann_entropy(&partial_trace(&rho, &[2]).unwrap()).unwrap();
            assert!((report.s_total - s_total).abs() < 1e-8);
            assert!((report.s_apbbp - s_apbbp).abs() < 1e-8);
            assert!((report.s_bbp - s_bbp).abs() < 1e-8);
            assert!((report.s_abbp - s_abbp).abs() < 1e-8);
            let i_coh = 0.5 * (s_apbbp - s_total) + 0.5 * (s_bbp - s_abbp);
            assert!((report.i_coh - i_coh).abs() < 1e-8);
        }
    }

    #[test]
    fn erasure_cap_is_enforced() {
        let (params, xy) = ErasureFamily::PptBoundary.params_for(5).unwrap();
        assert!(coherent_information_erasure(&params, &xy, 4).is_err());
    }

    #[test]
    fn private_bit_has_unit_key_rate() {
        let xy = XYPair::from_unitary(&hadamard()).unwrap();
        let g = private_bit(xy.x()).unwrap();
        let rate = dw_rate_ccq(&g).unwrap();
        assert!((rate - 1.0).abs() < 1e-9, "got {rate}");
    }

    #[test]
    fn boundary_state_key_rate_and_white_noise_rate() {
        let (params, xy) = boundary_hadamard();
        let rho = class_c_state(&params, &xy).unwrap();
        let rate = dw_rate_ccq(&rho).unwrap();
        assert!((rate - 0.021339915649841).abs() < 1e-9, "got {rate}");
        assert!(ppt_numeric_margin(&rho) > -1e-9);

        let mm = Operator::maximally_mixed(vec![2, 2, 2, 2]).unwrap();
        let rate = dw_rate_ccq(&mm).unwrap();
        assert!((rate + 1.0).abs() < 1e-9, "got {rate}");
    }

    fn ppt_numeric_margin(rho: &Operator) -> f64 {
        let ev = crate::linops::hermitian_eigenvalues(&gamma(rho).unwrap()).unwrap();
        ev.last().copied().unwrap()
    }

    #[test]
    fn key_rate_decreases_with_white_noise() {
        let (params, xy) = boundary_hadamard();
        let rho = class_c_state(&params, &xy).unwrap();
        let mut last = f64::INFINITY;
        for i in 0..10 {
            let eps = 0.002 * i as f64;
            let rate = dw_rate_ccq(&add_white_noise(&rho, eps).unwrap()).unwrap();
            assert!(rate < last + 1e-12, "rate not decreasing at eps = {eps}");
            last = rate;
        }
    }

    #[test]
    fn white_noise_threshold_of_the_boundary_state() {
        let (params, xy) = boundary_hadamard();
        let rho = class_c_state(&params, &xy).unwrap();
        let t = noise_threshold_dw(&rho, 0.02).unwrap();
        assert!((t - 0.00506217).abs() < 2e-4, "got {t}");
        assert!(noise_threshold_dw(&rho, 1e-6).is_err());
        let mm = Operator::maximally_mixed(vec![2, 2, 2, 2]).unwrap();
        assert!(noise_threshold_dw(&mm, 0.5).is_err());
    }
}
