//! Verifiable conditions on states of a (2,2,shield) system: block
//! structure, positivity of the partial transpose, key distillability,
//! separability of the two-qubit-decomposable family, and the twirling and
//! twisting operations the conditions are built on.

use crate::error::{Error, Result};
use crate::linops::{
    from_key_blocks, gamma, hermitian_eigenvalues, key_block, kron, sqrt_psd, trace_norm,
    validate_density, C64, Operator,
};
use crate::states::{ClassParams, XYPair};

/// Slack at or below this size is treated as exactly zero in closed
/// (non-strict) conditions, absorbing boundary roundoff.
const SNAP_TOL: f64 = 1e-12;

/// Outcome of one analytic or numeric condition. `margin` is positive
/// inside the region where the condition holds; strict conditions hold only
/// for `margin > 0`, closed ones also at `margin = 0`.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub condition: &'static str,
    pub holds: bool,
    pub margin: f64,
    pub inputs: String,
}

impl Verdict {
    fn strict(condition: &'static str, margin: f64, inputs: String) -> Self {
        Self { condition, holds: margin > 0.0, margin, inputs }
    }

    fn closed(condition: &'static str, margin: f64, inputs: String) -> Self {
        let margin = if margin.abs() <= SNAP_TOL { 0.0 } else { margin };
        Self { condition, holds: margin >= 0.0, margin, inputs }
    }
}

pub fn all_hold(verdicts: &[Verdict]) -> bool {
    verdicts.iter().all(|v| v.holds)
}

/// The six independent key-part blocks of a state supported on the two
/// parity sectors: diagonal C, E, E', C' and off-diagonal D (between 00 and
/// 11) and F (between 01 and 10). Blocks are stored literally, including
/// their scalar prefactors.
pub struct SpiderBlocks {
    pub c: Operator,
    pub d: Operator,
    pub e: Operator,
    pub f: Operator,
    pub e_prime: Operator,
    pub c_prime: Operator,
}

const SPIDER_ZERO_BLOCKS: [(usize, usize); 8] =
    [(0, 1), (0, 2), (1, 0), (2, 0), (1, 3), (2, 3), (3, 1), (3, 2)];

/// Check that a state is supported on the two key-parity sectors and
/// return its blocks. Blocks coupling the sectors must vanish within `tol`.
pub fn is_spider(rho: &Operator, tol: f64) -> Result<SpiderBlocks> {
    for (r, c) in SPIDER_ZERO_BLOCKS {
        let b = key_block(rho, r, c)?;
        let worst = b.max_abs();
        if worst > tol {
            return Err(Error::NotSpider(format!(
                "key block ({r},{c}) couples the parity sectors: max entry {worst:.3e} > {tol:.3e}"
            )));
        }
    }
    Ok(SpiderBlocks {
        c: key_block(rho, 0, 0)?,
        d: key_block(rho, 0, 3)?,
        e: key_block(rho, 1, 1)?,
        f: key_block(rho, 1, 2)?,
        e_prime: key_block(rho, 2, 2)?,
        c_prime: key_block(rho, 3, 3)?,
    })
}

/// Two-qubit state carrying the block trace norms: the key part after an
/// optimal twisting of the shield. Entry (0,3) holds ||D||, entry (1,2)
/// holds ||F||, the diagonal holds the sector weights.
pub fn privacy_squeezed(blocks: &SpiderBlocks) -> Result<Operator> {
    let nc = trace_norm(&blocks.c);
    let nd = trace_norm(&blocks.d);
    let ne = trace_norm(&blocks.e);
    let nf = trace_norm(&blocks.f);
    let nep = trace_norm(&blocks.e_prime);
    let ncp = trace_norm(&blocks.c_prime);
    let e = [
        [nc, 0.0, 0.0, nd],
        [0.0, ne, nf, 0.0],
        [0.0, nf, nep, 0.0],
        [nd, 0.0, 0.0, ncp],
    ];
    Operator::from_fn(vec![2, 2], |r, c| C64::new(e[r][c], 0.0))
}

/// Numeric positivity of the partial transpose: margin is the smallest
/// eigenvalue of rho^Gamma, and the condition holds when it is >= -tol.
pub fn ppt_numeric(rho: &Operator, tol: f64) -> Result<Verdict> {
    let ev = hermitian_eigenvalues(&gamma(rho)?)?;
    let min = ev.last().copied().unwrap_or(0.0);
    Ok(Verdict {
        condition: "ppt (numeric)",
        holds: min >= -tol,
        margin: min,
        inputs: format!("min eigenvalue of the partial transpose, tol {tol:.1e}"),
    })
}

/// Analytic positivity of the partial transpose for the class family:
/// |alpha| <= min(1, a1) and |beta| <= min(1, 1/a1), with
/// a1 = ((1-p)/p) / ||X^Gamma|| and its inverse computed separately so the
/// p = 0 and p = 1 edges stay finite.
pub fn ppt_analytic_class_c(params: &ClassParams, norm_x_gamma: f64) -> Result<Vec<Verdict>> {
    if !(norm_x_gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "||X^Gamma|| = {norm_x_gamma} must be positive"
        )));
    }
    let p = params.p();
    let (alpha_bound, beta_bound) = if p == 0.0 {
        (1.0, 0.0)
    } else if p == 1.0 {
        (0.0, 1.0)
    } else {
        let a1 = ((1.0 - p) / p) / norm_x_gamma;
        let inv_a1 = (p / (1.0 - p)) * norm_x_gamma;
        (a1.min(1.0), inv_a1.min(1.0))
    };
    Ok(vec![
        Verdict::closed(
            "ppt alpha bound",
            alpha_bound - params.alpha().abs(),
            format!("|alpha| = {} vs min(1, a1) = {alpha_bound}", params.alpha().abs()),
        ),
        Verdict::closed(
            "ppt beta bound",
            beta_bound - params.beta().abs(),
            format!("|beta| = {} vs min(1, 1/a1) = {beta_bound}", params.beta().abs()),
        ),
    ])
}

/// Key distillability of a parity-sector state that is Bell-diagonalizable
/// after privacy squeezing (equal diagonal-block trace norms within each
/// sector): holds strictly when max(||D||, ||F||) > sqrt(||C|| ||E||).
pub fn key_condition_spider(blocks: &SpiderBlocks) -> Result<Verdict> {
    let nc = trace_norm(&blocks.c);
    let ncp = trace_norm(&blocks.c_prime);
    let ne = trace_norm(&blocks.e);
    let nep = trace_norm(&blocks.e_prime);
    if (nc - ncp).abs() > 1e-9 || (ne - nep).abs() > 1e-9 {
        return Err(Error::NotBellDiagonal(format!(
            "diagonal block norms differ: ||C|| = {nc}, ||C'|| = {ncp}, ||E|| = {ne}, ||E'|| = {nep}"
        )));
    }
    let nd = trace_norm(&blocks.d);
    let nf = trace_norm(&blocks.f);
    let margin = nd.max(nf) - (nc * ne).sqrt();
    Ok(Verdict::strict(
        "key distillable (sector state)",
        margin,
        format!("max(||D||, ||F||) = {} vs sqrt(||C|| ||E||) = {}", nd.max(nf), (nc * ne).sqrt()),
    ))
}

/// Key distillability of the class family in terms of its weights:
/// holds strictly when |lambda1 - lambda2| > sqrt((lambda1 + lambda2)(1 - lambda1 - lambda2)).
pub fn key_condition_class_c(params: &ClassParams) -> Verdict {
    let l = params.lambdas();
    let lhs = (l[0] - l[1]).abs();
    let rhs = ((l[0] + l[1]) * (1.0 - l[0] - l[1])).sqrt();
    Verdict::strict(
        "key distillable (class)",
        lhs - rhs,
        format!("|l1 - l2| = {lhs} vs sqrt((l1 + l2)(l3 + l4)) = {rhs}"),
    )
}

/// Key distillability of an arbitrary (2,2,shield) state from its six key
/// blocks: holds strictly when
/// max(||D||, ||F||) > (1/2) sqrt((||A|| + ||J||)(||E|| + ||H||)),
/// with A, J the outer and E, H the inner diagonal blocks. No sector or
/// Bell-diagonality assumption is made, and D is used as is, never through
/// its Hermitian part.
pub fn general_key_condition(rho: &Operator) -> Result<Verdict> {
    let na = trace_norm(&key_block(rho, 0, 0)?);
    let nj = trace_norm(&key_block(rho, 3, 3)?);
    let ne = trace_norm(&key_block(rho, 1, 1)?);
    let nh = trace_norm(&key_block(rho, 2, 2)?);
    let nd = trace_norm(&key_block(rho, 0, 3)?);
    let nf = trace_norm(&key_block(rho, 1, 2)?);
    let lhs = nd.max(nf);
    let rhs = 0.5 * ((na + nj) * (ne + nh)).sqrt();
    Ok(Verdict::strict(
        "key distillable (general)",
        lhs - rhs,
        format!("max(||D||, ||F||) = {lhs} vs (1/2) sqrt((||A||+||J||)(||E||+||H||)) = {rhs}"),
    ))
}

/// The open interval of p where the class state at alpha = min(1, a1),
/// beta = min(1, 1/a1) is both PPT and key distillable: (1/2, 1/(1 + n^2))
/// with n = ||X^Gamma||, empty when n >= 1.
pub fn p_range_ppt_key(norm_x_gamma: f64) -> Result<Option<(f64, f64)>> {
    if !(norm_x_gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "||X^Gamma|| = {norm_x_gamma} must be positive"
        )));
    }
    let p_max = 1.0 / (1.0 + norm_x_gamma * norm_x_gamma);
    if p_max > 0.5 + SNAP_TOL {
        Ok(Some((0.5, p_max)))
    } else {
        Ok(None)
    }
}

/// Sufficient separability conditions for the d = 2 family, one closed
/// verdict per inequality:
/// |beta| <= ||X^Gamma||, |alpha| p <= 1 - p, |beta| (1-p) <= p ||X^Gamma||.
/// The last two margins are kept in product form so the p = 0 and p = 1
/// edges stay finite.
pub fn separability_conditions(params: &ClassParams, norm_x_gamma: f64) -> Result<Vec<Verdict>> {
    if params.d() != 2 {
        return Err(Error::InvalidParameter(format!(
            "separability conditions are derived for d = 2, got d = {}",
            params.d()
        )));
    }
    if !(norm_x_gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "||X^Gamma|| = {norm_x_gamma} must be positive"
        )));
    }
    let p = params.p();
    let (a, b) = (params.alpha().abs(), params.beta().abs());
    Ok(vec![
        Verdict::closed(
            "separable: beta vs transpose norm",
            norm_x_gamma - b,
            format!("|beta| = {b} vs ||X^Gamma|| = {norm_x_gamma}"),
        ),
        Verdict::closed(
            "separable: alpha sector balance",
            (1.0 - p) - a * p,
            format!("|alpha| p = {} vs 1 - p = {}", a * p, 1.0 - p),
        ),
        Verdict::closed(
            "separable: beta sector balance",
            p * norm_x_gamma - b * (1.0 - p),
            format!("|beta| (1-p) = {} vs p ||X^Gamma|| = {}", b * (1.0 - p), p * norm_x_gamma),
        ),
    ])
}

/// Fraction of white noise the one-way recurrence protocol tolerates on a
/// class state with p > 1/2:
/// delta = 1 - 1 / sqrt(8 (l1^2 + l2^2) - 4 (l1 + l2) + 1).
/// Positive exactly when key can still be distilled from the noisy state;
/// a value <= 0 (possible at alpha near 0) means no noise is tolerated.
pub fn tolerable_noise_recurrence(params: &ClassParams) -> Result<f64> {
    let p = params.p();
    if p <= 0.5 {
        return Err(Error::InvalidParameter(format!(
            "the recurrence bound needs p > 1/2, got p = {p}"
        )));
    }
    let l = params.lambdas();
    let f_weights = 8.0 * (l[0] * l[0] + l[1] * l[1]) - 4.0 * (l[0] + l[1]) + 1.0;
    let tp = 2.0 * p - 1.0;
    let ta = 2.0 * params.alpha() * p;
    let f_params = tp * tp + ta * ta;
    if (f_weights - f_params).abs() > 1e-12 {
        return Err(Error::CrossCheck(format!(
            "noise bound forms disagree: {f_weights} vs {f_params}"
        )));
    }
    Ok(1.0 - 1.0 / f_weights.sqrt())
}

fn check_key_part(rho: &Operator) -> Result<usize> {
    let dims = rho.dims();
    if dims.len() < 2 || dims[0] != 2 || dims[1] != 2 {
        return Err(Error::DimensionMismatch(format!(
            "twirls need a (2,2,...) operator, got dims {dims:?}"
        )));
    }
    Ok(rho.side() / 4)
}

fn parity(k: usize) -> usize {
    usize::from(k == 1 || k == 2)
}

/// rho conjugated by X x X on the key part: block (r,c) moves to (3-r, 3-c).
fn key_flipped(rho: &Operator, m: usize) -> Operator {
    let flip = |i: usize| (3 - i / m) * m + i % m;
    Operator::from_fn(rho.dims().to_vec(), |r, c| rho.entry(flip(r), flip(c)))
        .expect("dims preserved")
}

/// Average over conjugation by I and Z x Z on the key part: zeroes every
/// block coupling the two parity sectors and fixes the rest.
pub fn twirl_zz(rho: &Operator) -> Result<Operator> {
    let m = check_key_part(rho)?;
    Operator::from_fn(rho.dims().to_vec(), |r, c| {
        if parity(r / m) == parity(c / m) {
            rho.entry(r, c)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Average over conjugation by I and X x X on the key part: block (r,c)
/// becomes the mean of itself and block (3-r, 3-c).
pub fn twirl_xx(rho: &Operator) -> Result<Operator> {
    let m = check_key_part(rho)?;
    Ok((rho + &key_flipped(rho, m)).scale(C64::new(0.5, 0.0)))
}

/// Coherent version of `twirl_xx`: the applied key flip is recorded in a
/// qubit flag appended as the last factor, so block trace norms add
/// instead of interfering.
pub fn twirl_xx_flagged(rho: &Operator) -> Result<Operator> {
    let m = check_key_part(rho)?;
    let basis = |k: usize| {
        Operator::from_fn(vec![2], move |r, c| {
            C64::new(if r == k && c == k { 1.0 } else { 0.0 }, 0.0)
        })
    };
    let half = C64::new(0.5, 0.0);
    Ok((&kron(rho, &basis(0)?) + &kron(&key_flipped(rho, m), &basis(1)?)).scale(half))
}

/// A twisting: a unitary acting on the shield conditioned on the key-part
/// basis, U = sum_ab |ab><ab| x U_ab. Stored as the four controlled
/// unitaries indexed by 2a + b.
pub struct Twisting {
    us: [Operator; 4],
}

impl Twisting {
    pub fn new(us: [Operator; 4]) -> Result<Self> {
        let dims = us[0].dims().to_vec();
        for u in &us {
            if u.dims() != dims {
                return Err(Error::DimensionMismatch(
                    "all controlled unitaries must share the shield dims".into(),
                ));
            }
            let dev = (u * &u.adjoint())
                .max_abs_diff(&Operator::identity(dims.clone())?);
            if dev > 1e-10 {
                return Err(Error::NotUnitary { deviation: dev });
            }
        }
        Ok(Self { us })
    }

    pub fn unitaries(&self) -> &[Operator; 4] {
        &self.us
    }

    pub fn as_operator(&self) -> Result<Operator> {
        let blocks: [[Option<&Operator>; 4]; 4] =
            std::array::from_fn(|r| std::array::from_fn(|c| (r == c).then(|| &self.us[r])));
        from_key_blocks(self.us[0].dims(), blocks)
    }
}

/// Conjugate a state by a twisting.
pub fn apply_twisting(rho: &Operator, tw: &Twisting) -> Result<Operator> {
    if rho.dims().len() < 3 || &rho.dims()[2..] != tw.us[0].dims() {
        return Err(Error::DimensionMismatch(format!(
            "state dims {:?} do not extend the twisting shield {:?}",
            rho.dims(),
            tw.us[0].dims()
        )));
    }
    let u = tw.as_operator()?;
    Ok(&(&u * rho) * &u.adjoint())
}

/// Unitary factor W V+ of the polar decomposition M = (W V+) sqrt(M+ M).
pub fn polar_unitary(op: &Operator) -> Result<Operator> {
    let svd = nalgebra::SVD::new(op.matrix().clone(), true, true);
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::InvalidParameter("SVD factors unavailable".into()));
    };
    let w = Operator::new(op.dims().to_vec(), u * v_t)?;
    let dev = (&w * &w.adjoint()).max_abs_diff(&Operator::identity(op.dims().to_vec())?);
    if dev > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "polar factor is not unitary (deviation {dev:.3e})"
        )));
    }
    Ok(w)
}

/// The twisting that aligns the class state's off-diagonal blocks with
/// their moduli: U_00 = U_10 = I, U_01 undoes the phase of Y, U_11 the
/// phase of X, each signed by its sector asymmetry. Tracing out the shield
/// of the twisted state gives exactly the privacy-squeezed key part.
pub fn canonical_twisting(params: &ClassParams, xy: &XYPair) -> Result<Twisting> {
    let l = params.lambdas();
    let sign = |v: f64| if v < 0.0 { -1.0 } else { 1.0 };
    let s_d = C64::new(sign(l[0] - l[1]), 0.0);
    let s_f = C64::new(sign(l[2] - l[3]), 0.0);
    let id = Operator::identity(xy.x().dims().to_vec())?;
    let u01 = polar_unitary(xy.y())?.adjoint().scale(s_f);
    let u11 = polar_unitary(xy.x())?.scale(s_d);
    Twisting::new([id.clone(), u01, id, u11])
}

/// The classical-classical-quantum state left after both key parts are
/// measured and everything else is handed to an eavesdropper holding a
/// purification: outcome probabilities and the eavesdropper's
/// subnormalized conditional states, one per key outcome ab (indexed
/// 2a + b). The conditionals are (sqrt(rho) P_ab sqrt(rho))^T, living on a
/// mirror of the state's own factors.
pub struct CcqState {
    probs: [f64; 4],
    eve: Vec<Operator>,
}

impl CcqState {
    pub fn probs(&self) -> [f64; 4] {
        self.probs
    }

    /// Eavesdropper state for outcome k, with trace probs()[k].
    pub fn eve_unnormalized(&self, k: usize) -> &Operator {
        &self.eve[k]
    }

    pub fn eve_conditional(&self, k: usize) -> Result<Operator> {
        let p = self.probs[k];
        if p < 1e-14 {
            return Err(Error::InvalidParameter(format!(
                "outcome {k} has probability {p}, conditional undefined"
            )));
        }
        Ok(self.eve[k].scale(C64::new(1.0 / p, 0.0)))
    }

    /// The full state on (key A, key B, eavesdropper...): diagonal key
    /// registers with the subnormalized conditionals as blocks.
    pub fn as_operator(&self) -> Result<Operator> {
        let blocks: [[Option<&Operator>; 4]; 4] =
            std::array::from_fn(|r| std::array::from_fn(|c| (r == c).then(|| &self.eve[r])));
        from_key_blocks(self.eve[0].dims(), blocks)
    }
}

/// Measure both key qubits of `rho` and give the purifying system to the
/// eavesdropper.
pub fn ccq_state(rho: &Operator) -> Result<CcqState> {
    validate_density(rho)?;
    let s = sqrt_psd(rho)?;
    let n = rho.side();
    let m = n / 4;
    let mut probs = [0.0; 4];
    let mut eve = Vec::with_capacity(4);
    for k in 0..4 {
        let cols = s.matrix().view((0, k * m), (n, m));
        let rows = s.matrix().view((k * m, 0), (m, n));
        let cond = (cols * rows).transpose();
        let op = Operator::new(rho.dims().to_vec(), cond)?;
        probs[k] = op.trace().re;
        eve.push(op);
    }
    Ok(CcqState { probs, eve })
}

/// Probability that the measured key bits disagree: the weight of the odd
/// parity sector, tr E + tr E'.
pub fn error_probability(blocks: &SpiderBlocks) -> f64 {
    (blocks.e.trace() + blocks.e_prime.trace()).re
}

/// All verdicts relevant to a class state at given parameters, evaluated
/// analytically: the two PPT bounds and the key condition.
pub fn class_c_verdicts(params: &ClassParams, norm_x_gamma: f64) -> Result<Vec<Verdict>> {
    let mut v = ppt_analytic_class_c(params, norm_x_gamma)?;
    v.push(key_condition_class_c(params));
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{partial_trace, projector, validate_density};
    use crate::states::{
        bell_projector, class_c_state, hadamard, ppt_boundary_params, private_bit,
    };
    use nalgebra::DVector;

    fn hadamard_pair() -> XYPair {
        XYPair::from_unitary(&hadamard()).unwrap()
    }

    fn class(p: f64, alpha: f64, beta: f64) -> Operator {
        let params = ClassParams::new(2, p, alpha, beta).unwrap();
        class_c_state(&params, &hadamard_pair()).unwrap()
    }

    #[test]
    fn spider_detection_accepts_sector_states_and_flags_coupling() {
        let rho = class(0.6, 0.5, 0.3);
        assert!(is_spider(&rho, 1e-12).is_ok());

        let mm = Operator::maximally_mixed(vec![2, 2, 2, 2]).unwrap();
        assert!(is_spider(&mm, 1e-12).is_ok());

        let bump = Operator::from_fn(vec![2, 2, 2, 2], |r, c| {
            if (r / 4 == 1 && c / 4 == 0 && r % 4 == c % 4)
                || (r / 4 == 0 && c / 4 == 1 && r % 4 == c % 4)
            {
                C64::new(1e-3, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let perturbed = &mm + &bump;
        assert!(matches!(is_spider(&perturbed, 1e-6), Err(Error::NotSpider(_))));
        assert!(is_spider(&perturbed, 1e-2).is_ok());
    }

    #[test]
    fn privacy_squeezing_recovers_the_sector_weights() {
        let params = ClassParams::new(2, 0.6, 0.5, 0.3).unwrap();
        let rho = class_c_state(&params, &hadamard_pair()).unwrap();
        let pq = privacy_squeezed(&is_spider(&rho, 1e-12).unwrap()).unwrap();
        assert!((pq.trace().re - 1.0).abs() < 1e-12);
        let mut ev = hermitian_eigenvalues(&pq).unwrap();
        let mut l = params.lambdas().to_vec();
        l.sort_by(|a, b| b.total_cmp(a));
        ev.truncate(4);
        for (a, b) in ev.iter().zip(l) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn privacy_squeezing_of_a_private_bit_is_a_bell_state() {
        let g = private_bit(hadamard_pair().x()).unwrap();
        let pq = privacy_squeezed(&is_spider(&g, 1e-12).unwrap()).unwrap();
        assert!(pq.max_abs_diff(&bell_projector(1).unwrap()) < 1e-12);
    }

    #[test]
    fn numeric_ppt_on_known_states() {
        let bell = bell_projector(1).unwrap();
        let v = ppt_numeric(&bell, 1e-9).unwrap();
        assert!(!v.holds);
        assert!((v.margin + 0.5).abs() < 1e-12);

        let xy = hadamard_pair();
        let boundary = class_c_state(&ppt_boundary_params(&xy).unwrap(), &xy).unwrap();
        let v = ppt_numeric(&boundary, 1e-9).unwrap();
        assert!(v.holds);
        assert!(v.margin.abs() < 1e-12);
    }

    #[test]
    fn analytic_ppt_matches_numeric_ppt() {
        let xy = hadamard_pair();
        let nxg = xy.norm_x_gamma();
        let boundary = ppt_boundary_params(&xy).unwrap();
        let verdicts = ppt_analytic_class_c(&boundary, nxg).unwrap();
        assert!(all_hold(&verdicts));
        assert_eq!(verdicts[0].margin, 0.0);
        assert_eq!(verdicts[1].margin, 0.0);

        let broken = ClassParams::new(2, 0.9, 1.0, 0.0).unwrap();
        let verdicts = ppt_analytic_class_c(&broken, nxg).unwrap();
        assert!(!all_hold(&verdicts));
        let numeric = ppt_numeric(&class_c_state(&broken, &xy).unwrap(), 1e-9).unwrap();
        assert!(!numeric.holds);

        let edge0 = ClassParams::new(2, 0.0, 0.0, 0.3).unwrap();
        let v0 = ppt_analytic_class_c(&edge0, nxg).unwrap();
        assert!(v0[0].holds && !v0[1].holds);
        let edge1 = ClassParams::new(2, 1.0, 0.3, 0.0).unwrap();
        let v1 = ppt_analytic_class_c(&edge1, nxg).unwrap();
        assert!(!v1[0].holds && v1[1].holds);
    }

    #[test]
    fn gamma_fixed_point_at_matched_asymmetries() {
        let xy = hadamard_pair();
        let nxg = xy.norm_x_gamma();
        let p = 0.6;
        let beta = 0.5;
        let alpha = ((1.0 - p) / p) / nxg * beta;
        let rho = class(p, alpha, beta);
        assert!(rho.max_abs_diff(&gamma(&rho).unwrap()) < 1e-12);
    }

    #[test]
    fn key_condition_examples() {
        let g = private_bit(hadamard_pair().x()).unwrap();
        let v = key_condition_spider(&is_spider(&g, 1e-12).unwrap()).unwrap();
        assert!(v.holds);
        assert!((v.margin - 0.5).abs() < 1e-12);

        let flat = ClassParams::new(2, 0.5, 0.0, 0.0).unwrap();
        let v = key_condition_class_c(&flat);
        assert!(!v.holds);
        assert!((v.margin + 0.5).abs() < 1e-12);

        let exact = ClassParams::new(2, 0.5, 1.0, 0.0).unwrap();
        let v = key_condition_class_c(&exact);
        assert!(!v.holds && v.margin.abs() < 1e-12);

        let xy = hadamard_pair();
        let boundary = ppt_boundary_params(&xy).unwrap();
        let v = key_condition_class_c(&boundary);
        assert!(v.holds && v.margin > 0.09);
    }

    #[test]
    fn class_spider_and_general_conditions_are_consistent() {
        let xy = hadamard_pair();
        for (p, alpha, beta) in
            [(0.6, 0.9, 0.2), (0.6, 0.2, 0.1), (0.55, 0.7, -0.3), (0.52, -0.95, 0.0)]
        {
            let params = ClassParams::new(2, p, alpha, beta).unwrap();
            let rho = class_c_state(&params, &xy).unwrap();
            let spider = key_condition_spider(&is_spider(&rho, 1e-12).unwrap()).unwrap();
            let general = general_key_condition(&rho).unwrap();
            assert!((spider.margin - general.margin).abs() < 1e-12);
            let dominant = alpha.abs() * p >= beta.abs() * (1.0 - p);
            if dominant {
                let cls = key_condition_class_c(&params);
                assert_eq!(cls.holds, spider.holds, "at ({p}, {alpha}, {beta})");
                assert!((cls.margin - 2.0 * spider.margin).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn p_window_examples() {
        let w = p_range_ppt_key(std::f64::consts::FRAC_1_SQRT_2).unwrap().unwrap();
        assert!((w.0 - 0.5).abs() < 1e-15 && (w.1 - 2.0 / 3.0).abs() < 1e-12);
        assert!(p_range_ppt_key(1.0).unwrap().is_none());
        let w = p_range_ppt_key(1.0 / 3f64.sqrt()).unwrap().unwrap();
        assert!((w.1 - 0.75).abs() < 1e-12);
        assert!(p_range_ppt_key(0.0).is_err());
    }

    #[test]
    fn separability_examples() {
        let nxg = std::f64::consts::FRAC_1_SQRT_2;
        let boundary = ClassParams::new(2, 1.0 / (1.0 + nxg), 1.0, 1.0).unwrap();
        let v = separability_conditions(&boundary, nxg).unwrap();
        assert!(!all_hold(&v));

        let sep = ClassParams::new(2, 0.5, 1.0, nxg).unwrap();
        let v = separability_conditions(&sep, nxg).unwrap();
        assert!(all_hold(&v));
        assert_eq!(v[1].margin, 0.0);

        let d3 = ClassParams::new(3, 0.5, 0.0, 0.0).unwrap();
        assert!(separability_conditions(&d3, 1.0 / 3.0).is_err());
    }

    #[test]
    fn recurrence_noise_examples() {
        let xy = hadamard_pair();
        let boundary = ppt_boundary_params(&xy).unwrap();
        let delta = tolerable_noise_recurrence(&boundary).unwrap();
        assert!((delta - 0.1554548810553953).abs() < 1e-12);

        let no_key = ClassParams::new(2, 0.6, 0.0, 0.0).unwrap();
        assert!(tolerable_noise_recurrence(&no_key).unwrap() <= 0.0);

        let half = ClassParams::new(2, 0.5, 1.0, 0.0).unwrap();
        assert!(tolerable_noise_recurrence(&half).is_err());
    }

    #[test]
    fn zz_twirl_fixes_sector_states_and_removes_coupling() {
        let rho = class(0.6, 0.5, 0.3);
        assert!(twirl_zz(&rho).unwrap().max_abs_diff(&rho) < 1e-15);

        let mut amps = DVector::from_element(16, C64::new(0.0, 0.0));
        for k in 0..16 {
            amps[k] = C64::new(0.25, 0.0);
        }
        let skew = projector(&amps, &[2, 2, 2, 2]).unwrap();
        let twirled = twirl_zz(&skew).unwrap();
        assert!(is_spider(&skew, 1e-6).is_err());
        assert!(is_spider(&twirled, 1e-15).is_ok());
        assert!((twirled.trace().re - 1.0).abs() < 1e-12);
        assert!(validate_density(&twirled).is_ok());
    }

    #[test]
    fn xx_twirl_symmetrizes_and_the_flagged_version_keeps_norms() {
        let rho = class(0.6, 0.5, 0.3);
        assert!(twirl_xx(&rho).unwrap().max_abs_diff(&rho) < 1e-12);

        let skew = {
            let p1 = ClassParams::new(2, 1.0, 1.0, 0.0).unwrap();
            let p2 = ClassParams::new(2, 0.2, 0.0, 0.5).unwrap();
            let a = class_c_state(&p1, &hadamard_pair()).unwrap();
            let b = class_c_state(&p2, &hadamard_pair()).unwrap();
            &(&a * 0.5) + &(&b * 0.5)
        };
        let flagged = twirl_xx_flagged(&skew).unwrap();
        assert_eq!(flagged.dims(), &[2, 2, 2, 2, 2]);
        assert!(validate_density(&flagged).is_ok());
        let na = trace_norm(&key_block(&skew, 0, 0).unwrap());
        let nj = trace_norm(&key_block(&skew, 3, 3).unwrap());
        let na_flagged = trace_norm(&key_block(&flagged, 0, 0).unwrap());
        assert!((na_flagged - 0.5 * (na + nj)).abs() < 1e-10);
        let nd = trace_norm(&key_block(&skew, 0, 3).unwrap());
        let nd_flagged = trace_norm(&key_block(&flagged, 0, 3).unwrap());
        assert!((nd_flagged - nd).abs() < 1e-10);

        let unflagged = partial_trace(&flagged, &[4]).unwrap();
        assert!(unflagged.max_abs_diff(&twirl_xx(&skew).unwrap()) < 1e-12);
    }

    #[test]
    fn canonical_twisting_traces_to_the_squeezed_key_part() {
        let xy = hadamard_pair();
        for (p, alpha, beta) in [(0.6, 0.5, 0.3), (0.6, -0.5, 0.3), (0.55, 0.2, -0.8)] {
            let params = ClassParams::new(2, p, alpha, beta).unwrap();
            let rho = class_c_state(&params, &xy).unwrap();
            let tw = canonical_twisting(&params, &xy).unwrap();
            let twisted = apply_twisting(&rho, &tw).unwrap();
            let key_part = partial_trace(&twisted, &[2, 3]).unwrap();
            let pq = privacy_squeezed(&is_spider(&rho, 1e-12).unwrap()).unwrap();
            assert!(
                key_part.max_abs_diff(&pq) < 1e-9,
                "twisting mismatch at ({p}, {alpha}, {beta})"
            );
        }
    }

    #[test]
    fn ccq_of_a_private_bit_hides_the_key() {
        let g = private_bit(hadamard_pair().x()).unwrap();
        let ccq = ccq_state(&g).unwrap();
        let p = ccq.probs();
        assert!((p[0] - 0.5).abs() < 1e-10 && (p[3] - 0.5).abs() < 1e-10);
        assert!(p[1].abs() < 1e-12 && p[2].abs() < 1e-12);
        let e0 = ccq.eve_conditional(0).unwrap();
        let e3 = ccq.eve_conditional(3).unwrap();
        assert!(e0.max_abs_diff(&e3) < 1e-10);
        assert!(ccq.eve_conditional(1).is_err());
        assert!(error_probability(&is_spider(&g, 1e-12).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ccq_of_white_noise_reveals_the_key() {
        let mm = Operator::maximally_mixed(vec![2, 2, 2, 2]).unwrap();
        let ccq = ccq_state(&mm).unwrap();
        for k in 0..4 {
            assert!((ccq.probs()[k] - 0.25).abs() < 1e-12);
        }
        let spectra: Vec<Vec<f64>> = (0..4)
            .map(|k| hermitian_eigenvalues(&ccq.eve_conditional(k).unwrap()).unwrap())
            .collect();
        for k in 1..4 {
            for (a, b) in spectra[0].iter().zip(&spectra[k]) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        let diff = ccq
            .eve_conditional(0)
            .unwrap()
            .max_abs_diff(&ccq.eve_conditional(1).unwrap());
        assert!(diff > 0.1, "conditionals carry the key outcome, diff {diff}");
        let full = ccq.as_operator().unwrap();
        assert_eq!(full.dims(), &[2, 2, 2, 2, 2, 2]);
        assert!(validate_density(&full).is_ok());
    }

    #[test]
    fn class_state_error_probability_is_the_sector_weight() {
        let params = ClassParams::new(2, 0.7, 0.4, 0.2).unwrap();
        let rho = class_c_state(&params, &hadamard_pair()).unwrap();
        let blocks = is_spider(&rho, 1e-12).unwrap();
        assert!((error_probability(&blocks) - 0.3).abs() < 1e-10);
        let ccq = ccq_state(&rho).unwrap();
        assert!((ccq.probs()[1] + ccq.probs()[2] - 0.3).abs() < 1e-10);

        let mut bell_mix = Operator::zeros(vec![2, 2, 2, 2]).unwrap();
        for i in 1..=4 {
            let flat = kron(
                &bell_projector(i).unwrap(),
                &Operator::maximally_mixed(vec![2, 2]).unwrap(),
            );
            bell_mix = &bell_mix + &(&flat * 0.25);
        }
        let blocks = is_spider(&bell_mix, 1e-12).unwrap();
        assert!((error_probability(&blocks) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn antihermitian_off_block_still_distills_key() {
        let x = Operator::from_fn(vec![2, 2], |r, c| {
            if r == c {
                C64::new(0.0, 0.25)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let g = private_bit(&x).unwrap();
        let d = key_block(&g, 0, 3).unwrap();
        let hermitized = (&d + &d.adjoint()).max_abs();
        assert!(hermitized < 1e-15, "D + D'+ should vanish, got {hermitized}");
        let v = general_key_condition(&g).unwrap();
        assert!(v.holds);
        assert!((v.margin - 0.5).abs() < 1e-10);

        let mm = Operator::maximally_mixed(vec![2, 2, 2, 2]).unwrap();
        let v = general_key_condition(&mm).unwrap();
        assert!(!v.holds && (v.margin + 0.25).abs() < 1e-12);
    }
}
