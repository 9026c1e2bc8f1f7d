//! State and operator families on the key (2 x 2) tensor shield (d x d)
//! system, written in the order (A, B, A', B').
//!
//! The central family is parametrized by a shield dimension `d`, a weight
//! `p` splitting two block sectors, asymmetries `alpha` and `beta` inside
//! them, and an operator pair (X, Y) with Y proportional to the B-side
//! partial transpose of X.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linops::{
    from_key_blocks, gamma, kron, projector, sqrt_psd, trace_norm, validate_density, C64,
    Operator,
};

/// Parameters (d, p, alpha, beta), equivalently the four sector weights
/// lambda_i, of the main state family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassParams {
    d: usize,
    p: f64,
    alpha: f64,
    beta: f64,
}

impl ClassParams {
    /// `p` in [0,1], `alpha` and `beta` in [-1,1]. At `p = 0` the alpha
    /// sector is empty and alpha is stored as 0; likewise beta at `p = 1`.
    pub fn new(d: usize, p: f64, alpha: f64, beta: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("shield dimension {d} < 2")));
        }
        let check = |name: &str, v: f64, lo: f64, hi: f64| -> Result<f64> {
            if !(lo - 1e-12..=hi + 1e-12).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} outside [{lo}, {hi}]"
                )));
            }
            Ok(v.clamp(lo, hi))
        };
        let p = check("p", p, 0.0, 1.0)?;
        let mut alpha = check("alpha", alpha, -1.0, 1.0)?;
        let mut beta = check("beta", beta, -1.0, 1.0)?;
        if p == 0.0 {
            alpha = 0.0;
        }
        if p == 1.0 {
            beta = 0.0;
        }
        Ok(Self { d, p, alpha, beta })
    }

    pub fn from_lambdas(d: usize, lambdas: [f64; 4]) -> Result<Self> {
        let mut l = lambdas;
        for v in &mut l {
            if *v < -1e-12 {
                return Err(Error::InvalidParameter(format!("negative weight {v}")));
            }
            *v = v.max(0.0);
        }
        let sum: f64 = l.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("weights sum to {sum}")));
        }
        let p = l[0] + l[1];
        let alpha = if p > 0.0 { ((l[0] - l[1]) / p).clamp(-1.0, 1.0) } else { 0.0 };
        let q = l[2] + l[3];
        let beta = if q > 0.0 { ((l[2] - l[3]) / q).clamp(-1.0, 1.0) } else { 0.0 };
        Self::new(d, p, alpha, beta)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Sector weights (lambda_1, ..., lambda_4).
    pub fn lambdas(&self) -> [f64; 4] {
        [
            (1.0 + self.alpha) * self.p / 2.0,
            (1.0 - self.alpha) * self.p / 2.0,
            (1.0 + self.beta) * (1.0 - self.p) / 2.0,
            (1.0 - self.beta) * (1.0 - self.p) / 2.0,
        ]
    }
}

/// Euler-like angles (global phase alpha, then beta/gamma/delta) of a
/// single-qubit unitary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitaryAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl UnitaryAngles {
    pub const HADAMARD: UnitaryAngles = UnitaryAngles {
        alpha: std::f64::consts::FRAC_PI_2,
        beta: 0.0,
        gamma: std::f64::consts::FRAC_PI_2,
        delta: std::f64::consts::PI,
    };
}

pub fn qubit_unitary(a: &UnitaryAngles) -> Operator {
    let phase = |t: f64| C64::new(t.cos(), t.sin());
    let g = phase(a.alpha);
    let c = (a.gamma / 2.0).cos();
    let s = (a.gamma / 2.0).sin();
    let e00 = g * phase((-a.beta - a.delta) / 2.0) * C64::new(c, 0.0);
    let e01 = g * phase((-a.beta + a.delta) / 2.0) * C64::new(-s, 0.0);
    let e10 = g * phase((a.beta - a.delta) / 2.0) * C64::new(s, 0.0);
    let e11 = g * phase((a.beta + a.delta) / 2.0) * C64::new(c, 0.0);
    let entries = [[e00, e01], [e10, e11]];
    Operator::from_fn(vec![2], |r, c| entries[r][c]).expect("2x2")
}

/// The real Hadamard matrix, entrywise exact.
pub fn hadamard() -> Operator {
    let h = 1.0 / 2f64.sqrt();
    let entries = [[h, h], [h, -h]];
    Operator::from_fn(vec![2], |r, c| C64::new(entries[r][c], 0.0)).expect("2x2")
}

/// Discrete Fourier matrix, the canonical unitary with all entry moduli
/// equal to 1/sqrt(d).
pub fn fourier_unitary(d: usize) -> Result<Operator> {
    if d < 1 {
        return Err(Error::InvalidParameter("Fourier dimension must be >= 1".into()));
    }
    let scale = 1.0 / (d as f64).sqrt();
    Operator::from_fn(vec![d], |j, k| {
        let t = 2.0 * std::f64::consts::PI * (((j * k) % d) as f64) / (d as f64);
        C64::new(t.cos() * scale, t.sin() * scale)
    })
}

/// The four Bell vectors on two qubits, indexed 1..=4:
/// (|00> +- |11>)/sqrt 2, then (|01> +- |10>)/sqrt 2.
pub fn bell_state(i: usize) -> Result<DVector<C64>> {
    let r = 1.0 / 2f64.sqrt();
    let amps: [f64; 4] = match i {
        1 => [r, 0.0, 0.0, r],
        2 => [r, 0.0, 0.0, -r],
        3 => [0.0, r, r, 0.0],
        4 => [0.0, r, -r, 0.0],
        _ => return Err(Error::InvalidParameter(format!("Bell index {i} not in 1..=4"))),
    };
    Ok(DVector::from_iterator(4, amps.iter().map(|&x| C64::new(x, 0.0))))
}

pub fn bell_projector(i: usize) -> Result<Operator> {
    projector(&bell_state(i)?, &[2, 2])
}

fn check_unitary(u: &Operator) -> Result<()> {
    let prod = u * &u.adjoint();
    let id = Operator::identity(u.dims().to_vec()).expect("dims validated");
    let dev = prod.max_abs_diff(&id);
    if dev > 1e-10 {
        return Err(Error::NotUnitary { deviation: dev });
    }
    Ok(())
}

/// The normalized swap-like operator built from a unitary.
pub struct XOperator {
    /// X on (A', B'), trace norm 1.
    pub x: Operator,
    /// Sum of the entry moduli of the generating unitary.
    pub u_sum: f64,
    /// Trace norm of the B'-side partial transpose of X, equal to d/u_sum.
    pub norm_x_gamma: f64,
}

/// X = (1/u) sum_ij u_ij |ij><ji| from a d x d unitary, u = sum |u_ij|.
pub fn x_operator(u: &Operator) -> Result<XOperator> {
    if u.dims().len() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected a single-factor unitary, got dims {:?}",
            u.dims()
        )));
    }
    check_unitary(u)?;
    let d = u.side();
    let u_sum: f64 = u.matrix().iter().map(|z| z.norm()).sum();
    let mut xm = nalgebra::DMatrix::from_element(d * d, d * d, C64::new(0.0, 0.0));
    for i in 0..d {
        for j in 0..d {
            xm[(i * d + j, j * d + i)] = u.entry(i, j) / C64::new(u_sum, 0.0);
        }
    }
    let x = Operator::new(vec![d, d], xm)?;
    Ok(XOperator { x, u_sum, norm_x_gamma: d as f64 / u_sum })
}

/// Y = X^Gamma / ||X^Gamma||.
pub fn y_from_x(x: &Operator) -> Result<Operator> {
    let xg = gamma(x)?;
    let n = trace_norm(&xg);
    if n < 1e-300 {
        return Err(Error::InvalidParameter("zero operator".into()));
    }
    Ok(xg.scale(C64::new(1.0 / n, 0.0)))
}

/// An (X, Y) operator pair on the shield with unit trace norms and
/// Y proportional to X^Gamma.
#[derive(Clone, Debug)]
pub struct XYPair {
    x: Operator,
    y: Operator,
    norm_x_gamma: f64,
}

impl XYPair {
    pub fn from_unitary(u: &Operator) -> Result<Self> {
        let xo = x_operator(u)?;
        let y = y_from_x(&xo.x)?;
        Ok(Self { x: xo.x, y, norm_x_gamma: xo.norm_x_gamma })
    }

    /// Wrap an explicit pair; both trace norms must be 1 within 1e-10.
    pub fn new(x: Operator, y: Operator) -> Result<Self> {
        if x.dims().len() != 2 || x.dims() != y.dims() {
            return Err(Error::DimensionMismatch(format!(
                "X and Y must share a two-factor shield, got {:?} and {:?}",
                x.dims(),
                y.dims()
            )));
        }
        for (name, op) in [("X", &x), ("Y", &y)] {
            let n = trace_norm(op);
            if (n - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "||{name}|| = {n}, expected 1"
                )));
            }
        }
        let norm_x_gamma = trace_norm(&gamma(&x)?);
        Ok(Self { x, y, norm_x_gamma })
    }

    pub fn x(&self) -> &Operator {
        &self.x
    }

    pub fn y(&self) -> &Operator {
        &self.y
    }

    pub fn norm_x_gamma(&self) -> f64 {
        self.norm_x_gamma
    }

    /// Shield dimension when the shield is square.
    pub fn d(&self) -> usize {
        self.x.dims()[0]
    }

    pub fn sqrt_blocks(&self) -> Result<SqrtBlocks> {
        Ok(SqrtBlocks {
            sqrt_xxd: sqrt_psd(&(&self.x * &self.x.adjoint()))?,
            sqrt_xdx: sqrt_psd(&(&self.x.adjoint() * &self.x))?,
            sqrt_yyd: sqrt_psd(&(&self.y * &self.y.adjoint()))?,
            sqrt_ydy: sqrt_psd(&(&self.y.adjoint() * &self.y))?,
        })
    }
}

/// The PSD square roots sqrt(XX+), sqrt(X+X), sqrt(YY+), sqrt(Y+Y).
pub struct SqrtBlocks {
    pub sqrt_xxd: Operator,
    pub sqrt_xdx: Operator,
    pub sqrt_yyd: Operator,
    pub sqrt_ydy: Operator,
}

/// The private bit gamma(X) on (2,2,shield): perfectly correlated key part
/// with X in the outer corner blocks.
pub fn private_bit(x: &Operator) -> Result<Operator> {
    if x.dims().len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "X must live on a two-factor shield, got {:?}",
            x.dims()
        )));
    }
    let n = trace_norm(x);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!("||X|| = {n}, expected 1")));
    }
    let sxx = sqrt_psd(&(x * &x.adjoint()))?;
    let sxdx = sqrt_psd(&(&x.adjoint() * x))?;
    let half = |o: &Operator| o.scale(C64::new(0.5, 0.0));
    let c = half(&sxx);
    let d = half(x);
    let dd = half(&x.adjoint());
    let cp = half(&sxdx);
    let mut blocks: [[Option<&Operator>; 4]; 4] = Default::default();
    blocks[0][0] = Some(&c);
    blocks[0][3] = Some(&d);
    blocks[3][0] = Some(&dd);
    blocks[3][3] = Some(&cp);
    let state = from_key_blocks(x.dims(), blocks)?;
    validate_density(&state)?;
    Ok(state)
}

fn sigma_x_on_b(shield_dims: &[usize]) -> Result<Operator> {
    let sx = Operator::from_fn(vec![2], |r, c| {
        C64::new(if r + c == 1 { 1.0 } else { 0.0 }, 0.0)
    })?;
    let i2 = Operator::identity(vec![2])?;
    let ish = Operator::identity(shield_dims.to_vec())?;
    Ok(kron(&kron(&i2, &sx), &ish))
}

fn check_gamma_invariant(blocks: &SqrtBlocks) -> Result<()> {
    for (name, b) in [
        ("sqrt(XX+)", &blocks.sqrt_xxd),
        ("sqrt(X+X)", &blocks.sqrt_xdx),
        ("sqrt(YY+)", &blocks.sqrt_yyd),
        ("sqrt(Y+Y)", &blocks.sqrt_ydy),
    ] {
        let dev = b.max_abs_diff(&gamma(b)?);
        if dev > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "{name} is not invariant under the B'-side transpose (deviation {dev:.3e})"
            )));
        }
    }
    Ok(())
}

/// The eight nonzero key-part blocks of the class state, in 4x4 table form.
pub(crate) fn class_block_table(
    params: &ClassParams,
    xy: &XYPair,
) -> Result<[[Option<Operator>; 4]; 4]> {
    let l = params.lambdas();
    let s = xy.sqrt_blocks()?;
    let scale = |o: &Operator, w: f64| o.scale(C64::new(w / 2.0, 0.0));
    let mut t: [[Option<Operator>; 4]; 4] = Default::default();
    t[0][0] = Some(scale(&s.sqrt_xxd, l[0] + l[1]));
    t[0][3] = Some(scale(&xy.x, l[0] - l[1]));
    t[3][0] = Some(scale(&xy.x.adjoint(), l[0] - l[1]));
    t[3][3] = Some(scale(&s.sqrt_xdx, l[0] + l[1]));
    t[1][1] = Some(scale(&s.sqrt_yyd, l[2] + l[3]));
    t[1][2] = Some(scale(&xy.y, l[2] - l[3]));
    t[2][1] = Some(scale(&xy.y.adjoint(), l[2] - l[3]));
    t[2][2] = Some(scale(&s.sqrt_ydy, l[2] + l[3]));
    Ok(t)
}

/// The class state: a mixture of four mutually orthogonal private bits,
/// equal to the two-sector block matrix over (X, Y). Both constructions are
/// built and cross-checked to 1e-12.
pub fn class_c_state(params: &ClassParams, xy: &XYPair) -> Result<Operator> {
    let d = params.d();
    if xy.x.dims() != [d, d] {
        return Err(Error::DimensionMismatch(format!(
            "shield dims {:?} do not match d = {d}",
            xy.x.dims()
        )));
    }
    check_gamma_invariant(&xy.sqrt_blocks()?)?;

    let table = class_block_table(params, xy)?;
    let refs: [[Option<&Operator>; 4]; 4] =
        std::array::from_fn(|r| std::array::from_fn(|c| table[r][c].as_ref()));
    let from_blocks = from_key_blocks(&[d, d], refs)?;

    let l = params.lambdas();
    let minus = |o: &Operator| o.scale(C64::new(-1.0, 0.0));
    let g1p = private_bit(&xy.x)?;
    let g1m = private_bit(&minus(&xy.x))?;
    let sb = sigma_x_on_b(&[d, d])?;
    let g2p = &(&sb * &private_bit(&xy.y)?) * &sb;
    let g2m = &(&sb * &private_bit(&minus(&xy.y))?) * &sb;
    let mixture = &(&(&g1p * l[0]) + &(&g1m * l[1])) + &(&(&g2p * l[2]) + &(&g2m * l[3]));

    let dev = from_blocks.max_abs_diff(&mixture);
    if dev > 1e-12 {
        return Err(Error::CrossCheck(format!(
            "block and mixture constructions disagree by {dev:.3e}"
        )));
    }
    validate_density(&from_blocks)?;
    Ok(from_blocks)
}

/// Parameters of the state on the PPT boundary: alpha = beta = 1 and
/// p = 1/(1 + ||X^Gamma||), where the partial transpose fixes the state.
pub fn ppt_boundary_params(xy: &XYPair) -> Result<ClassParams> {
    ClassParams::new(xy.d(), 1.0 / (1.0 + xy.norm_x_gamma()), 1.0, 1.0)
}

/// Build the pair (X, Y) from Y = q Y_1 + (1-q) S Y_2 S, where Y_i embeds
/// the qubit unitary U_i on the doubled-index subspace, S flips the first
/// shield qubit, and X = Y^Gamma / ||Y^Gamma||. The two unitaries must have
/// exactly equal global-phase angles.
pub fn spider_y(u1: &UnitaryAngles, u2: &UnitaryAngles, q: f64) -> Result<XYPair> {
    if u1.alpha != u2.alpha {
        return Err(Error::InvalidParameter(
            "the two unitaries must share a global phase (equal alpha angles)".into(),
        ));
    }
    if !(-1e-12..=1.0 + 1e-12).contains(&q) {
        return Err(Error::InvalidParameter(format!("q = {q} outside [0, 1]")));
    }
    let q = q.clamp(0.0, 1.0);
    let embed = |u: &Operator| -> Result<Operator> {
        let mut ym = nalgebra::DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
        for j in 0..2 {
            for k in 0..2 {
                ym[(3 * j, 3 * k)] = u.entry(j, k) / C64::new(2.0, 0.0);
            }
        }
        Operator::new(vec![2, 2], ym)
    };
    let y1 = embed(&qubit_unitary(u1))?;
    let y2 = embed(&qubit_unitary(u2))?;
    let sx = Operator::from_fn(vec![2], |r, c| {
        C64::new(if r + c == 1 { 1.0 } else { 0.0 }, 0.0)
    })?;
    let s = kron(&sx, &Operator::identity(vec![2])?);
    let y = &(&y1 * q) + &(&(&s * &y2) * &s).scale(C64::new(1.0 - q, 0.0));
    let ny = trace_norm(&y);
    if (ny - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!("||Y|| = {ny}, expected 1")));
    }
    let yg = gamma(&y)?;
    let nyg = trace_norm(&yg);
    let x = yg.scale(C64::new(1.0 / nyg, 0.0));
    let pair = XYPair { x, y, norm_x_gamma: 1.0 / nyg };
    check_gamma_invariant(&pair.sqrt_blocks()?)?;
    Ok(pair)
}

/// The d = 2, Hadamard-generated class state assembled as a flagged Bell
/// mixture: sum_i q_i P_psi_i tensor rho_i. Restricted to alpha, beta >= 0,
/// where every flag state rho_i is PSD.
pub fn rho_h_flag_form(params: &ClassParams) -> Result<Operator> {
    if params.d() != 2 {
        return Err(Error::InvalidParameter(format!(
            "flag form is defined for d = 2, got d = {}",
            params.d()
        )));
    }
    let (p, alpha, beta) = (params.p(), params.alpha(), params.beta());
    if alpha < 0.0 || beta < 0.0 {
        return Err(Error::InvalidParameter(
            "flag form requires alpha >= 0 and beta >= 0 (flag states can lose positivity)"
                .into(),
        ));
    }
    let basis = |k: usize| -> Result<Operator> {
        let mut amps = DVector::from_element(4, C64::new(0.0, 0.0));
        amps[k] = C64::new(1.0, 0.0);
        projector(&amps, &[2, 2])
    };
    let p00 = basis(0)?;
    let p11 = basis(3)?;
    let chi = |sign: f64| -> Result<Operator> {
        let mut v = bell_state(1)?;
        v *= C64::new(sign, 0.0);
        v[0] += C64::new(1.0, 0.0);
        let norm = v.norm();
        v /= C64::new(norm, 0.0);
        projector(&v, &[2, 2])
    };
    let mm4 = Operator::maximally_mixed(vec![2, 2])?;
    let half = |a: &Operator, b: &Operator| (a + b).scale(C64::new(0.5, 0.0));
    let blend = |w: f64, a: &Operator, b: &Operator| &(a * w) + &(b * (1.0 - w));
    let rho = [
        blend(alpha, &half(&p00, &bell_projector(3)?), &mm4),
        blend(alpha, &half(&p11, &bell_projector(4)?), &mm4),
        blend(beta, &chi(1.0)?, &half(&p00, &p11)),
        blend(beta, &chi(-1.0)?, &half(&p00, &p11)),
    ];
    let weights = [p / 2.0, p / 2.0, (1.0 - p) / 2.0, (1.0 - p) / 2.0];
    let mut state = Operator::zeros(vec![2, 2, 2, 2])?;
    for (i, r) in rho.iter().enumerate() {
        validate_density(r)?;
        state = &state + &kron(&bell_projector(i + 1)?, r).scale(C64::new(weights[i], 0.0));
    }
    validate_density(&state)?;

    let reference = class_c_state(params, &XYPair::from_unitary(&hadamard())?)?;
    let dist = trace_norm(&(&state - &reference)) / 2.0;
    if dist > 1e-10 {
        return Err(Error::CrossCheck(format!(
            "flag form deviates from the block construction by trace distance {dist:.3e}"
        )));
    }
    Ok(state)
}

/// One member of the two-qubit decomposition: a weight, the phase carried
/// over from the generating unitary entry, a two-qubit state, and the
/// shield levels gluing its qubits into (A,A') and (B,B').
#[derive(Clone, Debug)]
pub struct TwoQubitTerm {
    pub weight: f64,
    pub phase: f64,
    /// Four-dimensional state of the term's (A-side, B-side) qubit pair.
    pub rho: Operator,
    /// Shield level of A' when the A-side qubit is 0 resp. 1.
    pub a_shield: [usize; 2],
    /// Shield level of B' when the B-side qubit is 0 resp. 1.
    pub b_shield: [usize; 2],
}

/// Decompose the d = 2 class state generated by `u` into a mixture of
/// two-qubit states embedded in product bases of (A,A') x (B,B').
/// Requires |beta| <= ||X^Gamma||, which keeps every member PSD.
pub fn two_qubit_decomposition(
    u: &Operator,
    params: &ClassParams,
) -> Result<Vec<TwoQubitTerm>> {
    if params.d() != 2 || u.dims() != [2] {
        return Err(Error::InvalidParameter(
            "the two-qubit decomposition is defined for d = 2".into(),
        ));
    }
    check_unitary(u)?;
    let u_sum: f64 = u.matrix().iter().map(|z| z.norm()).sum();
    let nxg = 2.0 / u_sum;
    if params.beta().abs() > nxg + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "|beta| = {} exceeds ||X^Gamma|| = {nxg}",
            params.beta().abs()
        )));
    }
    let l = params.lambdas();
    let mut terms = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let uij = u.entry(i, j);
            let m = uij.norm();
            if m <= 1e-15 {
                continue;
            }
            let phase_factor = uij / C64::new(m, 0.0);
            let outer = C64::new((l[0] - l[1]) / 2.0, 0.0) * phase_factor;
            let inner = C64::new((l[2] - l[3]) / (2.0 * nxg), 0.0) * phase_factor;
            let dk = C64::new((l[0] + l[1]) / 2.0, 0.0);
            let dm = C64::new((l[2] + l[3]) / 2.0, 0.0);
            let z = C64::new(0.0, 0.0);
            let entries = [
                [dk, z, z, outer],
                [z, dm, inner, z],
                [z, inner.conj(), dm, z],
                [outer.conj(), z, z, dk],
            ];
            let rho = Operator::from_fn(vec![2, 2], |r, c| entries[r][c])?;
            validate_density(&rho)?;
            terms.push(TwoQubitTerm {
                weight: m / u_sum,
                phase: uij.arg(),
                rho,
                a_shield: [i, j],
                b_shield: [j, i],
            });
        }
    }
    Ok(terms)
}

/// Reassemble the (2,2,2,2) state from its two-qubit decomposition.
pub fn reconstruct_decomposition(terms: &[TwoQubitTerm]) -> Result<Operator> {
    let mut mat = nalgebra::DMatrix::from_element(16, 16, C64::new(0.0, 0.0));
    for t in terms {
        let idx = |m: usize, n: usize| -> usize {
            (((m * 2 + n) * 2 + t.a_shield[m]) * 2) + t.b_shield[n]
        };
        let w = C64::new(t.weight, 0.0);
        for m in 0..2 {
            for n in 0..2 {
                for mp in 0..2 {
                    for np in 0..2 {
                        mat[(idx(m, n), idx(mp, np))] +=
                            w * t.rho.entry(m * 2 + n, mp * 2 + np);
                    }
                }
            }
        }
    }
    Operator::new(vec![2, 2, 2, 2], mat)
}

/// (1 - eps) rho + eps I/n.
pub fn add_white_noise(rho: &Operator, eps: f64) -> Result<Operator> {
    if !(-1e-12..=1.0 + 1e-12).contains(&eps) {
        return Err(Error::InvalidParameter(format!("eps = {eps} outside [0, 1]")));
    }
    let eps = eps.clamp(0.0, 1.0);
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(Error::NotDensityMatrix(format!("trace {tr} is not 1")));
    }
    let mm = Operator::maximally_mixed(rho.dims().to_vec())?;
    Ok(&(rho * (1.0 - eps)) + &(&mm * eps))
}
