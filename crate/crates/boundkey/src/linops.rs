//! Dense complex linear algebra over tensor-factored spaces.
//!
//! An [`Operator`] carries its tensor factorization (row-major, left factor
//! slowest), so partial traces, partial transposes, and key-block extraction
//! are index arithmetic rather than data reshuffling. Everything is `f64`
//! precision; entropies are in bits (log base 2).

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Relative tolerance of the Hermiticity check applied before eigensolving.
/// Inputs within it are symmetrized; beyond it they are rejected.
pub const HERMITICITY_TOL: f64 = 1e-9;

/// Eigenvalues of a nominally PSD operator below `-PSD_TOL` are errors;
/// values in `[-PSD_TOL, 0]` are clipped to zero.
pub const PSD_TOL: f64 = 1e-9;

/// A square operator on a tensor product of finite-dimensional factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn new(dims: Vec<usize>, mat: DMatrix<C64>) -> Result<Self> {
        let side: usize = dims.iter().product();
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::DimensionMismatch(format!(
                "factor dimensions must be positive, got {dims:?}"
            )));
        }
        if mat.nrows() != side || mat.ncols() != side {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but dims {:?} require side {}",
                mat.nrows(),
                mat.ncols(),
                dims,
                side
            )));
        }
        Ok(Self { dims, mat })
    }

    pub fn from_fn(dims: Vec<usize>, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let side: usize = dims.iter().product();
        let mut f = f;
        let mat = DMatrix::from_fn(side, side, |r, c| f(r, c));
        Self::new(dims, mat)
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let side: usize = dims.iter().product();
        Self::new(dims, DMatrix::zeros(side, side))
    }

    pub fn identity(dims: Vec<usize>) -> Result<Self> {
        let side: usize = dims.iter().product();
        Self::new(dims, DMatrix::identity(side, side))
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let side: usize = dims.iter().product();
        let mut op = Self::identity(dims)?;
        op.mat /= C64::new(side as f64, 0.0);
        Ok(op)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn side(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn entry(&self, r: usize, c: usize) -> C64 {
        self.mat[(r, c)]
    }

    pub fn trace(&self) -> C64 {
        self.mat.diagonal().sum()
    }

    pub fn adjoint(&self) -> Self {
        Self { dims: self.dims.clone(), mat: self.mat.adjoint() }
    }

    /// Plain (unconjugated) transpose.
    pub fn transpose(&self) -> Self {
        Self { dims: self.dims.clone(), mat: self.mat.transpose() }
    }

    /// Entrywise complex conjugate.
    pub fn conjugate(&self) -> Self {
        Self { dims: self.dims.clone(), mat: self.mat.map(|z| z.conj()) }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dims: self.dims.clone(), mat: &self.mat * s }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus among entries of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dims, other.dims, "operator dims differ");
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest modulus among entries of `M - M^dagger`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.side();
        let mut dev: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                dev = dev.max((self.mat[(r, c)] - self.mat[(c, r)].conj()).norm());
            }
        }
        dev
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "operator dims differ");
        Operator { dims: self.dims.clone(), mat: &self.mat + &rhs.mat }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "operator dims differ");
        Operator { dims: self.dims.clone(), mat: &self.mat - &rhs.mat }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "operator dims differ");
        Operator { dims: self.dims.clone(), mat: &self.mat * &rhs.mat }
    }
}

impl std::ops::Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(C64::new(rhs, 0.0))
    }
}

/// Tensor (Kronecker) product; the factor lists concatenate.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    Operator { dims, mat: a.mat.kronecker(&b.mat) }
}

fn check_factors(op: &Operator, factors: &[usize]) -> Result<()> {
    let nf = op.dims.len();
    for (i, &f) in factors.iter().enumerate() {
        if f >= nf {
            return Err(Error::DimensionMismatch(format!(
                "factor index {f} out of range for {nf} factors"
            )));
        }
        if factors[..i].contains(&f) {
            return Err(Error::DimensionMismatch(format!("factor index {f} repeated")));
        }
    }
    Ok(())
}

/// Row-major digit decomposition of every flat index, most significant first.
fn digit_table(dims: &[usize]) -> Vec<Vec<usize>> {
    let side: usize = dims.iter().product();
    let mut table = Vec::with_capacity(side);
    for mut x in 0..side {
        let mut d = vec![0usize; dims.len()];
        for k in (0..dims.len()).rev() {
            d[k] = x % dims[k];
            x /= dims[k];
        }
        table.push(d);
    }
    table
}

fn flat(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &m)| acc * m + d)
}

/// Transpose the listed tensor factors in place of a full transpose.
pub fn partial_transpose(op: &Operator, factors: &[usize]) -> Result<Operator> {
    check_factors(op, factors)?;
    let n = op.side();
    let digits = digit_table(&op.dims);
    let mut out = DMatrix::zeros(n, n);
    let mut rd = vec![0usize; op.dims.len()];
    let mut cd = vec![0usize; op.dims.len()];
    for r in 0..n {
        for c in 0..n {
            rd.copy_from_slice(&digits[r]);
            cd.copy_from_slice(&digits[c]);
            for &f in factors {
                std::mem::swap(&mut rd[f], &mut cd[f]);
            }
            out[(flat(&rd, &op.dims), flat(&cd, &op.dims))] = op.mat[(r, c)];
        }
    }
    Ok(Operator { dims: op.dims.clone(), mat: out })
}

/// Partial transpose over the B-side cut: factor 1 of an (A,B) operator,
/// factors 1 and 3 of an (A,B,A',B') operator.
pub fn gamma(op: &Operator) -> Result<Operator> {
    match op.dims.len() {
        2 => partial_transpose(op, &[1]),
        4 => partial_transpose(op, &[1, 3]),
        n => Err(Error::DimensionMismatch(format!(
            "the B-side cut is defined for 2 or 4 factors, got {n}"
        ))),
    }
}

/// Trace out the listed tensor factors.
pub fn partial_trace(op: &Operator, traced: &[usize]) -> Result<Operator> {
    check_factors(op, traced)?;
    if traced.len() == op.dims.len() {
        return Err(Error::DimensionMismatch(
            "cannot trace out every factor; use trace()".into(),
        ));
    }
    let kept: Vec<usize> =
        (0..op.dims.len()).filter(|k| !traced.contains(k)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| op.dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| op.dims[k]).collect();
    let digits = digit_table(&op.dims);
    let n = op.side();
    let m: usize = kept_dims.iter().product();
    let mut kept_flat = vec![0usize; n];
    let mut tr_flat = vec![0usize; n];
    for i in 0..n {
        let kd: Vec<usize> = kept.iter().map(|&k| digits[i][k]).collect();
        let td: Vec<usize> = traced.iter().map(|&k| digits[i][k]).collect();
        kept_flat[i] = flat(&kd, &kept_dims);
        tr_flat[i] = flat(&td, &traced_dims);
    }
    let mut out = DMatrix::zeros(m, m);
    for r in 0..n {
        for c in 0..n {
            if tr_flat[r] == tr_flat[c] {
                out[(kept_flat[r], kept_flat[c])] += op.mat[(r, c)];
            }
        }
    }
    Operator::new(kept_dims, out)
}

/// Sum of singular values.
pub fn trace_norm(op: &Operator) -> f64 {
    let svd = nalgebra::SVD::new(op.mat.clone(), false, false);
    svd.singular_values.iter().sum()
}

/// Eigendecomposition of a Hermitian operator, eigenvalues descending.
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, matching `eigenvalues` order.
    pub eigenvectors: DMatrix<C64>,
}

fn symmetrized(op: &Operator) -> Result<DMatrix<C64>> {
    let dev = op.hermiticity_deviation();
    let tol = HERMITICITY_TOL * op.max_abs().max(f64::MIN_POSITIVE);
    if dev > tol {
        return Err(Error::NotHermitian { deviation: dev, tolerance: tol });
    }
    Ok((&op.mat + op.mat.adjoint()) * C64::new(0.5, 0.0))
}

fn decomposition_residual(h: &DMatrix<C64>, vals: &[f64], vecs: &DMatrix<C64>) -> f64 {
    let n = vals.len();
    let lambda = DMatrix::from_fn(n, n, |r, c| {
        if r == c { C64::new(vals[r], 0.0) } else { C64::new(0.0, 0.0) }
    });
    let rebuilt = vecs * lambda * vecs.adjoint();
    (h - rebuilt).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Cyclic Jacobi diagonalization. Slower than the tridiagonal solver but
/// immune to its failure mode on graded, highly degenerate inputs (which
/// the Fourier-generated shield blocks hit at some dimensions): every
/// rotation is an exact 2x2 solve, and near-diagonal matrices converge in
/// a handful of skipped sweeps.
fn jacobi_hermitian(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = h.nrows();
    let mut a = h.clone();
    let mut v = DMatrix::<C64>::identity(n, n);
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let thr = 1e-15 * scale.max(f64::MIN_POSITIVE);
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let napq = apq.norm();
                if napq <= thr {
                    continue;
                }
                rotated = true;
                let phase = apq / C64::new(napq, 0.0);
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * napq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let (c, s) = (C64::new(c, 0.0), C64::new(s, 0.0));
                for r in 0..n {
                    let (arp, arq) = (a[(r, p)], a[(r, q)]);
                    a[(r, p)] = c * arp - s * phase.conj() * arq;
                    a[(r, q)] = s * arp + c * phase.conj() * arq;
                    let (vrp, vrq) = (v[(r, p)], v[(r, q)]);
                    v[(r, p)] = c * vrp - s * phase.conj() * vrq;
                    v[(r, q)] = s * vrp + c * phase.conj() * vrq;
                }
                for r in 0..n {
                    let (apr, aqr) = (a[(p, r)], a[(q, r)]);
                    a[(p, r)] = c * apr - s * phase * aqr;
                    a[(q, r)] = s * apr + c * phase * aqr;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

fn sorted_spectrum(vals: Vec<f64>, vecs: DMatrix<C64>) -> Spectrum {
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        eigenvectors.set_column(col, &vecs.column(i));
    }
    Spectrum { eigenvalues, eigenvectors }
}

pub fn hermitian_eigen(op: &Operator) -> Result<Spectrum> {
    let h = symmetrized(op)?;
    let n = h.nrows();
    let tol = (n as f64).max(8.0) * 1e-13 * h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if vals.iter().all(|l| l.is_finite())
        && decomposition_residual(&h, &vals, &eig.eigenvectors) <= tol
    {
        return Ok(sorted_spectrum(vals, eig.eigenvectors));
    }
    let (vals, vecs) = jacobi_hermitian(&h);
    let residual = decomposition_residual(&h, &vals, &vecs);
    if !vals.iter().all(|l| l.is_finite()) || residual > tol {
        return Err(Error::CrossCheck(format!(
            "eigendecomposition residual {residual} exceeds {tol} even after the Jacobi fallback"
        )));
    }
    Ok(sorted_spectrum(vals, vecs))
}

/// Eigenvalues of a Hermitian operator, descending, without eigenvectors.
pub fn hermitian_eigenvalues(op: &Operator) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(op)?.eigenvalues)
}

/// Von Neumann entropy in bits of a unit-trace PSD operator.
pub fn von_neumann_entropy(op: &Operator) -> Result<f64> {
    let ev = hermitian_eigenvalues(op)?;
    let tr: f64 = ev.iter().sum();
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::NotDensityMatrix(format!("trace {tr} is not 1")));
    }
    let mut s = 0.0;
    for &l in &ev {
        if l < -PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue: l });
        }
        let l = l.clamp(0.0, 1.0);
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s)
}

/// Shannon entropy in bits of a probability vector.
pub fn shannon_entropy(probs: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    let mut s = 0.0;
    for &p in probs {
        if p < -1e-12 {
            return Err(Error::InvalidParameter(format!("negative probability {p}")));
        }
        let p = p.max(0.0);
        sum += p;
        if p > 0.0 {
            s -= p * p.log2();
        }
    }
    if (sum - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!("probabilities sum to {sum}")));
    }
    Ok(s)
}

/// Binary entropy H(x) in bits.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(Error::InvalidParameter(format!("binary entropy argument {x}")));
    }
    let x = x.clamp(0.0, 1.0);
    let h = |t: f64| if t > 0.0 { -t * t.log2() } else { 0.0 };
    Ok(h(x) + h(1.0 - x))
}

/// Square root of a PSD operator. Eigenvalues below `1e-12` of the largest
/// are clipped to zero first, so near-rank-deficient inputs do not leak
/// O(sqrt(eps)) noise into the root.
pub fn sqrt_psd(op: &Operator) -> Result<Operator> {
    let spec = hermitian_eigen(op)?;
    let lmax = spec.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let n = op.side();
    let mut d = DMatrix::zeros(n, n);
    for (i, &l) in spec.eigenvalues.iter().enumerate() {
        if l < -PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue: l });
        }
        let l = if l <= lmax * 1e-12 { 0.0 } else { l };
        d[(i, i)] = C64::new(l.sqrt(), 0.0);
    }
    let v = &spec.eigenvectors;
    let mat = v * d * v.adjoint();
    Operator::new(op.dims.clone(), mat)
}

/// Square-root purification: returns the amplitude vector of a pure state on
/// system x environment whose system marginal is `rho`, together with the
/// full factor list (environment appended as one factor of dimension
/// `rho.side()`).
pub fn purify(rho: &Operator) -> Result<(DVector<C64>, Vec<usize>)> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(Error::NotDensityMatrix(format!("trace {tr} is not 1")));
    }
    let s = sqrt_psd(rho)?;
    let n = rho.side();
    let amps = DVector::from_fn(n * n, |k, _| s.mat[(k / n, k % n)]);
    let mut dims = rho.dims.clone();
    dims.push(n);
    Ok((amps, dims))
}

/// Outer product |v><v| as an operator with the given factorization.
pub fn projector(amps: &DVector<C64>, dims: &[usize]) -> Result<Operator> {
    let side: usize = dims.iter().product();
    if amps.len() != side {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} does not match dims {:?}",
            amps.len(),
            dims
        )));
    }
    Operator::new(dims.to_vec(), amps * amps.adjoint())
}

/// Extract block (r,c) of the 4x4 key-part layout of an operator on
/// (2,2,rest...): rows and columns grouped by the AB index 2a+b.
pub fn key_block(op: &Operator, r: usize, c: usize) -> Result<Operator> {
    if op.dims.len() < 3 || op.dims[0] != 2 || op.dims[1] != 2 {
        return Err(Error::DimensionMismatch(format!(
            "key blocks require a (2,2,...) operator, got dims {:?}",
            op.dims
        )));
    }
    if r >= 4 || c >= 4 {
        return Err(Error::DimensionMismatch(format!("block index ({r},{c}) out of range")));
    }
    let m = op.side() / 4;
    let mat = op.mat.view((r * m, c * m), (m, m)).into_owned();
    Operator::new(op.dims[2..].to_vec(), mat)
}

/// Assemble an operator on (2,2,shield...) from its 4x4 key-part block
/// table; `None` blocks are zero.
pub fn from_key_blocks(
    shield_dims: &[usize],
    blocks: [[Option<&Operator>; 4]; 4],
) -> Result<Operator> {
    let m: usize = shield_dims.iter().product();
    let mut mat = DMatrix::zeros(4 * m, 4 * m);
    for (r, row) in blocks.iter().enumerate() {
        for (c, b) in row.iter().enumerate() {
            if let Some(b) = b {
                if b.dims() != shield_dims {
                    return Err(Error::DimensionMismatch(format!(
                        "block ({r},{c}) has dims {:?}, expected {:?}",
                        b.dims(),
                        shield_dims
                    )));
                }
                mat.view_mut((r * m, c * m), (m, m)).copy_from(&b.mat);
            }
        }
    }
    let mut dims = vec![2, 2];
    dims.extend_from_slice(shield_dims);
    Operator::new(dims, mat)
}

/// Validate a state: Hermitian, PSD within `PSD_TOL`, unit trace within 1e-10.
pub fn validate_density(op: &Operator) -> Result<()> {
    let tr = op.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(Error::NotDensityMatrix(format!("trace {tr} is not 1")));
    }
    let ev = hermitian_eigenvalues(op)?;
    let min = ev.last().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(())
}
