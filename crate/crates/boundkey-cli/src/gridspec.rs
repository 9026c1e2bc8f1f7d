//! Scan grid grammar: `p=<axis>,alpha=<axis>,beta=<axis>` where an axis is
//! a single value `v`, an inclusive linear range `a:b:n`, or the keyword
//! `boundary`. For alpha the boundary keyword evaluates min(1, a1) and for
//! beta min(1, 1/a1), with a1 = ((1 - p) / p) / |X^G| at the row's p; rows
//! on that path sit exactly on the partial-transpose feasibility boundary.

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Axis {
    Value(f64),
    Range { a: f64, b: f64, n: usize },
    Boundary,
}

impl Axis {
    fn parse(text: &str) -> Result<Self, CliError> {
        if text == "boundary" {
            return Ok(Axis::Boundary);
        }
        let parts: Vec<&str> = text.split(':').collect();
        let bad = |why: &str| CliError::Usage(format!("bad grid axis {text:?}: {why}"));
        match parts.as_slice() {
            [v] => {
                let v: f64 = v.parse().map_err(|_| bad("not a number"))?;
                if !v.is_finite() {
                    return Err(bad("not finite"));
                }
                Ok(Axis::Value(v))
            }
            [a, b, n] => {
                let a: f64 = a.parse().map_err(|_| bad("start is not a number"))?;
                let b: f64 = b.parse().map_err(|_| bad("end is not a number"))?;
                let n: usize = n.parse().map_err(|_| bad("count is not an integer"))?;
                if !a.is_finite() || !b.is_finite() {
                    return Err(bad("endpoints are not finite"));
                }
                if n == 0 {
                    return Err(bad("count must be positive"));
                }
                if n == 1 && a != b {
                    return Err(bad("a 1-point range needs equal endpoints"));
                }
                Ok(Axis::Range { a, b, n })
            }
            _ => Err(bad("expected v, a:b:n, or boundary")),
        }
    }

    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        match *self {
            Axis::Value(v) => Ok(vec![v]),
            Axis::Range { a, b, n } => {
                if n == 1 {
                    return Ok(vec![a]);
                }
                let step = (b - a) / (n - 1) as f64;
                Ok((0..n)
                    .map(|k| if k == n - 1 { b } else { a + step * k as f64 })
                    .collect())
            }
            Axis::Boundary => Err(CliError::Usage(
                "boundary is only valid for the alpha and beta axes".into(),
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Grid {
    pub p: Axis,
    pub alpha: Axis,
    pub beta: Axis,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut p = None;
        let mut alpha = None;
        let mut beta = None;
        for field in text.split(',') {
            let (name, axis) = field.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("bad grid field {field:?}: expected name=axis"))
            })?;
            let slot = match name {
                "p" => &mut p,
                "alpha" => &mut alpha,
                "beta" => &mut beta,
                _ => {
                    return Err(CliError::Usage(format!(
                        "unknown grid axis {name:?} (expected p, alpha, beta)"
                    )))
                }
            };
            if slot.is_some() {
                return Err(CliError::Usage(format!("duplicate grid axis {name:?}")));
            }
            *slot = Some(Axis::parse(axis)?);
        }
        let missing = |name: &str| CliError::Usage(format!("grid is missing the {name} axis"));
        let p = p.ok_or_else(|| missing("p"))?;
        if p == Axis::Boundary {
            return Err(CliError::Usage(
                "boundary is only valid for the alpha and beta axes".into(),
            ));
        }
        Ok(Grid {
            p,
            alpha: alpha.ok_or_else(|| missing("alpha"))?,
            beta: beta.ok_or_else(|| missing("beta"))?,
        })
    }
}

/// Largest |alpha| and |beta| compatible with a positive partial transpose
/// at this p, clipped to the class domain [0, 1].
pub fn boundary_bounds(p: f64, norm_x_gamma: f64) -> (f64, f64) {
    if p <= 0.0 {
        return (1.0, 0.0);
    }
    if p >= 1.0 {
        return (0.0, 1.0);
    }
    let a1 = ((1.0 - p) / p) / norm_x_gamma;
    (a1.min(1.0), (1.0 / a1).min(1.0))
}
