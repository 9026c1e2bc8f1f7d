//! On-disk state format: JSON with explicit factor dims, a fixed factor
//! order tag, the full matrix as [re, im] pairs, and free-form metadata.
//! Serialization uses shortest round-trip floats, so parse -> serialize is
//! bit-identical for files this tool wrote.

use std::fs;
use std::path::Path;

use boundkey::{C64, Operator};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;
pub const FACTOR_ORDER: &str = "A,B,A',B'";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub format: u32,
    pub dims: Vec<usize>,
    pub order: String,
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub metadata: serde_json::Map<String, serde_json::Value>,
}

impl StateFile {
    pub fn from_operator(
        op: &Operator,
        metadata: serde_json::Map<String, serde_json::Value>,
    ) -> Self {
        let n = op.side();
        let matrix = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let z = op.entry(r, c);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        StateFile {
            format: FORMAT_VERSION,
            dims: op.dims().to_vec(),
            order: FACTOR_ORDER.to_string(),
            matrix,
            metadata,
        }
    }

    pub fn to_operator(&self) -> Result<Operator, CliError> {
        if self.format != FORMAT_VERSION {
            return Err(CliError::Usage(format!(
                "unsupported format {} (expected {FORMAT_VERSION})",
                self.format
            )));
        }
        if self.order != FACTOR_ORDER {
            return Err(CliError::Usage(format!(
                "unsupported factor order {:?} (expected {FACTOR_ORDER:?})",
                self.order
            )));
        }
        if self.dims.len() != 4 || self.dims[0] != 2 || self.dims[1] != 2 {
            return Err(CliError::Usage(format!(
                "dims {:?} are not a (2, 2, d, d) system",
                self.dims
            )));
        }
        if self.dims[2] != self.dims[3] {
            return Err(CliError::Usage(format!(
                "shield dims {:?} are not square",
                &self.dims[2..]
            )));
        }
        let side: usize = self.dims.iter().product();
        if self.matrix.len() != side || self.matrix.iter().any(|row| row.len() != side) {
            return Err(CliError::Usage(format!(
                "matrix shape does not match dims {:?} (side {side})",
                self.dims
            )));
        }
        for row in &self.matrix {
            for [re, im] in row {
                if !re.is_finite() || !im.is_finite() {
                    return Err(CliError::Usage("matrix contains non-finite entries".into()));
                }
            }
        }
        Operator::from_fn(self.dims.clone(), |r, c| {
            let [re, im] = self.matrix[r][c];
            C64::new(re, im)
        })
        .map_err(CliError::from)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("cannot parse {}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string(self)
            .map_err(|e| CliError::Usage(format!("cannot serialize state: {e}")))?;
        fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use boundkey::states::{class_c_state, hadamard, ClassParams, XYPair};

    fn sample() -> StateFile {
        let xy = XYPair::from_unitary(&hadamard()).unwrap();
        let rho =
            class_c_state(&ClassParams::new(2, 0.6, 0.5, 0.25).unwrap(), &xy).unwrap();
        let mut meta = serde_json::Map::new();
        meta.insert("class".into(), "rho_U".into());
        meta.insert("p".into(), 0.6.into());
        StateFile::from_operator(&rho, meta)
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let text = serde_json::to_string(&sample()).unwrap();
        let parsed: StateFile = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&parsed).unwrap(), text);
    }

    #[test]
    fn operator_round_trip_is_exact() {
        let sf = sample();
        let op = sf.to_operator().unwrap();
        let back = StateFile::from_operator(&op, sf.metadata.clone());
        assert_eq!(back.matrix, sf.matrix);
        assert_eq!(back.dims, sf.dims);
    }

    #[test]
    fn shape_and_order_are_enforced() {
        let mut sf = sample();
        sf.order = "B,A,B',A'".into();
        assert!(sf.to_operator().is_err());
        let mut sf = sample();
        sf.dims = vec![2, 2, 2, 3];
        assert!(sf.to_operator().is_err());
        let mut sf = sample();
        sf.matrix[0][0] = [f64::NAN, 0.0];
        assert!(sf.to_operator().is_err());
        let mut sf = sample();
        sf.format = 2;
        assert!(sf.to_operator().is_err());
    }
}
