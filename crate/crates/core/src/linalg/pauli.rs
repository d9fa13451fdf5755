use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, Mat2, MAX_QUBITS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const NON_IDENTITY: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn matrix(self) -> Mat2 {
        match self {
            PauliAxis::I => Mat2::IDENTITY,
            PauliAxis::X => Mat2::PAULI_X,
            PauliAxis::Y => Mat2::PAULI_Y,
            PauliAxis::Z => Mat2::PAULI_Z,
        }
    }

    pub fn is_identity(self) -> bool {
        self == PauliAxis::I
    }

    pub fn as_char(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }
}

impl TryFrom<char> for PauliAxis {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(PauliAxis::I),
            'X' => Ok(PauliAxis::X),
            'Y' => Ok(PauliAxis::Y),
            'Z' => Ok(PauliAxis::Z),
            other => Err(Error::invalid(format!("unknown Pauli axis '{other}'"))),
        }
    }
}

/// Tensor product of single-qubit Paulis with at least one non-identity factor.
///
/// `axes[q]` is the factor acting on qubit `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProductOperator {
    axes: Vec<PauliAxis>,
}

impl ProductOperator {
    pub fn new(axes: Vec<PauliAxis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::invalid("product operator needs at least one qubit"));
        }
        if axes.len() > MAX_QUBITS {
            return Err(Error::QubitCap {
                requested: axes.len(),
                cap: MAX_QUBITS,
            });
        }
        if axes.iter().all(|a| a.is_identity()) {
            return Err(Error::invalid(
                "product operator must have a non-identity factor",
            ));
        }
        Ok(Self { axes })
    }

    /// Builds an operator from a sparse description, e.g. qubits `[0, 2]`
    /// with axes `"XZ"` on a 3-qubit register.
    pub fn from_sparse(n_qubits: usize, qubits: &[usize], axes: &str) -> Result<Self> {
        let letters: Vec<char> = axes.chars().collect();
        if letters.len() != qubits.len() {
            return Err(Error::invalid(format!(
                "axis string \"{axes}\" has {} letters for {} qubits",
                letters.len(),
                qubits.len()
            )));
        }
        let mut full = vec![PauliAxis::I; n_qubits];
        for (&q, &c) in qubits.iter().zip(&letters) {
            if q >= n_qubits {
                return Err(Error::QubitIndex {
                    index: q,
                    n_qubits,
                });
            }
            if !full[q].is_identity() {
                return Err(Error::invalid(format!("qubit {q} listed twice")));
            }
            let axis = PauliAxis::try_from(c)?;
            if axis.is_identity() {
                return Err(Error::invalid(format!(
                    "identity factor listed explicitly on qubit {q}"
                )));
            }
            full[q] = axis;
        }
        Self::new(full)
    }

    pub fn n_qubits(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    pub fn axis(&self, qubit: usize) -> PauliAxis {
        self.axes[qubit]
    }

    pub fn hamming_weight(&self) -> usize {
        self.axes.iter().filter(|a| !a.is_identity()).count()
    }

    /// Qubits with a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_identity())
            .map(|(q, _)| q)
            .collect()
    }

    /// Dense matrix of the operator.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(1 << self.axes.len());
        self.accumulate_into(&mut m, 1.0);
        m
    }

    /// Adds `coeff * O` to `target`. Uses the monomial structure of Pauli
    /// strings: each row has exactly one non-zero entry.
    pub fn accumulate_into(&self, target: &mut ComplexMatrix, coeff: f64) {
        let dim = 1usize << self.axes.len();
        assert_eq!(target.dim(), dim, "operator and target dimensions differ");
        let flip = self.flip_mask();
        for row in 0..dim {
            target[(row, row ^ flip)] += self.row_phase(row) * coeff;
        }
    }

    /// Basis bits toggled by the operator: `O|i⟩ ∝ |i ^ flip⟩`.
    pub(crate) fn flip_mask(&self) -> usize {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a, PauliAxis::X | PauliAxis::Y))
            .map(|(q, _)| 1 << q)
            .sum()
    }

    /// `⟨row|O|row ^ flip⟩`.
    pub(crate) fn row_phase(&self, row: usize) -> Complex64 {
        let mut phase = Complex64::new(1.0, 0.0);
        for (q, a) in self.axes.iter().enumerate() {
            let bit = (row >> q) & 1;
            match a {
                PauliAxis::I | PauliAxis::X => {}
                // σ_y: ⟨0|σ_y|1⟩ = -i, ⟨1|σ_y|0⟩ = i
                PauliAxis::Y => {
                    phase *= if bit == 0 {
                        Complex64::new(0.0, -1.0)
                    } else {
                        Complex64::new(0.0, 1.0)
                    }
                }
                PauliAxis::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        phase
    }

    /// Compact label listing non-identity factors, e.g. `X0Z2`.
    pub fn label(&self) -> String {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_identity())
            .map(|(q, a)| format!("{}{}", a.as_char(), q))
            .collect()
    }
}

impl fmt::Display for ProductOperator {
    /// Dense form with qubit 0 rightmost, e.g. `ZIX`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.axes.iter().rev() {
            write!(f, "{}", a.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for ProductOperator {
    type Err = Error;

    /// Parses the dense form produced by `Display` (qubit 0 rightmost).
    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .chars()
            .rev()
            .map(PauliAxis::try_from)
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;

    fn kron_route(op: &ProductOperator) -> ComplexMatrix {
        let mut m = op.axis(op.n_qubits() - 1).matrix().to_matrix();
        for q in (0..op.n_qubits() - 1).rev() {
            m = kron(&m, &op.axis(q).matrix().to_matrix()).unwrap();
        }
        m
    }

    #[test]
    fn monomial_matrix_matches_kronecker_route() {
        for label in ["X", "Y", "Z", "XY", "YZ", "ZIY", "YYX", "IXZY"] {
            let op: ProductOperator = label.parse().unwrap();
            assert!(
                op.to_matrix().max_abs_diff(&kron_route(&op)) < 1e-15,
                "{label}"
            );
        }
    }

    #[test]
    fn identity_only_is_rejected() {
        assert!("III".parse::<ProductOperator>().is_err());
    }

    #[test]
    fn sparse_construction_and_weight() {
        let op = ProductOperator::from_sparse(3, &[0, 2], "XZ").unwrap();
        assert_eq!(op.to_string(), "ZIX");
        assert_eq!(op.hamming_weight(), 2);
        assert_eq!(op.support(), vec![0, 2]);
        assert_eq!(op.label(), "X0Z2");
    }

    #[test]
    fn sparse_construction_errors() {
        assert!(ProductOperator::from_sparse(2, &[0, 2], "XZ").is_err());
        assert!(ProductOperator::from_sparse(2, &[0, 0], "XZ").is_err());
        assert!(ProductOperator::from_sparse(2, &[0], "XZ").is_err());
        assert!(ProductOperator::from_sparse(2, &[0], "Q").is_err());
    }
}
