use exactalg::{Poly, RingMatrix};
use serde::{Deserialize, Serialize};

use crate::{is_unit_constant, DualError, QuadraticDual};

/// Pairing Ũ^⊥i ⊗ Ũ^⊥(n+1−i) → ω_L in the trivialization σ_{1..n}·e.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusPairing {
    pub degree: i64,
    /// Entry (a, b) = ⟨basis_i[a], basis_{n+1−i}[b]⟩.
    pub matrix: Vec<Vec<String>>,
    pub left_determinant: String,
    pub right_determinant: String,
    pub left_invertible: bool,
    pub right_invertible: bool,
    /// Whether ⟨a, b⟩ = (−1)^{i(n+1−i)} ⟨b, a⟩, so that dualizing twice is the
    /// identity up to that sign.
    pub graded_symmetric: bool,
    #[serde(skip)]
    pub raw: Option<RingMatrix>,
}

pub(crate) fn pairing_matrix(dual: &QuadraticDual, i: i64) -> RingMatrix {
    let top = dual.omega();
    let j = dual.n() as i64 + 1 - i;
    let entries: Vec<Vec<Poly>> = dual
        .basis(i)
        .iter()
        .map(|a| {
            dual.basis(j)
                .iter()
                .map(|b| dual.mul_mono(a, b).terms.get(&top).cloned().unwrap_or_else(Poly::zero))
                .collect()
        })
        .collect();
    if entries.is_empty() {
        RingMatrix::zeros(0, dual.rank(j))
    } else {
        RingMatrix::new(entries)
    }
}

pub fn frobenius_pairing(dual: &QuadraticDual, i: i64) -> Result<FrobeniusPairing, DualError> {
    let n1 = dual.n() as i64 + 1;
    if !(0..=n1).contains(&i) {
        return Err(DualError::OutOfRange(i));
    }
    let p = pairing_matrix(dual, i);
    let q = pairing_matrix(dual, n1 - i);
    let det_p = p.determinant().map_err(|e| DualError::TheoremViolation(e.to_string()))?;
    let det_pt = p.transpose().determinant().map_err(|e| DualError::TheoremViolation(e.to_string()))?;
    let sign = if (i * (n1 - i)) % 2 == 0 { Poly::one() } else { -Poly::one() };
    let qt = q.transpose();
    let graded_symmetric = p.rows == qt.rows
        && p.cols == qt.cols
        && p.entries.iter().zip(&qt.entries).all(|(r, s)| r.iter().zip(s).all(|(x, y)| *x == &sign * y));
    let base = &dual.presentation().base;
    let out = FrobeniusPairing {
        degree: i,
        matrix: p.entries.iter().map(|r| r.iter().map(|x| base.display(x)).collect()).collect(),
        left_determinant: base.display(&det_p),
        right_determinant: base.display(&det_pt),
        left_invertible: p.rows == p.cols && is_unit_constant(&det_p),
        right_invertible: p.rows == p.cols && is_unit_constant(&det_pt),
        graded_symmetric,
        raw: Some(p),
    };
    if !(out.left_invertible && out.right_invertible) {
        return Err(DualError::TheoremViolation(format!("pairing in degree {i} is degenerate")));
    }
    Ok(out)
}
