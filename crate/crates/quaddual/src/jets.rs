use exactalg::{Poly, RingMatrix};
use rees::ReesAlgebra;

use crate::DualError;

/// J^i = *(U^i), the left O-dual of U^i, on the basis dual to the PBW basis.
/// O acts by (f·j)(u) = j(u f) on the left and (j·f)(u) = j(u) f on the right.
#[derive(Clone, Debug)]
pub struct JetBimodule {
    pub level: u32,
    pub rank: usize,
}

impl JetBimodule {
    pub fn new(alg: &ReesAlgebra, level: u32) -> Self {
        JetBimodule { level, rank: alg.dim(level as i64) }
    }

    /// Matrix of j ↦ f·j: row a holds the coordinates of f·j_a, i.e. entry (a, b)
    /// is the coefficient of u_a in u_b·f.
    pub fn left_action(&self, alg: &ReesAlgebra, f: &Poly) -> Result<RingMatrix, DualError> {
        let piece = alg.graded_piece(self.level);
        let mut m = RingMatrix::zeros(self.rank, self.rank);
        for (b, u) in piece.basis.iter().enumerate() {
            let c = alg.coords(&alg.mono_times_func(u, f), self.level)?;
            for (a, x) in c.into_iter().enumerate() {
                m.entries[a][b] = x;
            }
        }
        Ok(m)
    }

    /// Right action by f: diagonal.
    pub fn right_action(&self, f: &Poly) -> RingMatrix {
        let mut m = RingMatrix::zeros(self.rank, self.rank);
        for a in 0..self.rank {
            m.entries[a][a] = f.clone();
        }
        m
    }

    /// For J¹: the σ's span a sub-bimodule and e ↦ 1 is a bimodule map onto O.
    /// Checked on the base variables.
    pub fn first_jet_sequence_holds(alg: &ReesAlgebra) -> Result<bool, DualError> {
        let j1 = JetBimodule::new(alg, 1);
        for v in 0..alg.presentation().nvars() {
            let f = Poly::var(v);
            let l = j1.left_action(alg, &f)?;
            // rows 1..: f·σ_k has no e-component; row 0: e-component of f·e is f
            if (1..j1.rank).any(|a| !l.entries[a][0].is_zero()) || l.entries[0][0] != f {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
