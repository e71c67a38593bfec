//! Ext_Ũ(O, O) at a point base from a minimal free resolution of ℚ, with
//! Yoneda products of degree-one classes computed by lifting to chain maps.

use exactalg::{QMat, Rat, SparseVec};
use num_traits::{One, Zero};
use rees::resolution::{FreeMap, FreeModule, Resolution};
use rees::ReesAlgebra;
use serde::{Deserialize, Serialize};

use crate::{DualError, QuadraticDual};

/// Which word order of the product table the Yoneda products reproduce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// ξ_1 ∗ (ξ_2 ∗ …) corresponds to g_1·g_2·…
    Same,
    /// ξ_1 ∗ (ξ_2 ∗ …) corresponds to …·g_2·g_1
    Opposite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtReport {
    pub pass: bool,
    pub window: usize,
    pub ext_dims: Vec<usize>,
    pub dual_dims: Vec<usize>,
    /// Every Ext^k is concentrated in internal degree −k.
    pub diagonal: bool,
    /// The resolution is minimal, so Hom(P, ℚ) has zero differential.
    pub hom_boundary_vanishes: bool,
    /// Words checked per degree.
    pub words: Vec<usize>,
    pub orientation: Option<Orientation>,
    /// Whether the reversed word order also matches (it does when Ũ^⊥ is
    /// isomorphic to its opposite through the identity on generators).
    pub opposite_matches: bool,
    pub e_squared_vanishes: bool,
    pub failure: Option<String>,
}

/// Row-image matrix of words of length k in the n+1 degree-one generators.
fn all_words(n1: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|w| (0..n1).map(move |g| {
            let mut w = w.clone();
            w.push(g);
            w
        })).collect();
    }
    out
}

pub fn ext_algebra_check(alg: &ReesAlgebra, dual: &QuadraticDual, window: usize) -> Result<ExtReport, DualError> {
    if !alg.base_is_field() {
        return Err(DualError::NeedsPointBase);
    }
    let n1 = alg.n() + 1;
    let top = window.max(n1);
    let res = Resolution::of_truncation(alg, 1, top + 1, top as i64)?;
    let ext_dims: Vec<usize> = (0..=window).map(|k| res.modules.get(k).map_or(0, |m| m.rank())).collect();
    let dual_dims: Vec<usize> = (0..=window).map(|k| dual.rank(k as i64)).collect();
    let diagonal = res.modules.iter().enumerate().all(|(k, m)| m.degrees.iter().all(|&d| d == k as i64));
    let hom_boundary_vanishes = res.is_minimal(alg);
    let mut report = ExtReport {
        pass: false,
        window,
        ext_dims: ext_dims.clone(),
        dual_dims: dual_dims.clone(),
        diagonal,
        hom_boundary_vanishes,
        words: vec![],
        orientation: None,
        opposite_matches: false,
        e_squared_vanishes: false,
        failure: None,
    };
    if ext_dims != dual_dims || !diagonal || !hom_boundary_vanishes {
        report.failure = Some("Ext dimensions differ from the dual".into());
        return Ok(report);
    }
    // P_1 generators must be t, l_1, …, l_n in order, so that Ext¹ has the basis e, σ_k
    let p1 = &res.modules[1];
    let gens_ok = p1.rank() == n1 && res.maps[0].images.iter().enumerate().all(|(g, v)| *v == vec![(g, Rat::one())]);
    if !gens_ok {
        report.failure = Some("unexpected generators of P_1".into());
        return Ok(report);
    }
    // lift each ξ_g: P_1 → ℚ to a chain map P_{1+k} → P_k
    let steps = window.min(n1);
    let mut lifts = Vec::with_capacity(n1);
    for g in 0..n1 {
        let phi0 = FreeMap {
            source: p1.clone(),
            target: FreeModule::new(vec![0]),
            shift: -1,
            images: (0..n1).map(|h| if h == g { vec![(0, Rat::one())] } else { vec![] }).collect(),
        };
        let l = res.lift(alg, 1, phi0, steps).map_err(|e| DualError::TheoremViolation(e.to_string()))?;
        lifts.push(l);
    }
    // A[g][k]: Ext^k → Ext^{k+1}, η ↦ ξ_g ∗ η, as a matrix with rows = P_{k+1} gens
    let ystep = |g: usize, k: usize, eta: &SparseVec<Rat>| -> SparseVec<Rat> {
        let map = &lifts[g][k];
        let mut out = Vec::new();
        for (h, img) in map.images.iter().enumerate() {
            let deg = map.source.degrees[h] + map.shift;
            let gp = Resolution::generator_part(alg, &map.target, deg, img);
            let mut acc = Rat::zero();
            for (c, x) in gp {
                if let Ok(pos) = eta.binary_search_by_key(&c, |(i, _)| *i) {
                    acc += x * &eta[pos].1;
                }
            }
            if !acc.is_zero() {
                out.push((h, acc));
            }
        }
        out
    };
    let mut orientation_ok = [true, true];
    for k in 1..=steps {
        let words = all_words(n1, k);
        report.words.push(words.len());
        let yoneda: Vec<SparseVec<Rat>> = words
            .iter()
            .map(|w| {
                let mut eta: SparseVec<Rat> = vec![(w[k - 1], Rat::one())];
                for j in (0..k - 1).rev() {
                    eta = ystep(w[j], k - 1 - j, &eta);
                }
                eta
            })
            .collect();
        let ya = QMat::from_rows(res.modules[k].rank(), yoneda);
        for (o, reversed) in [(0, false), (1, true)] {
            let table: Vec<SparseVec<Rat>> = words
                .iter()
                .map(|w| {
                    let mut x = dual.one();
                    let it: Box<dyn Iterator<Item = &usize>> = if reversed { Box::new(w.iter().rev()) } else { Box::new(w.iter()) };
                    for g in it {
                        x = dual.mul(&x, &dual.generator(*g));
                    }
                    let c = dual.coords(&x, k as i64).expect("homogeneous");
                    c.iter()
                        .enumerate()
                        .filter(|(_, p)| !p.is_zero())
                        .map(|(i, p)| (i, p.as_constant().expect("point base")))
                        .collect()
                })
                .collect();
            let tb = QMat::from_rows(dual.rank(k as i64), table);
            // same kernel on words ⇔ rank A = rank B = rank [A | B]
            let joined = QMat::from_rows(
                ya.ncols + tb.ncols,
                ya.rows
                    .iter()
                    .zip(&tb.rows)
                    .map(|(a, b)| a.iter().cloned().chain(b.iter().map(|(i, x)| (i + ya.ncols, x.clone()))).collect())
                    .collect(),
            );
            let (ra, rb, rj) = (ya.rank(), tb.rank(), joined.rank());
            if !(ra == rb && rb == rj && ra == dual.rank(k as i64)) {
                orientation_ok[o] = false;
            }
        }
        if k == 2 {
            let ee = ystep(0, 1, &vec![(0, Rat::one())]);
            report.e_squared_vanishes = ee.is_empty();
        }
    }
    report.opposite_matches = orientation_ok[1];
    report.orientation = if orientation_ok[0] {
        Some(Orientation::Same)
    } else if orientation_ok[1] {
        Some(Orientation::Opposite)
    } else {
        None
    };
    report.pass = report.orientation.is_some() && (steps < 2 || report.e_squared_vanishes);
    if report.orientation.is_none() {
        report.failure = Some("Yoneda products do not match the product table".into());
    }
    Ok(report)
}
