//! `E_2 = H(E_1, d_1)` on the `q = 0` line, degree by degree, and the
//! `v1`-localized counts.
//!
//! Each column is infinite in every degree, so homology is computed on a
//! window.  In column `p` only classes whose `v1`-exponent is below the first
//! exponent missing from column `p - 1` are counted: above that, a boundary
//! could come from a source we did not enumerate.  Overflow terms (images that
//! leave the caps) are kept exactly as extra matrix rows, so cycle tests are
//! never truncated.
//!
//! Agreement between two cap levels is not enough on its own: in negative
//! degrees the counts can sit on a plateau for several doublings.  Every class
//! of `E_2` is `v1^a X` with `X` a cycle generator and `a` below the shift of
//! the generator that hits `X`, so the survivors of a degree can be listed
//! outright ([`survivors`]).  A degree is stabilized when the window holds all
//! of them, the counts agree at the caps and at twice the caps, and no
//! overflow row was touched.

use crate::d1::{D1Engine, E1Vector};
use crate::e1::{adapted_basis, basis, AdaptedGenerator, AdaptedTerm, FiltrationCaps, GenFamily};
use crate::error::{invariant, Result};
use crate::f3::{SparseF3Matrix, F3};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// The four-term complex `E_1^{*,0,t}` within the caps.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexAtDegree {
    pub t: i64,
    pub caps: FiltrationCaps,
    pub bases: [Vec<AdaptedTerm>; 4],
    /// `matrices[p]` is `d_1` from column `p` to `p + 1`; its rows are
    /// `bases[p + 1]` followed by `overflow_rows[p]`.
    pub matrices: Vec<SparseF3Matrix>,
    pub overflow_rows: Vec<Vec<AdaptedTerm>>,
}

pub fn complex_at_degree(engine: &D1Engine, t: i64, caps: &FiltrationCaps) -> Result<ComplexAtDegree> {
    let bases: [Vec<AdaptedTerm>; 4] = [
        adapted_basis(0, t, caps)?,
        adapted_basis(1, t, caps)?,
        adapted_basis(2, t, caps)?,
        adapted_basis(3, t, caps)?,
    ];
    let mut matrices = Vec::with_capacity(3);
    let mut overflow_rows = Vec::with_capacity(3);
    for p in 0..3 {
        let index: BTreeMap<AdaptedTerm, usize> = bases[p + 1].iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let mut extra: Vec<AdaptedTerm> = Vec::new();
        let mut columns = Vec::with_capacity(bases[p].len());
        for x in &bases[p] {
            let v = E1Vector::from_term(*x, F3::ONE, caps)?;
            let dv = engine.d1(&v, caps)?;
            let mut col = Vec::new();
            for (y, c) in &dv.terms {
                let r = *index.get(y).ok_or_else(|| invariant(format!("{y} in caps but not in the basis")))?;
                col.push((r, *c));
            }
            for (y, c) in &dv.overflow {
                let pos = extra.iter().position(|e| e == y).unwrap_or_else(|| {
                    extra.push(*y);
                    extra.len() - 1
                });
                col.push((bases[p + 1].len() + pos, *c));
            }
            columns.push(col);
        }
        matrices.push(SparseF3Matrix::from_columns(bases[p + 1].len() + extra.len(), columns)?);
        overflow_rows.push(extra);
    }
    Ok(ComplexAtDegree { t, caps: *caps, bases, matrices, overflow_rows })
}

/// First `v1`-exponent with a generator of column `p` in degree `t` that lies beyond the caps.
fn first_missing(p: u8, t: i64, caps: &FiltrationCaps) -> u32 {
    match p {
        0 | 3 => ((t / 4).rem_euclid(6) + 6 * caps.j as i64) as u32,
        _ => {
            let mut a = caps.v as i64;
            while (t - 4 * a).rem_euclid(16) != 8 {
                a += 1;
            }
            a as u32
        }
    }
}

/// Whether `v1^a X` of column `p` is enumerated at `caps` and lies inside the counting window.
fn in_window(x: &AdaptedTerm, t: i64, caps: &FiltrationCaps) -> bool {
    let p = x.column();
    x.in_caps(caps) && (p == 0 || x.v1 < first_missing(p - 1, t, caps))
}

impl ComplexAtDegree {
    /// `d_1 d_1 = 0` on every basis element, computed on exact vectors.
    pub fn composite_vanishes(&self, engine: &D1Engine) -> Result<bool> {
        for p in 0..2 {
            for x in &self.bases[p] {
                let v = E1Vector::from_term(*x, F3::ONE, &self.caps)?;
                let ddv = engine.d1(&engine.d1(&v, &self.caps)?, &self.caps)?;
                if !ddv.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Window dimensions and whether an overflow row was shared by two window columns.
    pub fn window_dims(&self) -> Result<([usize; 4], bool)> {
        if self.t.rem_euclid(4) != 0 {
            return Ok(([0; 4], false));
        }
        let mut dims = [0usize; 4];
        let mut touched = false;
        for p in 0..4 {
            let limit = if p == 0 { u32::MAX } else { first_missing(p as u8 - 1, self.t, &self.caps) };
            let window: Vec<usize> = (0..self.bases[p].len()).filter(|&i| self.bases[p][i].v1 < limit).collect();
            let cycles = if p < 3 {
                let m = self.matrices[p].select_columns(&window);
                let n_in = self.bases[p + 1].len();
                let mut seen = BTreeMap::new();
                for c in 0..m.cols() {
                    for &(r, _) in m.column(c) {
                        if r >= n_in {
                            *seen.entry(r).or_insert(0) += 1;
                        }
                    }
                }
                touched |= seen.values().any(|&n| n > 1);
                window.len() - m.rank()
            } else {
                window.len()
            };
            let boundaries = if p == 0 {
                0
            } else {
                let d = &self.matrices[p - 1];
                let in_window: Vec<bool> = (0..d.rows()).map(|r| window.binary_search(&r).is_ok()).collect();
                d.rank() - d.select_rows(|r| !in_window[r]).rank()
            };
            if boundaries > cycles {
                return Err(invariant(format!("t = {}: column {p} has more boundaries than cycles", self.t)));
            }
            dims[p] = cycles - boundaries;
        }
        Ok((dims, touched))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E2Report {
    pub t: i64,
    /// Dimensions at the doubled caps.
    pub dims: [usize; 4],
    pub coarse_dims: [usize; 4],
    pub stabilized: bool,
    /// Caps `(J, V)` and `(2J, 2V)` used.
    pub caps_used: [(u32, u32); 2],
    /// Some out-of-cap row received entries from two window columns, so a rank
    /// decision depended on cancellation beyond the caps.
    pub overflow_touched: bool,
    /// The counting window at the given caps holds every survivor of this degree.
    pub certified: bool,
}

/// `dim E_2^{p,0,t}` for `p = 0..3`, computed at `caps` and at doubled caps.
pub fn e2_p0(engine: &D1Engine, t: i64, caps: &FiltrationCaps) -> Result<E2Report> {
    let fine_caps = caps.scaled(2);
    let (coarse, touched_c) = complex_at_degree(engine, t, caps)?.window_dims()?;
    let (fine, touched_f) = complex_at_degree(engine, t, &fine_caps)?.window_dims()?;
    let overflow_touched = touched_c || touched_f;
    let certified = window_holds_survivors(engine, t, caps)?;
    Ok(E2Report {
        t,
        dims: fine,
        coarse_dims: coarse,
        stabilized: coarse == fine && !overflow_touched && certified,
        caps_used: [(caps.j, caps.v), (fine_caps.j, fine_caps.v)],
        overflow_touched,
        certified,
    })
}

/// The adapted generator of column `p` sitting at `v1`-exponent `a` in degree `t`, if any.
fn generator_at(p: u8, t: i64, a: i64) -> Option<AdaptedGenerator> {
    let rest = t - 4 * a;
    match p {
        0 | 3 if rest.rem_euclid(24) == 0 => {
            let fam = if p == 0 { GenFamily::Delta } else { GenFamily::DeltaBar };
            Some(AdaptedGenerator::new(fam, rest / 24))
        }
        1 | 2 if rest.rem_euclid(16) == 8 => {
            let fam = if p == 1 { GenFamily::B } else { GenFamily::BBar };
            Some(AdaptedGenerator::new(fam, (rest / 8 - 1) / 2))
        }
        _ => None,
    }
}

/// The classes of `E_2^{*,0,t}`, listed without truncation.
///
/// `d_1` sends each generator to zero or to a unit times `v1^s` times a single
/// generator, and the `q = 0` line has no `v1`-torsion.  So `v1^a X` survives
/// exactly when `X` is a cycle and no generator hits `X` with shift `s <= a`.
/// Working through the cases, a survivor has index at most `4 + |t|/2` in
/// absolute value (the tightest family is `b_{2k+1} -> bbar`,
/// `k = 3^n(9m + 8)`, where the shift `10 3^n + 2` must exceed
/// `t/4 + 2|3^n(18m + 11)|`), which bounds the search below.
pub fn survivors(engine: &D1Engine, t: i64) -> Result<Vec<AdaptedTerm>> {
    let mut out = Vec::new();
    if t.rem_euclid(4) != 0 {
        return Ok(out);
    }
    let index_bound = 4 + t.abs() / 2;
    let a_max = (t.abs() + 24 * (index_bound + 1)) / 4;
    for p in 0..4u8 {
        for a in 0..=a_max {
            let Some(x) = generator_at(p, t, a) else { continue };
            if p < 3 && engine.d1_generator(&x)?.is_some() {
                continue;
            }
            let mut hit = false;
            if p > 0 {
                for b in 0..=a {
                    if let Some(y) = generator_at(p - 1, t, b) {
                        if matches!(engine.d1_generator(&y)?, Some(img) if img.target == x) {
                            hit = true;
                            break;
                        }
                    }
                }
            }
            if !hit {
                out.push(AdaptedTerm::new(a as u32, x));
            }
        }
    }
    let far = out.iter().find(|x| x.gen.label().abs() > index_bound);
    if let Some(x) = far {
        return Err(invariant(format!("survivor {x} beyond the index bound {index_bound} at t = {t}")));
    }
    Ok(out)
}

/// Whether the counting window at `caps` contains every survivor of degree `t`.
/// Below that point the window counts are exact: a class inside it is a
/// boundary only of sources with smaller exponent, which the caps contain.
pub fn window_holds_survivors(engine: &D1Engine, t: i64, caps: &FiltrationCaps) -> Result<bool> {
    Ok(survivors(engine, t)?.iter().all(|x| in_window(x, t, caps)))
}

/// `dim E_2^{p,0,t}` from [`survivors`].
pub fn survivor_dims(engine: &D1Engine, t: i64) -> Result<[usize; 4]> {
    let mut dims = [0; 4];
    for x in survivors(engine, t)? {
        dims[x.column() as usize] += 1;
    }
    Ok(dims)
}

/// [`e2_p0`] over the whole window of `caps`, in increasing `t`.
pub fn e2_window(engine: &D1Engine, caps: &FiltrationCaps) -> Result<Vec<E2Report>> {
    let ts: Vec<i64> = caps.window().collect();
    ts.par_iter().map(|&t| e2_p0(engine, t, caps)).collect()
}

/// [`e2_p0`], doubling the caps up to `max_doublings` times until the degree
/// stabilizes.  Degrees far from 0 need deeper caps before the window covers
/// every class.
pub fn e2_p0_deepening(engine: &D1Engine, t: i64, caps: &FiltrationCaps, max_doublings: u32) -> Result<E2Report> {
    let mut c = *caps;
    let mut r = e2_p0(engine, t, &c)?;
    for _ in 0..max_doublings {
        if r.stabilized {
            break;
        }
        c = c.scaled(2);
        r = e2_p0(engine, t, &c)?;
    }
    Ok(r)
}

/// [`e2_p0_deepening`] over the whole window of `caps`.
pub fn e2_window_deepening(engine: &D1Engine, caps: &FiltrationCaps, max_doublings: u32) -> Result<Vec<E2Report>> {
    let ts: Vec<i64> = caps.window().collect();
    ts.par_iter().map(|&t| e2_p0_deepening(engine, t, caps, max_doublings)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalizedRow {
    pub t: i64,
    pub computed: usize,
    pub closed_form: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalizedTable {
    pub column: u8,
    pub caps: FiltrationCaps,
    pub rows: Vec<LocalizedRow>,
    pub first_mismatch: Option<i64>,
}

/// `dim (v1^-1 E_1)^{p,t}` in the filtration window, computed as a colimit
/// along multiplication by `v1` with `v1`-torsion discarded, next to the
/// closed form (one Laurent tower per `t = 0 mod 4`).
pub fn localized_poincare(p: u8, caps: &FiltrationCaps) -> Result<LocalizedTable> {
    let mut rows = Vec::new();
    for t in caps.window() {
        let computed = localized_count(p, t, caps, 6 * (caps.j.max(caps.v) as i64 + 4))?;
        let again = localized_count(p, t, caps, 6 * (caps.j.max(caps.v) as i64 + 10))?;
        if computed != again {
            return Err(invariant(format!("colimit at t = {t} has not stabilized")));
        }
        let closed_form = if t.rem_euclid(4) == 0 {
            if p == 0 || p == 3 {
                caps.j as usize
            } else {
                caps.v as usize
            }
        } else {
            0
        };
        rows.push(LocalizedRow { t, computed, closed_form });
    }
    let first_mismatch = rows.iter().find(|r| r.computed != r.closed_form).map(|r| r.t);
    Ok(LocalizedTable { column: p, caps: *caps, rows, first_mismatch })
}

fn localized_count(p: u8, t: i64, caps: &FiltrationCaps, shift: i64) -> Result<usize> {
    // v1^-n x for x of degree t + 4n, restricted to the filtration window.
    let t_up = t + 4 * shift;
    let big = FiltrationCaps {
        j: (t_up.abs() / 24) as u32 + caps.j + 2,
        v: (shift + t.abs() / 4) as u32 + 4 * caps.v + 8,
        ..*caps
    };
    let mut n = 0;
    for q in 0..=6 {
        for m in basis(p, q, t_up, &big)? {
            // torsion: killed by some power of v1
            if m.times_v1(2).is_none() {
                continue;
            }
            match m {
                crate::e1::E1Monomial::Modular { delta, .. } => {
                    let j = -delta;
                    if (0..caps.j as i64).contains(&j) {
                        n += 1;
                    }
                }
                crate::e1::E1Monomial::Sd16 { u1, .. } => {
                    let i = u1 as i64 - shift;
                    let r = i - t / 4 - 2;
                    if r.rem_euclid(4) == 0 && (0..caps.v as i64).contains(&(r / 4)) {
                        n += 1;
                    }
                }
            }
        }
    }
    Ok(n)
}

#[derive(Clone, Debug, Serialize)]
pub struct SurvivorReport {
    /// `d_1(b_1) = 0`.
    pub b1_is_cycle: bool,
    /// No `v1^s Delta_k` hits `b_1` for `|k| <= search_bound`.
    pub b1_not_hit: bool,
    pub search_bound: i64,
    /// `d_1(Delta_0) = 0` and nothing maps to column 0: the unit survives `v1`-localization.
    pub unit_survives: bool,
    /// `d_1(bbar_1) = -v1^2 Deltabar_0`, so `Deltabar_0` is `v1`-torsion in `E_2`.
    pub top_class_v1_torsion: bool,
    pub witness: String,
    pub pass: bool,
}

/// Certify that `v1^-1 b_1` survives to `E_2`: it is the class detecting
/// `alpha_1` in the `K(1)`-local sphere.
pub fn survivor_witness(engine: &D1Engine) -> Result<SurvivorReport> {
    let b1 = AdaptedGenerator::from_label(GenFamily::B, 1)?;
    let b1_is_cycle = engine.d1_generator(&b1)?.is_none();
    let search_bound = 10_000;
    let mut b1_not_hit = true;
    for k in -search_bound..=search_bound {
        if let Some(img) = engine.d1_generator(&AdaptedGenerator::new(GenFamily::Delta, k))? {
            if img.target == b1 {
                b1_not_hit = false;
            }
        }
    }
    let unit_survives = engine.d1_generator(&AdaptedGenerator::new(GenFamily::Delta, 0))?.is_none();
    let top = engine.d1_generator(&AdaptedGenerator::from_label(GenFamily::BBar, 1)?)?;
    let top_class_v1_torsion = matches!(top, Some(img) if img.target == AdaptedGenerator::new(GenFamily::DeltaBar, 0));
    let witness = format!(
        "d1(b_1) = 0; no Delta_k with |k| <= {search_bound} maps to b_1; d1(bbar_1) = {}",
        top.map(|i| format!("{} v1^{} {}", i.coeff, i.v1_shift, i.target)).unwrap_or_else(|| "0".into())
    );
    let pass = b1_is_cycle && b1_not_hit && unit_survives && top_class_v1_torsion;
    Ok(SurvivorReport { b1_is_cycle, b1_not_hit, search_bound, unit_survives, top_class_v1_torsion, witness, pass })
}

/// The `K(1)`-localizations of the two kinds of fixed points, as presented
/// by Laurent series in a degree-0 variable and Laurent polynomials in a
/// degree-4 unit.
#[derive(Clone, Debug, Serialize)]
pub struct K1Presentation {
    pub group: String,
    pub ring: String,
    pub column: u8,
    pub citation: String,
    pub matches_localized_counts: bool,
}

pub fn k1_presentations(caps: &FiltrationCaps) -> Result<Vec<K1Presentation>> {
    let check = |p: u8| -> Result<bool> { Ok(localized_poincare(p, caps)?.first_mismatch.is_none()) };
    Ok(vec![
        K1Presentation {
            group: "G24".into(),
            ring: "Z_3((j))[b2^+-1], |j| = 0, |b2| = 4, b2 = c6/c4".into(),
            column: 0,
            citation: "L_{K(1)} E_2^{hG24}: the ring of 3-adic modular forms with the Hasse invariant inverted".into(),
            matches_localized_counts: check(0)?,
        },
        K1Presentation {
            group: "SD16".into(),
            ring: "Z_3((w))[v1^+-1], |w| = 0, |v1| = 4".into(),
            column: 1,
            citation: "L_{K(1)} E_2^{hSD16}: v1-inverted fixed points of the Lubin-Tate ring".into(),
            matches_localized_counts: check(1)?,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_zero_small_caps() {
        let caps = FiltrationCaps::new(6, 6, -96, 96).unwrap();
        let r = e2_p0(&D1Engine::new(), 0, &caps).unwrap();
        assert_eq!(r.dims, [1, 0, 0, 1]);
        assert!(r.stabilized);
    }
}
