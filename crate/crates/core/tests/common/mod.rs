//! Oracles shared by the integration tests.  None of them call into the code
//! they check beyond the public data types.
#![allow(dead_code, clippy::needless_range_loop)]

use k2local::d1::reference;
use k2local::e1::{AdaptedGenerator, GenFamily};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

// ---------------------------------------------------------------------------
// Abstract finite groups

/// `Q_8` as `(sign, unit)` with unit in `{1, i, j, k}` = `0..4`.
pub type Q8 = (bool, u8);

pub fn q8_mul(a: Q8, b: Q8) -> Q8 {
    // unit products: rows/cols 1, i, j, k; entries (negate?, unit)
    const T: [[(bool, u8); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let (neg, u) = T[a.1 as usize][b.1 as usize];
    (a.0 ^ b.0 ^ neg, u)
}

/// `chi: Q_8 -> {+1, -1}` with kernel `<j>`.
fn chi(q: Q8) -> i64 {
    if q.1 == 0 || q.1 == 2 {
        1
    } else {
        -1
    }
}

/// `C_3 ⋊ Q_8` with `Q_8` acting through `chi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dic(pub i64, pub Q8);

impl Dic {
    pub fn mul(self, o: Dic) -> Dic {
        Dic((self.0 + chi(self.1) * o.0).rem_euclid(3), q8_mul(self.1, o.1))
    }
    pub fn identity() -> Dic {
        Dic(0, (false, 0))
    }
    /// Images of `a`, `omega^2`, `omega phi`.
    pub fn generators() -> [Dic; 3] {
        [Dic(1, (false, 0)), Dic(0, (false, 1)), Dic(0, (false, 2))]
    }
}

/// `SD_16 = <r, s | r^8, s^2, s r s^-1 = r^3>` as `r^k s^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sd(pub i64, pub i64);

impl Sd {
    pub fn mul(self, o: Sd) -> Sd {
        let twist = if self.1 == 1 { 3 } else { 1 };
        Sd((self.0 + twist * o.0).rem_euclid(8), (self.1 + o.1) % 2)
    }
    pub fn identity() -> Sd {
        Sd(0, 0)
    }
    /// Images of `omega`, `phi`.
    pub fn generators() -> [Sd; 2] {
        [Sd(1, 0), Sd(0, 1)]
    }
}

/// Element orders of a finite group given by multiplication and identity.
pub fn order_histogram<T: Copy + Eq>(elements: &[T], mul: impl Fn(T, T) -> T, id: T) -> BTreeMap<u32, usize> {
    let mut h = BTreeMap::new();
    for &g in elements {
        let mut x = g;
        let mut n = 1;
        while x != id {
            x = mul(x, g);
            n += 1;
        }
        *h.entry(n).or_insert(0) += 1;
    }
    h
}

/// Closure of `gens` in an abstract group.
pub fn closure<T: Copy + Eq + std::hash::Hash>(gens: &[T], mul: impl Fn(T, T) -> T, id: T) -> Vec<T> {
    let mut seen = vec![id];
    let mut i = 0;
    while i < seen.len() {
        for &g in gens {
            let x = mul(seen[i], g);
            if !seen.contains(&x) {
                seen.push(x);
            }
        }
        i += 1;
    }
    seen
}

/// Try to extend `gens -> images` to an isomorphism between the group spanned
/// by `gens` (multiplication `mul_a`) and the abstract group (`mul_b`).
/// Returns the number of elements mapped on success.
pub fn extend_to_isomorphism<A, B>(
    gens: &[A],
    images: &[B],
    id_a: A,
    id_b: B,
    mul_a: impl Fn(&A, &A) -> A,
    mul_b: impl Fn(B, B) -> B,
) -> Result<usize, String>
where
    A: Clone + Eq + std::hash::Hash + std::fmt::Debug,
    B: Copy + Eq + std::hash::Hash + std::fmt::Debug,
{
    let mut map: HashMap<A, B> = HashMap::from([(id_a.clone(), id_b)]);
    let mut order = vec![id_a];
    let mut i = 0;
    while i < order.len() {
        let x = order[i].clone();
        let fx = map[&x];
        for (g, &h) in gens.iter().zip(images) {
            let y = mul_a(&x, g);
            let fy = mul_b(fx, h);
            match map.get(&y) {
                Some(&old) if old != fy => return Err(format!("not well defined at {y:?}: {old:?} vs {fy:?}")),
                Some(_) => {}
                None => {
                    map.insert(y.clone(), fy);
                    order.push(y);
                }
            }
        }
        i += 1;
        if order.len() > 10_000 {
            return Err("group too large".into());
        }
    }
    let mut targets: Vec<B> = map.values().copied().collect();
    let n = targets.len();
    targets.sort_by_key(|b| format!("{b:?}"));
    targets.dedup();
    if targets.len() != n {
        return Err("not injective".into());
    }
    for x in map.keys() {
        for y in map.keys() {
            if map[&mul_a(x, y)] != mul_b(map[x], map[y]) {
                return Err(format!("not multiplicative at {x:?}, {y:?}"));
            }
        }
    }
    Ok(n)
}

// ---------------------------------------------------------------------------
// Arithmetic

pub fn v3_big(x: &BigInt) -> u32 {
    assert!(!x.is_zero());
    let three = BigInt::from(3);
    let mut x = x.clone();
    let mut v = 0;
    while (&x % &three).is_zero() {
        x /= &three;
        v += 1;
    }
    v
}

/// `v_3(4^{|t|/2} - 1)` by exact big-integer arithmetic.
pub fn central_valuation_oracle(t: i64) -> u32 {
    let e = (t.unsigned_abs() / 2) as u32;
    v3_big(&(BigInt::from(4).pow(e) - BigInt::one()))
}

/// Dense rank over `F_3` by plain Gaussian elimination.
pub fn rank_f3(mut rows: Vec<Vec<i64>>) -> usize {
    for r in rows.iter_mut() {
        for x in r.iter_mut() {
            *x = x.rem_euclid(3);
        }
    }
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, p);
        let inv = rows[rank][c]; // 1 and 2 are self-inverse mod 3
        let pivot: Vec<i64> = rows[rank].iter().map(|x| x * inv % 3).collect();
        rows[rank] = pivot.clone();
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = rows[r][c];
                for k in 0..ncols {
                    rows[r][k] = (rows[r][k] - f * pivot[k]).rem_euclid(3);
                }
            }
        }
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------------------
// E_1 Hilbert functions from the presentations

/// A monomial `Delta^k v1^a beta^b alpha^e alphatilde^d` of the free
/// polynomial ring (alpha, alphatilde taken as commuting variables; their
/// squares are relations).
type Mono = (i64, u32, u32, u32, u32);

fn mono_degree(m: &Mono) -> (u32, i64) {
    let (k, a, b, e, d) = *m;
    (2 * b + e + d, 24 * k + 4 * a as i64 + 12 * b as i64 + 4 * e as i64 + 12 * d as i64)
}

/// All monomials of degree `(q, t)` with `v1`-exponent below `a_max`.
fn monos_in_degree(q: u32, t: i64, a_max: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    for b in 0..=q / 2 {
        for e in 0..=2 {
            for d in 0..=2 {
                if 2 * b + e + d != q {
                    continue;
                }
                for a in 0..a_max {
                    let rest = t - 4 * a as i64 - 12 * b as i64 - 4 * e as i64 - 12 * d as i64;
                    if rest.rem_euclid(24) == 0 {
                        out.push((rest / 24, a, b, e, d));
                    }
                }
            }
        }
    }
    out
}

/// `dim` of `F_3[Delta^+-1, v1, beta, alpha, alphatilde] / (alpha^2,
/// alphatilde^2, v1 alpha, v1 alphatilde, alpha alphatilde + v1 beta, v1^a_max)`
/// in degree `(q, t)`, by linear algebra on the relation multiples.
pub fn modular_hilbert(q: u32, t: i64, a_max: u32) -> usize {
    let basis = monos_in_degree(q, t, a_max);
    if basis.is_empty() {
        return 0;
    }
    let index: HashMap<Mono, usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    // relations as lists of (monomial, coefficient)
    let rels: Vec<Vec<(Mono, i64)>> = vec![
        vec![((0, 0, 0, 2, 0), 1)],
        vec![((0, 0, 0, 0, 2), 1)],
        vec![((0, 1, 0, 1, 0), 1)],
        vec![((0, 1, 0, 0, 1), 1)],
        vec![((0, 0, 0, 1, 1), 1), ((0, 1, 1, 0, 0), 1)],
    ];
    let mut rows = Vec::new();
    for r in &rels {
        let (rq, rt) = mono_degree(&r[0].0);
        if rq > q {
            continue;
        }
        for m in monos_in_degree(q - rq, t - rt, a_max) {
            let mut row = vec![0i64; basis.len()];
            let mut any = false;
            for &((k, a, b, e, d), c) in r {
                let prod = (k + m.0, a + m.1, b + m.2, e + m.3, d + m.4);
                if let Some(&i) = index.get(&prod) {
                    row[i] += c;
                    any = true;
                }
            }
            if any {
                rows.push(row);
            }
        }
    }
    // v1^a_max is a relation by construction: those monomials are not enumerated.
    basis.len() - rank_f3(rows)
}

/// Number of distinct monomials `omega^2 u^4 (u1^4)^i (u1 u^-2)^a u^{8m}` of
/// internal degree `t` (`|u| = -2`) with `u1`-exponent below `v`.
pub fn sd16_hilbert(t: i64, v: u32) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    for i in 0..=v as i64 / 4 {
        for a in 0..v as i64 {
            let n = 4 * i + a;
            if n >= v as i64 {
                continue;
            }
            // u-exponent 4 - 2a + 8m must equal -t/2
            if t % 2 != 0 {
                continue;
            }
            let e = -t / 2;
            if (e - 4 + 2 * a).rem_euclid(8) == 0 {
                seen.insert((n, e));
            }
        }
    }
    seen.len()
}

/// The `E_1` count at `(p, q, t)` with caps `(J, V)`.
pub fn e1_oracle(p: u8, q: u32, t: i64, j: u32, v: u32) -> usize {
    match p {
        0 | 3 => modular_hilbert(q, t, 6 * j),
        _ if q == 0 => sd16_hilbert(t, v),
        _ => 0,
    }
}

// ---------------------------------------------------------------------------
// E_2 in a window, assembled from the literal d1 formulas

/// `(v1 exponent, generator)` terms of column `p` in degree `t` within caps.
pub fn window_basis(p: u8, t: i64, j: u32, v: u32) -> Vec<(u32, AdaptedGenerator)> {
    let mut out = Vec::new();
    if t.rem_euclid(4) != 0 {
        return out;
    }
    match p {
        0 | 3 => {
            let fam = if p == 0 { GenFamily::Delta } else { GenFamily::DeltaBar };
            for a in 0..6 * j as i64 {
                if (t - 4 * a).rem_euclid(24) == 0 {
                    out.push((a as u32, AdaptedGenerator::new(fam, (t - 4 * a) / 24)));
                }
            }
        }
        _ => {
            let fam = if p == 1 { GenFamily::B } else { GenFamily::BBar };
            for a in 0..v as i64 {
                let rest = t - 4 * a;
                if rest.rem_euclid(16) == 8 {
                    out.push((a as u32, AdaptedGenerator::new(fam, (rest / 8 - 1) / 2)));
                }
            }
        }
    }
    out
}

/// The first `v1` exponent that has a generator in degree `t` of column `p` but
/// lies outside the caps.
fn first_missing(p: u8, t: i64, j: u32, v: u32) -> u32 {
    let (lo, step_ok): (i64, Box<dyn Fn(i64) -> bool>) = match p {
        0 | 3 => (6 * j as i64, Box::new(move |a: i64| (t - 4 * a).rem_euclid(24) == 0)),
        _ => (v as i64, Box::new(move |a: i64| (t - 4 * a).rem_euclid(16) == 8)),
    };
    (lo..).find(|&a| step_ok(a)).unwrap() as u32
}

/// `dim E_2^{p,0,t}`, `p = 0..3`, with the window rule and exact overflow rows.
pub fn e2_oracle(t: i64, j: u32, v: u32) -> [usize; 4] {
    if t.rem_euclid(4) != 0 {
        return [0; 4];
    }
    let bases: Vec<Vec<(u32, AdaptedGenerator)>> = (0..4).map(|p| window_basis(p, t, j, v)).collect();
    // matrices[p]: rows = bases[p+1] then overflow terms; one row vector per column of the map
    let mut mats: Vec<(Vec<Vec<i64>>, usize)> = Vec::new();
    for p in 0..3 {
        let mut extra: Vec<(u32, AdaptedGenerator)> = Vec::new();
        let mut cols: Vec<Vec<(usize, i64)>> = Vec::new();
        for &(a, g) in &bases[p] {
            let mut col = Vec::new();
            if let Some((c, shift, target)) = reference::evaluate(g.family, g.k) {
                let term = (a + shift as u32, target);
                let n = bases[p + 1].len();
                let r = match bases[p + 1].iter().position(|x| *x == term) {
                    Some(r) => r,
                    None => {
                        let e = extra.iter().position(|x| *x == term).unwrap_or_else(|| {
                            extra.push(term);
                            extra.len() - 1
                        });
                        n + e
                    }
                };
                col.push((r, c));
            }
            cols.push(col);
        }
        let nrows = bases[p + 1].len() + extra.len();
        let dense: Vec<Vec<i64>> = (0..nrows)
            .map(|r| cols.iter().map(|col| col.iter().filter(|e| e.0 == r).map(|e| e.1).sum()).collect())
            .collect();
        mats.push((dense, bases[p + 1].len()));
    }
    let mut dims = [0; 4];
    for p in 0..4usize {
        let limit = if p == 0 { u32::MAX } else { first_missing(p as u8 - 1, t, j, v) };
        let window: Vec<usize> = (0..bases[p].len()).filter(|&i| bases[p][i].0 < limit).collect();
        let cycles = if p < 3 {
            let (m, _) = &mats[p];
            let sub: Vec<Vec<i64>> = m.iter().map(|row| window.iter().map(|&c| row[c]).collect()).collect();
            window.len() - rank_f3(sub)
        } else {
            window.len()
        };
        let boundaries = if p == 0 {
            0
        } else {
            let (m, _) = &mats[p - 1];
            let outside: Vec<Vec<i64>> = m.iter().enumerate().filter(|(r, _)| !window.contains(r)).map(|(_, row)| row.clone()).collect();
            rank_f3(m.clone()) - rank_f3(outside)
        };
        dims[p] = cycles - boundaries;
    }
    dims
}
