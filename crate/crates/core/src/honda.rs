//! The Honda formal group law of height 2 over `F_3` and the action of `O_2`
//! on it by power series over `F_9`.
//!
//! The law is built from the logarithm `x + x^9/3 + x^81/9 + ...` in exact
//! rational arithmetic, certified 3-integral, and only then reduced mod 3.

use crate::error::{domain, invariant, Error, Result};
use crate::group::{G2Element, O2Element};
use crate::padic::WittElement;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

/// `F_9 = F_3[xbar]/(xbar^2 + xbar + 2)`, stored as `c0 + 3 c1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct F9(u8);

impl F9 {
    pub const ZERO: F9 = F9(0);
    pub const ONE: F9 = F9(1);

    pub fn new(c0: u8, c1: u8) -> Self {
        F9(c0 % 3 + 3 * (c1 % 3))
    }

    pub fn from_int(v: i64) -> Self {
        F9(v.rem_euclid(3) as u8)
    }

    pub fn coords(self) -> [u8; 2] {
        [self.0 % 3, self.0 / 3]
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Frobenius `z -> z^3`.
    pub fn frobenius(self) -> F9 {
        self * self * self
    }
}

impl std::ops::Add for F9 {
    type Output = F9;
    fn add(self, o: F9) -> F9 {
        let [a0, a1] = self.coords();
        let [b0, b1] = o.coords();
        F9::new(a0 + b0, a1 + b1)
    }
}

impl std::ops::Neg for F9 {
    type Output = F9;
    fn neg(self) -> F9 {
        let [a0, a1] = self.coords();
        F9::new(3 - a0, 3 - a1)
    }
}

impl std::ops::Sub for F9 {
    type Output = F9;
    fn sub(self, o: F9) -> F9 {
        self + (-o)
    }
}

impl std::ops::Mul for F9 {
    type Output = F9;
    fn mul(self, o: F9) -> F9 {
        // xbar^2 = 2 xbar + 1
        let [a0, a1] = self.coords();
        let [b0, b1] = o.coords();
        F9::new(a0 * b0 + a1 * b1, a0 * b1 + a1 * b0 + 2 * a1 * b1)
    }
}

/// A power series over `F_9` truncated after degree `cap`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SeriesF9 {
    coeffs: Vec<F9>,
}

impl SeriesF9 {
    pub fn zero(cap: usize) -> Self {
        SeriesF9 { coeffs: vec![F9::ZERO; cap + 1] }
    }

    pub fn monomial(c: F9, n: usize, cap: usize) -> Self {
        let mut s = Self::zero(cap);
        if n <= cap {
            s.coeffs[n] = c;
        }
        s
    }

    pub fn identity(cap: usize) -> Self {
        Self::monomial(F9::ONE, 1, cap)
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> F9 {
        self.coeffs.get(n).copied().unwrap_or(F9::ZERO)
    }

    pub fn set(&mut self, n: usize, c: F9) {
        self.coeffs[n] = c;
    }

    /// Nonzero `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (usize, F9)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(n, c)| (n, *c))
    }

    pub fn valuation(&self) -> Option<usize> {
        self.terms().next().map(|(n, _)| n)
    }

    pub fn add(&self, o: &SeriesF9) -> SeriesF9 {
        let cap = self.cap().min(o.cap());
        SeriesF9 { coeffs: (0..=cap).map(|n| self.coeffs[n] + o.coeffs[n]).collect() }
    }

    pub fn scale(&self, c: F9) -> SeriesF9 {
        SeriesF9 { coeffs: self.coeffs.iter().map(|a| *a * c).collect() }
    }

    pub fn mul(&self, o: &SeriesF9) -> SeriesF9 {
        let cap = self.cap().min(o.cap());
        let mut out = vec![F9::ZERO; cap + 1];
        for (i, a) in self.terms() {
            if i > cap {
                break;
            }
            for (j, b) in o.terms() {
                if i + j > cap {
                    break;
                }
                out[i + j] = out[i + j] + a * b;
            }
        }
        SeriesF9 { coeffs: out }
    }

    /// `self(g(t))`; `g` must have no constant term.
    pub fn compose(&self, g: &SeriesF9) -> Result<SeriesF9> {
        if !g.coeff(0).is_zero() {
            return Err(domain("inner series has a constant term"));
        }
        let cap = self.cap().min(g.cap());
        let mut out = SeriesF9::zero(cap);
        out.coeffs[0] = self.coeff(0);
        let mut pw = g.truncate(cap);
        let v = g.valuation().unwrap_or(cap + 1);
        for n in 1..=cap {
            if n * v > cap {
                break;
            }
            let c = self.coeff(n);
            if !c.is_zero() {
                out = out.add(&pw.scale(c));
            }
            pw = pw.mul(g);
        }
        Ok(out)
    }

    /// Substitute `t -> t^k`.
    pub fn inflate(&self, k: usize) -> SeriesF9 {
        let mut out = SeriesF9::zero(self.cap());
        for (n, c) in self.terms() {
            if n * k <= self.cap() {
                out.coeffs[n * k] = c;
            }
        }
        out
    }

    pub fn truncate(&self, cap: usize) -> SeriesF9 {
        SeriesF9 { coeffs: (0..=cap).map(|n| self.coeff(n)).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.terms().eq(std::iter::once((1, F9::ONE)))
    }
}

/// A formal group law over `F_3`, truncated at total degree `cap`.
#[derive(Clone, Debug, Serialize)]
pub struct FormalGroupLaw {
    cap: usize,
    /// Nonzero coefficients `(i, j, c)` of `x^i y^j`, sorted.
    terms: Vec<(usize, usize, F9)>,
}

/// Exact-rational construction, certifying 3-integrality before reducing mod 3.
pub fn build_honda_fgl(cap: usize) -> Result<FormalGroupLaw> {
    if cap < 9 {
        return Err(domain(format!("truncation {cap} must be at least 9")));
    }
    // log(x) = sum_k x^{9^k} / 3^k
    let mut log_terms = Vec::new();
    let mut deg = 1usize;
    let mut k = 0u32;
    while deg <= cap {
        log_terms.push((deg, k));
        deg *= 9;
        k += 1;
    }
    let kmax = k - 1;
    let three = BigInt::from(3);

    // Compositional inverse e(z): sum_k e_k log(x)^k = x.
    let log_series: Vec<BigRational> = {
        let mut v = vec![BigRational::zero(); cap + 1];
        for &(d, k) in &log_terms {
            v[d] = BigRational::new(BigInt::one(), three.pow(k));
        }
        v
    };
    let mut e = vec![BigRational::zero(); cap + 1];
    let mut powers: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); cap + 1]; cap + 1];
    powers[1] = log_series.clone();
    for n in 2..=cap {
        let mut next = vec![BigRational::zero(); cap + 1];
        for (i, a) in powers[n - 1].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(d, _) in &log_terms {
                if i + d <= cap {
                    next[i + d] += a * &log_series[d];
                }
            }
        }
        powers[n] = next;
    }
    e[1] = BigRational::one();
    for n in 2..=cap {
        let mut s = BigRational::zero();
        for (k, ek) in e.iter().enumerate().take(n).skip(1) {
            if !ek.is_zero() {
                s += ek * &powers[k][n];
            }
        }
        e[n] = -s;
    }
    drop(powers);

    // F(x, y) = e(log x + log y), via integral powers of 3^kmax (log x + log y).
    let scale = three.pow(kmax);
    let lz: Vec<(usize, usize, BigInt)> = log_terms
        .iter()
        .flat_map(|&(d, k)| {
            let c = &scale / three.pow(k);
            [(d, 0, c.clone()), (0, d, c)]
        })
        .collect();
    let idx = |i: usize, j: usize| i * (cap + 1) + j;
    let mut pw: Vec<BigInt> = vec![BigInt::zero(); (cap + 1) * (cap + 1)];
    for (i, j, c) in &lz {
        pw[idx(*i, *j)] = c.clone();
    }
    let mut acc: Vec<BigRational> = vec![BigRational::zero(); (cap + 1) * (cap + 1)];
    for n in 1..=cap {
        if n > 1 {
            let mut next = vec![BigInt::zero(); (cap + 1) * (cap + 1)];
            for i in 0..=cap {
                for j in 0..=cap - i {
                    let a = &pw[idx(i, j)];
                    if a.is_zero() {
                        continue;
                    }
                    for (di, dj, c) in &lz {
                        if i + j + di + dj <= cap {
                            next[idx(i + di, j + dj)] += a * c;
                        }
                    }
                }
            }
            pw = next;
        }
        if e[n].is_zero() {
            continue;
        }
        let factor = &e[n] / BigRational::from_integer(scale.pow(n as u32));
        for i in 0..=cap {
            for j in 0..=cap - i {
                let a = &pw[idx(i, j)];
                if !a.is_zero() {
                    acc[idx(i, j)] += &factor * a;
                }
            }
        }
    }

    let mut terms = Vec::new();
    for i in 0..=cap {
        for j in 0..=cap - i {
            let c = &acc[idx(i, j)];
            if c.is_zero() {
                continue;
            }
            if (c.denom() % &three).is_zero() {
                return Err(invariant(format!("coefficient of x^{i} y^{j} is not 3-integral: {c}")));
            }
            let num = (c.numer() % &three + &three) % &three;
            let den = (c.denom() % &three + &three) % &three;
            let v = (num.to_i64().unwrap() * den.to_i64().unwrap()) % 3; // den^{-1} = den mod 3
            if v != 0 {
                terms.push((i, j, F9::from_int(v)));
            }
        }
    }
    Ok(FormalGroupLaw { cap, terms })
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub identity: bool,
    pub commutative: bool,
    pub associative: bool,
    pub inverse_exists: bool,
}

impl AxiomReport {
    pub fn all(&self) -> bool {
        self.identity && self.commutative && self.associative && self.inverse_exists
    }
}

impl FormalGroupLaw {
    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn terms(&self) -> &[(usize, usize, F9)] {
        &self.terms
    }

    pub fn coeff(&self, i: usize, j: usize) -> F9 {
        self.terms
            .binary_search_by(|t| (t.0, t.1).cmp(&(i, j)))
            .map(|k| self.terms[k].2)
            .unwrap_or(F9::ZERO)
    }

    /// `F(f(t), g(t))` for series without constant term.
    pub fn apply(&self, f: &SeriesF9, g: &SeriesF9) -> Result<SeriesF9> {
        if !f.coeff(0).is_zero() || !g.coeff(0).is_zero() {
            return Err(domain("arguments must have no constant term"));
        }
        let cap = self.cap.min(f.cap()).min(g.cap());
        let max_i = self.terms.iter().map(|t| t.0).max().unwrap_or(0);
        let max_j = self.terms.iter().map(|t| t.1).max().unwrap_or(0);
        let powers = |s: &SeriesF9, m: usize| {
            let s = s.truncate(cap);
            let mut v = vec![SeriesF9::monomial(F9::ONE, 0, cap)];
            for k in 1..=m {
                let next = v[k - 1].mul(&s);
                v.push(next);
            }
            v
        };
        let fp = powers(f, max_i.min(cap));
        let gp = powers(g, max_j.min(cap));
        let mut out = SeriesF9::zero(cap);
        for &(i, j, c) in &self.terms {
            if i > cap || j > cap {
                continue;
            }
            out = out.add(&fp[i].mul(&gp[j]).scale(c));
        }
        Ok(out)
    }

    /// The formal sum of several series.
    pub fn sum(&self, parts: &[SeriesF9]) -> Result<SeriesF9> {
        let mut acc = SeriesF9::zero(self.cap);
        for p in parts {
            acc = if acc.valuation().is_none() { p.truncate(self.cap) } else { self.apply(&acc, p)? };
        }
        Ok(acc)
    }

    /// `[n](x)` for `n >= 1`.
    pub fn n_series(&self, n: u32) -> Result<SeriesF9> {
        let x = SeriesF9::identity(self.cap);
        let mut acc = x.clone();
        for _ in 1..n {
            acc = self.apply(&x, &acc)?;
        }
        Ok(acc)
    }

    /// The formal inverse `i(x)` with `F(x, i(x)) = 0`.
    pub fn formal_inverse(&self) -> Result<SeriesF9> {
        let x = SeriesF9::identity(self.cap);
        let nonlinear = FormalGroupLaw {
            cap: self.cap,
            terms: self.terms.iter().copied().filter(|t| t.0 > 0 && t.1 > 0).collect(),
        };
        let mut inv = x.scale(-F9::ONE);
        for _ in 0..=self.cap {
            let correction = nonlinear.apply(&x, &inv)?;
            let next = x.add(&correction).scale(-F9::ONE);
            if next == inv {
                return Ok(inv);
            }
            inv = next;
        }
        Err(invariant("formal inverse did not converge"))
    }

    pub fn check_axioms(&self) -> Result<AxiomReport> {
        let d = self.cap;
        let identity = (1..=d).all(|i| {
            let want = if i == 1 { F9::ONE } else { F9::ZERO };
            self.coeff(i, 0) == want && self.coeff(0, i) == want
        }) && self.coeff(0, 0).is_zero();
        let commutative = self.terms.iter().all(|&(i, j, c)| self.coeff(j, i) == c);

        // P_a = F(x, y)^a as dense triangles; F(F(x,y),z) and F(x,F(y,z)) in
        // degree (i, j, k) are sum_a c_{a,k} P_a[i][j] and sum_b c_{i,b} P_b[j][k].
        let idx = |i: usize, j: usize| i * (d + 1) + j;
        let max_a = self.terms.iter().map(|t| t.0.max(t.1)).max().unwrap_or(0);
        let mut p: Vec<Vec<F9>> = Vec::with_capacity(max_a + 1);
        let mut unit = vec![F9::ZERO; (d + 1) * (d + 1)];
        unit[idx(0, 0)] = F9::ONE;
        p.push(unit);
        for a in 1..=max_a {
            let mut next = vec![F9::ZERO; (d + 1) * (d + 1)];
            let prev = &p[a - 1];
            for u in 0..=d {
                for v in 0..=d - u {
                    let x = prev[idx(u, v)];
                    if x.is_zero() {
                        continue;
                    }
                    for &(i, j, c) in &self.terms {
                        if u + v + i + j <= d {
                            next[idx(u + i, v + j)] = next[idx(u + i, v + j)] + x * c;
                        }
                    }
                }
            }
            p.push(next);
        }
        let mut associative = true;
        'outer: for i in 0..=d {
            for j in 0..=d - i {
                for k in 0..=d - i - j {
                    let mut lhs = F9::ZERO;
                    let mut rhs = F9::ZERO;
                    for &(a, b, c) in &self.terms {
                        if b == k && a < p.len() {
                            lhs = lhs + c * p[a][idx(i, j)];
                        }
                        if a == i && b < p.len() {
                            rhs = rhs + c * p[b][idx(j, k)];
                        }
                    }
                    if lhs != rhs {
                        associative = false;
                        break 'outer;
                    }
                }
            }
        }
        let inverse_exists = match self.formal_inverse() {
            Ok(inv) => self.apply(&SeriesF9::identity(d), &inv)?.valuation().is_none(),
            Err(_) => false,
        };
        Ok(AxiomReport { identity, commutative, associative, inverse_exists })
    }

    /// The endomorphism `[w]` for `w in W(F_9)`: the formal sum of
    /// `rho_i t^{9^i}` over the Teichmuller digits `rho_i` of `w`.
    pub fn endo_from_witt(&self, w: &WittElement) -> Result<SeriesF9> {
        let digits = w.teichmuller_digits();
        let mut parts = Vec::new();
        let mut deg = 1usize;
        for rho in digits {
            if deg > self.cap {
                break;
            }
            let c = F9::new(rho[0], rho[1]);
            if !c.is_zero() {
                parts.push(SeriesF9::monomial(c, deg, self.cap));
            }
            deg *= 9;
        }
        let out = self.sum(&parts)?;
        let [r0, r1] = w.residue_f9();
        if out.coeff(1) != F9::new(r0, r1) {
            return Err(invariant("linear coefficient of [w] differs from the residue of w"));
        }
        Ok(out)
    }

    /// `[x + yS](t) = [x](t) +_F [y](t^3)`.
    pub fn endo_from_o2(&self, g: &O2Element) -> Result<SeriesF9> {
        let (x, y) = g.parts();
        let ex = self.endo_from_witt(&x)?;
        let ey = self.endo_from_witt(&y)?.inflate(3);
        if ey.valuation().is_none() {
            return Ok(ex);
        }
        if ex.valuation().is_none() {
            return Ok(ey);
        }
        self.apply(&ex, &ey)
    }

    /// Whether `[g]` has order exactly `k` under composition, up to the truncation.
    pub fn verify_order(&self, g: &G2Element, k: u32) -> Result<bool> {
        if g.has_galois() {
            return Err(domain("Galois elements do not act by power series over F_9"));
        }
        if k == 0 {
            return Err(domain("order must be positive"));
        }
        let e = self.endo_from_o2(&g.unit())?;
        let mut acc = e.clone();
        for _ in 1..k {
            if acc.is_identity() {
                return Ok(false);
            }
            acc = e.compose(&acc)?;
        }
        Ok(acc.is_identity())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FglReport {
    pub cap: usize,
    pub nonzero_terms: usize,
    pub axioms: AxiomReport,
    pub three_series_is_x9: bool,
    pub a_has_order_3: bool,
    pub pass: bool,
}

/// The `fgl` gate: axioms, `[3](x) = x^9`, and the order of `[a]`.
pub fn verify_fgl(cap: usize, a: &G2Element) -> Result<FglReport> {
    if cap < 28 {
        return Err(Error::Domain(format!("truncation {cap} below 28 cannot certify order 3")));
    }
    let f = build_honda_fgl(cap)?;
    let axioms = f.check_axioms()?;
    let three = f.n_series(3)?;
    let three_series_is_x9 = three == SeriesF9::monomial(F9::ONE, 9, cap);
    let a_has_order_3 = f.verify_order(a, 3)?;
    let pass = axioms.all() && three_series_is_x9 && a_has_order_3;
    Ok(FglReport { cap, nonzero_terms: f.terms.len(), axioms, three_series_is_x9, a_has_order_3, pass })
}
