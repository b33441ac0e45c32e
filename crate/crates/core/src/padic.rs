//! Residues in `Z/3^N` and the truncated Witt vectors `W(F_9)/3^N`.
//!
//! `W = W(F_9)` is modelled as `Z_3[x]/(x^2 + s x - 1)` where `s` is the square
//! root of `-2` in `Z_3` with `s = 1 mod 3`.  The polynomial reduces to the
//! Conway-style `x^2 + x + 2` over `F_3` and divides `x^4 + 1`, so `x` is a
//! primitive 8th root of unity.  Frobenius sends `x` to `x^3 = -s - x`.

use crate::error::{domain, Error, Result};
use serde::Serialize;
use std::sync::OnceLock;

/// Largest supported working precision.
pub const MAX_PRECISION: u32 = 32;

// Guard digits used internally by the logarithm stay below this.
const GUARD_LIMIT: u32 = 39;

pub(crate) const fn pow3(n: u32) -> u64 {
    3u64.pow(n)
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    add_mod(a, m - b % m, m)
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u128, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo a power of three; `None` when `3 | a`.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if a.is_multiple_of(3) {
        return None;
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

pub(crate) fn reduce_i64(v: i64, m: u64) -> u64 {
    (v as i128).rem_euclid(m as i128) as u64
}

/// 3-adic valuation of a residue modulo `3^n`; zero has valuation `n`.
pub(crate) fn valuation_mod(mut x: u64, n: u32) -> u32 {
    if x == 0 {
        return n;
    }
    let mut v = 0;
    while x.is_multiple_of(3) {
        x /= 3;
        v += 1;
    }
    v.min(n)
}

/// 3-adic valuation of a nonzero integer.
pub fn v3(x: i64) -> u32 {
    assert!(x != 0, "valuation of zero");
    let mut x = x.unsigned_abs();
    let mut v = 0;
    while x.is_multiple_of(3) {
        x /= 3;
        v += 1;
    }
    v
}

/// Working precision `N`: arithmetic is modulo `3^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Precision(u32);

impl Precision {
    pub const DEFAULT: Precision = Precision(8);

    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_PRECISION {
            return Err(Error::PrecisionOutOfRange(n));
        }
        Ok(Precision(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn modulus(self) -> u64 {
        pow3(self.0)
    }

    /// Precision one lower, as used for results of the logarithm.
    pub fn lower(self) -> Option<Precision> {
        (self.0 > 1).then(|| Precision(self.0 - 1))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DEFAULT
    }
}

fn check_same(a: Precision, b: Precision) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::PrecisionMismatch(a.0, b.0))
    }
}

/// An element of `Z/3^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Residue {
    value: u64,
    precision: Precision,
}

// fallible on mismatched precision, so these are not the operator traits
#[allow(clippy::should_implement_trait)]
impl Residue {
    pub fn new(value: i64, precision: Precision) -> Self {
        Residue { value: reduce_i64(value, precision.modulus()), precision }
    }

    pub(crate) fn from_raw(value: u64, precision: Precision) -> Self {
        Residue { value: value % precision.modulus(), precision }
    }

    /// Canonical representative in `[0, 3^N)`.
    pub fn value(self) -> u64 {
        self.value
    }

    /// Representative of least absolute value.
    pub fn signed(self) -> i64 {
        let m = self.precision.modulus();
        if self.value > m / 2 {
            self.value as i64 - m as i64
        } else {
            self.value as i64
        }
    }

    pub fn precision(self) -> Precision {
        self.precision
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn is_unit(self) -> bool {
        !self.value.is_multiple_of(3)
    }

    /// Valuation, with `v(0) = N`.
    pub fn valuation(self) -> u32 {
        valuation_mod(self.value, self.precision.0)
    }

    pub fn add(self, o: Residue) -> Result<Residue> {
        check_same(self.precision, o.precision)?;
        Ok(Residue { value: add_mod(self.value, o.value, self.precision.modulus()), ..self })
    }

    pub fn sub(self, o: Residue) -> Result<Residue> {
        check_same(self.precision, o.precision)?;
        Ok(Residue { value: sub_mod(self.value, o.value, self.precision.modulus()), ..self })
    }

    pub fn mul(self, o: Residue) -> Result<Residue> {
        check_same(self.precision, o.precision)?;
        Ok(Residue { value: mul_mod(self.value, o.value, self.precision.modulus()), ..self })
    }

    pub fn neg(self) -> Residue {
        Residue { value: sub_mod(0, self.value, self.precision.modulus()), ..self }
    }

    pub fn inverse(self) -> Result<Residue> {
        inv_mod(self.value, self.precision.modulus())
            .map(|value| Residue { value, ..self })
            .ok_or_else(|| Error::NotAUnit(format!("{} mod 3^{}", self.value, self.precision.0)))
    }

    /// Image under `Z/3^N -> Z/3^M` for `M <= N`.
    pub fn reduce(self, p: Precision) -> Result<Residue> {
        if p > self.precision {
            return Err(Error::PrecisionMismatch(self.precision.0, p.0));
        }
        Ok(Residue::from_raw(self.value, p))
    }
}

impl std::fmt::Display for Residue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (mod 3^{})", self.value, self.precision.0)
    }
}

/// A residue `u` with `u = 1 mod 3`, the domain of [`log_base4`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct UnitOnePlus3(Residue);

impl UnitOnePlus3 {
    pub fn new(r: Residue) -> Result<Self> {
        if r.value % 3 != 1 {
            return Err(domain(format!("{} is not 1 mod 3", r.value)));
        }
        Ok(UnitOnePlus3(r))
    }

    pub fn from_i64(v: i64, p: Precision) -> Result<Self> {
        Self::new(Residue::new(v, p))
    }

    pub fn residue(self) -> Residue {
        self.0
    }
}

/// `sqrt(-2)` modulo `3^GUARD_LIMIT`, normalised to be `1 mod 3`.
fn sqrt_minus_two_full() -> u64 {
    static CELL: OnceLock<u64> = OnceLock::new();
    *CELL.get_or_init(|| {
        let m = pow3(GUARD_LIMIT);
        let mut s: u64 = 1;
        // Newton iteration doubles the number of correct digits.
        for _ in 0..8 {
            let f = add_mod(mul_mod(s, s, m), 2, m);
            let df = inv_mod(mul_mod(2, s, m), m).expect("2s is a unit");
            s = sub_mod(s, mul_mod(f, df, m), m);
        }
        debug_assert_eq!(add_mod(mul_mod(s, s, m), 2, m), 0);
        s
    })
}

pub(crate) fn sqrt_minus_two(p: Precision) -> u64 {
    sqrt_minus_two_full() % p.modulus()
}

/// Which primitive 8th root of unity plays the role of `omega`.
///
/// Both roots reducing to a generator of `F_9^x` with minimal polynomial
/// `x^2 + x + 2` work; they are exchanged by Frobenius.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaRoot {
    #[default]
    Primary,
    Conjugate,
}

impl std::str::FromStr for OmegaRoot {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primary" => Ok(OmegaRoot::Primary),
            "conjugate" => Ok(OmegaRoot::Conjugate),
            _ => Err(domain(format!("unknown omega root '{s}'"))),
        }
    }
}

/// An element `c0 + c1 x` of `W(F_9)/3^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WittElement {
    c0: u64,
    c1: u64,
    precision: Precision,
}

impl WittElement {
    pub fn new(c0: i64, c1: i64, precision: Precision) -> Self {
        let m = precision.modulus();
        WittElement { c0: reduce_i64(c0, m), c1: reduce_i64(c1, m), precision }
    }

    pub(crate) fn from_raw(c0: u64, c1: u64, precision: Precision) -> Self {
        let m = precision.modulus();
        WittElement { c0: c0 % m, c1: c1 % m, precision }
    }

    pub fn from_int(v: i64, precision: Precision) -> Self {
        Self::new(v, 0, precision)
    }

    pub fn from_residue(r: Residue) -> Self {
        Self::from_raw(r.value, 0, r.precision)
    }

    pub fn zero(precision: Precision) -> Self {
        Self::from_int(0, precision)
    }

    pub fn one(precision: Precision) -> Self {
        Self::from_int(1, precision)
    }

    /// The polynomial generator `x`.
    pub fn generator(precision: Precision) -> Self {
        Self::new(0, 1, precision)
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn coords(&self) -> (Residue, Residue) {
        (Residue::from_raw(self.c0, self.precision), Residue::from_raw(self.c1, self.precision))
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }

    /// Units are exactly the elements with nonzero reduction in `F_9`.
    pub fn is_unit(&self) -> bool {
        !self.c0.is_multiple_of(3) || !self.c1.is_multiple_of(3)
    }

    /// Reduction to `F_9 = F_3[xbar]/(xbar^2 + xbar + 2)` as coordinates.
    pub fn residue_f9(&self) -> [u8; 2] {
        [(self.c0 % 3) as u8, (self.c1 % 3) as u8]
    }

    /// Minimum valuation of the two coordinates.
    pub fn valuation(&self) -> u32 {
        valuation_mod(self.c0, self.precision.0).min(valuation_mod(self.c1, self.precision.0))
    }

    pub fn checked_add(&self, o: &WittElement) -> Result<WittElement> {
        check_same(self.precision, o.precision)?;
        let m = self.precision.modulus();
        Ok(WittElement { c0: add_mod(self.c0, o.c0, m), c1: add_mod(self.c1, o.c1, m), ..*self })
    }

    pub fn checked_sub(&self, o: &WittElement) -> Result<WittElement> {
        check_same(self.precision, o.precision)?;
        let m = self.precision.modulus();
        Ok(WittElement { c0: sub_mod(self.c0, o.c0, m), c1: sub_mod(self.c1, o.c1, m), ..*self })
    }

    pub fn checked_mul(&self, o: &WittElement) -> Result<WittElement> {
        check_same(self.precision, o.precision)?;
        let m = self.precision.modulus();
        let s = sqrt_minus_two(self.precision);
        let (a0, a1, b0, b1) = (self.c0, self.c1, o.c0, o.c1);
        let hi = mul_mod(a1, b1, m);
        let c0 = add_mod(mul_mod(a0, b0, m), hi, m);
        let c1 = sub_mod(add_mod(mul_mod(a0, b1, m), mul_mod(a1, b0, m), m), mul_mod(s, hi, m), m);
        Ok(WittElement { c0, c1, ..*self })
    }

    pub fn neg(&self) -> WittElement {
        let m = self.precision.modulus();
        WittElement { c0: sub_mod(0, self.c0, m), c1: sub_mod(0, self.c1, m), ..*self }
    }

    pub fn scale(&self, k: i64) -> WittElement {
        let m = self.precision.modulus();
        let k = reduce_i64(k, m);
        WittElement { c0: mul_mod(self.c0, k, m), c1: mul_mod(self.c1, k, m), ..*self }
    }

    /// Frobenius `sigma`, fixing `Z_3` and sending `x` to `-s - x`.
    pub fn frobenius(&self) -> WittElement {
        let m = self.precision.modulus();
        let s = sqrt_minus_two(self.precision);
        WittElement {
            c0: sub_mod(self.c0, mul_mod(s, self.c1, m), m),
            c1: sub_mod(0, self.c1, m),
            ..*self
        }
    }

    /// `w * sigma(w)`, which lies in `Z_3`.
    pub fn norm(&self) -> Residue {
        let m = self.precision.modulus();
        let s = sqrt_minus_two(self.precision);
        let v = sub_mod(
            sub_mod(mul_mod(self.c0, self.c0, m), mul_mod(s, mul_mod(self.c0, self.c1, m), m), m),
            mul_mod(self.c1, self.c1, m),
            m,
        );
        Residue::from_raw(v, self.precision)
    }

    pub fn inverse(&self) -> Result<WittElement> {
        let n = self.norm().inverse().map_err(|_| Error::NotAUnit(format!("{self:?}")))?;
        Ok(self.frobenius().scale(n.signed()))
    }

    pub fn pow(&self, mut e: u64) -> WittElement {
        let mut acc = WittElement::one(self.precision);
        let mut b = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b;
            }
            b = b * b;
            e >>= 1;
        }
        acc
    }

    /// Image under the projection to a lower precision.
    pub fn reduce(&self, p: Precision) -> Result<WittElement> {
        if p > self.precision {
            return Err(Error::PrecisionMismatch(self.precision.0, p.0));
        }
        Ok(WittElement::from_raw(self.c0, self.c1, p))
    }

    /// Teichmuller representative of the reduction of `self`.
    pub fn teichmuller(&self) -> WittElement {
        if !self.is_unit() {
            return WittElement::zero(self.precision);
        }
        // Each ninth power gains at least one correct digit.
        let mut w = *self;
        for _ in 0..self.precision.0 {
            w = w.pow(9);
        }
        w
    }

    /// Residues `rho_i in F_9` with `self = sum_i tau(rho_i) 3^i`, `tau` the
    /// Teichmuller lift.  Returns `N` digits.
    pub fn teichmuller_digits(&self) -> Vec<[u8; 2]> {
        let mut digits = Vec::with_capacity(self.precision.0 as usize);
        let mut w = *self;
        for n in (1..=self.precision.0).rev() {
            let t = w.teichmuller();
            digits.push(w.residue_f9());
            if n == 1 {
                break;
            }
            let diff = w - t;
            let lower = Precision(n - 1);
            debug_assert!(diff.c0.is_multiple_of(3) && diff.c1.is_multiple_of(3));
            w = WittElement::from_raw(diff.c0 / 3, diff.c1 / 3, lower);
        }
        digits
    }
}

impl std::ops::Add for WittElement {
    type Output = WittElement;
    /// # Panics
    /// On precision mismatch; use [`WittElement::checked_add`] to get an error instead.
    fn add(self, o: WittElement) -> WittElement {
        self.checked_add(&o).expect("precision mismatch")
    }
}

impl std::ops::Sub for WittElement {
    type Output = WittElement;
    fn sub(self, o: WittElement) -> WittElement {
        self.checked_sub(&o).expect("precision mismatch")
    }
}

impl std::ops::Mul for WittElement {
    type Output = WittElement;
    fn mul(self, o: WittElement) -> WittElement {
        self.checked_mul(&o).expect("precision mismatch")
    }
}

impl std::ops::Neg for WittElement {
    type Output = WittElement;
    fn neg(self) -> WittElement {
        WittElement::neg(&self)
    }
}

/// A primitive 8th root of unity `omega` in `W(F_9)/3^N`.
pub fn teichmueller_omega(precision: Precision) -> WittElement {
    teichmueller_omega_with(precision, OmegaRoot::Primary)
}

pub fn teichmueller_omega_with(precision: Precision, root: OmegaRoot) -> WittElement {
    let x = WittElement::generator(precision);
    match root {
        OmegaRoot::Primary => x,
        OmegaRoot::Conjugate => x.frobenius(),
    }
}

/// `log(u) mod 3^n` for `u = 1 mod 3` given modulo `3^n`.
fn log_mod(u: u64, n: u32) -> u64 {
    // Term k has valuation at least k - floor(log_3 k); stop once that reaches n.
    let floor_log3 = |k: u64| {
        let mut v = 0;
        let mut p = 3;
        while p <= k {
            p *= 3;
            v += 1;
        }
        v
    };
    let mut kmax = 1u64;
    while (kmax + 1) - floor_log3(kmax + 1) < n as u64 {
        kmax += 1;
    }
    let guard = n + floor_log3(kmax) as u32;
    assert!(guard <= GUARD_LIMIT);
    let big = pow3(guard);
    let target = pow3(n);
    let x = sub_mod(u, 1, big);
    let mut xp = 1u64;
    let mut acc = 0u64;
    for k in 1..=kmax {
        xp = mul_mod(xp, x, big);
        let v = valuation_mod(k, 64);
        let unit = k / pow3(v);
        let q = (xp / pow3(v)) % target;
        debug_assert_eq!(xp % pow3(v), 0);
        let term = mul_mod(q, inv_mod(unit % target, target).expect("unit"), target);
        acc = if k % 2 == 1 { add_mod(acc, term, target) } else { sub_mod(acc, term, target) };
    }
    acc
}

/// `log(u) / log(4)` for `u = 1 mod 3`, a residue modulo `3^{N-1}`.
///
/// Both logarithms have valuation at least one and `log 4` has valuation
/// exactly one, so one digit of precision is lost.
pub fn log_base4(u: UnitOnePlus3) -> Result<Residue> {
    let r = u.residue();
    let p = r.precision();
    let lower = p.lower().ok_or_else(|| domain("log_base4 needs precision at least 2"))?;
    let n = p.get();
    let lu = log_mod(r.value(), n);
    let l4 = log_mod(4 % p.modulus(), n);
    if valuation_mod(l4, n) != 1 {
        return Err(crate::error::invariant("log 4 must have valuation exactly one"));
    }
    let m = lower.modulus();
    let q = inv_mod((l4 / 3) % m, m).expect("log4/3 is a unit");
    Ok(Residue::from_raw(mul_mod((lu / 3) % m, q, m), lower))
}

/// `v_3(4^{t/2} - 1)` for `t = 0 mod 4`, `t != 0`: the valuation bounding the
/// torsion contributed by the central `Z_3` in internal degree `t`.
pub fn central_character_valuation(t: i64) -> Result<u32> {
    if t == 0 || t % 4 != 0 {
        return Err(domain(format!("t = {t} must be a nonzero multiple of 4")));
    }
    // 4^{-n} - 1 = -(4^n - 1)/4^n has the same valuation as 4^n - 1.
    let n = (t / 2).unsigned_abs() as u128;
    let m = pow3(GUARD_LIMIT);
    let diff = sub_mod(pow_mod(4, n, m), 1, m);
    if diff == 0 {
        return Err(domain(format!("valuation at t = {t} exceeds working range")));
    }
    Ok(valuation_mod(diff, GUARD_LIMIT))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> Precision {
        Precision::new(n).unwrap()
    }

    #[test]
    fn generator_is_primitive_eighth_root() {
        for n in [1, 4, 8, 20, 32] {
            let x = WittElement::generator(p(n));
            assert_eq!(x.pow(4), WittElement::from_int(-1, p(n)));
            assert_eq!(x.pow(8), WittElement::one(p(n)));
            assert_eq!(x.frobenius(), x.pow(3));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let w = WittElement::new(5, -7, p(10));
        assert_eq!(w * w.inverse().unwrap(), WittElement::one(p(10)));
        assert!(WittElement::new(3, 6, p(10)).inverse().is_err());
    }

    #[test]
    fn log_base4_of_four_is_one() {
        let r = log_base4(UnitOnePlus3::from_i64(4, p(8)).unwrap()).unwrap();
        assert_eq!(r.value(), 1);
        assert_eq!(r.precision(), p(7));
        let r = log_base4(UnitOnePlus3::from_i64(16, p(8)).unwrap()).unwrap();
        assert_eq!(r.value(), 2);
    }

    #[test]
    fn central_valuation_small_cases() {
        assert_eq!(central_character_valuation(4).unwrap(), 1);
        assert_eq!(central_character_valuation(12).unwrap(), 2);
        assert_eq!(central_character_valuation(-36).unwrap(), 3);
        assert!(central_character_valuation(0).is_err());
        assert!(central_character_valuation(6).is_err());
    }

    #[test]
    fn teichmuller_digits_of_omega() {
        let w = teichmueller_omega(p(6));
        let d = w.teichmuller_digits();
        assert_eq!(d[0], [0, 1]);
        assert!(d[1..].iter().all(|r| *r == [0, 0]));
    }
}
