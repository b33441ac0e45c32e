//! The `d_1` differential on adapted generators of the `q = 0` line.
//!
//! `d_1` is `F_3[[w]][v1]`-linear.  On each generator it is zero or a unit
//! times `v1^s` times a single generator of the next column; which case
//! applies depends on the 3-adic shape of the index.

use crate::e1::{AdaptedGenerator, AdaptedTerm, FiltrationCaps, GenFamily};
use crate::error::{domain, invariant, Result};
use crate::f3::F3;
use crate::padic::v3;
use serde::Serialize;
use std::collections::BTreeMap;

/// Largest `|k|` accepted by the engine.
pub const MAX_INDEX: i64 = 1_000_000;

/// The branch of the `d_1` formula selected by an index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseTag {
    /// `Delta_0`.
    Zero,
    /// `Delta_k`, `k = 2m + 1`.
    DeltaOdd,
    /// `Delta_k`, `k = 2m 3^n`, `3 does not divide m`.
    DeltaEven,
    /// `b_{2k+1}`, `k = 3^{n+1}(3m + 1)`.
    BFirst,
    /// `b_{2k+1}`, `k = 3^n(9m + 8)`.
    BSecond,
    /// `bbar_{2k+1}`, `2k + 1 = 6m + 1`.
    BBarFirst,
    /// `bbar_{2k+1}`, `2k + 1 = 3^n(18m + 17)`.
    BBarSecond,
    /// `bbar_{2k+1}`, `2k + 1 = 3^n(18m + 5)`.
    BBarThird,
    /// Every other b or bbar index: `d_1 = 0`.
    Else,
}

/// The seven branches that carry a sign.
pub const SIGN_CASES: [CaseTag; 7] = [
    CaseTag::DeltaOdd,
    CaseTag::DeltaEven,
    CaseTag::BFirst,
    CaseTag::BSecond,
    CaseTag::BBarFirst,
    CaseTag::BBarSecond,
    CaseTag::BBarThird,
];

impl std::str::FromStr for CaseTag {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        let all = [
            ("zero", CaseTag::Zero),
            ("delta-odd", CaseTag::DeltaOdd),
            ("delta-even", CaseTag::DeltaEven),
            ("b-first", CaseTag::BFirst),
            ("b-second", CaseTag::BSecond),
            ("bbar-first", CaseTag::BBarFirst),
            ("bbar-second", CaseTag::BBarSecond),
            ("bbar-third", CaseTag::BBarThird),
            ("else", CaseTag::Else),
        ];
        all.iter()
            .find(|(n, _)| *n == s)
            .map(|(_, t)| *t)
            .ok_or_else(|| domain(format!("unknown case '{s}'")))
    }
}

impl CaseTag {
    pub fn name(self) -> &'static str {
        match self {
            CaseTag::Zero => "zero",
            CaseTag::DeltaOdd => "delta-odd",
            CaseTag::DeltaEven => "delta-even",
            CaseTag::BFirst => "b-first",
            CaseTag::BSecond => "b-second",
            CaseTag::BBarFirst => "bbar-first",
            CaseTag::BBarSecond => "bbar-second",
            CaseTag::BBarThird => "bbar-third",
            CaseTag::Else => "else",
        }
    }
}

/// An index together with the `(m, n)` that put it in its case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IndexCase {
    pub family: GenFamily,
    pub k: i64,
    pub tag: CaseTag,
    pub m: i64,
    pub n: u32,
}

fn p3(n: u32) -> i64 {
    3i64.pow(n)
}

impl IndexCase {
    /// Rebuild `k` from `(tag, m, n)`; `None` for the zero and else cases.
    pub fn reconstruct(&self) -> Option<i64> {
        let (m, n) = (self.m, self.n);
        let label = match self.tag {
            CaseTag::Zero | CaseTag::Else => return None,
            CaseTag::DeltaOdd => return Some(2 * m + 1),
            CaseTag::DeltaEven => return Some(2 * m * p3(n)),
            CaseTag::BFirst => return Some(p3(n + 1) * (3 * m + 1)),
            CaseTag::BSecond => return Some(p3(n) * (9 * m + 8)),
            CaseTag::BBarFirst => 6 * m + 1,
            CaseTag::BBarSecond => p3(n) * (18 * m + 17),
            CaseTag::BBarThird => p3(n) * (18 * m + 5),
        };
        Some((label - 1) / 2)
    }
}

fn check_index(k: i64) -> Result<()> {
    if k.abs() > MAX_INDEX {
        return Err(domain(format!("index {k} beyond supported range {MAX_INDEX}")));
    }
    Ok(())
}

/// Decide which branch of `d_1` applies to the generator of `family` with parameter `k`.
/// For the b-families the cases are stated in terms of `k`, for bbar in terms of `2k + 1`.
pub fn classify(family: GenFamily, k: i64) -> Result<IndexCase> {
    check_index(k)?;
    let case = |tag, m, n| Ok(IndexCase { family, k, tag, m, n });
    match family {
        GenFamily::Delta => {
            if k == 0 {
                case(CaseTag::Zero, 0, 0)
            } else if k.rem_euclid(2) == 1 {
                case(CaseTag::DeltaOdd, (k - 1) / 2, 0)
            } else {
                let n = v3(k / 2);
                case(CaseTag::DeltaEven, k / 2 / p3(n), n)
            }
        }
        GenFamily::B => {
            if k == 0 {
                return case(CaseTag::Else, 0, 0);
            }
            let v = v3(k);
            let u = k / p3(v);
            if v >= 1 && u.rem_euclid(3) == 1 {
                case(CaseTag::BFirst, (u - 1) / 3, v - 1)
            } else if u.rem_euclid(9) == 8 {
                case(CaseTag::BSecond, (u - 8) / 9, v)
            } else {
                case(CaseTag::Else, 0, 0)
            }
        }
        GenFamily::BBar => {
            let l = 2 * k + 1;
            if l.rem_euclid(6) == 1 {
                return case(CaseTag::BBarFirst, (l - 1) / 6, 0);
            }
            let v = v3(l);
            let u = l / p3(v);
            match u.rem_euclid(18) {
                17 => case(CaseTag::BBarSecond, (u - 17) / 18, v),
                5 => case(CaseTag::BBarThird, (u - 5) / 18, v),
                _ => case(CaseTag::Else, 0, 0),
            }
        }
        GenFamily::DeltaBar => Err(domain("the last column has no outgoing d1")),
    }
}

/// `d_1(gen) = coeff * v1^v1_shift * target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct D1Image {
    pub coeff: F3,
    pub v1_shift: u32,
    pub target: AdaptedGenerator,
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Evaluates `d_1`.  A sign fault negates one branch; it exists so the
/// verification gates can be shown to catch transcription errors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct D1Engine {
    sign_fault: Option<CaseTag>,
}

impl D1Engine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_sign_fault(tag: CaseTag) -> Self {
        D1Engine { sign_fault: Some(tag) }
    }

    pub fn sign_fault(&self) -> Option<CaseTag> {
        self.sign_fault
    }

    /// `d_1` of a bare generator; `None` when it vanishes.
    pub fn d1_generator(&self, g: &AdaptedGenerator) -> Result<Option<D1Image>> {
        if g.family == GenFamily::DeltaBar {
            return Ok(None);
        }
        let c = classify(g.family, g.k)?;
        let (m, n) = (c.m, c.n);
        let b = |label: i64| AdaptedGenerator::from_label(GenFamily::B, label);
        let bbar = |label: i64| AdaptedGenerator::from_label(GenFamily::BBar, label);
        let dbar = |k: i64| AdaptedGenerator::new(GenFamily::DeltaBar, k);
        let (coeff, shift, target) = match c.tag {
            CaseTag::Zero | CaseTag::Else => return Ok(None),
            CaseTag::DeltaOdd => (sign(m + 1), 0, b(6 * m + 3)?),
            CaseTag::DeltaEven => (sign(m + 1) * m.rem_euclid(3), 4 * p3(n) - 2, b(2 * p3(n) * (3 * m - 1) + 1)?),
            CaseTag::BFirst => (sign(n as i64), 6 * p3(n) + 2, bbar(p3(n + 1) * (6 * m + 1))?),
            CaseTag::BSecond => (sign(n as i64), 10 * p3(n) + 2, bbar(p3(n) * (18 * m + 11))?),
            CaseTag::BBarFirst => (sign(m + 1), 2, dbar(2 * m)),
            CaseTag::BBarSecond => (sign(m + n as i64), 4 * p3(n), dbar(p3(n) * (6 * m + 5))),
            CaseTag::BBarThird => (sign(m + n as i64 + 1), 4 * p3(n), dbar(p3(n) * (6 * m + 1))),
        };
        let mut coeff = F3::new(coeff);
        if self.sign_fault == Some(c.tag) {
            coeff = -coeff;
        }
        if coeff.is_zero() {
            return Err(invariant(format!("zero coefficient in nonzero case for {g}")));
        }
        let img = D1Image { coeff, v1_shift: shift as u32, target };
        if 4 * shift + target.degree() != g.degree() {
            return Err(invariant(format!("d1({g}) = v1^{shift} {target} is not homogeneous")));
        }
        Ok(Some(img))
    }

    /// `d_1` on a vector; images of out-of-cap terms stay marked as overflow.
    pub fn d1(&self, v: &E1Vector, caps: &FiltrationCaps) -> Result<E1Vector> {
        if v.column >= 3 {
            return Err(domain("d1 leaves the last column"));
        }
        let mut out = E1Vector::new(v.column + 1, v.t);
        for (overflowed, map) in [(false, &v.terms), (true, &v.overflow)] {
            for (term, c) in map {
                if let Some(img) = self.d1_generator(&term.gen)? {
                    let t = AdaptedTerm::new(term.v1 + img.v1_shift, img.target);
                    out.add(t, *c * img.coeff, caps, overflowed)?;
                }
            }
        }
        Ok(out)
    }
}

pub fn d1_generator(g: &AdaptedGenerator) -> Result<Option<D1Image>> {
    D1Engine::new().d1_generator(g)
}

/// A homogeneous element of `E_1^{p,0,t}`, split into terms inside the caps
/// and terms beyond them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E1Vector {
    pub column: u8,
    pub t: i64,
    pub terms: BTreeMap<AdaptedTerm, F3>,
    pub overflow: BTreeMap<AdaptedTerm, F3>,
}

impl E1Vector {
    pub fn new(column: u8, t: i64) -> Self {
        E1Vector { column, t, terms: BTreeMap::new(), overflow: BTreeMap::new() }
    }

    pub fn from_term(term: AdaptedTerm, c: F3, caps: &FiltrationCaps) -> Result<Self> {
        let mut v = E1Vector::new(term.column(), term.degree());
        v.add(term, c, caps, false)?;
        Ok(v)
    }

    /// Add `c * term`; `force_overflow` keeps the overflow marker of an out-of-cap source.
    pub fn add(&mut self, term: AdaptedTerm, c: F3, caps: &FiltrationCaps, force_overflow: bool) -> Result<()> {
        if term.column() != self.column || term.degree() != self.t {
            return Err(invariant(format!(
                "{term} has (p, t) = ({}, {}), expected ({}, {})",
                term.column(),
                term.degree(),
                self.column,
                self.t
            )));
        }
        let map = if force_overflow || !term.in_caps(caps) { &mut self.overflow } else { &mut self.terms };
        let e = map.entry(term).or_default();
        *e = *e + c;
        if e.is_zero() {
            map.remove(&term);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.overflow.is_empty()
    }
}

impl std::fmt::Display for E1Vector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (marker, map) in [("", &self.terms), ("(overflow) ", &self.overflow)] {
            for (t, c) in map {
                let s = if c.signed() < 0 { "-" } else if first { "" } else { "+" };
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{s}{marker}{t}")?;
                first = false;
            }
        }
        Ok(())
    }
}

/// A literal, enumeration-based reading of the `d_1` formulas, kept apart from
/// [`classify`] so the two can be compared.
pub mod reference {
    use super::*;

    /// `(case, m, n)` for every branch pattern that `k` matches.
    pub fn matching_cases(family: GenFamily, k: i64) -> Vec<(CaseTag, i64, u32)> {
        let mut out = Vec::new();
        let mut pw = 1i64;
        let mut pows = Vec::new();
        for n in 0..=20u32 {
            pows.push((n, pw));
            pw *= 3;
        }
        match family {
            GenFamily::Delta => {
                if k == 0 {
                    out.push((CaseTag::Zero, 0, 0));
                }
                if (k - 1) % 2 == 0 {
                    out.push((CaseTag::DeltaOdd, (k - 1) / 2, 0));
                }
                for &(n, q) in &pows {
                    if k != 0 && k % (2 * q) == 0 && (k / (2 * q)) % 3 != 0 {
                        out.push((CaseTag::DeltaEven, k / (2 * q), n));
                    }
                }
            }
            GenFamily::B => {
                for &(n, q) in &pows {
                    let q1 = 3 * q;
                    if k % q1 == 0 && (k / q1 - 1) % 3 == 0 {
                        out.push((CaseTag::BFirst, (k / q1 - 1) / 3, n));
                    }
                    if k % q == 0 && (k / q - 8) % 9 == 0 {
                        out.push((CaseTag::BSecond, (k / q - 8) / 9, n));
                    }
                }
            }
            GenFamily::BBar => {
                let l = 2 * k + 1;
                if (l - 1) % 6 == 0 {
                    out.push((CaseTag::BBarFirst, (l - 1) / 6, 0));
                }
                for &(n, q) in &pows {
                    if l % q == 0 && (l / q - 17) % 18 == 0 {
                        out.push((CaseTag::BBarSecond, (l / q - 17) / 18, n));
                    }
                    if l % q == 0 && (l / q - 5) % 18 == 0 {
                        out.push((CaseTag::BBarThird, (l / q - 5) / 18, n));
                    }
                }
            }
            GenFamily::DeltaBar => {}
        }
        out
    }

    fn minus_one_pow(e: i64) -> i64 {
        (-1i64).pow((e.rem_euclid(2)) as u32)
    }

    /// `(coefficient as an integer, v1 shift, target)`, straight from the formulas.
    pub fn evaluate(family: GenFamily, k: i64) -> Option<(i64, i64, AdaptedGenerator)> {
        let cases = matching_cases(family, k);
        let &(tag, m, n) = cases.first()?;
        let t3 = 3i64.pow(n);
        let b = |l: i64| AdaptedGenerator::new(GenFamily::B, (l - 1) / 2);
        let bb = |l: i64| AdaptedGenerator::new(GenFamily::BBar, (l - 1) / 2);
        let db = |k: i64| AdaptedGenerator::new(GenFamily::DeltaBar, k);
        Some(match tag {
            CaseTag::Zero | CaseTag::Else => return None,
            CaseTag::DeltaOdd => (minus_one_pow(m + 1), 0, b(6 * m + 3)),
            CaseTag::DeltaEven => (minus_one_pow(m + 1) * m, 4 * t3 - 2, b(2 * t3 * (3 * m - 1) + 1)),
            CaseTag::BFirst => (minus_one_pow(n as i64), 6 * t3 + 2, bb(3 * t3 * (6 * m + 1))),
            CaseTag::BSecond => (minus_one_pow(n as i64), 10 * t3 + 2, bb(t3 * (18 * m + 11))),
            CaseTag::BBarFirst => (minus_one_pow(m + 1), 2, db(2 * m)),
            CaseTag::BBarSecond => (minus_one_pow(m + n as i64), 4 * t3, db(t3 * (6 * m + 5))),
            CaseTag::BBarThird => (minus_one_pow(m + n as i64 + 1), 4 * t3, db(t3 * (6 * m + 1))),
        })
    }
}

/// Hand-evaluated instances: `(family, k, coefficient, v1 shift, target family, target label)`.
/// A coefficient of 0 means `d_1` vanishes.
pub const PINNED: &[(GenFamily, i64, i8, u32, GenFamily, i64)] = {
    use GenFamily::*;
    &[
        (Delta, 1, -1, 0, B, 3),
        (Delta, 2, 1, 2, B, 5),
        (Delta, -1, 1, 0, B, -3),
        (Delta, 3, 1, 0, B, 9),
        (Delta, -2, -1, 2, B, -7),
        (Delta, 6, 1, 10, B, 13),
        (Delta, 4, 1, 2, B, 11),
        (Delta, -6, -1, 10, B, -23),
        (Delta, -3, -1, 0, B, -9),
        (Delta, 0, 0, 0, B, 0),
        (B, 3, 1, 8, BBar, 3),
        (B, -1, 1, 12, BBar, -7),
        (B, 8, 1, 12, BBar, 11),
        (B, -3, -1, 32, BBar, -21),
        (B, -6, 1, 8, BBar, -15),
        (B, 9, -1, 20, BBar, 9),
        (B, 1, 0, 0, BBar, 0),
        (B, 0, 0, 0, BBar, 0),
        (B, 24, -1, 32, BBar, 33),
        (BBar, 0, -1, 2, DeltaBar, 0),
        (BBar, -1, -1, 4, DeltaBar, -1),
        (BBar, 2, -1, 4, DeltaBar, 1),
        (BBar, 3, 1, 2, DeltaBar, 2),
        (BBar, -2, 1, 12, DeltaBar, -3),
        (BBar, 7, 1, 12, DeltaBar, 3),
        (BBar, 1, 0, 0, DeltaBar, 0),
        (BBar, 8, 1, 4, DeltaBar, 5),
        (BBar, -3, 1, 2, DeltaBar, -2),
        (BBar, 4, 0, 0, DeltaBar, 0),
    ]
};

#[derive(Clone, Debug, Default, Serialize)]
pub struct ClassificationReport {
    pub range: i64,
    pub checked: usize,
    /// Indices matching no branch (Delta) or several branches (any family).
    pub ambiguous: Vec<String>,
    /// Indices where [`classify`] disagrees with the literal matcher or `(m, n)` does not rebuild `k`.
    pub mismatched: Vec<String>,
}

impl ClassificationReport {
    pub fn pass(&self) -> bool {
        self.ambiguous.is_empty() && self.mismatched.is_empty()
    }
}

/// Check that the branches are disjoint and exhaustive on `[-range, range]`.
pub fn check_classification(range: i64) -> Result<ClassificationReport> {
    let mut rep = ClassificationReport { range, ..Default::default() };
    for family in [GenFamily::Delta, GenFamily::B, GenFamily::BBar] {
        for k in -range..=range {
            rep.checked += 1;
            let lit = reference::matching_cases(family, k);
            let ok_count = if family == GenFamily::Delta { lit.len() == 1 } else { lit.len() <= 1 };
            if !ok_count {
                rep.ambiguous.push(format!("{family:?} {k}: {lit:?}"));
                continue;
            }
            let c = classify(family, k)?;
            let expected = lit.first().map(|&(t, m, n)| (t, m, n)).unwrap_or((CaseTag::Else, 0, 0));
            let got = (c.tag, c.m, c.n);
            let rebuilt = c.reconstruct().is_none_or(|r| r == k);
            if got != expected || !rebuilt {
                rep.mismatched.push(format!("{family:?} {k}: classify {got:?}, literal {expected:?}"));
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct D1SquaredReport {
    pub bound: i64,
    pub caps: FiltrationCaps,
    pub sign_fault: Option<CaseTag>,
    pub generators_checked: usize,
    /// Generators whose `d_1 d_1` has a nonzero in-cap term.
    pub composite_failures: Vec<String>,
    /// Terms of `d_1` or `d_1 d_1` that fell beyond the caps and were excluded.
    pub overflow_terms: usize,
    /// Generators where the engine and the literal reading of the formulas disagree.
    pub transcription_mismatches: Vec<String>,
    /// Hand-evaluated instances the engine does not reproduce.
    pub pinned_failures: Vec<String>,
    pub classification: ClassificationReport,
    pub pass: bool,
}

/// The `d1-squared` gate: `d_1 d_1 = 0` on every generator with `|k| <= bound`,
/// cross-checked against the literal formulas and the hand-evaluated instances,
/// plus disjointness and exhaustiveness of the case split on `[-class_range, class_range]`.
pub fn verify_d1_squared(engine: &D1Engine, caps: &FiltrationCaps, bound: i64, class_range: i64) -> Result<D1SquaredReport> {
    check_index(bound)?;
    let mut composite_failures = Vec::new();
    let mut transcription_mismatches = Vec::new();
    let mut overflow_terms = 0;
    let mut checked = 0;
    for family in [GenFamily::Delta, GenFamily::B, GenFamily::BBar] {
        for k in -bound..=bound {
            let g = AdaptedGenerator::new(family, k);
            checked += 1;
            let v = E1Vector::from_term(AdaptedTerm::new(0, g), F3::ONE, caps)?;
            let dv = engine.d1(&v, caps)?;
            overflow_terms += dv.overflow.len();
            if dv.column < 3 {
                let ddv = engine.d1(&dv, caps)?;
                overflow_terms += ddv.overflow.len();
                if !ddv.terms.is_empty() {
                    composite_failures.push(format!("d1 d1 {g} = {ddv}"));
                }
            }
            let got = engine.d1_generator(&g)?;
            let lit = reference::evaluate(family, k);
            let agree = match (got, lit) {
                (None, None) => true,
                (Some(a), Some((c, s, tgt))) => a.coeff == F3::new(c) && a.v1_shift as i64 == s && a.target == tgt,
                _ => false,
            };
            if !agree {
                transcription_mismatches.push(format!("{g}: engine {got:?}, formula {lit:?}"));
            }
        }
    }
    let mut pinned_failures = Vec::new();
    for &(fam, k, c, s, tfam, tlabel) in PINNED {
        let got = engine.d1_generator(&AdaptedGenerator::new(fam, k))?;
        let ok = match got {
            None => c == 0,
            Some(img) => {
                c != 0
                    && img.coeff == F3::new(c as i64)
                    && img.v1_shift == s
                    && img.target == AdaptedGenerator::from_label(tfam, tlabel)?
            }
        };
        if !ok {
            pinned_failures.push(format!("d1({}) = {got:?}, expected {c} v1^{s} {tfam:?}[{tlabel}]", AdaptedGenerator::new(fam, k)));
        }
    }
    let classification = check_classification(class_range)?;
    let pass = composite_failures.is_empty()
        && transcription_mismatches.is_empty()
        && pinned_failures.is_empty()
        && classification.pass();
    Ok(D1SquaredReport {
        bound,
        caps: *caps,
        sign_fault: engine.sign_fault,
        generators_checked: checked,
        composite_failures,
        overflow_terms,
        transcription_mismatches,
        pinned_failures,
        classification,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let caps = FiltrationCaps::default();
        let g = AdaptedGenerator::new(GenFamily::Delta, -1);
        let v = E1Vector::from_term(AdaptedTerm::new(6, g), F3::ONE, &caps).unwrap();
        let d = D1Engine::new().d1(&v, &caps).unwrap();
        assert_eq!(d.to_string(), "v1^6 b_-3");
        let img = d1_generator(&AdaptedGenerator::new(GenFamily::BBar, 0)).unwrap().unwrap();
        assert_eq!((img.coeff, img.v1_shift, img.target.k), (F3::TWO, 2, 0));
        assert_eq!(classify(GenFamily::B, 0).unwrap().tag, CaseTag::Else);
    }
}
