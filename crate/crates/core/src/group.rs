//! The maximal order `O_2 = W<S>/(S^2 = 3, S w = w^sigma S)` of the central
//! division algebra of invariant 1/2 over `Q_3`, the Morava stabilizer group
//! `S_2 = O_2^x` and its Galois extension `G_2 = S_2 x| Gal(F_9/F_3)`.

use crate::error::{domain, Error, Result};
use crate::padic::{
    log_base4, teichmueller_omega_with, OmegaRoot, Precision, Residue, UnitOnePlus3, WittElement,
};
use serde::Serialize;
use std::collections::{BTreeMap, HashSet, VecDeque};

/// `x + y S` with `x, y in W(F_9)/3^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct O2Element {
    x: WittElement,
    y: WittElement,
}

impl O2Element {
    pub fn new(x: WittElement, y: WittElement) -> Result<Self> {
        if x.precision() != y.precision() {
            return Err(Error::PrecisionMismatch(x.precision().get(), y.precision().get()));
        }
        Ok(O2Element { x, y })
    }

    pub fn from_witt(x: WittElement) -> Self {
        O2Element { x, y: WittElement::zero(x.precision()) }
    }

    pub fn scalar(r: Residue) -> Self {
        Self::from_witt(WittElement::from_residue(r))
    }

    pub fn one(p: Precision) -> Self {
        Self::from_witt(WittElement::one(p))
    }

    /// The uniformiser `S`.
    pub fn s(p: Precision) -> Self {
        O2Element { x: WittElement::zero(p), y: WittElement::one(p) }
    }

    pub fn precision(&self) -> Precision {
        self.x.precision()
    }

    pub fn parts(&self) -> (WittElement, WittElement) {
        (self.x, self.y)
    }

    pub fn checked_add(&self, o: &O2Element) -> Result<O2Element> {
        Ok(O2Element { x: self.x.checked_add(&o.x)?, y: self.y.checked_add(&o.y)? })
    }

    pub fn checked_sub(&self, o: &O2Element) -> Result<O2Element> {
        Ok(O2Element { x: self.x.checked_sub(&o.x)?, y: self.y.checked_sub(&o.y)? })
    }

    /// `(a + bS)(c + dS) = (ac + 3 b d^sigma) + (ad + b c^sigma) S`.
    pub fn checked_mul(&self, o: &O2Element) -> Result<O2Element> {
        let (a, b, c, d) = (self.x, self.y, o.x, o.y);
        let x = a.checked_mul(&c)? + (b * d.frobenius()).scale(3);
        let y = a * d + b * c.frobenius();
        Ok(O2Element { x, y })
    }

    pub fn scale(&self, k: i64) -> O2Element {
        O2Element { x: self.x.scale(k), y: self.y.scale(k) }
    }

    /// The reduced norm `x x^sigma - 3 y y^sigma`.
    pub fn reduced_norm(&self) -> Residue {
        let n = self.x.norm().sub(self.y.norm().mul(Residue::new(3, self.precision())).unwrap());
        n.expect("same precision")
    }

    /// Units of `O_2` are the elements with `x` a unit of `W`.
    pub fn is_unit(&self) -> bool {
        self.x.is_unit()
    }

    pub fn inverse(&self) -> Result<O2Element> {
        let n = self.reduced_norm().inverse().map_err(|_| Error::NotAUnit(format!("{self:?}")))?;
        Ok(O2Element { x: self.x.frobenius(), y: self.y.neg() }.scale(n.signed()))
    }

    /// The Frobenius automorphism `x + yS -> x^sigma + y^sigma S`.
    pub fn frobenius(&self) -> O2Element {
        O2Element { x: self.x.frobenius(), y: self.y.frobenius() }
    }

    pub fn pow(&self, mut e: u64) -> O2Element {
        let mut acc = O2Element::one(self.precision());
        let mut b = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&b).unwrap();
            }
            b = b.checked_mul(&b).unwrap();
            e >>= 1;
        }
        acc
    }

    pub fn reduce(&self, p: Precision) -> Result<O2Element> {
        Ok(O2Element { x: self.x.reduce(p)?, y: self.y.reduce(p)? })
    }
}

/// `(u, phi^e)` with `u in S_2` and `phi` the Frobenius generator of the Galois group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct G2Element {
    unit: O2Element,
    galois: bool,
}

impl G2Element {
    pub fn new(unit: O2Element, galois: bool) -> Result<Self> {
        if !unit.is_unit() {
            return Err(Error::NotAUnit(format!("{unit:?}")));
        }
        Ok(G2Element { unit, galois })
    }

    pub fn from_unit(unit: O2Element) -> Result<Self> {
        Self::new(unit, false)
    }

    pub fn identity(p: Precision) -> Self {
        G2Element { unit: O2Element::one(p), galois: false }
    }

    pub fn phi(p: Precision) -> Self {
        G2Element { unit: O2Element::one(p), galois: true }
    }

    pub fn unit(&self) -> O2Element {
        self.unit
    }

    pub fn has_galois(&self) -> bool {
        self.galois
    }

    pub fn precision(&self) -> Precision {
        self.unit.precision()
    }

    pub fn checked_mul(&self, o: &G2Element) -> Result<G2Element> {
        let v = if self.galois { o.unit.frobenius() } else { o.unit };
        Ok(G2Element { unit: self.unit.checked_mul(&v)?, galois: self.galois ^ o.galois })
    }

    pub fn inverse(&self) -> G2Element {
        let inv = self.unit.inverse().expect("group elements are units");
        let unit = if self.galois { inv.frobenius() } else { inv };
        G2Element { unit, galois: self.galois }
    }

    pub fn pow(&self, e: u64) -> G2Element {
        let mut acc = G2Element::identity(self.precision());
        for _ in 0..e {
            acc = acc.checked_mul(self).unwrap();
        }
        acc
    }

    pub fn conjugate_by(&self, g: &G2Element) -> G2Element {
        g.checked_mul(self).unwrap().checked_mul(&g.inverse()).unwrap()
    }

    /// Order of the element if it is at most `max`.
    pub fn order(&self, max: u32) -> Option<u32> {
        let id = G2Element::identity(self.precision());
        let mut acc = *self;
        for k in 1..=max {
            if acc == id {
                return Some(k);
            }
            acc = acc.checked_mul(self).unwrap();
        }
        None
    }

    pub fn reduce(&self, p: Precision) -> Result<G2Element> {
        Ok(G2Element { unit: self.unit.reduce(p)?, galois: self.galois })
    }
}

/// Named elements used to build and test the finite subgroups.
#[derive(Clone, Copy, Debug)]
pub struct Landmarks {
    pub omega: G2Element,
    pub omega2: G2Element,
    pub omega_phi: G2Element,
    pub phi: G2Element,
    pub a: G2Element,
}

impl Landmarks {
    pub fn new(p: Precision, root: OmegaRoot) -> Self {
        let w = O2Element::from_witt(teichmueller_omega_with(p, root));
        let omega = G2Element::from_unit(w).unwrap();
        Landmarks {
            omega,
            omega2: omega.pow(2),
            omega_phi: G2Element { unit: w, galois: true },
            phi: G2Element::phi(p),
            a: element_a(p, root),
        }
    }
}

/// `a = -(1 + omega S)/2`, an element of order 3.
pub fn element_a(p: Precision, root: OmegaRoot) -> G2Element {
    let w = teichmueller_omega_with(p, root);
    let half = Residue::new(2, p).inverse().unwrap().neg().signed();
    let unit = O2Element::new(WittElement::one(p).scale(half), w.scale(half)).unwrap();
    G2Element::from_unit(unit).unwrap()
}

/// The center `Z_3^x` embedded as scalars.
pub fn central_element(c: Residue) -> Result<G2Element> {
    G2Element::from_unit(O2Element::scalar(c))
}

/// Generators `{a, omega^2, omega phi}` of the subgroup of order 24.
pub fn g24_generators(p: Precision, root: OmegaRoot) -> Vec<G2Element> {
    let l = Landmarks::new(p, root);
    vec![l.a, l.omega2, l.omega_phi]
}

/// Generators `{omega, phi}` of the semidihedral subgroup of order 16.
pub fn sd16_generators(p: Precision, root: OmegaRoot) -> Vec<G2Element> {
    let l = Landmarks::new(p, root);
    vec![l.omega, l.phi]
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteSubgroup {
    pub label: String,
    pub generators: Vec<G2Element>,
    /// Elements in breadth-first discovery order from the identity.
    pub elements: Vec<G2Element>,
}

impl FiniteSubgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &G2Element) -> bool {
        self.elements.contains(g)
    }
}

/// Closure of `gens` under multiplication, failing once more than `bound`
/// elements have been found.
pub fn subgroup_closure(label: &str, gens: &[G2Element], bound: usize) -> Result<FiniteSubgroup> {
    let first = gens.first().ok_or_else(|| domain("no generators"))?;
    let p = first.precision();
    if let Some(g) = gens.iter().find(|g| g.precision() != p) {
        return Err(Error::PrecisionMismatch(p.get(), g.precision().get()));
    }
    let id = G2Element::identity(p);
    let mut seen: HashSet<G2Element> = HashSet::from([id]);
    let mut elements = vec![id];
    let mut queue = VecDeque::from([id]);
    while let Some(h) = queue.pop_front() {
        for g in gens {
            let x = h.checked_mul(g)?;
            if seen.insert(x) {
                if seen.len() > bound {
                    return Err(Error::ClosureBound(bound));
                }
                elements.push(x);
                queue.push_back(x);
            }
        }
    }
    Ok(FiniteSubgroup { label: label.to_string(), generators: gens.to_vec(), elements })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub label: String,
    pub order: usize,
    /// element order -> number of elements of that order
    pub order_histogram: BTreeMap<u32, usize>,
    pub center_size: usize,
    pub relations: Vec<RelationCheck>,
}

/// Order statistics of `h` plus the standard relations among the landmark
/// elements that lie in `h`.
pub fn subgroup_structure(h: &FiniteSubgroup, root: OmegaRoot) -> StructureReport {
    let n = h.order() as u32;
    let mut hist = BTreeMap::new();
    for g in &h.elements {
        *hist.entry(g.order(n).expect("finite subgroup")).or_insert(0) += 1;
    }
    let center_size = h
        .elements
        .iter()
        .filter(|z| h.elements.iter().all(|g| g.checked_mul(z).unwrap() == z.checked_mul(g).unwrap()))
        .count();
    let p = h.elements[0].precision();
    let l = Landmarks::new(p, root);
    let inside = |g: &G2Element| h.contains(g);
    let id = G2Element::identity(p);
    let mut relations = Vec::new();
    if inside(&l.omega2) && inside(&l.omega_phi) {
        let (i, j) = (l.omega2, l.omega_phi);
        let ij = i.checked_mul(&j).unwrap();
        let q8 = subgroup_closure("Q8", &[i, j], 8).ok();
        let involutions = q8
            .as_ref()
            .map(|q| q.elements.iter().filter(|g| g.order(8) == Some(2)).count())
            .unwrap_or(0);
        let m1 = i.pow(2);
        relations.push(RelationCheck {
            name: "Q8 on <omega^2, omega phi>: unique involution, i^2 = j^2 = (ij)^2".into(),
            holds: q8.map(|q| q.order() == 8).unwrap_or(false)
                && involutions == 1
                && m1 != id
                && j.pow(2) == m1
                && ij.pow(2) == m1,
        });
    }
    if inside(&l.a) && inside(&l.omega2) {
        let c = l.a.conjugate_by(&l.omega2);
        relations.push(RelationCheck {
            name: "omega^2 a omega^-2 = a^2".into(),
            holds: c == l.a.pow(2) && c != l.a,
        });
    }
    if inside(&l.a) && inside(&l.omega_phi) {
        relations.push(RelationCheck {
            name: "(omega phi) a (omega phi)^-1 = a".into(),
            holds: l.a.conjugate_by(&l.omega_phi) == l.a,
        });
    }
    if inside(&l.omega) && inside(&l.phi) {
        relations.push(RelationCheck {
            name: "phi omega phi^-1 = omega^3, omega^8 = phi^2 = 1".into(),
            holds: l.omega.conjugate_by(&l.phi) == l.omega.pow(3)
                && l.omega.order(8) == Some(8)
                && l.phi.pow(2) == id,
        });
    }
    StructureReport { label: h.label.clone(), order: h.order(), order_histogram: hist, center_size, relations }
}

/// The reduced determinant `G_2 -> Z_3`, the composite of the reduced norm
/// to `Z_3^x`, the projection `Z_3^x -> 1 + 3Z_3` and `log_4`.  `phi` maps to 0.
/// The result is a residue modulo `3^{N-1}`.
pub fn reduced_det(g: &G2Element) -> Result<Residue> {
    let n = g.unit.reduced_norm();
    let tau = if n.value() % 3 == 1 { 1 } else { -1 };
    let u = n.mul(Residue::new(tau, n.precision()))?;
    log_base4(UnitOnePlus3::new(u)?)
}

/// Membership in `G_2^1 = ker(reduced_det)`.
pub fn in_g2_1(g: &G2Element) -> Result<bool> {
    Ok(reduced_det(g)?.is_zero())
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub precision: u32,
    pub omega_root: OmegaRoot,
    pub g24: StructureReport,
    pub sd16: StructureReport,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Everything the `group` gate checks, at precision `p` and cross-checked at `p + 2`.
pub fn verify_group(p: Precision, root: OmegaRoot) -> Result<GroupReport> {
    let mut checks = Vec::new();
    checks.push(Check::new("precision at least 4", p.get() >= 4, format!("N = {}", p.get())));
    let g24 = subgroup_closure("G24", &g24_generators(p, root), 48)?;
    let sd16 = subgroup_closure("SD16", &sd16_generators(p, root), 32)?;
    let s24 = subgroup_structure(&g24, root);
    let s16 = subgroup_structure(&sd16, root);
    checks.push(Check::new("|G24| = 24", g24.order() == 24, g24.order().to_string()));
    checks.push(Check::new("|SD16| = 16", sd16.order() == 16, sd16.order().to_string()));
    for r in s24.relations.iter().chain(&s16.relations) {
        checks.push(Check::new(r.name.clone(), r.holds, ""));
    }
    let l = Landmarks::new(p, root);
    checks.push(Check::new(
        "a has order 3 and reduced norm 1",
        l.a.order(24) == Some(3) && l.a.unit().reduced_norm().value() == 1,
        "",
    ));
    let mut nonzero = 0;
    for g in g24.elements.iter().chain(&sd16.elements) {
        if !in_g2_1(g)? {
            nonzero += 1;
        }
    }
    checks.push(Check::new(
        "reduced_det vanishes on G24 and SD16",
        nonzero == 0,
        format!("{nonzero} of {} nonzero", g24.order() + sd16.order()),
    ));
    let four = central_element(Residue::new(4, p))?;
    let d4 = reduced_det(&four)?;
    checks.push(Check::new("reduced_det(4) = 2", d4.value() == 2, d4.to_string()));
    checks.push(Check::new("reduced_det(phi) = 0", reduced_det(&l.phi)?.is_zero(), ""));
    if let Ok(q) = Precision::new(p.get() + 2) {
        let g24q = subgroup_closure("G24", &g24_generators(q, root), 48)?;
        let sd16q = subgroup_closure("SD16", &sd16_generators(q, root), 32)?;
        let same = |big: &FiniteSubgroup, small: &FiniteSubgroup| {
            let mut a: Vec<_> = big.elements.iter().map(|g| g.reduce(p).unwrap()).collect();
            let mut b = small.elements.clone();
            a.sort();
            b.sort();
            a == b
        };
        checks.push(Check::new(
            "subgroups stable from N to N+2",
            same(&g24q, &g24) && same(&sd16q, &sd16),
            format!("N+2 = {}", q.get()),
        ));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(GroupReport { precision: p.get(), omega_root: root, g24: s24, sd16: s16, checks, pass })
}
