//! Cohomology presentations, the rational homotopy chart and the chromatic
//! splitting report, assembled from computed ingredients, plus JSON/TSV/SVG
//! emitters.

use crate::e1::integral::IntegralReport;
use crate::e2::{E2Report, SurvivorReport};
use crate::error::{domain, Error, Result};
use crate::padic::central_character_valuation;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Where a reported fact comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Produced by this crate's algorithms.
    Computed,
    /// Taken from the literature; the crate checks only its mod-3 shadow.
    Cited,
}

impl Provenance {
    fn as_str(self) -> &'static str {
        match self {
            Provenance::Computed => "computed",
            Provenance::Cited => "cited",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "computed" => Ok(Provenance::Computed),
            "cited" => Ok(Provenance::Cited),
            _ => Err(domain(format!("unknown provenance '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRecord {
    pub name: String,
    pub s: u32,
    pub t: i64,
    /// `"free"` or the order of a torsion generator.
    pub order: String,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyPresentation {
    pub group: String,
    pub generators: Vec<GeneratorRecord>,
    pub rules: Vec<String>,
    /// Ranks of the free part in cohomological degrees `s = 0, 1, ...`.
    pub free_ranks: Vec<usize>,
}

impl CohomologyPresentation {
    pub fn free_generators(&self) -> impl Iterator<Item = &GeneratorRecord> {
        self.generators.iter().filter(|g| g.order == "free")
    }
}

/// What `E_2^{p,0}` of the integral coefficients must be, given the mod-3
/// dimensions: the long exact sequence of `x3` gives
/// `0 -> A^p/3 -> H^p(mod 3) -> A^{p+1}[3] -> 0`, and a profinite `Z_3`-module
/// with `A/3 = 0` vanishes.  Returns the free rank of each `A^p`.
pub fn lift_mod3_ranks(dims: &[usize; 4]) -> Result<[usize; 4]> {
    // quotient[p] = dim A^p/3, torsion[p] = dim A^p[3]; None = unknown.
    let mut quotient: [Option<usize>; 5] = [None; 5];
    let mut torsion: [Option<usize>; 5] = [None; 5];
    torsion[0] = Some(0);
    quotient[4] = Some(0);
    torsion[4] = Some(0);
    loop {
        let before = (quotient, torsion);
        for p in 0..4 {
            let h = dims[p];
            match (quotient[p], torsion[p + 1]) {
                (Some(q), None) if q <= h => torsion[p + 1] = Some(h - q),
                (None, Some(t)) if t <= h => quotient[p] = Some(h - t),
                (Some(q), Some(t)) if q + t != h => {
                    return Err(Error::Invariant(format!("inconsistent ranks at p = {p}")));
                }
                _ => {}
            }
            if h == 0 {
                quotient[p] = Some(0);
                torsion[p + 1] = Some(0);
            }
        }
        for p in 0..4 {
            if quotient[p] == Some(0) {
                torsion[p] = Some(0);
            }
        }
        if (quotient, torsion) == before {
            break;
        }
    }
    let mut ranks = [0; 4];
    for p in 0..4 {
        match (quotient[p], torsion[p]) {
            (Some(q), Some(0)) => ranks[p] = q,
            _ => return Err(Error::Invariant(format!("the mod-3 dimensions {dims:?} do not determine A^{p}"))),
        }
    }
    Ok(ranks)
}

/// `H^*(G_2^1, (E_2)_0)`: the free part from the `E_2` ranks in degree 0 and the
/// lifting argument, the `beta^2 Delta^-1` family as cited structure.
pub fn assemble_g21_cohomology(e2_zero: &E2Report, integral: &IntegralReport) -> Result<CohomologyPresentation> {
    if e2_zero.t != 0 {
        return Err(domain("assembly needs the E2 report at t = 0"));
    }
    if !e2_zero.stabilized {
        return Err(domain("E2 at t = 0 did not stabilize; refusing to assemble"));
    }
    if e2_zero.dims != [1, 0, 0, 1] {
        return Err(domain(format!("E2 at t = 0 is {:?}, not (1, 0, 0, 1); refusing to assemble", e2_zero.dims)));
    }
    if !integral.pass || !integral.h1_degree0_vanishes {
        return Err(domain("integral presentation check failed; refusing to assemble"));
    }
    let ranks = lift_mod3_ranks(&e2_zero.dims)?;
    let mut generators = Vec::new();
    for (p, &r) in ranks.iter().enumerate() {
        if r == 0 {
            continue;
        }
        let name = if p == 0 { "1".to_string() } else { "e".to_string() };
        generators.push(GeneratorRecord { name, s: p as u32, t: 0, order: "free".into(), provenance: Provenance::Computed });
    }
    generators.push(GeneratorRecord {
        name: "β²Δ⁻¹".into(),
        s: 4,
        t: 0,
        order: "3".into(),
        provenance: Provenance::Cited,
    });
    Ok(CohomologyPresentation {
        group: "G21".into(),
        generators,
        rules: vec![
            "e^2 = 0 (exterior)".into(),
            "β²Δ⁻¹ polynomial, 3·β²Δ⁻¹ = 0 (truncated)".into(),
            "no further differentials".into(),
        ],
        free_ranks: ranks.to_vec(),
    })
}

/// Kunneth with the cohomology of the central `Z_3`, which acts trivially:
/// adjoin an exterior class `zeta` in `(s, t) = (1, 0)`.
pub fn assemble_g2_cohomology(g21: &CohomologyPresentation) -> Result<CohomologyPresentation> {
    if g21.group != "G21" {
        return Err(domain("expected a G21 presentation"));
    }
    let mut generators = g21.generators.clone();
    generators.insert(
        1,
        GeneratorRecord { name: "ζ".into(), s: 1, t: 0, order: "free".into(), provenance: Provenance::Computed },
    );
    let mut free_ranks = vec![0; g21.free_ranks.len() + 1];
    for (s, r) in g21.free_ranks.iter().enumerate() {
        free_ranks[s] += r;
        free_ranks[s + 1] += r;
    }
    let mut rules = vec!["ζ^2 = 0 (exterior)".to_string()];
    rules.extend(g21.rules.iter().cloned());
    Ok(CohomologyPresentation { group: "G2".into(), generators, rules, free_ranks })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartEntry {
    pub dimension: usize,
    pub generators: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartReport {
    /// `n -> dim pi_n ⊗ Q`, nonzero entries only.
    pub entries: BTreeMap<i64, ChartEntry>,
    /// Internal degrees checked to carry only bounded torsion.
    pub torsion_window: (i64, i64),
}

impl ChartReport {
    pub fn dimension(&self, n: i64) -> usize {
        self.entries.get(&n).map_or(0, |e| e.dimension)
    }
}

/// Rational homotopy: exterior monomials in the free generators of the `G_2`
/// presentation, placed in degree `n = t - s`.  In internal degrees `t != 0`
/// the central character bounds all cohomology by a power of 3, so only
/// `t = 0` contributes.
pub fn rational_homotopy_chart(g2: &CohomologyPresentation, torsion_window: (i64, i64)) -> Result<ChartReport> {
    for t in torsion_window.0..=torsion_window.1 {
        if t != 0 && t % 4 == 0 {
            central_character_valuation(t)?;
        }
    }
    let free: Vec<&GeneratorRecord> = g2.free_generators().filter(|g| g.s > 0).collect();
    if free.iter().any(|g| g.t != 0) {
        return Err(domain("free generators outside internal degree 0"));
    }
    let mut entries: BTreeMap<i64, ChartEntry> = BTreeMap::new();
    for mask in 0u32..(1 << free.len()) {
        let chosen: Vec<&&GeneratorRecord> = free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, g)| g).collect();
        let s: i64 = chosen.iter().map(|g| g.s as i64).sum();
        let t: i64 = chosen.iter().map(|g| g.t).sum();
        let label = if chosen.is_empty() { "1".to_string() } else { chosen.iter().map(|g| g.name.as_str()).collect::<String>() };
        let e = entries.entry(t - s).or_insert(ChartEntry { dimension: 0, generators: vec![], provenance: Provenance::Computed });
        e.dimension += 1;
        e.generators.push(label);
    }
    Ok(ChartReport { entries, torsion_window })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summand {
    /// `"L1"` or `"L0"`.
    pub level: String,
    pub sphere_degree: i64,
    pub completion: String,
    pub support: String,
}

impl Summand {
    pub fn label(&self) -> String {
        format!("{}S^{}_3", self.level, self.sphere_degree)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingReport {
    pub summands: Vec<Summand>,
}

/// Split the rational classes by whether they survive `K(1)`-localization.
/// Classes involving `e` are detected on `Deltabar_0`, which is `v1`-torsion;
/// the unit and `zeta` persist `K(1)`-locally.
pub fn splitting_report(chart: &ChartReport, survivor: &SurvivorReport) -> Result<SplittingReport> {
    if !survivor.pass {
        return Err(domain("survivor witness failed; refusing the splitting report"));
    }
    if chart.entries.is_empty() {
        return Err(domain("empty rational chart"));
    }
    let mut summands = Vec::new();
    for (&n, entry) in chart.entries.iter().rev() {
        for g in &entry.generators {
            let rational_only = g.contains('e');
            let (level, support) = if rational_only {
                ("L0", "rational chart; e is detected on Deltabar_0, which is v1-torsion in E2")
            } else {
                ("L1", "v1-localized survivors: the unit and the central class zeta persist K(1)-locally")
            };
            summands.push(Summand {
                level: level.into(),
                sphere_degree: n,
                completion: "3-complete".into(),
                support: support.into(),
            });
        }
    }
    summands.sort_by_key(|s| (s.level != "L1", -s.sphere_degree));
    Ok(SplittingReport { summands })
}

/// Output formats for reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Tsv,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "tsv" => Ok(Format::Tsv),
            "svg" => Ok(Format::Svg),
            _ => Err(domain(format!("unknown format '{s}' (json|tsv|svg)"))),
        }
    }
}

/// Sorted-key, pretty JSON with a trailing newline.
pub fn to_sorted_json<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Something that can be written as JSON, TSV and SVG.
pub trait Emit: Serialize {
    fn tsv(&self) -> String;
    /// `(position, label)` pairs for the one-row dot chart.
    fn dots(&self) -> Vec<(i64, String)>;
    fn axis_name(&self) -> &'static str;

    fn emit(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => to_sorted_json(self),
            Format::Tsv => Ok(self.tsv()),
            Format::Svg => Ok(svg_row(&self.dots(), self.axis_name())),
        }
    }
}

impl Emit for ChartReport {
    fn tsv(&self) -> String {
        let mut s = String::from("degree\tdimension\tgenerators\tprovenance\n");
        for (n, e) in &self.entries {
            s.push_str(&format!("{n}\t{}\t{}\t{}\n", e.dimension, e.generators.join(","), e.provenance.as_str()));
        }
        s
    }

    fn dots(&self) -> Vec<(i64, String)> {
        self.entries.iter().flat_map(|(n, e)| e.generators.iter().map(move |g| (*n, g.clone()))).collect()
    }

    fn axis_name(&self) -> &'static str {
        "n"
    }
}

impl Emit for SplittingReport {
    fn tsv(&self) -> String {
        let mut s = String::from("level\tsphere_degree\tcompletion\tsupport\n");
        for x in &self.summands {
            s.push_str(&format!("{}\t{}\t{}\t{}\n", x.level, x.sphere_degree, x.completion, x.support));
        }
        s
    }

    fn dots(&self) -> Vec<(i64, String)> {
        self.summands.iter().map(|x| (x.sphere_degree, x.label())).collect()
    }

    fn axis_name(&self) -> &'static str {
        "sphere degree"
    }
}

impl Emit for CohomologyPresentation {
    fn tsv(&self) -> String {
        let mut s = String::from("name\ts\tt\torder\tprovenance\n");
        for g in &self.generators {
            s.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", g.name, g.s, g.t, g.order, g.provenance.as_str()));
        }
        s
    }

    fn dots(&self) -> Vec<(i64, String)> {
        self.generators.iter().map(|g| (g.s as i64, g.name.clone())).collect()
    }

    fn axis_name(&self) -> &'static str {
        "s"
    }
}

/// Parse the TSV form of a [`ChartReport`]; the torsion window is not part of the TSV.
pub fn parse_chart_tsv(s: &str, torsion_window: (i64, i64)) -> Result<ChartReport> {
    let mut lines = s.lines();
    if lines.next() != Some("degree\tdimension\tgenerators\tprovenance") {
        return Err(domain("missing chart TSV header"));
    }
    let mut entries = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(domain(format!("line {}: expected 4 columns", i + 2)));
        }
        let n: i64 = cols[0].parse().map_err(|_| domain(format!("line {}: bad degree", i + 2)))?;
        let dimension: usize = cols[1].parse().map_err(|_| domain(format!("line {}: bad dimension", i + 2)))?;
        let generators = cols[2].split(',').filter(|g| !g.is_empty()).map(String::from).collect();
        entries.insert(n, ChartEntry { dimension, generators, provenance: Provenance::parse(cols[3])? });
    }
    Ok(ChartReport { entries, torsion_window })
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One-row dot chart: positions on a horizontal axis, one labeled dot per item,
/// items sharing a position stacked upward.
pub fn svg_row(dots: &[(i64, String)], axis: &str) -> String {
    let lo = dots.iter().map(|d| d.0).min().unwrap_or(0).min(0) - 1;
    let hi = dots.iter().map(|d| d.0).max().unwrap_or(0).max(0) + 1;
    let step = 60;
    let width = (hi - lo) * step + 180;
    let mut stack: BTreeMap<i64, i64> = BTreeMap::new();
    let max_stack = {
        let mut c: BTreeMap<i64, i64> = BTreeMap::new();
        for d in dots {
            *c.entry(d.0).or_default() += 1;
        }
        c.values().copied().max().unwrap_or(1)
    };
    let height = 80 + 30 * max_stack;
    let base = height - 40;
    let x = |n: i64| 40 + (n - lo) * step;
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"12pt\">\n"
    ));
    s.push_str(&format!("  <line x1=\"{}\" y1=\"{base}\" x2=\"{}\" y2=\"{base}\" stroke=\"black\"/>\n", x(lo), x(hi)));
    for n in lo..=hi {
        s.push_str(&format!("  <text class=\"tick\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{n}</text>\n", x(n), base + 24));
    }
    s.push_str(&format!("  <text class=\"axis\" x=\"{}\" y=\"{}\">{}</text>\n", x(hi) + 10, base + 4, xml_escape(axis)));
    for (n, label) in dots {
        let level = stack.entry(*n).or_default();
        let y = base - 20 - 30 * *level;
        *level += 1;
        s.push_str(&format!(
            "  <g class=\"dot\"><circle cx=\"{}\" cy=\"{y}\" r=\"5\" fill=\"black\"/><text x=\"{}\" y=\"{}\">{}</text></g>\n",
            x(*n),
            x(*n) + 8,
            y - 6,
            xml_escape(label)
        ));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_of_expected_ranks() {
        assert_eq!(lift_mod3_ranks(&[1, 0, 0, 1]).unwrap(), [1, 0, 0, 1]);
        assert!(lift_mod3_ranks(&[1, 1, 1, 1]).is_err());
    }
}
