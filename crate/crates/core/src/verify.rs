//! Verification harness: every identity is evaluated by independent methods
//! on fixtures and bounded families, producing a machine-readable report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    count_n, enumerate_shsyt, factorial, format_rational, Integer, Partition, Rational, ShiftedTableau,
};
use crate::corpus::{marking_pairs, reduction_fixture, Corpus};
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::gt::{
    build_g_lambda, enumerate_gt_points, flow_to_shsyt, g_lambda_shape, gt_points_lidskii, gt_volume_lidskii,
    gt_volume_product, gt_volume_shsyt, shsyt_netflow, shsyt_to_flow, weyl_dimension,
};
use crate::poset::{check_minkowski, order_polynomial_check, MarkedPoset};
use crate::subdivision::{canonical_reduction_tree, extension_identity, full_subdivision_check};
use crate::transform::{build_g_pal, gamma, gamma_inverse, gt_embedding, MarkedEmbedding};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Gt,
    Flow,
    Poset,
    Transform,
    Subdivision,
    All,
}

impl std::str::FromStr for Scope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gt" => Scope::Gt,
            "flow" => Scope::Flow,
            "poset" => Scope::Poset,
            "transform" => Scope::Transform,
            "subdivision" => Scope::Subdivision,
            "all" => Scope::All,
            _ => return Err(Error::Argument(format!("unknown scope {s}"))),
        })
    }
}

/// Size limits for the generated families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// largest number of parts for partitions and tableau sides
    pub n: usize,
    /// largest part
    pub lmax: i64,
    /// largest diagonal gap for tableaux
    pub bmax: i64,
    /// largest entry of compositions in the extension identity
    pub amax: i64,
    /// largest poset for the log-concavity checks
    pub poset_max: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { n: 4, lmax: 4, bmax: 3, amax: 3, poset_max: 7, trials: 100, seed: 2024 }
    }
}

impl Bounds {
    /// Parses `key=value` pairs separated by commas.
    pub fn parse(s: &str) -> Result<Self> {
        let mut b = Bounds::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Argument(format!("bound {part} is not key=value")))?;
            let bad = |_| Error::Argument(format!("bound {k} needs an integer"));
            match k {
                "n" => b.n = v.parse().map_err(bad)?,
                "lmax" => b.lmax = v.parse().map_err(bad)?,
                "bmax" => b.bmax = v.parse().map_err(bad)?,
                "amax" => b.amax = v.parse().map_err(bad)?,
                "poset_max" => b.poset_max = v.parse().map_err(bad)?,
                "trials" => b.trials = v.parse().map_err(bad)?,
                "seed" => b.seed = v.parse().map_err(bad)?,
                _ => return Err(Error::Argument(format!("unknown bound {k}"))),
            }
        }
        Ok(b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub criterion: u8,
    pub identity: String,
    pub instance: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn for_criterion(&self, k: u8) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.criterion == k).collect()
    }

    fn push(&mut self, criterion: u8, identity: &str, instance: impl Into<String>, expected: impl fmt::Display, actual: impl fmt::Display) {
        let (e, a) = (expected.to_string(), actual.to_string());
        self.checks.push(Check {
            criterion,
            identity: identity.to_string(),
            instance: instance.into(),
            pass: e == a,
            expected: e,
            actual: a,
        });
    }

    fn error(&mut self, criterion: u8, identity: &str, instance: impl Into<String>, err: &Error) {
        self.checks.push(Check {
            criterion,
            identity: identity.to_string(),
            instance: instance.into(),
            expected: "no error".into(),
            actual: err.to_string(),
            pass: false,
        });
    }

    fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }
}

fn show(p: &Partition) -> String {
    format!("λ={p}")
}

fn r(x: &Rational) -> String {
    format_rational(x)
}

/// Leading coefficient of the degree-`d` polynomial through
/// `values[t] = p(t)`, `t = 0..=d+1`, and whether the `(d+1)`-th
/// difference vanishes.
pub fn leading_coefficient(values: &[Integer], d: usize) -> (Rational, bool) {
    let mut diff = values.to_vec();
    let mut layers = Vec::new();
    for _ in 0..=d {
        layers.push(diff[0].clone());
        diff = diff.windows(2).map(|w| &w[1] - &w[0]).collect();
        if diff.is_empty() {
            break;
        }
    }
    let top = layers.get(d).cloned().unwrap_or_else(Integer::zero);
    let vanishes = diff.first().is_none_or(|x| x.is_zero());
    (Rational::new(top, factorial(d as u64)), vanishes)
}

fn partitions(b: &Bounds) -> Vec<Partition> {
    (2..=b.n).flat_map(|n| Partition::all_bounded(n, b.lmax)).collect()
}

/// Volume and point-count formulas for `GT(λ)` and the network `G_λ`.
pub fn verify_gt(b: &Bounds) -> Report {
    let mut rep = Report::default();
    for lam in partitions(b) {
        let inst = show(&lam);
        let prod = gt_volume_product(&lam);
        match gt_volume_shsyt(&lam) {
            Ok(v) => rep.push(1, "volume: product = tableau formula", &inst, r(&prod), r(&v)),
            Err(e) => rep.error(1, "volume: product = tableau formula", &inst, &e),
        }
        match gt_volume_lidskii(&lam) {
            Ok(v) => rep.push(1, "volume: product = Lidskii on G_λ", &inst, r(&prod), r(&v)),
            Err(e) => rep.error(1, "volume: product = Lidskii on G_λ", &inst, &e),
        }
        let direct = enumerate_gt_points(&lam).len();
        rep.push(1, "points: enumeration = Weyl dimension", &inst, direct, weyl_dimension(&lam));
        match gt_points_lidskii(&lam) {
            Ok(v) => rep.push(1, "points: enumeration = Lidskii binomial form", &inst, direct, v),
            Err(e) => rep.error(1, "points: enumeration = Lidskii binomial form", &inst, &e),
        }
        match build_g_lambda(&lam).and_then(|g| g.network.kostant(g.network.netflow())) {
            Ok(v) => rep.push(1, "points: enumeration = Kostant on G_λ", &inst, direct, v),
            Err(e) => rep.error(1, "points: enumeration = Kostant on G_λ", &inst, &e),
        }
    }
    rep
}

/// Shifted tableau counts against Kostant values, and the explicit maps in
/// both directions.
pub fn verify_tableaux(b: &Bounds) -> Report {
    let mut rep = Report::default();
    for n in 1..=b.n {
        let shape = match g_lambda_shape(n) {
            Ok(g) => g,
            Err(e) => {
                rep.error(3, "G_λ shape", format!("n={n}"), &e);
                continue;
            }
        };
        let mut by_gaps: BTreeMap<Vec<i64>, Vec<ShiftedTableau>> = BTreeMap::new();
        for t in enumerate_shsyt(n) {
            by_gaps.entry(t.diagonal_gaps()).or_default().push(t);
        }
        for c in compositions_with_bounds_all(n.saturating_sub(1), b.bmax) {
            let inst = format!("n={n} b={c:?}");
            let run = |rep: &mut Report| -> Result<()> {
                let want = count_n(n, &c)?;
                let net = shsyt_netflow(n, &c)?;
                let tabs = by_gaps.get(&c).map(Vec::as_slice).unwrap_or(&[]);
                let flows = shape.network.enumerate_integer_flows(&net)?;
                let mut ok = true;
                let mut images = BTreeSet::new();
                for t in tabs {
                    let (_, f) = shsyt_to_flow(t)?;
                    ok &= shape.network.is_flow(&f, &net) && &flow_to_shsyt(n, &f)? == t;
                    images.insert(f);
                }
                for f in &flows {
                    ok &= shsyt_to_flow(&flow_to_shsyt(n, f)?)?.1 == *f;
                }
                ok &= images.len() == tabs.len();
                rep.push(3, "tableau count = Kostant on G_λ", &inst, &want, shape.network.kostant(&net)?);
                rep.push(3, "tableau count = enumerated tableaux", &inst, &want, tabs.len());
                rep.push(3, "tableau count = enumerated flows", &inst, &want, flows.len());
                rep.push(3, "tableau and flow maps are inverse bijections", &inst, true, ok);
                Ok(())
            };
            if let Err(e) = run(&mut rep) {
                rep.error(3, "tableau count = Kostant", &inst, &e);
            }
        }
    }
    rep
}

fn compositions_with_bounds_all(parts: usize, max: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..parts {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (0..=max).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Lidskii point-count forms against direct enumeration, and the volume
/// against the Ehrhart leading coefficient.
pub fn verify_lidskii(networks: &[(String, FlowNetwork)]) -> Report {
    let mut rep = Report::default();
    for (name, g) in networks {
        let run = |rep: &mut Report| -> Result<()> {
            let direct = g.enumerate_integer_flows(g.netflow())?.len();
            rep.push(2, "binomial form = direct count", name.clone(), direct, g.lidskii_points_binomial()?);
            rep.push(2, "multiset form = direct count", name.clone(), direct, g.lidskii_points_multiset()?);
            let d = g.generic_dimension();
            let mut values = Vec::new();
            for t in 0..=d as i64 + 1 {
                values.push(g.kostant(g.dilate(t).netflow())?);
            }
            let (lead, vanishes) = leading_coefficient(&values, d);
            rep.push(2, "volume = Ehrhart leading coefficient", name.clone(), r(&lead), r(&g.lidskii_volume()?));
            rep.push(2, "dilation counts have degree at most the dimension", name.clone(), true, vanishes);
            Ok(())
        };
        if let Err(e) = run(&mut rep) {
            rep.error(2, "Lidskii formulas", name.clone(), &e);
        }
    }
    rep
}

/// Lattice points against integer flows through `Γ`, and volumes.
pub fn verify_transform(embeddings: &[(String, MarkedEmbedding)], b: &Bounds) -> Report {
    let mut rep = Report::default();
    for (name, me) in embeddings {
        let run = |rep: &mut Report| -> Result<()> {
            let dn = build_g_pal(me)?;
            let pts = me.lattice_points()?;
            let flows: BTreeSet<Vec<i64>> =
                dn.network.enumerate_integer_flows(dn.network.netflow())?.into_iter().collect();
            let mut image = BTreeSet::new();
            let mut inverse_ok = true;
            for x in &pts {
                let f = gamma(me, &dn, x)?;
                inverse_ok &= &gamma_inverse(me, &dn, &f)? == x;
                image.insert(f);
            }
            rep.push(4, "Γ is injective", name.clone(), pts.len(), image.len());
            rep.push(4, "Γ maps onto the integer flows", name.clone(), true, image == flows);
            rep.push(4, "Γ⁻¹ inverts Γ", name.clone(), true, inverse_ok);
            rep.push(4, "lattice points = Kostant", name.clone(), pts.len(), dn.network.kostant(dn.network.netflow())?);
            let vol = me.hat_poset().marked_volume()?;
            match dn.network.lidskii_volume() {
                Ok(v) => rep.push(4, "marked volume = Lidskii volume", name.clone(), r(&vol), r(&v)),
                Err(Error::Precondition(m)) => rep.notes.push(format!("{name}: Lidskii volume skipped ({m})")),
                Err(e) => return Err(e),
            }
            Ok(())
        };
        if let Err(e) = run(&mut rep) {
            rep.error(4, "Γ bijection", name.clone(), &e);
        }
    }
    for lam in partitions(b).into_iter().filter(|l| l.len() <= 3) {
        let inst = show(&lam);
        let run = || -> Result<(usize, Integer)> {
            let me = gt_embedding(&lam)?;
            let dn = build_g_pal(&me)?;
            Ok((me.lattice_points()?.len(), dn.network.kostant(dn.network.netflow())?))
        };
        match run() {
            Ok((pts, k)) => {
                let direct = enumerate_gt_points(&lam).len();
                rep.push(4, "GT poset points = patterns", &inst, direct, pts);
                rep.push(4, "GT poset network flows = patterns", &inst, direct, k);
            }
            Err(e) => rep.error(4, "GT poset network", &inst, &e),
        }
    }
    rep
}

fn ehrhart_check(rep: &mut Report, name: &str, mp: &MarkedPoset) -> Result<()> {
    let d = mp.len() - mp.marked_count();
    let mut values = Vec::new();
    for t in 0..=d as i64 + 1 {
        values.push(mp.dilate(t).count_lattice_points()?);
    }
    let (lead, vanishes) = leading_coefficient(&values, d);
    rep.push(5, "marked volume = Ehrhart leading coefficient", name, r(&lead), r(&mp.marked_volume()?));
    rep.push(5, "dilation counts have degree at most the dimension", name, true, vanishes);
    Ok(())
}

/// Volumes through linear extensions, order polynomials, log-concavity and
/// Minkowski additivity.
pub fn verify_posets(embeddings: &[(String, MarkedEmbedding)], b: &Bounds) -> Report {
    let mut rep = Report::default();
    for (name, me) in embeddings {
        let base = me.embedding().base();
        let run = |rep: &mut Report| -> Result<()> {
            if me.is_order_polytope() {
                let op = MarkedPoset::order_polytope(base.poset(), 1)?;
                ehrhart_check(rep, name, &op)?;
                let d = base.len() as u64;
                let norm = op.marked_volume()? * Rational::from_integer(factorial(d));
                rep.push(5, "normalized volume = linear extensions", name.clone(), base.poset().linear_extension_count(), r(&norm));
                for m in 0..=3 {
                    rep.push(5, "L(m) = Ω(P, m+1)", format!("{name} m={m}"), true, order_polynomial_check(base.poset(), m)?);
                }
            } else {
                ehrhart_check(rep, name, base)?;
            }
            if base.len() <= b.poset_max {
                let bad = me.hat_poset().check_log_concavity()?;
                rep.push(6, "extension counts are log-concave", name.clone(), 0, bad.len());
            }
            Ok(())
        };
        if let Err(e) = run(&mut rep) {
            rep.error(5, "marked volume", name.clone(), &e);
        }
    }
    for (k, (name, base, l, m)) in marking_pairs().into_iter().enumerate() {
        match check_minkowski(&base, &l, &m, b.trials, b.seed.wrapping_add(k as u64)) {
            Ok(ok) => rep.push(9, "support functions add", name, true, ok),
            Err(e) => rep.error(9, "support functions add", name, &e),
        }
    }
    rep
}

/// Leaf volumes of canonical reduction trees, the simultaneous
/// subdivisions, and the flow, leaf and linear-extension correspondence.
pub fn verify_subdivision(corpus: &Corpus, b: &Bounds) -> Report {
    let mut rep = Report::default();
    for (name, g) in &corpus.networks {
        let run = |rep: &mut Report| -> Result<()> {
            let tree = canonical_reduction_tree(g)?;
            rep.push(7, "leaf volumes sum to the Lidskii volume", name.clone(), r(&g.lidskii_volume()?), r(&tree.leaf_volume_sum()?));
            Ok(())
        };
        if let Err(e) = run(&mut rep) {
            rep.error(7, "reduction tree", name.clone(), &e);
        }
    }
    let fixture = reduction_fixture();
    let run = |rep: &mut Report| -> Result<()> {
        let tree = canonical_reduction_tree(&fixture)?;
        let d = fixture.generic_dimension() as u64;
        let norm = fixture.lidskii_volume()? * Rational::from_integer(factorial(d));
        rep.push(7, "unit-netflow leaves = normalized volume", "reduction-fixture", r(&norm), tree.leaves().len());
        rep.notes.push(format!("reduction-fixture level sizes {:?}", tree.level_sizes()));
        Ok(())
    };
    if let Err(e) = run(&mut rep) {
        rep.error(7, "reduction tree", "reduction-fixture", &e);
    }
    let mut instances = 0;
    for (name, me) in &corpus.embeddings {
        match full_subdivision_check(me, None) {
            Ok(s) => rep.push(0, "order and flow subdivisions pair cell by cell", name.clone(), &s.volume, &s.leaf_volume_sum),
            Err(Error::Precondition(m)) => rep.notes.push(format!("{name}: subdivision skipped ({m})")),
            Err(e) => rep.error(0, "order and flow subdivisions pair cell by cell", name.clone(), &e),
        }
        match extension_identity(me, b.amax) {
            Ok(rows) => {
                instances += 1;
                for (a, direct, kost, leaves) in rows {
                    let inst = format!("{name} a={a:?}");
                    rep.push(8, "linear extensions = Kostant", &inst, &direct, &kost);
                    rep.push(8, "linear extensions = bijection image", &inst, &direct, leaves);
                }
            }
            Err(Error::Precondition(m)) => rep.notes.push(format!("{name}: extension identity skipped ({m})")),
            Err(e) => rep.error(8, "extension bijection", name.clone(), &e),
        }
    }
    rep.push(8, "single-sink fixtures exercised", "corpus", true, instances > 0);
    rep
}

pub fn run_verify(scope: Scope, bounds: &Bounds, corpus: &Corpus) -> Report {
    let mut rep = Report::default();
    if corpus.is_empty() {
        rep.notes.push("warning: corpus is empty; only generated families were checked".into());
    }
    let all = scope == Scope::All;
    if all || scope == Scope::Gt {
        rep.merge(verify_gt(bounds));
        rep.merge(verify_tableaux(bounds));
    }
    if all || scope == Scope::Flow {
        rep.merge(verify_lidskii(&corpus.networks));
    }
    if all || scope == Scope::Poset {
        rep.merge(verify_posets(&corpus.embeddings, bounds));
    }
    if all || scope == Scope::Transform {
        rep.merge(verify_transform(&corpus.embeddings, bounds));
    }
    if all || scope == Scope::Subdivision {
        rep.merge(verify_subdivision(corpus, bounds));
    }
    rep.checks.sort_by(|a, b| (a.criterion, &a.identity, &a.instance).cmp(&(b.criterion, &b.identity, &b.instance)));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::int;
    use num_traits::One;

    #[test]
    fn leading_coefficient_of_squares() {
        let v: Vec<Integer> = (0..4).map(|t| int(t * t + 1)).collect();
        assert_eq!(leading_coefficient(&v, 2), (Rational::one(), true));
        let v: Vec<Integer> = (0..4).map(|t| int(t * t * t)).collect();
        assert!(!leading_coefficient(&v, 2).1);
    }

    #[test]
    fn bounds_parse() {
        let b = Bounds::parse("n=3, lmax=2").unwrap();
        assert_eq!((b.n, b.lmax, b.bmax), (3, 2, 3));
        assert!(Bounds::parse("q=1").is_err());
    }

    #[test]
    fn small_gt_scope_passes() {
        let b = Bounds { n: 3, lmax: 2, ..Bounds::default() };
        let rep = run_verify(Scope::Gt, &b, &Corpus::default());
        assert!(rep.passed(), "{:?}", rep.failures());
        assert!(rep.notes[0].starts_with("warning"));
    }
}
