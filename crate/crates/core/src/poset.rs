//! Finite posets, marked posets and marked order polytopes: lattice points,
//! vertices, volumes through linear extensions, Minkowski additivity and
//! log-concavity of the extension counts.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    compositions_with_bounds, format_rational, parse_rational, power_over_factorial,
    rational_to_i64, Integer, Rational,
};
use crate::error::{arg, invalid, Result};

/// Id of the added bottom element.
pub const BOTTOM: &str = "0^";
/// Id of the added top element.
pub const TOP: &str = "1^";

/// Markings keyed by element id.
pub type Marking = BTreeMap<String, Rational>;

/// A finite poset given by its cover relations. `covers` holds index pairs
/// `(p, q)` with `p` covered by `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    ids: Vec<String>,
    covers: Vec<(usize, usize)>,
    /// `less[p][q]` iff `p < q`
    less: Vec<Vec<bool>>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
}

impl Poset {
    pub fn new(ids: Vec<String>, covers: Vec<(String, String)>) -> Result<Self> {
        let index: HashMap<&str, usize> =
            ids.iter().enumerate().map(|(k, s)| (s.as_str(), k)).collect();
        if index.len() != ids.len() {
            return arg("element ids are not unique");
        }
        let mut idx = Vec::with_capacity(covers.len());
        for (p, q) in &covers {
            let (Some(&a), Some(&b)) = (index.get(p.as_str()), index.get(q.as_str())) else {
                return arg(format!("cover ({p},{q}) names an unknown element"));
            };
            idx.push((a, b));
        }
        Poset::from_indices(ids, idx)
    }

    pub fn from_indices(ids: Vec<String>, covers: Vec<(usize, usize)>) -> Result<Self> {
        let n = ids.len();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for &(p, q) in &covers {
            if p >= n || q >= n {
                return arg("cover index out of range");
            }
            if p == q {
                return invalid(format!("cover ({}, {}) is a loop", ids[p], ids[q]));
            }
            if up[p].contains(&q) {
                return invalid(format!("cover ({}, {}) is repeated", ids[p], ids[q]));
            }
            up[p].push(q);
            down[q].push(p);
        }
        // Kahn order to detect cycles
        let order = kahn(n, &up, &down);
        if order.len() != n {
            return invalid("cover relation has a cycle");
        }
        let mut less = vec![vec![false; n]; n];
        for &p in order.iter().rev() {
            for &q in &up[p] {
                less[p][q] = true;
                let row = less[q].clone();
                for (r, &lt) in row.iter().enumerate() {
                    if lt {
                        less[p][r] = true;
                    }
                }
            }
        }
        for &(p, q) in &covers {
            if (0..n).any(|r| less[p][r] && less[r][q]) {
                return invalid(format!(
                    "cover ({}, {}) is implied by transitivity",
                    ids[p], ids[q]
                ));
            }
        }
        Ok(Poset { ids, covers, less, up, down })
    }

    pub fn chain(n: usize) -> Self {
        let ids = (1..=n).map(|k| format!("c{k}")).collect();
        let covers = (1..n).map(|k| (k - 1, k)).collect();
        Poset::from_indices(ids, covers).unwrap()
    }

    pub fn antichain(n: usize) -> Self {
        Poset::from_indices((1..=n).map(|k| format!("a{k}")).collect(), Vec::new()).unwrap()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, p: usize) -> &str {
        &self.ids[p]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn upper_covers(&self, p: usize) -> &[usize] {
        &self.up[p]
    }

    pub fn lower_covers(&self, p: usize) -> &[usize] {
        &self.down[p]
    }

    pub fn lt(&self, p: usize, q: usize) -> bool {
        self.less[p][q]
    }

    pub fn leq(&self, p: usize, q: usize) -> bool {
        p == q || self.less[p][q]
    }

    pub fn comparable(&self, p: usize, q: usize) -> bool {
        self.leq(p, q) || self.leq(q, p)
    }

    pub fn is_cover(&self, p: usize, q: usize) -> bool {
        self.up[p].contains(&q)
    }

    /// Bottom-up order; ties go to the smallest index.
    pub fn topological_order(&self) -> Vec<usize> {
        kahn(self.len(), &self.up, &self.down)
    }

    pub fn minimal(&self) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.down[p].is_empty()).collect()
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.up[p].is_empty()).collect()
    }

    /// `P̂`: adds a bottom element `0^` and a top element `1^`.
    pub fn with_hats(&self) -> Result<Poset> {
        let n = self.len();
        let mut ids = self.ids.clone();
        ids.push(BOTTOM.to_string());
        ids.push(TOP.to_string());
        let mut covers = self.covers.clone();
        if n == 0 {
            covers.push((n, n + 1));
        }
        covers.extend(self.minimal().into_iter().map(|p| (n, p)));
        covers.extend(self.maximal().into_iter().map(|p| (p, n + 1)));
        Poset::from_indices(ids, covers)
    }

    fn above_masks(&self) -> Vec<u64> {
        (0..self.len())
            .map(|p| (0..self.len()).filter(|&q| self.less[p][q]).fold(0u64, |m, q| m | (1 << q)))
            .collect()
    }

    /// Number of linear extensions `e(P)`.
    pub fn linear_extension_count(&self) -> Integer {
        assert!(self.len() <= 64, "poset too large for bitmask enumeration");
        let above = self.above_masks();
        let full = if self.len() == 64 { u64::MAX } else { (1u64 << self.len()) - 1 };
        let mut memo = HashMap::new();
        fn rec(mask: u64, full: u64, above: &[u64], memo: &mut HashMap<u64, Integer>) -> Integer {
            if mask == full {
                return BigInt::one();
            }
            if let Some(v) = memo.get(&mask) {
                return v.clone();
            }
            let mut total = BigInt::zero();
            for (p, &ab) in above.iter().enumerate() {
                if mask & (1 << p) == 0 && ab & !mask == 0 {
                    total += rec(mask | (1 << p), full, above, memo);
                }
            }
            memo.insert(mask, total.clone());
            total
        }
        rec(0, full, &above, &mut memo)
    }

    /// Number of order-preserving maps `P -> {0, …, m}` by brute force over
    /// all maps.
    pub fn order_polynomial_brute(&self, m: i64) -> Integer {
        let n = self.len();
        let mut vals = vec![0i64; n];
        let mut count = BigInt::zero();
        loop {
            if self.covers.iter().all(|&(p, q)| vals[p] <= vals[q]) {
                count += 1;
            }
            let mut k = 0;
            loop {
                if k == n {
                    return count;
                }
                vals[k] += 1;
                if vals[k] <= m {
                    break;
                }
                vals[k] = 0;
                k += 1;
            }
        }
    }
}

fn kahn(n: usize, up: &[Vec<usize>], down: &[Vec<usize>]) -> Vec<usize> {
    let mut indeg: Vec<usize> = down.iter().map(|d| d.len()).collect();
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&p| indeg[p] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(p) = ready.pop_first() {
        order.push(p);
        for &q in &up[p] {
            indeg[q] -= 1;
            if indeg[q] == 0 {
                ready.insert(q);
            }
        }
    }
    order
}

/// A poset with a marked subset and rational markings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PosetJson", into = "PosetJson")]
pub struct MarkedPoset {
    poset: Poset,
    marks: Vec<Option<Rational>>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct PosetJson {
    covers: Vec<[String; 2]>,
    elements: Vec<String>,
    #[serde(default)]
    marked: BTreeMap<String, String>,
}

impl TryFrom<PosetJson> for MarkedPoset {
    type Error = crate::Error;
    fn try_from(j: PosetJson) -> Result<Self> {
        let poset = Poset::new(
            j.elements,
            j.covers.into_iter().map(|[a, b]| (a, b)).collect(),
        )?;
        let mut marking = Marking::new();
        for (id, v) in j.marked {
            marking.insert(id, parse_rational(&v)?);
        }
        MarkedPoset::new(poset, &marking)
    }
}

impl From<MarkedPoset> for PosetJson {
    fn from(m: MarkedPoset) -> Self {
        let p = &m.poset;
        PosetJson {
            covers: p
                .covers
                .iter()
                .map(|&(a, b)| [p.ids[a].clone(), p.ids[b].clone()])
                .collect(),
            elements: p.ids.clone(),
            marked: m
                .marking()
                .into_iter()
                .map(|(k, v)| (k, format_rational(&v)))
                .collect(),
        }
    }
}

impl MarkedPoset {
    /// Attaches markings; ids must exist. Invariants are checked by
    /// [`MarkedPoset::validate`].
    pub fn new(poset: Poset, marking: &Marking) -> Result<Self> {
        let mut marks = vec![None; poset.len()];
        for (id, v) in marking {
            let Some(p) = poset.index_of(id) else {
                return arg(format!("marking names unknown element {id}"));
            };
            marks[p] = Some(v.clone());
        }
        Ok(MarkedPoset { poset, marks })
    }

    pub fn from_indices(poset: Poset, marks: Vec<Option<Rational>>) -> Result<Self> {
        if marks.len() != poset.len() {
            return arg("marking vector length does not match poset");
        }
        Ok(MarkedPoset { poset, marks })
    }

    /// `P̂` with `0^` marked 0 and `1^` marked `top`.
    pub fn order_polytope(p: &Poset, top: i64) -> Result<Self> {
        let hat = p.with_hats()?;
        let n = p.len();
        let mut marks = vec![None; n + 2];
        marks[n] = Some(Rational::zero());
        marks[n + 1] = Some(Rational::from_integer(BigInt::from(top)));
        MarkedPoset::from_indices(hat, marks)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn mark(&self, p: usize) -> Option<&Rational> {
        self.marks[p].as_ref()
    }

    pub fn marks(&self) -> &[Option<Rational>] {
        &self.marks
    }

    pub fn is_marked(&self, p: usize) -> bool {
        self.marks[p].is_some()
    }

    pub fn marking(&self) -> Marking {
        self.marks
            .iter()
            .enumerate()
            .filter_map(|(p, m)| m.as_ref().map(|v| (self.poset.ids[p].clone(), v.clone())))
            .collect()
    }

    pub fn marked_count(&self) -> usize {
        self.marks.iter().filter(|m| m.is_some()).count()
    }

    /// Same poset and marked set with new marking values.
    pub fn with_marking(&self, marking: &Marking) -> Result<Self> {
        let m = MarkedPoset::new(self.poset.clone(), marking)?;
        if (0..self.len()).any(|p| m.is_marked(p) != self.is_marked(p)) {
            return arg("new marking has a different marked set");
        }
        Ok(m)
    }

    /// Marks multiplied by `t`.
    pub fn dilate(&self, t: i64) -> Self {
        let t = Rational::from_integer(BigInt::from(t));
        MarkedPoset {
            poset: self.poset.clone(),
            marks: self.marks.iter().map(|m| m.as_ref().map(|v| v * &t)).collect(),
        }
    }

    /// Checks that every extremal element is marked and the marking is
    /// order-preserving; reports the first violation.
    pub fn validate(&self) -> Result<()> {
        let p = &self.poset;
        for q in p.minimal().into_iter().chain(p.maximal()) {
            if !self.is_marked(q) {
                return invalid(format!("extremal element {} is not marked", p.ids[q]));
            }
        }
        for a in 0..self.len() {
            for b in 0..self.len() {
                if let (Some(x), Some(y)) = (&self.marks[a], &self.marks[b]) {
                    if p.lt(a, b) && x > y {
                        return invalid(format!(
                            "marking is not order-preserving: {} < {} but {} > {}",
                            p.ids[a],
                            p.ids[b],
                            format_rational(x),
                            format_rational(y)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Marked elements `p_1, …, p_k` sorted by marking descending; equal
    /// markings put greater elements first.
    pub fn sorted_marked(&self) -> Vec<usize> {
        let topo = self.poset.topological_order();
        let mut rank = vec![0usize; self.len()];
        for (r, &p) in topo.iter().enumerate() {
            rank[p] = r;
        }
        let mut m: Vec<usize> = (0..self.len()).filter(|&p| self.is_marked(p)).collect();
        m.sort_by(|&a, &b| {
            self.marks[b]
                .cmp(&self.marks[a])
                .then(rank[b].cmp(&rank[a]))
        });
        m
    }

    /// Unit markings `ω_i` (1 on `p_1..p_i`, 0 elsewhere) for `i = 1..k`.
    pub fn unit_markings(&self) -> Vec<Marking> {
        let sorted = self.sorted_marked();
        (1..=sorted.len())
            .map(|i| {
                sorted
                    .iter()
                    .enumerate()
                    .map(|(j, &p)| {
                        let v = if j < i { Rational::one() } else { Rational::zero() };
                        (self.poset.ids[p].clone(), v)
                    })
                    .collect()
            })
            .collect()
    }

    fn integer_marks(&self) -> Result<Vec<Option<i64>>> {
        self.marks
            .iter()
            .map(|m| match m {
                None => Ok(None),
                Some(v) => rational_to_i64(v)
                    .map(Some)
                    .ok_or_else(|| crate::Error::Precondition("markings must be integers".into())),
            })
            .collect()
    }

    /// For each element, the largest mark below or at it and the smallest
    /// mark above or at it.
    fn mark_bounds<T: Clone + Ord>(&self, marks: &[Option<T>]) -> Vec<(Option<T>, Option<T>)> {
        let p = &self.poset;
        (0..self.len())
            .map(|x| {
                let lo = (0..self.len())
                    .filter(|&a| p.leq(a, x))
                    .filter_map(|a| marks[a].clone())
                    .max();
                let hi = (0..self.len())
                    .filter(|&a| p.leq(x, a))
                    .filter_map(|a| marks[a].clone())
                    .min();
                (lo, hi)
            })
            .collect()
    }

    /// Integer points of `O(P,A)_λ`, values listed per element.
    pub fn lattice_points(&self) -> Result<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        self.walk_lattice(&mut |x| out.push(x.to_vec()))?;
        Ok(out)
    }

    pub fn count_lattice_points(&self) -> Result<Integer> {
        let mut n = BigInt::zero();
        self.walk_lattice(&mut |_| n += 1)?;
        Ok(n)
    }

    fn walk_lattice(&self, visit: &mut dyn FnMut(&[i64])) -> Result<()> {
        let marks = self.integer_marks()?;
        let bounds = self.mark_bounds(&marks);
        let order = self.poset.topological_order();
        let mut x = vec![0i64; self.len()];
        fn rec(
            k: usize,
            order: &[usize],
            mp: &MarkedPoset,
            marks: &[Option<i64>],
            bounds: &[(Option<i64>, Option<i64>)],
            x: &mut Vec<i64>,
            visit: &mut dyn FnMut(&[i64]),
        ) {
            if k == order.len() {
                visit(x);
                return;
            }
            let p = order[k];
            let below = mp.poset.down[p].iter().map(|&q| x[q]).max();
            let lo = match (below, bounds[p].0) {
                (Some(a), Some(b)) => a.max(b),
                (a, b) => a.or(b).unwrap_or(i64::MIN),
            };
            let hi = bounds[p].1.unwrap_or(i64::MAX);
            let (lo, hi) = match marks[p] {
                Some(v) => (v.max(lo), v.min(hi)),
                None => (lo, hi),
            };
            if lo == i64::MIN || hi == i64::MAX {
                // unbounded direction: only reachable for invalid posets
                return;
            }
            for v in lo..=hi {
                x[p] = v;
                rec(k + 1, order, mp, marks, bounds, x, visit);
            }
        }
        rec(0, &order, self, &marks, &bounds, &mut x, visit);
        Ok(())
    }

    /// Whether `x` lies in `O(P,A)_λ`.
    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.len()
            && self.poset.covers.iter().all(|&(p, q)| x[p] <= x[q])
            && self
                .marks
                .iter()
                .zip(x)
                .all(|(m, v)| m.as_ref().is_none_or(|m| m == v))
    }

    /// Vertex criterion: every block of the partition generated by
    /// comparable pairs with equal values contains a marked element.
    pub fn is_vertex(&self, x: &[Rational]) -> Result<bool> {
        if !self.contains(x) {
            return arg("point is not in the marked order polytope");
        }
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], a: usize) -> usize {
            let mut r = a;
            while p[r] != r {
                r = p[r];
            }
            r
        }
        // equal values on a cover chain propagate, so covers generate the blocks
        for &(p, q) in &self.poset.covers {
            if x[p] == x[q] {
                let (a, b) = (find(&mut parent, p), find(&mut parent, q));
                parent[a] = b;
            }
        }
        let mut has_mark = vec![false; n];
        for p in 0..n {
            if self.is_marked(p) {
                let r = find(&mut parent, p);
                has_mark[r] = true;
            }
        }
        Ok((0..n).all(|p| has_mark[find(&mut parent, p)]))
    }

    /// Vertices of `O(P,A)_λ`. Every vertex takes marking values only, so
    /// the candidates are assignments of marking values that satisfy the
    /// order relations.
    pub fn enumerate_vertices(&self) -> Result<Vec<Vec<Rational>>> {
        self.validate()?;
        let mut values: Vec<Rational> = self.marks.iter().flatten().cloned().collect();
        values.sort();
        values.dedup();
        let bounds = self.mark_bounds(&self.marks);
        let order = self.poset.topological_order();
        let mut x = vec![Rational::zero(); self.len()];
        let mut out = Vec::new();
        #[allow(clippy::too_many_arguments)]
        fn rec(
            k: usize,
            order: &[usize],
            mp: &MarkedPoset,
            values: &[Rational],
            bounds: &[(Option<Rational>, Option<Rational>)],
            x: &mut Vec<Rational>,
            out: &mut Vec<Vec<Rational>>,
        ) -> Result<()> {
            if k == order.len() {
                if mp.is_vertex(x)? {
                    out.push(x.clone());
                }
                return Ok(());
            }
            let p = order[k];
            if let Some(v) = &mp.marks[p] {
                x[p] = v.clone();
                return rec(k + 1, order, mp, values, bounds, x, out);
            }
            for v in values {
                let ok_below = mp.poset.down[p].iter().all(|&q| &x[q] <= v)
                    && bounds[p].0.as_ref().is_none_or(|b| b <= v);
                let ok_above = bounds[p].1.as_ref().is_none_or(|b| v <= b);
                if ok_below && ok_above {
                    x[p] = v.clone();
                    rec(k + 1, order, mp, values, bounds, x, out)?;
                }
            }
            Ok(())
        }
        rec(0, &order, self, &values, &bounds, &mut x, &mut out)?;
        out.sort();
        Ok(out)
    }

    /// `N(a)`: linear extensions (top first) placing `p_1, …, p_k` at
    /// positions `1, 2 + a_1, …, k + a_1 + … + a_{k-1}`.
    pub fn count_marked_extensions(&self, a: &[i64]) -> Result<Integer> {
        let sorted = self.sorted_marked();
        let n = self.len();
        if n > 64 {
            return arg("poset too large for bitmask enumeration");
        }
        if sorted.is_empty() || a.len() + 1 != sorted.len() {
            return arg(format!(
                "need {} gap entries for {} marked elements",
                sorted.len().saturating_sub(1),
                sorted.len()
            ));
        }
        if a.iter().any(|&v| v < 0) {
            return Ok(BigInt::zero());
        }
        // slot[pos] = marked element required at 0-based position pos
        let mut slot: Vec<Option<usize>> = vec![None; n];
        let mut pos = 0i64;
        for (m, &p) in sorted.iter().enumerate() {
            if m > 0 {
                pos += a[m - 1] + 1;
            }
            if pos >= n as i64 {
                return Ok(BigInt::zero());
            }
            slot[pos as usize] = Some(p);
        }
        if pos != n as i64 - 1 {
            return Ok(BigInt::zero());
        }
        let above = self.poset.above_masks();
        let mut memo: HashMap<u64, Integer> = HashMap::new();
        #[allow(clippy::too_many_arguments)]
        fn rec(
            mask: u64,
            placed: usize,
            n: usize,
            slot: &[Option<usize>],
            above: &[u64],
            mp: &MarkedPoset,
            memo: &mut HashMap<u64, Integer>,
        ) -> Integer {
            if placed == n {
                return BigInt::one();
            }
            if let Some(v) = memo.get(&mask) {
                return v.clone();
            }
            let avail = |p: usize| mask & (1 << p) == 0 && above[p] & !mask == 0;
            let total = match slot[placed] {
                Some(p) => {
                    if avail(p) {
                        rec(mask | (1 << p), placed + 1, n, slot, above, mp, memo)
                    } else {
                        BigInt::zero()
                    }
                }
                None => {
                    let mut t = BigInt::zero();
                    for p in 0..n {
                        if !mp.is_marked(p) && avail(p) {
                            t += rec(mask | (1 << p), placed + 1, n, slot, above, mp, memo);
                        }
                    }
                    t
                }
            };
            memo.insert(mask, total.clone());
            total
        }
        Ok(rec(0, 0, n, &slot, &above, self, &mut memo))
    }

    /// All `a` with `N(a) > 0`, keyed by `a`.
    pub fn extension_counts(&self) -> Result<BTreeMap<Vec<i64>, Integer>> {
        let k = self.marked_count();
        if k == 0 {
            return arg("no marked elements");
        }
        let total = (self.len() - k) as i64;
        let mut out = BTreeMap::new();
        let floor = vec![0i64; k - 1];
        let upper = vec![i64::MAX; k - 1];
        for a in compositions_with_bounds(total, &floor, &upper) {
            let c = self.count_marked_extensions(a.parts())?;
            if !c.is_zero() {
                out.insert(a.parts().to_vec(), c);
            }
        }
        Ok(out)
    }

    /// Volume of the projection to unmarked coordinates, as the sum over
    /// gap vectors `a` of `N(a) Π (λ_m - λ_{m+1})^{a_m} / a_m!`.
    pub fn marked_volume(&self) -> Result<Rational> {
        self.validate()?;
        let sorted = self.sorted_marked();
        let lam: Vec<Rational> = sorted.iter().map(|&p| self.marks[p].clone().unwrap()).collect();
        let mut vol = Rational::zero();
        for (a, n) in self.extension_counts()? {
            let mut term = Rational::from_integer(n);
            for (m, &e) in a.iter().enumerate() {
                term *= power_over_factorial(&(&lam[m] - &lam[m + 1]), e as u32);
            }
            vol += term;
        }
        Ok(vol)
    }

    /// Log-concavity in exchange form: for every feasible `a` and every
    /// pair `i < j` with `a_i, a_j >= 1`,
    /// `N(a)^2 >= N(a + e_i - e_j) N(a - e_i + e_j)`. Returns the violating
    /// `(a, i, j)`.
    pub fn check_log_concavity(&self) -> Result<Vec<(Vec<i64>, usize, usize)>> {
        self.validate()?;
        let k = self.marked_count();
        let total = (self.len() - k) as i64;
        let floor = vec![0i64; k.saturating_sub(1)];
        let upper = vec![i64::MAX; k.saturating_sub(1)];
        let counts = self.extension_counts()?;
        let get = |a: &[i64]| counts.get(a).cloned().unwrap_or_else(BigInt::zero);
        let mut bad = Vec::new();
        for a in compositions_with_bounds(total, &floor, &upper) {
            let a = a.parts();
            let center = get(a);
            let sq = &center * &center;
            for i in 0..a.len() {
                for j in i + 1..a.len() {
                    if a[i] < 1 || a[j] < 1 {
                        continue;
                    }
                    let mut left = a.to_vec();
                    left[i] += 1;
                    left[j] -= 1;
                    let mut right = a.to_vec();
                    right[i] -= 1;
                    right[j] += 1;
                    if sq < get(&left) * get(&right) {
                        bad.push((a.to_vec(), i, j));
                    }
                }
            }
        }
        Ok(bad)
    }
}

/// Support-function test of `O_{λ+μ} = O_λ + O_μ`: for `trials` seeded random
/// rational objectives `c`, the maximum of `c·x` over the vertices must be
/// additive.
pub fn check_minkowski(
    base: &MarkedPoset,
    lambda: &Marking,
    mu: &Marking,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    let l = base.with_marking(lambda)?;
    let m = base.with_marking(mu)?;
    let sum: Marking = lambda
        .iter()
        .map(|(k, v)| (k.clone(), v + mu.get(k).cloned().unwrap_or_else(Rational::zero)))
        .collect();
    let s = base.with_marking(&sum)?;
    let (vl, vm, vs) = (l.enumerate_vertices()?, m.enumerate_vertices()?, s.enumerate_vertices()?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let c: Vec<Rational> = (0..base.len())
            .map(|_| Rational::new(BigInt::from(rng.gen_range(-50i64..=50)), BigInt::from(rng.gen_range(1i64..=12))))
            .collect();
        let h = |vs: &[Vec<Rational>]| -> Option<Rational> {
            vs.iter()
                .map(|x| x.iter().zip(&c).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
                .max()
        };
        match (h(&vl), h(&vm), h(&vs)) {
            (Some(a), Some(b), Some(t)) if &a + &b == t => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Compares lattice-point counts of the `m`-th dilate of `O(P)` with the
/// number of order-preserving maps into `{0, …, m}`.
pub fn order_polynomial_check(p: &Poset, m: i64) -> Result<bool> {
    let via_points = MarkedPoset::order_polytope(p, m)?.count_lattice_points()?;
    Ok(via_points == p.order_polynomial_brute(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{int, rat, rat_int};

    fn marked(p: Poset, marks: &[(&str, i64)]) -> MarkedPoset {
        let m: Marking = marks.iter().map(|(k, v)| (k.to_string(), rat_int(*v))).collect();
        MarkedPoset::new(p, &m).unwrap()
    }

    fn chain3(lo: i64, hi: i64) -> MarkedPoset {
        marked(Poset::chain(3), &[("c1", lo), ("c3", hi)])
    }

    fn diamond() -> Poset {
        let ids = ["b", "x", "y", "t"].iter().map(|s| s.to_string()).collect();
        Poset::from_indices(ids, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(chain3(0, 2).is_valid());
        let err = chain3(3, 1).validate().unwrap_err().to_string();
        assert!(err.contains("order-preserving"), "{err}");
        let anti = marked(Poset::antichain(2), &[("a1", 0)]);
        assert!(anti.validate().unwrap_err().to_string().contains("a2"));
    }

    #[test]
    fn poset_rejects_bad_covers() {
        let ids: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        assert!(Poset::from_indices(ids.clone(), vec![(0, 1), (1, 2), (0, 2)]).is_err());
        assert!(Poset::from_indices(ids, vec![(0, 1), (1, 2), (2, 0)]).is_err());
    }

    #[test]
    fn lattice_point_examples() {
        assert_eq!(chain3(0, 2).lattice_points().unwrap().len(), 3);
        assert_eq!(chain3(2, 2).lattice_points().unwrap(), vec![vec![2, 2, 2]]);
    }

    #[test]
    fn extension_examples() {
        assert_eq!(chain3(0, 2).count_marked_extensions(&[1]).unwrap(), int(1));
        let d = marked(diamond(), &[("b", 0), ("t", 1)]);
        assert_eq!(d.count_marked_extensions(&[2]).unwrap(), int(2));
        assert_eq!(d.count_marked_extensions(&[1]).unwrap(), int(0));
        assert_eq!(chain3(0, 2).count_marked_extensions(&[3]).unwrap(), int(0));
    }

    #[test]
    fn volume_examples() {
        let d = marked(diamond(), &[("b", 0), ("t", 1)]);
        // O(antichain of 2) is the unit square
        assert_eq!(d.marked_volume().unwrap(), rat(1, 1));
        assert_eq!(chain3(0, 2).marked_volume().unwrap(), rat(2, 1));
        assert_eq!(chain3(1, 1).marked_volume().unwrap(), rat(0, 1));
        for p in [Poset::chain(3), Poset::antichain(3), diamond()] {
            let e = p.linear_extension_count();
            let n = p.len() as u64;
            let v = MarkedPoset::order_polytope(&p, 1).unwrap().marked_volume().unwrap();
            assert_eq!(v, Rational::new(e, crate::combinatorics::factorial(n)));
        }
    }

    #[test]
    fn vertex_examples() {
        let c = chain3(0, 2);
        assert!(c.is_vertex(&[rat_int(0), rat_int(0), rat_int(2)]).unwrap());
        assert!(!c.is_vertex(&[rat_int(0), rat_int(1), rat_int(2)]).unwrap());
        assert!(c.is_vertex(&[rat_int(0), rat_int(3), rat_int(2)]).is_err());
        assert_eq!(c.enumerate_vertices().unwrap().len(), 2);
        let a = MarkedPoset::order_polytope(&Poset::antichain(2), 1).unwrap();
        assert_eq!(a.enumerate_vertices().unwrap().len(), 4);
        let full = marked(Poset::chain(2), &[("c1", 1), ("c2", 3)]);
        assert_eq!(full.enumerate_vertices().unwrap().len(), 1);
    }

    #[test]
    fn order_ideal_vertices() {
        // vertices of O(P) are 0/1 vectors constant 1 on an up-set
        let p = diamond();
        let mp = MarkedPoset::order_polytope(&p, 1).unwrap();
        let verts = mp.enumerate_vertices().unwrap();
        let mut upsets = 0;
        for mask in 0u32..16 {
            let up = (0..4).all(|a| {
                mask & (1 << a) == 0 || (0..4).all(|b| !p.lt(a, b) || mask & (1 << b) != 0)
            });
            if up {
                upsets += 1;
                let mut x: Vec<Rational> = (0..4).map(|a| rat_int(((mask >> a) & 1) as i64)).collect();
                x.push(rat_int(0));
                x.push(rat_int(1));
                assert!(verts.contains(&x));
            }
        }
        assert_eq!(verts.len(), upsets);
    }

    #[test]
    fn order_polynomial_examples() {
        assert!(order_polynomial_check(&Poset::chain(1), 3).unwrap());
        assert_eq!(Poset::chain(2).order_polynomial_brute(2), int(6));
        assert!(order_polynomial_check(&Poset::chain(2), 2).unwrap());
        assert_eq!(Poset::antichain(2).order_polynomial_brute(1), int(4));
        assert!(order_polynomial_check(&Poset::antichain(2), 1).unwrap());
    }

    #[test]
    fn minkowski_examples() {
        let d = marked(diamond(), &[("b", 0), ("t", 3)]);
        let lam = d.marking();
        let zero: Marking = lam.keys().map(|k| (k.clone(), Rational::zero())).collect();
        assert!(check_minkowski(&d, &lam, &zero, 20, 1).unwrap());
        assert!(check_minkowski(&d, &lam, &lam, 20, 2).unwrap());
    }

    #[test]
    fn log_concavity_on_small_posets() {
        assert!(chain3(0, 4).check_log_concavity().unwrap().is_empty());
        let d = marked(diamond(), &[("b", 0), ("t", 1)]);
        assert!(d.check_log_concavity().unwrap().is_empty());
    }

    #[test]
    fn json_round_trip() {
        let c = chain3(0, 2);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(
            s,
            r#"{"covers":[["c1","c2"],["c2","c3"]],"elements":["c1","c2","c3"],"marked":{"c1":"0","c3":"2"}}"#
        );
        let back: MarkedPoset = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let half: MarkedPoset = serde_json::from_str(
            r#"{"covers":[],"elements":["a"],"marked":{"a":"3/6"}}"#,
        )
        .unwrap();
        assert_eq!(half.mark(0), Some(&rat(1, 2)));
    }
}
