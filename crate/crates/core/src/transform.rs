//! Bounded strongly planar embeddings and their dual flow networks: `G_P`
//! for order polytopes, `G_(P,A,λ)` for marked order polytopes, the lattice
//! maps between the two sides, and skew Gelfand-Tsetlin polytopes.
//!
//! An embedding is given by its bounded faces. Each face lists its left and
//! right boundary chains from top to bottom, as indices into `P̂`: the
//! elements of `P` keep their indices, `0^` is `n` and `1^` is `n + 1`. The
//! two extra `0^`-`1^` edges appear as the chain `[1^, 0^]`; the face left of
//! the poset (`t`) has it as its left chain, the face right of it (`s`) as
//! its right chain.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{format_rational, parse_rational, rational_to_i64, Partition, Rational};
use crate::error::{arg, invalid, Result};
use crate::flow::{FlowNetwork, IntegerFlow};
use crate::poset::{MarkedPoset, Marking, Poset, PosetJson, BOTTOM, TOP};

/// A bounded face: boundary chains listed top to bottom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Face {
    pub fn max(&self) -> usize {
        self.left[0]
    }

    pub fn min(&self) -> usize {
        *self.left.last().unwrap()
    }
}

/// Which boundary of a face carries the marking condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A strongly planar drawing of `P̂` with two outer `0^`-`1^` edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedEmbedding {
    base: MarkedPoset,
    hat: Poset,
    faces: Vec<Face>,
    t_face: usize,
    s_face: usize,
    /// per Hasse edge of `P̂` (`hat.covers()` order): (face east of it, face west of it)
    edge_faces: Vec<(usize, usize)>,
}

fn pseudo(n: usize) -> Vec<usize> {
    vec![n + 1, n]
}

impl BoundedEmbedding {
    /// Validates the face system: chains meet only at their ends, steps are
    /// Hasse edges, every Hasse edge bounds exactly one face on each side,
    /// one face on each side of the outer edges, and Euler's formula.
    pub fn new(base: MarkedPoset, faces: Vec<Face>) -> Result<Self> {
        let hat = base.poset().with_hats()?;
        let n = base.len();
        let outer = pseudo(n);
        let covers = hat.covers().to_vec();
        let cover_index: HashMap<(usize, usize), usize> =
            covers.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let mut east: Vec<Option<usize>> = vec![None; covers.len()];
        let mut west: Vec<Option<usize>> = vec![None; covers.len()];
        let mut t_face = None;
        let mut s_face = None;
        for (f, face) in faces.iter().enumerate() {
            let name = |v: usize| hat.id(v).to_string();
            let (l, r) = (&face.left, &face.right);
            if l.len() < 2 || r.len() < 2 {
                return invalid(format!("face {f}: boundary chains need at least two elements"));
            }
            if l[0] != r[0] || l.last() != r.last() {
                return invalid(format!("face {f}: left and right chains do not share max and min"));
            }
            if l == r {
                return invalid(format!("face {f}: left and right chains coincide"));
            }
            if l.iter().chain(r).any(|&v| v >= n + 2) {
                return invalid(format!("face {f}: element index out of range"));
            }
            let inner_l: BTreeSet<usize> = l[1..l.len() - 1].iter().copied().collect();
            if r[1..r.len() - 1].iter().any(|v| inner_l.contains(v)) {
                return invalid(format!("face {f}: chains share an interior element"));
            }
            for (side, chain) in [(Side::Left, l), (Side::Right, r)] {
                if *chain == outer {
                    let slot = if side == Side::Left { &mut t_face } else { &mut s_face };
                    if slot.is_some() {
                        return invalid("more than one face borders an outer edge on the same side");
                    }
                    *slot = Some(f);
                    continue;
                }
                for w in chain.windows(2) {
                    let Some(&k) = cover_index.get(&(w[1], w[0])) else {
                        return invalid(format!(
                            "face {f}: {} > {} is not a Hasse edge of the extended poset",
                            name(w[0]),
                            name(w[1])
                        ));
                    };
                    // on a left chain the face lies east of the edge
                    let slot = if side == Side::Left { &mut east[k] } else { &mut west[k] };
                    if slot.is_some() {
                        return invalid(format!(
                            "Hasse edge {} < {} bounds two faces on the same side",
                            name(w[1]),
                            name(w[0])
                        ));
                    }
                    *slot = Some(f);
                }
            }
        }
        let (Some(t_face), Some(s_face)) = (t_face, s_face) else {
            return invalid("outer edges must border one face on each side");
        };
        let mut edge_faces = Vec::with_capacity(covers.len());
        for (k, &(p, q)) in covers.iter().enumerate() {
            match (east[k], west[k]) {
                (Some(e), Some(w)) => edge_faces.push((e, w)),
                _ => {
                    return invalid(format!(
                        "Hasse edge {} < {} is missing a face on one side",
                        hat.id(p),
                        hat.id(q)
                    ))
                }
            }
        }
        let v = (n + 2) as i64;
        let e = covers.len() as i64 + 2;
        let f = faces.len() as i64 + 1;
        if v - e + f != 2 {
            return invalid(format!("Euler check failed: V - E + F = {} - {} + {} != 2", v, e, f));
        }
        Ok(BoundedEmbedding { base, hat, faces, t_face, s_face, edge_faces })
    }

    /// Faces given by element ids (`0^`, `1^` for the added elements).
    pub fn from_id_faces(base: MarkedPoset, faces: &[(Vec<String>, Vec<String>)]) -> Result<Self> {
        let n = base.len();
        let lookup = |id: &str| -> Result<usize> {
            match id {
                BOTTOM => Ok(n),
                TOP => Ok(n + 1),
                _ => base
                    .poset()
                    .index_of(id)
                    .ok_or_else(|| crate::Error::Argument(format!("unknown element {id} in face"))),
            }
        };
        let faces = faces
            .iter()
            .map(|(l, r)| {
                Ok(Face {
                    left: l.iter().map(|s| lookup(s)).collect::<Result<_>>()?,
                    right: r.iter().map(|s| lookup(s)).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BoundedEmbedding::new(base, faces)
    }

    /// Traces the faces of a straight-line drawing. `coords` gives integer
    /// positions for the elements of `P`; `0^` sits below everything and
    /// `1^` above, with the outer edges passing left and right.
    pub fn from_drawing(base: MarkedPoset, coords: &BTreeMap<String, (i64, i64)>) -> Result<Self> {
        let faces = trace_faces(&base, coords)?;
        BoundedEmbedding::new(base, faces)
    }

    pub fn base(&self) -> &MarkedPoset {
        &self.base
    }

    pub fn hat(&self) -> &Poset {
        &self.hat
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn t_face(&self) -> usize {
        self.t_face
    }

    pub fn s_face(&self) -> usize {
        self.s_face
    }

    pub fn bottom(&self) -> usize {
        self.base.len()
    }

    pub fn top(&self) -> usize {
        self.base.len() + 1
    }

    /// Hasse edges of `P̂` as (lower, upper), with the faces east and west
    /// of each.
    pub fn hasse_edges(&self) -> Vec<((usize, usize), usize, usize)> {
        self.hat
            .covers()
            .iter()
            .zip(&self.edge_faces)
            .map(|(&c, &(e, w))| (c, e, w))
            .collect()
    }

    pub fn is_outer_chain(&self, chain: &[usize]) -> bool {
        chain == pseudo(self.base.len()).as_slice()
    }

    pub fn name(&self, v: usize) -> &str {
        self.hat.id(v)
    }
}

fn trace_faces(base: &MarkedPoset, coords: &BTreeMap<String, (i64, i64)>) -> Result<Vec<Face>> {
    let hat = base.poset().with_hats()?;
    let n = base.len();
    let (bot, top) = (n, n + 1);
    let mut pos = vec![(0i64, 0i64); n];
    for p in 0..n {
        let Some(&c) = coords.get(base.poset().id(p)) else {
            return arg(format!("no coordinates for {}", base.poset().id(p)));
        };
        pos[p] = c;
    }
    for &(p, q) in base.poset().covers() {
        if pos[p].1 >= pos[q].1 {
            return invalid(format!(
                "drawing is not monotone: {} < {} but y does not increase",
                hat.id(p),
                hat.id(q)
            ));
        }
    }
    // edges: Hasse edges of P̂, then the left and right outer edges
    let mut edges: Vec<(usize, usize)> = hat.covers().to_vec();
    let left_outer = edges.len();
    edges.push((bot, top));
    edges.push((bot, top));
    let right_outer = left_outer + 1;
    // half-edge h = 2e + d leaves edges[e].0 when d = 0
    let tail = |h: usize| if h % 2 == 0 { edges[h / 2].0 } else { edges[h / 2].1 };
    let head = |h: usize| if h % 2 == 0 { edges[h / 2].1 } else { edges[h / 2].0 };
    let mut rot: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    for h in 0..2 * edges.len() {
        rot[tail(h)].push(h);
    }
    let dir = |v: usize, w: usize| -> (i64, i64) {
        if w == bot {
            (0, -1)
        } else if w == top {
            (0, 1)
        } else {
            (pos[w].0 - pos[v].0, pos[w].1 - pos[v].1)
        }
    };
    for v in 0..n {
        let mut hs = rot[v].clone();
        hs.sort_by(|&a, &b| ccw_cmp(dir(v, head(a)), dir(v, head(b))));
        for w in hs.windows(2) {
            if ccw_cmp(dir(v, head(w[0])), dir(v, head(w[1]))) == std::cmp::Ordering::Equal {
                return invalid(format!("two edges leave {} in the same direction", hat.id(v)));
            }
        }
        rot[v] = hs;
    }
    let x_of = |h: usize| pos[head(h)].0;
    for (v, ascending) in [(bot, false), (top, true)] {
        let mut inner: Vec<usize> = rot[v]
            .iter()
            .copied()
            .filter(|&h| h / 2 != left_outer && h / 2 != right_outer)
            .collect();
        inner.sort_by_key(|&h| if ascending { x_of(h) } else { -x_of(h) });
        if inner.windows(2).any(|w| x_of(w[0]) == x_of(w[1])) {
            return invalid(format!("neighbours of {} share an x coordinate", hat.id(v)));
        }
        let lo = 2 * left_outer + usize::from(v == top);
        let ro = 2 * right_outer + usize::from(v == top);
        let mut order = Vec::new();
        if v == bot {
            order.push(ro);
            order.extend(inner);
            order.push(lo);
        } else {
            order.push(lo);
            order.extend(inner);
            order.push(ro);
        }
        rot[v] = order;
    }
    let twin = |h: usize| h ^ 1;
    let next = |h: usize| -> usize {
        let v = head(h);
        let r = &rot[v];
        let k = r.iter().position(|&x| x == twin(h)).unwrap();
        r[(k + r.len() - 1) % r.len()]
    };
    let mut seen = vec![false; 2 * edges.len()];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for h0 in 0..2 * edges.len() {
        if seen[h0] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut h = h0;
        while !seen[h] {
            seen[h] = true;
            cyc.push(h);
            h = next(h);
        }
        if h != h0 {
            return invalid("face tracing did not close up");
        }
        cycles.push(cyc);
    }
    // the outer face runs 0^ -> 1^ along the left outer edge
    let outer_half = 2 * left_outer;
    let mut faces = Vec::new();
    for cyc in cycles {
        if cyc.contains(&outer_half) {
            if !cyc.contains(&(2 * right_outer + 1)) {
                return invalid("outer face does not contain both outer edges");
            }
            continue;
        }
        let verts: Vec<usize> = cyc.iter().map(|&h| tail(h)).collect();
        let len = verts.len();
        let Some(start) = (0..len).find(|&k| verts.iter().all(|&w| hat.leq(verts[k], w))) else {
            return invalid("a face has no minimum; the drawing is not strongly planar");
        };
        let walk: Vec<usize> = (0..=len).map(|k| verts[(start + k) % len]).collect();
        let Some(peak) = (1..=len).find(|&k| !hat.lt(walk[k - 1], walk[k]) || k == len) else {
            return invalid("malformed face");
        };
        let peak = peak - 1;
        let mut right: Vec<usize> = walk[..=peak].to_vec();
        right.reverse();
        let left: Vec<usize> = walk[peak..].to_vec();
        if left.windows(2).any(|w| !hat.lt(w[1], w[0])) {
            return invalid("a face boundary is not two chains; the drawing is not strongly planar");
        }
        faces.push(Face { left, right });
    }
    faces.sort();
    Ok(faces)
}

/// Angular order starting from the positive x axis, counterclockwise.
fn ccw_cmp(a: (i64, i64), b: (i64, i64)) -> std::cmp::Ordering {
    let half = |d: (i64, i64)| if d.1 > 0 || (d.1 == 0 && d.0 > 0) { 0 } else { 1 };
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&(a.0 * b.1 - a.1 * b.0)))
}

/// An embedding together with markings on `P̂` and a boundary choice per
/// face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedEmbedding {
    emb: BoundedEmbedding,
    /// markings on `P̂`; the added elements carry the extreme values
    marks: Vec<Option<Rational>>,
    sides: Vec<Side>,
}

#[derive(Serialize, Deserialize)]
struct FaceJson {
    left: Vec<String>,
    right: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingJson {
    faces: Vec<FaceJson>,
    /// values for `0^` and `1^` when `P` carries no markings
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hats: Option<[String; 2]>,
    poset: PosetJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sides: Option<Vec<Side>>,
}

impl Serialize for MarkedEmbedding {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let e = &self.emb;
        let ids = |c: &[usize]| c.iter().map(|&v| e.name(v).to_string()).collect();
        let hats = if e.base.marked_count() == 0 {
            Some([
                format_rational(self.marks[e.bottom()].as_ref().unwrap()),
                format_rational(self.marks[e.top()].as_ref().unwrap()),
            ])
        } else {
            None
        };
        let sides = if self.sides.iter().all(|&s| s == Side::Left) {
            None
        } else {
            Some(self.sides.clone())
        };
        EmbeddingJson {
            faces: e.faces.iter().map(|f| FaceJson { left: ids(&f.left), right: ids(&f.right) }).collect(),
            hats,
            poset: e.base.clone().into(),
            sides,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkedEmbedding {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = EmbeddingJson::deserialize(d)?;
        let build = || -> Result<MarkedEmbedding> {
            let base = MarkedPoset::try_from(j.poset)?;
            let faces: Vec<(Vec<String>, Vec<String>)> =
                j.faces.into_iter().map(|f| (f.left, f.right)).collect();
            let emb = BoundedEmbedding::from_id_faces(base, &faces)?;
            let sides = j.sides.unwrap_or_else(|| vec![Side::Left; emb.faces.len()]);
            match j.hats {
                Some([lo, hi]) => MarkedEmbedding::assemble(emb, parse_rational(&lo)?, parse_rational(&hi)?, sides),
                None => MarkedEmbedding::with_given_sides(emb, sides),
            }
        };
        build().map_err(D::Error::custom)
    }
}

impl MarkedEmbedding {
    /// Marks `0^` with the least and `1^` with the greatest marking.
    pub fn new(emb: BoundedEmbedding) -> Result<Self> {
        emb.base.validate()?;
        let values: Vec<&Rational> = emb.base.marks().iter().flatten().collect();
        let lo = values.iter().min().map(|v| (*v).clone());
        let hi = values.iter().max().map(|v| (*v).clone());
        let (Some(lo), Some(hi)) = (lo, hi) else {
            return arg("poset has no markings; use with_hat_values");
        };
        MarkedEmbedding::with_hat_values(emb, lo, hi)
    }

    /// Explicit values on `0^` and `1^`; with an unmarked `P` this is the
    /// order polytope dilated by `hi - lo`.
    pub fn with_hat_values(emb: BoundedEmbedding, lo: Rational, hi: Rational) -> Result<Self> {
        let sides = vec![Side::Left; emb.faces.len()];
        MarkedEmbedding::assemble(emb, lo, hi, sides)
    }

    /// Like `new`, with boundary choices given up front.
    pub fn with_given_sides(emb: BoundedEmbedding, sides: Vec<Side>) -> Result<Self> {
        emb.base.validate()?;
        let values: Vec<&Rational> = emb.base.marks().iter().flatten().collect();
        let (Some(lo), Some(hi)) = (values.iter().min(), values.iter().max()) else {
            return arg("poset has no markings");
        };
        let (lo, hi) = ((*lo).clone(), (*hi).clone());
        MarkedEmbedding::assemble(emb, lo, hi, sides)
    }

    fn assemble(emb: BoundedEmbedding, lo: Rational, hi: Rational, sides: Vec<Side>) -> Result<Self> {
        if sides.len() != emb.faces.len() {
            return arg("one side per face is required");
        }
        let mut marks = emb.base.marks().to_vec();
        marks.push(Some(lo));
        marks.push(Some(hi));
        let me = MarkedEmbedding { emb, marks, sides };
        me.hat_poset().validate()?;
        me.validate()?;
        Ok(me)
    }

    /// Order polytope of an unmarked poset dilated by `m`.
    pub fn order_polytope(emb: BoundedEmbedding, m: i64) -> Result<Self> {
        if emb.base.marked_count() != 0 {
            return arg("order polytope embedding expects an unmarked poset");
        }
        MarkedEmbedding::with_hat_values(
            emb,
            Rational::zero(),
            Rational::from_integer(BigInt::from(m)),
        )
    }

    /// Replaces the boundary choice per face and revalidates.
    pub fn with_sides(mut self, sides: Vec<Side>) -> Result<Self> {
        if sides.len() != self.emb.faces.len() {
            return arg("one side per face is required");
        }
        self.sides = sides;
        self.validate()?;
        Ok(self)
    }

    pub fn embedding(&self) -> &BoundedEmbedding {
        &self.emb
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn hat_marks(&self) -> &[Option<Rational>] {
        &self.marks
    }

    /// `P̂` with the extended marking.
    pub fn hat_poset(&self) -> MarkedPoset {
        MarkedPoset::from_indices(self.emb.hat.clone(), self.marks.clone()).unwrap()
    }

    /// Same embedding with marks on `P` replaced (hat values recomputed).
    pub fn with_marking(&self, marking: &Marking) -> Result<Self> {
        let base = self.emb.base.with_marking(marking)?;
        let emb = BoundedEmbedding { base, ..self.emb.clone() };
        MarkedEmbedding::new(emb)?.with_sides(self.sides.clone())
    }

    /// Marks scaled by `t`.
    pub fn dilate(&self, t: i64) -> Self {
        let tr = Rational::from_integer(BigInt::from(t));
        MarkedEmbedding {
            emb: BoundedEmbedding { base: self.emb.base.dilate(t), ..self.emb.clone() },
            marks: self.marks.iter().map(|m| m.as_ref().map(|v| v * &tr)).collect(),
            sides: self.sides.clone(),
        }
    }

    /// Without markings on `P` the polytope is a dilated order polytope and
    /// `0^`, `1^` do not count as marked for the boundary conditions.
    pub fn is_order_polytope(&self) -> bool {
        self.emb.base.marked_count() == 0
    }

    /// Marked for the boundary conditions.
    pub fn counts_as_marked(&self, v: usize) -> bool {
        self.marks[v].is_some() && !(self.is_order_polytope() && v >= self.emb.base.len())
    }

    fn chosen(&self, f: usize) -> (&[usize], &[usize]) {
        let face = &self.emb.faces[f];
        match self.sides[f] {
            Side::Left => (&face.left, &face.right),
            Side::Right => (&face.right, &face.left),
        }
    }

    /// Marking condition per face on its chosen boundary, plus a check that
    /// every marked element is tied to `0^` through the differences the
    /// network enforces.
    pub fn validate(&self) -> Result<()> {
        let e = &self.emb;
        let mut parent: Vec<usize> = (0..e.base.len() + 2).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            r
        }
        let mut join = |a: usize, b: usize| {
            let (x, y) = (find(&mut parent, a), find(&mut parent, b));
            parent[x] = y;
        };
        for f in 0..e.faces.len() {
            let (chain, other) = self.chosen(f);
            if !chain.iter().any(|&v| self.counts_as_marked(v)) {
                continue;
            }
            let face = &e.faces[f];
            if self.marks[face.max()].is_none() || self.marks[face.min()].is_none() {
                return invalid(format!(
                    "face {f} ({} .. {}): its {:?} boundary is marked but its {} is not",
                    e.name(face.max()),
                    e.name(face.min()),
                    self.sides[f],
                    if self.marks[face.max()].is_none() { "maximum" } else { "minimum" }
                ));
            }
            if !e.is_outer_chain(chain) {
                let marked: Vec<usize> =
                    chain.iter().copied().filter(|&v| self.marks[v].is_some()).collect();
                for w in marked.windows(2) {
                    join(w[0], w[1]);
                }
            }
            if !e.is_outer_chain(other) {
                join(face.max(), face.min());
            }
        }
        let root = find(&mut parent, e.bottom());
        for v in 0..e.base.len() + 2 {
            if self.counts_as_marked(v) && find(&mut parent, v) != root {
                return invalid(format!(
                    "marked element {} is not tied to the bottom element by the chosen boundaries",
                    e.name(v)
                ));
            }
        }
        Ok(())
    }

    /// Integer points of the marked order polytope in `P̂` coordinates.
    pub fn lattice_points(&self) -> Result<Vec<Vec<i64>>> {
        self.hat_poset().lattice_points()
    }
}

/// Vertex of a dual network.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeLabel {
    /// the vertex `v_F` of a face
    Face(usize),
    /// a source carrying the edges crossing the chain of `face` between the
    /// marked elements `hi > lo`
    Source { face: usize, hi: usize, lo: usize },
    /// a sink collecting the edges crossing the chain of `face` between the
    /// marked elements `hi > lo`
    Sink { face: usize, hi: usize, lo: usize },
}

/// A flow network built from an embedding, with the Hasse edge each network
/// edge crosses (as `(lower, upper)` in `P̂`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualNetwork {
    pub network: FlowNetwork,
    pub labels: Vec<NodeLabel>,
    pub crossing: Vec<(usize, usize)>,
}

impl DualNetwork {
    pub fn label_name(&self, emb: &BoundedEmbedding, v: usize) -> String {
        match &self.labels[v] {
            NodeLabel::Face(f) if *f == emb.s_face() => "s".to_string(),
            NodeLabel::Face(f) if *f == emb.t_face() => "t".to_string(),
            NodeLabel::Face(f) => format!("F{f}"),
            NodeLabel::Source { face, hi, lo } => {
                format!("s[{}>{}]F{face}", emb.name(*hi), emb.name(*lo))
            }
            NodeLabel::Sink { face, hi, lo } => {
                format!("t[{}>{}]F{face}", emb.name(*hi), emb.name(*lo))
            }
        }
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.network.vertex_count()).filter(|&v| self.network.netflow()[v] < 0).collect()
    }
}

struct Draft {
    labels: Vec<NodeLabel>,
    netflow: Vec<i64>,
    /// 0 source, 1 middle, 2 sink
    class: Vec<u8>,
    key: Vec<(usize, usize)>,
    edges: Vec<(usize, usize)>,
    crossing: Vec<(usize, usize)>,
}

impl Draft {
    fn node(&mut self, label: NodeLabel, netflow: i64, class: u8, key: (usize, usize)) -> usize {
        self.labels.push(label);
        self.netflow.push(netflow);
        self.class.push(class);
        self.key.push(key);
        self.labels.len() - 1
    }

    /// Drops isolated zero vertices and orders sources, middle vertices
    /// (topologically) and sinks.
    fn finish(self) -> Result<DualNetwork> {
        let count = self.labels.len();
        let mut used = vec![false; count];
        for &(a, b) in &self.edges {
            used[a] = true;
            used[b] = true;
        }
        let keep: Vec<usize> = (0..count).filter(|&v| used[v] || self.netflow[v] != 0).collect();
        let by_class = |c: u8| -> Vec<usize> {
            let mut v: Vec<usize> = keep.iter().copied().filter(|&v| self.class[v] == c).collect();
            v.sort_by_key(|&x| (self.key[x], x));
            v
        };
        let sources = by_class(0);
        let sinks = by_class(2);
        let middle_set: BTreeSet<usize> = by_class(1).into_iter().collect();
        let mut indeg: HashMap<usize, usize> = middle_set.iter().map(|&v| (v, 0)).collect();
        for &(a, b) in &self.edges {
            if middle_set.contains(&a) && middle_set.contains(&b) {
                *indeg.get_mut(&b).unwrap() += 1;
            }
        }
        let mut ready: BTreeSet<usize> =
            middle_set.iter().copied().filter(|v| indeg[v] == 0).collect();
        let mut middle = Vec::new();
        while let Some(v) = ready.pop_first() {
            middle.push(v);
            for &(a, b) in &self.edges {
                if a == v && middle_set.contains(&b) {
                    let d = indeg.get_mut(&b).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(b);
                    }
                }
            }
        }
        if middle.len() != middle_set.len() {
            return invalid("dual network has a directed cycle");
        }
        let order: Vec<usize> = sources.into_iter().chain(middle).chain(sinks).collect();
        let mut new_index = vec![usize::MAX; count];
        for (k, &v) in order.iter().enumerate() {
            new_index[v] = k;
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for &(a, b) in &self.edges {
            let (x, y) = (new_index[a], new_index[b]);
            if x >= y {
                return invalid("dual network edge points backwards in the vertex order");
            }
            edges.push((x, y));
        }
        let network = FlowNetwork::new(
            order.len(),
            edges,
            order.iter().map(|&v| self.netflow[v]).collect(),
        )?;
        Ok(DualNetwork {
            network,
            labels: order.iter().map(|&v| self.labels[v].clone()).collect(),
            crossing: self.crossing,
        })
    }
}

/// `G_P`: one vertex per bounded face, netflow `m` at `s`, `-m` at `t`.
pub fn build_g_p(emb: &BoundedEmbedding, m: i64) -> Result<DualNetwork> {
    let mut d = Draft {
        labels: Vec::new(),
        netflow: Vec::new(),
        class: Vec::new(),
        key: Vec::new(),
        edges: Vec::new(),
        crossing: Vec::new(),
    };
    for f in 0..emb.faces.len() {
        let (net, class) = if f == emb.s_face {
            (m, 0)
        } else if f == emb.t_face {
            (-m, 2)
        } else {
            (0, 1)
        };
        d.node(NodeLabel::Face(f), net, class, (0, 0));
    }
    for (c, east, west) in emb.hasse_edges() {
        d.edges.push((east, west));
        d.crossing.push(c);
    }
    d.finish()
}

/// `G_(P,A,λ)`. For a face whose chosen boundary is marked: with the left
/// boundary, `v_F` becomes a sink and each stretch of the left chain between
/// consecutive marks gets its own source; with the right boundary, `v_F`
/// becomes a source and each marked stretch of the right chain its own
/// sink. Stretches ending at `0^` or `1^` with zero netflow only carry
/// edges forced to zero and are dropped.
pub fn build_g_pal(me: &MarkedEmbedding) -> Result<DualNetwork> {
    me.validate()?;
    if me.is_order_polytope() {
        let lo = &me.marks[me.emb.bottom()];
        let hi = &me.marks[me.emb.top()];
        let m = rational_to_i64(&(hi.clone().unwrap() - lo.clone().unwrap())).ok_or_else(|| {
            crate::Error::Precondition("network construction needs integer markings".into())
        })?;
        return build_g_p(&me.emb, m);
    }
    let emb = &me.emb;
    let hp = me.hat_poset();
    let mut marks = Vec::with_capacity(me.marks.len());
    for m in &me.marks {
        marks.push(match m {
            None => None,
            Some(v) => Some(rational_to_i64(v).ok_or_else(|| {
                crate::Error::Precondition("network construction needs integer markings".into())
            })?),
        });
    }
    let rank: HashMap<usize, usize> =
        hp.sorted_marked().into_iter().enumerate().map(|(k, v)| (v, k)).collect();
    let (bot, top) = (emb.bottom(), emb.top());
    let mut d = Draft {
        labels: Vec::new(),
        netflow: Vec::new(),
        class: Vec::new(),
        key: Vec::new(),
        edges: Vec::new(),
        crossing: Vec::new(),
    };
    // for each Hasse edge: the vertex its dual edge leaves and enters
    let hasse = emb.hasse_edges();
    let edge_pos: HashMap<(usize, usize), usize> =
        hasse.iter().enumerate().map(|(k, &(c, _, _))| (c, k)).collect();
    let mut tail: Vec<Option<usize>> = vec![None; hasse.len()];
    let mut head: Vec<Option<usize>> = vec![None; hasse.len()];
    let mut dropped = vec![false; hasse.len()];
    for f in 0..emb.faces.len() {
        let face = &emb.faces[f];
        let (chain, other) = me.chosen(f);
        let marked_chain = chain.iter().any(|&v| marks[v].is_some());
        let face_key = (rank.get(&face.max()).copied().unwrap_or(0), rank.get(&face.min()).copied().unwrap_or(0));
        if !marked_chain {
            let v = d.node(NodeLabel::Face(f), 0, 1, (0, 0));
            for w in face.left.windows(2) {
                if let Some(&k) = edge_pos.get(&(w[1], w[0])) {
                    tail[k] = Some(v);
                }
            }
            for w in face.right.windows(2) {
                if let Some(&k) = edge_pos.get(&(w[1], w[0])) {
                    head[k] = Some(v);
                }
            }
            continue;
        }
        let gap = marks[face.max()].unwrap() - marks[face.min()].unwrap();
        let left_mode = me.sides[f] == Side::Left;
        // the face vertex keeps the edges of the unchosen chain
        let face_net = if emb.is_outer_chain(other) { 0 } else if left_mode { -gap } else { gap };
        let v = d.node(NodeLabel::Face(f), face_net, if left_mode { 2 } else { 0 }, face_key);
        for w in other.windows(2) {
            if let Some(&k) = edge_pos.get(&(w[1], w[0])) {
                if left_mode {
                    head[k] = Some(v);
                } else {
                    tail[k] = Some(v);
                }
            }
        }
        if emb.is_outer_chain(chain) {
            continue;
        }
        let marked_pos: Vec<usize> =
            (0..chain.len()).filter(|&k| marks[chain[k]].is_some()).collect();
        for w in marked_pos.windows(2) {
            let (hi, lo) = (chain[w[0]], chain[w[1]]);
            let seg_gap = marks[hi].unwrap() - marks[lo].unwrap();
            let ks: Vec<usize> = chain[w[0]..=w[1]]
                .windows(2)
                .map(|p| edge_pos[&(p[1], p[0])])
                .collect();
            if seg_gap == 0 && (hi == top || lo == bot) {
                for k in ks {
                    dropped[k] = true;
                }
                continue;
            }
            let key = (rank[&hi], rank[&lo]);
            let s = if left_mode {
                d.node(NodeLabel::Source { face: f, hi, lo }, seg_gap, 0, key)
            } else {
                d.node(NodeLabel::Sink { face: f, hi, lo }, -seg_gap, 2, key)
            };
            for k in ks {
                if left_mode {
                    tail[k] = Some(s);
                } else {
                    head[k] = Some(s);
                }
            }
        }
    }
    for (k, &(c, _, _)) in hasse.iter().enumerate() {
        if dropped[k] {
            continue;
        }
        let (Some(a), Some(b)) = (tail[k], head[k]) else {
            return invalid(format!(
                "Hasse edge {} < {} has no dual edge endpoints",
                emb.name(c.0),
                emb.name(c.1)
            ));
        };
        d.edges.push((a, b));
        d.crossing.push(c);
    }
    d.finish()
}

/// `Γ`: the flow `f(e) = x_q - x_p` for the Hasse edge `p < q` crossed by
/// `e`. `x` is indexed by `P̂`.
pub fn gamma(me: &MarkedEmbedding, dn: &DualNetwork, x: &[i64]) -> Result<IntegerFlow> {
    let hp = me.hat_poset();
    let xr: Vec<Rational> = x.iter().map(|&v| Rational::from_integer(BigInt::from(v))).collect();
    if !hp.contains(&xr) {
        return arg("point is not in the marked order polytope");
    }
    Ok(dn.crossing.iter().map(|&(p, q)| x[q] - x[p]).collect())
}

/// Saturated chain `0^ = c_0 < … < c_r = p` taking the lowest-index lower
/// cover at every step down from `p`.
pub fn canonical_path(emb: &BoundedEmbedding, p: usize) -> Vec<usize> {
    let mut path = vec![p];
    let mut cur = p;
    while cur != emb.bottom() {
        cur = *emb.hat.lower_covers(cur).iter().min().unwrap();
        path.push(cur);
    }
    path.reverse();
    path
}

/// Sum of `f` over the network edges crossing a chain from `0^`, plus the
/// value at `0^`.
pub fn path_value(me: &MarkedEmbedding, dn: &DualNetwork, f: &[i64], path: &[usize]) -> Result<i64> {
    let emb = &me.emb;
    if path.first() != Some(&emb.bottom()) {
        return arg("path must start at the bottom element");
    }
    let by_cross: HashMap<(usize, usize), usize> =
        dn.crossing.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let mut v = rational_to_i64(me.marks[emb.bottom()].as_ref().unwrap())
        .ok_or_else(|| crate::Error::Precondition("integer markings required".into()))?;
    for w in path.windows(2) {
        if !emb.hat.is_cover(w[0], w[1]) {
            return arg("path steps must be cover relations");
        }
        // an edge without a dual edge was forced to zero
        if let Some(&k) = by_cross.get(&(w[0], w[1])) {
            v += f[k];
        }
    }
    Ok(v)
}

/// `Γ⁻¹`: values along canonical paths from `0^`.
pub fn gamma_inverse(me: &MarkedEmbedding, dn: &DualNetwork, f: &[i64]) -> Result<Vec<i64>> {
    if !dn.network.is_flow(f, dn.network.netflow()) {
        return arg("not a flow with the network's netflow");
    }
    let n = me.emb.base.len() + 2;
    (0..n)
        .map(|p| path_value(me, dn, f, &canonical_path(&me.emb, p)))
        .collect()
}

/// The marked poset whose polytope is `GT(λ)`: elements `x(i,j)`,
/// `x(i,j) <= x(i-1,j-1)`, `x(i-1,j) <= x(i,j)`, top row marked by `λ`,
/// drawn so that every interior face has an unmarked left boundary.
pub fn gt_embedding(lambda: &Partition) -> Result<MarkedEmbedding> {
    let n = lambda.len();
    if n == 0 {
        return arg("partition must have at least one part");
    }
    let name = |i: usize, j: usize| format!("x{i},{j}");
    let mut ids = Vec::new();
    let mut coords = BTreeMap::new();
    for i in 1..=n {
        for j in i..=n {
            ids.push(name(i, j));
            coords.insert(name(i, j), (-(i as i64), i as i64 - 2 * j as i64));
        }
    }
    let mut covers = Vec::new();
    for i in 2..=n {
        for j in i..=n {
            covers.push((name(i, j), name(i - 1, j - 1)));
            covers.push((name(i - 1, j), name(i, j)));
        }
    }
    let poset = Poset::new(ids, covers)?;
    let marking: Marking = (1..=n)
        .map(|j| (name(1, j), Rational::from_integer(BigInt::from(lambda.parts()[j - 1]))))
        .collect();
    let base = MarkedPoset::new(poset, &marking)?;
    MarkedEmbedding::new(BoundedEmbedding::from_drawing(base, &coords)?)
}

/// Skew Gelfand-Tsetlin arrays: rows `ν^0 = μ, ν^1, …, ν^m = λ` of length
/// `n` with `ν^r_i >= ν^{r-1}_i >= ν^r_{i+1}`.
pub fn skew_gt_points(lambda: &Partition, mu: &Partition, m: usize) -> Result<Vec<Vec<Vec<i64>>>> {
    check_skew(lambda, mu, m)?;
    let n = lambda.len();
    let l = lambda.parts().to_vec();
    let mut out = Vec::new();
    fn rec(rows: &mut Vec<Vec<i64>>, cur: &mut Vec<i64>, l: &[i64], n: usize, m: usize, out: &mut Vec<Vec<Vec<i64>>>) {
        let r = rows.len();
        if r == m {
            let prev = &rows[m - 1];
            let ok = (0..n).all(|i| l[i] >= prev[i] && (i + 1 == n || prev[i] >= l[i + 1]));
            if ok {
                let mut full = rows.clone();
                full.push(l.to_vec());
                out.push(full);
            }
            return;
        }
        if cur.len() == n {
            rows.push(cur.clone());
            rec(rows, &mut Vec::new(), l, n, m, out);
            rows.pop();
            return;
        }
        let i = cur.len();
        let prev = &rows[r - 1];
        let lo = prev[i];
        let hi = if i == 0 { l[0] } else { prev[i - 1].min(l[i]) };
        for v in lo..=hi {
            cur.push(v);
            rec(rows, cur, l, n, m, out);
            cur.pop();
        }
    }
    rec(&mut vec![mu.parts().to_vec()], &mut Vec::new(), &l, n, m, &mut out);
    Ok(out)
}

fn check_skew(lambda: &Partition, mu: &Partition, m: usize) -> Result<()> {
    if lambda.len() != mu.len() || lambda.is_empty() {
        return arg("λ and μ must have the same positive length");
    }
    if m == 0 {
        return arg("need at least one step");
    }
    if lambda.parts().iter().zip(mu.parts()).any(|(l, u)| u > l) {
        return arg("μ is not contained in λ");
    }
    Ok(())
}

/// The strongly planar marked poset of `GT(λ/μ, m)` with its drawing and
/// boundary choices: faces next to the `μ` row use their right boundary,
/// the outer face `t` too, all others the left one.
pub fn build_skew_gt(lambda: &Partition, mu: &Partition, m: usize) -> Result<MarkedEmbedding> {
    check_skew(lambda, mu, m)?;
    let n = lambda.len();
    let name = |r: usize, i: usize| format!("r{r},{i}");
    let mut ids = Vec::new();
    let mut coords = BTreeMap::new();
    for r in 0..=m {
        for i in 1..=n {
            ids.push(name(r, i));
            coords.insert(name(r, i), (r as i64, r as i64 - 2 * i as i64));
        }
    }
    let mut covers = Vec::new();
    for r in 1..=m {
        for i in 1..=n {
            covers.push((name(r - 1, i), name(r, i)));
            if i < n {
                covers.push((name(r, i + 1), name(r - 1, i)));
            }
        }
    }
    let poset = Poset::new(ids, covers)?;
    let mut marking = Marking::new();
    for i in 1..=n {
        marking.insert(name(0, i), Rational::from_integer(BigInt::from(mu.parts()[i - 1])));
        marking.insert(name(m, i), Rational::from_integer(BigInt::from(lambda.parts()[i - 1])));
    }
    let base = MarkedPoset::new(poset, &marking)?;
    base.validate()?;
    let emb = BoundedEmbedding::from_drawing(base, &coords)?;
    let row_of = |v: usize| -> Option<usize> {
        let id = emb.name(v);
        id.strip_prefix('r')?.split(',').next()?.parse().ok()
    };
    let mut sides = Vec::with_capacity(emb.faces.len());
    for (f, face) in emb.faces.iter().enumerate() {
        let side = if f == emb.t_face {
            Side::Right
        } else if f == emb.s_face {
            Side::Left
        } else if face.left.iter().any(|&v| row_of(v) == Some(0)) {
            Side::Right
        } else {
            Side::Left
        };
        sides.push(side);
    }
    MarkedEmbedding::with_given_sides(emb, sides).map_err(|e| {
        crate::Error::Validation(format!("no valid boundary assignment for m = {m}: {e}"))
    })
}

/// Flow network for `GT(λ/μ, m)`. The construction goes beyond the
/// left-boundary rule, so its integer-flow count is compared with a direct
/// enumeration of skew patterns before it is returned.
pub fn build_skew_flow(lambda: &Partition, mu: &Partition, m: usize) -> Result<DualNetwork> {
    let me = build_skew_gt(lambda, mu, m)?;
    let dn = build_g_pal(&me)?;
    let flows = dn.network.kostant(dn.network.netflow())?;
    let direct = skew_gt_points(lambda, mu, m)?.len();
    if flows != BigInt::from(direct) {
        return invalid(format!(
            "skew network has {flows} integer flows but there are {direct} skew patterns"
        ));
    }
    Ok(dn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::int;

    fn p(v: &[i64]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn chain_embedding(len: usize) -> BoundedEmbedding {
        let poset = Poset::chain(len);
        let coords = (1..=len).map(|k| (format!("c{k}"), (0, k as i64))).collect();
        let base = MarkedPoset::new(poset, &Marking::new()).unwrap();
        BoundedEmbedding::from_drawing(base, &coords).unwrap()
    }

    #[test]
    fn chain_has_two_faces() {
        let e = chain_embedding(2);
        assert_eq!(e.faces().len(), 2);
        let g = build_g_p(&e, 1).unwrap();
        // every Hasse edge of 0 < c1 < c2 < 1 is crossed from s to t
        assert_eq!(g.network.vertex_count(), 2);
        assert_eq!(g.network.edges().len(), 3);
        assert_eq!(g.network.kostant(g.network.netflow()).unwrap(), int(3));
        assert_eq!(g.network.lidskii_volume().unwrap(), crate::combinatorics::rat(1, 2));
    }

    #[test]
    fn antichain_matches_linear_extensions() {
        let poset = Poset::antichain(2);
        let coords = [("a1".to_string(), (-1, 0)), ("a2".to_string(), (1, 0))].into_iter().collect();
        let base = MarkedPoset::new(poset, &Marking::new()).unwrap();
        let e = BoundedEmbedding::from_drawing(base, &coords).unwrap();
        let g = build_g_p(&e, 1).unwrap();
        assert_eq!(g.network.kostant(g.network.netflow()).unwrap(), int(4));
        // normalized volume 2! * vol = e(P) = 2
        assert_eq!(g.network.lidskii_volume().unwrap(), crate::combinatorics::rat(1, 1));
    }

    #[test]
    fn bad_faces_are_rejected() {
        let e = chain_embedding(1);
        let base = e.base().clone();
        // drop a face: Euler and edge coverage fail
        let faces = vec![e.faces()[0].clone()];
        assert!(BoundedEmbedding::new(base.clone(), faces).is_err());
        // a step that is not a Hasse edge
        let bad = vec![
            Face { left: vec![2, 1], right: vec![2, 0, 1] },
            e.faces()[1].clone(),
        ];
        assert!(BoundedEmbedding::new(base, bad).is_err());
    }

    #[test]
    fn gt_embedding_n3() {
        let me = gt_embedding(&p(&[2, 1, 0])).unwrap();
        assert_eq!(me.embedding().faces().len(), 3);
        let dn = build_g_pal(&me).unwrap();
        assert_eq!(dn.network.vertex_count(), 4);
        assert_eq!(dn.network.edges().len(), 6);
        assert_eq!(dn.network.netflow(), &[1, 1, 0, -2]);
        assert_eq!(dn.network.kostant(dn.network.netflow()).unwrap(), int(8));
    }

    #[test]
    fn gamma_round_trip_gt() {
        let me = gt_embedding(&p(&[3, 1, 0])).unwrap();
        let dn = build_g_pal(&me).unwrap();
        let pts = me.lattice_points().unwrap();
        let mut seen = BTreeSet::new();
        for x in &pts {
            let f = gamma(&me, &dn, x).unwrap();
            assert!(dn.network.is_flow(&f, dn.network.netflow()));
            assert_eq!(&gamma_inverse(&me, &dn, &f).unwrap(), x);
            seen.insert(f);
        }
        assert_eq!(seen.len(), pts.len());
        assert_eq!(dn.network.kostant(dn.network.netflow()).unwrap(), int(pts.len() as i64));
    }

    #[test]
    fn def_4_1_violation_detected() {
        // a diamond 0 < {x, y} < 1 with y (right) unmarked and x (left) marked
        let ids = ["b", "x", "y", "t"].iter().map(|s| s.to_string()).collect();
        let poset = Poset::from_indices(ids, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let coords: BTreeMap<String, (i64, i64)> = [("b", (0, 0)), ("x", (-1, 1)), ("y", (1, 1)), ("t", (0, 2))]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let marks: Marking = [("b", 0), ("x", 1), ("t", 2)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), Rational::from_integer(BigInt::from(v))))
            .collect();
        let base = MarkedPoset::new(poset.clone(), &marks).unwrap();
        let emb = BoundedEmbedding::from_drawing(base, &coords).unwrap();
        // the interior face has x on its left boundary and marked ends: fine
        assert!(MarkedEmbedding::new(emb).is_ok());
        // only x marked: the interior face has a marked left boundary
        // but unmarked extremes
        let marks: Marking = [("x".to_string(), Rational::from_integer(BigInt::from(1)))].into_iter().collect();
        let base = MarkedPoset::new(poset, &marks).unwrap();
        let emb = BoundedEmbedding::from_drawing(base, &coords).unwrap();
        assert!(MarkedEmbedding::new(emb).is_err());
    }

    #[test]
    fn skew_counts_match() {
        for (l, u, m) in [
            (vec![2, 1, 0], vec![0, 0, 0], 3),
            (vec![2, 2, 1], vec![1, 0, 0], 3),
            (vec![2, 1], vec![1, 0], 4),
            (vec![1, 1, 0], vec![1, 1, 0], 3),
        ] {
            let dn = build_skew_flow(&p(&l), &p(&u), m).unwrap();
            let direct = skew_gt_points(&p(&l), &p(&u), m).unwrap().len();
            assert_eq!(dn.network.kostant(dn.network.netflow()).unwrap(), int(direct as i64));
        }
        assert!(build_skew_gt(&p(&[2, 1]), &p(&[0, 0]), 2).is_err());
    }

    #[test]
    fn json_round_trip() {
        let me = gt_embedding(&p(&[2, 1, 0])).unwrap();
        let s = serde_json::to_string(&me).unwrap();
        let back: MarkedEmbedding = serde_json::from_str(&s).unwrap();
        assert_eq!(back, me);
        let ord = MarkedEmbedding::order_polytope(chain_embedding(2), 3).unwrap();
        let s = serde_json::to_string(&ord).unwrap();
        assert!(s.contains("\"hats\":[\"0\",\"3\"]"), "{s}");
        let back: MarkedEmbedding = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ord);
    }
}
