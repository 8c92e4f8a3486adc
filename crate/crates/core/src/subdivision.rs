//! Subdivisions of flow polytopes by compounded reductions, subdivisions of
//! marked order polytopes by face replacement, and the bijections between
//! the two.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{compositions_with_bounds, Integer, Rational};
use crate::error::{arg, invalid, precondition, Result};
use crate::flow::{FlowNetwork, IntegerFlow};
use crate::poset::{MarkedPoset, Poset};
use crate::transform::{build_g_pal, gamma, DualNetwork, Face, MarkedEmbedding, NodeLabel};

/// A bipartite noncrossing tree on left vertices `0..left` and right
/// vertices `0..right`. Edges are stored sorted, which for a noncrossing
/// spanning tree is a monotone staircase from `(0, 0)` to
/// `(left - 1, right - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NoncrossingTree {
    left: usize,
    right: usize,
    edges: Vec<(usize, usize)>,
}

impl NoncrossingTree {
    pub fn new(left: usize, right: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        edges.sort();
        edges.dedup();
        let t = NoncrossingTree { left, right, edges };
        if !t.is_noncrossing_tree() {
            return invalid("edges do not form a bipartite noncrossing tree");
        }
        Ok(t)
    }

    /// The tree whose left vertex `i` has degree `c_i + 1`.
    pub fn from_composition(c: &[i64]) -> Result<Self> {
        if c.is_empty() || c.iter().any(|&x| x < 0) {
            return arg("composition must be nonempty with nonnegative parts");
        }
        let right = c.iter().sum::<i64>() as usize + 1;
        let mut edges = Vec::with_capacity(c.len() + right - 1);
        let mut j = 0;
        for (i, &ci) in c.iter().enumerate() {
            for step in 0..=ci as usize {
                edges.push((i, j + step));
            }
            j += ci as usize;
        }
        Ok(NoncrossingTree { left: c.len(), right, edges })
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn left_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.left];
        for &(i, _) in &self.edges {
            d[i] += 1;
        }
        d
    }

    pub fn composition(&self) -> Vec<i64> {
        self.left_degrees().into_iter().map(|d| d as i64 - 1).collect()
    }

    /// Spanning tree with no pair `(p, q), (t, u)` where `p < t` and `q > u`.
    pub fn is_noncrossing_tree(&self) -> bool {
        let (l, r) = (self.left, self.right);
        if l == 0 || r == 0 || self.edges.len() != l + r - 1 {
            return false;
        }
        if self.edges.iter().any(|&(i, j)| i >= l || j >= r) {
            return false;
        }
        for &(p, q) in &self.edges {
            for &(t, u) in &self.edges {
                if p < t && q > u {
                    return false;
                }
            }
        }
        let mut parent: Vec<usize> = (0..l + r).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            r
        }
        for &(i, j) in &self.edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, l + j));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }
}

/// All bipartite noncrossing trees, one per weak composition of
/// `right - 1` into `left` parts.
pub fn enumerate_noncrossing_trees(left: usize, right: usize) -> Result<Vec<NoncrossingTree>> {
    if left == 0 || right == 0 {
        return arg("both sides need at least one vertex");
    }
    let total = right as i64 - 1;
    compositions_with_bounds(total, &vec![0; left], &vec![total; left])
        .iter()
        .map(|c| NoncrossingTree::from_composition(c.parts()))
        .collect()
}

/// A network reached by reductions, with each edge's formal sum of root
/// edges and each vertex's root index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced {
    pub network: FlowNetwork,
    pub sums: Vec<Vec<usize>>,
    pub ids: Vec<usize>,
}

impl Reduced {
    pub fn root(g: &FlowNetwork) -> Self {
        Reduced {
            network: g.clone(),
            sums: (0..g.edges().len()).map(|k| vec![k]).collect(),
            ids: (0..g.vertex_count()).collect(),
        }
    }

    /// Pushes a flow forward to root edge coordinates.
    pub fn include(&self, f: &[i64], root_edges: usize) -> IntegerFlow {
        let mut out = vec![0; root_edges];
        for (k, s) in self.sums.iter().enumerate() {
            for &e in s {
                out[e] += f[k];
            }
        }
        out
    }

    /// Compounded reduction at `v` with in-edges `ins` and out-edges `outs`
    /// in the given order. Surviving edges keep their order; new edges
    /// follow in tree order.
    pub fn reduce(&self, v: usize, ins: &[usize], outs: &[usize], t: &NoncrossingTree) -> Result<Reduced> {
        let g = &self.network;
        if v >= g.vertex_count() {
            return arg("vertex out of range");
        }
        if g.netflow()[v] != 0 {
            return precondition(format!("vertex {v} has nonzero netflow"));
        }
        let mut a = ins.to_vec();
        let mut b = g.in_edges(v);
        a.sort_unstable();
        b.sort_unstable();
        let mut c = outs.to_vec();
        let mut d = g.out_edges(v);
        c.sort_unstable();
        d.sort_unstable();
        if a != b || c != d {
            return arg(format!("edge orders do not list the edges at vertex {v}"));
        }
        if ins.is_empty() || outs.is_empty() {
            return precondition(format!("vertex {v} needs both incoming and outgoing edges"));
        }
        if t.left != ins.len() || t.right != outs.len() {
            return arg("tree sides do not match the edges at the vertex");
        }
        let shift = |w: usize| if w > v { w - 1 } else { w };
        let mut edges = Vec::new();
        let mut sums = Vec::new();
        for (k, &(x, y)) in g.edges().iter().enumerate() {
            if x != v && y != v {
                edges.push((shift(x), shift(y)));
                sums.push(self.sums[k].clone());
            }
        }
        for &(i, j) in &t.edges {
            let (e1, e2) = (ins[i], outs[j]);
            edges.push((shift(g.edges()[e1].0), shift(g.edges()[e2].1)));
            let mut s = self.sums[e1].clone();
            s.extend(&self.sums[e2]);
            sums.push(s);
        }
        let netflow: Vec<i64> =
            (0..g.vertex_count()).filter(|&w| w != v).map(|w| g.netflow()[w]).collect();
        let ids = (0..g.vertex_count()).filter(|&w| w != v).map(|w| self.ids[w]).collect();
        Ok(Reduced { network: FlowNetwork::new(g.vertex_count() - 1, edges, netflow)?, sums, ids })
    }
}

/// `G_T^(i)` with the incident edges ordered by edge index.
pub fn compound_reduce(g: &FlowNetwork, i: usize, t: &NoncrossingTree) -> Result<FlowNetwork> {
    let r = Reduced::root(g);
    Ok(r.reduce(i, &g.in_edges(i), &g.out_edges(i), t)?.network)
}

/// Positive netflow only at vertices without in-edges, negative only at
/// vertices without out-edges, zero only where both exist.
pub fn check_sign_convention(g: &FlowNetwork) -> Result<()> {
    for v in 0..g.vertex_count() {
        let (a, i, o) = (g.netflow()[v], g.in_degree(v), g.out_degree(v));
        if a > 0 && i > 0 {
            return precondition(format!("vertex {v} has positive netflow and incoming edges"));
        }
        if a < 0 && o > 0 {
            return precondition(format!("vertex {v} has negative netflow and outgoing edges"));
        }
        if a == 0 && (i == 0 || o == 0) && i + o > 0 {
            return precondition(format!(
                "vertex {v} has zero netflow but lacks incoming or outgoing edges"
            ));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionNode {
    pub reduced: Reduced,
    pub parent: Option<usize>,
    /// root index of the reduced vertex and the tree used
    pub step: Option<(usize, NoncrossingTree)>,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTree {
    pub nodes: Vec<ReductionNode>,
}

impl ReductionTree {
    pub fn root(&self) -> &FlowNetwork {
        &self.nodes[0].reduced.network
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&k| self.nodes[k].children.is_empty()).collect()
    }

    pub fn leaf_volume_sum(&self) -> Result<Rational> {
        let mut s = Rational::zero();
        for k in self.leaves() {
            s += self.nodes[k].reduced.network.leaf_volume()?;
        }
        Ok(s)
    }

    /// Node indices from the root down to `k`.
    pub fn path(&self, k: usize) -> Vec<usize> {
        let mut p = vec![k];
        let mut cur = k;
        while let Some(u) = self.nodes[cur].parent {
            p.push(u);
            cur = u;
        }
        p.reverse();
        p
    }

    /// Reductions per depth: (depth, number of nodes).
    pub fn level_sizes(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.nodes.len()];
        let mut sizes = vec![1];
        for k in 1..self.nodes.len() {
            depth[k] = depth[self.nodes[k].parent.unwrap()] + 1;
            if sizes.len() <= depth[k] {
                sizes.push(0);
            }
            sizes[depth[k]] += 1;
        }
        sizes
    }
}

/// Reduction tree reducing, at each node, the zero-netflow vertex chosen
/// by `pick` among the candidates (given as root indices).
pub fn reduction_tree_with(
    g: &FlowNetwork,
    pick: &dyn Fn(&[usize]) -> usize,
) -> Result<ReductionTree> {
    check_sign_convention(g)?;
    let mut nodes = vec![ReductionNode { reduced: Reduced::root(g), parent: None, step: None, children: Vec::new() }];
    let mut k = 0;
    while k < nodes.len() {
        let r = nodes[k].reduced.clone();
        let net = &r.network;
        let zeros: Vec<usize> = (0..net.vertex_count())
            .filter(|&v| net.netflow()[v] == 0 && net.in_degree(v) > 0)
            .map(|v| r.ids[v])
            .collect();
        if !zeros.is_empty() {
            let root_v = pick(&zeros);
            let v = r.ids.iter().position(|&x| x == root_v).unwrap();
            let (ins, outs) = (net.in_edges(v), net.out_edges(v));
            for t in enumerate_noncrossing_trees(ins.len(), outs.len())? {
                let child = r.reduce(v, &ins, &outs, &t)?;
                nodes.push(ReductionNode { reduced: child, parent: Some(k), step: Some((root_v, t)), children: Vec::new() });
                let c = nodes.len() - 1;
                nodes[k].children.push(c);
            }
        }
        k += 1;
    }
    Ok(ReductionTree { nodes })
}

/// Reductions from the highest to the lowest index zero-netflow vertex.
pub fn canonical_reduction_tree(g: &FlowNetwork) -> Result<ReductionTree> {
    reduction_tree_with(g, &|c| *c.iter().max().unwrap())
}

/// `p_1`, a shuffle of the interiors of both boundary chains, `p_k`.
pub fn face_extensions(face: &Face) -> Vec<Vec<usize>> {
    let l = &face.left[1..face.left.len() - 1];
    let r = &face.right[1..face.right.len() - 1];
    let mut out = Vec::new();
    fn rec(l: &[usize], r: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, last: usize) {
        if l.is_empty() && r.is_empty() {
            let mut m = cur.clone();
            m.push(last);
            out.push(m);
            return;
        }
        if let Some((&x, rest)) = l.split_first() {
            cur.push(x);
            rec(rest, r, cur, out, last);
            cur.pop();
        }
        if let Some((&x, rest)) = r.split_first() {
            cur.push(x);
            rec(l, rest, cur, out, last);
            cur.pop();
        }
    }
    rec(l, r, &mut vec![face.max()], &mut out, face.min());
    out
}

/// The tree matching a linear order of a face. Left tree vertices are the
/// right-boundary edges of the face, right tree vertices its left-boundary
/// edges, both top to bottom; consecutive elements of the order become the
/// tree edge joining the two boundary edges they lie between.
pub fn merged_to_tree(face: &Face, merged: &[usize]) -> Result<NoncrossingTree> {
    let (k, l) = (face.left.len(), face.right.len());
    if merged.len() != k + l - 2 || merged[0] != face.max() || *merged.last().unwrap() != face.min() {
        return arg("not a linear order of the face");
    }
    let (mut a, mut b) = (0, 0);
    let mut edges = Vec::with_capacity(k + l - 3);
    for t in 0..merged.len() - 1 {
        edges.push((b, a));
        if t + 2 < merged.len() {
            if face.left.get(a + 1) == Some(&merged[t + 1]) {
                a += 1;
            } else if face.right.get(b + 1) == Some(&merged[t + 1]) {
                b += 1;
            } else {
                return arg("not a linear order of the face");
            }
        }
    }
    NoncrossingTree::new(l - 1, k - 1, edges)
}

/// Inverse of `merged_to_tree`.
pub fn tree_to_merged(face: &Face, t: &NoncrossingTree) -> Result<Vec<usize>> {
    let (k, l) = (face.left.len(), face.right.len());
    if t.left != l - 1 || t.right != k - 1 {
        return arg("tree does not fit the face");
    }
    let mut m = vec![face.max()];
    for w in t.edges.windows(2) {
        let ((b0, a0), (b1, a1)) = (w[0], w[1]);
        if b1 == b0 && a1 == a0 + 1 {
            m.push(face.left[a1]);
        } else if a1 == a0 && b1 == b0 + 1 {
            m.push(face.right[b1]);
        } else {
            return arg("tree edges are not a staircase");
        }
    }
    m.push(face.min());
    Ok(m)
}

/// Adds `(lower, upper)` relations and recomputes the cover relations.
pub fn refine_poset(p: &Poset, extra: &[(usize, usize)]) -> Result<Poset> {
    let n = p.len();
    let mut lt = vec![vec![false; n]; n];
    for (a, row) in lt.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = p.lt(a, b);
        }
    }
    for &(a, b) in extra {
        lt[a][b] = true;
    }
    for m in 0..n {
        for a in 0..n {
            if lt[a][m] {
                for b in 0..n {
                    if lt[m][b] {
                        lt[a][b] = true;
                    }
                }
            }
        }
    }
    if (0..n).any(|a| lt[a][a]) {
        return invalid("added relations create a cycle");
    }
    let mut covers = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if lt[a][b] && !(0..n).any(|m| lt[a][m] && lt[m][b]) {
                covers.push((a, b));
            }
        }
    }
    Poset::from_indices(p.ids().to_vec(), covers)
}

fn reducible_faces(me: &MarkedEmbedding) -> Vec<usize> {
    let emb = me.embedding();
    (0..emb.faces().len())
        .filter(|&f| {
            if f == emb.s_face() || f == emb.t_face() {
                return false;
            }
            let face = &emb.faces()[f];
            let chain = match me.sides()[f] {
                crate::transform::Side::Left => &face.left,
                crate::transform::Side::Right => &face.right,
            };
            !chain.iter().any(|&v| me.counts_as_marked(v))
        })
        .collect()
}

/// Replaces a face whose chosen boundary is unmarked by each of its linear
/// orders.
pub fn subdivide_marked_face(me: &MarkedEmbedding, f: usize) -> Result<Vec<MarkedPoset>> {
    if !reducible_faces(me).contains(&f) {
        return precondition(format!("face {f} has a marked boundary; it cannot be replaced"));
    }
    let base = me.embedding().base();
    let face = &me.embedding().faces()[f];
    face_extensions(face)
        .iter()
        .map(|m| {
            let extra: Vec<(usize, usize)> = m.windows(2).map(|w| (w[1], w[0])).collect();
            MarkedPoset::from_indices(refine_poset(base.poset(), &extra)?, base.marks().to_vec())
        })
        .collect()
}

/// Pairs each linear order of face `f` with its tree.
pub fn gamma_cells(me: &MarkedEmbedding, f: usize) -> Result<Vec<(Vec<usize>, NoncrossingTree)>> {
    if !reducible_faces(me).contains(&f) {
        return precondition(format!("face {f} has a marked boundary; it cannot be replaced"));
    }
    let face = &me.embedding().faces()[f];
    face_extensions(face)
        .into_iter()
        .map(|m| {
            let t = merged_to_tree(face, &m)?;
            Ok((m, t))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairedStep {
    pub face: usize,
    pub tree: NoncrossingTree,
    pub merged: Vec<usize>,
    /// the reduced vertex's in-edges top to bottom, as node edge indices
    pub ins: Vec<usize>,
}

/// A node of the simultaneous subdivision: a refined poset on the order
/// side and a reduced network on the flow side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairedNode {
    pub reduced: Reduced,
    /// Hasse edge `(lower, upper)` of the refined poset crossed by each edge
    pub crossing: Vec<(usize, usize)>,
    pub faces: Vec<Face>,
    pub relations: Vec<(usize, usize)>,
    pub parent: Option<usize>,
    pub step: Option<PairedStep>,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct PairedSubdivision {
    pub embedding: MarkedEmbedding,
    pub network: DualNetwork,
    pub order: Vec<usize>,
    pub nodes: Vec<PairedNode>,
}

fn splice(chain: &[usize], pairs: &BTreeSet<(usize, usize)>, pos: &HashMap<usize, usize>, merged: &[usize]) -> Vec<usize> {
    let mut out = vec![chain[0]];
    for w in chain.windows(2) {
        if pairs.contains(&(w[0], w[1])) {
            out.extend(&merged[pos[&w[0]] + 1..=pos[&w[1]]]);
        } else {
            out.push(w[1]);
        }
    }
    out
}

/// Subdivides both sides face by face. `order` lists the faces to replace;
/// by default every face with an unmarked chosen boundary, from the highest
/// to the lowest index of its network vertex.
pub fn paired_subdivision(me: &MarkedEmbedding, order: Option<&[usize]>) -> Result<PairedSubdivision> {
    let dn = build_g_pal(me)?;
    check_sign_convention(&dn.network)?;
    let vertex_of: HashMap<usize, usize> = dn
        .labels
        .iter()
        .enumerate()
        .filter_map(|(v, l)| match l {
            NodeLabel::Face(f) => Some((*f, v)),
            _ => None,
        })
        .collect();
    let reducible = reducible_faces(me);
    for &f in &reducible {
        let ok = vertex_of.get(&f).is_some_and(|&v| dn.network.netflow()[v] == 0);
        if !ok {
            return precondition(format!("face {f} has no zero-netflow vertex in the network"));
        }
    }
    let order: Vec<usize> = match order {
        Some(o) => {
            let a: BTreeSet<usize> = o.iter().copied().collect();
            let b: BTreeSet<usize> = reducible.iter().copied().collect();
            if a != b || o.len() != b.len() {
                return arg("face order must list each replaceable face once");
            }
            o.to_vec()
        }
        None => {
            let mut o = reducible.clone();
            o.sort_by_key(|f| std::cmp::Reverse(vertex_of[f]));
            o
        }
    };
    let mut nodes = vec![PairedNode {
        reduced: Reduced::root(&dn.network),
        crossing: dn.crossing.clone(),
        faces: me.embedding().faces().to_vec(),
        relations: Vec::new(),
        parent: None,
        step: None,
        children: Vec::new(),
    }];
    let mut depth = vec![0usize];
    let mut k = 0;
    while k < nodes.len() {
        if depth[k] == order.len() {
            k += 1;
            continue;
        }
        let f = order[depth[k]];
        let node = nodes[k].clone();
        let face = node.faces[f].clone();
        let by_cross: HashMap<(usize, usize), usize> =
            node.crossing.iter().enumerate().map(|(e, &c)| (c, e)).collect();
        let along = |chain: &[usize]| -> Result<Vec<usize>> {
            chain
                .windows(2)
                .map(|w| {
                    by_cross.get(&(w[1], w[0])).copied().ok_or_else(|| {
                        crate::Error::Validation(format!(
                            "face {f}: boundary edge {} > {} has no network edge",
                            me.embedding().name(w[0]),
                            me.embedding().name(w[1])
                        ))
                    })
                })
                .collect()
        };
        let ins = along(&face.right)?;
        let outs = along(&face.left)?;
        let v = node.reduced.ids.iter().position(|&x| x == vertex_of[&f]).unwrap();
        let net = &node.reduced.network;
        let surviving: Vec<(usize, usize)> = (0..net.edges().len())
            .filter(|&e| net.edges()[e].0 != v && net.edges()[e].1 != v)
            .map(|e| node.crossing[e])
            .collect();
        for t in enumerate_noncrossing_trees(ins.len(), outs.len())? {
            let merged = tree_to_merged(&face, &t)?;
            let reduced = node.reduced.reduce(v, &ins, &outs, &t)?;
            let mut crossing = surviving.clone();
            crossing.extend(t.edges.iter().enumerate().map(|(s, _)| (merged[s + 1], merged[s])));
            let pos: HashMap<usize, usize> = merged.iter().enumerate().map(|(i, &x)| (x, i)).collect();
            let pairs: BTreeSet<(usize, usize)> = face
                .left
                .windows(2)
                .chain(face.right.windows(2))
                .map(|w| (w[0], w[1]))
                .collect();
            let faces = node
                .faces
                .iter()
                .enumerate()
                .map(|(g, fc)| {
                    if g == f {
                        fc.clone()
                    } else {
                        Face {
                            left: splice(&fc.left, &pairs, &pos, &merged),
                            right: splice(&fc.right, &pairs, &pos, &merged),
                        }
                    }
                })
                .collect();
            let mut relations = node.relations.clone();
            relations.extend(merged.windows(2).map(|w| (w[1], w[0])));
            nodes.push(PairedNode {
                reduced,
                crossing,
                faces,
                relations,
                parent: Some(k),
                step: Some(PairedStep { face: f, tree: t, merged, ins: ins.clone() }),
                children: Vec::new(),
            });
            depth.push(depth[k] + 1);
            let c = nodes.len() - 1;
            nodes[k].children.push(c);
        }
        k += 1;
    }
    Ok(PairedSubdivision { embedding: me.clone(), network: dn, order, nodes })
}

impl PairedSubdivision {
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&k| self.nodes[k].children.is_empty()).collect()
    }

    pub fn path(&self, k: usize) -> Vec<usize> {
        let mut p = vec![k];
        let mut cur = k;
        while let Some(u) = self.nodes[cur].parent {
            p.push(u);
            cur = u;
        }
        p.reverse();
        p
    }

    /// The order-side cell of a node as a marked poset on `P̂`.
    pub fn cell_poset(&self, k: usize) -> Result<MarkedPoset> {
        let me = &self.embedding;
        let hat = refine_poset(me.embedding().hat(), &self.nodes[k].relations)?;
        MarkedPoset::from_indices(hat, me.hat_marks().to_vec())
    }

    fn describe(&self, k: usize) -> String {
        let steps: Vec<String> = self
            .path(k)
            .iter()
            .filter_map(|&u| self.nodes[u].step.as_ref())
            .map(|s| {
                let names: Vec<&str> = s.merged.iter().map(|&v| self.embedding.embedding().name(v)).collect();
                format!("F{}:[{}]", s.face, names.join(">"))
            })
            .collect();
        if steps.is_empty() {
            "root".to_string()
        } else {
            steps.join(" ")
        }
    }

    /// Checks that `Γ` maps the lattice points of each order-side cell onto
    /// the integer flows of its flow-side partner, pushed into the root.
    pub fn check_cell(&self, k: usize) -> Result<usize> {
        let me = &self.embedding;
        let root_edges = self.network.network.edges().len();
        let pts = self.cell_poset(k)?.lattice_points()?;
        let mut left = BTreeSet::new();
        for x in &pts {
            left.insert(gamma(me, &self.network, x)?);
        }
        let node = &self.nodes[k];
        let net = &node.reduced.network;
        let right: BTreeSet<IntegerFlow> = net
            .enumerate_integer_flows(net.netflow())?
            .iter()
            .map(|f| node.reduced.include(f, root_edges))
            .collect();
        if left != right || left.len() != pts.len() {
            return invalid(format!(
                "cell {} differs: {} order-side points, {} flow-side points",
                self.describe(k),
                pts.len(),
                right.len()
            ));
        }
        Ok(pts.len())
    }
}

/// Outcome of a full simultaneous subdivision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionReport {
    pub faces: Vec<usize>,
    pub nodes: usize,
    pub cells: usize,
    pub volume: String,
    pub leaf_volume_sum: String,
}

/// Replaces every face with an unmarked chosen boundary, on both sides, and
/// checks every cell at the lattice-point level, leaf volumes against the
/// marked volume, and that distinct leaves are separated by a reversed
/// relation.
pub fn full_subdivision_check(me: &MarkedEmbedding, order: Option<&[usize]>) -> Result<SubdivisionReport> {
    let ps = paired_subdivision(me, order)?;
    for k in 0..ps.nodes.len() {
        ps.check_cell(k)?;
    }
    let leaves = ps.leaves();
    let mut total = Rational::zero();
    let mut orders = Vec::new();
    for &k in &leaves {
        let cell = ps.cell_poset(k)?;
        let flow_vol = ps.nodes[k].reduced.network.leaf_volume()?;
        let order_vol = cell.marked_volume()?;
        if flow_vol != order_vol {
            return invalid(format!(
                "cell {}: order-side volume {order_vol} but flow-side volume {flow_vol}",
                ps.describe(k)
            ));
        }
        total += flow_vol;
        orders.push(cell);
    }
    for i in 0..orders.len() {
        for j in i + 1..orders.len() {
            let (a, b) = (orders[i].poset(), orders[j].poset());
            let n = a.len();
            let separated = (0..n).any(|x| (0..n).any(|y| a.lt(x, y) && b.lt(y, x)));
            if !separated {
                return invalid(format!(
                    "cells {} and {} are not separated",
                    ps.describe(leaves[i]),
                    ps.describe(leaves[j])
                ));
            }
        }
    }
    let volume = me.hat_poset().marked_volume()?;
    if volume != total {
        return invalid(format!("leaf volumes sum to {total}, marked volume is {volume}"));
    }
    Ok(SubdivisionReport {
        faces: ps.order.clone(),
        nodes: ps.nodes.len(),
        cells: leaves.len(),
        volume: crate::combinatorics::format_rational(&volume),
        leaf_volume_sum: crate::combinatorics::format_rational(&total),
    })
}

/// Netflow `(a_1 - out_1, …, a_{k-1} - out_{k-1}, -out_k, …, -out_{n-1}, 0)`
/// with `out_j` the outdegree of vertex `j` minus one.
pub fn shifted_netflow(g: &FlowNetwork, a: &[i64]) -> Result<Vec<i64>> {
    let n = g.vertex_count();
    if a.len() >= n {
        return arg("too many entries for the network");
    }
    let mut b: Vec<i64> = (0..n - 1).map(|j| -(g.out_degree(j) as i64 - 1)).collect();
    for (j, &x) in a.iter().enumerate() {
        b[j] += x;
    }
    b.push(0);
    Ok(b)
}

/// One instance of the flow, leaf and linear extension correspondence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionTriple {
    pub a: Vec<i64>,
    pub flow: IntegerFlow,
    pub leaf: usize,
    /// elements of `P` from the top down
    pub extension: Vec<String>,
}

/// The canonical subdivision of a single-sink `G_(P,A,λ)` with the maps
/// between its leaves, flows and linear extensions.
pub struct ExtensionBijection {
    pub paired: PairedSubdivision,
    /// marked elements of `P` in decreasing marking order
    pub marked: Vec<usize>,
}

impl ExtensionBijection {
    pub fn new(me: &MarkedEmbedding) -> Result<Self> {
        let paired = paired_subdivision(me, None)?;
        let dn = &paired.network;
        let g = &dn.network;
        let sinks = dn.sinks();
        if sinks.len() != 1 || sinks[0] != g.vertex_count() - 1 {
            return precondition(format!("network has {} sinks; exactly one is required", sinks.len()));
        }
        let marked = me.embedding().base().sorted_marked();
        let k = marked.len();
        let sources: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.netflow()[v] > 0).collect();
        if sources != (0..k.saturating_sub(1)).collect::<Vec<_>>() {
            return precondition("sources do not correspond to consecutive marked elements");
        }
        for (i, &s) in sources.iter().enumerate() {
            let (hi, lo) = match &dn.labels[s] {
                NodeLabel::Source { hi, lo, .. } => (*hi, *lo),
                NodeLabel::Face(f) => {
                    let face = &me.embedding().faces()[*f];
                    (face.max(), face.min())
                }
                NodeLabel::Sink { .. } => unreachable!(),
            };
            if (hi, lo) != (marked[i], marked[i + 1]) {
                return precondition(format!(
                    "source {} does not sit between consecutive marked elements",
                    dn.label_name(me.embedding(), s)
                ));
            }
        }
        Ok(ExtensionBijection { paired, marked })
    }

    pub fn network(&self) -> &FlowNetwork {
        &self.paired.network.network
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.paired.leaves()
    }

    /// `a_i` is the outdegree of the `i`th source in the leaf, minus one.
    pub fn leaf_composition(&self, leaf: usize) -> Vec<i64> {
        let r = &self.paired.nodes[leaf].reduced;
        (0..self.marked.len().saturating_sub(1))
            .map(|i| {
                let v = r.ids.iter().position(|&x| x == i).unwrap();
                r.network.out_degree(v) as i64 - 1
            })
            .collect()
    }

    /// Reads flows off the trees along the path: the in-edges of each
    /// reduced vertex carry the composition of its tree.
    pub fn leaf_to_flow(&self, leaf: usize) -> IntegerFlow {
        let mut f = vec![0; self.network().edges().len()];
        for u in self.paired.path(leaf) {
            if let Some(s) = &self.paired.nodes[u].step {
                let parent = &self.paired.nodes[self.paired.nodes[u].parent.unwrap()];
                for (j, c) in s.tree.composition().into_iter().enumerate() {
                    for &e in &parent.reduced.sums[s.ins[j]] {
                        f[e] += c;
                    }
                }
            }
        }
        f
    }

    pub fn flow_to_leaf(&self, f: &[i64]) -> Result<usize> {
        let mut k = 0;
        while !self.paired.nodes[k].children.is_empty() {
            let node = &self.paired.nodes[k];
            let first = &self.paired.nodes[node.children[0]];
            let ins = &first.step.as_ref().unwrap().ins;
            let mut c = Vec::with_capacity(ins.len());
            for &e in ins {
                let s = &node.reduced.sums[e];
                if s.len() != 1 {
                    return invalid("an in-edge of a reduced vertex is not an original edge");
                }
                c.push(f[s[0]]);
            }
            let t = NoncrossingTree::from_composition(&c)?;
            k = *node
                .children
                .iter()
                .find(|&&ch| self.paired.nodes[ch].step.as_ref().unwrap().tree == t)
                .ok_or_else(|| crate::Error::Argument("flow does not select a leaf".into()))?;
        }
        Ok(k)
    }

    /// The leaf's order-side cell, which must be a chain; returns `P` top
    /// down and checks the marked positions against the leaf's composition.
    pub fn leaf_to_extension(&self, leaf: usize) -> Result<Vec<usize>> {
        let cell = self.paired.cell_poset(leaf)?;
        let order: Vec<usize> = cell.poset().topological_order().into_iter().rev().collect();
        if order.windows(2).any(|w| !cell.poset().lt(w[1], w[0])) {
            return invalid(format!("leaf {} is not a chain", self.paired.describe(leaf)));
        }
        let n = self.paired.embedding.embedding().base().len();
        let ext: Vec<usize> = order.into_iter().filter(|&v| v < n).collect();
        let a = self.leaf_composition(leaf);
        let mut want = Vec::with_capacity(self.marked.len());
        let mut pos = 0i64;
        for i in 0..self.marked.len() {
            want.push(pos as usize);
            if i < a.len() {
                pos += a[i] + 1;
            }
        }
        let got: Vec<usize> = self.marked.iter().map(|m| ext.iter().position(|x| x == m).unwrap()).collect();
        if got != want || ext.len() as i64 != pos + 1 {
            return invalid(format!(
                "leaf {}: marked positions {got:?} do not match the composition {a:?}",
                self.paired.describe(leaf)
            ));
        }
        Ok(ext)
    }

    /// Runs flow, leaf and extension maps for every leaf.
    pub fn triples(&self) -> Result<Vec<ExtensionTriple>> {
        let base = self.paired.embedding.embedding().base();
        let mut out = Vec::new();
        for leaf in self.leaves() {
            let a = self.leaf_composition(leaf);
            let flow = self.leaf_to_flow(leaf);
            if !self.network().is_flow(&flow, &shifted_netflow(self.network(), &a)?) {
                return invalid(format!("leaf {} gives no flow for {a:?}", self.paired.describe(leaf)));
            }
            if self.flow_to_leaf(&flow)? != leaf {
                return invalid("flow does not lead back to its leaf");
            }
            let ext = self.leaf_to_extension(leaf)?;
            out.push(ExtensionTriple {
                a,
                flow,
                leaf,
                extension: ext.iter().map(|&v| base.poset().id(v).to_string()).collect(),
            });
        }
        Ok(out)
    }
}

/// Per composition: linear extensions counted directly, Kostant value at
/// the shifted netflow, and leaves found by the bijection.
pub fn extension_identity(me: &MarkedEmbedding, max_entry: i64) -> Result<Vec<(Vec<i64>, Integer, Integer, usize)>> {
    let bij = ExtensionBijection::new(me)?;
    let triples = bij.triples()?;
    let mut by_a: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for t in &triples {
        if !seen.insert(t.extension.clone()) {
            return invalid("two leaves give the same linear extension");
        }
        *by_a.entry(t.a.clone()).or_default() += 1;
    }
    let base = me.embedding().base();
    let k = bij.marked.len();
    let free = (base.len() - k) as i64;
    let mut out = Vec::new();
    if k < 2 {
        return Ok(out);
    }
    for c in compositions_with_bounds(free, &vec![0; k - 1], &vec![max_entry.min(free); k - 1]) {
        let a = c.parts().to_vec();
        let direct = base.count_marked_extensions(&a)?;
        let b = shifted_netflow(bij.network(), &a)?;
        let kost = bij.network().kostant(&b)?;
        out.push((a.clone(), direct, kost, by_a.get(&a).copied().unwrap_or(0)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{binomial, int};

    fn brute_trees(l: usize, r: usize) -> usize {
        let all: Vec<(usize, usize)> = (0..l).flat_map(|i| (0..r).map(move |j| (i, j))).collect();
        let mut count = 0;
        for mask in 0u32..(1 << all.len()) {
            if mask.count_ones() as usize != l + r - 1 {
                continue;
            }
            let edges = (0..all.len()).filter(|&k| mask >> k & 1 == 1).map(|k| all[k]).collect();
            if (NoncrossingTree { left: l, right: r, edges }).is_noncrossing_tree() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn tree_counts() {
        for l in 1..=4 {
            for r in 1..=4 {
                let ts = enumerate_noncrossing_trees(l, r).unwrap();
                assert_eq!(int(ts.len() as i64), binomial((l + r - 2) as i64, (l - 1) as i64));
                assert_eq!(ts.len(), brute_trees(l, r), "l={l} r={r}");
                let set: BTreeSet<_> = ts.iter().collect();
                assert_eq!(set.len(), ts.len());
                for t in &ts {
                    assert!(t.is_noncrossing_tree());
                    assert_eq!(&NoncrossingTree::from_composition(&t.composition()).unwrap(), t);
                }
            }
        }
        assert_eq!(enumerate_noncrossing_trees(2, 3).unwrap().len(), 3);
    }

    #[test]
    fn composition_0211() {
        let t = NoncrossingTree::from_composition(&[0, 2, 1, 1]).unwrap();
        assert_eq!(t.left_degrees(), vec![1, 3, 2, 2]);
        assert_eq!((t.left(), t.right()), (4, 5));
        assert!(t.is_noncrossing_tree());
    }

    #[test]
    fn single_in_edge_contracts() {
        // 0 -> 1 -> {2, 2}: reducing 1 sends both out-edges straight from 0
        let g = FlowNetwork::new(3, vec![(0, 1), (1, 2), (1, 2)], vec![2, 0, -2]).unwrap();
        let t = &enumerate_noncrossing_trees(1, 2).unwrap()[0];
        let h = compound_reduce(&g, 1, t).unwrap();
        assert_eq!(h.edges(), &[(0, 1), (0, 1)]);
        assert_eq!(h.netflow(), &[2, -2]);
    }

    #[test]
    fn conservation_on_small_networks() {
        let nets = [
            FlowNetwork::new(3, vec![(0, 1), (0, 2), (1, 2)], vec![1, 0, -1]).unwrap(),
            FlowNetwork::new(4, vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (0, 3)], vec![1, 0, 0, -1]).unwrap(),
            FlowNetwork::new(4, vec![(0, 1), (0, 1), (1, 2), (1, 3), (2, 3), (2, 3)], vec![2, 0, 0, -2]).unwrap(),
        ];
        for g in nets {
            let tree = canonical_reduction_tree(&g).unwrap();
            assert_eq!(tree.leaf_volume_sum().unwrap(), g.lidskii_volume().unwrap());
            for k in tree.leaves() {
                let n = &tree.nodes[k].reduced;
                assert_eq!(n.network.generic_dimension(), g.generic_dimension());
                // leaf flows land inside the root polytope
                for f in n.network.enumerate_integer_flows(n.network.netflow()).unwrap() {
                    assert!(g.is_flow(&n.include(&f, g.edges().len()), g.netflow()));
                }
            }
        }
    }

    #[test]
    fn reduced_leaf_is_single_node() {
        let g = FlowNetwork::new(2, vec![(0, 1), (0, 1)], vec![3, -3]).unwrap();
        let tree = canonical_reduction_tree(&g).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert_eq!(tree.leaf_volume_sum().unwrap(), crate::combinatorics::rat(3, 1));
    }

    fn p(v: &[i64]) -> crate::combinatorics::Partition {
        crate::combinatorics::Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn face_orders_and_trees() {
        // left chain of 4, right chain of 3: binom(3, 1) linear orders
        let face = Face { left: vec![10, 11, 12, 13], right: vec![10, 20, 13] };
        let ms = face_extensions(&face);
        assert_eq!(ms.len(), 3);
        let mut trees = BTreeSet::new();
        for m in &ms {
            let t = merged_to_tree(&face, m).unwrap();
            assert_eq!(&tree_to_merged(&face, &t).unwrap(), m);
            trees.insert(t);
        }
        assert_eq!(trees.into_iter().collect::<Vec<_>>(), enumerate_noncrossing_trees(2, 3).unwrap());
        let face = Face { left: vec![1, 2, 3, 4], right: vec![1, 5, 6, 4] };
        assert_eq!(face_extensions(&face).len(), 6);
    }

    #[test]
    fn gt_full_subdivision() {
        for lam in [vec![2, 1, 0], vec![3, 1, 0], vec![3, 2, 1, 0]] {
            let me = crate::transform::gt_embedding(&p(&lam)).unwrap();
            let r = full_subdivision_check(&me, None).unwrap();
            let vol = crate::gt::gt_volume_product(&p(&lam));
            assert_eq!(r.volume, crate::combinatorics::format_rational(&vol));
        }
        // equal parts leave a source with netflow zero
        let me = crate::transform::gt_embedding(&p(&[2, 1, 1, 0])).unwrap();
        assert!(matches!(full_subdivision_check(&me, None), Err(crate::Error::Precondition(_))));
    }

    #[test]
    fn face_order_does_not_matter() {
        let me = crate::transform::gt_embedding(&p(&[3, 2, 1, 0])).unwrap();
        let a = full_subdivision_check(&me, None).unwrap();
        let mut rev = a.faces.clone();
        rev.reverse();
        let b = full_subdivision_check(&me, Some(&rev)).unwrap();
        assert_eq!((a.cells, &a.volume), (b.cells, &b.volume));
    }

    #[test]
    fn replaced_faces_subdivide_volume() {
        let me = crate::transform::gt_embedding(&p(&[3, 2, 1, 0])).unwrap();
        let ps = paired_subdivision(&me, None).unwrap();
        let f = ps.order[0];
        let parts = subdivide_marked_face(&me, f).unwrap();
        assert_eq!(parts.len(), gamma_cells(&me, f).unwrap().len());
        let total: Rational = parts.iter().map(|q| q.marked_volume().unwrap()).sum();
        assert_eq!(total, me.embedding().base().marked_volume().unwrap());
    }

    #[test]
    fn gt_extension_bijection() {
        for lam in [vec![2, 1, 0], vec![3, 2, 1, 0]] {
            let me = crate::transform::gt_embedding(&p(&lam)).unwrap();
            for (a, direct, kost, leaves) in extension_identity(&me, 3).unwrap() {
                assert_eq!(direct, kost, "{a:?}");
                assert_eq!(direct, crate::combinatorics::int(leaves as i64), "{a:?}");
            }
        }
    }
}
