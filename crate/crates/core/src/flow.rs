//! Flow networks on ordered vertices, integer flows, Kostant partition
//! functions and the Lidskii volume and lattice-point formulas.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    binomial, compositions_with_bounds, multiset_binomial, power_over_factorial, rat_int, Integer,
    Rational,
};
use crate::error::{arg, precondition, Result};

/// Flow values indexed like the network's edge list.
pub type IntegerFlow = Vec<i64>;

/// A loopless acyclic multigraph on vertices `0..vertex_count` whose edges
/// all point from a lower to a higher index, with an integer netflow.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "NetworkJson", into = "NetworkJson")]
pub struct FlowNetwork {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    netflow: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct NetworkJson {
    edges: Vec<[usize; 2]>,
    n: usize,
    netflow: Vec<i64>,
}

impl TryFrom<NetworkJson> for FlowNetwork {
    type Error = crate::Error;
    fn try_from(j: NetworkJson) -> Result<Self> {
        FlowNetwork::new(j.n, j.edges.iter().map(|e| (e[0], e[1])).collect(), j.netflow)
    }
}

impl From<FlowNetwork> for NetworkJson {
    fn from(g: FlowNetwork) -> Self {
        NetworkJson {
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            n: g.vertex_count,
            netflow: g.netflow,
        }
    }
}

impl FlowNetwork {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>, netflow: Vec<i64>) -> Result<Self> {
        if netflow.len() != vertex_count {
            return arg(format!(
                "netflow has length {}, expected {vertex_count}",
                netflow.len()
            ));
        }
        for &(a, b) in &edges {
            if a >= b || b >= vertex_count {
                return arg(format!("edge ({a},{b}) must satisfy tail < head < {vertex_count}"));
            }
        }
        if netflow.iter().sum::<i64>() != 0 {
            return arg("netflow does not sum to zero");
        }
        Ok(FlowNetwork { vertex_count, edges, netflow })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn netflow(&self) -> &[i64] {
        &self.netflow
    }

    pub fn with_netflow(&self, netflow: Vec<i64>) -> Result<Self> {
        FlowNetwork::new(self.vertex_count, self.edges.clone(), netflow)
    }

    /// Same network with netflow multiplied by `t`.
    pub fn dilate(&self, t: i64) -> Self {
        FlowNetwork {
            vertex_count: self.vertex_count,
            edges: self.edges.clone(),
            netflow: self.netflow.iter().map(|a| a * t).collect(),
        }
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == v).count()
    }

    /// Indices of edges leaving `v`, in edge-list order.
    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&k| self.edges[k].0 == v).collect()
    }

    /// Indices of edges entering `v`, in edge-list order.
    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&k| self.edges[k].1 == v).collect()
    }

    /// Number of connected components of the underlying undirected graph,
    /// isolated vertices included.
    pub fn component_count(&self) -> usize {
        self.components().iter().max().map_or(0, |m| m + 1)
    }

    /// Component id per vertex, numbered by first appearance.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut ids = HashMap::new();
        (0..self.vertex_count)
            .map(|v| {
                let r = find(&mut parent, v);
                let next = ids.len();
                *ids.entry(r).or_insert(next)
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Dimension of the flow polytope when every edge can carry positive
    /// flow: `|E| - |V| + #components`.
    pub fn generic_dimension(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertex_count
    }

    /// Relabels vertices by `perm[old] = new`; fails if an edge would point
    /// backwards.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.vertex_count {
            return arg("permutation length does not match vertex count");
        }
        let mut seen = vec![false; self.vertex_count];
        for &p in perm {
            if p >= self.vertex_count || seen[p] {
                return arg("not a permutation");
            }
            seen[p] = true;
        }
        let mut netflow = vec![0; self.vertex_count];
        for (v, &a) in self.netflow.iter().enumerate() {
            netflow[perm[v]] = a;
        }
        let edges = self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        FlowNetwork::new(self.vertex_count, edges, netflow)
    }

    /// Same network with the edge list permuted: new edge `k` is old edge
    /// `order[k]`.
    pub fn reorder_edges(&self, order: &[usize]) -> Self {
        FlowNetwork {
            vertex_count: self.vertex_count,
            edges: order.iter().map(|&k| self.edges[k]).collect(),
            netflow: self.netflow.clone(),
        }
    }

    /// Checks nonnegativity and conservation for `f` against netflow `b`.
    pub fn is_flow(&self, f: &[i64], b: &[i64]) -> bool {
        if f.len() != self.edges.len() || b.len() != self.vertex_count || f.iter().any(|&x| x < 0) {
            return false;
        }
        let mut excess = b.to_vec();
        for (k, &(a, h)) in self.edges.iter().enumerate() {
            excess[a] -= f[k];
            excess[h] += f[k];
        }
        excess.iter().all(|&e| e == 0)
    }

    fn check_netflow_len(&self, b: &[i64]) -> Result<()> {
        if b.len() != self.vertex_count {
            return arg(format!(
                "netflow vector has length {}, expected {}",
                b.len(),
                self.vertex_count
            ));
        }
        Ok(())
    }

    /// All integer flows with netflow `b`, by assigning out-edges vertex by
    /// vertex in index order.
    pub fn enumerate_integer_flows(&self, b: &[i64]) -> Result<Vec<IntegerFlow>> {
        self.check_netflow_len(b)?;
        let mut out = Vec::new();
        if b.iter().sum::<i64>() != 0 {
            return Ok(out);
        }
        let outs: Vec<Vec<usize>> = (0..self.vertex_count).map(|v| self.out_edges(v)).collect();
        let mut f = vec![0i64; self.edges.len()];
        let mut pending = b.to_vec();
        self.flows_rec(0, &outs, &mut pending, &mut f, &mut out);
        Ok(out)
    }

    fn flows_rec(
        &self,
        v: usize,
        outs: &[Vec<usize>],
        pending: &mut Vec<i64>,
        f: &mut Vec<i64>,
        out: &mut Vec<IntegerFlow>,
    ) {
        if v == self.vertex_count {
            out.push(f.clone());
            return;
        }
        let total = pending[v];
        if total < 0 || (outs[v].is_empty() && total != 0) {
            return;
        }
        self.distribute(v, 0, total, outs, pending, f, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn distribute(
        &self,
        v: usize,
        k: usize,
        left: i64,
        outs: &[Vec<usize>],
        pending: &mut Vec<i64>,
        f: &mut Vec<i64>,
        out: &mut Vec<IntegerFlow>,
    ) {
        let edges = &outs[v];
        if k == edges.len() {
            if left == 0 {
                self.flows_rec(v + 1, outs, pending, f, out);
            }
            return;
        }
        let e = edges[k];
        let head = self.edges[e].1;
        let lo = if k + 1 == edges.len() { left } else { 0 };
        for x in lo..=left {
            f[e] = x;
            pending[head] += x;
            self.distribute(v, k + 1, left - x, outs, pending, f, out);
            pending[head] -= x;
        }
        f[e] = 0;
    }

    /// `K_G(b)`, the number of integer flows with netflow `b`.
    pub fn kostant(&self, b: &[i64]) -> Result<Integer> {
        Kostant::new(self).count(b)
    }

    fn lidskii_setup(&self) -> Result<(usize, Vec<i64>)> {
        let n = self.vertex_count;
        if n == 0 {
            return precondition("network has no vertices");
        }
        if !self.is_connected() {
            return precondition("network is not connected");
        }
        let mut out = Vec::with_capacity(n - 1);
        for v in 0..n - 1 {
            if self.netflow[v] < 0 {
                return precondition(format!("vertex {v} has negative netflow"));
            }
            let d = self.out_degree(v);
            if d == 0 {
                return precondition(format!("vertex {v} has no outgoing edge"));
            }
            out.push(d as i64 - 1);
        }
        Ok((n - 1, out))
    }

    /// Volume of the flow polytope by the Lidskii formula.
    pub fn lidskii_volume(&self) -> Result<Rational> {
        let (n, out) = self.lidskii_setup()?;
        if n == 0 {
            return Ok(Rational::one());
        }
        let total = self.edges.len() as i64 - n as i64;
        let upper: Vec<i64> = (0..n)
            .map(|i| if self.netflow[i] == 0 { 0 } else { i64::MAX })
            .collect();
        let mut k = Kostant::new(self);
        let mut sum = Rational::zero();
        for j in compositions_with_bounds(total, &out, &upper) {
            let j = j.parts();
            let kv = k.count(&shifted(j, &out))?;
            if kv.is_zero() {
                continue;
            }
            let mut term = Rational::from_integer(kv);
            for i in 0..n {
                term *= power_over_factorial(&rat_int(self.netflow[i]), j[i] as u32);
            }
            sum += term;
        }
        Ok(sum)
    }

    /// Lattice-point count by the binomial form of the Lidskii formula.
    pub fn lidskii_points_binomial(&self) -> Result<Integer> {
        let (n, out) = self.lidskii_setup()?;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let total = self.edges.len() as i64 - n as i64;
        let upper: Vec<i64> = (0..n).map(|i| self.netflow[i] + out[i]).collect();
        let mut k = Kostant::new(self);
        let mut sum = BigInt::zero();
        for j in compositions_with_bounds(total, &out, &upper) {
            let j = j.parts();
            let kv = k.count(&shifted(j, &out))?;
            if kv.is_zero() {
                continue;
            }
            let mut term = kv;
            for i in 0..n {
                term *= binomial(self.netflow[i] + out[i], j[i]);
            }
            sum += term;
        }
        Ok(sum)
    }

    /// Lattice-point count by the multiset-binomial form of the Lidskii
    /// formula.
    pub fn lidskii_points_multiset(&self) -> Result<Integer> {
        let (n, out) = self.lidskii_setup()?;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let total = self.edges.len() as i64 - n as i64;
        let upper = vec![i64::MAX; n];
        let mut k = Kostant::new(self);
        let mut sum = BigInt::zero();
        for j in compositions_with_bounds(total, &out, &upper) {
            let j = j.parts();
            let kv = k.count(&shifted(j, &out))?;
            if kv.is_zero() {
                continue;
            }
            let mut term = kv;
            for i in 0..n {
                let in_i = self.in_degree(i) as i64 - 1;
                term *= multiset_binomial(self.netflow[i] - in_i, j[i]);
            }
            sum += term;
        }
        Ok(sum)
    }

    /// Volume of a fully reduced network: each component is a product of
    /// dilated simplices, one per source (single sink) or one per sink
    /// (single source). Edges at zero-netflow vertices carry no flow and are
    /// ignored.
    pub fn leaf_volume(&self) -> Result<Rational> {
        for v in 0..self.vertex_count {
            if self.netflow[v] == 0 && self.in_degree(v) > 0 && self.out_degree(v) > 0 {
                return precondition(format!(
                    "vertex {v} has zero netflow with incoming and outgoing edges"
                ));
            }
        }
        let live: Vec<(usize, usize)> = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| self.netflow[a] != 0 && self.netflow[b] != 0)
            .collect();
        let core = FlowNetwork {
            vertex_count: self.vertex_count,
            edges: live,
            netflow: self.netflow.clone(),
        };
        let comp = core.components();
        let count = comp.iter().max().map_or(0, |m| m + 1);
        let mut vol = Rational::one();
        for c in 0..count {
            let members: Vec<usize> = (0..self.vertex_count).filter(|&v| comp[v] == c).collect();
            if members.len() == 1 {
                if self.netflow[members[0]] != 0 {
                    return Ok(Rational::zero());
                }
                continue;
            }
            let sources: Vec<usize> =
                members.iter().copied().filter(|&v| self.netflow[v] > 0).collect();
            let sinks: Vec<usize> =
                members.iter().copied().filter(|&v| self.netflow[v] < 0).collect();
            for &v in &members {
                if self.netflow[v] > 0 && core.in_degree(v) > 0 {
                    return precondition(format!("source {v} has incoming edges"));
                }
                if self.netflow[v] < 0 && core.out_degree(v) > 0 {
                    return precondition(format!("sink {v} has outgoing edges"));
                }
            }
            let (side, degree): (Vec<usize>, fn(&FlowNetwork, usize) -> usize) =
                if sinks.len() == 1 {
                    (sources, FlowNetwork::out_degree)
                } else if sources.len() == 1 {
                    (sinks, FlowNetwork::in_degree)
                } else {
                    return precondition(format!(
                        "component with {} sources and {} sinks is not a product of simplices",
                        sources.len(),
                        sinks.len()
                    ));
                };
            for v in side {
                let d = degree(&core, v) as u32;
                vol *= power_over_factorial(&rat_int(self.netflow[v].abs()), d - 1);
            }
        }
        Ok(vol)
    }
}

fn shifted(j: &[i64], out: &[i64]) -> Vec<i64> {
    let mut b: Vec<i64> = j.iter().zip(out).map(|(a, o)| a - o).collect();
    b.push(0);
    b
}

/// Memoized Kostant partition function of one network. The state after
/// processing vertices `< i` is the vector of outflow still owed by
/// vertices `>= i`, so a memo table serves every netflow vector.
pub struct Kostant<'a> {
    g: &'a FlowNetwork,
    /// per vertex: distinct heads with edge multiplicities
    targets: Vec<Vec<(usize, usize)>>,
    memo: HashMap<(usize, Vec<i64>), Integer>,
}

impl<'a> Kostant<'a> {
    pub fn new(g: &'a FlowNetwork) -> Self {
        let mut targets = vec![Vec::<(usize, usize)>::new(); g.vertex_count];
        for &(a, b) in &g.edges {
            match targets[a].iter_mut().find(|t| t.0 == b) {
                Some(t) => t.1 += 1,
                None => targets[a].push((b, 1)),
            }
        }
        for t in &mut targets {
            t.sort_unstable();
        }
        Kostant { g, targets, memo: HashMap::new() }
    }

    pub fn count(&mut self, b: &[i64]) -> Result<Integer> {
        self.g.check_netflow_len(b)?;
        if b.is_empty() || b.iter().sum::<i64>() != 0 {
            return Ok(BigInt::zero());
        }
        Ok(self.rec(0, b.to_vec()))
    }

    fn rec(&mut self, i: usize, owed: Vec<i64>) -> Integer {
        let o = owed[0];
        if o < 0 {
            return BigInt::zero();
        }
        if owed.len() == 1 {
            return if o == 0 { BigInt::one() } else { BigInt::zero() };
        }
        if self.targets[i].is_empty() {
            return if o == 0 { self.rec(i + 1, owed[1..].to_vec()) } else { BigInt::zero() };
        }
        let key = (i, owed);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut rest = key.1[1..].to_vec();
        let targets = self.targets[i].clone();
        let mut total = BigInt::zero();
        self.spread(i, &targets, 0, o, BigInt::one(), &mut rest, &mut total);
        self.memo.insert(key, total.clone());
        total
    }

    #[allow(clippy::too_many_arguments)]
    fn spread(
        &mut self,
        i: usize,
        targets: &[(usize, usize)],
        k: usize,
        left: i64,
        weight: Integer,
        rest: &mut Vec<i64>,
        total: &mut Integer,
    ) {
        let (head, mult) = targets[k];
        let slot = head - i - 1;
        let last = k + 1 == targets.len();
        let lo = if last { left } else { 0 };
        for d in lo..=left {
            let w = &weight * multiset_binomial(mult as i64, d);
            rest[slot] += d;
            if last {
                let sub = self.rec(i + 1, rest.clone());
                *total += w * sub;
            } else {
                self.spread(i, targets, k + 1, left - d, w, rest, total);
            }
            rest[slot] -= d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{int, rat};

    fn triangle(b: Vec<i64>) -> FlowNetwork {
        FlowNetwork::new(3, vec![(0, 1), (1, 2), (0, 2)], b).unwrap()
    }

    #[test]
    fn triangle_counts() {
        let g = triangle(vec![1, 0, -1]);
        assert_eq!(g.enumerate_integer_flows(&[1, 0, -1]).unwrap().len(), 2);
        assert_eq!(g.kostant(&[1, 0, -1]).unwrap(), int(2));
        assert_eq!(g.kostant(&[2, 0, -2]).unwrap(), int(3));
        assert_eq!(g.kostant(&[0, 0, 0]).unwrap(), int(1));
        assert_eq!(g.lidskii_points_binomial().unwrap(), int(2));
        assert_eq!(g.lidskii_points_multiset().unwrap(), int(2));
        assert_eq!(g.lidskii_volume().unwrap(), rat(1, 1));
    }

    #[test]
    fn zero_netflow_has_only_zero_flow() {
        let g = triangle(vec![0, 0, 0]);
        let flows = g.enumerate_integer_flows(&[0, 0, 0]).unwrap();
        assert_eq!(flows, vec![vec![0, 0, 0]]);
        assert_eq!(g.lidskii_points_binomial().unwrap(), int(1));
        assert_eq!(g.lidskii_volume().unwrap(), rat(0, 1));
    }

    #[test]
    fn path_has_one_flow() {
        let g = FlowNetwork::new(3, vec![(0, 1), (1, 2)], vec![1, 0, -1]).unwrap();
        assert_eq!(g.enumerate_integer_flows(&[1, 0, -1]).unwrap(), vec![vec![1, 1]]);
    }

    #[test]
    fn simplex_volume() {
        // three parallel edges: 4 * simplex of dimension 2
        let g = FlowNetwork::new(2, vec![(0, 1); 3], vec![4, -4]).unwrap();
        assert_eq!(g.lidskii_volume().unwrap(), rat(8, 1));
        assert_eq!(g.leaf_volume().unwrap(), rat(8, 1));
        assert_eq!(g.kostant(&[4, -4]).unwrap(), int(15));
    }

    #[test]
    fn leaf_volume_examples() {
        let g = FlowNetwork::new(2, vec![(0, 1); 2], vec![3, -3]).unwrap();
        assert_eq!(g.leaf_volume().unwrap(), rat(3, 1));
        let g = FlowNetwork::new(3, vec![(0, 2), (0, 2), (1, 2), (1, 2), (1, 2)], vec![2, 1, -3])
            .unwrap();
        assert_eq!(g.leaf_volume().unwrap(), rat(1, 1));
        let g = triangle(vec![1, 0, -1]);
        assert!(g.leaf_volume().is_err());
    }

    #[test]
    fn lidskii_rejects_vertex_without_out_edge() {
        let g = FlowNetwork::new(3, vec![(0, 2), (1, 2)], vec![1, 0, -1]).unwrap();
        assert!(g.lidskii_volume().is_ok());
        let g = FlowNetwork::new(3, vec![(0, 1), (0, 2)], vec![2, -1, -1]).unwrap();
        let err = g.lidskii_volume().unwrap_err().to_string();
        assert!(err.contains("vertex 1"), "{err}");
    }

    #[test]
    fn json_round_trip() {
        let g = triangle(vec![1, 0, -1]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"edges":[[0,1],[1,2],[0,2]],"n":3,"netflow":[1,0,-1]}"#);
        let back: FlowNetwork = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<FlowNetwork>(r#"{"edges":[[1,0]],"n":2,"netflow":[0,0]}"#)
            .is_err());
    }
}
