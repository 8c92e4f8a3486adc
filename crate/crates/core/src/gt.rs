//! Gelfand-Tsetlin patterns, the network `G_λ`, the volume and point-count
//! formulas for `GT(λ)`, and the bijection between shifted standard
//! tableaux and flows on `G_λ`.
//!
//! Pattern entries are `x(i, j)` for `1 <= i <= j <= n`, with the top row
//! `x(1, j) = λ_j` and interlacing `x(i-1, j-1) >= x(i, j) >= x(i-1, j)`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    binomial, compositions_with_bounds, count_n, dominance_geq, enumerate_compositions,
    power_over_factorial, rat_int, Integer, Partition, Rational, ShiftedTableau, WeakComposition,
};
use crate::error::{arg, Result};
use crate::flow::{FlowNetwork, IntegerFlow, Kostant};

/// An integral Gelfand-Tsetlin pattern; `rows[i-1]` holds `x(i, i..=n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GtPattern {
    rows: Vec<Vec<i64>>,
}

impl GtPattern {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n - i {
                return arg(format!("pattern row {} has length {}", i + 1, row.len()));
            }
        }
        let p = GtPattern { rows };
        for i in 2..=n {
            for j in i..=n {
                let x = p.get(i, j);
                if x > p.get(i - 1, j - 1) || x < p.get(i - 1, j) {
                    return arg(format!("entry ({i},{j}) breaks interlacing"));
                }
            }
        }
        if p.rows.iter().flatten().any(|&x| x < 0) {
            return arg("pattern has a negative entry");
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i - 1][j - i]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn top(&self) -> &[i64] {
        &self.rows[0]
    }
}

impl fmt::Display for GtPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "{}", rows.join(" / "))
    }
}

/// All integral patterns with top row `λ`.
pub fn enumerate_gt_points(lambda: &Partition) -> Vec<GtPattern> {
    let n = lambda.len();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut rows = vec![lambda.parts().to_vec()];
    fn next_row(rows: &mut Vec<Vec<i64>>, n: usize, cur: &mut Vec<i64>, out: &mut Vec<GtPattern>) {
        let prev = rows.last().unwrap().clone();
        let len = prev.len() - 1;
        if cur.len() == len {
            if len == 0 {
                out.push(GtPattern { rows: rows.clone() });
                return;
            }
            rows.push(cur.clone());
            next_row(rows, n, &mut Vec::new(), out);
            rows.pop();
            return;
        }
        let k = cur.len();
        // x(i, j) lies between prev[k+1] and prev[k]
        for v in prev[k + 1]..=prev[k] {
            cur.push(v);
            next_row(rows, n, cur, out);
            cur.pop();
        }
    }
    next_row(&mut rows, n, &mut Vec::new(), &mut out);
    out
}

fn lambda_factor_product(lambda: &Partition, shift: bool) -> Rational {
    let l = lambda.parts();
    let n = l.len();
    let mut p = Rational::one();
    for i in 0..n {
        for j in i + 1..n {
            let d = (j - i) as i64;
            let num = l[i] - l[j] + if shift { d } else { 0 };
            p *= Rational::new(BigInt::from(num), BigInt::from(d));
        }
    }
    p
}

/// Weyl's dimension product.
pub fn weyl_dimension(lambda: &Partition) -> Integer {
    lambda_factor_product(lambda, true).to_integer()
}

/// Volume of `GT(λ)` as a product over pairs of parts.
pub fn gt_volume_product(lambda: &Partition) -> Rational {
    lambda_factor_product(lambda, false)
}

fn gaps(lambda: &Partition) -> Vec<i64> {
    lambda.parts().windows(2).map(|w| w[0] - w[1]).collect()
}

/// Volume of `GT(λ)` as a sum over diagonal gap vectors of shifted
/// standard tableaux.
pub fn gt_volume_shsyt(lambda: &Partition) -> Result<Rational> {
    let n = lambda.len();
    if n <= 1 {
        return Ok(Rational::one());
    }
    let g = gaps(lambda);
    let total = (n * (n - 1) / 2) as i64;
    let mut sum = Rational::zero();
    for b in enumerate_compositions(total, n - 1, &WeakComposition::zeros(n - 1)) {
        let b = b.parts();
        let count = count_n(n, b)?;
        if count.is_zero() {
            continue;
        }
        let mut term = Rational::from_integer(count);
        for (gap, &e) in g.iter().zip(b) {
            term *= power_over_factorial(&rat_int(*gap), e as u32);
        }
        sum += term;
    }
    Ok(sum)
}

/// Vertex of `G_λ`, named by its double index.
pub type GtVertex = (usize, usize);

/// Role of an edge of `G_λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GtEdge {
    /// `v(i,j) -> v(i+1,j)`, flow `a(i,j)`
    A(usize, usize),
    /// `v(i,j) -> v(i+1,j+1)`, flow `b(i,j)`
    B(usize, usize),
    /// `v(i,i-1) -> v(i+1,i)`
    Left(usize),
    /// `v(i,n+1) -> v(i+1,n+1)`
    Right(usize),
}

/// `G_λ` with its canonical vertex order and named vertices and edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GtNetwork {
    pub lambda: Partition,
    pub vertices: Vec<GtVertex>,
    pub edge_roles: Vec<GtEdge>,
    pub network: FlowNetwork,
}

impl GtNetwork {
    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn vertex_index(&self, v: GtVertex) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }

    pub fn edge_index(&self, e: GtEdge) -> Option<usize> {
        self.edge_roles.iter().position(|&x| x == e)
    }

    pub fn vertex_name(&self, k: usize) -> String {
        let (i, j) = self.vertices[k];
        format!("v{i},{j}")
    }

    /// Number of vertices in the first group (the `v(i,j)` with `i <= j`).
    pub fn first_group_len(&self) -> usize {
        let n = self.n();
        n * (n - 1) / 2
    }
}

/// Canonical vertex list: `v(i,j)` for `2 <= i <= j <= n` lexicographically,
/// then `v(i,i-1)` for `3 <= i <= n+1`, then `v(i,n+1)` for `3 <= i <= n+1`,
/// then the sink `v(n+2,n+1)`.
fn canonical_vertices(n: usize) -> Vec<GtVertex> {
    let mut v = Vec::new();
    for i in 2..=n {
        for j in i..=n {
            v.push((i, j));
        }
    }
    for i in 3..=n + 1 {
        v.push((i, i - 1));
    }
    for i in 3..=n + 1 {
        v.push((i, n + 1));
    }
    v.push((n + 2, n + 1));
    v
}

/// Builds `G_λ` with its default netflow.
pub fn build_g_lambda(lambda: &Partition) -> Result<GtNetwork> {
    let n = lambda.len();
    if n == 0 {
        return arg("partition must have at least one part");
    }
    let vertices = canonical_vertices(n);
    let index: HashMap<GtVertex, usize> =
        vertices.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut roles = Vec::new();
    for &(i, j) in &vertices {
        if 2 <= i && i <= j && j <= n {
            roles.push(GtEdge::A(i, j));
            roles.push(GtEdge::B(i, j));
        } else if j + 1 == i && i <= n + 1 {
            roles.push(GtEdge::Left(i));
        } else if j == n + 1 && i <= n + 1 {
            roles.push(GtEdge::Right(i));
        }
    }
    let edges = roles
        .iter()
        .map(|&r| {
            let (t, h) = match r {
                GtEdge::A(i, j) => ((i, j), (i + 1, j)),
                GtEdge::B(i, j) => ((i, j), (i + 1, j + 1)),
                GtEdge::Left(i) => ((i, i - 1), (i + 1, i)),
                GtEdge::Right(i) => ((i, n + 1), (i + 1, n + 1)),
            };
            (index[&t], index[&h])
        })
        .collect();
    let l = lambda.parts();
    let mut netflow = vec![0i64; vertices.len()];
    for j in 2..=n {
        netflow[index[&(2, j)]] = l[j - 2] - l[j - 1];
    }
    *netflow.last_mut().unwrap() = l[n - 1] - l[0];
    let network = FlowNetwork::new(vertices.len(), edges, netflow)?;
    Ok(GtNetwork { lambda: lambda.clone(), vertices, edge_roles: roles, network })
}

/// Volume of `GT(λ)` by the Lidskii sum on `G_λ`: compositions `j` supported
/// on the `n-1` source vertices, weighted by Kostant values at
/// `(j_1-1, …, j_{n-1}-1, -1, …, -1, 0, …, 0)`.
pub fn gt_volume_lidskii(lambda: &Partition) -> Result<Rational> {
    let n = lambda.len();
    if n < 2 {
        return arg("needs at least two parts");
    }
    let g = build_g_lambda(lambda)?;
    let first = g.first_group_len();
    let r = g.vertices.len() - 1;
    let gaps = gaps(lambda);
    let mut out = vec![0i64; r];
    out[..first].fill(1);
    let mut upper = vec![0i64; r];
    for (u, gap) in upper.iter_mut().zip(&gaps) {
        *u = if *gap == 0 { 0 } else { i64::MAX };
    }
    let total = (g.network.edges().len() - r) as i64;
    let mut k = Kostant::new(&g.network);
    let mut sum = Rational::zero();
    for j in compositions_with_bounds(total, &out, &upper) {
        let j = j.parts();
        let mut arg_vec: Vec<i64> = j.iter().zip(&out).map(|(a, o)| a - o).collect();
        arg_vec.push(0);
        let kv = k.count(&arg_vec)?;
        if kv.is_zero() {
            continue;
        }
        let mut term = Rational::from_integer(kv);
        for (gap, &e) in gaps.iter().zip(j) {
            term *= power_over_factorial(&rat_int(*gap), e as u32);
        }
        sum += term;
    }
    Ok(sum)
}

/// Lattice-point count of `GT(λ)` by the binomial Lidskii sum on `G_λ`.
pub fn gt_points_lidskii(lambda: &Partition) -> Result<Integer> {
    let n = lambda.len();
    if n < 2 {
        return arg("needs at least two parts");
    }
    let g = build_g_lambda(lambda)?;
    let first = g.first_group_len();
    let r = g.vertices.len() - 1;
    let gaps = gaps(lambda);
    let mut out = vec![0i64; r];
    out[..first].fill(1);
    // binom(gap+1, j), binom(1, j), binom(0, j)
    let mut tops = vec![0i64; r];
    tops[..first].fill(1);
    for (t, gap) in tops.iter_mut().zip(&gaps) {
        *t = gap + 1;
    }
    let total = (g.network.edges().len() - r) as i64;
    let mut k = Kostant::new(&g.network);
    let mut sum = BigInt::zero();
    for j in compositions_with_bounds(total, &out, &tops) {
        let j = j.parts();
        debug_assert!(dominance_geq(j, &out).unwrap());
        let mut arg_vec: Vec<i64> = j.iter().zip(&out).map(|(a, o)| a - o).collect();
        arg_vec.push(0);
        let kv = k.count(&arg_vec)?;
        if kv.is_zero() {
            continue;
        }
        let mut term = kv;
        for (t, &e) in tops.iter().zip(j) {
            term *= binomial(*t, e);
        }
        sum += term;
    }
    Ok(sum)
}

/// Flow on `G_λ` from a pattern: `a(i,j) = x(i-1,j-1) - x(i,j)`,
/// `b(i,j) = x(i,j) - x(i-1,j)`, boundary edges carry the slack to `λ_1`
/// and `λ_n`.
pub fn gt_to_flow(g: &GtNetwork, x: &GtPattern) -> Result<IntegerFlow> {
    let n = g.n();
    if x.n() != n || x.top() != g.lambda.parts() {
        return arg("pattern does not have top row λ");
    }
    let l = g.lambda.parts();
    let f = g
        .edge_roles
        .iter()
        .map(|&r| match r {
            GtEdge::A(i, j) => x.get(i - 1, j - 1) - x.get(i, j),
            GtEdge::B(i, j) => x.get(i, j) - x.get(i - 1, j),
            GtEdge::Left(i) => l[0] - x.get(i - 1, i - 1),
            GtEdge::Right(i) => x.get(i - 1, n) - l[n - 1],
        })
        .collect();
    Ok(f)
}

/// Inverse of [`gt_to_flow`]: `x(i,j) = x(i-1,j) + b(i,j)`.
pub fn flow_to_gt(g: &GtNetwork, f: &[i64]) -> Result<GtPattern> {
    if !g.network.is_flow(f, g.network.netflow()) {
        return arg("not a flow on G_λ with its default netflow");
    }
    let n = g.n();
    let mut rows = vec![g.lambda.parts().to_vec()];
    for i in 2..=n {
        let prev = rows[i - 2].clone();
        let row = (i..=n)
            .map(|j| prev[j - (i - 1)] + f[g.edge_index(GtEdge::B(i, j)).unwrap()])
            .collect();
        rows.push(row);
    }
    GtPattern::new(rows)
}

/// Netflow `(b_1-1, …, b_{n-1}-1, -1, …, -1, 0, …, 0)` on `G_λ`'s vertices.
pub fn shsyt_netflow(n: usize, b: &[i64]) -> Result<Vec<i64>> {
    if n < 1 || b.len() + 1 != n {
        return arg(format!("need {} gaps", n.saturating_sub(1)));
    }
    let verts = canonical_vertices(n);
    Ok(verts
        .iter()
        .map(|&(i, j)| {
            if i == 2 && j <= n {
                b[j - 2] - 1
            } else if i <= j && j <= n {
                -1
            } else {
                0
            }
        })
        .collect())
}

/// The shape network of `G_λ` for side `n` (netflow irrelevant; zero).
pub fn g_lambda_shape(n: usize) -> Result<GtNetwork> {
    build_g_lambda(&Partition::new(vec![0; n])?)
}

/// Flow on `G_λ` read off from a shifted tableau by counting entries in
/// the windows between neighbouring cells.
pub fn shsyt_to_flow(t: &ShiftedTableau) -> Result<(GtNetwork, IntegerFlow)> {
    t.validate()?;
    let n = t.side();
    let g = g_lambda_shape(n)?;
    let mut f = vec![0i64; g.edge_roles.len()];
    let cells: Vec<(usize, usize, u32)> = (1..=n)
        .flat_map(|i| (i..=n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, t.get(i, j)))
        .collect();
    for j in 2..=n {
        for i in 1..j {
            let (lo, hi) = (t.get(i, j - 1), t.get(i, j));
            let a = cells
                .iter()
                .filter(|&&(ii, jj, v)| lo < v && v < hi && ii < i && jj >= j)
                .count() as i64;
            let (lo, hi) = (t.get(i, j), t.get(i + 1, j));
            let b = cells
                .iter()
                .filter(|&&(ii, jj, v)| lo < v && v < hi && ii <= i && jj > j)
                .count() as i64;
            let row = j - i + 1;
            f[g.edge_index(GtEdge::A(row, j)).unwrap()] = a;
            f[g.edge_index(GtEdge::B(row, j)).unwrap()] = b;
        }
    }
    Ok((g, f))
}

/// Inverse of [`shsyt_to_flow`]: strips the source row of `G_λ`, recurses
/// on the network for side `n-1`, shifts the entries of the smaller tableau
/// and attaches the prescribed diagonal.
pub fn flow_to_shsyt(n: usize, f: &[i64]) -> Result<ShiftedTableau> {
    if n == 0 {
        return arg("side must be at least 1");
    }
    let g = g_lambda_shape(n)?;
    if f.len() != g.edge_roles.len() {
        return arg(format!("flow has {} entries, G_λ has {} edges", f.len(), g.edge_roles.len()));
    }
    let mut a = HashMap::new();
    let mut b = HashMap::new();
    for (k, &r) in g.edge_roles.iter().enumerate() {
        match r {
            GtEdge::A(i, j) => {
                a.insert((i, j), f[k]);
            }
            GtEdge::B(i, j) => {
                b.insert((i, j), f[k]);
            }
            _ => {}
        }
    }
    let gaps: Vec<i64> = (2..=n).map(|j| a[&(2, j)] + b[&(2, j)] + 1).collect();
    let expected = shsyt_netflow(n, &gaps)?;
    if !g.network.is_flow(f, &expected) || gaps.iter().sum::<i64>() != (n * (n - 1) / 2) as i64 {
        return arg("flow does not have a tableau netflow");
    }
    let rows = tableau_rows(n, &a, &b);
    ShiftedTableau::from_rows(&rows)
}

fn tableau_rows(
    n: usize,
    a: &HashMap<(usize, usize), i64>,
    b: &HashMap<(usize, usize), i64>,
) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![1]];
    }
    let gaps: Vec<i64> = (2..=n).map(|j| a[&(2, j)] + b[&(2, j)] + 1).collect();
    let shift = |m: &HashMap<(usize, usize), i64>| -> HashMap<(usize, usize), i64> {
        m.iter()
            .filter(|(&(i, _), _)| i >= 3)
            .map(|(&(i, j), &v)| ((i - 1, j - 1), v))
            .collect()
    };
    let smaller = tableau_rows(n - 1, &shift(a), &shift(b));
    // entry e of the smaller tableau gains m when it lies in
    // (b_1+…+b_{m-1}, b_1+…+b_m]
    let mut cuts = Vec::with_capacity(n - 1);
    let mut acc = 0i64;
    for g in &gaps {
        acc += g;
        cuts.push(acc);
    }
    let bump = |e: u32| -> u32 {
        let m = cuts.iter().position(|&c| (e as i64) <= c).unwrap() + 1;
        e + m as u32
    };
    let mut rows = Vec::with_capacity(n);
    let mut diag = 1i64;
    for i in 0..n {
        let mut row = vec![diag as u32];
        if i < n - 1 {
            row.extend(smaller[i].iter().map(|&e| bump(e)));
            diag += gaps[i] + 1;
        }
        rows.push(row);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{count_ssyt, enumerate_shsyt, int, rat};

    fn p(v: &[i64]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn g_lambda_n2() {
        let g = build_g_lambda(&p(&[3, 1])).unwrap();
        assert_eq!(g.vertices, vec![(2, 2), (3, 2), (3, 3), (4, 3)]);
        assert_eq!(g.network.netflow(), &[2, 0, 0, -2]);
        assert_eq!(g.network.edges().len(), 4);
    }

    #[test]
    fn g_lambda_sizes() {
        for n in 1..=6usize {
            let g = g_lambda_shape(n).unwrap();
            let c2 = n * (n - 1) / 2;
            assert_eq!(g.vertices.len(), (n + 2) * (n + 1) / 2 - 2);
            // two edges per first-group vertex, one per boundary vertex
            assert_eq!(g.network.edges().len(), 2 * c2 + 2 * (n - 1));
        }
        let g = g_lambda_shape(1).unwrap();
        assert_eq!(g.vertices, vec![(3, 2)]);
        assert_eq!(g.network.kostant(&[0]).unwrap(), int(1));
    }

    #[test]
    fn formulas_for_210() {
        let l = p(&[2, 1, 0]);
        assert_eq!(gt_volume_product(&l), rat(1, 1));
        assert_eq!(gt_volume_shsyt(&l).unwrap(), rat(1, 1));
        assert_eq!(gt_volume_lidskii(&l).unwrap(), rat(1, 1));
        assert_eq!(weyl_dimension(&l), int(8));
        assert_eq!(gt_points_lidskii(&l).unwrap(), int(8));
        assert_eq!(enumerate_gt_points(&l).len(), 8);
        assert_eq!(count_ssyt(&p(&[2, 1]), 3).unwrap(), int(8));
    }

    #[test]
    fn small_formula_examples() {
        assert_eq!(gt_volume_lidskii(&p(&[3, 1, 0])).unwrap(), rat(3, 1));
        assert_eq!(gt_volume_product(&p(&[3, 1, 0])), rat(3, 1));
        assert_eq!(gt_volume_lidskii(&p(&[1, 0])).unwrap(), rat(1, 1));
        assert_eq!(gt_points_lidskii(&p(&[1, 0])).unwrap(), int(2));
        assert_eq!(gt_points_lidskii(&p(&[0, 0, 0])).unwrap(), int(1));
        assert_eq!(weyl_dimension(&p(&[5, 0])), int(6));
        assert_eq!(gt_volume_product(&p(&[2, 2, 0])), rat(0, 1));
        assert_eq!(gt_volume_shsyt(&p(&[1, 1, 1])).unwrap(), rat(0, 1));
        assert_eq!(enumerate_gt_points(&p(&[0, 0, 0, 0])).len(), 1);
    }

    #[test]
    fn pattern_flow_round_trip() {
        let l = p(&[3, 1, 1, 0]);
        let g = build_g_lambda(&l).unwrap();
        let pts = enumerate_gt_points(&l);
        let mut images = std::collections::HashSet::new();
        for x in &pts {
            let f = gt_to_flow(&g, x).unwrap();
            assert!(g.network.is_flow(&f, g.network.netflow()));
            assert_eq!(&flow_to_gt(&g, &f).unwrap(), x);
            images.insert(f);
        }
        assert_eq!(images.len(), pts.len());
        assert_eq!(g.network.kostant(g.network.netflow()).unwrap(), int(pts.len() as i64));
    }

    #[test]
    fn zero_pattern_gives_zero_flow() {
        let l = p(&[0, 0, 0]);
        let g = build_g_lambda(&l).unwrap();
        let x = &enumerate_gt_points(&l)[0];
        assert!(gt_to_flow(&g, x).unwrap().iter().all(|&v| v == 0));
    }

    #[test]
    fn tableau_flow_round_trip() {
        for n in 1..=5 {
            for t in enumerate_shsyt(n) {
                let (g, f) = shsyt_to_flow(&t).unwrap();
                let netflow = shsyt_netflow(n, &t.diagonal_gaps()).unwrap();
                assert!(g.network.is_flow(&f, &netflow), "{:?}", t.rows());
                for (k, r) in g.edge_roles.iter().enumerate() {
                    match *r {
                        GtEdge::A(i, j) if i == j => assert_eq!(f[k], 0),
                        GtEdge::B(_, j) if j == n => assert_eq!(f[k], 0),
                        _ => {}
                    }
                }
                assert_eq!(flow_to_shsyt(n, &f).unwrap(), t);
            }
        }
    }

    #[test]
    fn side_two_tableau() {
        let t = &enumerate_shsyt(2)[0];
        assert_eq!(t.diagonal(), vec![1, 3]);
        let (_, f) = shsyt_to_flow(t).unwrap();
        assert!(f.iter().all(|&v| v == 0));
    }
}
