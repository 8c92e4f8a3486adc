//! Exact arithmetic helpers and the elementary combinatorial objects used
//! throughout the crate: partitions, weak compositions, dominance order,
//! shifted standard tableaux and semistandard tableaux.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};

pub type Integer = BigInt;
/// Always canonical: lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn int(v: i64) -> Integer {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// Formats a rational as `p/q`, or `p` when integral.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| crate::Error::Argument(format!("bad rational {s:?}")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| crate::Error::Argument(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return arg(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(n, d))
}

/// Returns the rational as an `i64` when it is an integer that fits.
pub fn rational_to_i64(r: &Rational) -> Option<i64> {
    if !r.is_integer() {
        return None;
    }
    i64::try_from(r.numer()).ok()
}

pub fn factorial(n: u64) -> Integer {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `binom(n, k)` evaluated as a polynomial in `n`, so negative `n` is allowed.
/// Returns 0 for `k < 0`.
pub fn binomial(n: i64, k: i64) -> Integer {
    if k < 0 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    for t in 0..k {
        num *= BigInt::from(n - t);
    }
    num / factorial(k as u64)
}

/// `⟨n over k⟩ = binom(n + k - 1, k)`, the number of size-`k` multisets on
/// `n` letters, extended polynomially to negative `n`.
pub fn multiset_binomial(n: i64, k: i64) -> Integer {
    binomial(n + k - 1, k)
}

/// `base^exp / exp!` as an exact rational.
pub fn power_over_factorial(base: &Rational, exp: u32) -> Rational {
    let mut p = Rational::one();
    for _ in 0..exp {
        p *= base;
    }
    p / Rational::from_integer(factorial(exp as u64))
}

/// A weakly decreasing sequence of nonnegative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition(Vec<i64>);

impl Partition {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.iter().any(|&p| p < 0) {
            return arg(format!("partition {parts:?} has a negative part"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return arg(format!("partition {parts:?} is not weakly decreasing"));
        }
        Ok(Partition(parts))
    }

    /// Parses `"2,1,0"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Partition::new(Vec::new());
        }
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| crate::Error::Argument(format!("bad partition entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }

    pub fn parts(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every partition with `n` parts and largest part at most `max`.
    pub fn all_bounded(n: usize, max: i64) -> Vec<Partition> {
        fn rec(n: usize, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<Partition>) {
            if cur.len() == n {
                out.push(Partition(cur.clone()));
                return;
            }
            for v in (0..=cap).rev() {
                cur.push(v);
                rec(n, v, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, max, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// A finite sequence of nonnegative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeakComposition(Vec<i64>);

impl WeakComposition {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.iter().any(|&p| p < 0) {
            return arg(format!("composition {parts:?} has a negative part"));
        }
        Ok(WeakComposition(parts))
    }

    pub fn zeros(len: usize) -> Self {
        WeakComposition(vec![0; len])
    }

    pub fn parts(&self) -> &[i64] {
        &self.0
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Dominance order: every prefix sum of `j` is at least that of `o`.
pub fn dominance_geq(j: &[i64], o: &[i64]) -> Result<bool> {
    if j.len() != o.len() {
        return arg(format!(
            "dominance comparison of lengths {} and {}",
            j.len(),
            o.len()
        ));
    }
    let (mut sj, mut so) = (0i64, 0i64);
    for (a, b) in j.iter().zip(o) {
        sj += a;
        so += b;
        if sj < so {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Weak compositions of `total` into `parts` parts that dominate `at_least`,
/// listed in decreasing lexicographic order.
pub fn enumerate_compositions(
    total: i64,
    parts: usize,
    at_least: &WeakComposition,
) -> Vec<WeakComposition> {
    let bounds = vec![i64::MAX; parts];
    compositions_with_bounds(total, at_least.parts(), &bounds)
}

/// Same as [`enumerate_compositions`] with a per-part upper bound; the
/// dominance floor is pruned on prefix sums.
pub(crate) fn compositions_with_bounds(
    total: i64,
    at_least: &[i64],
    upper: &[i64],
) -> Vec<WeakComposition> {
    let parts = upper.len();
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(WeakComposition(Vec::new()));
        }
        return out;
    }
    let mut floor_prefix = Vec::with_capacity(parts);
    let mut acc = 0;
    for &v in at_least {
        acc += v;
        floor_prefix.push(acc);
    }
    // suffix capacity to prune branches that cannot reach `total`
    let mut cap_suffix = vec![0i64; parts + 1];
    for i in (0..parts).rev() {
        cap_suffix[i] = cap_suffix[i + 1].saturating_add(upper[i]);
    }
    fn rec(
        i: usize,
        remaining: i64,
        prefix: i64,
        floor: &[i64],
        upper: &[i64],
        cap: &[i64],
        cur: &mut Vec<i64>,
        out: &mut Vec<WeakComposition>,
    ) {
        let parts = upper.len();
        if i == parts {
            if remaining == 0 {
                out.push(WeakComposition(cur.clone()));
            }
            return;
        }
        if cap[i] < remaining {
            return;
        }
        let hi = remaining.min(upper[i]);
        for v in (0..=hi).rev() {
            if prefix + v < floor[i] {
                break;
            }
            cur.push(v);
            rec(i + 1, remaining - v, prefix + v, floor, upper, cap, cur, out);
            cur.pop();
        }
    }
    rec(
        0,
        total,
        0,
        &floor_prefix,
        upper,
        &cap_suffix,
        &mut Vec::with_capacity(parts),
        &mut out,
    );
    out
}

/// A shifted standard Young tableau of staircase shape with side `n`,
/// stored densely; `cell(i, j)` is defined for `1 <= i <= j <= n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShiftedTableau {
    side: usize,
    cells: Vec<u32>,
}

impl ShiftedTableau {
    /// Builds from rows: row `i` lists `T(i,i), T(i,i+1), …, T(i,n)`.
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let n = rows.len();
        let mut cells = vec![0u32; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n - i {
                return arg(format!("row {} has length {}, expected {}", i + 1, row.len(), n - i));
            }
            for (k, &v) in row.iter().enumerate() {
                cells[i * n + i + k] = v;
            }
        }
        let t = ShiftedTableau { side: n, cells };
        t.validate()?;
        Ok(t)
    }

    pub(crate) fn from_dense_unchecked(side: usize, cells: Vec<u32>) -> Self {
        ShiftedTableau { side, cells }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cell_count(&self) -> usize {
        self.side * (self.side + 1) / 2
    }

    /// `T(i, j)`, 1-indexed.
    pub fn get(&self, i: usize, j: usize) -> u32 {
        debug_assert!(1 <= i && i <= j && j <= self.side);
        self.cells[(i - 1) * self.side + (j - 1)]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        (1..=self.side)
            .map(|i| (i..=self.side).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn diagonal(&self) -> Vec<u32> {
        (1..=self.side).map(|i| self.get(i, i)).collect()
    }

    /// The `b` vector with `T(i,i) = i + b_1 + … + b_{i-1}`.
    pub fn diagonal_gaps(&self) -> Vec<i64> {
        let d = self.diagonal();
        d.windows(2).map(|w| w[1] as i64 - w[0] as i64 - 1).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.side;
        let total = self.cell_count();
        let mut seen = vec![false; total + 1];
        for i in 1..=n {
            for j in i..=n {
                let v = self.get(i, j) as usize;
                if v == 0 || v > total || seen[v] {
                    return arg(format!("entry {v} at ({i},{j}) is out of range or repeated"));
                }
                seen[v] = true;
                if j < n && self.get(i, j) >= self.get(i, j + 1) {
                    return arg(format!("row {i} does not increase at column {j}"));
                }
                if i < j && self.get(i, j) >= self.get(i + 1, j) {
                    return arg(format!("column {j} does not increase at row {i}"));
                }
            }
        }
        Ok(())
    }
}

/// Fills values `1, 2, …` in order; each value goes to a cell whose upper
/// and left neighbours are already filled. `diag` optionally prescribes the
/// diagonal entries.
fn shsyt_backtrack(
    n: usize,
    diag: Option<&[u32]>,
    visit: &mut dyn FnMut(&[u32]),
) {
    let total = n * (n + 1) / 2;
    let mut cells = vec![0u32; n * n];
    // fill[i] = number of filled cells in row i (0-indexed), cells are
    // (i, i), (i, i+1), … left to right
    let mut fill = vec![0usize; n];
    fn rec(
        v: u32,
        n: usize,
        total: usize,
        diag: Option<&[u32]>,
        cells: &mut Vec<u32>,
        fill: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[u32]),
    ) {
        if v as usize > total {
            visit(cells);
            return;
        }
        for i in 0..n {
            let j = i + fill[i];
            if j >= n {
                continue;
            }
            // cell above (i-1, j) must be filled
            if i > 0 && i - 1 + fill[i - 1] <= j {
                continue;
            }
            if let Some(d) = diag {
                if (j == i) != (d[i] == v) {
                    continue;
                }
            }
            cells[i * n + j] = v;
            fill[i] += 1;
            rec(v + 1, n, total, diag, cells, fill, visit);
            fill[i] -= 1;
            cells[i * n + j] = 0;
        }
    }
    rec(1, n, total, diag, &mut cells, &mut fill, visit);
}

/// All shifted standard tableaux of staircase shape with side `n`.
pub fn enumerate_shsyt(n: usize) -> Vec<ShiftedTableau> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    shsyt_backtrack(n, None, &mut |cells| {
        out.push(ShiftedTableau::from_dense_unchecked(n, cells.to_vec()))
    });
    out
}

/// `N(b_1, …, b_{n-1})`: shifted standard tableaux of side `n` with
/// `T(i,i) = i + b_1 + … + b_{i-1}`.
pub fn count_n(n: usize, b: &[i64]) -> Result<Integer> {
    if n == 0 {
        return arg("side must be at least 1");
    }
    if b.len() + 1 != n {
        return arg(format!("need {} gaps for side {n}, got {}", n - 1, b.len()));
    }
    if b.iter().any(|&x| x < 0) {
        return arg("gaps must be nonnegative");
    }
    let total = (n * (n + 1) / 2) as i64;
    let mut diag = Vec::with_capacity(n);
    let mut acc = 1i64;
    diag.push(1u32);
    for (i, &g) in b.iter().enumerate() {
        acc += g + 1;
        if acc > total {
            return Ok(BigInt::zero());
        }
        let _ = i;
        diag.push(acc as u32);
    }
    let mut count = BigInt::zero();
    shsyt_backtrack(n, Some(&diag), &mut |_| count += 1);
    Ok(count)
}

/// A semistandard Young tableau: rows weakly increase, columns strictly
/// increase, entries in `1..=alphabet`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemistandardTableau {
    pub shape: Partition,
    pub rows: Vec<Vec<u32>>,
}

/// Number of semistandard tableaux of `shape` over `[alphabet]`, by
/// cell-by-cell enumeration.
pub fn count_ssyt(shape: &Partition, alphabet: u32) -> Result<Integer> {
    let rows: Vec<usize> = shape.parts().iter().filter(|&&p| p > 0).map(|&p| p as usize).collect();
    if rows.len() > alphabet as usize {
        return Ok(BigInt::zero());
    }
    let cells: Vec<(usize, usize)> = rows
        .iter()
        .enumerate()
        .flat_map(|(i, &len)| (0..len).map(move |j| (i, j)))
        .collect();
    let mut grid: Vec<Vec<u32>> = rows.iter().map(|&l| vec![0; l]).collect();
    fn rec(k: usize, cells: &[(usize, usize)], grid: &mut Vec<Vec<u32>>, alphabet: u32) -> u64 {
        if k == cells.len() {
            return 1;
        }
        let (i, j) = cells[k];
        let lo_row = if j > 0 { grid[i][j - 1] } else { 1 };
        let lo_col = if i > 0 { grid[i - 1][j] + 1 } else { 1 };
        let lo = lo_row.max(lo_col);
        let mut total = 0;
        for v in lo..=alphabet {
            grid[i][j] = v;
            total += rec(k + 1, cells, grid, alphabet);
        }
        grid[i][j] = 0;
        total
    }
    Ok(BigInt::from(rec(0, &cells, &mut grid, alphabet)))
}

/// Memo-free helper used by tests and callers that want a histogram of
/// shifted tableaux by diagonal gap vector.
pub fn shsyt_by_gaps(n: usize) -> HashMap<Vec<i64>, Integer> {
    let mut out: HashMap<Vec<i64>, Integer> = HashMap::new();
    for t in enumerate_shsyt(n) {
        *out.entry(t.diagonal_gaps()).or_insert_with(BigInt::zero) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance_examples() {
        assert!(dominance_geq(&[2, 0, 1], &[1, 1, 1]).unwrap());
        assert!(!dominance_geq(&[0, 2], &[1, 1]).unwrap());
        assert!(dominance_geq(&[1, 1, 1], &[1, 1, 1]).unwrap());
        assert!(dominance_geq(&[1], &[1, 1]).is_err());
    }

    #[test]
    fn composition_examples() {
        let all = enumerate_compositions(2, 2, &WeakComposition::zeros(2));
        let got: Vec<Vec<i64>> = all.iter().map(|c| c.parts().to_vec()).collect();
        assert_eq!(got, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        let floor = WeakComposition::new(vec![1, 0]).unwrap();
        let got: Vec<Vec<i64>> = enumerate_compositions(1, 2, &floor)
            .iter()
            .map(|c| c.parts().to_vec())
            .collect();
        assert_eq!(got, vec![vec![1, 0]]);
        let got = enumerate_compositions(0, 3, &WeakComposition::zeros(3));
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].parts(), &[0, 0, 0]);
    }

    #[test]
    fn composition_filter_matches_unfiltered_generation() {
        for total in 0..6 {
            for parts in 1..4 {
                let floor_all = enumerate_compositions(total, parts, &WeakComposition::zeros(parts));
                for floor in &floor_all {
                    let filtered: Vec<_> = floor_all
                        .iter()
                        .filter(|c| dominance_geq(c.parts(), floor.parts()).unwrap())
                        .cloned()
                        .collect();
                    assert_eq!(enumerate_compositions(total, parts, floor), filtered);
                }
            }
        }
    }

    #[test]
    fn multiset_binomial_examples() {
        assert_eq!(multiset_binomial(2, 2), int(3));
        assert_eq!(multiset_binomial(1, 5), int(1));
        assert_eq!(multiset_binomial(0, 0), int(1));
        // polynomial convention: <-1 over 2> = binom(0, 2) = 0, <-2 over 2> = binom(-1,2) = 1
        assert_eq!(multiset_binomial(-1, 2), int(0));
        assert_eq!(multiset_binomial(-2, 2), int(1));
        assert_eq!(binomial(-1, 3), int(-1));
    }

    #[test]
    fn rational_parse_and_format() {
        let r = parse_rational("6/4").unwrap();
        assert_eq!(format_rational(&r), "3/2");
        assert_eq!(format_rational(&parse_rational("-4/2").unwrap()), "-2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![1, -1]).is_err());
        assert_eq!(Partition::parse("3, 1,0").unwrap().parts(), &[3, 1, 0]);
    }

    #[test]
    fn shsyt_small_sides() {
        assert_eq!(enumerate_shsyt(1).len(), 1);
        let two = enumerate_shsyt(2);
        // cells (1,1),(1,2),(2,2): forced 1,2,3
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].rows(), vec![vec![1, 2], vec![3]]);
        for n in 1..=5 {
            for t in enumerate_shsyt(n) {
                t.validate().unwrap();
            }
        }
    }

    #[test]
    fn count_n_examples() {
        assert_eq!(count_n(2, &[0]).unwrap(), int(0));
        assert_eq!(count_n(2, &[1]).unwrap(), int(1));
        assert_eq!(count_n(2, &[5]).unwrap(), int(0));
        assert_eq!(count_n(1, &[]).unwrap(), int(1));
    }

    #[test]
    fn ssyt_examples() {
        assert_eq!(count_ssyt(&Partition::new(vec![1]).unwrap(), 3).unwrap(), int(3));
        assert_eq!(count_ssyt(&Partition::new(vec![2, 1]).unwrap(), 3).unwrap(), int(8));
        assert_eq!(count_ssyt(&Partition::new(vec![]).unwrap(), 5).unwrap(), int(1));
    }
}
