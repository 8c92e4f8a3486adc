//! Built-in fixtures: small flow networks, marked embeddings and marking
//! pairs, plus loading and saving corpora as JSON directories.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;

use crate::combinatorics::{Partition, Rational};
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::poset::{MarkedPoset, Marking, Poset};
use crate::transform::{build_skew_gt, gt_embedding, BoundedEmbedding, MarkedEmbedding};

#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub networks: Vec<(String, FlowNetwork)>,
    pub embeddings: Vec<(String, MarkedEmbedding)>,
}

fn net(n: usize, edges: &[(usize, usize)], netflow: &[i64]) -> FlowNetwork {
    FlowNetwork::new(n, edges.to_vec(), netflow.to_vec()).expect("fixture network")
}

/// Five vertices, one unit entering at the first and leaving at the last.
pub fn reduction_fixture() -> FlowNetwork {
    net(5, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (3, 4)], &[1, 0, 0, 0, -1])
}

/// Networks with at most six vertices and ten edges, single sink last,
/// sources without incoming edges and zero vertices with both kinds.
pub fn networks() -> Vec<(String, FlowNetwork)> {
    let k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let k5: Vec<(usize, usize)> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
    vec![
        ("triangle", net(3, &[(0, 1), (0, 2), (1, 2)], &[1, 0, -1])),
        ("triangle-2", net(3, &[(0, 1), (0, 2), (1, 2)], &[2, 0, -2])),
        ("double-path", net(3, &[(0, 1), (0, 1), (1, 2), (1, 2)], &[1, 0, -1])),
        ("k4", net(4, &k4, &[1, 0, 0, -1])),
        ("k4-2", net(4, &k4, &[2, 0, 0, -2])),
        ("k5", net(5, &k5, &[1, 0, 0, 0, -1])),
        ("reduction-fixture", reduction_fixture()),
        ("reduction-fixture-2", reduction_fixture().with_netflow(vec![2, 0, 0, 0, -2]).unwrap()),
        ("two-sources", net(4, &[(0, 2), (1, 2), (2, 3), (2, 3), (0, 3)], &[1, 2, 0, -3])),
        ("fan-3", net(4, &[(0, 1), (0, 2), (1, 2), (1, 2), (2, 3), (1, 3)], &[3, 0, 0, -3])),
        ("ladder", net(5, &[(0, 1), (0, 1), (1, 2), (1, 2), (2, 3), (2, 3), (3, 4), (3, 4)], &[1, 0, 0, 0, -1])),
        (
            "six-mixed",
            net(6, &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5), (2, 5)], &[1, 0, 0, 0, 0, -1]),
        ),
        ("gt-poset-3", net(4, &[(0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (2, 3)], &[1, 1, 0, -2])),
        (
            "two-sources-5",
            net(5, &[(0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4)], &[2, 1, 0, 0, -3]),
        ),
        ("triple-fan", net(4, &[(0, 1), (0, 1), (0, 1), (1, 3), (1, 2), (2, 3)], &[1, 0, 0, -1])),
        ("three-sources", net(5, &[(0, 3), (1, 3), (2, 3), (3, 4), (3, 4), (2, 4)], &[1, 1, 1, 0, -3])),
        (
            "spine-6",
            net(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 5), (2, 5), (3, 5)], &[1, 0, 0, 0, 0, -1]),
        ),
        (
            "two-sources-6",
            net(6, &[(0, 2), (1, 2), (2, 3), (2, 4), (3, 5), (4, 5), (3, 4), (1, 5)], &[2, 1, 0, 0, 0, -3]),
        ),
        ("simplex-leaf", net(2, &[(0, 1), (0, 1), (0, 1)], &[2, -2])),
        ("diamond-2", net(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)], &[2, 0, 0, -2])),
        (
            "bypass-5",
            net(5, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (1, 4)], &[1, 0, 0, 0, -1]),
        ),
        ("two-sources-4", net(4, &[(0, 2), (1, 2), (1, 3), (2, 3), (2, 3)], &[1, 1, 0, -2])),
    ]
    .into_iter()
    .map(|(n, g)| (n.to_string(), g))
    .collect()
}

fn drawn(
    ids: &[&str],
    covers: &[(&str, &str)],
    coords: &[(i64, i64)],
    marks: &[(&str, i64)],
) -> Result<BoundedEmbedding> {
    let poset = Poset::new(
        ids.iter().map(|s| s.to_string()).collect(),
        covers.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    )?;
    let marking: Marking = marks
        .iter()
        .map(|(k, v)| (k.to_string(), Rational::from_integer(BigInt::from(*v))))
        .collect();
    let base = MarkedPoset::new(poset, &marking)?;
    let xy: BTreeMap<String, (i64, i64)> =
        ids.iter().zip(coords).map(|(k, &c)| (k.to_string(), c)).collect();
    BoundedEmbedding::from_drawing(base, &xy)
}

fn marked(ids: &[&str], covers: &[(&str, &str)], coords: &[(i64, i64)], marks: &[(&str, i64)]) -> Result<MarkedEmbedding> {
    MarkedEmbedding::new(drawn(ids, covers, coords, marks)?)
}

fn unmarked(ids: &[&str], covers: &[(&str, &str)], coords: &[(i64, i64)], m: i64) -> Result<MarkedEmbedding> {
    MarkedEmbedding::order_polytope(drawn(ids, covers, coords, &[])?, m)
}

fn part(v: &[i64]) -> Partition {
    Partition::new(v.to_vec()).expect("fixture partition")
}

/// Marked embeddings with at most eight elements and markings at most 4.
pub fn embeddings() -> Vec<(String, MarkedEmbedding)> {
    let diamond = ["b", "x", "y", "t"];
    let diamond_covers = [("b", "x"), ("b", "y"), ("x", "t"), ("y", "t")];
    let diamond_xy = [(0, 0), (-1, 1), (1, 1), (0, 2)];
    let list: Vec<(&str, Result<MarkedEmbedding>)> = vec![
        ("chain-2", unmarked(&["c1", "c2"], &[("c1", "c2")], &[(0, 1), (0, 2)], 1)),
        ("chain-3-dilated", unmarked(&["c1", "c2", "c3"], &[("c1", "c2"), ("c2", "c3")], &[(0, 1), (0, 2), (0, 3)], 2)),
        ("antichain-2", unmarked(&["a1", "a2"], &[], &[(-1, 0), (1, 0)], 1)),
        ("diamond", unmarked(&diamond, &diamond_covers, &diamond_xy, 1)),
        ("vee", unmarked(&["a", "b", "c"], &[("a", "b"), ("a", "c")], &[(0, 0), (-1, 1), (1, 1)], 1)),
        (
            "n-poset",
            unmarked(&["a", "b", "c", "d"], &[("a", "c"), ("b", "c"), ("b", "d")], &[(-1, 0), (1, 0), (-1, 1), (1, 1)], 1),
        ),
        ("gt-1-0", gt_embedding(&part(&[1, 0]))),
        ("gt-2-1-0", gt_embedding(&part(&[2, 1, 0]))),
        ("gt-3-1-0", gt_embedding(&part(&[3, 1, 0]))),
        ("gt-4-2-0", gt_embedding(&part(&[4, 2, 0]))),
        ("gt-3-3-0", gt_embedding(&part(&[3, 3, 0]))),
        ("skew-2-1-over-1-0-m3", build_skew_gt(&part(&[2, 1]), &part(&[1, 0]), 3)),
        ("marked-chain", marked(&["c1", "c2", "c3"], &[("c1", "c2"), ("c2", "c3")], &[(0, 1), (0, 2), (0, 3)], &[("c1", 0), ("c3", 3)])),
        ("marked-diamond", marked(&diamond, &diamond_covers, &diamond_xy, &[("b", 0), ("t", 2)])),
        ("marked-diamond-side", marked(&diamond, &diamond_covers, &diamond_xy, &[("b", 0), ("x", 1), ("t", 3)])),
        (
            "marked-zigzag",
            marked(
                &["a", "b", "c", "d", "e"],
                &[("a", "c"), ("b", "c"), ("b", "d"), ("c", "e"), ("d", "e")],
                &[(-1, 0), (1, 0), (0, 1), (2, 1), (1, 2)],
                &[("a", 0), ("b", 1), ("c", 2), ("e", 4)],
            ),
        ),
    ];
    list.into_iter()
        .map(|(n, e)| (n.to_string(), e.unwrap_or_else(|err| panic!("fixture {n}: {err}"))))
        .collect()
}

/// Fixtures paired with a second marking on the same marked set.
pub fn marking_pairs() -> Vec<(String, MarkedPoset, Marking, Marking)> {
    let mk = |v: &[(&str, i64)]| -> Marking {
        v.iter().map(|(k, x)| (k.to_string(), Rational::from_integer(BigInt::from(*x)))).collect()
    };
    let mut out = Vec::new();
    for (name, me) in embeddings() {
        let base = me.embedding().base().clone();
        if base.marked_count() == 0 {
            continue;
        }
        let first = base.marking();
        // a second valid marking: shift the values toward an arithmetic ramp
        let sorted = base.sorted_marked();
        let k = sorted.len() as i64;
        let second: Marking = sorted
            .iter()
            .enumerate()
            .map(|(i, &p)| (base.poset().id(p).to_string(), Rational::from_integer(BigInt::from(k - 1 - i as i64))))
            .collect();
        if base.with_marking(&second).and_then(|m| m.validate()).is_ok() {
            out.push((name, base, first, second));
        }
    }
    let chain = MarkedPoset::new(
        Poset::new(
            vec!["c1".into(), "c2".into(), "c3".into()],
            vec![("c1".into(), "c2".into()), ("c2".into(), "c3".into())],
        )
        .unwrap(),
        &mk(&[("c1", 0), ("c3", 2)]),
    )
    .unwrap();
    out.push(("chain-ends".into(), chain, mk(&[("c1", 0), ("c3", 2)]), mk(&[("c1", 1), ("c3", 4)])));
    out
}

impl Corpus {
    pub fn builtin() -> Self {
        Corpus { networks: networks(), embeddings: embeddings() }
    }

    /// Reads `networks/*.json` and `embeddings/*.json`; file stems are the
    /// fixture names.
    pub fn load(dir: &Path) -> Result<Self> {
        fn read_all<T: serde::de::DeserializeOwned>(dir: &Path) -> Result<Vec<(String, T)>> {
            let mut out = Vec::new();
            if !dir.exists() {
                return Ok(out);
            }
            let mut paths: Vec<_> = fs::read_dir(dir)
                .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            for p in paths {
                let text = fs::read_to_string(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                let v = serde_json::from_str(&text).map_err(|e| Error::Json(format!("{}: {e}", p.display())))?;
                out.push((p.file_stem().unwrap().to_string_lossy().into_owned(), v));
            }
            out.sort_by(|a, b| a.0.cmp(&b.0));
            Ok(out)
        }
        if !dir.is_dir() {
            return Err(Error::Io(format!("{}: not a directory", dir.display())));
        }
        Ok(Corpus { networks: read_all(&dir.join("networks"))?, embeddings: read_all(&dir.join("embeddings"))? })
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let io = |p: &Path, e: std::io::Error| Error::Io(format!("{}: {e}", p.display()));
        for (sub, items) in [
            ("networks", self.networks.iter().map(|(n, g)| (n, serde_json::to_string_pretty(g))).collect::<Vec<_>>()),
            ("embeddings", self.embeddings.iter().map(|(n, e)| (n, serde_json::to_string_pretty(e))).collect()),
        ] {
            let d = dir.join(sub);
            fs::create_dir_all(&d).map_err(|e| io(&d, e))?;
            for (name, text) in items {
                let p = d.join(format!("{name}.json"));
                let text = text.map_err(|e| Error::Json(e.to_string()))?;
                fs::write(&p, text + "\n").map_err(|e| io(&p, e))?;
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.networks.is_empty() && self.embeddings.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::check_sign_convention;

    #[test]
    fn networks_fit_bounds() {
        let nets = networks();
        assert!(nets.len() >= 20);
        for (name, g) in &nets {
            assert!(g.vertex_count() <= 6 && g.edges().len() <= 10, "{name}");
            check_sign_convention(g).unwrap_or_else(|e| panic!("{name}: {e}"));
            g.lidskii_volume().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn embeddings_fit_bounds() {
        let es = embeddings();
        assert!(es.len() >= 10);
        for (name, me) in &es {
            assert!(me.embedding().base().len() <= 8, "{name}");
            crate::transform::build_g_pal(me).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(marking_pairs().len() >= 5);
    }

    #[test]
    fn save_and_load() {
        let dir = std::env::temp_dir().join(format!("gtflow-corpus-{}", std::process::id()));
        let c = Corpus::builtin();
        c.save(&dir).unwrap();
        let back = Corpus::load(&dir).unwrap();
        let mut names: Vec<_> = c.networks.iter().map(|(n, _)| n.clone()).collect();
        names.sort();
        assert_eq!(back.networks.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(), names);
        for (n, g) in &back.networks {
            assert_eq!(&c.networks.iter().find(|(m, _)| m == n).unwrap().1, g);
        }
        for (n, e) in &back.embeddings {
            assert_eq!(&c.embeddings.iter().find(|(m, _)| m == n).unwrap().1, e);
        }
        fs::remove_dir_all(&dir).unwrap();
    }
}
