//! Instance file format and the bundled instance catalogue.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::handlebody::{CuttingBelt, SimpleHandlebody, SimplePolytope};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeltFile {
    pub plus: String,
    pub minus: String,
    pub matching: IndexMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dimension: usize,
    pub facets: Vec<String>,
    pub nerve: Vec<Vec<String>>,
    #[serde(default)]
    pub belts: Vec<BeltFile>,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::input(format!("instance file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// Resolves labels. Structural problems are left to `validate`.
    pub fn to_handlebody(&self, fallback_name: &str) -> Result<SimpleHandlebody> {
        let nerve = SimplicialComplex::from_labels(self.facets.clone(), &self.nerve)?;
        let index = |label: &str| {
            nerve
                .index_of(label)
                .map_err(|_| Error::input(format!("belt refers to unknown facet {label:?}")))
        };
        let mut belts = Vec::with_capacity(self.belts.len());
        for b in &self.belts {
            let mut matching = BTreeMap::new();
            for (from, to) in &b.matching {
                if matching.insert(index(from)?, index(to)?).is_some() {
                    return Err(Error::input(format!("facet {from:?} matched twice")));
                }
            }
            belts.push(CuttingBelt {
                plus: index(&b.plus)?,
                minus: index(&b.minus)?,
                matching,
            });
        }
        let name = self.name.clone().unwrap_or_else(|| fallback_name.to_string());
        Ok(SimpleHandlebody::new(
            name,
            SimplePolytope::new(self.dimension, nerve),
            belts,
        ))
    }

    pub fn from_handlebody(h: &SimpleHandlebody) -> Self {
        let nerve = h.nerve();
        let label = |f: usize| nerve.label(f).to_string();
        InstanceFile {
            name: Some(h.name.clone()),
            dimension: h.dim(),
            facets: nerve.labels().to_vec(),
            nerve: nerve.maximal_simplex_labels(),
            belts: h
                .belts
                .iter()
                .map(|b| BeltFile {
                    plus: label(b.plus),
                    minus: label(b.minus),
                    matching: b.matching.iter().map(|(&f, &g)| (label(f), label(g))).collect(),
                })
                .collect(),
        }
    }
}

pub const BUNDLED: &[&str] = &[
    "interval",
    "triangle",
    "square",
    "pentagon",
    "tetrahedron",
    "cube",
    "triangular_prism",
    "pentagonal_prism",
    "dodecahedron",
    "dodecahedron_torus",
    "genus1_pogorelov",
    "genus1_crossing",
];

pub fn bundled_names() -> &'static [&'static str] {
    BUNDLED
}

pub fn bundled(name: &str) -> Result<SimpleHandlebody> {
    let h = match name {
        "interval" => plain(name, 1, numbered(2), vec![vec![0], vec![1]]),
        "triangle" => polygon(name, 3),
        "square" => polygon(name, 4),
        "pentagon" => polygon(name, 5),
        "tetrahedron" => plain(name, 3, numbered(4), subsets_of_size(4, 3)),
        "cube" => cube(),
        "triangular_prism" => prism(name, 3),
        "pentagonal_prism" => prism(name, 5),
        "dodecahedron" => plain(name, 3, numbered(12), icosahedron()),
        "dodecahedron_torus" => dodecahedron_torus(),
        "genus1_pogorelov" => barrel(name, 7, "ul".repeat(7).as_str(), 2)?,
        "genus1_crossing" => barrel(name, 8, "luluulluluulluul", 3)?,
        _ => {
            return Err(Error::input(format!(
                "no bundled instance {name:?}; available: {}",
                BUNDLED.join(", ")
            )))
        }
    };
    h.require_valid()
        .map_err(|e| Error::internal(format!("bundled instance {name} is invalid: {e}")))?;
    Ok(h)
}

fn numbered(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn plain(name: &str, dim: usize, labels: Vec<String>, maximal: Vec<Vec<usize>>) -> SimpleHandlebody {
    let nerve = SimplicialComplex::from_indices(labels, maximal).expect("bundled nerve");
    SimpleHandlebody::new(name, SimplePolytope::new(dim, nerve), Vec::new())
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// A k-gon; sides `1..=k` in cyclic order.
pub fn polygon(name: &str, k: usize) -> SimpleHandlebody {
    let edges = (0..k).map(|i| vec![i, (i + 1) % k]).collect();
    plain(name, 2, numbered(k), edges)
}

/// Facets `1..=6`; `i` and `i+3` are opposite.
fn cube() -> SimpleHandlebody {
    let mut tris = Vec::new();
    for a in [0, 3] {
        for b in [1, 4] {
            for c in [2, 5] {
                tris.push(vec![a, b, c]);
            }
        }
    }
    plain("cube", 3, numbered(6), tris)
}

/// Prism over a k-gon: caps `T1`, `T2`, sides `S1..Sk`.
pub fn prism(name: &str, k: usize) -> SimpleHandlebody {
    let mut labels = vec!["T1".to_string(), "T2".to_string()];
    labels.extend((1..=k).map(|i| format!("S{i}")));
    let side = |i: usize| 2 + i % k;
    let mut tris = Vec::new();
    for cap in [0, 1] {
        for i in 0..k {
            tris.push(vec![cap, side(i), side(i + 1)]);
        }
    }
    plain(name, 3, labels, tris)
}

/// Boundary of the icosahedron on vertices 0..12: apex 0, upper ring 1..=5,
/// lower ring 6..=10 (rotated half a step), bottom 11.
fn icosahedron() -> Vec<Vec<usize>> {
    let up = |i: usize| 1 + i % 5;
    let lo = |i: usize| 6 + i % 5;
    let mut tris = Vec::new();
    for i in 0..5 {
        tris.push(vec![0, up(i), up(i + 1)]);
        tris.push(vec![11, lo(i), lo(i + 1)]);
        tris.push(vec![up(i), up(i + 1), lo(i)]);
        tris.push(vec![up(i + 1), lo(i), lo(i + 1)]);
    }
    tris
}

/// Dodecahedron with two antipodal vertices truncated. The two new triangle
/// facets are the belt; each pentagon around one is matched to its antipode.
fn dodecahedron_torus() -> SimpleHandlebody {
    let mut labels = numbered(12);
    labels.push("A".into());
    labels.push("B".into());
    let (a, b) = (12, 13);
    let mut tris: Vec<Vec<usize>> = icosahedron()
        .into_iter()
        .filter(|t| *t != vec![0, 1, 2] && *t != vec![11, 8, 9])
        .collect();
    for (apex, tri) in [(a, [0, 1, 2]), (b, [11, 8, 9])] {
        for i in 0..3 {
            tris.push(vec![apex, tri[i], tri[(i + 1) % 3]]);
        }
    }
    let nerve = SimplicialComplex::from_indices(labels, tris).expect("truncated nerve");
    // Antipodes: 0 <-> 11, upper ring i <-> lower ring i + 2.
    let matching = BTreeMap::from([(0, 11), (1, 8), (2, 9)]);
    SimpleHandlebody::new(
        "dodecahedron_torus",
        SimplePolytope::new(3, nerve),
        vec![CuttingBelt {
            plus: a,
            minus: b,
            matching,
        }],
    )
}

/// Genus-one barrel: a band of side facets `U0..U(n-1)` and `L0..L(n-1)`
/// between a top facet `T` and a bottom facet `D`. The band is triangulated
/// by `pattern` (`u` advances the upper ring, `l` the lower ring), and the
/// belt glues `T` to `D` sending `Uk` to `L(k+shift)`.
pub fn barrel(name: &str, n: usize, pattern: &str, shift: usize) -> Result<SimpleHandlebody> {
    let ups = pattern.chars().filter(|&c| c == 'u').count();
    let lows = pattern.chars().filter(|&c| c == 'l').count();
    if ups != n || lows != n || ups + lows != pattern.len() {
        return Err(Error::input(format!(
            "barrel pattern needs exactly {n} 'u' and {n} 'l' letters"
        )));
    }
    let mut labels = vec!["T".to_string()];
    labels.extend((0..n).map(|k| format!("U{k}")));
    labels.extend((0..n).map(|k| format!("L{k}")));
    labels.push("D".into());
    let (top, bottom) = (0, 2 * n + 1);
    let u = |k: usize| 1 + k % n;
    let l = |k: usize| 1 + n + k % n;
    let mut tris = Vec::new();
    let (mut i, mut j) = (0, 0);
    for c in pattern.chars() {
        if c == 'u' {
            tris.push(vec![u(i), u(i + 1), l(j)]);
            i += 1;
        } else {
            tris.push(vec![u(i), l(j), l(j + 1)]);
            j += 1;
        }
    }
    for k in 0..n {
        tris.push(vec![top, u(k), u(k + 1)]);
        tris.push(vec![bottom, l(k), l(k + 1)]);
    }
    let nerve = SimplicialComplex::from_indices(labels, tris)?;
    let matching = (0..n).map(|k| (u(k), l(k + shift))).collect();
    Ok(SimpleHandlebody::new(
        name,
        SimplePolytope::new(3, nerve),
        vec![CuttingBelt {
            plus: top,
            minus: bottom,
            matching,
        }],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_instance_is_valid() {
        for name in BUNDLED {
            let h = bundled(name).unwrap();
            assert!(h.validate().is_valid(), "{name}");
        }
    }

    #[test]
    fn file_round_trip() {
        for name in BUNDLED {
            let h = bundled(name).unwrap();
            let file = InstanceFile::from_handlebody(&h);
            let text = file.to_json();
            let back = InstanceFile::from_json(&text).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.to_handlebody("x").unwrap(), h);
        }
    }

    #[test]
    fn unknown_labels_are_input_errors() {
        let mut file = InstanceFile::from_handlebody(&bundled("square").unwrap());
        file.nerve.push(vec!["1".into(), "9".into()]);
        assert!(matches!(file.to_handlebody("x"), Err(Error::Input(_))));
        assert!(matches!(bundled("nope"), Err(Error::Input(_))));
    }

    #[test]
    fn barrel_pattern_must_balance() {
        assert!(barrel("b", 3, "uull", 1).is_err());
    }
}
