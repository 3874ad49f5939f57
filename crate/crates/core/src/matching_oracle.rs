//! Brute-force matching counts used as ground truth for the generated
//! recursions.
//!
//! Counting uses vertex elimination
//! `N(S) = N(S - v) + sum over neighbours u of v in S of N(S - v - u)`
//! with `v` the lowest surviving vertex, memoized on the surviving-vertex
//! bitmask.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::evolve::BoundaryClassVector;
use crate::hanoi_graph::{Graph, HanoiGraph};

pub const DEFAULT_MAX_VERTICES: usize = 40;
pub const DEFAULT_MEMO_CAP: usize = 1 << 26;
const HARD_MAX_VERTICES: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_vertices: usize,
    pub memo_cap: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_vertices: DEFAULT_MAX_VERTICES, memo_cap: DEFAULT_MEMO_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CornerStatus {
    Monomer,
    Dimer,
    Free,
}

/// Per-corner requirement, one entry per corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerConstraint(pub Vec<CornerStatus>);

impl CornerConstraint {
    pub fn free(corners: usize) -> Self {
        CornerConstraint(vec![CornerStatus::Free; corners])
    }

    /// The first `k` corners dimer-covered, the remaining ones monomers.
    pub fn first_k_dimers(corners: usize, k: usize) -> Self {
        CornerConstraint(
            (0..corners)
                .map(|i| if i < k { CornerStatus::Dimer } else { CornerStatus::Monomer })
                .collect(),
        )
    }
}

impl FromStr for CornerConstraint {
    type Err = Error;

    /// One letter per corner: `m` monomer, `d` dimer, `f` free.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch.to_ascii_lowercase() {
                'm' => Ok(CornerStatus::Monomer),
                'd' => Ok(CornerStatus::Dimer),
                'f' => Ok(CornerStatus::Free),
                other => Err(Error::InvalidArgument(format!(
                    "corner constraint letter `{other}` is not one of m, d, f"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(CornerConstraint)
    }
}

impl fmt::Display for CornerConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                CornerStatus::Monomer => "m",
                CornerStatus::Dimer => "d",
                CornerStatus::Free => "f",
            })?;
        }
        Ok(())
    }
}

/// Memoized matching counter for one graph. Counts of induced subgraphs
/// share the memo table, which is private to this value.
pub struct MatchingCounter<'g> {
    graph: &'g Graph,
    neighbor_masks: Vec<u128>,
    memo: FxHashMap<u128, BigUint>,
    memo_cap: usize,
}

impl<'g> MatchingCounter<'g> {
    pub fn new(graph: &'g Graph, limits: OracleLimits) -> Result<Self> {
        let nv = graph.num_vertices();
        if nv > limits.max_vertices.min(HARD_MAX_VERTICES) {
            return Err(Error::OracleSize { vertices: nv, cap: limits.max_vertices.min(HARD_MAX_VERTICES) });
        }
        let neighbor_masks = (0..nv)
            .map(|v| graph.neighbors(v).iter().fold(0u128, |m, &u| m | (1u128 << u)))
            .collect();
        Ok(MatchingCounter { graph, neighbor_masks, memo: FxHashMap::default(), memo_cap: limits.memo_cap })
    }

    fn full_mask(&self) -> u128 {
        let nv = self.graph.num_vertices();
        if nv == 128 {
            u128::MAX
        } else {
            (1u128 << nv) - 1
        }
    }

    /// Matchings of the whole graph, the empty matching included.
    pub fn count(&mut self) -> Result<BigUint> {
        let full = self.full_mask();
        self.count_induced(full)
    }

    /// Matchings of the subgraph induced by the vertices in `alive`.
    pub fn count_induced(&mut self, alive: u128) -> Result<BigUint> {
        if alive == 0 {
            return Ok(BigUint::one());
        }
        if let Some(n) = self.memo.get(&alive) {
            return Ok(n.clone());
        }
        let v = alive.trailing_zeros() as usize;
        let rest = alive & !(1u128 << v);
        let mut total = self.count_induced(rest)?;
        let mut nbrs = self.neighbor_masks[v] & rest;
        while nbrs != 0 {
            let u = nbrs.trailing_zeros();
            nbrs &= nbrs - 1;
            total += self.count_induced(rest & !(1u128 << u))?;
        }
        if self.memo.len() >= self.memo_cap {
            return Err(Error::MemoCap { cap: self.memo_cap });
        }
        self.memo.insert(alive, total.clone());
        Ok(total)
    }

    /// Matchings in which every `Monomer` corner is unmatched and every
    /// `Dimer` corner is matched, by inclusion-exclusion over the dimer set.
    pub fn count_constrained(&mut self, corners: &[usize], c: &CornerConstraint) -> Result<BigUint> {
        if corners.len() != c.0.len() {
            return Err(Error::InvalidArgument(format!(
                "constraint has {} entries for {} corners",
                c.0.len(),
                corners.len()
            )));
        }
        let mut base = self.full_mask();
        let mut dimers = Vec::new();
        for (&v, status) in corners.iter().zip(&c.0) {
            match status {
                CornerStatus::Monomer => base &= !(1u128 << v),
                CornerStatus::Dimer => dimers.push(v),
                CornerStatus::Free => {}
            }
        }
        let mut total = BigInt::zero();
        for subset in 0u32..(1 << dimers.len()) {
            let mut alive = base;
            for (i, &v) in dimers.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    alive &= !(1u128 << v);
                }
            }
            let n = BigInt::from(self.count_induced(alive)?);
            if subset.count_ones() % 2 == 0 {
                total += n;
            } else {
                total -= n;
            }
        }
        Ok(total.to_biguint().expect("inclusion-exclusion count is nonnegative"))
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

pub fn count_matchings(graph: &Graph, limits: OracleLimits) -> Result<BigUint> {
    MatchingCounter::new(graph, limits)?.count()
}

pub fn count_constrained(
    graph: &Graph,
    corners: &[usize],
    c: &CornerConstraint,
    limits: OracleLimits,
) -> Result<BigUint> {
    MatchingCounter::new(graph, limits)?.count_constrained(corners, c)
}

/// Boundary classes of a Hanoi graph by brute force. Every `k`-subset of
/// corners is counted and must agree with the first-`k` representative.
pub fn boundary_class_vector(g: &HanoiGraph, limits: OracleLimits) -> Result<BoundaryClassVector> {
    let mut counter = MatchingCounter::new(g.graph(), limits)?;
    let corners = g.corners();
    let k_max = corners.len();
    let mut counts: Vec<Option<BigUint>> = vec![None; k_max + 1];
    for subset in 0u32..(1 << k_max) {
        let k = subset.count_ones() as usize;
        let c = CornerConstraint(
            (0..k_max)
                .map(|i| if subset >> i & 1 == 1 { CornerStatus::Dimer } else { CornerStatus::Monomer })
                .collect(),
        );
        let n = counter.count_constrained(corners, &c)?;
        match &counts[k] {
            None => counts[k] = Some(n),
            Some(prev) if *prev == n => {}
            Some(prev) => {
                return Err(Error::Integrity(format!(
                    "corner subset {c} gives {n} matchings but another {k}-subset gives {prev}"
                )))
            }
        }
    }
    let total = counter.count()?;
    let counts: Vec<BigInt> = counts.into_iter().map(|c| BigInt::from(c.unwrap())).collect();
    let v = BoundaryClassVector::new(g.d(), g.n(), counts);
    if v.total() != &BigInt::from(total.clone()) {
        return Err(Error::Integrity(format!(
            "weighted class sum {} differs from the direct count {total}",
            v.total()
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hanoi_graph::Graph;

    fn lim() -> OracleLimits {
        OracleLimits::default()
    }

    fn n(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn tiny_graphs() {
        assert_eq!(count_matchings(&Graph::complete(4), lim()).unwrap(), n(10));
        assert_eq!(count_matchings(&Graph::new(2, [(0, 1)]).unwrap(), lim()).unwrap(), n(2));
        assert_eq!(count_matchings(&Graph::new(3, []).unwrap(), lim()).unwrap(), n(1));
    }

    #[test]
    fn th3_stage1_total() {
        let g = HanoiGraph::build(3, 1).unwrap();
        assert_eq!(count_matchings(g.graph(), lim()).unwrap(), n(25817));
    }

    #[test]
    fn constrained_k4() {
        let k4 = Graph::complete(4);
        let corners = [0, 1, 2, 3];
        let all_d: CornerConstraint = "dddd".parse().unwrap();
        assert_eq!(count_constrained(&k4, &corners, &all_d, lim()).unwrap(), n(3));
        let one_d: CornerConstraint = "dmmm".parse().unwrap();
        assert_eq!(count_constrained(&k4, &corners, &one_d, lim()).unwrap(), n(0));
        let free = CornerConstraint::free(4);
        assert_eq!(count_constrained(&k4, &corners, &free, lim()).unwrap(), n(10));
    }

    #[test]
    fn th4_stage1_all_monomer() {
        let g = HanoiGraph::build(4, 1).unwrap();
        let c = CornerConstraint::first_k_dimers(5, 0);
        assert_eq!(count_constrained(g.graph(), g.corners(), &c, lim()).unwrap(), n(510_980));
    }

    #[test]
    fn class_vectors() {
        let v = boundary_class_vector(&HanoiGraph::build(3, 1).unwrap(), lim()).unwrap();
        let expected: Vec<BigInt> = [1010, 1242, 1556, 1983, 2571].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(v.counts(), expected.as_slice());
        assert_eq!(v.total(), &BigInt::from(25817));

        let v = boundary_class_vector(&HanoiGraph::build(3, 0).unwrap(), lim()).unwrap();
        let expected: Vec<BigInt> = [1, 0, 1, 0, 3].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(v.counts(), expected.as_slice());

        let v = boundary_class_vector(&HanoiGraph::build(4, 0).unwrap(), lim()).unwrap();
        let expected: Vec<BigInt> = [1, 0, 1, 0, 3, 0].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(v.counts(), expected.as_slice());
    }

    #[test]
    fn size_and_memo_caps() {
        let g = HanoiGraph::build(2, 3).unwrap();
        assert!(matches!(count_matchings(g.graph(), lim()), Err(Error::OracleSize { .. })));
        let g = HanoiGraph::build(3, 1).unwrap();
        let tight = OracleLimits { max_vertices: 40, memo_cap: 10 };
        assert!(matches!(count_matchings(g.graph(), tight), Err(Error::MemoCap { cap: 10 })));
    }

    #[test]
    fn constraint_letters() {
        assert!("mdx".parse::<CornerConstraint>().is_err());
        assert_eq!("MdF".parse::<CornerConstraint>().unwrap().to_string(), "mdf");
    }
}
