//! The discrete phase space `Z_d x Z_d` labelling the Bell projectors.
//!
//! Order-`d` subgroups, their cosets ("lines") and striations (the `d`
//! parallel cosets of one subgroup) organise both detection criteria. For
//! composite `d` all order-`d` subgroups are enumerated, cyclic or not.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::weyl::{bell_projector, CoefficientMatrix, PhaseIndex};

/// An order-`d` subgroup of `Z_d x Z_d`, elements sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Subgroup {
    d: usize,
    elements: Vec<PhaseIndex>,
}

impl Subgroup {
    /// Validates closure, the identity element and the order.
    pub fn new(d: usize, elements: impl IntoIterator<Item = PhaseIndex>) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        let set: BTreeSet<PhaseIndex> = elements.into_iter().collect();
        if set.len() != d {
            return Err(Error::InvalidSubgroup(format!(
                "expected {d} elements, got {}",
                set.len()
            )));
        }
        if let Some(p) = set.iter().find(|p| p.k >= d || p.l >= d) {
            return Err(Error::InvalidSubgroup(format!(
                "({}, {}) is not reduced mod {d}",
                p.k, p.l
            )));
        }
        if !set.contains(&PhaseIndex::ORIGIN) {
            return Err(Error::InvalidSubgroup("missing (0, 0)".into()));
        }
        for a in &set {
            for b in &set {
                if !set.contains(&a.add(*b, d)) {
                    return Err(Error::InvalidSubgroup("not closed under addition".into()));
                }
            }
        }
        Ok(Self {
            d,
            elements: set.into_iter().collect(),
        })
    }

    /// The cyclic subgroup `{n * g}`; only an order-`d` subgroup when `g` has order `d`.
    pub fn cyclic(d: usize, generator: PhaseIndex) -> Result<Self> {
        Self::new(d, (0..d).map(|n| generator.scale(n, d)))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn elements(&self) -> &[PhaseIndex] {
        &self.elements
    }

    pub fn contains(&self, p: PhaseIndex) -> bool {
        self.elements.binary_search(&p).is_ok()
    }

    /// Smallest element that generates the whole subgroup, if it is cyclic.
    pub fn generator(&self) -> Option<PhaseIndex> {
        self.elements
            .iter()
            .copied()
            .find(|g| span(self.d, &[*g]).len() == self.d)
    }
}

/// All sums `a*g1 + b*g2 + ...` of the given generators.
fn span(d: usize, generators: &[PhaseIndex]) -> BTreeSet<PhaseIndex> {
    let mut set = BTreeSet::from([PhaseIndex::ORIGIN]);
    for g in generators {
        let current: Vec<PhaseIndex> = set.iter().copied().collect();
        for n in 1..d {
            let step = g.scale(n, d);
            set.extend(current.iter().map(|p| p.add(step, d)));
        }
    }
    set
}

/// A coset `S + shift`; `shift` is the lexicographically smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coset {
    base: Subgroup,
    shift: PhaseIndex,
    elements: Vec<PhaseIndex>,
}

impl Coset {
    pub fn new(base: &Subgroup, shift: PhaseIndex) -> Self {
        let d = base.d;
        let mut elements: Vec<PhaseIndex> = base.elements.iter().map(|s| s.add(shift, d)).collect();
        elements.sort();
        Self {
            base: base.clone(),
            shift: elements[0],
            elements,
        }
    }

    pub fn base(&self) -> &Subgroup {
        &self.base
    }

    pub fn shift(&self) -> PhaseIndex {
        self.shift
    }

    pub fn elements(&self) -> &[PhaseIndex] {
        &self.elements
    }

    pub fn d(&self) -> usize {
        self.base.d
    }

    pub fn contains(&self, p: PhaseIndex) -> bool {
        self.elements.binary_search(&p).is_ok()
    }

    /// Sum of `c` over the coset.
    pub fn mass(&self, c: &CoefficientMatrix) -> f64 {
        self.elements.iter().map(|&p| c.at(p)).sum()
    }

    /// Product of `c` over the coset.
    pub fn product(&self, c: &CoefficientMatrix) -> f64 {
        self.elements.iter().map(|&p| c.at(p)).product()
    }
}

/// The `d` disjoint cosets of one subgroup, ordered by representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Striation {
    generator: Subgroup,
    cosets: Vec<Coset>,
}

impl Striation {
    pub fn generator(&self) -> &Subgroup {
        &self.generator
    }

    pub fn cosets(&self) -> &[Coset] {
        &self.cosets
    }
}

fn require_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::DimensionTooSmall(d))
    } else {
        Ok(())
    }
}

/// Every order-`d` subgroup of `Z_d x Z_d`, sorted by element list.
///
/// Subgroups of `Z_d^2` need at most two generators, so spanning all pairs is
/// exhaustive.
pub fn enumerate_subgroups(d: usize) -> Result<Vec<Subgroup>> {
    require_dim(d)?;
    let points: Vec<PhaseIndex> = PhaseIndex::all(d).collect();
    let mut found = BTreeSet::new();
    for (i, &g1) in points.iter().enumerate() {
        for &g2 in &points[i..] {
            let set = span(d, &[g1, g2]);
            if set.len() == d {
                found.insert(set.into_iter().collect::<Vec<_>>());
            }
        }
    }
    Ok(found
        .into_iter()
        .map(|elements| Subgroup { d, elements })
        .collect())
}

/// The striation generated by `s`.
pub fn striation(s: &Subgroup) -> Striation {
    let d = s.d;
    let mut seen = BTreeSet::new();
    let mut cosets = Vec::with_capacity(d);
    for p in PhaseIndex::all(d) {
        if seen.contains(&p) {
            continue;
        }
        let coset = Coset::new(s, p);
        seen.extend(coset.elements.iter().copied());
        cosets.push(coset);
    }
    cosets.sort_by_key(|c| c.shift);
    Striation {
        generator: s.clone(),
        cosets,
    }
}

/// All striations in subgroup order.
pub fn all_striations(d: usize) -> Result<Vec<Striation>> {
    Ok(enumerate_subgroups(d)?.iter().map(striation).collect())
}

/// Every coset of every order-`d` subgroup: subgroup-major, then by
/// representative. This order defines the coset indices used by the CLI.
pub fn all_cosets(d: usize) -> Result<Vec<Coset>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for st in all_striations(d)? {
        for coset in st.cosets {
            if seen.insert(coset.elements.clone()) {
                out.push(coset);
            }
        }
    }
    Ok(out)
}

/// The subgroup state: weight `1/d` on each point of the coset.
pub fn subgroup_state(ell: &Coset) -> CoefficientMatrix {
    let d = ell.d();
    let mut values = vec![0.0; d * d];
    for p in &ell.elements {
        values[p.flat(d)] = 1.0 / d as f64;
    }
    CoefficientMatrix::from_raw(d, values)
}

/// The projectors `sum_{(i,j) in l} P[i][j]`, one per coset of the striation
/// of `s`. Together they form a projective measurement.
pub fn striation_projectors(s: &Subgroup) -> Vec<ComplexMatrix> {
    let d = s.d;
    let projectors: Vec<ComplexMatrix> = PhaseIndex::all(d)
        .map(|p| bell_projector(d, p).expect("d >= 2 for a valid subgroup"))
        .collect();
    striation(s)
        .cosets
        .iter()
        .map(|ell| {
            ell.elements
                .iter()
                .fold(ComplexMatrix::zeros(d * d, d * d), |acc, p| {
                    &acc + &projectors[p.flat(d)]
                })
        })
        .collect()
}

pub fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|p| p * p <= n)
            .all(|p| !n.is_multiple_of(p))
}

/// An affine map `x -> A x + b` on `Z_d x Z_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineMap {
    d: usize,
    linear: [[usize; 2]; 2],
    offset: PhaseIndex,
}

impl AffineMap {
    pub fn linear(&self) -> [[usize; 2]; 2] {
        self.linear
    }

    pub fn offset(&self) -> PhaseIndex {
        self.offset
    }

    pub fn apply(&self, p: PhaseIndex) -> PhaseIndex {
        let d = self.d;
        let [[a, b], [c, e]] = self.linear;
        PhaseIndex {
            k: (a * p.k + b * p.l + self.offset.k) % d,
            l: (c * p.k + e * p.l + self.offset.l) % d,
        }
    }

    /// `perm[x] = flat(apply(x))` over row-major flat indices.
    pub fn permutation(&self) -> Vec<usize> {
        PhaseIndex::all(self.d)
            .map(|p| self.apply(p).flat(self.d))
            .collect()
    }
}

/// The affine group `AGL(2, d)` for prime `d`. These maps send cosets to cosets.
pub fn coset_preserving_maps(d: usize) -> Result<Vec<AffineMap>> {
    if !is_prime(d) {
        return Err(Error::NonPrimeDimension(d));
    }
    let mut maps = Vec::new();
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    if (a * e + d * d - b * c).is_multiple_of(d) {
                        continue;
                    }
                    for offset in PhaseIndex::all(d) {
                        maps.push(AffineMap {
                            d,
                            linear: [[a, b], [c, e]],
                            offset,
                        });
                    }
                }
            }
        }
    }
    Ok(maps)
}
