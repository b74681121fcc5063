//! Finite abelian groups `A = Z/d_1 x ... x Z/d_r` and their subgroups.
//!
//! A subgroup `S` is stored as the integer lattice `L` with `D·Z^r ⊆ L ⊆ Z^r`
//! and `S = L / D·Z^r`, using the canonical Hermite basis of `L`. Because `L`
//! has full rank, basis vector `j` has its pivot in coordinate `j`, the pivot
//! divides `d_j`, and every entry is smaller than the modulus of its row.
//!
//! This module also embeds finitely many elements of `⊕_{m≥2} Z/mZ` or of
//! `Q/Z` into a finite ambient group.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fold::VoltageGroup;
use crate::lattice::{self, IntVec};

/// Default bound on the order of an ambient produced by [`embed_ambient`].
pub const DEFAULT_MAX_AMBIENT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbGroup {
    moduli: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbElement {
    residues: Vec<u64>,
}

impl AbElement {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for AbElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(")")
    }
}

impl AbGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.iter().any(|&d| d == 0) {
            return Err(Error::ZeroModulus);
        }
        Ok(AbGroup { moduli })
    }

    pub fn trivial() -> Self {
        AbGroup { moduli: Vec::new() }
    }

    pub fn cyclic(m: u64) -> Result<Self> {
        AbGroup::new(vec![m])
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Number of cyclic factors `r` (not the minimal generator count).
    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> BigUint {
        self.moduli.iter().map(|&d| BigUint::from(d)).product()
    }

    /// The order as a `u64`, if it fits.
    pub fn order_u64(&self) -> Option<u64> {
        self.moduli.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d))
    }

    /// Reduces integer residues into the group.
    pub fn element(&self, residues: &[i64]) -> Result<AbElement> {
        self.check_dim(residues.len())?;
        Ok(AbElement {
            residues: residues
                .iter()
                .zip(&self.moduli)
                .map(|(&x, &d)| (x as i128).rem_euclid(d as i128) as u64)
                .collect(),
        })
    }

    pub fn zero(&self) -> AbElement {
        AbElement {
            residues: vec![0; self.dim()],
        }
    }

    /// The `i`-th standard generator (residue 1 in factor `i`).
    pub fn basis_element(&self, i: usize) -> AbElement {
        let mut residues = vec![0; self.dim()];
        residues[i] = 1 % self.moduli[i];
        AbElement { residues }
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            })
        }
    }

    /// Checks dimension and that residues are canonical.
    pub fn check(&self, x: &AbElement) -> Result<()> {
        self.check_dim(x.residues.len())?;
        if x.residues.iter().zip(&self.moduli).all(|(&r, &d)| r < d) {
            Ok(())
        } else {
            Err(Error::InvalidTorsion(format!("{x} is not reduced modulo {:?}", self.moduli)))
        }
    }

    pub fn add(&self, x: &AbElement, y: &AbElement) -> AbElement {
        AbElement {
            residues: x
                .residues
                .iter()
                .zip(&y.residues)
                .zip(&self.moduli)
                .map(|((&a, &b), &d)| ((a as u128 + b as u128) % d as u128) as u64)
                .collect(),
        }
    }

    pub fn neg(&self, x: &AbElement) -> AbElement {
        AbElement {
            residues: x
                .residues
                .iter()
                .zip(&self.moduli)
                .map(|(&a, &d)| (d - a) % d)
                .collect(),
        }
    }

    pub fn sub(&self, x: &AbElement, y: &AbElement) -> AbElement {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, x: &AbElement, k: i64) -> AbElement {
        AbElement {
            residues: x
                .residues
                .iter()
                .zip(&self.moduli)
                .map(|(&a, &d)| {
                    let k = (k as i128).rem_euclid(d as i128) as u128;
                    ((a as u128 * k) % d as u128) as u64
                })
                .collect(),
        }
    }

    pub fn element_order(&self, x: &AbElement) -> u64 {
        x.residues
            .iter()
            .zip(&self.moduli)
            .map(|(&a, &d)| d / a.gcd(&d))
            .fold(1, |acc, o| acc.lcm(&o))
    }

    /// All elements in lexicographic order. Only sensible for small groups.
    pub fn elements(&self) -> Vec<AbElement> {
        let mut out = vec![self.zero()];
        for (i, &d) in self.moduli.iter().enumerate() {
            out = out
                .into_iter()
                .flat_map(|x| {
                    (0..d).map(move |r| {
                        let mut y = x.clone();
                        y.residues[i] = r;
                        y
                    })
                })
                .collect();
        }
        out
    }

    pub fn whole(&self) -> AbSubgroup {
        AbSubgroup::from_lattice(self.clone(), identity_lattice(self.dim()))
    }

    pub fn trivial_subgroup(&self) -> AbSubgroup {
        let basis = self
            .moduli
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let mut v = vec![0u64; self.dim()];
                v[i] = d;
                v
            })
            .collect();
        AbSubgroup {
            ambient: self.clone(),
            basis,
        }
    }

    pub fn subgroup(&self, gens: &[AbElement]) -> Result<AbSubgroup> {
        AbSubgroup::from_generators(self, gens)
    }

    fn relation_vectors(&self) -> Vec<IntVec> {
        self.moduli
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let mut v = vec![BigInt::zero(); self.dim()];
                v[i] = BigInt::from(d);
                v
            })
            .collect()
    }
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return f.write_str("1");
        }
        for (i, d) in self.moduli.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "Z/{d}")?;
        }
        Ok(())
    }
}

impl VoltageGroup for AbGroup {
    type Elem = AbElement;

    fn zero(&self) -> AbElement {
        AbGroup::zero(self)
    }
    fn add(&self, a: &AbElement, b: &AbElement) -> AbElement {
        AbGroup::add(self, a, b)
    }
    fn neg(&self, a: &AbElement) -> AbElement {
        AbGroup::neg(self, a)
    }
}

fn identity_lattice(r: usize) -> Vec<Vec<u64>> {
    (0..r)
        .map(|i| (0..r).map(|j| (i == j) as u64).collect())
        .collect()
}

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

fn lift(x: &AbElement) -> IntVec {
    x.residues.iter().map(|&r| big(r)).collect()
}

fn to_u64(x: &BigInt) -> u64 {
    x.to_u64().expect("lattice entries are bounded by the moduli")
}

/// A subgroup of a finite abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbSubgroup {
    ambient: AbGroup,
    basis: Vec<Vec<u64>>,
}

impl AbSubgroup {
    pub fn from_generators(ambient: &AbGroup, gens: &[AbElement]) -> Result<Self> {
        let mut vecs = Vec::with_capacity(gens.len() + ambient.dim());
        for g in gens {
            ambient.check_dim(g.residues.len())?;
            vecs.push(lift(g));
        }
        vecs.extend(ambient.relation_vectors());
        Ok(Self::from_int_lattice(ambient.clone(), &vecs))
    }

    fn from_int_lattice(ambient: AbGroup, gens: &[IntVec]) -> Self {
        let h = lattice::hnf(gens);
        debug_assert_eq!(h.len(), ambient.dim());
        let basis = h.iter().map(|v| v.iter().map(to_u64).collect()).collect();
        AbSubgroup { ambient, basis }
    }

    fn from_lattice(ambient: AbGroup, basis: Vec<Vec<u64>>) -> Self {
        AbSubgroup { ambient, basis }
    }

    pub fn ambient(&self) -> &AbGroup {
        &self.ambient
    }

    /// Canonical Hermite basis of the lattice `L`, one vector per factor.
    pub fn hnf_basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    fn int_basis(&self) -> Vec<IntVec> {
        self.basis.iter().map(|v| v.iter().map(|&x| big(x)).collect()).collect()
    }

    fn same_ambient(&self, other: &AbSubgroup) -> Result<()> {
        if self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Error::AmbientMismatch)
        }
    }

    /// `|S| = |A| / [Z^r : L]`, the product of `d_j / pivot_j`.
    pub fn order(&self) -> BigUint {
        self.ambient
            .moduli
            .iter()
            .enumerate()
            .map(|(j, &d)| BigUint::from(d / self.basis[j][j]))
            .product()
    }

    /// `[A : S]`, the product of the pivots.
    pub fn index(&self) -> BigUint {
        self.basis.iter().enumerate().map(|(j, v)| BigUint::from(v[j])).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.order().is_one()
    }

    pub fn is_whole(&self) -> bool {
        self.index().is_one()
    }

    /// Canonical representative of `x + S`: the least lexicographic lift with
    /// coordinates in `[0, d_i)`.
    pub fn reduce(&self, x: &AbElement) -> Result<AbElement> {
        self.ambient.check_dim(x.residues.len())?;
        let moduli = &self.ambient.moduli;
        let mut cur: Vec<u64> = x
            .residues
            .iter()
            .zip(moduli)
            .map(|(&a, &d)| a % d)
            .collect();
        for (j, v) in self.basis.iter().enumerate() {
            let q = cur[j] / v[j];
            if q == 0 {
                continue;
            }
            for k in j..cur.len() {
                let d = moduli[k] as u128;
                let sub = (q as u128 * v[k] as u128) % d;
                cur[k] = ((cur[k] as u128 + d - sub) % d) as u64;
            }
        }
        Ok(AbElement { residues: cur })
    }

    pub fn contains(&self, x: &AbElement) -> Result<bool> {
        Ok(self.reduce(x)?.is_zero())
    }

    pub fn sum(&self, other: &AbSubgroup) -> Result<AbSubgroup> {
        self.same_ambient(other)?;
        let mut gens = self.int_basis();
        gens.extend(other.int_basis());
        Ok(Self::from_int_lattice(self.ambient.clone(), &gens))
    }

    /// Hermite basis of `{(v, v) : v ∈ L1} + {(w, 0) : w ∈ L2}`. Vectors whose
    /// first half vanishes have second halves spanning `L1 ∩ L2`.
    fn stacked(&self, other: &AbSubgroup) -> Vec<IntVec> {
        let r = self.ambient.dim();
        let mut gens = Vec::with_capacity(2 * r);
        for v in self.int_basis() {
            let mut row = v.clone();
            row.extend(v);
            gens.push(row);
        }
        for w in other.int_basis() {
            let mut row = w;
            row.extend(std::iter::repeat(BigInt::zero()).take(r));
            gens.push(row);
        }
        lattice::hnf(&gens)
    }

    pub fn intersect(&self, other: &AbSubgroup) -> Result<AbSubgroup> {
        self.same_ambient(other)?;
        let r = self.ambient.dim();
        let second: Vec<IntVec> = self
            .stacked(other)
            .into_iter()
            .filter(|v| v[..r].iter().all(Zero::is_zero))
            .map(|v| v[r..].to_vec())
            .collect();
        if r == 0 {
            return Ok(self.clone());
        }
        Ok(Self::from_int_lattice(self.ambient.clone(), &second))
    }

    /// Canonical representative of `(x + self) ∩ (y + other)`, a coset of
    /// `self ∩ other`, or `None` if the cosets are disjoint.
    pub fn coset_intersection(&self, x: &AbElement, other: &AbSubgroup, y: &AbElement) -> Result<Option<AbElement>> {
        self.same_ambient(other)?;
        self.ambient.check_dim(x.residues.len())?;
        self.ambient.check_dim(y.residues.len())?;
        let r = self.ambient.dim();
        let z: IntVec = lift(&self.ambient.sub(y, x));
        let mut cur: IntVec = z.into_iter().chain(std::iter::repeat(BigInt::zero()).take(r)).collect();
        for v in self.stacked(other) {
            let Some(p) = v.iter().position(|c| !c.is_zero()) else { continue };
            if p >= r {
                break;
            }
            let (q, rem) = cur[p].div_rem(&v[p]);
            if !rem.is_zero() {
                return Ok(None);
            }
            for (c, e) in cur.iter_mut().zip(&v) {
                *c -= &q * e;
            }
        }
        if cur[..r].iter().any(|c| !c.is_zero()) {
            return Ok(None);
        }
        // cur = (0, -f) with f ∈ L1 and (y - x) - f ∈ L2
        let f: Vec<i64> = cur[r..]
            .iter()
            .zip(&self.ambient.moduli)
            .map(|(c, &d)| {
                let m = (-c).mod_floor(&big(d));
                m.to_i64().expect("reduced below modulus")
            })
            .collect();
        let f = self.ambient.element(&f)?;
        let meet = self.intersect(other)?;
        Ok(Some(meet.reduce(&self.ambient.add(x, &f))?))
    }

    /// Minimal number of generators of `S`: the count of invariant factors
    /// greater than one of `L / D·Z^r`.
    pub fn min_generators(&self) -> usize {
        let r = self.ambient.dim();
        // columns of C solve H c = d_i e_i, so S ≅ Z^r / C·Z^r
        let mut c_matrix = vec![vec![BigInt::zero(); r]; r];
        for (i, &d) in self.ambient.moduli.iter().enumerate() {
            let mut rhs: IntVec = vec![BigInt::zero(); r];
            rhs[i] = big(d);
            for k in 0..r {
                let mut acc = rhs[k].clone();
                for j in 0..k {
                    acc -= &c_matrix[j][i] * big(self.basis[j][k]);
                }
                let pivot = big(self.basis[k][k]);
                debug_assert!(acc.is_multiple_of(&pivot));
                c_matrix[k][i] = acc / pivot;
            }
        }
        lattice::snf_diagonal(&c_matrix)
            .iter()
            .filter(|d| !d.is_one())
            .count()
    }

    /// Nonzero Hermite basis vectors reduced into `A`; they generate `S`.
    pub fn generators(&self) -> Vec<AbElement> {
        self.basis
            .iter()
            .map(|v| AbElement {
                residues: v.iter().zip(&self.ambient.moduli).map(|(&x, &d)| x % d).collect(),
            })
            .filter(|x| !x.is_zero())
            .collect()
    }

    /// `A / S` with its projection.
    pub fn quotient(&self) -> Result<Quotient> {
        quotient_data(&self.ambient, self)
    }
}

/// The quotient `A / M` presented by invariant factors, with the projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    source: AbGroup,
    target: AbGroup,
    rows: Vec<Vec<u64>>,
}

impl Quotient {
    pub fn source(&self) -> &AbGroup {
        &self.source
    }

    pub fn target(&self) -> &AbGroup {
        &self.target
    }

    pub fn project(&self, x: &AbElement) -> AbElement {
        let residues = self
            .rows
            .iter()
            .zip(&self.target.moduli)
            .map(|(row, &s)| {
                let s = s as u128;
                row.iter()
                    .zip(&x.residues)
                    .fold(0u128, |acc, (&u, &a)| (acc + (u as u128 * a as u128) % s) % s) as u64
            })
            .collect();
        AbElement { residues }
    }
}

pub fn quotient_data(ambient: &AbGroup, sub: &AbSubgroup) -> Result<Quotient> {
    if sub.ambient != *ambient {
        return Err(Error::AmbientMismatch);
    }
    let r = ambient.dim();
    // matrix whose columns are the basis vectors of L
    let h: Vec<IntVec> = (0..r)
        .map(|k| (0..r).map(|j| big(sub.basis[j][k])).collect())
        .collect();
    let smith = lattice::smith(&h);
    let mut moduli = Vec::new();
    let mut rows = Vec::new();
    for (i, s) in smith.diagonal.iter().enumerate() {
        if s.is_one() {
            continue;
        }
        let s_u = s
            .to_u64()
            .ok_or_else(|| Error::Overflow(format!("invariant factor {s} exceeds u64")))?;
        moduli.push(s_u);
        rows.push(smith.left[i].iter().map(|u| to_u64(&u.mod_floor(s))).collect());
    }
    Ok(Quotient {
        source: ambient.clone(),
        target: AbGroup { moduli },
        rows,
    })
}

/// An element of `⊕_{m≥2} Z/mZ`, as its nonzero components.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorsionElement {
    support: Vec<(u64, u64)>,
}

impl TorsionElement {
    /// Builds an element from `(modulus, residue)` pairs; moduli must be
    /// distinct and at least 2. Residues are reduced and zeros dropped.
    pub fn new<I: IntoIterator<Item = (u64, i64)>>(pairs: I) -> Result<Self> {
        let mut support: Vec<(u64, u64)> = Vec::new();
        let mut seen: Vec<u64> = Vec::new();
        for (m, r) in pairs {
            if m < 2 {
                return Err(Error::InvalidTorsion(format!("modulus {m} must be at least 2")));
            }
            if seen.contains(&m) {
                return Err(Error::InvalidTorsion(format!("modulus {m} repeated")));
            }
            seen.push(m);
            let r = (r as i128).rem_euclid(m as i128) as u64;
            if r != 0 {
                support.push((m, r));
            }
        }
        support.sort_unstable();
        Ok(TorsionElement { support })
    }

    pub fn support(&self) -> &[(u64, u64)] {
        &self.support
    }
}

/// An element `p/q` of `Q/Z` in lowest terms with `0 <= p < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QmodZElement {
    num: u64,
    den: u64,
}

impl QmodZElement {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q <= 0 {
            return Err(Error::InvalidTorsion(format!("denominator {q} must be positive")));
        }
        let p = p.rem_euclid(q) as u64;
        let q = q as u64;
        let g = p.gcd(&q);
        Ok(QmodZElement { num: p / g, den: q / g })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }
}

impl fmt::Display for QmodZElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AmbientElement {
    Torsion(TorsionElement),
    QmodZ(QmodZElement),
}

fn check_bound(order: u128, max_order: u64) -> Result<()> {
    if order > max_order as u128 {
        Err(Error::AmbientTooLarge {
            order: order.to_string(),
            bound: max_order,
        })
    } else {
        Ok(())
    }
}

/// Embeds elements of one kind into a finite ambient group. An empty list
/// yields the trivial group.
pub fn embed_ambient(elements: &[AmbientElement], max_order: u64) -> Result<(AbGroup, Vec<AbElement>)> {
    let torsion: Vec<TorsionElement> = elements
        .iter()
        .filter_map(|e| match e {
            AmbientElement::Torsion(t) => Some(t.clone()),
            AmbientElement::QmodZ(_) => None,
        })
        .collect();
    let fractions: Vec<QmodZElement> = elements
        .iter()
        .filter_map(|e| match e {
            AmbientElement::QmodZ(q) => Some(*q),
            AmbientElement::Torsion(_) => None,
        })
        .collect();
    match (torsion.is_empty(), fractions.is_empty()) {
        (false, false) => Err(Error::MixedTorsionKinds),
        (true, false) => embed_qmodz(&fractions, max_order),
        _ => embed_torsion(&[], &torsion, max_order),
    }
}

/// Torsion-sum case: the ambient is the product of `Z/mZ` over the declared
/// moduli and all supports, sorted ascending without repeats.
pub fn embed_torsion(
    declared: &[u64],
    elements: &[TorsionElement],
    max_order: u64,
) -> Result<(AbGroup, Vec<AbElement>)> {
    let mut moduli: Vec<u64> = declared.to_vec();
    moduli.extend(elements.iter().flat_map(|e| e.support.iter().map(|&(m, _)| m)));
    if let Some(&m) = moduli.iter().find(|&&m| m < 2) {
        return Err(Error::InvalidTorsion(format!("modulus {m} must be at least 2")));
    }
    moduli.sort_unstable();
    moduli.dedup();
    let order = moduli
        .iter()
        .try_fold(1u128, |acc, &m| acc.checked_mul(m as u128))
        .ok_or_else(|| Error::Overflow("ambient order".into()))?;
    check_bound(order, max_order)?;
    let images = elements
        .iter()
        .map(|e| {
            let residues = moduli
                .iter()
                .map(|m| e.support.iter().find(|(mm, _)| mm == m).map_or(0, |&(_, r)| r))
                .collect();
            AbElement { residues }
        })
        .collect();
    Ok((AbGroup { moduli }, images))
}

/// `Q/Z` case: every finite subgroup is cyclic, so the ambient is `Z/L` with
/// `L` the lcm of the denominators and `p/q ↦ p·L/q`.
pub fn embed_qmodz(elements: &[QmodZElement], max_order: u64) -> Result<(AbGroup, Vec<AbElement>)> {
    let mut lcm: u128 = 1;
    for e in elements {
        lcm = lcm
            .checked_div(lcm.gcd(&(e.den as u128)))
            .and_then(|x| x.checked_mul(e.den as u128))
            .ok_or_else(|| Error::Overflow("lcm of denominators".into()))?;
        check_bound(lcm, max_order)?;
    }
    check_bound(lcm, max_order)?;
    let l = lcm as u64;
    let images = elements
        .iter()
        .map(|e| AbElement {
            residues: vec![e.num * (l / e.den)],
        })
        .collect();
    Ok((AbGroup { moduli: vec![l] }, images))
}

pub fn hnf(gens: &[IntVec]) -> Vec<IntVec> {
    lattice::hnf(gens)
}

pub fn snf_diagonal(matrix: &[IntVec]) -> Vec<BigInt> {
    lattice::snf_diagonal(matrix)
}
