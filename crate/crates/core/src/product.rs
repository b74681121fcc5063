//! Finitely generated subgroups of `F_n × A`, `A` finite abelian.
//!
//! A subgroup `K` is stored as a triple: its projection `K₀ ≤ F_n` (a
//! Stallings graph), its fiber `K ∩ A`, and a voltage for every basis element
//! of `K₀`. Then `K = {(x, φ(x) + f) : x ∈ K₀, f ∈ fiber}` where `φ` extends
//! the voltages along the basis. Voltages are kept as canonical coset
//! representatives modulo the fiber, so equal subgroups have equal triples.
//!
//! Ranks use `rk(F_r × B) = r + d(B)`: the abelianization `Z^r ⊕ B` needs
//! `r + d(B)` generators, and a free basis together with a minimal generating
//! set of `B` attains it.

use crate::abelian::{AbElement, AbGroup, AbSubgroup};
use crate::error::{Error, Result};
use crate::fold::VGraph;
use crate::freegroup::{Alphabet, Letter, Word};
use crate::stallings::{petals, Edge, Index, SubgroupGraph};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorPair {
    pub word: Word,
    pub torsion: AbElement,
}

impl GeneratorPair {
    pub fn new(word: Word, torsion: AbElement) -> Self {
        GeneratorPair { word, torsion }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSubgroup {
    alphabet: Alphabet,
    ambient: AbGroup,
    proj: SubgroupGraph,
    fiber: AbSubgroup,
    voltages: Vec<AbElement>,
}

impl ProductSubgroup {
    /// Enriched Stallings folding of the subgroup generated by `gens`.
    pub fn normalize(alphabet: Alphabet, ambient: &AbGroup, gens: &[GeneratorPair]) -> Result<Self> {
        let mut fiber_gens = Vec::new();
        let mut petal_gens = Vec::new();
        for g in gens {
            alphabet.check_word(&g.word)?;
            ambient.check(&g.torsion).map_err(|_| Error::AmbientMismatch)?;
            if g.word.is_identity() {
                fiber_gens.push(g.torsion.clone());
            } else {
                petal_gens.push((&g.word, g.torsion.clone()));
            }
        }
        let rank = alphabet.rank();
        let (num_vertices, edges) = petals(ambient, alphabet, petal_gens)?;
        let folded = VGraph {
            num_vertices,
            base: 0,
            edges,
        }
        .fold(ambient, rank);
        fiber_gens.extend(folded.cycles);
        let fiber = ambient.subgroup(&fiber_gens)?;
        let graph = folded.graph.trim_core().canonical(rank);

        let spv = 2 * rank;
        let mut table: Vec<Option<(usize, AbElement)>> = vec![None; graph.num_vertices * spv];
        for e in &graph.edges {
            let l = Letter::gen(e.gen);
            table[e.src * spv + l.slot()] = Some((e.dst, e.volt.clone()));
            table[e.dst * spv + l.inverse().slot()] = Some((e.src, ambient.neg(&e.volt)));
        }
        let proj = SubgroupGraph::from_canonical(
            alphabet,
            graph.num_vertices,
            graph
                .edges
                .iter()
                .map(|e| Edge {
                    src: e.src,
                    gen: e.gen,
                    dst: e.dst,
                })
                .collect(),
        );
        let voltages = proj
            .basis()
            .iter()
            .map(|w| {
                let (end, total) = w.letters().iter().fold((0usize, ambient.zero()), |(v, acc), l| {
                    let (next, volt) = table[v * spv + l.slot()].as_ref().expect("basis word is a path");
                    (*next, ambient.add(&acc, volt))
                });
                debug_assert_eq!(end, 0);
                fiber.reduce(&total)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductSubgroup {
            alphabet,
            ambient: ambient.clone(),
            proj,
            fiber,
            voltages,
        })
    }

    /// Assembles a subgroup from its projection, fiber and basis voltages.
    pub fn from_parts(proj: SubgroupGraph, fiber: AbSubgroup, voltages: Vec<AbElement>) -> Result<Self> {
        if voltages.len() != proj.rank() {
            return Err(Error::HomomorphismArity {
                expected: proj.rank(),
                got: voltages.len(),
            });
        }
        let ambient = fiber.ambient().clone();
        let voltages = voltages
            .iter()
            .map(|v| {
                ambient.check(v)?;
                fiber.reduce(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductSubgroup {
            alphabet: proj.alphabet(),
            ambient,
            proj,
            fiber,
            voltages,
        })
    }

    /// `F_n × {0}`.
    pub fn free_factor(alphabet: Alphabet, ambient: &AbGroup) -> Self {
        let proj = SubgroupGraph::whole(alphabet);
        let voltages = vec![ambient.zero(); proj.rank()];
        ProductSubgroup {
            alphabet,
            ambient: ambient.clone(),
            proj,
            fiber: ambient.trivial_subgroup(),
            voltages,
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn ambient(&self) -> &AbGroup {
        &self.ambient
    }

    pub fn proj(&self) -> &SubgroupGraph {
        &self.proj
    }

    pub fn fiber(&self) -> &AbSubgroup {
        &self.fiber
    }

    /// Voltages of `proj().basis()`, in the same order.
    pub fn voltages(&self) -> &[AbElement] {
        &self.voltages
    }

    /// A generating set: basis words with their voltages, then `(1, f)` for
    /// the generators `f` of the fiber.
    pub fn generators(&self) -> Vec<GeneratorPair> {
        self.proj
            .basis()
            .iter()
            .zip(&self.voltages)
            .map(|(w, v)| GeneratorPair::new(w.clone(), v.clone()))
            .chain(
                self.fiber
                    .generators()
                    .into_iter()
                    .map(|f| GeneratorPair::new(Word::identity(), f)),
            )
            .collect()
    }

    /// `φ(w)` for `w` in the projection, a representative modulo the fiber.
    pub fn voltage_of(&self, w: &Word) -> Result<AbElement> {
        let coords = self.proj.express_in_basis(w)?;
        Ok(coords.letters().iter().fold(self.ambient.zero(), |acc, l| {
            let v = &self.voltages[l.index()];
            if l.is_inverse() {
                self.ambient.sub(&acc, v)
            } else {
                self.ambient.add(&acc, v)
            }
        }))
    }

    pub fn contains(&self, g: &GeneratorPair) -> Result<bool> {
        self.ambient.check(&g.torsion).map_err(|_| Error::AmbientMismatch)?;
        if !self.proj.membership(&g.word)? {
            return Ok(false);
        }
        let phi = self.voltage_of(&g.word)?;
        self.fiber.contains(&self.ambient.sub(&g.torsion, &phi))
    }

    /// Minimal number of generators: `rank(proj) + d(fiber)`.
    pub fn rank(&self) -> usize {
        self.proj.rank() + self.fiber.min_generators()
    }

    pub fn intersect(&self, other: &ProductSubgroup) -> Result<ProductSubgroup> {
        Ok(self.intersect_detailed(other)?.result)
    }

    pub fn intersect_detailed(&self, other: &ProductSubgroup) -> Result<Intersection> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet.rank(),
                right: other.alphabet.rank(),
            });
        }
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        let ambient = &self.ambient;
        let pullback = self.proj.pullback(&other.proj)?;
        let quotient = self.fiber.sum(&other.fiber)?.quotient()?;

        // ψ(x) = π(φ₁(x) − φ₂(x)) on the basis of the pullback
        let diff = |w: &Word| -> Result<AbElement> {
            Ok(ambient.sub(&self.voltage_of(w)?, &other.voltage_of(w)?))
        };
        let images = pullback
            .basis()
            .iter()
            .map(|w| Ok(quotient.project(&diff(w)?)))
            .collect::<Result<Vec<_>>>()?;
        if cfg!(debug_assertions) {
            let q = quotient.target();
            for (i, bi) in pullback.basis().iter().enumerate().take(4) {
                for (j, bj) in pullback.basis().iter().enumerate().take(4) {
                    let lhs = quotient.project(&diff(&bi.multiply(bj))?);
                    assert_eq!(lhs, q.add(&images[i], &images[j]), "ψ is not additive");
                }
            }
        }
        let target = quotient.target();
        let cover = pullback.finite_quotient_preimage(target, &images, &target.trivial_subgroup())?;
        let proj = cover.graph;
        let fiber = self.fiber.intersect(&other.fiber)?;
        let voltages = proj
            .basis()
            .iter()
            .map(|y| {
                let v1 = self.voltage_of(y)?;
                let v2 = other.voltage_of(y)?;
                Ok(self
                    .fiber
                    .coset_intersection(&v1, &other.fiber, &v2)?
                    .expect("ψ vanishes on the kernel"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Intersection {
            result: ProductSubgroup {
                alphabet: self.alphabet,
                ambient: ambient.clone(),
                proj,
                fiber,
                voltages,
            },
            pullback,
            kernel_index: cover.degree,
        })
    }
}

/// An intersection together with the projection pullback it was cut from.
#[derive(Debug, Clone)]
pub struct Intersection {
    pub result: ProductSubgroup,
    /// `proj₁ ∩ proj₂`.
    pub pullback: SubgroupGraph,
    /// Index of the result's projection in the pullback.
    pub kernel_index: usize,
}

/// `ξ_F(p, q) = (p - 1)(q - 1) + 1` for free groups.
pub fn xi_free(p: u128, q: u128) -> u128 {
    p.saturating_sub(1) * q.saturating_sub(1) + 1
}

/// `rk(H ∩ K) - 1 <= (rk H - 1)(rk K - 1)`, negative factors clamped to zero.
pub fn hanna_neumann_holds(rank_h: usize, rank_k: usize, rank_meet: usize) -> bool {
    let bound = (rank_h.saturating_sub(1) as u128) * (rank_k.saturating_sub(1) as u128);
    (rank_meet as u128) <= bound + 1
}

pub fn check_hanna_neumann(h: &SubgroupGraph, k: &SubgroupGraph) -> Result<bool> {
    let meet = h.pullback(k)?;
    Ok(hanna_neumann_holds(h.rank(), k.rank(), meet.rank()))
}

/// Rank bound for finite extensions of a free group, with `m = |A|`:
/// `rk(I) <= ξ_F(m(h-1)+1, m(k-1)+1) + m - 1`.
pub fn check_kp_bound(m: u64, rank_h: usize, rank_k: usize, rank_meet: usize) -> bool {
    let m = m as u128;
    let p = m * rank_h.saturating_sub(1) as u128 + 1;
    let q = m * rank_k.saturating_sub(1) as u128 + 1;
    (rank_meet as u128) <= xi_free(p, q) + m.saturating_sub(1)
}

/// `rank = index·(n-1) + 1` for a finite-index subgroup; `None` otherwise.
pub fn schreier_holds(g: &SubgroupGraph) -> Option<bool> {
    let index = g.index().finite()?;
    Some(g.rank() == index * (g.alphabet().rank() - 1) + 1)
}

/// The subgroup pair in `F_2 × Z/ℓ` whose intersection has rank
/// `ℓ(h-1)(k-1) + 1` while the pair has ranks `h` and `k`.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub h: u64,
    pub k: u64,
    pub l: u64,
    pub h_subgroup: ProductSubgroup,
    pub k_subgroup: ProductSubgroup,
    pub intersection: ProductSubgroup,
    pub rank_h: usize,
    pub rank_k: usize,
    pub rank_hk: usize,
    pub index_h: Index,
    pub index_k0: Index,
    /// Index in `F_2` of the projection of `F_2 ∩ K`.
    pub index_f2_cap_k: Index,
    pub index_hk: Index,
    pub schreier_holds: bool,
    pub kp_bound_holds: bool,
    pub identity_holds: bool,
}

impl WitnessReport {
    pub fn expected_rank_hk(&self) -> u64 {
        self.l * (self.h - 1) * (self.k - 1) + 1
    }
}

fn preimage_mod(f2: &SubgroupGraph, modulus: u64, images: [i64; 2]) -> Result<SubgroupGraph> {
    let group = AbGroup::cyclic(modulus)?;
    let images = images
        .iter()
        .map(|&x| group.element(&[x]))
        .collect::<Result<Vec<_>>>()?;
    Ok(f2
        .finite_quotient_preimage(&group, &images, &group.trivial_subgroup())?
        .graph)
}

pub fn witness(h: u64, k: u64, l: u64) -> Result<WitnessReport> {
    for (name, value) in [("h", h), ("k", k), ("l", l)] {
        if value < 2 {
            return Err(Error::ParameterRange { name, value });
        }
    }
    let f2 = Alphabet::new(2)?;
    let ambient = AbGroup::cyclic(l)?;
    let whole = SubgroupGraph::whole(f2);

    // H = φ₁⁻¹((h-1)Z), K₀ = φ₂⁻¹((k-1)Z)
    let h0 = preimage_mod(&whole, h - 1, [1, 0])?;
    let k0 = preimage_mod(&whole, k - 1, [0, 1])?;

    let h_gens: Vec<GeneratorPair> = h0
        .basis()
        .iter()
        .map(|w| GeneratorPair::new(w.clone(), ambient.zero()))
        .collect();
    // K = {(x, π(φ₂(x)/(k-1))) : x ∈ K₀}
    let k_gens = k0
        .basis()
        .iter()
        .map(|w| {
            let t = w.exponent_sum(1) / (k as i64 - 1);
            Ok(GeneratorPair::new(w.clone(), ambient.element(&[t])?))
        })
        .collect::<Result<Vec<_>>>()?;
    let h_sub = ProductSubgroup::normalize(f2, &ambient, &h_gens)?;
    let k_sub = ProductSubgroup::normalize(f2, &ambient, &k_gens)?;
    debug_assert_eq!(h_sub.proj(), &h0);
    debug_assert_eq!(k_sub.proj(), &k0);

    let meet = h_sub.intersect(&k_sub)?;
    let f2_cap_k = ProductSubgroup::free_factor(f2, &ambient).intersect(&k_sub)?;

    let rank_h = h_sub.rank();
    let rank_k = k_sub.rank();
    let rank_hk = meet.rank();
    let schreier = [h_sub.proj(), k_sub.proj(), f2_cap_k.proj(), meet.proj()]
        .iter()
        .all(|g| schreier_holds(g).unwrap_or(true));
    let identity_holds = rank_h as u64 == h
        && rank_k as u64 == k
        && rank_hk as u64 == l * (h - 1) * (k - 1) + 1;
    Ok(WitnessReport {
        h,
        k,
        l,
        index_h: h_sub.proj().index(),
        index_k0: k_sub.proj().index(),
        index_f2_cap_k: f2_cap_k.proj().index(),
        index_hk: meet.proj().index(),
        kp_bound_holds: check_kp_bound(l, rank_h, rank_k, rank_hk),
        schreier_holds: schreier,
        identity_holds,
        rank_h,
        rank_k,
        rank_hk,
        h_subgroup: h_sub,
        k_subgroup: k_sub,
        intersection: meet,
    })
}
