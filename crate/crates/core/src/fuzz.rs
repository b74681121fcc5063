//! Seeded randomized checks of the intersection and rank invariants.
//!
//! Each trial draws its own seed from the run seed, so any violation can be
//! replayed alone with [`run_trial`].

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abelian::AbGroup;
use crate::error::Result;
use crate::freegroup::{Alphabet, Word};
use crate::product::{check_kp_bound, hanna_neumann_holds, schreier_holds, GeneratorPair, ProductSubgroup};
use crate::random;
use crate::stallings::SubgroupGraph;

/// Largest ambient order drawn for product intersections.
pub const PRODUCT_MAX_ORDER: u64 = 12;
/// Largest quotient order drawn for finite-index subgroups.
pub const QUOTIENT_MAX_ORDER: u64 = 30;
const SAMPLED_WORDS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzConfig {
    pub count: usize,
    pub seed: u64,
    pub rank: usize,
    pub max_gens: usize,
    pub max_len: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            count: 100,
            seed: 0,
            rank: 2,
            max_gens: 4,
            max_len: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    HannaNeumann,
    PullbackMembership,
    KpBound,
    Schreier,
}

impl Property {
    pub const ALL: [Property; 4] = [
        Property::HannaNeumann,
        Property::PullbackMembership,
        Property::KpBound,
        Property::Schreier,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::HannaNeumann => "hanna_neumann",
            Property::PullbackMembership => "pullback_membership",
            Property::KpBound => "kp_bound",
            Property::Schreier => "schreier",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub checked: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub property: Property,
    pub trial: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzSummary {
    pub config: FuzzConfig,
    /// Per property, in the order of [`Property::ALL`].
    pub tallies: [Tally; 4],
    pub violations: Vec<Violation>,
}

impl FuzzSummary {
    pub fn tally(&self, p: Property) -> Tally {
        self.tallies[p as usize]
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Seed of trial `i` in a run seeded with `seed` (splitmix64 step).
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut z = seed.wrapping_add((trial as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn run(config: FuzzConfig) -> Result<FuzzSummary> {
    let mut tallies = [Tally::default(); 4];
    let mut violations = Vec::new();
    for trial in 0..config.count {
        let seed = trial_seed(config.seed, trial);
        for (property, ok) in run_trial(&config, seed)? {
            let t = &mut tallies[property as usize];
            t.checked += 1;
            if !ok {
                t.violations += 1;
                violations.push(Violation { property, trial, seed });
            }
        }
    }
    Ok(FuzzSummary {
        config,
        tallies,
        violations,
    })
}

/// One trial: each property checked once, reported as `(property, holds)`.
pub fn run_trial(config: &FuzzConfig, seed: u64) -> Result<Vec<(Property, bool)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet = Alphabet::new(config.rank)?;
    let mut results = Vec::with_capacity(4);

    // free intersections
    let hw = random::subgroup_words(&mut rng, alphabet, config.max_gens, config.max_len);
    let kw = random::subgroup_words(&mut rng, alphabet, config.max_gens, config.max_len);
    let h = SubgroupGraph::from_generators(alphabet, &hw)?;
    let k = SubgroupGraph::from_generators(alphabet, &kw)?;
    let meet = h.pullback(&k)?;
    results.push((Property::HannaNeumann, hanna_neumann_holds(h.rank(), k.rank(), meet.rank())));

    let mut samples: Vec<Word> = (0..SAMPLED_WORDS)
        .map(|_| {
            let len = rng.gen_range(0..=config.max_len + 2);
            random::reduced_word(&mut rng, alphabet, len)
        })
        .collect();
    // products of generators land in H, and often in K too when H ≤ K
    for _ in 0..SAMPLED_WORDS / 2 {
        let mut w = Word::identity();
        for _ in 0..rng.gen_range(1..=3) {
            let g = &hw[rng.gen_range(0..hw.len())];
            w = w.multiply(&if rng.gen_bool(0.5) { g.clone() } else { g.invert() });
        }
        samples.push(w);
    }
    samples.extend(meet.basis().iter().cloned());
    let mut agree = true;
    for w in &samples {
        agree &= meet.membership(w)? == (h.membership(w)? && k.membership(w)?);
    }
    results.push((Property::PullbackMembership, agree));

    // product intersections
    let groups = random::abelian_groups(PRODUCT_MAX_ORDER);
    let ambient = &groups[rng.gen_range(0..groups.len())];
    let ph = product_subgroup(&mut rng, alphabet, ambient, config)?;
    let pk = product_subgroup(&mut rng, alphabet, ambient, config)?;
    let pm = ph.intersect(&pk)?;
    let m = ambient.order_u64().expect("small ambient");
    results.push((Property::KpBound, check_kp_bound(m, ph.rank(), pk.rank(), pm.rank())));

    // finite-index preimages
    let groups = random::abelian_groups(QUOTIENT_MAX_ORDER);
    let quotient = &groups[rng.gen_range(0..groups.len())];
    let whole = SubgroupGraph::whole(alphabet);
    let images: Vec<_> = (0..alphabet.rank()).map(|_| random::element(&mut rng, quotient)).collect();
    let target_gens: Vec<_> = (0..rng.gen_range(0..=2)).map(|_| random::element(&mut rng, quotient)).collect();
    let target = quotient.subgroup(&target_gens)?;
    let cover = whole.finite_quotient_preimage(quotient, &images, &target)?;
    let schreier = schreier_holds(&cover.graph) == Some(true)
        && cover.graph.index().finite() == Some(cover.degree);
    results.push((Property::Schreier, schreier));

    Ok(results)
}

fn product_subgroup(
    rng: &mut ChaCha8Rng,
    alphabet: Alphabet,
    ambient: &AbGroup,
    config: &FuzzConfig,
) -> Result<ProductSubgroup> {
    let gens: Vec<GeneratorPair> = random::product_generators(rng, alphabet, ambient, config.max_gens, config.max_len);
    ProductSubgroup::normalize(alphabet, ambient, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_run() {
        let s = run(FuzzConfig {
            count: 0,
            ..FuzzConfig::default()
        })
        .unwrap();
        assert!(s.is_clean());
        assert!(s.tallies.iter().all(|t| t.checked == 0));
    }

    #[test]
    fn deterministic_and_clean() {
        let config = FuzzConfig {
            count: 40,
            seed: 42,
            ..FuzzConfig::default()
        };
        let a = run(config).unwrap();
        assert_eq!(a, run(config).unwrap());
        assert!(a.is_clean(), "{:?}", a.violations);
        for p in Property::ALL {
            assert_eq!(a.tally(p).checked, 40);
        }
    }

    #[test]
    fn trial_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| trial_seed(3, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
