//! Seeded generators for random words, subgroups and abelian groups.

use rand::Rng;

use crate::abelian::{AbElement, AbGroup};
use crate::freegroup::{Alphabet, Letter, Word};
use crate::product::GeneratorPair;

/// A reduced word of exactly `len` letters, uniform among such words.
pub fn reduced_word<R: Rng + ?Sized>(rng: &mut R, alphabet: Alphabet, len: usize) -> Word {
    let slots = 2 * alphabet.rank();
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::from_slot(rng.gen_range(0..slots));
        if letters.last().is_some_and(|p| p.inverse() == l) {
            continue;
        }
        letters.push(l);
    }
    Word::from_letters(letters)
}

/// Between 1 and `max_gens` nontrivial generators of length at most `max_len`.
pub fn subgroup_words<R: Rng + ?Sized>(rng: &mut R, alphabet: Alphabet, max_gens: usize, max_len: usize) -> Vec<Word> {
    let count = rng.gen_range(1..=max_gens.max(1));
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.max(1));
            reduced_word(rng, alphabet, len)
        })
        .collect()
}

pub fn element<R: Rng + ?Sized>(rng: &mut R, group: &AbGroup) -> AbElement {
    let residues: Vec<i64> = group.moduli().iter().map(|&m| rng.gen_range(0..m) as i64).collect();
    group.element(&residues).expect("residues match the group")
}

pub fn product_generators<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: Alphabet,
    ambient: &AbGroup,
    max_gens: usize,
    max_len: usize,
) -> Vec<GeneratorPair> {
    subgroup_words(rng, alphabet, max_gens, max_len)
        .into_iter()
        .map(|w| GeneratorPair::new(w, element(rng, ambient)))
        .collect()
}

/// Every finite abelian group of order in `2..=max_order`, one per
/// isomorphism class, as invariant factors `d_1 | d_2 | ...`.
pub fn abelian_groups(max_order: u64) -> Vec<AbGroup> {
    fn extend(prefix: &mut Vec<u64>, order: u64, max_order: u64, out: &mut Vec<AbGroup>) {
        if !prefix.is_empty() {
            out.push(AbGroup::new(prefix.clone()).expect("moduli are positive"));
        }
        let last = prefix.last().copied().unwrap_or(1);
        let mut d = last.max(2);
        while order * d <= max_order {
            if d % last == 0 {
                prefix.push(d);
                extend(prefix, order * d, max_order, out);
                prefix.pop();
            }
            d += 1;
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 1, max_order, &mut out);
    out.sort_by_key(|g| (g.order_u64(), g.moduli().to_vec()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn words_are_reduced_with_requested_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f2 = Alphabet::new(2).unwrap();
        for len in 0..20 {
            assert_eq!(reduced_word(&mut rng, f2, len).len(), len);
        }
    }

    #[test]
    fn abelian_group_counts() {
        // number of abelian groups of each order: 1,1,2,1,1,1,3,2 for n = 2..9
        let groups = abelian_groups(9);
        let count = |n: u64| groups.iter().filter(|g| g.order_u64() == Some(n)).count();
        let counts: Vec<usize> = (2..=9).map(count).collect();
        assert_eq!(counts, vec![1, 1, 2, 1, 1, 1, 3, 2]);
        assert_eq!(abelian_groups(30).len(), (2..=30u64).map(partitions_product).sum::<usize>());
    }

    /// Product over prime powers `p^e || n` of the partition number of `e`.
    fn partitions_product(mut n: u64) -> usize {
        let partitions = [1, 1, 2, 3, 5, 7];
        let mut result = 1;
        let mut p = 2;
        while n > 1 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            result *= partitions[e];
            p += 1;
        }
        result
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let f3 = Alphabet::new(3).unwrap();
        let a = subgroup_words(&mut ChaCha8Rng::seed_from_u64(1), f3, 4, 6);
        let b = subgroup_words(&mut ChaCha8Rng::seed_from_u64(1), f3, 4, 6);
        assert_eq!(a, b);
    }
}
