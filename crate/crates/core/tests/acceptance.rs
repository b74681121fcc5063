//! Acceptance checks, one line per criterion. Exits nonzero if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use howson::abelian::{AbElement, AbGroup, AbSubgroup};
use howson::freegroup::{Alphabet, Letter, Word};
use howson::presentation::{Presentation, Relator};
use howson::product::{check_kp_bound, hanna_neumann_holds, witness, GeneratorPair, ProductSubgroup};
use howson::random;
use howson::stallings::{Index, SubgroupGraph};

type Check = Result<String, String>;

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    run: fn(&mut Vec<Meet>) -> Check,
}

/// An intersection computed along the way, rechecked by criterion 6.
struct Meet {
    m: u64,
    rank_h: usize,
    rank_k: usize,
    rank_meet: usize,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn witness_grid(meets: &mut Vec<Meet>) -> Check {
    let mut cases = 0;
    for h in 2..=4u64 {
        for k in 2..=4u64 {
            for l in 2..=6u64 {
                let r = witness(h, k, l).map_err(|e| e.to_string())?;
                let expected = (l * (h - 1) * (k - 1) + 1) as usize;
                ensure(
                    r.rank_h == h as usize && r.rank_k == k as usize && r.rank_hk == expected,
                    || format!("({h},{k},{l}): ranks {} {} {}", r.rank_h, r.rank_k, r.rank_hk),
                )?;
                meets.push(Meet {
                    m: l,
                    rank_h: r.rank_h,
                    rank_k: r.rank_k,
                    rank_meet: r.rank_hk,
                });
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} parameter triples"))
}

fn unbounded_probe(meets: &mut Vec<Meet>) -> Check {
    let mut prev = 0;
    for l in 2..=20u64 {
        let r = witness(2, 2, l).map_err(|e| e.to_string())?;
        ensure(r.rank_hk as u64 == l + 1, || format!("l = {l}: rank {}", r.rank_hk))?;
        ensure(r.rank_hk > prev, || format!("l = {l}: not increasing"))?;
        prev = r.rank_hk;
        meets.push(Meet {
            m: l,
            rank_h: r.rank_h,
            rank_k: r.rank_k,
            rank_meet: r.rank_hk,
        });
    }
    Ok(format!("rank(H∩K) = 3..{prev} for l = 2..20"))
}

fn twisted_pair(meets: &mut Vec<Meet>) -> Check {
    let f2 = Alphabet::new(2).unwrap();
    for m in 2..=10u64 {
        let a = AbGroup::cyclic(m).map_err(|e| e.to_string())?;
        let pair = |w: &str, t: i64| GeneratorPair::new(w.parse().unwrap(), a.element(&[t]).unwrap());
        let h = ProductSubgroup::normalize(f2, &a, &[pair("a", 0), pair("b", 0)]).map_err(|e| e.to_string())?;
        let k = ProductSubgroup::normalize(f2, &a, &[pair("a", 0), pair("b", 1)]).map_err(|e| e.to_string())?;
        let meet = h.intersect(&k).map_err(|e| e.to_string())?;
        ensure(meet.rank() as u64 == m + 1, || format!("m = {m}: rank {}", meet.rank()))?;
        meets.push(Meet {
            m,
            rank_h: h.rank(),
            rank_k: k.rank(),
            rank_meet: meet.rank(),
        });
    }
    Ok("m = 2..10".into())
}

fn schreier(_: &mut Vec<Meet>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let groups = random::abelian_groups(30);
    let mut checked = 0;
    for n in [2usize, 3] {
        let alphabet = Alphabet::new(n).unwrap();
        let whole = SubgroupGraph::whole(alphabet);
        for q in &groups {
            for trial in 0..100 {
                let images: Vec<AbElement> = (0..n).map(|_| random::element(&mut rng, q)).collect();
                // half the targets trivial, half random subgroups
                let target = if trial % 2 == 0 {
                    q.trivial_subgroup()
                } else {
                    q.subgroup(&[random::element(&mut rng, q)]).unwrap()
                };
                let cover = whole
                    .finite_quotient_preimage(q, &images, &target)
                    .map_err(|e| e.to_string())?;
                let g = &cover.graph;
                ensure(g.index() == Index::Finite(cover.degree), || format!("{q}: index mismatch"))?;
                ensure(g.rank() == cover.degree * (n - 1) + 1, || {
                    format!("F_{n} -> {q}: rank {} at index {}", g.rank(), cover.degree)
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} finite-index subgroups over {} quotients", groups.len()))
}

fn hanna_neumann(_: &mut Vec<Meet>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1957);
    let f2 = Alphabet::new(2).unwrap();
    let mut worst = 0;
    for i in 0..1000 {
        let h = SubgroupGraph::from_generators(f2, &random::subgroup_words(&mut rng, f2, 4, 6)).unwrap();
        let k = SubgroupGraph::from_generators(f2, &random::subgroup_words(&mut rng, f2, 4, 6)).unwrap();
        let meet = h.pullback(&k).map_err(|e| e.to_string())?;
        ensure(hanna_neumann_holds(h.rank(), k.rank(), meet.rank()), || {
            format!("pair {i}: ranks {} {} meet {}", h.rank(), k.rank(), meet.rank())
        })?;
        worst = worst.max(meet.rank());
    }
    Ok(format!("1000 pairs, 0 violations, largest intersection rank {worst}"))
}

fn kp_bound(meets: &mut Vec<Meet>) -> Check {
    for x in meets.iter() {
        ensure(check_kp_bound(x.m, x.rank_h, x.rank_k, x.rank_meet), || {
            format!("m = {}, ranks {} {} meet {}", x.m, x.rank_h, x.rank_k, x.rank_meet)
        })?;
    }
    Ok(format!("{} intersections, 0 violations", meets.len()))
}

fn all_words(n: usize, max: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    for _ in 0..max {
        let mut next = Vec::new();
        for u in &frontier {
            for s in 0..2 * n {
                let l = Letter::from_slot(s);
                if u.letters().last() != Some(&l.inverse()) {
                    next.push(u.multiply(&Word::letter(l)));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn pullback_oracle(_: &mut Vec<Meet>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f2 = Alphabet::new(2).unwrap();
    let words = all_words(2, 8);
    let mut positives = 0;
    for i in 0..50 {
        let h = SubgroupGraph::from_generators(f2, &random::subgroup_words(&mut rng, f2, 4, 6)).unwrap();
        let k = SubgroupGraph::from_generators(f2, &random::subgroup_words(&mut rng, f2, 4, 6)).unwrap();
        let meet = h.pullback(&k).map_err(|e| e.to_string())?;
        for w in &words {
            let both = h.membership(w).unwrap() && k.membership(w).unwrap();
            ensure(meet.membership(w).unwrap() == both, || format!("pair {i}, word {w}"))?;
            positives += both as usize;
        }
    }
    Ok(format!("50 pairs x {} words, {positives} common members", words.len()))
}

fn product_oracle(_: &mut Vec<Meet>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let f2 = Alphabet::new(2).unwrap();
    let groups = random::abelian_groups(12);
    let words = all_words(2, 6);
    let mut checked = 0;
    for i in 0..20 {
        let a = &groups[i % groups.len()];
        let p = ProductSubgroup::normalize(f2, a, &random::product_generators(&mut rng, f2, a, 3, 4)).unwrap();
        let q = ProductSubgroup::normalize(f2, a, &random::product_generators(&mut rng, f2, a, 3, 4)).unwrap();
        let meet = p.intersect(&q).map_err(|e| e.to_string())?;
        let elems = a.elements();
        for w in &words {
            for t in &elems {
                let g = GeneratorPair::new(w.clone(), t.clone());
                let both = p.contains(&g).unwrap() && q.contains(&g).unwrap();
                ensure(meet.contains(&g).unwrap() == both, || format!("pair {i} in {a}: ({w}, {t})"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("20 pairs, {checked} elements (w, t)"))
}

fn closure(a: &AbGroup, gens: &[AbElement]) -> BTreeSet<AbElement> {
    let mut seen = BTreeSet::from([a.zero()]);
    let mut stack = vec![a.zero()];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = a.add(&x, g);
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    seen
}

/// Smallest `k` such that some `k` elements of `set` generate it.
fn min_generators_by_search(a: &AbGroup, set: &BTreeSet<AbElement>) -> usize {
    let pool: Vec<AbElement> = set.iter().filter(|x| !x.is_zero()).cloned().collect();
    fn search(a: &AbGroup, pool: &[AbElement], k: usize, start: usize, chosen: &mut Vec<AbElement>, target: usize) -> bool {
        if chosen.len() == k {
            return closure(a, chosen).len() == target;
        }
        (start..pool.len()).any(|i| {
            chosen.push(pool[i].clone());
            let found = search(a, pool, k, i + 1, chosen, target);
            chosen.pop();
            found
        })
    }
    (0..).find(|&k| search(a, &pool, k, 0, &mut Vec::new(), set.len())).unwrap()
}

/// `d(S) = max_p log_p |S / pS|`, counted from the element set.
fn min_generators_by_p_rank(a: &AbGroup, set: &BTreeSet<AbElement>) -> usize {
    let n = set.len();
    (2..=n)
        .filter(|&p| n % p == 0 && (2..p).all(|q| p % q != 0))
        .map(|p| {
            let multiples: BTreeSet<AbElement> = set.iter().map(|x| a.scale(x, p as i64)).collect();
            let mut quotient = n / multiples.len();
            let mut rank = 0;
            while quotient > 1 {
                quotient /= p;
                rank += 1;
            }
            rank
        })
        .max()
        .unwrap_or(0)
}

fn abelian(_: &mut Vec<Meet>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let groups = random::abelian_groups(200);
    let mut searched = 0;
    for i in 0..200 {
        let a = &groups[rng.gen_range(0..groups.len())];
        let draw = |rng: &mut ChaCha8Rng| -> Vec<AbElement> {
            (0..rng.gen_range(0..=3)).map(|_| random::element(rng, a)).collect()
        };
        let (g1, g2) = (draw(&mut rng), draw(&mut rng));
        let s: AbSubgroup = a.subgroup(&g1).unwrap();
        let t: AbSubgroup = a.subgroup(&g2).unwrap();
        let (cs, ct) = (closure(a, &g1), closure(a, &g2));
        let union: Vec<AbElement> = g1.iter().chain(&g2).cloned().collect();
        let sum_size = closure(a, &union).len();
        let meet_size = cs.intersection(&ct).count();
        let order = |x: &AbSubgroup| usize::try_from(x.order()).unwrap();
        ensure(order(&s.sum(&t).unwrap()) == sum_size, || format!("case {i}: |S+T| in {a}"))?;
        ensure(order(&s.intersect(&t).unwrap()) == meet_size, || format!("case {i}: |S∩T| in {a}"))?;
        ensure(sum_size * meet_size == cs.len() * ct.len(), || format!("case {i}: order law in {a}"))?;
        if cs.len() <= 64 {
            let d = min_generators_by_search(a, &cs);
            ensure(s.min_generators() == d, || format!("case {i}: d(S) = {} vs {d} in {a}", s.min_generators()))?;
            searched += 1;
        } else {
            let d = min_generators_by_p_rank(a, &cs);
            ensure(s.min_generators() == d, || format!("case {i}: d(S) = {} vs p-rank {d} in {a}", s.min_generators()))?;
        }
    }
    Ok(format!("200 cases, {searched} generator counts by exhaustive search, the rest by p-rank"))
}

fn hnn(_: &mut Vec<Meet>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for i in 0..20 {
        let g = rng.gen_range(0..=5);
        let s = rng.gen_range(0..=4);
        let generators: Vec<String> = (1..=g).map(|j| format!("c{j}")).collect();
        let relators: Vec<Relator> = (0..s)
            .map(|_| {
                let len = rng.gen_range(1..=4);
                Relator::normalized(
                    (0..len)
                        .map(|_| (rng.gen_range(0..g.max(1)), rng.gen_range(1..=3) * if rng.gen() { 1 } else { -1 }))
                        .collect(),
                )
            })
            .collect();
        let relators = if g == 0 { Vec::new() } else { relators };
        let s = relators.len();
        let p = Presentation { generators, relators };
        let p = Presentation::parse(&p.to_string()).map_err(|e| e.to_string())?;
        let e = p.two_generator_embedding();
        let out = &e.presentation;
        ensure(out.relators.len() == s + g + 1, || format!("case {i}: {} relators", out.relators.len()))?;
        ensure(out.generators.len() == g + 3, || format!("case {i}: generator count"))?;
        ensure(out.relators[..s] == p.relators[..], || format!("case {i}: original relators changed"))?;
        let (a, b, t) = (g, g + 1, g + 2);
        ensure(out.relators[s].0 == [(t, -1), (a, 1), (t, 1), (b, -1)], || format!("case {i}: conjugation relator"))?;
        for c in 0..g {
            let k = c as i64 + 1;
            let expected = [(t, -1), (b, -k), (a, 1), (b, k), (t, 1), (a, -k), (b, -1), (a, k), (c, -1)];
            ensure(out.relators[s + 1 + c].0 == expected, || format!("case {i}: relator for c{k}"))?;
        }
        ensure(e.generating_pair == [a, t], || format!("case {i}: generating pair"))?;
        let reparsed = Presentation::parse(&out.to_string()).map_err(|e| e.to_string())?;
        ensure(&reparsed == out, || format!("case {i}: output does not re-parse"))?;
    }
    Ok("20 presentations".into())
}

fn main() {
    let criteria = [
        Criterion { id: 1, title: "witness grid rk(H∩K) = l(h-1)(k-1)+1", limit: Duration::from_secs(5), run: witness_grid },
        Criterion { id: 2, title: "intersection rank unbounded for h = k = 2", limit: Duration::from_secs(2), run: unbounded_probe },
        Criterion { id: 3, title: "<a,b> ∩ <a,bt> in F_2 x Z/m has rank m+1", limit: Duration::from_secs(1), run: twisted_pair },
        Criterion { id: 4, title: "Schreier rank formula on finite-index preimages", limit: Duration::from_secs(10), run: schreier },
        Criterion { id: 5, title: "Hanna Neumann bound on random pairs in F_2", limit: Duration::from_secs(30), run: hanna_neumann },
        Criterion { id: 6, title: "finite-extension rank bound on computed intersections", limit: Duration::from_secs(1), run: kp_bound },
        Criterion { id: 7, title: "pullback membership equals both memberships", limit: Duration::from_secs(60), run: pullback_oracle },
        Criterion { id: 8, title: "product intersection membership equals both memberships", limit: Duration::from_secs(60), run: product_oracle },
        Criterion { id: 9, title: "abelian order law and minimal generator counts", limit: Duration::from_secs(10), run: abelian },
        Criterion { id: 10, title: "two-generator embedding relator schema", limit: Duration::from_secs(1), run: hnn },
    ];
    let mut meets = Vec::new();
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)(&mut meets);
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(_) if elapsed > c.limit => ("FAIL", format!("took longer than {:?}", c.limit)),
            Ok(d) => ("PASS", d),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {:>2}: {} [{detail}] ({:.2}s)", c.id, c.title, elapsed.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
