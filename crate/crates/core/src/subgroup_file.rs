//! Text format for subgroups of `F_n × A`.
//!
//! ```text
//! # K = <a, bt> in F_2 x Z/3
//! ambient: free rank=2 torsion=[3]
//! gen: a | (0)
//! gen: b | (1)
//! ```
//!
//! The ambient line is `ambient: free rank=<n>`, optionally followed by
//! ` torsion=[m1,m2,...]` (distinct moduli ≥ 2, naming summands of
//! `⊕ Z/mZ`) or ` qmodz`. Generator lines are `gen: <word>` or
//! `gen: <word> | <torsion>` with torsion `(r1,r2,...)` or `p/q`.

use std::fmt;

use crate::abelian::{self, AbElement, AbGroup, QmodZElement, TorsionElement};
use crate::error::{Error, Result};
use crate::freegroup::{Alphabet, Word, MAX_TEXT_RANK};
use crate::product::GeneratorPair;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TorsionDecl {
    None,
    Moduli(Vec<u64>),
    QmodZ,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenTorsion {
    None,
    Residues(Vec<u64>),
    Fraction(QmodZElement),
}

impl fmt::Display for GenTorsion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenTorsion::None => Ok(()),
            GenTorsion::Residues(rs) => {
                let parts: Vec<String> = rs.iter().map(u64::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
            GenTorsion::Fraction(q) => write!(f, "{q}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupFile {
    pub rank: usize,
    pub torsion: TorsionDecl,
    pub gens: Vec<(Word, GenTorsion)>,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

impl SubgroupFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, TorsionDecl)> = None;
        let mut gens = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| syntax(line_no, format!("expected `key: value`, got {line:?}")))?;
            match (key.trim(), &header) {
                ("ambient", None) => header = Some(parse_ambient(line_no, value.trim())?),
                ("ambient", Some(_)) => return Err(syntax(line_no, "duplicate ambient line")),
                ("gen", Some((rank, decl))) => {
                    gens.push(parse_gen(line_no, value.trim(), *rank, decl)?);
                }
                ("gen", None) => return Err(syntax(line_no, "generator before ambient line")),
                (other, _) => return Err(syntax(line_no, format!("unknown key {other:?}"))),
            }
        }
        let (rank, torsion) = header.ok_or_else(|| syntax(1, "missing ambient line"))?;
        Ok(SubgroupFile { rank, torsion, gens })
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.rank).expect("parsed rank is positive")
    }

    /// Parses a torsion part in this file's ambient syntax. An empty string
    /// is the zero element.
    pub fn parse_torsion(&self, text: &str) -> Result<GenTorsion> {
        parse_torsion(0, text.trim(), &self.torsion)
    }

    /// File text for generators in a declared ambient. The ambient must be
    /// trivial or a product of `Z/m` with distinct `m ≥ 2`.
    pub fn from_generators(alphabet: Alphabet, ambient: &AbGroup, gens: &[GeneratorPair]) -> Result<Self> {
        let moduli = ambient.moduli().to_vec();
        let mut sorted = moduli.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != moduli.len() || moduli.iter().any(|&m| m < 2) {
            return Err(Error::InvalidTorsion(format!(
                "ambient {ambient} has no torsion=[...] declaration"
            )));
        }
        let torsion = if moduli.is_empty() {
            TorsionDecl::None
        } else {
            TorsionDecl::Moduli(moduli)
        };
        let gens = gens
            .iter()
            .map(|g| {
                let t = match torsion {
                    TorsionDecl::None => GenTorsion::None,
                    _ => GenTorsion::Residues(g.torsion.residues().to_vec()),
                };
                (g.word.clone(), t)
            })
            .collect();
        Ok(SubgroupFile {
            rank: alphabet.rank(),
            torsion,
            gens,
        })
    }
}

impl fmt::Display for SubgroupFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ambient: free rank={}", self.rank)?;
        match &self.torsion {
            TorsionDecl::None => {}
            TorsionDecl::Moduli(ms) => {
                let parts: Vec<String> = ms.iter().map(u64::to_string).collect();
                write!(f, " torsion=[{}]", parts.join(","))?;
            }
            TorsionDecl::QmodZ => f.write_str(" qmodz")?,
        }
        writeln!(f)?;
        for (w, t) in &self.gens {
            match t {
                GenTorsion::None => writeln!(f, "gen: {w}")?,
                t => writeln!(f, "gen: {w} | {t}")?,
            }
        }
        Ok(())
    }
}

fn parse_int<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| syntax(line, format!("invalid {what} {:?}", s.trim())))
}

fn parse_ambient(line: usize, value: &str) -> Result<(usize, TorsionDecl)> {
    let rest = value
        .strip_prefix("free")
        .ok_or_else(|| syntax(line, "ambient must start with `free`"))?
        .trim_start();
    let rest = rest
        .strip_prefix("rank=")
        .ok_or_else(|| syntax(line, "expected `rank=<n>`"))?;
    let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
    let rank: usize = parse_int(line, &rest[..end], "rank")?;
    if rank == 0 || rank > MAX_TEXT_RANK {
        return Err(syntax(line, format!("rank must be between 1 and {MAX_TEXT_RANK}")));
    }
    let rest = rest[end..].trim();
    let decl = if rest.is_empty() {
        TorsionDecl::None
    } else if rest == "qmodz" {
        TorsionDecl::QmodZ
    } else if let Some(list) = rest.strip_prefix("torsion=") {
        let inner = list
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| syntax(line, "expected `torsion=[m1,m2,...]`"))?;
        let moduli = inner
            .split(',')
            .map(|m| parse_int::<u64>(line, m, "modulus"))
            .collect::<Result<Vec<_>>>()?;
        let mut seen = Vec::new();
        for &m in &moduli {
            if m < 2 {
                return Err(syntax(line, format!("modulus {m} must be at least 2")));
            }
            if seen.contains(&m) {
                return Err(syntax(line, format!("modulus {m} repeated")));
            }
            seen.push(m);
        }
        TorsionDecl::Moduli(moduli)
    } else {
        return Err(syntax(line, format!("unexpected {rest:?} after rank")));
    };
    Ok((rank, decl))
}

fn parse_gen(line: usize, value: &str, rank: usize, decl: &TorsionDecl) -> Result<(Word, GenTorsion)> {
    let (word_text, torsion_text) = match value.split_once('|') {
        Some((w, t)) => (w.trim(), Some(t.trim())),
        None => (value, None),
    };
    let alphabet = Alphabet::new(rank).expect("rank checked");
    let word = alphabet
        .parse_word(word_text)
        .map_err(|e| syntax(line, e.to_string()))?;
    let torsion = match torsion_text {
        Some(t) => parse_torsion(line, t, decl)?,
        None => parse_torsion(line, "", decl)?,
    };
    Ok((word, torsion))
}

fn parse_torsion(line: usize, text: &str, decl: &TorsionDecl) -> Result<GenTorsion> {
    match decl {
        TorsionDecl::None if text.is_empty() => Ok(GenTorsion::None),
        TorsionDecl::None => Err(syntax(line, "torsion part given but ambient has no torsion")),
        TorsionDecl::Moduli(ms) if text.is_empty() => Ok(GenTorsion::Residues(vec![0; ms.len()])),
        TorsionDecl::Moduli(ms) => {
            let inner = text
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| syntax(line, format!("expected `(r1,...)`, got {text:?}")))?;
            let rs = inner
                .split(',')
                .map(|r| parse_int::<i64>(line, r, "residue"))
                .collect::<Result<Vec<_>>>()?;
            if rs.len() != ms.len() {
                return Err(syntax(
                    line,
                    format!("{} residues for {} moduli", rs.len(), ms.len()),
                ));
            }
            Ok(GenTorsion::Residues(
                rs.iter()
                    .zip(ms)
                    .map(|(&r, &m)| (r as i128).rem_euclid(m as i128) as u64)
                    .collect(),
            ))
        }
        TorsionDecl::QmodZ if text.is_empty() => Ok(GenTorsion::Fraction(QmodZElement::new(0, 1)?)),
        TorsionDecl::QmodZ => {
            let (p, q) = text
                .split_once('/')
                .ok_or_else(|| syntax(line, format!("expected `p/q`, got {text:?}")))?;
            let p: i64 = parse_int(line, p, "numerator")?;
            let q: i64 = parse_int(line, q, "denominator")?;
            QmodZElement::new(p, q)
                .map(GenTorsion::Fraction)
                .map_err(|e| syntax(line, e.to_string()))
        }
    }
}

/// Subgroups from several files placed in one common ambient.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub alphabet: Alphabet,
    pub ambient: AbGroup,
    /// Generators of each input file, in order.
    pub subgroups: Vec<Vec<GeneratorPair>>,
    /// Images of the extra torsion elements.
    pub extra: Vec<AbElement>,
}

/// Unifies the ambients of `files`: torsion sums use the union of declared
/// moduli, `Q/Z` files use the lcm of all denominators. `extra` torsion
/// parts (for instance a membership query) are embedded alongside.
pub fn resolve(files: &[&SubgroupFile], extra: &[GenTorsion], max_ambient: u64) -> Result<Resolved> {
    let Some(first) = files.first() else {
        return Err(Error::Syntax {
            line: 0,
            message: "no subgroup files".into(),
        });
    };
    if let Some(f) = files.iter().find(|f| f.rank != first.rank) {
        return Err(Error::AlphabetMismatch {
            left: first.rank,
            right: f.rank,
        });
    }
    let alphabet = first.alphabet();
    let has_moduli = files.iter().any(|f| matches!(f.torsion, TorsionDecl::Moduli(_)));
    let has_qmodz = files.iter().any(|f| f.torsion == TorsionDecl::QmodZ);
    if has_moduli && has_qmodz {
        return Err(Error::MixedTorsionKinds);
    }
    let parts: Vec<&GenTorsion> = files
        .iter()
        .flat_map(|f| f.gens.iter().map(|(_, t)| t))
        .chain(extra.iter())
        .collect();

    let (ambient, images) = if has_qmodz {
        let fractions = parts
            .iter()
            .map(|t| match t {
                GenTorsion::Fraction(q) => Ok(*q),
                GenTorsion::None => QmodZElement::new(0, 1),
                GenTorsion::Residues(_) => Err(Error::MixedTorsionKinds),
            })
            .collect::<Result<Vec<_>>>()?;
        abelian::embed_qmodz(&fractions, max_ambient)?
    } else {
        let mut declared: Vec<u64> = Vec::new();
        let mut elements = Vec::with_capacity(parts.len());
        for f in files {
            let moduli: &[u64] = match &f.torsion {
                TorsionDecl::Moduli(ms) => ms,
                _ => &[],
            };
            declared.extend_from_slice(moduli);
            for (_, t) in &f.gens {
                elements.push(torsion_element(moduli, t)?);
            }
        }
        // extra parts are written in the syntax of the first file
        let first_moduli: &[u64] = match &first.torsion {
            TorsionDecl::Moduli(ms) => ms,
            _ => &[],
        };
        for t in extra {
            elements.push(torsion_element(first_moduli, t)?);
        }
        abelian::embed_torsion(&declared, &elements, max_ambient)?
    };

    let mut images = images.into_iter();
    let subgroups = files
        .iter()
        .map(|f| {
            f.gens
                .iter()
                .map(|(w, _)| GeneratorPair::new(w.clone(), images.next().expect("one image per part")))
                .collect()
        })
        .collect();
    let extra = images.collect();
    Ok(Resolved {
        alphabet,
        ambient,
        subgroups,
        extra,
    })
}

fn torsion_element(moduli: &[u64], t: &GenTorsion) -> Result<TorsionElement> {
    match t {
        GenTorsion::None => TorsionElement::new([]),
        GenTorsion::Residues(rs) => TorsionElement::new(moduli.iter().copied().zip(rs.iter().map(|&r| r as i64))),
        GenTorsion::Fraction(_) => Err(Error::MixedTorsionKinds),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_free_group() {
        let f = SubgroupFile::parse("ambient: free rank=2\ngen: a\ngen: b").unwrap();
        assert_eq!(f.rank, 2);
        assert_eq!(f.torsion, TorsionDecl::None);
        assert_eq!(f.gens.len(), 2);
        let r = resolve(&[&f], &[], 100).unwrap();
        assert_eq!(r.ambient, AbGroup::trivial());
    }

    #[test]
    fn torsion_generators() {
        let f = SubgroupFile::parse("ambient: free rank=2 torsion=[3]\ngen: a | (0)\ngen: b | (1)").unwrap();
        let r = resolve(&[&f], &[], 100).unwrap();
        assert_eq!(r.ambient.moduli(), &[3]);
        assert_eq!(r.subgroups[0][1].torsion.residues(), &[1]);
    }

    #[test]
    fn qmodz_reduces_to_cyclic() {
        let f = SubgroupFile::parse("ambient: free rank=2 qmodz\ngen: a | 1/2").unwrap();
        let r = resolve(&[&f], &[], 100).unwrap();
        assert_eq!(r.ambient.moduli(), &[2]);
        assert_eq!(r.subgroups[0][0].torsion.residues(), &[1]);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n\nambient: free rank=1 # trailing\n  gen: aaa  \n";
        let f = SubgroupFile::parse(text).unwrap();
        assert_eq!(f.gens[0].0.to_string(), "aaa");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("gen: a", 1),
            ("ambient: free rank=2\ngen: c", 2),
            ("ambient: free rank=2\nfoo: a", 2),
            ("ambient: free rank=2 torsion=[3,3]", 1),
            ("ambient: free rank=2 torsion=[1]", 1),
            ("ambient: free rank=2\n\ngen: a | (1)", 3),
            ("ambient: free rank=2 torsion=[2,3]\ngen: a | (1)", 2),
            ("ambient: free rank=27", 1),
            ("ambient: free rank=2 qmodz\ngen: a | 1/0", 2),
            ("ambient: free rank=2 integers", 1),
            ("ambient: free rank=2\nambient: free rank=2", 2),
        ];
        for (text, line) in cases {
            match SubgroupFile::parse(text) {
                Err(Error::Syntax { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn serializer_round_trip() {
        let text = "ambient: free rank=3 torsion=[4,2]\ngen: abC | (5,1)\ngen: 1 | (2,0)\ngen: cc\n";
        let f = SubgroupFile::parse(text).unwrap();
        let again = SubgroupFile::parse(&f.to_string()).unwrap();
        assert_eq!(f, again);
        assert_eq!(f.gens[0].1, GenTorsion::Residues(vec![1, 1]));
        assert_eq!(f.gens[2].1, GenTorsion::Residues(vec![0, 0]));
    }

    #[test]
    fn unification_takes_union_of_moduli() {
        let h = SubgroupFile::parse("ambient: free rank=2 torsion=[3]\ngen: a | (1)").unwrap();
        let k = SubgroupFile::parse("ambient: free rank=2 torsion=[2,3]\ngen: b | (1,2)").unwrap();
        let r = resolve(&[&h, &k], &[], 100).unwrap();
        assert_eq!(r.ambient.moduli(), &[2, 3]);
        assert_eq!(r.subgroups[0][0].torsion.residues(), &[0, 1]);
        assert_eq!(r.subgroups[1][0].torsion.residues(), &[1, 2]);
    }

    #[test]
    fn unification_failures() {
        let h = SubgroupFile::parse("ambient: free rank=2 torsion=[3]\ngen: a").unwrap();
        let q = SubgroupFile::parse("ambient: free rank=2 qmodz\ngen: a | 1/3").unwrap();
        let f3 = SubgroupFile::parse("ambient: free rank=3\ngen: a").unwrap();
        assert_eq!(resolve(&[&h, &q], &[], 100).unwrap_err(), Error::MixedTorsionKinds);
        assert!(matches!(resolve(&[&h, &f3], &[], 100), Err(Error::AlphabetMismatch { .. })));
    }

    #[test]
    fn max_ambient_guard() {
        let q = SubgroupFile::parse("ambient: free rank=1 qmodz\ngen: a | 1/1000\ngen: aa | 1/1001").unwrap();
        assert!(matches!(resolve(&[&q], &[], 1_000_000), Err(Error::AmbientTooLarge { .. })));
        assert!(resolve(&[&q], &[], 2_000_000).is_ok());
    }
}
