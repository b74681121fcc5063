//! Finite group presentations and the embedding into a 2-generated group.
//!
//! Text format:
//!
//! ```text
//! gens: x y
//! rel: x^2
//! rel: x y X Y
//! ```
//!
//! Relator tokens are `name`, `name^k` or `name^-k`. When every generator
//! name is a single lowercase letter, a token may also be a run of letters
//! with uppercase meaning inverse, as in words.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// A relator as syllables `(generator index, nonzero exponent)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relator(pub Vec<(usize, i64)>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Relator>,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Presentation {
    pub fn parse(text: &str) -> Result<Self> {
        let mut generators: Option<Vec<String>> = None;
        let mut relators = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| syntax(line_no, format!("expected `key: value`, got {line:?}")))?;
            match (key.trim(), &generators) {
                ("gens", None) => {
                    let names: Vec<String> = value.split_whitespace().map(str::to_owned).collect();
                    let mut seen = HashSet::new();
                    for n in &names {
                        if !valid_name(n) {
                            return Err(syntax(line_no, format!("invalid generator name {n:?}")));
                        }
                        if !seen.insert(n.as_str()) {
                            return Err(syntax(line_no, format!("generator {n:?} repeated")));
                        }
                    }
                    generators = Some(names);
                }
                ("gens", Some(_)) => return Err(syntax(line_no, "duplicate gens line")),
                ("rel", Some(names)) => relators.push(parse_relator(line_no, value, names)?),
                ("rel", None) => return Err(syntax(line_no, "relator before gens line")),
                (other, _) => return Err(syntax(line_no, format!("unknown key {other:?}"))),
            }
        }
        let generators = generators.ok_or_else(|| syntax(1, "missing gens line"))?;
        Ok(Presentation { generators, relators })
    }

    /// Embeds the presented group `G = <c_1..c_s | R>` into
    /// `G* = <c_i, a, b, t | R, t⁻¹at = b, t⁻¹b⁻ⁱab^i t = a⁻ⁱba^i c_i>`.
    /// The new relators let every `c_i` be solved for in terms of `a, b, t`,
    /// and `b = t⁻¹at`, so `G*` is generated by `a` and `t`.
    pub fn two_generator_embedding(&self) -> Embedding {
        let mut taken: HashSet<String> = self.generators.iter().cloned().collect();
        let mut fresh = |base: &str| {
            let mut name = base.to_owned();
            while taken.contains(&name) {
                name.push('_');
            }
            taken.insert(name.clone());
            name
        };
        let a_name = fresh("a");
        let b_name = fresh("b");
        let t_name = fresh("t");
        let s = self.generators.len();
        let (a, b, t) = (s, s + 1, s + 2);

        let mut generators = self.generators.clone();
        generators.extend([a_name, b_name, t_name]);
        let mut relators = self.relators.clone();
        relators.push(Relator::normalized(vec![(t, -1), (a, 1), (t, 1), (b, -1)]));
        for c in 0..s {
            let i = (c + 1) as i64;
            relators.push(Relator::normalized(vec![
                (t, -1),
                (b, -i),
                (a, 1),
                (b, i),
                (t, 1),
                (a, -i),
                (b, -1),
                (a, i),
                (c, -1),
            ]));
        }
        Embedding {
            presentation: Presentation { generators, relators },
            generating_pair: [a, t],
        }
    }
}

impl Relator {
    /// Merges adjacent syllables on the same generator and drops zero ones.
    pub fn normalized(syllables: Vec<(usize, i64)>) -> Self {
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(syllables.len());
        for (g, e) in syllables {
            match out.last_mut() {
                Some((h, f)) if *h == g => {
                    *f += e;
                    if *f == 0 {
                        out.pop();
                    }
                }
                _ if e != 0 => out.push((g, e)),
                _ => {}
            }
        }
        Relator(out)
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(g, e)| match e {
                1 => names[g].clone(),
                e => format!("{}^{e}", names[g]),
            })
            .collect();
        parts.join(" ")
    }
}

fn parse_relator(line: usize, value: &str, names: &[String]) -> Result<Relator> {
    let single_letters = names.iter().all(|n| n.len() == 1 && n.chars().all(|c| c.is_ascii_lowercase()));
    let lookup = |n: &str| names.iter().position(|m| m == n);
    let mut syllables = Vec::new();
    for token in value.split_whitespace() {
        let (name, exp) = match token.split_once('^') {
            Some((n, e)) => {
                let e: i64 = e
                    .parse()
                    .map_err(|_| syntax(line, format!("invalid exponent in {token:?}")))?;
                (n, e)
            }
            None => (token, 1),
        };
        if let Some(g) = lookup(name) {
            syllables.push((g, exp));
        } else if single_letters && exp == 1 && token != "1" {
            for c in name.chars() {
                let lower = c.to_ascii_lowercase().to_string();
                match lookup(&lower) {
                    Some(g) if c.is_ascii_uppercase() => syllables.push((g, -1)),
                    Some(g) => syllables.push((g, 1)),
                    None => return Err(syntax(line, format!("unknown generator {c:?}"))),
                }
            }
        } else if token == "1" {
            // explicit identity
        } else {
            return Err(syntax(line, format!("unknown generator {name:?}")));
        }
    }
    Ok(Relator::normalized(syllables))
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gens: {}", self.generators.join(" "))?;
        for r in &self.relators {
            writeln!(f, "rel: {}", r.render(&self.generators))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub presentation: Presentation,
    /// Indices of the two generators that generate the whole group.
    pub generating_pair: [usize; 2],
}
