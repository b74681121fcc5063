//! Command implementations behind the `howson` binary.
//!
//! Every command produces a [`Report`]: an ordered list of keys rendered
//! either as `key = value` lines or as a JSON object. Lists become
//! `key[i] = item` lines. Exit codes are 0 on success, 1 when a checked
//! identity or bound fails, and 2 for usage and input errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{Map, Value};

use howson::abelian::{AbElement, AbGroup, DEFAULT_MAX_AMBIENT};
use howson::fuzz::{self, FuzzConfig, Property};
use howson::presentation::Presentation;
use howson::product::{check_kp_bound, hanna_neumann_holds, schreier_holds, witness, GeneratorPair, ProductSubgroup};
use howson::stallings::Index;
use howson::subgroup_file::{self, GenTorsion, SubgroupFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "howson", version, about = "Subgroup intersections in free groups and F_n × A")]
pub struct Cli {
    /// Print a JSON object instead of key = value lines
    #[arg(long, global = true)]
    pub json: bool,

    /// Largest ambient order accepted after unification
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_AMBIENT)]
    pub max_ambient: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Intersect two subgroups and check the rank bounds
    Intersect { h: PathBuf, k: PathBuf },
    /// Rank and index of a subgroup
    Rank { h: PathBuf },
    /// Free basis of the projection with voltages, and fiber generators
    Basis { h: PathBuf },
    /// Membership of a word, with optional torsion part
    Member {
        h: PathBuf,
        word: String,
        torsion: Option<String>,
    },
    /// Build the subgroup pair with ranks h, k whose intersection has rank l(h-1)(k-1)+1
    Witness {
        #[arg(long)]
        h: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        l: u64,
    },
    /// Seeded random checks of the rank bounds and pullback membership
    Fuzz {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_gens: usize,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// Embed a finitely presented group into a 2-generated one
    HnnEmbed { presentation: PathBuf },
}

/// Ordered report; values are strings, integers, booleans or string lists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, Value)>,
}

impl Report {
    pub fn push(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn list<I, S>(&mut self, key: impl Into<String>, items: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        let items: Vec<Value> = items.into_iter().map(|s| Value::String(s.to_string())).collect();
        self.entries.push((key.into(), Value::Array(items)));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.entries {
            match value {
                Value::Array(items) if items.is_empty() => out.push_str(&format!("{key} = []\n")),
                Value::Array(items) => {
                    for (i, item) in items.iter().enumerate() {
                        out.push_str(&format!("{key}[{i}] = {}\n", scalar(item)));
                    }
                }
                v => out.push_str(&format!("{key} = {}\n", scalar(v))),
            }
        }
        out
    }

    pub fn render_json(&self) -> String {
        let map: Map<String, Value> = self.entries.iter().cloned().collect();
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("report serializes");
        s.push('\n');
        s
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// An input or usage error, reported on stderr with exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<(Report, i32), UsageError>;

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() { (String::new(), text) } else { (text, String::new()) };
            return Outcome { stdout, stderr, code };
        }
    };
    match execute(&cli) {
        Ok((report, code)) => Outcome {
            stdout: if cli.json { report.render_json() } else { report.render_text() },
            stderr: String::new(),
            code,
        },
        Err(UsageError(msg)) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            code: EXIT_USAGE,
        },
    }
}

pub fn execute(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Intersect { h, k } => cmd_intersect(&read_subgroup(h)?, &read_subgroup(k)?, cli.max_ambient),
        Command::Rank { h } => cmd_rank(&read_subgroup(h)?, cli.max_ambient),
        Command::Basis { h } => cmd_basis(&read_subgroup(h)?, cli.max_ambient),
        Command::Member { h, word, torsion } => {
            cmd_member(&read_subgroup(h)?, word, torsion.as_deref(), cli.max_ambient)
        }
        Command::Witness { h, k, l } => cmd_witness(*h, *k, *l),
        Command::Fuzz {
            count,
            seed,
            max_gens,
            max_len,
            rank,
        } => cmd_fuzz(FuzzConfig {
            count: *count,
            seed: *seed,
            rank: *rank,
            max_gens: *max_gens,
            max_len: *max_len,
        }),
        Command::HnnEmbed { presentation } => {
            let text = read(presentation)?;
            let p = Presentation::parse(&text).map_err(|e| UsageError(format!("{}: {e}", presentation.display())))?;
            cmd_hnn_embed(&p)
        }
    }
}

fn read(path: &Path) -> Result<String, UsageError> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn read_subgroup(path: &Path) -> Result<SubgroupFile, UsageError> {
    SubgroupFile::parse(&read(path)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn render_pair(ambient: &AbGroup, g: &GeneratorPair) -> String {
    if ambient.dim() == 0 {
        g.word.to_string()
    } else {
        format!("{} | {}", g.word, g.torsion)
    }
}

fn index_value(i: Index) -> Value {
    match i {
        Index::Finite(n) => Value::from(n),
        Index::Infinite => Value::from("infinite"),
    }
}

fn order_value(a: &AbGroup) -> Value {
    match a.order_u64() {
        Some(n) => Value::from(n),
        None => Value::from(a.order().to_string()),
    }
}

fn describe(report: &mut Report, prefix: &str, p: &ProductSubgroup) {
    report.push(format!("{prefix}rank"), p.rank());
    report.push(format!("{prefix}proj_rank"), p.proj().rank());
    report.push(format!("{prefix}fiber_order"), p.fiber().order().to_string());
    report.push(format!("{prefix}fiber_min_generators"), p.fiber().min_generators());
    report.push(format!("{prefix}index"), index_value(p.proj().index()));
}

fn schreier_verdict(p: &ProductSubgroup) -> &'static str {
    match schreier_holds(p.proj()) {
        Some(ok) => verdict(ok),
        None => "n/a",
    }
}

/// `(rk(HK) - 1) / ((rk H - 1)(rk K - 1))` in lowest terms, when defined.
fn scaling(rh: usize, rk: usize, rhk: usize) -> Option<String> {
    let den = (rh.checked_sub(1)? * rk.checked_sub(1)?) as u64;
    if den == 0 {
        return None;
    }
    let num = rhk.saturating_sub(1) as u64;
    let g = gcd(num, den);
    Some(if den == g {
        (num / g).to_string()
    } else {
        format!("{}/{}", num / g, den / g)
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn normalize_file(file: &SubgroupFile, max_ambient: u64) -> Result<(AbGroup, ProductSubgroup), UsageError> {
    let r = subgroup_file::resolve(&[file], &[], max_ambient)?;
    let p = ProductSubgroup::normalize(r.alphabet, &r.ambient, &r.subgroups[0])?;
    Ok((r.ambient, p))
}

pub fn cmd_intersect(h: &SubgroupFile, k: &SubgroupFile, max_ambient: u64) -> CmdResult {
    let r = subgroup_file::resolve(&[h, k], &[], max_ambient)?;
    let ambient = &r.ambient;
    let ph = ProductSubgroup::normalize(r.alphabet, ambient, &r.subgroups[0])?;
    let pk = ProductSubgroup::normalize(r.alphabet, ambient, &r.subgroups[1])?;
    let detail = ph.intersect_detailed(&pk)?;
    let meet = &detail.result;

    let m = ambient.order_u64().ok_or_else(|| UsageError("ambient order overflows".into()))?;
    let hn = hanna_neumann_holds(ph.proj().rank(), pk.proj().rank(), detail.pullback.rank());
    let kp = check_kp_bound(m, ph.rank(), pk.rank(), meet.rank());
    let schreier = schreier_verdict(meet);

    let mut report = Report::default();
    report.push("free_rank", r.alphabet.rank());
    report.push("ambient", ambient.to_string());
    report.push("ambient_order", order_value(ambient));
    describe(&mut report, "H.", &ph);
    describe(&mut report, "K.", &pk);
    describe(&mut report, "HK.", meet);
    report.push("pullback_rank", detail.pullback.rank());
    report.push("kernel_index", detail.kernel_index);
    report.list("HK.generators", meet.generators().iter().map(|g| render_pair(ambient, g)));
    if let Some(s) = scaling(ph.rank(), pk.rank(), meet.rank()) {
        report.push("scaling", s);
    }
    report.push("identical", ph == pk);
    report.push("hanna_neumann_proj", verdict(hn));
    report.push("kp_bound", verdict(kp));
    report.push("schreier", schreier);
    let code = if hn && kp && schreier != "FAIL" { EXIT_OK } else { EXIT_VIOLATION };
    Ok((report, code))
}

pub fn cmd_rank(h: &SubgroupFile, max_ambient: u64) -> CmdResult {
    let (ambient, p) = normalize_file(h, max_ambient)?;
    let mut report = Report::default();
    report.push("free_rank", h.rank);
    report.push("ambient", ambient.to_string());
    report.push("ambient_order", order_value(&ambient));
    describe(&mut report, "", &p);
    let schreier = schreier_verdict(&p);
    report.push("schreier", schreier);
    Ok((report, if schreier == "FAIL" { EXIT_VIOLATION } else { EXIT_OK }))
}

pub fn cmd_basis(h: &SubgroupFile, max_ambient: u64) -> CmdResult {
    let (ambient, p) = normalize_file(h, max_ambient)?;
    let mut report = Report::default();
    report.push("ambient", ambient.to_string());
    report.push("rank", p.rank());
    let basis: Vec<String> = p
        .proj()
        .basis()
        .iter()
        .zip(p.voltages())
        .map(|(w, v)| render_pair(&ambient, &GeneratorPair::new(w.clone(), v.clone())))
        .collect();
    report.list("basis", basis);
    report.list("fiber", p.fiber().generators().iter().map(AbElement::to_string));
    Ok((report, EXIT_OK))
}

pub fn cmd_member(h: &SubgroupFile, word: &str, torsion: Option<&str>, max_ambient: u64) -> CmdResult {
    let w = h.alphabet().parse_word(word)?;
    let t = match torsion {
        Some(t) => h.parse_torsion(t)?,
        None => h.parse_torsion("")?,
    };
    let extra: Vec<GenTorsion> = vec![t];
    let r = subgroup_file::resolve(&[h], &extra, max_ambient)?;
    let p = ProductSubgroup::normalize(r.alphabet, &r.ambient, &r.subgroups[0])?;
    let g = GeneratorPair::new(w, r.extra[0].clone());
    let mut report = Report::default();
    report.push("word", g.word.to_string());
    if r.ambient.dim() > 0 {
        report.push("torsion", g.torsion.to_string());
    }
    report.push("member", p.contains(&g)?);
    Ok((report, EXIT_OK))
}

pub fn cmd_witness(h: u64, k: u64, l: u64) -> CmdResult {
    let w = witness(h, k, l)?;
    let ambient = w.h_subgroup.ambient().clone();
    let alphabet = w.h_subgroup.alphabet();
    let h_file = SubgroupFile::from_generators(alphabet, &ambient, &w.h_subgroup.generators())?;
    let k_file = SubgroupFile::from_generators(alphabet, &ambient, &w.k_subgroup.generators())?;

    let mut report = Report::default();
    report.push("h", h);
    report.push("k", k);
    report.push("l", l);
    report.push("ambient", ambient.to_string());
    report.push("rank_H", w.rank_h);
    report.push("rank_K", w.rank_k);
    report.push("rank_HK", w.rank_hk);
    report.push("expected_rank_HK", w.expected_rank_hk());
    report.push("index_H", index_value(w.index_h));
    report.push("index_K0", index_value(w.index_k0));
    report.push("index_F2_cap_K", index_value(w.index_f2_cap_k));
    report.push("index_HK", index_value(w.index_hk));
    if let Some(s) = scaling(w.rank_h, w.rank_k, w.rank_hk) {
        report.push("scaling", s);
    }
    report.push("schreier", verdict(w.schreier_holds));
    report.push("kp_bound", verdict(w.kp_bound_holds));
    report.push("identity", verdict(w.identity_holds));
    report.list("H.file", h_file.to_string().lines());
    report.list("K.file", k_file.to_string().lines());
    let ok = w.identity_holds && w.schreier_holds && w.kp_bound_holds;
    Ok((report, if ok { EXIT_OK } else { EXIT_VIOLATION }))
}

pub fn cmd_fuzz(config: FuzzConfig) -> CmdResult {
    if config.rank == 0 || config.max_gens == 0 || config.max_len == 0 {
        return Err(UsageError("rank, max-gens and max-len must be positive".into()));
    }
    let summary = fuzz::run(config)?;
    let mut report = Report::default();
    report.push("count", config.count);
    report.push("seed", config.seed);
    report.push("rank", config.rank);
    report.push("max_gens", config.max_gens);
    report.push("max_len", config.max_len);
    for p in Property::ALL {
        let t = summary.tally(p);
        report.push(format!("{p}.checked"), t.checked);
        report.push(format!("{p}.violations"), t.violations);
    }
    report.list(
        "violations",
        summary
            .violations
            .iter()
            .map(|v| format!("{} trial={} seed={}", v.property, v.trial, v.seed)),
    );
    Ok((report, if summary.is_clean() { EXIT_OK } else { EXIT_VIOLATION }))
}

pub fn cmd_hnn_embed(p: &Presentation) -> CmdResult {
    let e = p.two_generator_embedding();
    let g = &e.presentation;
    let mut report = Report::default();
    report.push("input_generators", p.generators.len());
    report.push("input_relators", p.relators.len());
    report.push("generators", g.generators.join(" "));
    report.push(
        "generating_pair",
        format!("{} {}", g.generators[e.generating_pair[0]], g.generators[e.generating_pair[1]]),
    );
    report.push("relator_count", g.relators.len());
    report.list("relators", g.relators.iter().map(|r| r.render(&g.generators)));
    Ok((report, EXIT_OK))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_rendering() {
        let mut r = Report::default();
        r.push("rank", 3);
        r.push("ok", true);
        r.push("name", "Z/3");
        r.list("gens", ["a", "bb"]);
        r.list("none", Vec::<String>::new());
        assert_eq!(r.render_text(), "rank = 3\nok = true\nname = Z/3\ngens[0] = a\ngens[1] = bb\nnone = []\n");
        assert_eq!(r.get("rank"), Some(&Value::from(3)));
    }

    #[test]
    fn json_rendering_keeps_order() {
        let mut r = Report::default();
        r.push("z", 1);
        r.push("a", "x");
        let json = r.render_json();
        assert!(json.find("\"z\"").unwrap() < json.find("\"a\"").unwrap());
        assert!(json.ends_with("}\n"));
    }

    #[test]
    fn scaling_ratio() {
        assert_eq!(scaling(2, 2, 4).as_deref(), Some("3"));
        assert_eq!(scaling(3, 3, 3).as_deref(), Some("1/2"));
        assert_eq!(scaling(1, 3, 1), None);
        assert_eq!(scaling(0, 3, 0), None);
    }
}
