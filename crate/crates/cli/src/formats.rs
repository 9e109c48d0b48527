//! Text formats read and written by the command line tool.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use densework_core::constructions::delta02::{Constant, DecimalTruncations};
use densework_core::constructions::RationalSeq;
use densework_core::eop::{Axiom, EnumOperator, FiniteSet};
use densework_core::generic::SimilarityReport;
use densework_core::machines::{Instruction, Program};
use densework_core::{DensityProfile, Rational};
use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Parses `INC r`, `DJZ r addr`, `JMP addr`, `OUT v`, `QRY r`, one per line.
/// Blank lines and `#` comments are ignored.
pub fn parse_program(text: &str) -> Result<Program> {
    let mut ins = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let op = words.next().unwrap_or("").to_ascii_uppercase();
        let args: Vec<u64> = words
            .map(|w| w.parse::<u64>().with_context(|| format!("line {}: bad operand {w:?}", no + 1)))
            .collect::<Result<_>>()?;
        let want = match op.as_str() {
            "INC" | "JMP" | "OUT" | "QRY" => 1,
            "DJZ" => 2,
            _ => bail!("line {}: unknown instruction {op:?}", no + 1),
        };
        if args.len() != want {
            bail!("line {}: {op} takes {want} operand(s), got {}", no + 1, args.len());
        }
        ins.push(match op.as_str() {
            "INC" => Instruction::Inc(args[0]),
            "DJZ" => Instruction::Djz(args[0], args[1]),
            "JMP" => Instruction::Jmp(args[0]),
            "OUT" => Instruction::Out(args[0]),
            _ => Instruction::Qry(args[0]),
        });
    }
    Ok(Program::new(ins))
}

pub fn format_program(p: &Program) -> String {
    let mut out = String::new();
    for ins in p.instructions() {
        let _ = match *ins {
            Instruction::Inc(r) => writeln!(out, "INC {r}"),
            Instruction::Djz(r, a) => writeln!(out, "DJZ {r} {a}"),
            Instruction::Jmp(a) => writeln!(out, "JMP {a}"),
            Instruction::Out(v) => writeln!(out, "OUT {v}"),
            Instruction::Qry(r) => writeln!(out, "QRY {r}"),
        };
    }
    out
}

/// One axiom per line, `n:index_of_D` in decimal.
pub fn parse_operator(text: &str, max_width: u64) -> Result<EnumOperator> {
    let mut axioms = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (n, idx) = line.split_once(':').ok_or_else(|| anyhow!("line {}: expected n:index", no + 1))?;
        let n: u64 = n.trim().parse().with_context(|| format!("line {}: bad output", no + 1))?;
        let idx: BigUint = idx.trim().parse().with_context(|| format!("line {}: bad index", no + 1))?;
        let d = FiniteSet::from_canonical_index(&idx, max_width).with_context(|| format!("line {}", no + 1))?;
        axioms.push(Axiom { output: n, premise: d });
    }
    Ok(EnumOperator::new(axioms))
}

pub fn format_operator(op: &EnumOperator) -> String {
    let mut out = String::new();
    for ax in op.axioms() {
        let _ = writeln!(out, "{}:{}", ax.output, ax.premise.canonical_index());
    }
    out
}

/// `key=value` lines; `#` starts a comment. Later keys replace earlier ones.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key=value", no + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn parse_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(|w| w.parse::<u64>().with_context(|| format!("bad number {w:?}")))
        .collect()
}

/// `p/q` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: num_bigint::BigInt = p.trim().parse().with_context(|| format!("bad numerator in {s:?}"))?;
    let q: num_bigint::BigInt = q.trim().parse().with_context(|| format!("bad denominator in {s:?}"))?;
    if q == 0.into() {
        bail!("zero denominator in {s:?}");
    }
    Ok(Rational::new(p, q))
}

/// Sets of naturals named on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetSpec {
    Empty,
    All,
    Evens,
    Odds,
    Squares,
    /// `R_k`.
    Slice(u32),
    /// `𝓡(F)` for a finite `F`.
    Coded(BTreeSet<u64>),
    Finite(BTreeSet<u64>),
}

impl SetSpec {
    /// `empty`, `all`, `evens`, `odds`, `squares`, `R:k`, `code:a,b,…`,
    /// `elements:a,b,…` or `file:PATH` (numbers separated by commas or
    /// whitespace).
    pub fn parse(s: &str) -> Result<SetSpec> {
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        Ok(match head {
            "empty" => SetSpec::Empty,
            "all" => SetSpec::All,
            "evens" => SetSpec::Evens,
            "odds" => SetSpec::Odds,
            "squares" => SetSpec::Squares,
            "R" => SetSpec::Slice(rest.parse().with_context(|| format!("bad slice index in {s:?}"))?),
            "code" => SetSpec::Coded(parse_list(rest)?.into_iter().collect()),
            "elements" => SetSpec::Finite(parse_list(rest)?.into_iter().collect()),
            "file" => {
                let text = std::fs::read_to_string(rest).with_context(|| format!("reading {rest}"))?;
                let words = text.split(|c: char| c == ',' || c.is_whitespace()).filter(|w| !w.is_empty());
                let set = words
                    .map(|w| w.parse::<u64>().with_context(|| format!("{rest}: bad number {w:?}")))
                    .collect::<Result<_>>()?;
                SetSpec::Finite(set)
            }
            _ => bail!("unknown set {s:?}"),
        })
    }

    pub fn contains(&self, m: u64) -> bool {
        match self {
            SetSpec::Empty => false,
            SetSpec::All => true,
            SetSpec::Evens => m % 2 == 0,
            SetSpec::Odds => m % 2 == 1,
            SetSpec::Squares => {
                let r = m.isqrt();
                r * r == m
            }
            SetSpec::Slice(k) => m != 0 && m.trailing_zeros() == *k,
            SetSpec::Coded(f) => m != 0 && f.contains(&(m.trailing_zeros() as u64)),
            SetSpec::Finite(f) => f.contains(&m),
        }
    }
}

/// `const:p/q`, `trunc:p/q` (decimal truncations) or `third`.
pub enum SeqSpec {
    Constant(Constant),
    Truncations(DecimalTruncations),
}

impl SeqSpec {
    pub fn parse(s: &str) -> Result<SeqSpec> {
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        Ok(match head {
            "const" => SeqSpec::Constant(Constant(parse_rational(rest)?)),
            "trunc" => SeqSpec::Truncations(DecimalTruncations(parse_rational(rest)?)),
            "third" => SeqSpec::Truncations(DecimalTruncations(Rational::new(1.into(), 3.into()))),
            _ => bail!("unknown sequence {s:?}"),
        })
    }
}

impl RationalSeq for SeqSpec {
    fn term(&self, n: u64) -> Rational {
        match self {
            SeqSpec::Constant(c) => c.term(n),
            SeqSpec::Truncations(t) => t.term(n),
        }
    }
}

pub fn rational_float(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `n,rho_num,rho_den,rho_float`.
pub fn profile_csv(p: &DensityProfile) -> String {
    let mut out = String::from("n,rho_num,rho_den,rho_float\n");
    for (n, rho) in &p.samples {
        let _ = writeln!(out, "{n},{},{},{}", rho.numer(), rho.denom(), rational_float(rho));
    }
    out
}

/// `n,symdiff_num,symdiff_den`.
pub fn similarity_csv(r: &SimilarityReport) -> String {
    let mut out = String::from("n,symdiff_num,symdiff_den\n");
    for (n, d) in &r.samples {
        let _ = writeln!(out, "{n},{},{}", d.numer(), d.denom());
    }
    out
}

/// `m,b` rows of a generic listing, an optional header line allowed.
pub fn parse_listing(text: &str) -> Result<Vec<(u64, bool)>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || (no == 0 && line.starts_with(|c: char| c.is_ascii_alphabetic())) {
            continue;
        }
        let (m, b) = line.split_once(',').ok_or_else(|| anyhow!("line {}: expected m,b", no + 1))?;
        let m: u64 = m.trim().parse().with_context(|| format!("line {}: bad number", no + 1))?;
        let b = match b.trim() {
            "0" => false,
            "1" => true,
            other => bail!("line {}: bit must be 0 or 1, got {other:?}", no + 1),
        };
        out.push((m, b));
    }
    Ok(out)
}

/// Resolves `path` against the directory of `base` unless absolute.
pub fn relative_to(base: &Path, path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new("")).join(p)
    }
}
