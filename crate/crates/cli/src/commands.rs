use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use densework_core::constructions::{
    delta02_density_set, interval_diagonalization, trace_export, Construction, DiagonalConstruction,
    EventKind, GenericPairConstruction, NoSubsetConstruction, RationalSeq, SimpleConstruction,
};
use densework_core::density::{
    density_profile_with, prefix_density, symdiff_density, TailWindow,
};
use densework_core::eop::{compose, FiniteSet};
use densework_core::generic::{
    coarse_from_limit, decode_from_coarse, generic_similarity_verdict, listings, GenericListing,
    ListingDecoder, StabilizingApprox,
};
use densework_core::machines::{FuelResult, MachineUniverse};
use densework_core::partition;
use densework_core::{Error as CoreError, NatSetPrefix, Rational};
use num_traits::Signed;

use crate::formats::{self, SeqSpec, SetSpec};
use crate::{usage, CliError, DecodeCoarseArgs, DecodeRArgs, Delta02Args, DensityArgs, EncodeRArgs, EopCommand, Report, RunArgs};

type Result<T> = std::result::Result<T, CliError>;

fn check_out(out: &Option<PathBuf>) -> Result<()> {
    if let Some(p) = out {
        let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !dir.is_dir() {
            return Err(usage(format!("output directory {} does not exist", dir.display())));
        }
    }
    Ok(())
}

fn core_err(e: CoreError) -> CliError {
    CliError::Other(anyhow!(e))
}

fn density_line(name: &str, a: &NatSetPrefix, n: u64) -> Result<String> {
    let rho = prefix_density(a, n).map_err(core_err)?;
    Ok(format!("rho_{n}({name}) = {rho} ≈ {:.6}", formats::rational_float(&rho)))
}

pub fn density(a: DensityArgs) -> Result<Report> {
    check_out(&a.out)?;
    let set = SetSpec::parse(&a.set).map_err(|e| usage(e.to_string()))?;
    let points = formats::parse_list(&a.points).map_err(|e| usage(e.to_string()))?;
    if points.is_empty() || points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("--points must be a nonempty strictly increasing list"));
    }
    let window = match a.window.as_str() {
        "last-half" => TailWindow::LastHalf,
        "all" => TailWindow::All,
        w => match w.strip_prefix("last:").and_then(|k| k.parse::<usize>().ok()) {
            Some(k) if k > 0 => TailWindow::Last(k),
            _ => return Err(usage(format!("unknown window {w:?}"))),
        },
    };
    let last = *points.last().unwrap();
    let bound = last.checked_add(1).ok_or_else(|| usage("sample point too large"))?;
    let prefix = NatSetPrefix::from_fn(bound, |m| set.contains(m));
    if let Some(other) = &a.against {
        let other = SetSpec::parse(other).map_err(|e| usage(e.to_string()))?;
        let b = NatSetPrefix::from_fn(bound, |m| other.contains(m));
        let report = generic_similarity_verdict(&prefix, &b, &points, &Rational::from_integer(0.into()))
            .map_err(core_err)?;
        let d = symdiff_density(&prefix, &b, last).map_err(core_err)?;
        return Ok(Report {
            document: formats::similarity_csv(&report),
            summary: format!(
                "symdiff density at {last} = {d}; nonincreasing across samples: {}",
                report.nonincreasing
            ),
            violations: Vec::new(),
            out: a.out,
        });
    }
    let profile = density_profile_with(&prefix, &points, window).map_err(core_err)?;
    let summary = format!(
        "{}; upper estimate {}, lower estimate {}",
        density_line(&a.set, &prefix, last)?,
        profile.upper_estimate,
        profile.lower_estimate
    );
    Ok(Report { document: formats::profile_csv(&profile), summary, violations: Vec::new(), out: a.out })
}

pub fn build_delta02(a: Delta02Args) -> Result<Report> {
    check_out(&a.out)?;
    let q = SeqSpec::parse(&a.q).map_err(|e| usage(e.to_string()))?;
    if a.steps == 0 {
        return Err(usage("--steps must be positive"));
    }
    let build = delta02_density_set(&q, a.steps).map_err(|e| match e {
        CoreError::InvalidArgument(m) => usage(m),
        e => core_err(e),
    })?;
    let mut doc = String::from("n,s_n,count,rho_num,rho_den,q_num,q_den\n");
    let mut violations = Vec::new();
    let mut last_gap = Rational::from_integer(0.into());
    for n in 1..=a.steps {
        let rho = build.fraction(n).expect("one checkpoint per step");
        let qn = q.term(n);
        let i = (n - 1) as usize;
        let _ = writeln!(
            doc,
            "{n},{},{},{},{},{},{}",
            build.checkpoints[i],
            build.counts[i],
            rho.numer(),
            rho.denom(),
            qn.numer(),
            qn.denom()
        );
        let gap = (&rho - &qn).abs();
        if gap > Rational::new(1.into(), n.into()) {
            violations.push(format!("|rho_(s_{n}) - q_{n}| = {gap} exceeds 1/{n}"));
        }
        last_gap = gap;
    }
    let n = a.steps;
    let summary = format!(
        "n = {n}: s_n = {}, |rho_(s_n)(A) - q_n| ≈ {:.3e} (bound 1/{n})",
        build.checkpoints[(n - 1) as usize],
        formats::rational_float(&last_gap)
    );
    Ok(Report { document: doc, summary, violations, out: a.out })
}

/// Settings of `run`, after merging defaults, config file and flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub construction: String,
    pub stages: u64,
    pub machines: u64,
    pub adversaries: BTreeMap<u64, PathBuf>,
    pub bound: u64,
    pub intervals: u32,
    pub fuel: u64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            construction: String::new(),
            stages: 1000,
            machines: 64,
            adversaries: BTreeMap::new(),
            bound: 1 << 14,
            intervals: 12,
            fuel: 64,
            out: None,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| usage(format!("{key}: not a number: {v:?}")))
}

impl RunConfig {
    /// Applies one `key=value` setting; relative paths resolve against `base`.
    fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<()> {
        let path = |p: &str| match base {
            Some(b) => formats::relative_to(b, p),
            None => PathBuf::from(p),
        };
        match key {
            "construction" => self.construction = value.to_string(),
            "stages" => self.stages = num(key, value)?,
            "machines" => self.machines = num(key, value)?,
            "bound" => self.bound = num(key, value)?,
            "intervals" => self.intervals = num(key, value)?,
            "fuel" => self.fuel = num(key, value)?,
            "out" => self.out = Some(path(value)),
            "adversaries" | "adversary" => {
                for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (e, p) = item
                        .split_once(':')
                        .ok_or_else(|| usage(format!("adversary {item:?}: expected e:path")))?;
                    self.adversaries.insert(num("adversary index", e.trim())?, path(p.trim()));
                }
            }
            _ => return Err(usage(format!("unknown setting {key:?}"))),
        }
        Ok(())
    }

    pub fn resolve(args: &RunArgs) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &args.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            let map = formats::parse_config(&text).map_err(|e| usage(e.to_string()))?;
            for (k, v) in &map {
                cfg.set(k, v, Some(path))?;
            }
        }
        for s in &args.settings {
            let (k, v) = s.split_once('=').ok_or_else(|| usage(format!("expected key=value, got {s:?}")))?;
            cfg.set(k.trim(), v.trim(), None)?;
        }
        if let Some(c) = &args.construction {
            cfg.construction = c.clone();
        }
        if let Some(v) = args.stages {
            cfg.stages = v;
        }
        if let Some(v) = args.machines {
            cfg.machines = v;
        }
        if let Some(v) = args.bound {
            cfg.bound = v;
        }
        if let Some(v) = args.intervals {
            cfg.intervals = v;
        }
        if let Some(v) = args.fuel {
            cfg.fuel = v;
        }
        if let Some(v) = &args.out {
            cfg.out = Some(v.clone());
        }
        for a in &args.adversaries {
            cfg.set("adversary", a, None)?;
        }
        if cfg.construction.is_empty() {
            return Err(usage("no construction given (construction=simple|diag|density1|genpair|interval)"));
        }
        if cfg.machines == 0 || cfg.bound == 0 || cfg.fuel == 0 {
            return Err(usage("machines, bound and fuel must be positive"));
        }
        if cfg.intervals > 62 {
            return Err(usage("intervals must be at most 62"));
        }
        Ok(cfg)
    }

    fn universe(&self) -> Result<MachineUniverse> {
        let mut u = MachineUniverse::standard();
        for (&e, path) in &self.adversaries {
            let text = std::fs::read_to_string(path)
                .map_err(|err| usage(format!("cannot read adversary {}: {err}", path.display())))?;
            let program = formats::parse_program(&text)
                .with_context(|| path.display().to_string())
                .map_err(CliError::Other)?;
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("adversary");
            u.set_program(e, name, program);
        }
        Ok(u)
    }
}

pub fn run(args: RunArgs) -> Result<Report> {
    let cfg = RunConfig::resolve(&args)?;
    check_out(&cfg.out)?;
    let universe = cfg.universe()?;
    let mut report = match cfg.construction.as_str() {
        "simple" => run_simple(&cfg, &universe)?,
        "diag" => run_diag(&cfg, &universe)?,
        "density1" => run_density1(&cfg, &universe)?,
        "genpair" => run_genpair(&cfg, &universe)?,
        "interval" => run_interval(&cfg, &universe)?,
        other => return Err(usage(format!("unknown construction {other:?}"))),
    };
    report.out = cfg.out;
    Ok(report)
}

fn run_simple(cfg: &RunConfig, u: &MachineUniverse) -> Result<Report> {
    let mut c = SimpleConstruction::new(u, cfg.machines).with_events();
    c.run(cfg.stages);
    let elems: Vec<u64> = c.elements().collect();
    let mut violations = Vec::new();
    for e in 0..=cfg.machines {
        let small = elems.iter().filter(|&&x| (x as u128) < (e as u128) * (e as u128)).count() as u64;
        if small > e {
            violations.push(format!("|A ∩ [0,{e}²)| = {small} > {e}"));
        }
    }
    let mut seen = BTreeSet::new();
    for &(s, e, x) in c.members() {
        if x as u128 <= (e as u128) * (e as u128) || !seen.insert(e) {
            violations.push(format!("stage {s}: requirement {e} enumerated {x}"));
        }
    }
    let a = NatSetPrefix::from_elements(cfg.bound, elems.iter().copied().filter(|&x| x < cfg.bound))
        .map_err(core_err)?;
    let summary = format!(
        "simple: {} stages, {} machines, {} elements; {}",
        cfg.stages,
        cfg.machines,
        elems.len(),
        density_line("A", &a, cfg.bound - 1)?
    );
    Ok(Report { document: trace_export(c.events()), summary, violations, out: None })
}

fn run_diag(cfg: &RunConfig, u: &MachineUniverse) -> Result<Report> {
    let mut c = DiagonalConstruction::new(u, cfg.machines).with_events();
    c.run(cfg.stages);
    let s = c.stage();
    let a = c.current();
    let mut violations = Vec::new();
    let top = s.min(cfg.bound);
    for e in 0..c.active() {
        let m = u.machine(e);
        for x in (0..top).filter(|&x| x != 0 && x.trailing_zeros() as u64 == e) {
            let in_w = matches!(m.eval(x, s), FuelResult::Converged(_));
            if a.contains(x).map_err(core_err)? != in_w {
                violations.push(format!("stage {s}: slice {e} disagrees with W_e at {x}"));
            }
        }
    }
    let summary = format!(
        "diag: {s} stages, {} active slices, {} members; {}",
        c.active(),
        c.entries().len(),
        density_line("A", &a.restrict(top.max(1)), top.max(1) - 1)?
    );
    Ok(Report { document: trace_export(c.events()), summary, violations, out: None })
}

fn run_density1(cfg: &RunConfig, u: &MachineUniverse) -> Result<Report> {
    let mut c = NoSubsetConstruction::new(u, cfg.machines).with_events();
    c.run(cfg.stages);
    let mut violations = Vec::new();
    for j in c.jumps() {
        if j.new_restraint <= j.old_restraint || 2 * j.in_set_before > j.covered {
            violations.push(format!("{j:?}"));
        }
    }
    let a = c.prefix(cfg.bound);
    let summary = format!(
        "density1: {} stages, {} slices, {} restraint jumps; {}",
        c.stage(),
        c.slice_count(),
        c.jumps().len(),
        density_line("A", &a, cfg.bound - 1)?
    );
    Ok(Report { document: trace_export(c.events()), summary, violations, out: None })
}

fn run_genpair(cfg: &RunConfig, u: &MachineUniverse) -> Result<Report> {
    let mut c = GenericPairConstruction::new(u, cfg.machines).with_events();
    c.run(cfg.stages);
    let mut first = BTreeSet::new();
    let mut second = BTreeSet::new();
    let mut violations = Vec::new();
    for ev in c.events() {
        let clash = match ev.kind {
            EventKind::EnterFirst => !first.insert(ev.value) || second.contains(&ev.value),
            EventKind::EnterSecond => !second.insert(ev.value) || first.contains(&ev.value),
            _ => false,
        };
        if clash {
            violations.push(format!("stage {}: {} entered twice", ev.stage, ev.value));
        }
    }
    let union = c.first(cfg.bound).union(&c.second(cfg.bound));
    let summary = format!(
        "genpair: {} stages, {} splits, |A0| = {}, |A1| = {}; {}",
        c.stage(),
        c.splits().len(),
        first.len(),
        second.len(),
        density_line("A0 ∪ A1", &union, cfg.bound - 1)?
    );
    Ok(Report { document: trace_export(c.events()), summary, violations, out: None })
}

fn run_interval(cfg: &RunConfig, u: &MachineUniverse) -> Result<Report> {
    let fuel = cfg.fuel;
    let f = move |j: u32| fuel.saturating_mul(1u64 << j);
    let outcome = interval_diagonalization(f, u, cfg.machines, cfg.intervals);
    let mut doc = String::from("interval,machine,requirement\n");
    let mut violations = Vec::new();
    let mut met = BTreeSet::new();
    for &(j, e, k) in &outcome.attentions {
        let _ = writeln!(doc, "{j},{e},{k}");
        if !met.insert((e, k)) {
            violations.push(format!("requirement ({e},{k}) acted twice"));
        }
        for x in (1u64 << j)..(2u64 << j) {
            let agrees = match u.eval(e, x, f(j)) {
                FuelResult::Converged(v) => v == outcome.set.contains(x).map_err(core_err)? as u64,
                FuelResult::OutOfFuel => true,
            };
            if agrees {
                violations.push(format!("interval {j}: B does not differ from machine {e} at {x}"));
                break;
            }
        }
    }
    let n = outcome.set.bound() - 1;
    let summary = format!(
        "interval: {} intervals, {} attentions; {}",
        cfg.intervals + 1,
        outcome.attentions.len(),
        density_line("B", &outcome.set, n)?
    );
    Ok(Report { document: doc, summary, violations, out: None })
}

pub fn decode_coarse(a: DecodeCoarseArgs) -> Result<Report> {
    check_out(&a.out)?;
    if a.stage == 0 {
        return Err(usage("--stage must be positive"));
    }
    let mut doc = String::from("n,decoded,target\n");
    let mut hits = 0;
    let decode = |c: &dyn Fn(u64) -> bool, n: u32| decode_from_coarse(c, n, a.stage).map_err(core_err);
    let results: Vec<(u32, bool, Option<bool>)> = if let Some(set) = &a.set {
        let c = SetSpec::parse(set).map_err(|e| usage(e.to_string()))?;
        (0..a.n_max).map(|n| Ok((n, decode(&|m| c.contains(m), n)?, None))).collect::<Result<_>>()?
    } else {
        let target = a.target.as_deref().ok_or_else(|| usage("give --set or --target"))?;
        let target = formats::parse_list(target).map_err(|e| usage(e.to_string()))?;
        let early = formats::parse_list(&a.early).map_err(|e| usage(e.to_string()))?;
        let l = StabilizingApprox { early, target: target.clone(), stable_at: a.stable_at };
        let c = |m: u64| coarse_from_limit(&l, m);
        (0..a.n_max)
            .map(|n| Ok((n, decode(&c, n)?, Some(target.contains(&(n as u64))))))
            .collect::<Result<_>>()?
    };
    for (n, got, want) in &results {
        let want_s = want.map_or(String::new(), |w| (w as u8).to_string());
        let _ = writeln!(doc, "{n},{},{want_s}", *got as u8);
        if *want == Some(*got) {
            hits += 1;
        }
    }
    let summary = if a.set.is_some() {
        let ones: Vec<String> = results.iter().filter(|r| r.1).map(|r| r.0.to_string()).collect();
        format!("decoded A ∩ [0,{}) = {{{}}} at s = {}", a.n_max, ones.join(","), a.stage)
    } else {
        format!("recovered {hits}/{} bits at s = {}", a.n_max, a.stage)
    };
    Ok(Report { document: doc, summary, violations: Vec::new(), out: a.out })
}

fn read_operator(path: &Path, max_width: u64) -> Result<densework_core::eop::EnumOperator> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read operator {}: {e}", path.display())))?;
    formats::parse_operator(&text, max_width)
        .with_context(|| path.display().to_string())
        .map_err(CliError::Other)
}

pub fn eop(c: EopCommand) -> Result<Report> {
    match c {
        EopCommand::Apply { operator, input, max_width, out } => {
            check_out(&out)?;
            let op = read_operator(&operator, max_width)?;
            let x = FiniteSet::new(formats::parse_list(&input).map_err(|e| usage(e.to_string()))?);
            let outputs = op.apply(|v| x.contains(v));
            let mut doc = String::from("n\n");
            for n in &outputs {
                let _ = writeln!(doc, "{n}");
            }
            let summary = format!("{} axioms, {} outputs", op.axioms().len(), outputs.len());
            Ok(Report { document: doc, summary, violations: Vec::new(), out })
        }
        EopCommand::Compose { outer, inner, bound, max_width, out } => {
            check_out(&out)?;
            let v = read_operator(&outer, max_width)?;
            let w = read_operator(&inner, max_width)?;
            let comp = compose(&v, &w, bound);
            let summary = format!(
                "composite has {} axioms{}",
                comp.operator.axioms().len(),
                if comp.truncated { " (truncated at the bound)" } else { "" }
            );
            Ok(Report { document: formats::format_operator(&comp.operator), summary, violations: Vec::new(), out })
        }
    }
}

pub fn encode_r(a: EncodeRArgs) -> Result<Report> {
    check_out(&a.out)?;
    let set = SetSpec::parse(&a.set).map_err(|e| usage(e.to_string()))?;
    if a.bound == 0 {
        return Err(usage("--bound must be positive"));
    }
    let coded = partition::encode_r(|k| set.contains(k), a.bound);
    let mut doc = String::new();
    match a.format.as_str() {
        "members" => {
            doc.push_str("m,slice\n");
            for m in coded.iter() {
                let _ = writeln!(doc, "{m},{}", m.trailing_zeros());
            }
        }
        "listing" => {
            doc.push_str("m,b\n");
            for m in 0..a.bound {
                let _ = writeln!(doc, "{m},{}", coded.contains(m).map_err(core_err)? as u8);
            }
        }
        f => return Err(usage(format!("unknown format {f:?}"))),
    }
    let summary = format!("{} members below {}; {}", coded.len(), a.bound, density_line("R(A)", &coded, a.bound - 1)?);
    Ok(Report { document: doc, summary, violations: Vec::new(), out: a.out })
}

pub fn decode_r(a: DecodeRArgs) -> Result<Report> {
    check_out(&a.out)?;
    let pairs: Box<dyn Iterator<Item = (u64, bool)>> = match (&a.listing, &a.set) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read listing {}: {e}", path.display())))?;
            Box::new(formats::parse_listing(&text).map_err(CliError::Other)?.into_iter())
        }
        (None, Some(set)) => {
            let spec = SetSpec::parse(set).map_err(|e| usage(e.to_string()))?;
            Box::new(listings::full_r_listing(move |k| spec.contains(k)))
        }
        _ => return Err(usage("give exactly one of --listing and --set")),
    };
    let mut decoder = ListingDecoder::new(GenericListing::checked(pairs), a.budget);
    let mut doc = String::from("n,bit\n");
    let mut ones = Vec::new();
    for n in 0..a.n_max {
        let bit = decoder.decode(n).map_err(|e| match e {
            CoreError::NotAFunction { .. } => CliError::Invariant(e.to_string()),
            e => core_err(e),
        })?;
        let _ = writeln!(doc, "{n},{}", bit as u8);
        if bit {
            ones.push(n.to_string());
        }
    }
    let summary = format!(
        "decoded A ∩ [0,{}) = {{{}}} after {} pairs",
        a.n_max,
        ones.join(","),
        decoder.consumed()
    );
    Ok(Report { document: doc, summary, violations: Vec::new(), out: a.out })
}
