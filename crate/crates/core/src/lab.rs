//! Experiment drivers behind the `rotlab` command line: theorem checks, the
//! 256-pattern scan, counterexamples, Rule-of-k, identities and Dehn
//! figures. Each returns an [`ExperimentReport`].

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dehn::{self, BUILTIN_IDS};
use crate::identities;
use crate::ncgb::{complete, oracle_membership, CompletionOptions, GroebnerBasis, MonomialOrder, NcgbError, Verdict};
use crate::relation_sets::{build, parse_pattern, BuildParams, RelationError, RelationSystem, Tag};
use crate::series::Var;
use crate::symfun::BarPattern;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Ncgb(#[from] NcgbError),
    #[error(transparent)]
    Identity(#[from] identities::IdentityError),
    #[error(transparent)]
    Dehn(#[from] dehn::DehnError),
    #[error("{0}")]
    Params(String),
    #[error("cache {path}: {msg}")]
    Cache { path: String, msg: String },
}

/// Resource caps. Exceeding one yields a report marked `truncated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_basis: Option<usize>,
    /// Wall-clock budget per relation system.
    pub time_per_system: Option<Duration>,
    /// Largest degree bound a system may request.
    pub max_degree: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_basis: Some(2_000_000), time_per_system: Some(Duration::from_secs(3600)), max_degree: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderChoice {
    Deglex,
    Reversed,
}

/// How a single system is run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub limits: Limits,
    pub order: OrderChoice,
    /// Stop at the first goal shown not to be a member.
    pub stop_at_first_failure: bool,
    pub certificates: bool,
    pub verify_certificates: bool,
    pub cache: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            limits: Limits::default(),
            order: OrderChoice::Deglex,
            stop_at_first_failure: false,
            certificates: false,
            verify_certificates: false,
            cache: None,
        }
    }
}

/// Per-goal outcome. `Skipped` goals were not examined because an earlier
/// goal already failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "bound")]
pub enum GoalVerdict {
    Member,
    NotMemberUpToBound(u32),
    Inconclusive(u32),
    Skipped,
}

impl GoalVerdict {
    fn of(v: &Verdict) -> Self {
        match v {
            Verdict::Member(_) => GoalVerdict::Member,
            Verdict::NotMemberUpToBound(b) => GoalVerdict::NotMemberUpToBound(*b),
            Verdict::Inconclusive(b) => GoalVerdict::Inconclusive(*b),
        }
    }

    pub fn is_member(self) -> bool {
        self == GoalVerdict::Member
    }

    pub fn is_non_member(self) -> bool {
        matches!(self, GoalVerdict::NotMemberUpToBound(_))
    }

    pub fn text(self) -> String {
        match self {
            GoalVerdict::Member => "Member".into(),
            GoalVerdict::NotMemberUpToBound(b) => format!("NotMemberUpToBound({b})"),
            GoalVerdict::Inconclusive(b) => format!("Inconclusive({b})"),
            GoalVerdict::Skipped => "Skipped".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalOutcome {
    pub label: String,
    pub degree: usize,
    pub verdict: GoalVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_verified: Option<bool>,
}

/// Result of completing one system and querying its goals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemRun {
    pub name: String,
    pub bound: u32,
    pub homogeneous: bool,
    pub basis_size: usize,
    pub complete_below: u32,
    /// A resource limit stopped completion early.
    pub limit_hit: bool,
    pub goals: Vec<GoalOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_file: Option<String>,
    pub elapsed_ms: u64,
}

impl SystemRun {
    pub fn all_members(&self) -> bool {
        !self.goals.is_empty() && self.goals.iter().all(|g| g.verdict.is_member())
    }

    pub fn any_non_member(&self) -> bool {
        self.goals.iter().any(|g| g.verdict.is_non_member())
    }

    pub fn goal(&self, label: &str) -> Option<&GoalOutcome> {
        self.goals.iter().find(|g| g.label == label)
    }
}

fn order_for(sys: &RelationSystem, c: OrderChoice) -> MonomialOrder {
    match c {
        OrderChoice::Deglex => MonomialOrder::deglex(&sys.alphabet),
        OrderChoice::Reversed => MonomialOrder::reversed(&sys.alphabet),
    }
}

fn cache_key(sys: &RelationSystem, order: &MonomialOrder) -> String {
    let mut h = Sha256::new();
    h.update(sys.to_json().as_bytes());
    h.update(serde_json::to_string(order).expect("order serializes").as_bytes());
    let slug: String = sys.name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    format!("{slug}-{}", &hex::encode(h.finalize())[..16])
}

fn load_cached(path: &Path) -> Option<GroebnerBasis> {
    let text = fs::read_to_string(path).ok()?;
    GroebnerBasis::from_json(&text).ok()
}

fn write_atomic(path: &Path, text: &str) -> Result<(), LabError> {
    let err = |e: std::io::Error| LabError::Cache { path: path.display().to_string(), msg: e.to_string() };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(err)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).map_err(err)?;
    fs::rename(&tmp, path).map_err(err)
}

/// Completes `sys` and decides every goal. Homogeneous systems are completed
/// degree by degree, so a goal of degree `d` is settled as soon as degree `d`
/// is done.
pub fn run_system(sys: &RelationSystem, opts: &RunOptions) -> Result<SystemRun, LabError> {
    let start = Instant::now();
    if sys.degree_bound > opts.limits.max_degree {
        return Err(LabError::Params(format!(
            "{} needs degree bound {}, above the limit {}",
            sys.name, sys.degree_bound, opts.limits.max_degree
        )));
    }
    let order = order_for(sys, opts.order);
    let cache_path = opts.cache.as_ref().map(|d| d.join("bases").join(format!("{}.json", cache_key(sys, &order))));
    let deadline = opts.limits.time_per_system.map(|t| start + t);
    let copts = |through: Option<u32>| CompletionOptions {
        max_basis: opts.limits.max_basis,
        time_limit: deadline.map(|d| d.saturating_duration_since(Instant::now())),
        certificates: opts.certificates,
        through,
    };

    let cached = cache_path.as_deref().and_then(load_cached);
    let from_cache = cached.is_some();
    let incremental = sys.homogeneous && cached.is_none();
    let mut gb = match cached {
        Some(gb) => gb,
        None => complete(&sys.hypotheses, &order, sys.degree_bound, &copts(incremental.then_some(0)))?,
    };
    let mut limit_hit = false;
    if !incremental && !from_cache && gb.is_truncated() {
        limit_hit = true;
    }

    let mut goals: Vec<Option<GoalOutcome>> = vec![None; sys.goals.len()];
    let mut failed = false;
    let degrees: Vec<usize> = sys.goals.iter().map(|g| g.poly.degree().unwrap_or(0)).collect();
    let max_goal = degrees.iter().copied().max().unwrap_or(0) as u32;
    let steps: Vec<u32> = if incremental { (1..=max_goal.min(sys.degree_bound)).collect() } else { vec![u32::MAX] };
    for d in steps {
        if incremental && !gb.extend_through(d, &copts(None)) {
            limit_hit = true;
        }
        for (i, g) in sys.goals.iter().enumerate() {
            if goals[i].is_some() || (degrees[i] as u32 > d && d != u32::MAX) {
                continue;
            }
            if degrees[i] as u32 > sys.degree_bound {
                goals[i] = Some(GoalOutcome {
                    label: g.label(),
                    degree: degrees[i],
                    verdict: GoalVerdict::Inconclusive(sys.degree_bound),
                    certificate_verified: None,
                });
                continue;
            }
            let v = gb.membership(&g.poly)?;
            let verdict = GoalVerdict::of(&v);
            let certificate_verified = match &v {
                Verdict::Member(c) if opts.verify_certificates && c.is_available() => {
                    Some(c.verify().map_err(NcgbError::from)?)
                }
                _ => None,
            };
            failed |= verdict.is_non_member();
            goals[i] = Some(GoalOutcome { label: g.label(), degree: degrees[i], verdict, certificate_verified });
        }
        if (failed && opts.stop_at_first_failure) || limit_hit {
            break;
        }
    }
    let goals: Vec<GoalOutcome> = goals
        .into_iter()
        .zip(sys.goals.iter().zip(&degrees))
        .map(|(o, (g, &degree))| {
            o.unwrap_or_else(|| GoalOutcome {
                label: g.label(),
                degree,
                verdict: if failed { GoalVerdict::Skipped } else { GoalVerdict::Inconclusive(sys.degree_bound) },
                certificate_verified: None,
            })
        })
        .collect();

    let mut cache_file = None;
    if let Some(p) = &cache_path {
        if !from_cache && !gb.is_truncated() && !limit_hit {
            let mut gb = gb;
            gb.set_source(sys.name.clone());
            write_atomic(p, &gb.to_json())?;
            cache_file = Some(p.display().to_string());
            return Ok(finish_run(sys, &gb, goals, limit_hit, cache_file, start));
        }
        if from_cache {
            cache_file = Some(p.display().to_string());
        }
    }
    Ok(finish_run(sys, &gb, goals, limit_hit, cache_file, start))
}

fn finish_run(
    sys: &RelationSystem,
    gb: &GroebnerBasis,
    goals: Vec<GoalOutcome>,
    limit_hit: bool,
    cache_file: Option<String>,
    start: Instant,
) -> SystemRun {
    SystemRun {
        name: sys.name.clone(),
        bound: sys.degree_bound,
        homogeneous: sys.homogeneous,
        basis_size: gb.len(),
        complete_below: gb.complete_below(),
        limit_hit,
        goals,
        cache_file,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub label: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub name: String,
    pub bound: u32,
    pub homogeneous: bool,
    pub basis_size: usize,
    pub complete_below: u32,
    pub limit_hit: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_file: Option<String>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    /// Entries per verdict kind (the verdict text up to any parenthesis).
    pub counts: BTreeMap<String, usize>,
    pub failed_expectations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub version: String,
    pub parameters: BTreeMap<String, String>,
    pub entries: Vec<ReportEntry>,
    pub systems: Vec<SystemSummary>,
    pub summary: Summary,
    pub notes: Vec<String>,
    /// Some work was cut short by a resource limit.
    pub truncated: bool,
    pub expectations_met: bool,
    pub elapsed_ms: u64,
}

impl ExperimentReport {
    fn new(experiment: &str) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            parameters: BTreeMap::new(),
            entries: Vec::new(),
            systems: Vec::new(),
            summary: Summary::default(),
            notes: Vec::new(),
            truncated: false,
            expectations_met: true,
            elapsed_ms: 0,
        }
    }

    fn param(&mut self, k: &str, v: impl ToString) {
        self.parameters.insert(k.to_string(), v.to_string());
    }

    fn entry(&mut self, label: impl Into<String>, verdict: impl Into<String>, expected: Option<String>, ok: bool) {
        self.entries.push(ReportEntry { label: label.into(), verdict: verdict.into(), expected, ok, detail: None });
    }

    fn detail(&mut self, d: impl Into<String>) {
        if let Some(e) = self.entries.last_mut() {
            e.detail = Some(d.into());
        }
    }

    fn add_system(&mut self, r: &SystemRun) {
        self.truncated |= r.limit_hit;
        self.systems.push(SystemSummary {
            name: r.name.clone(),
            bound: r.bound,
            homogeneous: r.homogeneous,
            basis_size: r.basis_size,
            complete_below: r.complete_below,
            limit_hit: r.limit_hit,
            cache_file: r.cache_file.clone(),
            elapsed_ms: r.elapsed_ms,
        });
    }

    fn finish(mut self, start: Instant) -> Self {
        let mut counts = BTreeMap::new();
        for e in &self.entries {
            let key = e.verdict.split('(').next().unwrap_or("").to_string();
            *counts.entry(key).or_insert(0) += 1;
        }
        let failed = self.entries.iter().filter(|e| !e.ok).count();
        self.summary = Summary { total: self.entries.len(), counts, failed_expectations: failed };
        self.expectations_met &= failed == 0 && !self.truncated;
        self.elapsed_ms = start.elapsed().as_millis() as u64;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report with every timing field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.elapsed_ms = 0;
        for s in &mut r.systems {
            s.elapsed_ms = 0;
        }
        r
    }

    /// One line per entry plus a summary line.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            let mark = if e.ok { "ok  " } else { "FAIL" };
            s.push_str(&format!("{mark} {:<44} {}", e.label, e.verdict));
            if let Some(x) = &e.expected {
                s.push_str(&format!("  (expected {x})"));
            }
            if let Some(d) = &e.detail {
                s.push_str(&format!("  [{d}]"));
            }
            s.push('\n');
        }
        for n in &self.notes {
            s.push_str(&format!("note: {n}\n"));
        }
        let counts: Vec<String> = self.summary.counts.iter().map(|(k, v)| format!("{k}: {v}")).collect();
        s.push_str(&format!(
            "{}: {} entries ({}){}; expectations {}\n",
            self.experiment,
            self.summary.total,
            counts.join(", "),
            if self.truncated { "; TRUNCATED" } else { "" },
            if self.expectations_met { "met" } else { "NOT met" }
        ));
        s
    }
}

fn push_goals(
    rep: &mut ExperimentReport,
    run: &SystemRun,
    prefix: bool,
    expect: impl Fn(&GoalOutcome) -> Option<(String, bool)>,
) {
    for g in &run.goals {
        let label = if prefix { format!("{} :: {}", run.name, g.label) } else { g.label.clone() };
        let (expected, ok) = match expect(g) {
            Some((e, ok)) => (Some(e), ok),
            None => (None, true),
        };
        rep.entry(label, g.verdict.text(), expected, ok);
        if let Some(v) = g.certificate_verified {
            rep.detail(if v { "certificate verified" } else { "certificate FAILED" });
            if !v {
                rep.entries.last_mut().expect("entry").ok = false;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// check

/// Which systems `check` runs for a tag: every barring for `super_rot`
/// unless one is given.
fn check_systems(tag: Tag, p: &BuildParams) -> Result<Vec<RelationSystem>, LabError> {
    if tag == Tag::SuperRot && p.bars.is_none() {
        let n = p.n.unwrap_or(3);
        return (0..1u32 << n)
            .map(|mask| {
                let mut q = p.clone();
                q.n = Some(n);
                q.bars = Some(BarPattern::from_mask(n, mask));
                build(tag, &q).map_err(LabError::from)
            })
            .collect();
    }
    Ok(vec![build(tag, p)?])
}

/// Builds and checks a tagged theorem instance. Positive theorems expect
/// every goal to be a member; the counterexample tags expect at least one
/// non-member.
pub fn cmd_check_theorem(tag: Tag, p: &BuildParams, opts: &RunOptions) -> Result<ExperimentReport, LabError> {
    let start = Instant::now();
    let mut rep = ExperimentReport::new(&format!("check {tag}"));
    rep.param("tag", tag);
    for (k, v) in [("n", p.n), ("bound", p.bound), ("k", p.k), ("y_truncation", p.y_truncation)] {
        if let Some(v) = v {
            rep.param(k, v);
        }
    }
    if let Some(b) = &p.bars {
        rep.param("bars", format!("{:?}", b.barred().collect::<Vec<_>>()));
    }
    if let Some(z) = &p.pattern {
        rep.param("pattern", z);
    }
    if let Some(i) = p.inverses {
        rep.param("inverses", i);
    }
    rep.param("order", format!("{:?}", opts.order).to_lowercase());
    let systems = check_systems(tag, p)?;
    let positive = tag.expects_members();
    let mut o = opts.clone();
    o.stop_at_first_failure = !positive && opts.stop_at_first_failure;
    let runs: Vec<Result<SystemRun, LabError>> = systems.par_iter().map(|s| run_system(s, &o)).collect();
    let multi = systems.len() > 1;
    for (sys, run) in systems.iter().zip(runs) {
        let run = run?;
        rep.add_system(&run);
        if positive {
            push_goals(&mut rep, &run, multi, |g| Some(("Member".into(), g.verdict.is_member())));
        } else {
            push_goals(&mut rep, &run, multi, |_| None);
            if !run.any_non_member() {
                rep.expectations_met = false;
                rep.notes.push(format!("{}: no goal was shown to be a non-member", sys.name));
            }
        }
        rep.notes.extend(sys.notes.iter().map(|n| format!("{}: {n}", sys.name)));
    }
    Ok(rep.finish(start))
}

/// Checks a user-supplied system file; no expectations beyond completing.
pub fn cmd_check_system(sys: &RelationSystem, opts: &RunOptions) -> Result<ExperimentReport, LabError> {
    let start = Instant::now();
    let mut rep = ExperimentReport::new("check system");
    rep.param("system", &sys.name);
    rep.param("bound", sys.degree_bound);
    let run = run_system(sys, opts)?;
    rep.add_system(&run);
    push_goals(&mut rep, &run, false, |_| None);
    rep.notes.extend(sys.notes.iter().cloned());
    if !sys.homogeneous {
        rep.notes.push("system is not homogeneous: non-member verdicts are relative to the bound".into());
    }
    Ok(rep.finish(start))
}

// ---------------------------------------------------------------------------
// 256-pattern scan

/// Which closed-form branch predicts failure of the Rule of Three for the
/// word `z1 z2 z3 z4 z1' z2' z3' z4'` (with `x < y`), if any.
pub fn predicted_failure_branch(word: &str) -> Result<Option<u8>, LabError> {
    let v = parse_pattern(word)?;
    let r = |x: Var| u8::from(x == Var::Y);
    let (z, w): (Vec<u8>, Vec<u8>) = (v[..4].iter().map(|&x| r(x)).collect(), v[4..].iter().map(|&x| r(x)).collect());
    if z == w {
        return Ok(Some(1));
    }
    if z[0] < w[0] && z[1] >= w[1] && z[2] >= w[2] && z[3] < w[3] {
        return Ok(Some(2));
    }
    if z[0] > w[0] && z[1] <= w[1] && z[2] <= w[2] && z[3] > w[3] {
        return Ok(Some(3));
    }
    Ok(None)
}

/// All 256 words in binary order with `x = 0`.
pub fn all_pattern_words() -> Vec<String> {
    (0..256u32).map(|m| (0..8).map(|i| if m >> (7 - i) & 1 == 1 { 'y' } else { 'x' }).collect()).collect()
}

/// Sizes of the three failure branches; they must be disjoint and sum to 34.
pub fn predicate_branch_counts() -> [usize; 3] {
    let mut c = [0; 3];
    for w in all_pattern_words() {
        if let Some(b) = predicted_failure_branch(&w).expect("valid word") {
            c[b as usize - 1] += 1;
        }
    }
    c
}

/// Eight predicted-hold and eight predicted-fail words; the fails cover all
/// three branches.
pub const STRATIFIED_16: [&str; 16] = [
    "xxxxyyyy", "xxyyyyxx", "xyxyyxyx", "xyyyyxxx", "yyxxxxyy", "xxxyyyyx", "yxyxxyxy", "yxyyxyxx", // hold
    "xxxxxxxx", "xyxyxyxy", "yyyyyyyy", "xyyxyxxy", "xxxxyxxy", "xyxxyxxy", "yxxyxyyx", "yxyyxyyx", // fail
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanSubset {
    Full,
    Stratified16,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternResult {
    pub word: String,
    pub holds: bool,
    /// Goal components examined, with verdicts.
    pub goals: Vec<GoalOutcome>,
    pub basis_size: usize,
    pub limit_hit: bool,
}

/// Classifies one word: the rule holds iff every `S = {1,2,3,4}` component is
/// a member. Stops at the first non-member component.
pub fn classify_pattern(word: &str, opts: &RunOptions) -> Result<PatternResult, LabError> {
    let p = BuildParams { pattern: Some(word.to_string()), ..Default::default() };
    let sys = build(Tag::PatternWord, &p)?;
    let mut o = opts.clone();
    o.stop_at_first_failure = true;
    o.cache = None;
    let run = run_system(&sys, &o)?;
    Ok(PatternResult {
        word: word.to_string(),
        holds: run.all_members(),
        goals: run.goals.clone(),
        basis_size: run.basis_size,
        limit_hit: run.limit_hit,
    })
}

/// Runs the scan. With a cache directory, each word's result is stored as
/// soon as it is known and reused on the next run.
pub fn cmd_scan_256(subset: ScanSubset, opts: &RunOptions) -> Result<ExperimentReport, LabError> {
    let start = Instant::now();
    let mut rep = ExperimentReport::new("scan256");
    let words: Vec<String> = match subset {
        ScanSubset::Full => all_pattern_words(),
        ScanSubset::Stratified16 => STRATIFIED_16.iter().map(|s| s.to_string()).collect(),
    };
    rep.param("subset", if subset == ScanSubset::Full { "full" } else { "stratified16" });

    let counts = predicate_branch_counts();
    let disjoint = all_pattern_words().iter().all(|w| {
        let hits = [1u8, 2, 3].iter().filter(|&&b| branch_holds(w, b)).count();
        hits <= 1
    });
    rep.notes.push(format!(
        "predicate branches: {} + {} + {} = {}, disjoint: {disjoint}",
        counts[0],
        counts[1],
        counts[2],
        counts.iter().sum::<usize>()
    ));
    if counts != [16, 9, 9] || !disjoint {
        rep.expectations_met = false;
    }
    if opts.order == OrderChoice::Deglex {
        let sym_ok = all_pattern_words().iter().all(|w| {
            predicted_failure_branch(w).ok().flatten().is_some()
                == predicted_failure_branch(&mirror(w)).ok().flatten().is_some()
        });
        rep.notes.push(format!("predicate invariant under x<->y exchange with index reversal: {sym_ok}"));
        rep.expectations_met &= sym_ok;
    }

    let cache_dir = opts.cache.as_ref().map(|d| d.join("scan256"));
    let results: Vec<Result<PatternResult, LabError>> = words
        .par_iter()
        .map(|w| {
            let path = cache_dir.as_ref().map(|d| d.join(format!("{w}.json")));
            if let Some(r) = path.as_ref().and_then(|p| fs::read_to_string(p).ok()) {
                if let Ok(r) = serde_json::from_str::<PatternResult>(&r) {
                    return Ok(r);
                }
            }
            let r = classify_pattern(w, opts)?;
            if let Some(p) = &path {
                if !r.limit_hit {
                    write_atomic(p, &serde_json::to_string(&r).expect("result serializes"))?;
                }
            }
            Ok(r)
        })
        .collect();
    let (mut holds, mut fails) = (0, 0);
    for r in results {
        let r = r?;
        let branch = predicted_failure_branch(&r.word)?;
        let predicted = if branch.is_some() { "fails" } else { "holds" };
        let got = if r.limit_hit {
            "inconclusive"
        } else if r.holds {
            "holds"
        } else {
            "fails"
        };
        if r.limit_hit {
            rep.truncated = true;
        }
        holds += usize::from(got == "holds");
        fails += usize::from(got == "fails");
        rep.entry(&r.word, got, Some(predicted.into()), got == predicted);
        let first_bad = r.goals.iter().find(|g| g.verdict.is_non_member()).map(|g| g.label.clone());
        let d = match (branch, first_bad) {
            (Some(b), Some(g)) => format!("branch {b}; first non-member {g}"),
            (Some(b), None) => format!("branch {b}"),
            (None, Some(g)) => format!("first non-member {g}"),
            (None, None) => format!("{} components", r.goals.len()),
        };
        rep.detail(d);
    }
    if subset == ScanSubset::Full && (holds, fails) != (222, 34) {
        rep.expectations_met = false;
    }
    rep.notes.push(format!("holds: {holds}, fails: {fails}"));
    if let Some(d) = &cache_dir {
        rep.notes.push(format!("results cached under {}", d.display()));
    }
    Ok(rep.finish(start))
}

fn branch_holds(w: &str, b: u8) -> bool {
    let v = parse_pattern(w).expect("valid word");
    let r: Vec<u8> = v.iter().map(|&x| u8::from(x == Var::Y)).collect();
    let (z, p) = (&r[..4], &r[4..]);
    match b {
        1 => z == p,
        2 => z[0] < p[0] && z[1] >= p[1] && z[2] >= p[2] && z[3] < p[3],
        _ => z[0] > p[0] && z[1] <= p[1] && z[2] <= p[2] && z[3] > p[3],
    }
}

/// Exchanges `x` and `y` and reverses the index order within each half.
pub fn mirror(w: &str) -> String {
    let flip = |c: char| if c == 'x' { 'y' } else { 'x' };
    let c: Vec<char> = w.chars().filter(|c| *c == 'x' || *c == 'y').collect();
    let mut out: String = c[..4].iter().rev().map(|&x| flip(x)).collect();
    out.extend(c[4..].iter().rev().map(|&x| flip(x)));
    out
}

// ---------------------------------------------------------------------------
// counterexamples

/// The non-implications: paired factors, the two linear queries without
/// inverses, and the `e_1`/`e_2` remark.
pub fn cmd_counterexamples(opts: &RunOptions) -> Result<ExperimentReport, LabError> {
    let start = Instant::now();
    let mut rep = ExperimentReport::new("counterexamples");

    let mut o = opts.clone();
    o.stop_at_first_failure = true;
    let sys = build(Tag::PairedFactors, &BuildParams::default().with_bound(8))?;
    let run = run_system(&sys, &o)?;
    rep.add_system(&run);
    let hit = run.goals.iter().find(|g| g.verdict.is_non_member());
    rep.entry(
        "paired_factors S={1,2,3,4}",
        hit.map(|g| g.verdict.text()).unwrap_or_else(|| "no non-member found".into()),
        Some("NotMemberUpToBound(8)".into()),
        hit.is_some_and(|g| g.verdict == GoalVerdict::NotMemberUpToBound(8)),
    );
    if let Some(g) = hit {
        rep.detail(format!("component {}", g.label));
    }

    let mut o = opts.clone();
    o.stop_at_first_failure = false;
    let sys = build(Tag::LinearStrengthened, &BuildParams { n: Some(4), inverses: Some(false), ..Default::default() })?;
    let run = run_system(&sys, &o)?;
    rep.add_system(&run);
    for (kind, text) in [("prod-prod", "[g4g3g2g1, h4h3h2h1]"), ("hsum-gprod", "[h4+h3+h2+h1, g4g3g2g1]")] {
        let label = format!("S={{1,2,3,4}} {kind}");
        let v = run.goal(&label).map(|g| g.verdict);
        rep.entry(
            format!("linear_strengthened {text}"),
            v.map(GoalVerdict::text).unwrap_or_else(|| "missing".into()),
            Some("NotMemberUpToBound(8)".into()),
            v == Some(GoalVerdict::NotMemberUpToBound(8)),
        );
    }

    let mut o = opts.clone();
    o.stop_at_first_failure = true;
    let sys = build(Tag::E1E2Remark, &BuildParams::default())?;
    let run = run_system(&sys, &o)?;
    rep.add_system(&run);
    let hit = run.goals.iter().find(|g| g.verdict.is_non_member());
    let bound = sys.degree_bound;
    rep.entry(
        "e1e2_remark [h3+h2+h1, g-pairs]",
        hit.map(|g| g.verdict.text()).unwrap_or_else(|| "no non-member found".into()),
        Some(format!("non-member at bound {bound}")),
        hit.is_some(),
    );
    if let Some(g) = hit {
        rep.detail(format!("component {}", g.label));
    }
    rep.notes.push(format!("e1e2_remark examined at the documented bound {bound}"));
    Ok(rep.finish(start))
}

// ---------------------------------------------------------------------------
// Rule of k

/// Rule-of-k with `N = k + 1` by default. For `k > 1` the run stops at the
/// first non-member; for `k = 1` every component is examined and also
/// decided by the linear-algebra oracle at degree 4.
pub fn cmd_scan_rule_of_k(k: u32, n: Option<u32>, opts: &RunOptions) -> Result<ExperimentReport, LabError> {
    let start = Instant::now();
    if !(1..=5).contains(&k) {
        return Err(LabError::Params(format!("k = {k} is outside 1..=5")));
    }
    let mut rep = ExperimentReport::new(&format!("rule-of-k k={k}"));
    rep.param("k", k);
    let n = n.unwrap_or(k + 1);
    rep.param("n", n);
    let sys = build(Tag::RuleOfK, &BuildParams { k: Some(k), n: Some(n), ..Default::default() })?;
    let mut o = opts.clone();
    o.stop_at_first_failure = k > 1;
    let run = run_system(&sys, &o)?;
    rep.add_system(&run);
    push_goals(&mut rep, &run, false, |_| None);
    if !run.any_non_member() {
        rep.expectations_met = false;
        rep.notes.push("no goal component was shown to be a non-member".into());
    }
    if k == 1 {
        let oracle_bound = 4;
        for (g, out) in sys.goals.iter().zip(&run.goals) {
            if out.verdict == GoalVerdict::Skipped || out.degree as u32 > oracle_bound {
                continue;
            }
            let member = oracle_membership(&sys.hypotheses, &g.poly, oracle_bound)?;
            let agree = member == out.verdict.is_member();
            rep.entry(
                format!("oracle {}", out.label),
                if member { "Member" } else { "NotMember" },
                Some(if out.verdict.is_member() { "Member".into() } else { "NotMember".into() }),
                agree,
            );
        }
    }
    Ok(rep.finish(start))
}

// ---------------------------------------------------------------------------
// identities and Dehn figures

/// Every named identity must vanish and every single-sign perturbation must
/// not. `l_for_super = Some((m, bound))` also checks the truncated
/// super-rotation identity through the Groebner engine.
pub fn cmd_verify_identities(l_for_super: Option<(u32, u32)>) -> Result<ExperimentReport, LabError> {
    let start = Instant::now();
    let mut rep = ExperimentReport::new("identities");
    if let Some((m, bound)) = l_for_super {
        rep.param("l_for_super_m", m);
        rep.param("l_for_super_bound", bound);
    }
    for id in identities::all_identities() {
        let v = id.verify();
        let n = id.summands();
        let survivors = (0..n).filter(|&i| !id.verify_perturbed(i).is_zero()).count();
        rep.entry(&id.tag, if v.is_zero() { "Zero" } else { "Residual" }, Some("Zero".into()), v.is_zero());
        rep.detail(format!("{survivors}/{n} sign perturbations leave a residual"));
        if survivors != n {
            rep.entries.last_mut().expect("entry").ok = false;
        }
    }
    if let Some((m, bound)) = l_for_super {
        let v = GoalVerdict::of(&identities::check_l_for_super(m, bound)?);
        rep.entry(format!("l_for_super m={m}"), v.text(), Some("Member".into()), v.is_member());
    }
    Ok(rep.finish(start))
}

/// Validates the builtin figures (or one of them) against their relator
/// sets, then checks that each corrupted fixture is rejected.
pub fn cmd_dehn_validate(figure: Option<&str>) -> Result<ExperimentReport, LabError> {
    let start = Instant::now();
    let mut rep = ExperimentReport::new("dehn");
    let ids: Vec<String> = match figure {
        None => BUILTIN_IDS.iter().map(|s| s.to_string()).collect(),
        Some(f) if f.contains(':') => vec![f.to_string()],
        Some(f) => {
            let hits: Vec<String> =
                BUILTIN_IDS.iter().filter(|b| b.split(':').next() == Some(f)).map(|s| s.to_string()).collect();
            if hits.is_empty() {
                return Err(dehn::DehnError::UnknownFigure(f.to_string()).into());
            }
            hits
        }
    };
    if let Some(f) = figure {
        rep.param("figure", f);
    }
    let figs: Vec<dehn::Figure> = ids.iter().map(|id| dehn::figure(id)).collect::<Result<_, _>>()?;
    for f in &figs {
        let r = f.validate();
        let certified = f.certifies();
        let verdict = if certified { "valid" } else { "invalid" };
        rep.entry(format!("figure {}", f.id), verdict, Some("valid".into()), certified && r.double_count_holds());
        let mut d = format!(
            "{} vertices, {} edges, {} faces, boundary total {}",
            r.vertices, r.edges, r.faces, r.boundary_total
        );
        if let Some(w) = &r.outer_word {
            d.push_str(&format!("; outer {w}"));
        }
        for i in &r.issues {
            d.push_str(&format!("; {i}"));
        }
        rep.detail(d);
    }
    if figure.is_none() {
        for (name, f) in dehn::corrupted_fixtures() {
            let r = f.validate();
            let verdict = if r.is_valid() { "valid" } else { "invalid" };
            rep.entry(format!("corrupted: {name}"), verdict, Some("invalid".into()), !r.is_valid());
            if let Some(i) = r.issues.first() {
                rep.detail(i.to_string());
            }
        }
    }
    Ok(rep.finish(start))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicate_self_check() {
        assert_eq!(predicate_branch_counts(), [16, 9, 9]);
        let fails = all_pattern_words().iter().filter(|w| predicted_failure_branch(w).unwrap().is_some()).count();
        assert_eq!(fails, 34);
        assert_eq!(predicted_failure_branch("xxxxxxxx").unwrap(), Some(1));
        assert_eq!(predicted_failure_branch("xyyxyxxy").unwrap(), Some(2));
        assert_eq!(predicted_failure_branch("xxxxyyyy").unwrap(), None);
        assert_eq!(mirror("xxxyyxxy"), "xyyyxyyx");
    }

    #[test]
    fn stratified_subset_shape() {
        let (hold, fail): (Vec<&str>, Vec<&str>) =
            STRATIFIED_16.iter().copied().partition(|w| predicted_failure_branch(w).unwrap().is_none());
        assert_eq!((hold.len(), fail.len()), (8, 8));
        let mut branches: Vec<u8> = fail.iter().map(|w| predicted_failure_branch(w).unwrap().unwrap()).collect();
        branches.sort();
        branches.dedup();
        assert_eq!(branches, vec![1, 2, 3]);
        let mut all = STRATIFIED_16.to_vec();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 16);
    }

    #[test]
    fn small_check_report_is_deterministic() {
        let opts = RunOptions { certificates: true, verify_certificates: true, ..Default::default() };
        let a = cmd_check_theorem(Tag::ElemRot, &BuildParams::n(3), &opts).unwrap();
        let b = cmd_check_theorem(Tag::ElemRot, &BuildParams::n(3), &opts).unwrap();
        assert!(a.expectations_met, "{}", a.render_text());
        assert_eq!(a.without_timing().to_json(), b.without_timing().to_json());
        assert_eq!(a.summary.total, a.entries.len());
        assert_eq!(a.summary.counts.values().sum::<usize>(), a.entries.len());
        assert!(a.entries.iter().all(|e| e.detail.as_deref() == Some("certificate verified")));
    }

    #[test]
    fn labels_map_back_to_goals() {
        let sys = build(Tag::ElemRot, &BuildParams::n(3)).unwrap();
        let rep = cmd_check_theorem(Tag::ElemRot, &BuildParams::n(3), &RunOptions::default()).unwrap();
        for e in &rep.entries {
            assert!(sys.goal_by_label(&e.label).is_some(), "{}", e.label);
        }
        let mut labels: Vec<_> = rep.entries.iter().map(|e| &e.label).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), rep.entries.len());
    }

    #[test]
    fn limits_mark_reports_truncated() {
        let opts = RunOptions { limits: Limits { max_basis: Some(5), ..Limits::default() }, ..Default::default() };
        let rep = cmd_check_theorem(Tag::ElemRot, &BuildParams::n(3), &opts).unwrap();
        assert!(rep.truncated);
        assert!(!rep.expectations_met);
        let opts = RunOptions { limits: Limits { max_degree: 4, ..Limits::default() }, ..Default::default() };
        assert!(cmd_check_theorem(Tag::ElemRot, &BuildParams::n(3), &opts).is_err());
    }

    #[test]
    fn identities_and_dehn_reports() {
        let r = cmd_verify_identities(None).unwrap();
        assert!(r.expectations_met, "{}", r.render_text());
        assert_eq!(r.summary.counts.get("Zero"), Some(&6));
        let d = cmd_dehn_validate(None).unwrap();
        assert!(d.expectations_met, "{}", d.render_text());
        let one = cmd_dehn_validate(Some("2")).unwrap();
        assert_eq!(one.entries.len(), 3);
        assert!(cmd_dehn_validate(Some("9")).is_err());
    }

    #[test]
    fn basis_cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("rotlab-cache-{}", std::process::id()));
        let opts = RunOptions { cache: Some(dir.clone()), ..Default::default() };
        let a = cmd_check_theorem(Tag::ElemRot, &BuildParams::n(3), &opts).unwrap();
        let b = cmd_check_theorem(Tag::ElemRot, &BuildParams::n(3), &opts).unwrap();
        assert!(a.systems[0].cache_file.is_some());
        assert_eq!(a.entries, b.entries);
        let _ = fs::remove_dir_all(dir);
    }
}
