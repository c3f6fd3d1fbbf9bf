//! Builders for the hypothesis relations and goal polynomials of each
//! commutation experiment, at series level and at atom level.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::free_algebra::{AlgebraError, Alphabet, FreePoly, GeneratorId, Kind, Scalar};
use crate::series::{series_from_spec, BiDegree, CentralPoly, SeriesError, SeriesSpec, Var};
use crate::symfun::{elem, product_over_subset, BarPattern, IndexSubset};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelationError {
    #[error("unknown relation system tag `{0}`")]
    UnknownTag(String),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("bound {bound} is too small; [g_S, h_S] needs bound {required}")]
    BoundTooSmall { required: u32, bound: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("system file: {0}")]
    Format(String),
}

/// A query polynomial labeled by the subset and component it comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    pub subset: IndexSubset,
    /// A bidegree such as `(2,1)` or a named kind such as `prod-prod`.
    pub kind: String,
    pub poly: FreePoly,
}

impl Goal {
    pub fn label(&self) -> String {
        format!("S={} {}", self.subset, self.kind)
    }
}

/// A finitely presented quotient plus membership queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSystem {
    pub name: String,
    pub alphabet: Arc<Alphabet>,
    pub hypotheses: Vec<FreePoly>,
    pub goals: Vec<Goal>,
    pub degree_bound: u32,
    pub homogeneous: bool,
    pub notes: Vec<String>,
}

impl RelationSystem {
    fn new(name: impl Into<String>, alphabet: &Arc<Alphabet>) -> Self {
        RelationSystem {
            name: name.into(),
            alphabet: alphabet.clone(),
            hypotheses: Vec::new(),
            goals: Vec::new(),
            degree_bound: 0,
            homogeneous: true,
            notes: Vec::new(),
        }
    }

    fn push_hyp(&mut self, p: FreePoly) {
        if !p.is_zero() && !self.hypotheses.contains(&p) {
            self.hypotheses.push(p);
        }
    }

    fn push_goal(&mut self, subset: &IndexSubset, kind: impl Into<String>, poly: FreePoly) {
        self.goals.push(Goal { subset: subset.clone(), kind: kind.into(), poly });
    }

    /// Recomputes `homogeneous` and raises `degree_bound` to cover every
    /// hypothesis and goal.
    fn finalize(mut self, bound: Option<u32>) -> Self {
        self.homogeneous = self.hypotheses.iter().all(FreePoly::is_homogeneous);
        let max = self
            .hypotheses
            .iter()
            .chain(self.goals.iter().map(|g| &g.poly))
            .filter_map(FreePoly::degree)
            .max()
            .unwrap_or(0) as u32;
        self.degree_bound = bound.unwrap_or(max).max(max);
        self
    }

    /// Goals whose degree fits under the system bound.
    pub fn goal_by_label(&self, label: &str) -> Option<&Goal> {
        self.goals.iter().find(|g| g.label() == label)
    }
}

/// Serialized form of a [`RelationSystem`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFile {
    pub name: String,
    pub alphabet: Vec<GeneratorId>,
    pub hypotheses: Vec<String>,
    pub goals: Vec<GoalFile>,
    pub degree_bound: u32,
    pub homogeneous: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalFile {
    pub subset: Vec<u32>,
    pub kind: String,
    pub poly: String,
}

impl RelationSystem {
    pub fn to_file(&self) -> SystemFile {
        SystemFile {
            name: self.name.clone(),
            alphabet: self.alphabet.generators().to_vec(),
            hypotheses: self.hypotheses.iter().map(|p| p.to_string()).collect(),
            goals: self
                .goals
                .iter()
                .map(|g| GoalFile {
                    subset: g.subset.members().to_vec(),
                    kind: g.kind.clone(),
                    poly: g.poly.to_string(),
                })
                .collect(),
            degree_bound: self.degree_bound,
            homogeneous: self.homogeneous,
            notes: self.notes.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("system serializes")
    }

    /// Parses a system; `homogeneous` is recomputed rather than trusted.
    pub fn from_file(f: &SystemFile) -> Result<Self, RelationError> {
        let alphabet = Alphabet::with_order(f.alphabet.clone())?;
        let mut sys = RelationSystem::new(f.name.clone(), &alphabet);
        for h in &f.hypotheses {
            sys.hypotheses.push(FreePoly::parse(h, &alphabet)?);
        }
        for g in &f.goals {
            let poly = FreePoly::parse(&g.poly, &alphabet)?;
            sys.push_goal(&IndexSubset::new(g.subset.iter().copied()), g.kind.clone(), poly);
        }
        sys.notes = f.notes.clone();
        let declared = f.homogeneous;
        let sys = sys.finalize(Some(f.degree_bound));
        if declared && !sys.homogeneous {
            return Err(RelationError::Format("declared homogeneous but a hypothesis is not".into()));
        }
        Ok(sys)
    }

    pub fn from_json(s: &str) -> Result<Self, RelationError> {
        let f: SystemFile = serde_json::from_str(s).map_err(|e| RelationError::Format(e.to_string()))?;
        Self::from_file(&f)
    }
}

/// How [`decompose_commutation`] treats the truncation bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecomposeMode {
    /// Every series must be a polynomial that fits under the bound together
    /// with all products.
    Exact,
    /// Keep the components that the bound determines; higher ones are
    /// dropped and noted.
    Truncated,
}

/// Nonzero bidegree components of `[g_S, h_S]`: hypotheses for
/// `1 ≤ |S| ≤ max_card`, goals for larger `S`.
pub fn decompose_commutation(
    name: &str,
    g: &[CentralPoly],
    h: &[CentralPoly],
    max_card: usize,
    mode: DecomposeMode,
) -> Result<RelationSystem, RelationError> {
    let n = g.len();
    if h.len() != n || n == 0 {
        return Err(RelationError::BadParams(format!("need equally many g and h, got {} and {}", n, h.len())));
    }
    if max_card > n {
        return Err(RelationError::BadParams(format!("max_card {max_card} exceeds N = {n}")));
    }
    let alphabet = g[0].alphabet().clone();
    let bound = g[0].bound();
    if mode == DecomposeMode::Exact {
        if let Some(bad) = g.iter().chain(h).position(|s| !s.is_exact()) {
            return Err(RelationError::BadParams(format!("series {bad} is not a polynomial under the bound")));
        }
        let required: u32 = g.iter().chain(h).map(|s| s.max_total_degree().unwrap_or(0)).sum();
        if required > bound {
            return Err(RelationError::BoundTooSmall { required, bound });
        }
    }
    let mut sys = RelationSystem::new(name, &alphabet);
    for s in IndexSubset::all_subsets(n as u32).into_iter().filter(|s| !s.is_empty()) {
        let gs = product_over_subset(g, &s, &alphabet, bound)?;
        let hs = product_over_subset(h, &s, &alphabet, bound)?;
        let c = gs.try_commutator(&hs)?;
        for (d, p) in c.components() {
            if s.len() <= max_card {
                sys.push_hyp(p.clone());
            } else {
                sys.push_goal(&s, d.to_string(), p.clone());
            }
        }
    }
    if mode == DecomposeMode::Truncated {
        sys.notes.push(format!("components of total bidegree above {bound} are not included"));
    }
    Ok(sys.finalize(Some(bound)))
}

/// Experiment tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    ElemRot,
    ElemRotSingle,
    SuperRot,
    HalfRot,
    LinearStrengthened,
    MasterCriterion,
    PairedFactors,
    PatternWord,
    E1E2Remark,
    RuleOfK,
    QuadraticRot,
    RotV2,
}

impl Tag {
    pub const ALL: [Tag; 12] = [
        Tag::ElemRot,
        Tag::ElemRotSingle,
        Tag::SuperRot,
        Tag::HalfRot,
        Tag::LinearStrengthened,
        Tag::MasterCriterion,
        Tag::PairedFactors,
        Tag::PatternWord,
        Tag::E1E2Remark,
        Tag::RuleOfK,
        Tag::QuadraticRot,
        Tag::RotV2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tag::ElemRot => "elem_rot",
            Tag::ElemRotSingle => "elem_rot_single",
            Tag::SuperRot => "super_rot",
            Tag::HalfRot => "half_rot",
            Tag::LinearStrengthened => "linear_strengthened",
            Tag::MasterCriterion => "master_criterion",
            Tag::PairedFactors => "paired_factors",
            Tag::PatternWord => "pattern_word",
            Tag::E1E2Remark => "e1e2_remark",
            Tag::RuleOfK => "rule_of_k",
            Tag::QuadraticRot => "quadratic_rot",
            Tag::RotV2 => "rotv2",
        }
    }

    /// Whether every goal is expected to be in the ideal.
    pub fn expects_members(self) -> bool {
        !matches!(self, Tag::PairedFactors | Tag::E1E2Remark | Tag::RuleOfK | Tag::LinearStrengthened)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tag {
    type Err = RelationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tag::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| RelationError::UnknownTag(s.to_string()))
    }
}

/// Parameters for [`build`]; unset fields take per-tag defaults.
#[derive(Debug, Clone, Default)]
pub struct BuildParams {
    pub n: Option<u32>,
    pub bound: Option<u32>,
    pub bars: Option<BarPattern>,
    /// Eight letters over `{x, y}` for `pattern_word`.
    pub pattern: Option<String>,
    pub k: Option<u32>,
    /// Adjoin formal inverses of the atoms with cancellation relations.
    pub inverses: Option<bool>,
    /// Highest power of `y` kept in the atom-level product systems.
    pub y_truncation: Option<u32>,
}

impl BuildParams {
    pub fn n(n: u32) -> Self {
        BuildParams { n: Some(n), ..Default::default() }
    }

    pub fn with_bound(mut self, b: u32) -> Self {
        self.bound = Some(b);
        self
    }
}

fn gen(a: &Arc<Alphabet>, g: GeneratorId) -> FreePoly {
    FreePoly::generator(a, g).expect("generator in alphabet")
}

fn comm(a: &FreePoly, b: &FreePoly) -> FreePoly {
    a.try_commutator(b).expect("same alphabet")
}

fn sum_over(a: &Arc<Alphabet>, s: &IndexSubset, f: impl Fn(u32) -> GeneratorId) -> FreePoly {
    s.members().iter().fold(FreePoly::zero(a), |acc, &i| &acc + &gen(a, f(i)))
}

/// `x_{s_m} ⋯ x_{s_1}`.
fn prod_over(a: &Arc<Alphabet>, s: &IndexSubset, f: impl Fn(u32) -> GeneratorId) -> FreePoly {
    s.members().iter().rev().fold(FreePoly::one(a), |acc, &i| &acc * &gen(a, f(i)))
}

fn inverse_relations(a: &Arc<Alphabet>, bases: &[GeneratorId]) -> Vec<FreePoly> {
    let one = FreePoly::one(a);
    bases
        .iter()
        .flat_map(|&g| {
            let x = gen(a, g);
            let xi = gen(a, GeneratorId::inverse_of(g));
            [&(&x * &xi) - &one, &(&xi * &x) - &one]
        })
        .collect()
}

fn require_n(p: &BuildParams, default: Option<u32>, min: u32) -> Result<u32, RelationError> {
    let n = p.n.or(default).ok_or_else(|| RelationError::BadParams("N is required".into()))?;
    if n < min {
        return Err(RelationError::BadParams(format!("N = {n} is below the minimum {min}")));
    }
    if n > 10 {
        return Err(RelationError::BadParams(format!("N = {n} exceeds the supported maximum 10")));
    }
    Ok(n)
}

/// Builds the named system.
pub fn build(tag: Tag, p: &BuildParams) -> Result<RelationSystem, RelationError> {
    match tag {
        Tag::ElemRot => elem_rot(p),
        Tag::ElemRotSingle => elem_rot_single(p),
        Tag::SuperRot => super_rot(p),
        Tag::HalfRot => half_rot(p),
        Tag::LinearStrengthened => linear_strengthened(p),
        Tag::MasterCriterion => master_criterion(p),
        Tag::PairedFactors => paired_factors(p),
        Tag::PatternWord => pattern_word(p),
        Tag::E1E2Remark => e1e2_remark(p),
        Tag::RuleOfK => rule_of_k(p),
        Tag::QuadraticRot => product_vs_elem(p, Tag::QuadraticRot, 2),
        Tag::RotV2 => product_vs_elem(p, Tag::RotV2, u32::MAX),
    }
}

fn e_comm(a: &Arc<Alphabet>, k: i64, l: i64, s: &IndexSubset, fk: Kind, fl: Kind) -> Result<FreePoly, RelationError> {
    let x = elem(k, s, fk, a)?;
    let y = elem(l, s, fl, a)?;
    Ok(comm(&x, &y))
}

/// The explicit five families `[e_k(u_S), e_l(v_S)]` with `kl ≤ 3`.
pub const ELEM_ROT_FAMILIES: [(i64, i64, usize, usize); 5] =
    [(1, 1, 1, 3), (2, 1, 2, 3), (1, 2, 2, 3), (3, 1, 3, 3), (1, 3, 3, 3)];

fn elem_rot(p: &BuildParams) -> Result<RelationSystem, RelationError> {
    let n = require_n(p, None, 1)?;
    let a = Alphabet::uv(n);
    let mut sys = RelationSystem::new(Tag::ElemRot.name(), &a);
    let subsets = IndexSubset::all_subsets(n);
    for (k, l, lo, hi) in ELEM_ROT_FAMILIES {
        for s in subsets.iter().filter(|s| (lo..=hi).contains(&s.len())) {
            sys.push_hyp(e_comm(&a, k, l, s, Kind::U, Kind::V)?);
        }
    }
    let bound = p.bound.unwrap_or(2 * n);
    for s in subsets.iter().filter(|s| !s.is_empty()) {
        let m = s.len() as i64;
        for k in 1..=m {
            for l in 1..=m {
                let listed = s.len() <= 3 && k * l <= 3;
                if listed || (k + l) as u32 > bound {
                    continue;
                }
                let c = e_comm(&a, k, l, s, Kind::U, Kind::V)?;
                sys.push_goal(s, BiDegree::new(k as u32, l as u32).to_string(), c);
            }
        }
    }
    if bound < 2 * n {
        sys.notes.push(format!("goals of degree above {bound} omitted"));
    }
    Ok(sys.finalize(Some(bound)))
}

fn elem_rot_single(p: &BuildParams) -> Result<RelationSystem, RelationError> {
    let n = require_n(p, None, 1)?;
    let a = Alphabet::u(n);
    let mut sys = RelationSystem::new(Tag::ElemRotSingle.name(), &a);
    let subsets = IndexSubset::all_subsets(n);
    for (k, l, lo, hi) in [(1, 2, 2, 3), (1, 3, 3, 3)] {
        for s in subsets.iter().filter(|s| (lo..=hi).contains(&s.len())) {
            sys.push_hyp(e_comm(&a, k, l, s, Kind::U, Kind::U)?);
        }
    }
    let bound = p.bound.unwrap_or((2 * n).saturating_sub(1).max(2));
    for s in subsets.iter().filter(|s| s.len() >= 2) {
        let m = s.len() as i64;
        for k in 1..=m {
            for l in k + 1..=m {
                let listed = s.len() <= 3 && k == 1;
                if listed || (k + l) as u32 > bound {
                    continue;
                }
                let c = e_comm(&a, k, l, s, Kind::U, Kind::U)?;
                sys.push_goal(s, BiDegree::new(k as u32, l as u32).to_string(), c);
            }
        }
    }
    Ok(sys.finalize(Some(bound)))
}

/// Alphabet with the `g_i` and `h_i` series of a super instance.
pub type SuperSeries = (Arc<Alphabet>, Vec<CentralPoly>, Vec<CentralPoly>);

/// `1 + x·u_i` for unbarred `i`, `(1 − x·u_i)^{-1}` for barred `i`, and the
/// same with `y`, `v_i` for `h_i`.
pub fn super_series(n: u32, bars: &BarPattern, bound: u32) -> Result<SuperSeries, RelationError> {
    let a = Alphabet::uv(n);
    let spec = |var, g, i| {
        if bars.is_barred(i) {
            SeriesSpec::geometric(var, g, Scalar::one())
        } else {
            SeriesSpec::linear(var, g, Scalar::one())
        }
    };
    let mut g = Vec::new();
    let mut h = Vec::new();
    for i in 1..=n {
        g.push(series_from_spec(&spec(Var::X, GeneratorId::u(i), i), &a, bound)?);
        h.push(series_from_spec(&spec(Var::Y, GeneratorId::v(i), i), &a, bound)?);
    }
    Ok((a, g, h))
}

fn parse_bidegree(kind: &str) -> Option<BiDegree> {
    let inner = kind.strip_prefix('(')?.strip_suffix(')')?;
    let (x, y) = inner.split_once(',')?;
    Some(BiDegree::new(x.parse().ok()?, y.parse().ok()?))
}

fn super_rot(p: &BuildParams) -> Result<RelationSystem, RelationError> {
    let n = require_n(p, Some(3), 1)?;
    let bound = p.bound.unwrap_or(6);
    let bars = p.bars.clone().unwrap_or_default();
    let (_, g, h) = super_series(n, &bars, bound)?;
    let full = decompose_commutation(Tag::SuperRot.name(), &g, &h, n as usize, DecomposeMode::Truncated)?;
    let mut sys = RelationSystem::new(Tag::SuperRot.name(), &full.alphabet);
    // Recover subset and bidegree for each component, then split by k, l.
    for s in IndexSubset::all_subsets(n).into_iter().filter(|s| !s.is_empty()) {
        let gs = product_over_subset(&g, &s, &full.alphabet, bound)?;
        let hs = product_over_subset(&h, &s, &full.alphabet, bound)?;
        for (d, c) in gs.try_commutator(&hs)?.components() {
            if s.len() <= 3 && (d.x == 1 || d.y == 1) {
                sys.push_hyp(c.clone());
            } else {
                sys.push_goal(&s, d.to_string(), c.clone());
            }
        }
    }
    sys.name = format!("{} bars={}", Tag::SuperRot.name(), bars);
    sys.notes = full.notes;
    Ok(sys.finalize(Some(bound)))
}

fn gv_alphabet(n: u32, inverses: bool) -> Arc<Alphabet> {
    let mut gens: Vec<GeneratorId> = (1..=n).map(GeneratorId::g).chain((1..=n).map(GeneratorId::v)).collect();
    if inverses {
        gens.extend((1..=n).map(|i| GeneratorId::inverse_of(GeneratorId::g(i))));
    }
    Alphabet::new(gens).expect("alphabet size")
}

fn gh_alphabet(n: u32, inverses: bool) -> Arc<Alphabet> {
    let mut gens: Vec<GeneratorId> = Alphabet::gh(n).generators().to_vec();
    if inverses {
        let inv: Vec<GeneratorId> = gens.iter().map(|&g| GeneratorId::inverse_of(g)).collect();
        gens.extend(inv);
    }
    Alphabet::new(gens).expect("alphabet size")
}

fn half_rot(p: &BuildParams) -> Result<RelationSystem, RelationError> {
    let n = require_n(p, Some(4), 1)?;
    let inverses = p.inverses.unwrap_or(true);
    let a = gv_alphabet(n, inverses);
    let mut sys = RelationSystem::new(Tag::HalfRot.name(), &a);
    let subsets = IndexSubset::all_subsets(n);
    for s in subsets.iter().filter(|s| (1..=3).contains(&s.len())) {
        sys.push_hyp(comm(&sum_over(&a, s, GeneratorId::v), &prod_over(&a, s, GeneratorId::g)));
    }
    if inverses {
        for r in inverse_relations(&a, &(1..=n).map(GeneratorId::g).collect::<Vec<_>>()) {
            sys.push_hyp(r);
        }
    }
    for s in subsets.iter().filter(|s| s.len() >= 4) {
        sys.push_goal(s, "sum-vs-prod", comm(&sum_over(&a, s, GeneratorId::v), &prod_over(&a, s, GeneratorId::g)));
    }
    Ok(sys.finalize(Some(p.bound.unwrap_or(7))))
}

fn linear_strengthened(p: &BuildParams) -> Result<RelationSystem, RelationError> {
    let n = require_n(p, Some(4), 1)?;
    let inverses = p.inverses.unwrap_or(false);
    let a = gh_alphabet(n, inverses);
    let mut sys = RelationSystem::new(Tag::LinearStrengthened.name(), &a);
    let subsets = IndexSubset::all_subsets(n);
    let (sg, sh) =
        (|s: &IndexSubset| sum_over(&a, s, GeneratorId::g), |s: &IndexSubset| sum_over(&a, s, GeneratorId::h));
    let (pg, ph) =
        (|s: &IndexSubset| prod_over(&a, s, GeneratorId::g), |s: &IndexSubset| prod_over(&a, s, GeneratorId::h));
    for s in subsets.iter().filter(|s| s.len() == 1) {
        sys.push_hyp(comm(&sh(s), &sg(s)));
    }
    for s in subsets.iter().filter(|s| s.len() == 2) {
        sys.push_hyp(comm(&sh(s), &sg(s)));
    }
    for s in subsets.iter().filter(|s| (2..=3).contains(&s.len())) {
        sys.push_hyp(comm(&sh(s), &pg(s)));
    }
    for s in subsets.iter().filter(|s| (2..=3).contains(&s.len())) {
        sys.push_hyp(comm(&sg(s), &ph(s)));
    }
    if inverses {
        for r in inverse_relations(&a, Alphabet::gh(n).generators()) {
            sys.push_hyp(r);
        }
    }
    for s in subsets.iter().filter(|s| s.len() >= 4) {
        sys.push_goal(s, "sum-sum", comm(&sg(s), &sh(s)));
        sys.push_goal(s, "sum-prod", comm(&sg(s), &ph(s)));
        sys.push_goal(s, "prod-sum", comm(&pg(s), &sh(s)));
        sys.push_goal(s, "prod-prod", comm(&pg(s), &ph(s)));
        sys.push_goal(s, "hsum-gprod", comm(&sh(s), &pg(s)));
    }
    Ok(sys.finalize(Some(p.bound.unwrap_or(2 * n))))
}

fn master_criterion(p: &BuildParams) -> Result<RelationSystem, RelationError> {
    let n = require_n(p, Some(4), 1)?;
    let inverses = p.inverses.unwrap_or(false);
    let a = gh_alphabet(n, inverses);
    let mut sys = RelationSystem::new(Tag::MasterCriterion.name(), &a);
    let g = |i| gen(&a, GeneratorId::g(i));
    let h = |i| gen(&a, GeneratorId::h(i));
    for i in 1..=n {
        sys.push_hyp(comm(&g(i), &h(i)));
    }
    for b in 1..=n {
        for aa in 1..b {
            sys.push_hyp(&(&g(b) * &comm(&g(aa), &h(b))) - &(&comm(&h(aa), &g(b)) * &g(aa)));
        }
    }
    for c in 1..=n {
        for b in 1..c {
            for aa in 1..b {
                sys.push_hyp(&(&(&g(c) * &g(b)) * &comm(&g(aa), &h(c))) - &(&comm(&h(aa), &g(c)) * &(&g(b) * &g(aa))));
            }
        }
    }
    for b in 1..=n {
        for aa in 1..b {
            sys.push_hyp(&(&h(b) * &comm(&h(aa), &g(b))) - &(&comm(&h(aa), &g(b)) * &h(aa)));
        }
    }
    for c in 1..=n {
        for b in 1..c {
            for aa in 1..b {
                sys.push_hyp(&(&(&h(c) * &h(b)) * &comm(&h(aa), &g(c))) - &(&comm(&h(aa), &g(c)) * &(&h(b) * &h(aa))));
            }
        }
    }
    if inverses {
        for r in inverse_relations(&a, Alphabet::gh(n).generators()) {
            sys.push_hyp(r);
        }
    }
    for s in IndexSubset::all_subsets(n).iter().filter(|s| s.len() >= 2) {
        let c = comm(&prod_over(&a, s, GeneratorId::g), &prod_over(&a, s, GeneratorId::h));
        sys.push_goal(s, "prod-prod", c);
    }
    Ok(sys.finalize(Some(p.bound.unwrap_or(2 * n))))
}

fn linear(var: Var, g: GeneratorId, a: &Arc<Alphabet>, bound: u32) -> Result<CentralPoly, SeriesError> {
    series_from_spec(&SeriesSpec::linear(var, g, Scalar::one()), a, bound)
}

/// The series `g_i`, `h_i` of the paired-factors example.
pub fn paired_factor_series(bound: u32) -> Result<(Vec<CentralPoly>, Vec<CentralPoly>), RelationError> {
    let a = Alphabet::u(8);
    let mut g = Vec::new();
    let mut h = Vec::new();
    for i in 1..=4 {
        let (hi, lo) = (GeneratorId::u(2 * i), GeneratorId::u(2 * i - 1));
        g.push(linear(Var::X, hi, &a, bound)?.try_mul(&linear(Var::X, lo, &a, bound)?)?);
        h.push(linear(Var::Y, hi, &a, bound)?.try_mul(&linear(Var::Y, lo, &a, bound)?)?);
    }
    Ok((g, h))
}

fn paired_factors(p: &BuildParams) -> Result<RelationSystem, RelationError> {
    let bound = p.bound.unwrap_or(8);
    let (g, h) = paired_factor_series(bound)?;
    let mode = if bound >= 16 { DecomposeMode::Exact } else { DecomposeMode::Truncated };
    let mut sys = decompose_commutation(Tag::PairedFactors.name(), &g, &h, 3, mode)?;
    sys.degree_bound = bound;
    Ok(sys)
}

/// Parses an eight-letter `{x,y}` word into the variables of `g_1..g_4`,
/// `h_1..h_4`.
pub fn parse_pattern(z: &str) -> Result<[Var; 8], RelationError> {
    let letters: Vec<Var> = z
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '.' && *c != '|')
        .map(|c| match c {
            'x' => Ok(Var::X),
            'y' => Ok(Var::Y),
            _ => Err(RelationError::BadParams(format!("pattern letter `{c}` is not x or y"))),
        })
        .collect::<Result<_, _>>()?;
    letters
        .try_into()
        .map_err(|v: Vec<Var>| RelationError::BadParams(format!("pattern needs 8 letters, got {}", v.len())))
}

fn pattern_word(p: &BuildParams) -> Result<RelationSystem, RelationError> {
    let z = p.pattern.as_deref().ok_or_else(|| RelationError::BadParams("pattern_word needs a pattern".into()))?;
    let vars = parse_pattern(z)?;
    let bound = p.bound.unwrap_or(8);
    let a = Alphabet::uv(4);
    let mut g = Vec::new();
    let mut h = Vec::new();
    for i in 0..4 {
        g.push(linear(vars[i], GeneratorId::u(i as u32 + 1), &a, bound)?);
        h.push(linear(vars[4 + i], GeneratorId::v(i as u32 + 1), &a, bound)?);
    }
    let mode = if bound >= 8 { DecomposeMode::Exact } else { DecomposeMode::Truncated };
    let mut sys = decompose_commutation(Tag::PatternWord.name(), &g, &h, 3, mode)?;
    let text: String = vars.iter().map(|v| if *v == Var::X { 'x' } else { 'y' }).collect();
    sys.name = format!("{} {}", Tag::PatternWord.name(), text);
    Ok(sys)
}

fn e1e2_remark(p: &BuildParams) -> Result<RelationSystem, RelationError> {
    let bound = p.bound.unwrap_or(10);
    let a = Alphabet::uv(3);
    let taps = vec![Scalar::zero(), Scalar::zero(), Scalar::one(), Scalar::one(), Scalar::one()];
    let mut g = Vec::new();
    let mut h = Vec::new();
    for i in 1..=3 {
        g.push(series_from_spec(&SeriesSpec::polynomial(Var::X, GeneratorId::u(i), taps.clone()), &a, bound)?);
        h.push(linear(Var::Y, GeneratorId::v(i), &a, bound)?);
    }
    let mut sys = decompose_commutation(Tag::E1E2Remark.name(), &g, &h, 3, DecomposeMode::Truncated)?;
    let full = IndexSubset::full(3);
    let hsum = h.iter().skip(1).try_fold(h[0].clone(), |acc, x| acc.try_add(x))?;
    let mut gpairs = CentralPoly::zero(&a, bound);
    for s in IndexSubset::subsets_with_card(3, 2, 2) {
        gpairs = gpairs.try_add(&product_over_subset(&g, &s, &a, bound)?)?;
    }
    for (d, c) in hsum.try_commutator(&gpairs)?.components() {
        sys.push_goal(&full, d.to_string(), c.clone());
    }
    sys.notes.push(format!("goal components above total degree {bound} are not examined"));
    Ok(sys.finalize(Some(bound)))
}

fn rule_of_k(p: &BuildParams) -> Result<RelationSystem, RelationError> {
    let k = p.k.ok_or_else(|| RelationError::BadParams("rule_of_k needs k".into()))?;
    let n = require_n(p, Some(k + 1), k + 1)?;
    let bound = p.bound.unwrap_or(2 * n);
    let a = Alphabet::uv(n);
    let mut g = Vec::new();
    let mut h = Vec::new();
    for i in 1..=n {
        g.push(linear(Var::X, GeneratorId::u(i), &a, bound)?);
        h.push(linear(Var::X, GeneratorId::v(i), &a, bound)?);
    }
    let mode = if bound >= 2 * n { DecomposeMode::Exact } else { DecomposeMode::Truncated };
    let mut sys = decompose_commutation(Tag::RuleOfK.name(), &g, &h, k as usize, mode)?;
    sys.name = format!("{} k={k}", Tag::RuleOfK.name());
    Ok(sys)
}

/// `[g_S, e_l(v_S)]` for atoms `g_i`, obtained as the `y^l` components of
/// `[g_S, h_S]` with `h_i = 1 + y·v_i` truncated above `y^t`.
fn product_vs_elem(p: &BuildParams, tag: Tag, default_t: u32) -> Result<RelationSystem, RelationError> {
    let n = require_n(p, Some(4), 1)?;
    let t = p.y_truncation.unwrap_or(default_t).min(n);
    let inverses = p.inverses.unwrap_or(true);
    let a = gv_alphabet(n, inverses);
    let g: Vec<CentralPoly> = (1..=n).map(|i| CentralPoly::constant(gen(&a, GeneratorId::g(i)), t)).collect();
    let h: Vec<CentralPoly> = (1..=n).map(|i| linear(Var::Y, GeneratorId::v(i), &a, t)).collect::<Result<_, _>>()?;
    let mut sys = decompose_commutation(tag.name(), &g, &h, 3, DecomposeMode::Truncated)?;
    sys.notes.clear();
    sys.notes.push(format!("h_i = 1 + y v_i taken modulo y^{}", t + 1));
    if inverses {
        for r in inverse_relations(&a, &(1..=n).map(GeneratorId::g).collect::<Vec<_>>()) {
            sys.push_hyp(r);
        }
    }
    let bound = p.bound.or(Some(if tag == Tag::QuadraticRot { 7 } else { 2 * n }));
    Ok(sys.finalize(bound))
}

/// Splits a goal kind like `(2,1)` back into a bidegree.
pub fn goal_bidegree(goal: &Goal) -> Option<BiDegree> {
    parse_bidegree(&goal.kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_subsets(n: u32, lo: usize, hi: usize) -> usize {
        IndexSubset::subsets_with_card(n, lo, hi).len()
    }

    #[test]
    fn decomposition_examples() {
        let a = Alphabet::uv(2);
        let g: Vec<_> = (1..=2).map(|i| linear(Var::X, GeneratorId::u(i), &a, 4).unwrap()).collect();
        let h: Vec<_> = (1..=2).map(|i| linear(Var::Y, GeneratorId::v(i), &a, 4).unwrap()).collect();
        let sys = decompose_commutation("t", &g, &h, 1, DecomposeMode::Exact).unwrap();
        let p = |s: &str| FreePoly::parse(s, &a).unwrap();
        assert_eq!(sys.hypotheses, vec![comm(&p("u1"), &p("v1")), comm(&p("u2"), &p("v2"))]);
        let find = |kind: &str| sys.goals.iter().find(|g| g.kind == kind).unwrap().poly.clone();
        assert_eq!(find("(1,1)"), comm(&p("u2 + u1"), &p("v2 + v1")));
        assert_eq!(find("(2,1)"), comm(&p("u2.u1"), &p("v2 + v1")));
        assert!(sys.homogeneous);
        assert_eq!(sys.degree_bound, 4);
    }

    #[test]
    fn exact_mode_checks_bound() {
        let a = Alphabet::uv(2);
        let g: Vec<_> = (1..=2).map(|i| linear(Var::X, GeneratorId::u(i), &a, 3).unwrap()).collect();
        let h: Vec<_> = (1..=2).map(|i| linear(Var::Y, GeneratorId::v(i), &a, 3).unwrap()).collect();
        let err = decompose_commutation("t", &g, &h, 1, DecomposeMode::Exact).unwrap_err();
        assert_eq!(err, RelationError::BoundTooSmall { required: 4, bound: 3 });
        assert!(decompose_commutation("t", &g, &h, 1, DecomposeMode::Truncated).is_ok());
    }

    #[test]
    fn elem_rot_counts() {
        let sys = build(Tag::ElemRot, &BuildParams::n(3)).unwrap();
        let expected = count_subsets(3, 1, 3) + 2 * count_subsets(3, 2, 3) + 2 * count_subsets(3, 3, 3);
        assert_eq!(expected, 17);
        assert_eq!(sys.hypotheses.len(), expected);
        // (2,2) for the three 2-subsets and {1,2,3}, plus (2,3),(3,2),(3,3).
        assert_eq!(sys.goals.len(), 3 + 4);
        assert!(sys.homogeneous);
    }

    #[test]
    fn elem_rot_hypotheses_inside_decomposition() {
        let n = 3;
        let sys = build(Tag::ElemRot, &BuildParams::n(n)).unwrap();
        let a = Alphabet::uv(n);
        let g: Vec<_> = (1..=n).map(|i| linear(Var::X, GeneratorId::u(i), &a, 6).unwrap()).collect();
        let h: Vec<_> = (1..=n).map(|i| linear(Var::Y, GeneratorId::v(i), &a, 6).unwrap()).collect();
        let dec = decompose_commutation("t", &g, &h, 3, DecomposeMode::Exact).unwrap();
        for hyp in &sys.hypotheses {
            assert!(dec.hypotheses.contains(hyp), "{hyp}");
        }
        for goal in &sys.goals {
            assert!(dec.hypotheses.contains(&goal.poly));
        }
        assert_eq!(dec.hypotheses.len(), sys.hypotheses.len() + sys.goals.len());
    }

    #[test]
    fn single_family_is_identified_elem_rot() {
        let n = 4;
        let single = build(Tag::ElemRotSingle, &BuildParams::n(n)).unwrap();
        let double = build(Tag::ElemRot, &BuildParams::n(n)).unwrap();
        let target = Alphabet::u(n);
        let mut collapsed: Vec<FreePoly> = double
            .hypotheses
            .iter()
            .map(|h| h.rename(&target, |g| GeneratorId::u(g.index)).unwrap())
            .filter(|p| !p.is_zero())
            .map(|p| p.monic())
            .collect();
        collapsed.sort_by_key(|p| p.to_string());
        collapsed.dedup();
        let mut mine: Vec<FreePoly> = single.hypotheses.iter().map(|p| p.monic()).collect();
        mine.sort_by_key(|p| p.to_string());
        assert_eq!(collapsed, mine);
    }

    #[test]
    fn pattern_all_x_matches_decomposition() {
        let p = BuildParams { pattern: Some("xxxxxxxx".into()), ..Default::default() };
        let sys = build(Tag::PatternWord, &p).unwrap();
        let a = Alphabet::uv(4);
        let g: Vec<_> = (1..=4).map(|i| linear(Var::X, GeneratorId::u(i), &a, 8).unwrap()).collect();
        let h: Vec<_> = (1..=4).map(|i| linear(Var::X, GeneratorId::v(i), &a, 8).unwrap()).collect();
        let dec = decompose_commutation("pattern_word", &g, &h, 3, DecomposeMode::Exact).unwrap();
        assert_eq!(sys.hypotheses, dec.hypotheses);
        assert_eq!(sys.goals, dec.goals);
        let rk = build(Tag::RuleOfK, &BuildParams { k: Some(3), ..Default::default() }).unwrap();
        assert_eq!(rk.hypotheses, dec.hypotheses);
    }

    #[test]
    fn rule_of_one_smallest_case() {
        let sys = build(Tag::RuleOfK, &BuildParams { k: Some(1), n: Some(2), ..Default::default() }).unwrap();
        let a = Alphabet::uv(2);
        let p = |s: &str| FreePoly::parse(s, &a).unwrap();
        assert_eq!(sys.hypotheses, vec![comm(&p("u1"), &p("v1")), comm(&p("u2"), &p("v2"))]);
        assert!(sys.goals.iter().all(|g| g.subset == IndexSubset::full(2)));
        assert_eq!(sys.goals.len(), 3);
        assert_eq!(sys.degree_bound, 4);
    }

    #[test]
    fn homogeneity_flags() {
        for tag in [Tag::ElemRot, Tag::SuperRot, Tag::PairedFactors, Tag::E1E2Remark] {
            let p = BuildParams { n: Some(3), ..Default::default() };
            let sys = build(tag, &p).unwrap();
            assert!(sys.homogeneous, "{tag}");
            assert!(sys.hypotheses.iter().all(FreePoly::is_homogeneous));
        }
        let sys = build(Tag::HalfRot, &BuildParams::n(3)).unwrap();
        assert!(!sys.homogeneous);
        let sys = build(Tag::LinearStrengthened, &BuildParams::n(4)).unwrap();
        assert!(sys.homogeneous);
    }

    #[test]
    fn quadratic_matches_explicit_commutators() {
        let sys =
            build(Tag::QuadraticRot, &BuildParams { n: Some(3), inverses: Some(false), ..Default::default() }).unwrap();
        let a = gv_alphabet(3, false);
        let s = IndexSubset::new([1, 3]);
        let gs = prod_over(&a, &s, GeneratorId::g);
        let e2 = elem(2, &s, Kind::V, &a).unwrap();
        assert!(sys.hypotheses.contains(&comm(&gs, &e2)));
        assert!(sys.goals.is_empty());
        let v2 = build(Tag::RotV2, &BuildParams { n: Some(4), inverses: Some(false), ..Default::default() }).unwrap();
        assert_eq!(v2.goals.len(), 4);
    }

    #[test]
    fn json_round_trip() {
        let sys = build(Tag::LinearStrengthened, &BuildParams::n(4)).unwrap();
        let back = RelationSystem::from_json(&sys.to_json()).unwrap();
        assert_eq!(back, sys);
        assert!(matches!("nope".parse::<Tag>(), Err(RelationError::UnknownTag(_))));
    }

    #[test]
    fn parse_patterns() {
        assert_eq!(parse_pattern("xyxy xyxy").unwrap()[1], Var::Y);
        assert!(parse_pattern("xyz").is_err());
        assert!(parse_pattern("xxx").is_err());
    }
}
