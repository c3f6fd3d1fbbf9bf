//! Randomized checks shared by the integration tests and the acceptance
//! runner. Every check takes an explicit seed so failures reproduce.

#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rotlab_core::free_algebra::{
    make_inner_derivation, Alphabet, Derivation, FreePoly, GeneratorId, Kind, Scalar, Word,
};
use rotlab_core::identities::{cancellation_is_confluent, inverse_normal_form};
use rotlab_core::lab::{run_system, GoalVerdict, OrderChoice, RunOptions};
use rotlab_core::ncgb::{complete, oracle_membership, CompletionOptions, MonomialOrder, Verdict};
use rotlab_core::relation_sets::{build, BuildParams, RelationSystem, Tag};
use rotlab_core::series::{series_from_spec, BiDegree, SeriesSpec, Var};
use rotlab_core::symfun::{elem, product_over_subset, super_elem, BarPattern, IndexSubset};

pub type Check = Result<(), String>;
pub type Property = (&'static str, fn(u64) -> Check);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn scalar(r: &mut impl Rng) -> Scalar {
    Scalar::ratio(r.gen_range(-6..=6), r.gen_range(1..=4))
}

pub fn word(r: &mut impl Rng, letters: u8, len: usize) -> Word {
    let v: Vec<u8> = (0..len).map(|_| r.gen_range(0..letters)).collect();
    Word::from_letters(&v).expect("short word")
}

/// Up to `terms` monomials of degree at most `deg`.
pub fn poly(r: &mut impl Rng, a: &Arc<Alphabet>, terms: usize, deg: usize) -> FreePoly {
    let n = r.gen_range(0..=terms);
    FreePoly::from_terms(
        a,
        (0..n).map(|_| {
            let len = r.gen_range(0..=deg);
            (word(r, a.len() as u8, len), scalar(r))
        }),
    )
}

/// A homogeneous polynomial of degree `deg` with up to `terms` terms.
pub fn homogeneous(r: &mut impl Rng, a: &Arc<Alphabet>, terms: usize, deg: usize) -> FreePoly {
    let n = r.gen_range(1..=terms);
    FreePoly::from_terms(a, (0..n).map(|_| (word(r, a.len() as u8, deg), scalar(r))))
}

fn eq(name: &str, l: &FreePoly, r: &FreePoly) -> Check {
    if l == r {
        Ok(())
    } else {
        Err(format!("{name}: {l} != {r}"))
    }
}

fn comm(a: &FreePoly, b: &FreePoly) -> FreePoly {
    a.try_commutator(b).expect("same alphabet")
}

// ---------------------------------------------------------------------------
// Core algebra

pub fn ring_axioms(seed: u64) -> Check {
    let mut r = rng(seed);
    let al = Alphabet::u(3);
    let (a, b, c) = (poly(&mut r, &al, 4, 3), poly(&mut r, &al, 4, 3), poly(&mut r, &al, 4, 3));
    let zero = FreePoly::zero(&al);
    let one = FreePoly::one(&al);
    eq("add assoc", &(&(&a + &b) + &c), &(&a + &(&b + &c)))?;
    eq("add comm", &(&a + &b), &(&b + &a))?;
    eq("add zero", &(&a + &zero), &a)?;
    eq("add neg", &(&a + &(-&a)), &zero)?;
    eq("sub", &(&a - &b), &(&a + &(-&b)))?;
    eq("mul assoc", &(&(&a * &b) * &c), &(&a * &(&b * &c)))?;
    eq("mul one", &(&a * &one), &a)?;
    eq("one mul", &(&one * &a), &a)?;
    eq("mul zero", &(&a * &zero), &zero)?;
    eq("left distrib", &(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)))?;
    eq("right distrib", &(&(&a + &b) * &c), &(&(&a * &c) + &(&b * &c)))?;
    let s = scalar(&mut r);
    eq("scalar", &(&a.scale(&s) * &b), &(&a * &b).scale(&s))
}

pub fn leibniz_jacobi(seed: u64) -> Check {
    let mut r = rng(seed);
    let al = Alphabet::u(3);
    let (a, b, c) = (poly(&mut r, &al, 3, 3), poly(&mut r, &al, 3, 3), poly(&mut r, &al, 3, 3));
    eq("commutator Leibniz", &comm(&a, &(&b * &c)), &(&(&comm(&a, &b) * &c) + &(&b * &comm(&a, &c))))?;
    let jac = &(&comm(&a, &comm(&b, &c)) + &comm(&b, &comm(&c, &a))) + &comm(&c, &comm(&a, &b));
    eq("Jacobi", &jac, &FreePoly::zero(&al))?;
    eq("antisymmetry", &comm(&a, &b), &(-&comm(&b, &a)))
}

pub fn derivation_leibniz(seed: u64) -> Check {
    let mut r = rng(seed);
    let al = Alphabet::u(3);
    let mut d = Derivation::new(&al);
    for i in 1..=3 {
        d = d.with_image(GeneratorId::u(i), poly(&mut r, &al, 3, 2)).map_err(|e| e.to_string())?;
    }
    let (p, q) = (poly(&mut r, &al, 4, 3), poly(&mut r, &al, 4, 3));
    let dd = |x: &FreePoly| d.derive(x).expect("derive");
    eq("derivation Leibniz", &dd(&(&p * &q)), &(&(&dd(&p) * &q) + &(&p * &dd(&q))))?;
    let s = scalar(&mut r);
    eq("derivation linear", &dd(&(&p.scale(&s) + &q)), &(&dd(&p).scale(&s) + &dd(&q)))
}

pub fn inner_derivation(seed: u64) -> Check {
    let mut r = rng(seed);
    let al = Alphabet::u(3);
    let (a, p) = (poly(&mut r, &al, 3, 3), poly(&mut r, &al, 4, 3));
    let d = make_inner_derivation(&a, &al).map_err(|e| e.to_string())?;
    eq("inner derivation", &d.derive(&p).map_err(|e| e.to_string())?, &comm(&a, &p))
}

fn inverse_alphabet() -> Arc<Alphabet> {
    let g = [GeneratorId::u(1), GeneratorId::u(2)];
    Alphabet::new(g.iter().copied().chain(g.iter().map(|&x| GeneratorId::inverse_of(x)))).expect("alphabet")
}

/// Cancels adjacent inverse pairs at random positions until none is left.
fn cancel_randomly(r: &mut impl Rng, a: &Alphabet, w: Word) -> Word {
    let mut v = w.to_vec();
    let inv = |x: u8, y: u8| {
        let (gx, gy) = (a.generator(x), a.generator(y));
        gx.base() == gy.base() && gx != gy
    };
    loop {
        let spots: Vec<usize> = (0..v.len().saturating_sub(1)).filter(|&i| inv(v[i], v[i + 1])).collect();
        if spots.is_empty() {
            return Word::from_letters(&v).expect("short");
        }
        let i = spots[r.gen_range(0..spots.len())];
        v.drain(i..i + 2);
    }
}

pub fn inverse_confluence(seed: u64) -> Check {
    let mut r = rng(seed);
    let al = inverse_alphabet();
    if !cancellation_is_confluent(&al) {
        return Err("critical pairs do not resolve".into());
    }
    let len = r.gen_range(0..=14);
    let w = word(&mut r, al.len() as u8, len);
    let one = FreePoly::monomial(&al, w, Scalar::one());
    let nf = inverse_normal_form(&one);
    let other = FreePoly::monomial(&al, cancel_randomly(&mut r, &al, w), Scalar::one());
    eq("normal form vs random cancellation order", &nf, &other)?;
    let (p, q) = (poly(&mut r, &al, 3, 6), poly(&mut r, &al, 3, 6));
    let n = inverse_normal_form;
    eq("normal form idempotent", &n(&n(&p)), &n(&p))?;
    eq("normal form multiplicative", &n(&(&p * &q)), &n(&(&n(&p) * &n(&q))))
}

pub fn algebra_suite(trials: u64, seed: u64) -> Check {
    let props: [Property; 5] = [
        ("ring axioms", ring_axioms),
        ("Leibniz/Jacobi", leibniz_jacobi),
        ("derivation Leibniz", derivation_leibniz),
        ("inner derivation", inner_derivation),
        ("inverse confluence", inverse_confluence),
    ];
    for (name, f) in props {
        for t in 0..trials {
            f(seed.wrapping_add(t)).map_err(|e| format!("{name}, seed {}: {e}", seed.wrapping_add(t)))?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Generating functions

/// Sum of `family_{i1}⋯family_{ik}` over index sequences `i1 ≥ … ≥ ik` from
/// `s`, strict except at barred indices, by direct enumeration.
pub fn enumerate_elem(k: usize, s: &IndexSubset, bars: &BarPattern, family: Kind, a: &Arc<Alphabet>) -> FreePoly {
    fn go(k: usize, top: Option<u32>, s: &[u32], bars: &BarPattern, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            out.push(prefix.clone());
            return;
        }
        for &i in s.iter().rev() {
            let ok = match top {
                None => true,
                Some(t) => i < t || (i == t && bars.is_barred(i)),
            };
            if ok {
                prefix.push(i);
                go(k - 1, Some(i), s, bars, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut seqs = Vec::new();
    go(k, None, s.members(), bars, &mut Vec::new(), &mut seqs);
    seqs.iter().fold(FreePoly::zero(a), |acc, seq| {
        let gens: Vec<GeneratorId> = seq.iter().map(|&i| GeneratorId::new(family, i)).collect();
        &acc + &FreePoly::word_of(a, &gens).expect("word")
    })
}

fn genfun_case(n: u32, bars: &BarPattern, bound: u32, s: &IndexSubset, a: &Arc<Alphabet>) -> Check {
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
        g.push(series_from_spec(&spec(Var::X, GeneratorId::u(i), i), a, bound).map_err(|e| e.to_string())?);
        h.push(series_from_spec(&spec(Var::Y, GeneratorId::v(i), i), a, bound).map_err(|e| e.to_string())?);
    }
    let gs = product_over_subset(&g, s, a, bound).map_err(|e| e.to_string())?;
    let hs = product_over_subset(&h, s, a, bound).map_err(|e| e.to_string())?;
    for k in 0..=bound {
        let want = enumerate_elem(k as usize, s, bars, Kind::U, a);
        let got = gs.coeff(BiDegree::new(k, 0)).map_err(|e| e.to_string())?;
        let direct = super_elem(k as i64, s, bars, Kind::U, a).map_err(|e| e.to_string())?;
        let tag = format!("S={s} bars={bars} k={k}");
        eq(&format!("{tag}: coefficient vs enumeration"), &got, &want)?;
        eq(&format!("{tag}: super_elem vs enumeration"), &direct, &want)?;
        if bars.barred().next().is_none() {
            eq(&format!("{tag}: elem"), &elem(k as i64, s, Kind::U, a).map_err(|e| e.to_string())?, &want)?;
        }
        let hv = hs.coeff(BiDegree::new(0, k)).map_err(|e| e.to_string())?;
        eq(&format!("{tag}: h side"), &hv, &enumerate_elem(k as usize, s, bars, Kind::V, a))?;
        for j in 1..=bound - k {
            if k > 0 && !gs.coeff(BiDegree::new(k, j)).map_err(|e| e.to_string())?.is_zero() {
                return Err(format!("{tag}: g_S has a y component"));
            }
        }
    }
    Ok(())
}

/// Plain generating function over `S ⊆ {1..5}`, then every barring of
/// `S ⊆ {1..4}`, both at bound 6.
pub fn genfun_suite() -> Check {
    let a5 = Alphabet::uv(5);
    for s in IndexSubset::all_subsets(5) {
        genfun_case(5, &BarPattern::none(), 6, &s, &a5)?;
    }
    let a4 = Alphabet::uv(4);
    for mask in 0..16 {
        let bars = BarPattern::from_mask(4, mask);
        for s in IndexSubset::all_subsets(4) {
            genfun_case(4, &bars, 6, &s, &a4)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Groebner engine

#[derive(Debug, Default, Clone, Copy)]
pub struct EngineTally {
    pub systems: usize,
    pub queries: usize,
    pub members: usize,
    pub certificates: usize,
}

/// A random homogeneous system over two or three letters with degree-2 and
/// degree-3 generators, queried at bound 4 against the linear-algebra
/// oracle. Half of the queries are built inside the ideal.
pub fn random_system_vs_oracle(seed: u64, tally: &mut EngineTally) -> Check {
    let mut r = rng(seed);
    let al = Alphabet::u(r.gen_range(2..=3));
    let bound = 4;
    let ngens = r.gen_range(1..=3);
    let gens: Vec<FreePoly> = (0..ngens)
        .map(|_| {
            let d = r.gen_range(2..=3);
            homogeneous(&mut r, &al, 3, d)
        })
        .filter(|g| !g.is_zero())
        .collect();
    if gens.is_empty() {
        return Ok(());
    }
    let order = if r.gen_bool(0.5) { MonomialOrder::deglex(&al) } else { MonomialOrder::reversed(&al) };
    let gb = complete(&gens, &order, bound, &CompletionOptions::new()).map_err(|e| e.to_string())?;
    tally.systems += 1;
    let mut queries = Vec::new();
    for _ in 0..3 {
        let d = r.gen_range(2..=4);
        queries.push(homogeneous(&mut r, &al, 4, d));
    }
    for _ in 0..3 {
        let g = &gens[r.gen_range(0..gens.len())];
        let room = bound as usize - g.degree().unwrap_or(0);
        let mut q = FreePoly::zero(&al);
        for _ in 0..r.gen_range(1..=3) {
            let l = r.gen_range(0..=room);
            let (u, v) = (word(&mut r, al.len() as u8, l), word(&mut r, al.len() as u8, room - l));
            q = &q + &g.sandwich(u, v).map_err(|e| e.to_string())?.scale(&scalar(&mut r));
        }
        queries.push(q);
    }
    for q in &queries {
        let oracle = oracle_membership(&gens, q, bound).map_err(|e| e.to_string())?;
        let v = gb.membership(q).map_err(|e| e.to_string())?;
        tally.queries += 1;
        match (&v, oracle) {
            (Verdict::Member(c), true) => {
                tally.members += 1;
                if c.is_available() {
                    if !c.verify().map_err(|e| e.to_string())? {
                        return Err(format!("seed {seed}: certificate for {q} does not verify"));
                    }
                    tally.certificates += 1;
                } else if !q.is_zero() {
                    return Err(format!("seed {seed}: no certificate for {q}"));
                }
            }
            (Verdict::NotMemberUpToBound(_), false) => {}
            (v, o) => return Err(format!("seed {seed}: {q} in <{gens:?}>: engine {}, oracle {o}", v.label())),
        }
    }
    Ok(())
}

pub fn random_systems_suite(count: u64, seed: u64) -> Result<EngineTally, String> {
    let mut t = EngineTally::default();
    let mut s = seed;
    while t.systems < count as usize {
        random_system_vs_oracle(s, &mut t)?;
        s += 1;
    }
    Ok(t)
}

fn verdicts(sys: &RelationSystem, order: OrderChoice) -> Result<Vec<(String, GoalVerdict)>, String> {
    let opts = RunOptions { order, certificates: true, verify_certificates: true, ..Default::default() };
    let run = run_system(sys, &opts).map_err(|e| e.to_string())?;
    if run.limit_hit {
        return Err(format!("{}: limit hit", sys.name));
    }
    for g in &run.goals {
        if g.certificate_verified == Some(false) {
            return Err(format!("{} {}: certificate failed", sys.name, g.label));
        }
    }
    Ok(run.goals.iter().map(|g| (g.label.clone(), g.verdict)).collect())
}

pub fn order_systems() -> Vec<RelationSystem> {
    vec![
        build(Tag::ElemRot, &BuildParams::n(3)).expect("elem_rot"),
        build(Tag::SuperRot, &BuildParams { n: Some(3), bars: Some(BarPattern::new([1, 3])), ..Default::default() })
            .expect("super_rot"),
        build(Tag::PairedFactors, &BuildParams::default().with_bound(5)).expect("paired_factors"),
    ]
}

/// Deglex with `u1` largest versus the reversed precedence.
pub fn order_independence() -> Check {
    for sys in order_systems() {
        let a = verdicts(&sys, OrderChoice::Deglex)?;
        let b = verdicts(&sys, OrderChoice::Reversed)?;
        if a != b {
            return Err(format!("{}: verdicts differ between orders: {a:?} vs {b:?}", sys.name));
        }
    }
    Ok(())
}

/// Verdicts for goals of degree at most `lo` agree between bounds `lo` and
/// `hi` on homogeneous systems.
pub fn bound_stability() -> Check {
    let cases = [
        (Tag::ElemRot, BuildParams::n(3), 6, 7),
        (Tag::PairedFactors, BuildParams::default(), 5, 6),
        (Tag::SuperRot, BuildParams { n: Some(3), bars: Some(BarPattern::new([2])), ..Default::default() }, 5, 6),
    ];
    for (tag, p, lo, hi) in cases {
        let s_lo = build(tag, &p.clone().with_bound(lo)).map_err(|e| e.to_string())?;
        let s_hi = build(tag, &p.clone().with_bound(hi)).map_err(|e| e.to_string())?;
        if !s_lo.homogeneous || !s_hi.homogeneous {
            return Err(format!("{}: expected a homogeneous system", s_lo.name));
        }
        let v_lo = verdicts(&s_lo, OrderChoice::Deglex)?;
        let v_hi = verdicts(&s_hi, OrderChoice::Deglex)?;
        let mut compared = 0;
        for (goal, (label, v)) in s_lo.goals.iter().zip(&v_lo) {
            if goal.poly.degree().unwrap_or(0) as u32 > lo {
                continue;
            }
            let Some(g_hi) = s_hi.goal_by_label(label) else { continue };
            if g_hi.poly != goal.poly {
                continue;
            }
            let w = v_hi.iter().find(|(l, _)| l == label).map(|(_, v)| *v);
            let same = matches!(
                (v, w),
                (GoalVerdict::Member, Some(GoalVerdict::Member))
                    | (GoalVerdict::NotMemberUpToBound(_), Some(GoalVerdict::NotMemberUpToBound(_)))
            );
            if !same {
                return Err(format!("{} {label}: {v:?} at bound {lo}, {w:?} at bound {hi}", s_lo.name));
            }
            compared += 1;
        }
        if compared == 0 {
            return Err(format!("{}: no goals compared", s_lo.name));
        }
    }
    Ok(())
}
