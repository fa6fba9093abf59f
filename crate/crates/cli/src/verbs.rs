//! Per-verb input schemas, dispatch, and verification blocks.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use padic_tiles::qp::{
    constancy_parameter, convolve_window, density, is_function_tiling, measure_ball_counts, measure_zero_scan,
    spectrum_for_homogeneous, uniform_partition_check, uniform_partition_construct, lambda_case_iii, CompactOpenSet,
    DiscreteMeasure, TestFunction, UniformPartition,
};
use padic_tiles::{
    admissible_orders, ball_character_integral, branching_profile, build_tree, classify_qp_z2, classify_tile_pp,
    classify_tile_pq, dft_zero_set, find_spectra_with_budget, find_tiling_complements_with_budget, homogeneity_from_zeros,
    is_p_homogeneous, is_spectral_pair, is_spectral_set, is_tile, is_tiling_pair, tree_to_dot, weighted_phases_vanish,
    zero_exponents, Ball, BallIntegral, BranchLevelSet, Error, GroupSubset, PAdicScalar, ProductGroup, QpZ2Case,
    ResidueMultiset, ResidueSet, TileClassification, UnitPhase,
};

use crate::census::census;
use crate::report::{Check, Status};
use crate::Verb;

pub(crate) struct Ctx {
    pub truncation: Option<i64>,
    pub budget: Option<u64>,
}

pub(crate) struct Outcome {
    pub status: Status,
    pub result: Value,
    pub checks: Vec<Check>,
    pub dot: Option<String>,
}

impl Outcome {
    fn new(status: Status, result: Value, checks: Vec<Check>) -> Self {
        Outcome { status, result, checks, dot: None }
    }
}

#[derive(Debug)]
pub(crate) struct Fail {
    pub status: Status,
    pub message: String,
}

impl Fail {
    fn input(message: impl Into<String>) -> Self {
        Fail { status: Status::InputError, message: message.into() }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::NotATile(_) | Error::NonUniform(_) => Status::Negative,
            Error::WindowInsufficient(_)
            | Error::TooLarge(_)
            | Error::DensityNotCertified
            | Error::NotDecomposable(_)
            | Error::TheoremViolation(_) => Status::Unverified,
            _ => Status::InputError,
        };
        Fail { status, message: e.to_string() }
    }
}

type Res<T> = std::result::Result<T, Fail>;

/// Parses with the JSON path of the offending value in the message.
fn parse<T: DeserializeOwned>(text: &str) -> Res<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Fail::input(format!("schema error at `{}`: {}", e.path(), e.inner())))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn rational_text(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn dispatch(verb: Verb, text: &str, ctx: &Ctx) -> Res<Outcome> {
    match verb {
        Verb::AnalyzeTree => analyze_tree(parse(text)?),
        Verb::CheckTile => check_tile(parse(text)?),
        Verb::FindComplements => find(parse(text)?, ctx, false),
        Verb::FindSpectra => find(parse(text)?, ctx, true),
        Verb::ClassifyFinite => classify_finite(parse(text)?),
        Verb::ClassifyQpz2 => classify_qpz2(parse(text)?),
        Verb::FugledeCensus => fuglede_census(parse(text)?, ctx),
        Verb::UniformPartition => uniform_partition(parse(text)?),
        Verb::Density => density_verb(parse(text)?),
        Verb::ZeroScan => zero_scan(parse(text)?, ctx),
        Verb::Spectrum => spectrum(parse(text)?, ctx),
        Verb::LambdaIii => lambda_iii(parse(text)?, ctx),
    }
}

// ---- finite groups ----

fn one_u32() -> u32 {
    1
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Elem {
    Bare(u64),
    Pair((u64, u64)),
}

fn subset(g: ProductGroup, elems: &[Elem], name: &str) -> Res<GroupSubset> {
    let mut out = Vec::with_capacity(elems.len());
    for e in elems {
        match *e {
            Elem::Pair(x) => out.push(x),
            Elem::Bare(a) if g.q() == 1 => out.push((a, 0)),
            Elem::Bare(a) => return Err(Fail::input(format!("`{name}`: element {a} needs a pair when q = {}", g.q()))),
        }
    }
    GroupSubset::new(g, out).map_err(|e| Fail::input(format!("`{name}`: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SetInput {
    p: u32,
    n: u32,
    #[serde(default = "one_u32")]
    q: u32,
    a: Vec<Elem>,
}

impl SetInput {
    fn build(&self) -> Res<GroupSubset> {
        subset(ProductGroup::new(self.p, self.n, self.q)?, &self.a, "a")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairInput {
    p: u32,
    n: u32,
    #[serde(default = "one_u32")]
    q: u32,
    a: Vec<Elem>,
    t: Vec<Elem>,
}

/// `A ⊕ T = G` iff `#A·#T = #G` and every nonzero character vanishes on `A` or on `T`.
fn fourier_tiling(a: &GroupSubset, t: &GroupSubset) -> Res<(bool, bool)> {
    let g = a.group();
    let sizes = (a.len() as u64) * (t.len() as u64) == g.order();
    let (za, zt) = (dft_zero_set(a)?, dft_zero_set(t)?);
    let covered = (1..g.order() as usize).map(|i| g.element(i)).all(|x| za.contains(x) || zt.contains(x));
    Ok((sizes, covered))
}

fn check_tile(input: PairInput) -> Res<Outcome> {
    let g = ProductGroup::new(input.p, input.n, input.q)?;
    let a = subset(g, &input.a, "a")?;
    let t = subset(g, &input.t, "t")?;
    let tiles = is_tiling_pair(&a, &t)?;
    let (sizes, covered) = fourier_tiling(&a, &t)?;
    let checks = vec![Check::new(
        "fourier_criterion",
        (sizes && covered) == tiles,
        json!({ "sizes_match": sizes, "zero_sets_cover": covered }),
    )];
    let result = json!({ "group": g.to_string(), "a": a, "t": t, "tiles": tiles });
    Ok(Outcome::new(if tiles { Status::Pass } else { Status::Negative }, result, checks))
}

fn find(input: SetInput, ctx: &Ctx, spectra: bool) -> Res<Outcome> {
    let a = input.build()?;
    let out = if spectra {
        find_spectra_with_budget(&a, ctx.budget)?
    } else {
        find_tiling_complements_with_budget(&a, ctx.budget)?
    };
    let mut bad = Vec::new();
    for s in &out.sets {
        let ok = if spectra { is_spectral_pair(&a, s)? } else { is_tiling_pair(&a, s)? };
        if !ok {
            bad.push(s.clone());
        }
    }
    let name = if spectra { "spectra_orthogonal" } else { "complements_tile" };
    let checks = vec![Check::new(name, bad.is_empty(), json!({ "checked": out.sets.len(), "failed": bad }))];
    let status = if !out.exhaustive {
        Status::Unverified
    } else if out.sets.is_empty() {
        Status::Negative
    } else {
        Status::Pass
    };
    let result = json!({
        "group": a.group().to_string(),
        "a": a,
        "count": out.sets.len(),
        "sets": out.sets,
        "exhaustive": out.exhaustive,
        "reason": out.reason,
        "nodes": out.nodes,
    });
    Ok(Outcome::new(status, result, checks))
}

fn classify_finite(input: SetInput) -> Res<Outcome> {
    let a = input.build()?;
    let g = a.group();
    if g.q() == 1 {
        let c = a.residues().ok_or_else(|| Fail::input("cyclic subset expected"))?;
        let h = is_p_homogeneous(&c);
        let homogeneous = h.branch_levels().is_some();
        let tile = is_tile(&a)?;
        let spectral = is_spectral_set(&a)?;
        let checks = vec![
            Check::new("tile_iff_homogeneous", tile == homogeneous, json!({ "tile": tile, "homogeneous": homogeneous })),
            Check::new("spectral_iff_homogeneous", spectral == homogeneous, json!({ "spectral": spectral })),
        ];
        let result = json!({ "group": g.to_string(), "a": a, "homogeneity": h, "tile": tile, "spectral": spectral });
        return Ok(Outcome::new(if tile { Status::Pass } else { Status::Negative }, result, checks));
    }
    let classified = if g.q() == g.p() {
        classify_tile_pp(&a).map(|c| (to_value(&c), c.tile))
    } else {
        classify_tile_pq(&a).map(|c| (to_value(&c), c.tile))
    };
    match classified {
        Ok((value, tile)) => {
            let checks = vec![
                Check::new("witnesses_reverify", tile.reverify()?, json!({ "case": tile.case_name() })),
                Check::new("is_tile", is_tile(&a)?, Value::Null),
            ];
            let result = json!({ "group": g.to_string(), "a": a, "tile": true, "classification": value });
            Ok(Outcome::new(Status::Pass, result, checks))
        }
        Err(Error::NotATile(msg)) => {
            let search = find_tiling_complements_with_budget(&a, None)?;
            let checks = vec![Check::new(
                "no_complement",
                search.exhaustive && search.sets.is_empty(),
                json!({ "nodes": search.nodes }),
            )];
            let result = json!({ "group": g.to_string(), "a": a, "tile": false, "reason": msg });
            Ok(Outcome::new(Status::Negative, result, checks))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CensusInput {
    p: u32,
    n: u32,
}

fn fuglede_census(input: CensusInput, ctx: &Ctx) -> Res<Outcome> {
    let c = census(input.p, input.n, ctx.budget)?;
    let mut checks = vec![Check::new("no_mismatches", c.mismatches.is_empty(), json!({ "mismatches": c.mismatches.len() }))];
    if c.exhaustive {
        // Homogeneous sets built directly, level by level.
        let built = padic_tiles::enumerate_homogeneous(input.p, input.n, 1 << 20)?.len() as u64;
        let scanned = c.count(|r| r.homogeneous);
        checks.push(Check::new(
            "homogeneous_count_matches_construction",
            built == scanned,
            json!({ "constructed": built, "scanned": scanned }),
        ));
    }
    let status = if !c.exhaustive {
        Status::Unverified
    } else if c.equivalent {
        Status::Pass
    } else {
        Status::Negative
    };
    Ok(Outcome::new(status, to_value(&c), checks))
}

// ---- trees ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeInput {
    p: u32,
    n: u32,
    members: Option<Vec<u64>>,
    branch_levels: Option<Vec<u32>>,
}

fn analyze_tree(input: TreeInput) -> Res<Outcome> {
    let (p, n) = (input.p, input.n);
    let c = match (input.members, input.branch_levels) {
        (Some(m), None) => ResidueSet::new(p, n, m)?,
        (None, Some(l)) => BranchLevelSet::new(n, l)?.canonical_set(p)?,
        _ => return Err(Fail::input("give exactly one of `members` and `branch_levels`")),
    };
    if c.is_empty() {
        return Err(Error::EmptySet.into());
    }
    let tree = build_tree(&c)?;
    let h = is_p_homogeneous(&c);
    let mut result = json!({
        "set": c,
        "level_sizes": tree.level_sizes(),
        "branching": branching_profile(&tree),
        "homogeneity": h,
    });
    let mut checks = Vec::new();
    let status = match h.branch_levels() {
        Some(b) => {
            let zeros = zero_exponents(&c)?;
            let multiset = ResidueMultiset::new(p, n, c.members().iter().copied())?;
            let from_zeros = homogeneity_from_zeros(&multiset, &zeros)?;
            checks.push(Check::new("branch_levels_from_zeros", &from_zeros == b, json!(from_zeros)));
            let t = b.complement().canonical_set(p)?;
            let tiles = is_tiling_pair(&GroupSubset::from_residues(&c), &GroupSubset::from_residues(&t))?;
            checks.push(Check::new("complement_tiles", tiles, json!({ "complement": t })));
            result["zero_exponents"] = json!(zeros);
            result["complement_levels"] = json!(b.complement());
            Status::Pass
        }
        None => {
            checks.push(Check::new("not_a_tile", !is_tile(&GroupSubset::from_residues(&c))?, Value::Null));
            Status::Negative
        }
    };
    let mut out = Outcome::new(status, result, checks);
    out.dot = Some(tree_to_dot(&tree, h.branch_levels()));
    Ok(out)
}

// ---- Q_p × Z/2Z ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QpZ2Input {
    omega0: CompactOpenSet,
    omega1: CompactOpenSet,
    t0: DiscreteMeasure,
    t1: DiscreteMeasure,
}

fn one() -> BigRational {
    BigRational::one()
}

/// `Σ_j 1_{Ω_j} * μ_{T_{j+k}} = 1` on the window, `k = 0, 1`.
fn pair_tiles(omega: [&CompactOpenSet; 2], t: [&DiscreteMeasure; 2]) -> Res<bool> {
    let window = t[0].window();
    for k in 0..2 {
        let mut total: BTreeMap<Ball, BigRational> = BTreeMap::new();
        for j in 0..2 {
            for (cell, v) in convolve_window(&omega[j].indicator(), t[(j + k) % 2], window)? {
                *total.entry(cell).or_default() += v;
            }
        }
        if total.values().any(|v| *v != one()) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn classify_qpz2(input: QpZ2Input) -> Res<Outcome> {
    let (o0, o1) = (&input.omega0, &input.omega1);
    match classify_qp_z2(o0, o1, &input.t0, &input.t1) {
        Ok(c) => {
            let window = input.t0.window();
            let mut checks = vec![Check::new("finite_witnesses_reverify", c.finite.reverify()?, json!({ "case": c.finite.case_name() }))];
            match &c.case {
                QpZ2Case::UnionTile { union, complement } => {
                    checks.push(Check::new("union_is_omega0_cup_omega1", union.same_set(&o0.union(o1)?)?, Value::Null));
                    let ok = is_function_tiling(&union.indicator(), complement, &one(), window)?;
                    checks.push(Check::new("union_tiles_with_complement", ok, Value::Null));
                }
                QpZ2Case::CommonComplement { complement } => {
                    for (name, o) in [("omega0_tiles_with_complement", o0), ("omega1_tiles_with_complement", o1)] {
                        checks.push(Check::new(name, is_function_tiling(&o.indicator(), complement, &one(), window)?, Value::Null));
                    }
                }
                QpZ2Case::ShiftCase { shift, shifted, union, complement, .. } => {
                    checks.push(Check::new("shifted_is_omega1_plus_shift", shifted.same_set(&o1.translate(shift)?)?, Value::Null));
                    checks.push(Check::new("shifted_disjoint_from_omega0", o0.is_disjoint(shifted)?, Value::Null));
                    let ok = is_function_tiling(&union.indicator(), complement, &one(), window)?;
                    checks.push(Check::new("union_tiles_with_complement", ok, Value::Null));
                }
            }
            let result = json!({ "tiles": true, "case": c.case.name(), "classification": c });
            Ok(Outcome::new(Status::Pass, result, checks))
        }
        Err(Error::NotATile(msg)) => {
            let g = o0.gamma().max(o1.gamma());
            let omega = [o0.refine(g)?, o1.refine(g)?];
            let ok = pair_tiles([&omega[0], &omega[1]], [&input.t0, &input.t1])?;
            let checks = vec![Check::new("pair_fails_on_window", !ok, Value::Null)];
            Ok(Outcome::new(Status::Negative, json!({ "tiles": false, "reason": msg }), checks))
        }
        Err(e) => Err(e.into()),
    }
}

// ---- measures ----

fn uniform_partition(t: DiscreteMeasure) -> Res<Outcome> {
    match uniform_partition_check(&t)? {
        UniformPartition::Uniform { scale, count } => {
            let f = uniform_partition_construct(&t, scale)?;
            let counts = measure_ball_counts(&t, scale)?;
            let tiles = is_function_tiling(&f, &t, &one(), t.window())?;
            let checks = vec![
                Check::new("counts_constant", counts.value() == Some(count), json!({ "scale": scale, "count": count })),
                Check::new("constructed_function_tiles", tiles, json!({ "level": "1" })),
            ];
            let result = json!({ "verdict": "uniform", "scale": scale, "count": count, "function": f });
            Ok(Outcome::new(Status::Pass, result, checks))
        }
        UniformPartition::NonUniform { witnesses } => {
            let mut ok = !witnesses.is_empty();
            for w in &witnesses {
                let counts: BTreeMap<Ball, i64> = measure_ball_counts(&t, w.scale)?.counts.into_iter().collect();
                ok &= counts.get(&w.ball_a) == Some(&w.count_a)
                    && counts.get(&w.ball_b) == Some(&w.count_b)
                    && w.count_a != w.count_b;
            }
            let checks = vec![Check::new("witnesses_recount", ok, json!({ "witnesses": witnesses.len() }))];
            let result = json!({ "verdict": "non_uniform", "witnesses": witnesses });
            Ok(Outcome::new(Status::Negative, result, checks))
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalInput {
    Int(i64),
    Text(String),
}

impl RationalInput {
    fn resolve(&self) -> Res<BigRational> {
        match self {
            RationalInput::Int(k) => Ok(BigRational::from_integer(BigInt::from(*k))),
            RationalInput::Text(s) => s.trim().parse().map_err(|_| Fail::input(format!("`w`: bad rational {s:?}"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityInput {
    measure: DiscreteMeasure,
    function: Option<TestFunction>,
    w: Option<RationalInput>,
}

fn density_verb(input: DensityInput) -> Res<Outcome> {
    let nu = &input.measure;
    let d = density(nu)?;
    let at_scale = measure_ball_counts(nu, d.scale)?.value();
    let mut checks = vec![Check::new("counts_at_scale", at_scale == Some(d.count), json!({ "scale": d.scale }))];
    let mut result = json!({ "density": d });
    let Some(f) = &input.function else {
        if input.w.is_some() {
            return Err(Fail::input("`w` needs `function`"));
        }
        return Ok(Outcome::new(Status::Pass, result, checks));
    };
    let integral = f.integral();
    let w = match &input.w {
        Some(w) => w.resolve()?,
        None => &d.value * &integral,
    };
    let tiles = is_function_tiling(f, nu, &w, nu.window())?;
    result["tiles"] = json!(tiles);
    result["w"] = json!(rational_text(&w));
    if !tiles {
        return Ok(Outcome::new(Status::Negative, result, checks));
    }
    let c = constancy_parameter(f)?;
    checks.push(Check::new(
        "density_times_integral",
        &d.value * &integral == w,
        json!({ "integral": c.integral }),
    ));
    let top = nu.window().radius_exp();
    let mut bad = Vec::new();
    for n in c.n_f..=top {
        let expect = &d.value * BigRational::from_integer(BigInt::from(nu.p())).pow(n as i32);
        let got = measure_ball_counts(nu, n)?.value();
        if got.map(|k| BigRational::from_integer(BigInt::from(k))) != Some(expect) {
            bad.push(n);
        }
    }
    checks.push(Check::new("counts_from_n_f", bad.is_empty(), json!({ "scales": [c.n_f, top], "failed": bad })));
    result["constancy"] = to_value(&c);
    Ok(Outcome::new(Status::Pass, result, checks))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ZeroScanInput {
    measure: DiscreteMeasure,
    function: Option<TestFunction>,
}

/// `min_λ max_{λ' ≠ λ} v(λ - λ')`.
fn separation(points: &[PAdicScalar]) -> Option<i64> {
    let mut best: Option<i64> = None;
    for (i, x) in points.iter().enumerate() {
        let mut far = i64::MIN;
        for (j, y) in points.iter().enumerate() {
            if i != j {
                if let Some(v) = (x - y).valuation().finite() {
                    far = far.max(v);
                }
            }
        }
        if far > i64::MIN {
            best = Some(best.map_or(far, |b| b.min(far)));
        }
    }
    best
}

/// `|Σ α_x e^{2πi {ξx}}|` in floating point.
fn float_transform(nu: &DiscreteMeasure, xi: &PAdicScalar) -> f64 {
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for (x, &a) in nu.atoms() {
        let t = (xi * x).frac_part().value().to_f64().unwrap_or(0.0);
        let angle = std::f64::consts::TAU * t;
        re += a as f64 * angle.cos();
        im += a as f64 * angle.sin();
    }
    re.hypot(im)
}

fn zero_scan(input: ZeroScanInput, ctx: &Ctx) -> Res<Outcome> {
    let nu = &input.measure;
    let w = nu.window_exp_at_zero().ok_or_else(|| Fail::input("zero scans need a window centred at 0"))?;
    let r_max = ctx.truncation.unwrap_or(w + 2);
    let z = measure_zero_scan(nu, r_max)?;
    let n_nu = separation(&nu.points());
    let mut checks = vec![Check::new("separation_order", n_nu == z.n_nu, json!({ "n_nu": n_nu }))];
    let bound = n_nu.map(|n| n + 1);
    checks.push(Check::new(
        "zeros_within_bound",
        z.vanishing.iter().all(|&r| bound.is_some_and(|b| r <= b)),
        json!({ "bound": bound }),
    ));
    let mut disagree = Vec::new();
    for r in z.r_min..=z.r_max {
        let xi = PAdicScalar::prime_power(nu.p(), -r)?;
        if (float_transform(nu, &xi) < 1e-9) != z.contains(r) {
            disagree.push(r);
        }
    }
    checks.push(Check::new("float_agreement", disagree.is_empty(), json!({ "disagree": disagree })));
    let mut result = json!({ "scan": z });
    if let Some(f) = &input.function {
        let c = constancy_parameter(f)?;
        let level = &density(nu)?.value * f.integral();
        if !is_function_tiling(f, nu, &level, nu.window())? {
            return Err(Fail::input("`function` does not tile with `measure` on the window"));
        }
        // f̂·ν̂ = w·δ: off the origin, f̂ ≠ 0 forces ν̂ = 0.
        let mut unmatched = Vec::new();
        for r in (1 - w)..=-f.constancy_exp() {
            let xi = PAdicScalar::prime_power(nu.p(), -r)?;
            if !f.fourier_vanishes(&xi)? && !(r <= z.r_max && z.contains(r)) {
                unmatched.push(r);
            }
        }
        checks.push(Check::new("fourier_support_in_zero_set", unmatched.is_empty(), json!({ "unmatched": unmatched })));
        let consistent = bound.is_some_and(|b| c.constancy_exp >= -b);
        checks.push(Check::new("constancy_consistent", consistent, json!({ "constancy": c.constancy_exp })));
        result["constancy"] = to_value(&c);
    }
    Ok(Outcome::new(Status::Pass, result, checks))
}

// ---- spectra ----

/// `⟨e_λ, e_λ'⟩ = Σ_balls ±∫_B χ((λ-λ')x)` vanishes for every pair `λ ≠ λ'`.
/// Returns the first failing pair.
fn pairwise_orthogonal(points: &[(PAdicScalar, u32)], balls: &[(Ball, u32)]) -> Res<Option<(usize, usize)>> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = &points[i].0 - &points[j].0;
            let dy = (points[i].1 + points[j].1) % 2;
            let mut terms: Vec<(UnitPhase, BigRational)> = Vec::new();
            for (b, y) in balls {
                if let BallIntegral::Term { phase, magnitude } = ball_character_integral(b, &d)? {
                    let sign = if dy * y % 2 == 1 { -magnitude } else { magnitude };
                    terms.push((phase, sign));
                }
            }
            if !weighted_phases_vanish(&terms)? {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

const PAIRWISE_LIMIT: usize = 256;

fn spectrum_checks(
    s: &padic_tiles::qp::SpectrumCheck,
    balls: &[(Ball, u32)],
) -> Res<Vec<Check>> {
    let points = s.description.points()?;
    let mut checks = vec![Check::new(
        "point_count",
        points.len() == s.expected_points,
        json!({ "points": points.len(), "expected": s.expected_points }),
    )];
    if let Some(expected) = &s.expected_orders {
        let scalars: Vec<PAdicScalar> = points.iter().map(|(x, _)| x.clone()).collect();
        let orders: BTreeSet<i64> = admissible_orders(&scalars)?.orders().clone();
        checks.push(Check::new("admissible_orders", &orders == expected, json!(orders)));
    }
    if points.len() <= PAIRWISE_LIMIT {
        let bad = pairwise_orthogonal(&points, balls)?;
        let detail = bad.map(|(i, j)| json!([points[i], points[j]]));
        checks.push(Check::new("pairwise_orthogonal", bad.is_none(), json!(detail)));
    }
    Ok(checks)
}

fn spectrum(omega: CompactOpenSet, ctx: &Ctx) -> Res<Outcome> {
    let m = ctx.truncation.unwrap_or(omega.gamma() + 3);
    if omega.branch_positions()?.is_none() {
        let norm = omega.normalize()?;
        let tile = is_tile(&GroupSubset::from_residues(&norm.residues[0]))?;
        let checks = vec![Check::new("not_a_tile", !tile, Value::Null)];
        return Ok(Outcome::new(Status::Negative, json!({ "homogeneous": false }), checks));
    }
    let s = spectrum_for_homogeneous(&omega, m)?;
    let balls: Vec<(Ball, u32)> = omega.balls().into_iter().map(|b| (b, 0)).collect();
    let checks = spectrum_checks(&s, &balls)?;
    let status = if s.pass { Status::Pass } else { Status::Unverified };
    Ok(Outcome::new(status, json!({ "homogeneous": true, "spectrum": s }), checks))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LambdaInput {
    n: u32,
    c0: Vec<u64>,
    c1: Vec<u64>,
}

fn lambda_iii(input: LambdaInput, ctx: &Ctx) -> Res<Outcome> {
    let n = input.n;
    let c0 = ResidueSet::new(2, n, input.c0)?;
    let c1 = ResidueSet::new(2, n, input.c1)?;
    let m = ctx.truncation.unwrap_or(n as i64 + 3);
    let g = ProductGroup::new(2, n, 2)?;
    let a = GroupSubset::new(g, c0.members().iter().map(|&x| (x, 0)).chain(c1.members().iter().map(|&x| (x, 1))))?;
    match classify_tile_pp(&a) {
        Err(Error::NotATile(msg)) => {
            let checks = vec![Check::new("not_a_tile", !is_tile(&a)?, Value::Null)];
            return Ok(Outcome::new(Status::Negative, json!({ "tile": false, "reason": msg }), checks));
        }
        Err(e) => return Err(e.into()),
        Ok(cls) if !matches!(cls.tile, TileClassification::Shift { .. }) => {
            let checks = vec![Check::new("witnesses_reverify", cls.tile.reverify()?, Value::Null)];
            let result = json!({ "tile": true, "case": cls.tile.case_name() });
            return Ok(Outcome::new(Status::Negative, result, checks));
        }
        Ok(_) => {}
    }
    let s = lambda_case_iii(&c0, &c1, m)?;
    let ball = |x: u64| Ball::new(PAdicScalar::new(2, x, 0).expect("2 is prime"), -(n as i64));
    let balls: Vec<(Ball, u32)> =
        c0.members().iter().map(|&x| (ball(x), 0)).chain(c1.members().iter().map(|&x| (ball(x), 1))).collect();
    let checks = spectrum_checks(&s, &balls)?;
    let status = if s.pass { Status::Pass } else { Status::Unverified };
    Ok(Outcome::new(status, json!({ "tile": true, "case": "shift", "spectrum": s }), checks))
}
