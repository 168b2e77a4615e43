use serde::Deserialize;
use serde_json::{json, Value};

use radixtile::intersect::{
    self, arbitrate, box_count_estimate, box_dimension_ep, build_ifs, check_ssc, hausdorff_dimension_sep,
    intersection_sequence, level_set_near, level_set_translate, multi_intersection_sequence, union_components,
    witness_similarity_dimension, TranslateSpec,
};
use radixtile::linalg::{is_complete_residue_system, reduced_residue_system, residue_system};
use radixtile::multinv::{self, check_invariance, convergence_report, torus_invariance_check, xk_cloud, DigitAutomaton, NumberSystem};
use radixtile::neighbours::{neighbour_graph, system_neighbours, triple_state_graph};
use radixtile::numsys::{discrete_expansion, is_number_system};
use radixtile::radix::{self, enumerate_equivalents, EquivClass};
use radixtile::render::{ktile_points, rasterize, render_overlap, SampleOptions, DEFAULT_POINT_CAP};
use radixtile::sep::{is_sep_int, is_sep_sets_translated, DigitSet};
use radixtile::{EpSeq, Error, IntVec, LogRatio, RadixSystem};

use crate::wire::{self, dim_json, digits_json, int_witness_json, ratvec_json, set_witness_json, sets_json, vec_json, vecs_json, EpWire, Vector};
use crate::{Cli, CliError, Command, DimsKind, Format, MultinvAction, Output};

type Res<T> = Result<T, CliError>;

fn system(cli: &Cli) -> Res<RadixSystem> {
    let path = cli.system.as_ref().ok_or_else(|| CliError::Input("--system is required".into()))?;
    wire::read_json::<wire::SystemDescriptor>(path)?.system()
}

fn payload<T: for<'de> Deserialize<'de>>(cli: &Cli) -> Res<T> {
    match &cli.payload {
        Some(p) => wire::read_json(p),
        None => serde_json::from_value(json!({})).map_err(|e| CliError::Input(format!("payload required: {e}"))),
    }
}

fn format(cli: &Cli, allowed: &[Format], default: Format) -> Res<Format> {
    let f = cli.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Input(format!("format {f:?} is not available here; use one of {allowed:?}")))
    }
}

pub fn run(cli: &Cli) -> Res<Output> {
    match &cli.command {
        Command::Residues => residues(cli),
        Command::NumsysCheck => numsys_check(cli),
        Command::Expand => expand(cli),
        Command::Eval => eval(cli),
        Command::Equiv => equiv(cli),
        Command::EnumerateEquiv => enumerate(cli),
        Command::Unique => unique(cli),
        Command::Neighbours { dot } => neighbours(cli, *dot),
        Command::TripleGraph { dot } => triple_graph(cli, *dot),
        Command::Sep => sep(cli),
        Command::Intersect { multi } => intersect(cli, *multi),
        Command::Dims { kind } => dims(cli, *kind),
        Command::Levelset { lambda } => levelset(cli, lambda),
        Command::UnionComponents => union(cli),
        Command::Multinv { action } => multinv(cli, *action),
        Command::Render { overlap } => render(cli, overlap.as_deref()),
    }
}

fn residues(cli: &Cli) -> Res<Output> {
    format(cli, &[Format::Json], Format::Json)?;
    let path = cli.system.as_ref().ok_or_else(|| CliError::Input("--system is required".into()))?;
    let desc: wire::SystemDescriptor = wire::read_json(path)?;
    let a = desc.matrix()?;
    let mut out = json!({
        "det": a.det()?,
        "residues": vecs_json(&residue_system(&a)?),
        "reduced": vecs_json(&reduced_residue_system(&a)?),
    });
    if let Some(d) = &desc.digits {
        out["digits_form_crs"] = json!(is_complete_residue_system(&a, &wire::resolve_all(d, a.dim())?)?);
    }
    Ok(Output::Json(out))
}

fn numsys_check(cli: &Cli) -> Res<Output> {
    format(cli, &[Format::Json], Format::Json)?;
    let (ok, cycles) = is_number_system(&system(cli)?)?;
    let cycles: Vec<Value> = cycles.iter().map(|c| Value::Array(c.iter().map(|v| json!(v)).collect())).collect();
    Ok(Output::Json(json!({ "number_system": ok, "witness_cycles": cycles })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpandPayload {
    vector: Vector,
}

fn expand(cli: &Cli) -> Res<Output> {
    format(cli, &[Format::Json], Format::Json)?;
    let sys = system(cli)?;
    let p: ExpandPayload = payload(cli)?;
    let v = p.vector.resolve(sys.dim())?;
    let digits = discrete_expansion(&sys, &v)?;
    Ok(Output::Json(json!({ "vector": vec_json(&v), "digits": vecs_json(&digits), "order": "least-significant-first" })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EvalPayload {
    x: EpWire<Vector>,
}

fn eval(cli: &Cli) -> Res<Output> {
    format(cli, &[Format::Json], Format::Json)?;
    let sys = system(cli)?;
    let p: EvalPayload = payload(cli)?;
    let x = p.x.digits(sys.dim())?;
    Ok(Output::Json(json!({ "x": digits_json(&x), "value": ratvec_json(&radix::eval_exact(&sys, &x)?) })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EquivPayload {
    x: EpWire<Vector>,
    y: EpWire<Vector>,
}

fn equiv(cli: &Cli) -> Res<Output> {
    format(cli, &[Format::Json], Format::Json)?;
    let sys = system(cli)?;
    let p: EquivPayload = payload(cli)?;
    let (x, y) = (p.x.digits(sys.dim())?, p.y.digits(sys.dim())?);
    let exact = radix::equivalent(&sys, &x, &y)?;
    let graph = radix::is_neighbour_sequence(&sys, &x, &y)?;
    Ok(Output::Json(json!({
        "equivalent": exact,
        "neighbour_sequence": graph,
        "agree": exact == graph,
        "integer_sequence": vecs_json(&radix::integer_sequence(&sys, &x, &y, x.stored_len().max(y.stored_len()) + 1)?),
    })))
}

fn class_json(c: &EquivClass) -> Value {
    let count = match c {
        EquivClass::Unique => json!(1),
        EquivClass::FinitelyMany(k) => json!(k),
        _ => Value::Null,
    };
    json!({ "class": c.name(), "count": count })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnumeratePayload {
    x: EpWire<Vector>,
    #[serde(default = "default_limit")]
    limit: usize,
}

fn default_limit() -> usize {
    16
}

fn enumerate(cli: &Cli) -> Res<Output> {
    format(cli, &[Format::Json], Format::Json)?;
    let sys = system(cli)?;
    let p: EnumeratePayload = payload(cli)?;
    let (class, reps) = enumerate_equivalents(&sys, &p.x.digits(sys.dim())?, p.limit)?;
    let mut out = class_json(&class);
    out["representations"] = Value::Array(reps.iter().map(digits_json).collect());
    Ok(Output::Json(out))
}

fn unique(cli: &Cli) -> Res<Output> {
    format(cli, &[Format::Json], Format::Json)?;
    Ok(Output::Json(json!({ "unique": radix::representations_unique(&system(cli)?)? })))
}

fn neighbours(cli: &Cli, dot: bool) -> Res<Output> {
    let f = format(cli, &[Format::Json, Format::Dot], if dot { Format::Dot } else { Format::Json })?;
    let sys = system(cli)?;
    if f == Format::Dot {
        return Ok(Output::Text(neighbour_graph(&sys)?.to_dot()));
    }
    Ok(Output::Json(vecs_json(&system_neighbours(&sys)?.vectors)))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct TriplePayload {
    p: Option<EpWire<Vector>>,
    q: Option<EpWire<Vector>>,
    r: Option<EpWire<Vector>>,
    #[serde(default)]
    steps: usize,
}

fn triple_graph(cli: &Cli, dot: bool) -> Res<Output> {
    let f = format(cli, &[Format::Json, Format::Dot], if dot { Format::Dot } else { Format::Json })?;
    let sys = system(cli)?;
    let g = triple_state_graph(&sys)?;
    if f == Format::Dot {
        return Ok(Output::Text(g.to_dot()));
    }
    let states: Vec<Value> = g.states.iter().map(|(z, x)| json!([vec_json(z), vec_json(x)])).collect();
    let mut out = json!({ "states": states, "edges": g.edges.len(), "start": g.start });
    let p: TriplePayload = if cli.payload.is_some() { payload(cli)? } else { TriplePayload::default() };
    if let (Some(a), Some(b), Some(c)) = (&p.p, &p.q, &p.r) {
        let n = sys.dim();
        let (a, b, c) = (a.digits(n)?, b.digits(n)?, c.digits(n)?);
        let steps = if p.steps == 0 { a.stored_len().max(b.stored_len()).max(c.stored_len()) * 2 } else { p.steps };
        out["walk"] = match g.walk(&a, &b, &c, steps) {
            Some(path) => json!(path),
            None => Value::Null,
        };
    }
    Ok(Output::Json(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SepPayload {
    sequence: Option<EpWire<Vec<Vector>>>,
    integers: Option<EpWire<i64>>,
    bound: Option<usize>,
}

fn sep(cli: &Cli) -> Res<Output> {
    format(cli, &[Format::Json], Format::Json)?;
    let p: SepPayload = payload(cli)?;
    match (&p.sequence, &p.integers) {
        (None, Some(ints)) => {
            let w = is_sep_int(&ints.ints()?);
            Ok(Output::Json(json!({ "sep": w.is_some(), "witness": w.as_ref().map(int_witness_json) })))
        }
        (Some(seq), None) => {
            let sys = system(cli)?;
            let seq = seq.sets(sys.dim())?;
            let w = is_sep_sets_translated(sys.digits(), &seq, p.bound)?;
            let mut out = json!({ "sep": w.is_some(), "witness": w.as_ref().map(set_witness_json) });
            if let Some(w) = &w {
                out["direct_sums"] = json!(w.sums_are_direct()?);
            }
            Ok(Output::Json(out))
        }
        _ => Err(CliError::Input("payload needs exactly one of `sequence` and `integers`".into())),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntersectPayload {
    alpha: Option<EpWire<Vector>>,
    alphas: Option<Vec<EpWire<Vector>>>,
    /// Skip the uniqueness check on the representation of α.
    #[serde(default)]
    assume_unique: bool,
    bound: Option<usize>,
}

fn spec(sys: &RadixSystem, alpha: &EpWire<Vector>, assume_unique: bool) -> Res<TranslateSpec> {
    let a = alpha.digits(sys.dim())?;
    Ok(if assume_unique { TranslateSpec::waived(sys.clone(), a)? } else { TranslateSpec::new(sys.clone(), a)? })
}

fn intersect(cli: &Cli, multi: bool) -> Res<Output> {
    format(cli, &[Format::Json], Format::Json)?;
    let sys = system(cli)?;
    let p: IntersectPayload = payload(cli)?;
    if multi {
        let alphas = p.alphas.as_ref().ok_or_else(|| CliError::Input("--multi needs `alphas`".into()))?;
        let specs = alphas.iter().map(|a| spec(&sys, a, p.assume_unique)).collect::<Res<Vec<_>>>()?;
        let seq = multi_intersection_sequence(&sys, &specs)?;
        let w = is_sep_sets_translated(sys.digits(), &seq, p.bound)?;
        return Ok(Output::Json(json!({
            "sequence": sets_json(&seq),
            "sep": w.as_ref().map(set_witness_json),
        })));
    }
    let alpha = p.alpha.as_ref().ok_or_else(|| CliError::Input("payload needs `alpha`".into()))?;
    let t = spec(&sys, alpha, p.assume_unique)?;
    let seq = intersection_sequence(&t)?;
    let w = is_sep_sets_translated(sys.digits(), &seq, p.bound)?;
    let mut out = json!({
        "alpha_value": ratvec_json(&t.value()?),
        "uniqueness_checked": t.uniqueness_checked,
        "sequence": sets_json(&seq),
        "sep": w.as_ref().map(set_witness_json),
        "ifs": Value::Null,
        "ssc": Value::Null,
    });
    if let Some(w) = &w {
        let ifs = build_ifs(&t, w)?;
        out["ssc"] = json!(check_ssc(w)?);
        out["ifs"] = json!({
            "p": ifs.p,
            "maps": ifs.offsets.len(),
            "linear": ifs.linear.rows().iter().map(|r| ratvec_json(r)).collect::<Vec<_>>(),
            "offsets": ifs.offsets.iter().map(|o| ratvec_json(o)).collect::<Vec<_>>(),
            "beta": ratvec_json(&ifs.beta_value),
        });
    }
    Ok(Output::Json(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DimsPayload {
    alpha: Option<EpWire<Vector>>,
    sequence: Option<EpWire<Vec<Vector>>>,
    #[serde(default)]
    assume_unique: bool,
    /// A claimed exact value, e.g. "log(4)/log(21)", checked against the computation.
    claimed: Option<String>,
    /// Depth of the numerical box-count used to arbitrate a claimed value.
    #[serde(default = "default_depth")]
    depth: usize,
    #[serde(default = "default_cap")]
    cap: usize,
    bound: Option<usize>,
    /// Similarity dimension straight from counts.
    counts: Option<Vec<u64>>,
    p: Option<usize>,
    /// Carpet parameters.
    m: Option<u64>,
    n: Option<u64>,
    digits: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    formula_only: bool,
}

fn default_depth() -> usize {
    8
}

fn default_cap() -> usize {
    1 << 22
}

fn dims_sequence(sys: &RadixSystem, p: &DimsPayload) -> Res<(EpSeq<DigitSet>, Option<TranslateSpec>)> {
    match (&p.alpha, &p.sequence) {
        (Some(a), None) => {
            let t = spec(sys, a, p.assume_unique)?;
            Ok((intersection_sequence(&t)?, Some(t)))
        }
        (None, Some(s)) => Ok((s.sets(sys.dim())?, None)),
        _ => Err(CliError::Input("payload needs exactly one of `alpha` and `sequence`".into())),
    }
}

fn dims(cli: &Cli, kind: DimsKind) -> Res<Output> {
    format(cli, &[Format::Json], Format::Json)?;
    let p: DimsPayload = payload(cli)?;
    if kind == DimsKind::Bm {
        let (m, n, d) = match (p.m, p.n, &p.digits) {
            (Some(m), Some(n), Some(d)) => (m, n, d),
            _ => return Err(CliError::Input("bm needs `m`, `n` and `digits`".into())),
        };
        let r = if p.formula_only { intersect::bm_formula(m, n, d)? } else { intersect::bm_dimensions(m, n, d)? };
        return Ok(Output::Json(json!({ "hausdorff": r.hausdorff, "box": r.box_dim, "column_counts": r.column_counts })));
    }
    let sys = system(cli)?;
    if kind == DimsKind::Similarity {
        if let (Some(counts), Some(period)) = (&p.counts, p.p) {
            let r = intersect::similarity_dimension(counts, period, sys.abs_det(), sys.dim())?;
            return Ok(Output::Json(dim_json(&r)));
        }
    }
    let (seq, t) = dims_sequence(&sys, &p)?;
    let mut report = match kind {
        DimsKind::Box => box_dimension_ep(&sys, &seq)?,
        _ => {
            let w = is_sep_sets_translated(sys.digits(), &seq, p.bound)?
                .ok_or_else(|| CliError::Input("sequence is not strongly eventually periodic".into()))?;
            if kind == DimsKind::Hausdorff {
                hausdorff_dimension_sep(&sys, &w)?
            } else {
                witness_similarity_dimension(&sys, &w)?
            }
        }
    };
    if let Some(t) = &t {
        report.flags.uniqueness_assumed = !t.uniqueness_checked;
    }
    let mut out = dim_json(&report);
    if let Some(c) = &p.claimed {
        let claimed = LogRatio::parse(c)?;
        let est = box_count_estimate(&sys, &seq, p.depth, p.cap)?;
        let arb = arbitrate(&claimed, &report, est.dim);
        out["flags"]["discrepancy"] = json!(!arb.agree);
        out["arbitration"] = json!({
            "claimed": arb.claimed.to_string(),
            "claimed_float": arb.claimed.to_f64(),
            "computed": arb.computed.to_string(),
            "estimate": arb.estimate,
            "estimate_points": est.points,
            "estimate_depth": p.depth,
            "agree": arb.agree,
            "estimate_favours_computed": arb.estimate_favours_computed,
        });
    }
    Ok(Output::Json(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelsetPayload {
    prefix: Option<Vec<Vector>>,
    alpha: Option<EpWire<Vector>>,
    eps: Option<f64>,
    #[serde(default = "default_prefix_cap")]
    max_prefix: usize,
}

fn default_prefix_cap() -> usize {
    200
}

fn levelset(cli: &Cli, lambda: &str) -> Res<Output> {
    format(cli, &[Format::Json], Format::Json)?;
    let (lp, lq) = wire::parse_fraction(lambda)?;
    let sys = system(cli)?;
    let p: LevelsetPayload = payload(cli)?;
    let (t, m) = match (&p.prefix, &p.alpha, p.eps) {
        (Some(pre), None, None) => (level_set_translate(&sys, &wire::resolve_all(pre, sys.dim())?, lp, lq)?, pre.len()),
        (None, Some(a), Some(eps)) => level_set_near(&sys, &a.digits(sys.dim())?, eps, lp, lq, p.max_prefix)?,
        _ => return Err(CliError::Input("payload needs `prefix`, or `alpha` with `eps`".into())),
    };
    let seq = intersection_sequence(&t)?;
    Ok(Output::Json(json!({
        "lambda": format!("{lp}/{lq}"),
        "alpha": digits_json(&t.alpha),
        "alpha_value": ratvec_json(&t.value()?),
        "prefix_length": m,
        "dimension": dim_json(&box_dimension_ep(&sys, &seq)?),
    })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UnionPayload {
    alpha: EpWire<Vector>,
    #[serde(default = "default_limit")]
    limit: usize,
}

fn union(cli: &Cli) -> Res<Output> {
    format(cli, &[Format::Json], Format::Json)?;
    let sys = system(cli)?;
    let p: UnionPayload = payload(cli)?;
    let t = TranslateSpec::waived(sys.clone(), p.alpha.digits(sys.dim())?)?;
    let r = union_components(&t, p.limit)?;
    let mut out = class_json(&r.class);
    out["components"] = Value::Array(
        r.components
            .iter()
            .map(|c| {
                json!({
                    "representation": digits_json(&c.representation),
                    "sequence": sets_json(&c.sequence),
                    "dimension": c.dim.as_ref().map(dim_json),
                })
            })
            .collect(),
    );
    Ok(Output::Json(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum AutomatonWire {
    Everything,
    ZeroOnly,
    Restriction(Vec<Vector>),
    EndingWith(Vector),
    FollowedBy([Vector; 2]),
    Table { transitions: Vec<Vec<usize>>, accepting: Vec<bool> },
}

impl AutomatonWire {
    fn build(&self, sys: &RadixSystem) -> Res<DigitAutomaton> {
        let d = sys.digits();
        let n = sys.dim();
        Ok(match self {
            AutomatonWire::Everything => DigitAutomaton::everything(d)?,
            AutomatonWire::ZeroOnly => DigitAutomaton::zero_only(d)?,
            AutomatonWire::Restriction(a) => DigitAutomaton::restriction(d, &wire::resolve_all(a, n)?)?,
            AutomatonWire::EndingWith(a) => DigitAutomaton::ending_with(d, &a.resolve(n)?)?,
            AutomatonWire::FollowedBy([v, u]) => DigitAutomaton::followed_by(d, &v.resolve(n)?, &u.resolve(n)?)?,
            AutomatonWire::Table { transitions, accepting } => DigitAutomaton::new(d.to_vec(), transitions.clone(), accepting.clone())?,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MultinvPayload {
    automaton: AutomatonWire,
    #[serde(default = "default_k")]
    k: usize,
    #[serde(default = "default_cloud_cap")]
    cap: usize,
}

fn default_k() -> usize {
    6
}

fn default_cloud_cap() -> usize {
    multinv::DEFAULT_CLOUD_CAP
}

fn multinv(cli: &Cli, action: MultinvAction) -> Res<Output> {
    let sys = system(cli)?;
    let p: MultinvPayload = payload(cli)?;
    let e = p.automaton.build(&sys)?;
    let ns = NumberSystem::new(sys)?;
    match action {
        MultinvAction::Check => {
            format(cli, &[Format::Json], Format::Json)?;
            let (phi_ok, psi_ok) = check_invariance(&e)?;
            let (torus, bad) = torus_invariance_check(&ns, &e, p.k, p.cap)?;
            Ok(Output::Json(json!({
                "phi_closed": phi_ok,
                "psi_closed": psi_ok,
                "torus_k": p.k,
                "torus_invariant": torus,
                "torus_counterexample": bad.as_ref().map(|v| ratvec_json(v)),
            })))
        }
        MultinvAction::Cloud => {
            let f = format(cli, &[Format::Json, Format::Csv], Format::Json)?;
            let pts = xk_cloud(&ns, &e, p.k, p.cap)?;
            if f == Format::Csv {
                let n = ns.system().dim();
                let mut s = (0..n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",") + "\n";
                for v in &pts {
                    s += &v.iter().map(wire::rat_str).collect::<Vec<_>>().join(",");
                    s.push('\n');
                }
                return Ok(Output::Text(s));
            }
            Ok(Output::Json(json!({ "k": p.k, "count": pts.len(), "points": pts.iter().map(|v| ratvec_json(v)).collect::<Vec<_>>() })))
        }
        MultinvAction::Converge => {
            let f = format(cli, &[Format::Json, Format::Csv], Format::Csv)?;
            let r = convergence_report(&ns, &e, p.k, p.cap)?;
            if f == Format::Csv {
                return Ok(Output::Text(r.to_csv()));
            }
            Ok(Output::Json(json!({
                "rho": r.rho,
                "constant": r.constant,
                "warning": r.warning,
                "within_bounds": r.within_bounds(),
                "rows": r.rows.iter().map(|row| json!({ "k": row.k, "distance": row.distance, "bound": row.bound })).collect::<Vec<_>>(),
            })))
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RenderPayload {
    #[serde(default = "default_k")]
    k: usize,
    #[serde(default = "default_size")]
    width: usize,
    #[serde(default = "default_size")]
    height: usize,
    /// Restrict digits to the intersection sequence of this translation.
    alpha: Option<EpWire<Vector>>,
    #[serde(default)]
    assume_unique: bool,
    #[serde(default)]
    seed: u64,
    cap: Option<usize>,
}

fn default_size() -> usize {
    256
}

fn render(cli: &Cli, overlap: Option<&str>) -> Res<Output> {
    let sys = system(cli)?;
    if sys.dim() != 2 {
        return Err(Error::DimensionMismatch("rendering needs a planar system".into()).into());
    }
    let p: RenderPayload = payload(cli)?;
    let opts = SampleOptions { cap: p.cap.unwrap_or(DEFAULT_POINT_CAP), sampling: true, seed: p.seed };
    let (img, shared, points, sampled) = match overlap {
        Some(v) => {
            let shift: IntVec = wire::parse_vector(v)?;
            let (img, shared) = render_overlap(&sys, &shift, p.k, p.width, p.height, &opts)?;
            (img, Some(shared), None, None)
        }
        None => {
            let filter = match &p.alpha {
                Some(a) => Some(intersection_sequence(&spec(&sys, a, p.assume_unique)?)?),
                None => None,
            };
            let cloud = ktile_points(&sys, p.k, filter.as_ref(), &opts)?;
            (rasterize(&[&cloud], p.width, p.height, None)?, None, Some(cloud.len()), Some(cloud.sampled))
        }
    };
    let default = if img.channels == 1 { Format::Pgm } else { Format::Ppm };
    let f = format(cli, &[Format::Json, default], default)?;
    if f != Format::Json {
        return Ok(Output::Bytes(img.to_pnm()));
    }
    Ok(Output::Json(json!({
        "width": img.width,
        "height": img.height,
        "channels": img.channels,
        "lit_pixels": img.lit_pixels(),
        "shared_pixels": shared,
        "points": points,
        "sampled": sampled,
        "bbox": [img.bbox.x0, img.bbox.x1, img.bbox.y0, img.bbox.y1],
    })))
}
