use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use ecl_core::certify::{solve_in_box, verify_certificate, KhovanskiiCertificate, SolverConfig};
use ecl_core::ecl::{self, catalog_lines, catalog_systems, enumerate_systems, EclError, EclNumber, EnumBound};
use ecl_core::exp_poly::{normalize, CanonicalPoly, ExpTerm, VarLayout};
use ecl_core::interval::{Interval, IntervalBox};
use ecl_core::khovanskii::{augment_log, KhovanskiiSystem};
use ecl_core::koenig::{build_layers, diagram_schedule, parse_instance, EmbeddingLayers, Feasibility, LayeredGraph, RaySearch};
use ecl_core::syntax::{constraint_source, parse_constraint, parse_formula, parse_system, parse_term, system_source};

use crate::out::{Format, Out};
use crate::{Command, Common, Op, Status, SystemInput};

pub fn run(cmd: Command) -> Result<Status> {
    match cmd {
        Command::Parse { term, formula, constraint, system, file, format } => parse(term, formula, constraint, system, file.as_deref(), format),
        Command::Diff { term, var, format } => diff(&term, &var, format),
        Command::Jacobian { input, format } => jacobian(&read_system(&input)?, format),
        Command::Augment { input, format } => augment(&read_system(&input)?, format),
        Command::Solve { input, bx, certs, common } => solve(&read_system(&input)?, &bx, certs.as_deref(), &common),
        Command::Verify { certs, format } => verify(&certs, format),
        Command::EclOp { op, a, a_box, b, b_box, certs, common } => ecl_op(op, &a, &a_box, b.as_deref(), b_box.as_deref(), certs.as_deref(), &common),
        Command::EclEnum { max_n, max_tower, coeff_bits, monomials, bx, limit, list, common } => {
            let bound = EnumBound { max_n, max_tower, max_coeff_bits: coeff_bits, max_monomials: monomials };
            ecl_enum(bound, &bx, limit, list, &common)
        }
        Command::EmbedSearch { instance, depth, bx, diagram, common } => embed_search(&instance, depth, bx.as_deref(), diagram, &common),
        Command::ChainCheck { instance, graph, depth, bx, common } => match (instance, graph) {
            (_, Some(g)) => chain_check_graph(&g, common.format),
            (Some(i), None) => chain_check_instance(&i, depth, bx.as_deref(), &common),
            (None, None) => bail!("one of --instance or --graph is required"),
        },
    }
}

fn config(c: &Common) -> SolverConfig {
    SolverConfig::default().with_eps(c.eps).with_precision(c.precision).with_max_splits(c.max_splits).with_parallel(!c.sequential)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_system(input: &SystemInput) -> Result<KhovanskiiSystem> {
    match (&input.system, &input.file) {
        (Some(s), _) => parse_system(s).context("--system"),
        (None, Some(f)) => parse_system(&read(f)?).with_context(|| f.display().to_string()),
        (None, None) => bail!("one of --system or --file is required"),
    }
}

fn parse_box(s: &str, prec: u32) -> Result<IntervalBox> {
    IntervalBox::parse(s, prec).with_context(|| format!("--box {s:?}"))
}

fn parse(
    term: Option<String>,
    formula: Option<String>,
    constraint: Option<String>,
    system: Option<String>,
    file: Option<&Path>,
    format: Format,
) -> Result<Status> {
    let mut out = Out::new(format);
    if let Some(t) = term {
        let t = parse_term(&t)?;
        let p = normalize(&t)?;
        out.kv("term", &t);
        out.kv("canonical", &p);
        out.kv("tower-height", p.tower_height());
        out.kv("monomials", p.terms().len());
    } else if let Some(f) = formula {
        out.kv("formula", parse_formula(&f)?);
    } else if let Some(c) = constraint {
        out.kv("constraint", constraint_source(&parse_constraint(&c)?));
    } else {
        let s = read_system(&SystemInput { system, file: file.map(Path::to_path_buf) })?;
        describe_system(&mut out, &s);
    }
    out.flush();
    Ok(Status::Ok)
}

fn describe_system(out: &mut Out, s: &KhovanskiiSystem) {
    let names: Vec<String> = s.vars().iter().map(|v| v.to_string()).collect();
    out.kv("vars", names.join(" "));
    for (i, eq) in s.equations().iter().enumerate() {
        out.kv(&format!("f{}", i + 1), eq);
    }
    out.kv("tower-height", s.tower_height());
}

fn diff(term: &str, var: &str, format: Format) -> Result<Status> {
    let v = match parse_term(var)? {
        ExpTerm::Var(v) => v,
        _ => bail!("--var must be a variable such as x1 or y, got {var:?}"),
    };
    let p = normalize(&parse_term(term)?)?;
    let mut out = Out::new(format);
    out.kv("term", &p);
    out.kv(&format!("d/d{v}"), p.partial_derivative(v));
    out.flush();
    Ok(Status::Ok)
}

/// `det(S)` as `E(y) * det(rest)` when `S` has the shape produced by
/// [`augment_log`] and the identity holds structurally.
fn factored_det(s: &KhovanskiiSystem) -> Option<CanonicalPoly> {
    let layout = s.layout();
    let y = CanonicalPoly::var(ecl_core::exp_poly::Var::Y);
    if !layout.has_y() || s.equations()[0] != y.exp().sub(&CanonicalPoly::x(1)) {
        return None;
    }
    let rest = s.equations()[1..].to_vec();
    let rest = KhovanskiiSystem::new(VarLayout::plain(s.n() - 1), rest).ok()?;
    (y.exp().mul(rest.jacobian_det()) == *s.jacobian_det()).then(|| rest.jacobian_det().clone())
}

fn jacobian(s: &KhovanskiiSystem, format: Format) -> Result<Status> {
    let mut out = Out::new(format);
    for (i, row) in s.jacobian().iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            out.kv(&format!("J[{}][{}]", i + 1, j + 1), entry);
        }
    }
    out.kv("det", s.jacobian_det());
    if let Some(rest) = factored_det(s) {
        out.kv("det-factored", format!("E(y)*({rest})"));
    }
    out.flush();
    Ok(Status::Ok)
}

fn augment(s: &KhovanskiiSystem, format: Format) -> Result<Status> {
    let a = augment_log(s);
    let mut out = Out::new(format);
    describe_system(&mut out, &a);
    out.kv("det", a.jacobian_det());
    let holds = factored_det(&a).is_some();
    out.kv("identity", if holds { "det = E(y)*det(S) holds" } else { "FAILED" });
    out.flush();
    if holds {
        Ok(Status::Ok)
    } else {
        Ok(Status::Negative)
    }
}

fn write_certs(path: &Path, certs: &[KhovanskiiCertificate]) -> Result<()> {
    let text: String = certs.iter().map(KhovanskiiCertificate::to_record).collect();
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn solve(s: &KhovanskiiSystem, bx: &str, certs: Option<&Path>, common: &Common) -> Result<Status> {
    let cfg = config(common);
    let query = parse_box(bx, cfg.precision)?;
    let r = solve_in_box(s, &query, &cfg)?;
    let mut out = Out::new(common.format);
    out.kv("system", system_source(s));
    out.kv("certificates", r.certificates.len());
    for (i, c) in r.certificates.iter().enumerate() {
        out.interval_box(&format!("solution{}", i + 1), &c.region);
        if out.structured() {
            out.interval(&format!("solution{}-det", i + 1), &c.jacobian_det);
        }
    }
    out.kv("undecided", r.undecided.len());
    for (i, b) in r.undecided.iter().enumerate() {
        out.interval_box(&format!("undecided{}", i + 1), b);
    }
    out.kv("splits", r.splits_used);
    out.kv("pruned", r.pruned_count);
    out.kv("budget-exhausted", r.budget_exhausted);
    out.flush();
    if let Some(p) = certs {
        write_certs(p, &r.certificates)?;
    }
    Ok(if !r.is_complete() || r.budget_exhausted {
        Status::Incomplete
    } else if r.certificates.is_empty() {
        Status::Negative
    } else {
        Status::Ok
    })
}

fn verify(path: &Path, format: Format) -> Result<Status> {
    let certs = KhovanskiiCertificate::parse_records(&read(path)?).with_context(|| path.display().to_string())?;
    if certs.is_empty() {
        bail!("{}: no certificate records", path.display());
    }
    let mut out = Out::new(format);
    let mut all = true;
    for (i, c) in certs.iter().enumerate() {
        let ok = verify_certificate(c);
        all &= ok;
        out.kv(&format!("certificate{}", i + 1), if ok { "verified" } else { "FAILED" });
    }
    out.flush();
    Ok(if all { Status::Ok } else { Status::Negative })
}

fn operand(src: &str, bx: &str, cfg: &SolverConfig) -> Result<std::result::Result<EclNumber, (Status, String)>> {
    let s = parse_system(src).with_context(|| format!("operand {src:?}"))?;
    let b = parse_box(bx, cfg.precision)?;
    if b.dim() != s.n() {
        bail!("box {bx:?} has dimension {}, system has {} variables", b.dim(), s.n());
    }
    let r = solve_in_box(&s, &b, cfg)?;
    if !r.is_complete() {
        return Ok(Err((Status::Incomplete, format!("operand {src:?}: undecided boxes in {bx}"))));
    }
    match r.certificates.len() {
        0 => Ok(Err((Status::Negative, format!("operand {src:?}: no solution in {bx}")))),
        1 => Ok(Ok(EclNumber::from_certificate(r.certificates.into_iter().next().expect("one"))?)),
        k => bail!("operand {src:?}: {k} solutions in {bx}; the box must isolate one"),
    }
}

fn ecl_op(op: Op, a: &str, a_box: &str, b: Option<&str>, b_box: Option<&str>, certs: Option<&Path>, common: &Common) -> Result<Status> {
    let cfg = config(common);
    let binary = matches!(op, Op::Add | Op::Mul);
    if binary != b.is_some() {
        bail!("--b is {} for this operation", if binary { "required" } else { "not allowed" });
    }
    if b.is_some() != b_box.is_some() {
        bail!("--b and --b-box go together");
    }
    let x = match operand(a, a_box, &cfg)? {
        Ok(x) => x,
        Err((st, msg)) => return report(st, &msg),
    };
    let y = match b.zip(b_box) {
        Some((s, bx)) => match operand(s, bx, &cfg)? {
            Ok(y) => Some(y),
            Err((st, msg)) => return report(st, &msg),
        },
        None => None,
    };
    let result = match (op, &y) {
        (Op::Add, Some(y)) => ecl::ecl_add(&x, y, &cfg),
        (Op::Mul, Some(y)) => ecl::ecl_mul(&x, y, &cfg),
        (Op::Inv, _) => ecl::ecl_inv(&x, &cfg),
        (Op::Neg, _) => ecl::ecl_neg(&x, &cfg),
        (Op::Exp, _) => ecl::ecl_exp(&x, &cfg),
        (Op::Log, _) => ecl::ecl_log(&x, &cfg),
        _ => unreachable!("arity checked"),
    };
    let r = match result {
        Ok(r) => r,
        Err(e @ (EclError::InverseOfZero(_) | EclError::NonPositiveLog(_))) => return report(Status::Negative, &e.to_string()),
        Err(e @ EclError::CertificationFailed(_)) => return report(Status::Incomplete, &e.to_string()),
        Err(e) => return Err(anyhow!(e)),
    };
    let mut out = Out::new(common.format);
    out.interval("a", &x.enclosure);
    if let Some(y) = &y {
        out.interval("b", &y.enclosure);
    }
    out.interval("value", &r.enclosure);
    out.kv("system", system_source(r.system()));
    out.kv("verified", verify_certificate(&r.certificate));
    if out.structured() {
        out.interval_box("region", &r.certificate.region);
    }
    out.flush();
    if let Some(p) = certs {
        write_certs(p, std::slice::from_ref(&r.certificate))?;
    }
    Ok(Status::Ok)
}

fn report(st: Status, msg: &str) -> Result<Status> {
    eprintln!("{msg}");
    Ok(st)
}

fn ecl_enum(bound: EnumBound, bx: &str, limit: Option<usize>, list: bool, common: &Common) -> Result<Status> {
    let cfg = config(common);
    let b = parse_box(bx, cfg.precision)?;
    let systems = enumerate_systems(bound).take(limit.unwrap_or(usize::MAX));
    let mut out = Out::new(common.format);
    if list {
        let mut count = 0;
        for s in systems {
            count += 1;
            out.kv(&format!("s{}", count - 1), system_source(&s));
        }
        out.kv("systems", count);
        out.flush();
        return Ok(Status::Ok);
    }
    let r = catalog_systems(systems, &b, &cfg);
    out.kv("systems", r.systems_solved);
    out.kv("numbers", r.entries.len());
    for (line, e) in catalog_lines(&r).iter().zip(&r.entries) {
        out.kv("entry", line);
        for a in &e.aliases {
            out.kv("unresolved-pair", format!("{} ~ {}", e.system_source, a));
        }
    }
    for s in &r.exhausted {
        out.kv("exhausted", s);
    }
    for (s, k) in &r.undecided {
        out.kv("undecided", format!("{s} ({k} boxes)"));
    }
    out.flush();
    Ok(if r.exhausted.is_empty() && r.undecided.is_empty() { Status::Ok } else { Status::Incomplete })
}

/// Layers of the instance, with the generated schedule when `diagram` is set.
fn load_layers(path: &Path, depth: Option<usize>, bx: Option<&str>, diagram: bool, common: &Common) -> Result<(EmbeddingLayers, Vec<String>)> {
    let cfg = config(common);
    let file = parse_instance(&read(path)?, cfg.precision).with_context(|| path.display().to_string())?;
    let default = bx.map(|b| parse_box(b, cfg.precision)).transpose()?;
    let mut inst = file.into_instance(default.as_ref(), cfg)?;
    let depth = depth.unwrap_or(inst.generators.len());
    let mut schedule = Vec::new();
    if diagram {
        let all = build_layers(&inst, inst.generators.len())?;
        let values: Option<Vec<Interval>> = all.bases.iter().map(|b| b.first().cloned()).collect();
        let values = values.ok_or_else(|| anyhow!("--diagram needs a certified value for every generator"))?;
        inst.constraints = diagram_schedule(&values, inst.cfg.precision);
        schedule = inst.constraints.iter().map(constraint_source).collect();
    }
    Ok((build_layers(&inst, depth)?, schedule))
}

fn tuple(t: &[Interval], exact: bool) -> String {
    let parts: Vec<String> = t.iter().map(|x| if exact { x.to_exact() } else { x.to_decimal(17) }).collect();
    format!("({})", parts.join("; "))
}

fn embed_search(path: &Path, depth: Option<usize>, bx: Option<&str>, diagram: bool, common: &Common) -> Result<Status> {
    let (l, schedule) = load_layers(path, depth, bx, diagram, common)?;
    let mut out = Out::new(common.format);
    for (n, phi) in schedule.iter().enumerate() {
        out.kv(&format!("phi{}", n + 1), phi);
    }
    let cards: Vec<String> = l.graph.cardinalities().iter().map(|c| c.to_string()).collect();
    let bases: Vec<String> = l.bases.iter().map(|b| b.len().to_string()).collect();
    out.kv("depth", l.graph.depth());
    out.kv("base-sizes", bases.join(" "));
    out.kv("layer-sizes", cards.join(" "));
    let mut warned = false;
    for layer in &l.graph.layers {
        for w in &layer.warnings {
            warned = true;
            out.kv("warning", w);
        }
    }
    let status = match l.graph.find_ray() {
        RaySearch::Ray(r) => {
            out.kv("ray", "found");
            for (n, v) in r.iter().enumerate() {
                out.kv(&format!("v{}", n + 1), tuple(v, false));
                if out.structured() {
                    out.kv(&format!("v{}-exact", n + 1), tuple(v, true));
                }
            }
            Status::Ok
        }
        RaySearch::NoRay(n) => {
            out.kv("no-ray", n);
            match l.feasibility() {
                Feasibility::EmptyBase(k) => out.kv("reason", format!("no certified solution for c{k} in its box")),
                Feasibility::Refuted(k) => out.kv("reason", format!("every tuple of layer {k} refuted")),
                Feasibility::Layers => out.kv("reason", "no path through the layers"),
            }
            if warned {
                Status::Incomplete
            } else {
                Status::Negative
            }
        }
    };
    out.kv("chain", l.graph.check_chain());
    out.flush();
    Ok(status)
}

fn chain_check_instance(path: &Path, depth: Option<usize>, bx: Option<&str>, common: &Common) -> Result<Status> {
    let (l, _) = load_layers(path, depth, bx, false, common)?;
    chain_report(&l.graph, common.format)
}

fn chain_report<T: ecl_core::koenig::Payload>(g: &LayeredGraph<T>, format: Format) -> Result<Status> {
    let ok = g.check_chain();
    let mut out = Out::new(format);
    let cards: Vec<String> = g.cardinalities().iter().map(|c| c.to_string()).collect();
    out.kv("layer-sizes", cards.join(" "));
    out.kv("chain", ok);
    out.flush();
    Ok(if ok { Status::Ok } else { Status::Negative })
}

/// One layer per non-empty line, tuples like `(0,1)`; a line `.` is an empty
/// layer.
fn parse_graph(text: &str) -> Result<Vec<Vec<Vec<i64>>>> {
    let mut layers = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "." {
            layers.push(Vec::new());
            continue;
        }
        let mut layer = Vec::new();
        for t in line.split(')').map(str::trim).filter(|t| !t.is_empty()) {
            let inner = t.strip_prefix('(').ok_or_else(|| anyhow!("line {}: expected '(' in {t:?}", k + 1))?;
            let v: Result<Vec<i64>, _> = inner.split(',').map(|x| x.trim().parse::<i64>()).collect();
            layer.push(v.map_err(|e| anyhow!("line {}: {e}", k + 1))?);
        }
        layers.push(layer);
    }
    Ok(layers)
}

fn chain_check_graph(path: &Path, format: Format) -> Result<Status> {
    let g = LayeredGraph::from_prefix(parse_graph(&read(path)?)?);
    chain_report(&g, format)
}
