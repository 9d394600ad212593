use std::collections::BTreeMap;
use std::path::Path;

use royden::energy::{energy, energy_inner, formal_laplacian, o_norm};
use royden::fixtures::{tree_branch_data, tree_ray_function};
use royden::graph::{serialize_graph_file, Family};
use royden::harmonic::{
    harmonic_boundary_empty, harmonic_extension, liouville_probe, max_principle_check,
    one_point_diagnosis, royden_decompose, solve_dirichlet, truncate_harmonic,
};
use royden::potential::{
    capacity_profile, classify_transience, equilibrium_potential, free_resistance, gamma, gamma_o,
    uniform_transience_report, Gamma, UtOptions,
};
use royden::spectral::{
    eigenvalue_bounds_check, gap_trend, spectral_gap_criterion, spectrum, ultracontractivity_check,
    Enumeration, HeatSemigroup,
};
use royden::walker::escape_probability;
use royden::{Error, ExhaustionGenerator, Section, VertexFn};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{csv, num, Output};
use crate::source::{default_levels, parse_levels, read_text, Source};
use crate::{Command, FnArgs, Settings};

type Res = Result<Output, CliError>;

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("library records serialise")
}

fn set(v: &mut Value, key: &str, x: impl Into<Value>) {
    if let Value::Object(map) = v {
        map.insert(key.to_string(), x.into());
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Vertex named on the command line, else the generator root.
fn pick_vertex(src: &Source, s: &Section, vertex: Option<&str>) -> Result<usize, CliError> {
    match (vertex, src) {
        (Some(name), _) => Ok(s.resolve(name)?),
        (None, Source::Generator(text)) => {
            let root = crate::source::parse_generator(text)?.generator.root_label();
            Ok(s.resolve(&root)?)
        }
        (None, Source::File(_)) => Err(usage("this command needs --vertex for a graph file")),
    }
}

fn exhaustion(
    s: &Settings,
    vertex: Option<&str>,
) -> Result<(ExhaustionGenerator, String), CliError> {
    let gen = s.source()?.exhaustion(vertex)?;
    let label = match (vertex, s.source()?) {
        (Some(v), Source::Generator(_)) => v.to_string(),
        _ => gen.root_label(),
    };
    Ok((gen, label))
}

fn levels(
    s: &Settings,
    arg: Option<&str>,
    gen: &ExhaustionGenerator,
) -> Result<Vec<usize>, CliError> {
    match arg.or(s.levels.as_deref()) {
        Some(text) => parse_levels(text),
        None => Ok(default_levels(gen)),
    }
}

fn load_fn(args: &FnArgs, s: &Section, fallback: Option<&str>) -> Result<VertexFn, CliError> {
    if let Some(path) = &args.function {
        return Ok(VertexFn::parse(&read_text(path)?, s)?);
    }
    match args.fixture.as_deref().or(fallback) {
        Some("ray") => Ok(tree_ray_function(s)?),
        Some("branch") => Ok(tree_branch_data(s)?),
        Some("harmonic") => Ok(harmonic_extension(s, &tree_branch_data(s)?)?),
        Some(other) => Err(usage(format!("unknown fixture {other:?}"))),
        None => Err(usage("give --fn FILE or --fixture")),
    }
}

fn is_tree(src: &Source) -> bool {
    match src {
        Source::Generator(text) => crate::source::parse_generator(text)
            .map(|g| matches!(g.generator.family(), Family::Tree { .. }))
            .unwrap_or(false),
        Source::File(_) => false,
    }
}

/// `<vertex> <value>` lines into explicit boundary data.
fn boundary_values(path: &Path, s: &Section) -> Result<BTreeMap<usize, f64>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in read_text(path)?.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| Error::Syntax {
            line: i + 1,
            message,
        };
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(syntax("expected `<vertex> <value>`".into()).into());
        };
        let v = s.resolve(name)?;
        let x: f64 = value
            .parse()
            .map_err(|e| syntax(format!("bad value {value:?}: {e}")))?;
        out.insert(v, x);
    }
    Ok(out)
}

fn function_output(s: &Section, f: &VertexFn, mut record: Value) -> Output {
    set(&mut record, "labels", to_value(&s.labels()));
    set(&mut record, "values", to_value(f));
    let table = csv(
        &["vertex", "label", "value"],
        (0..s.len()).map(|v| vec![v.to_string(), s.label(v).to_string(), num(f[v])]),
    );
    Output::Tabular(record, table)
}

fn write_fn(path: &Path, f: &VertexFn) -> Result<(), CliError> {
    std::fs::write(path, f.serialize())
        .map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))
}

fn gamma_record(g: &Gamma) -> Value {
    let mut v = to_value(g);
    set(&mut v, "finite", g.is_finite());
    v
}

fn finite_flag(v: &mut Value, key: &str, x: f64) {
    set(v, &format!("{key}_finite"), x.is_finite());
}

pub fn run(cmd: Command, s: &Settings) -> Res {
    match cmd {
        Command::Validate => {
            let src = s.source()?;
            let (g, level) = src.section()?;
            let comps = g.interior_components();
            Ok(Output::Json(json!({
                "source": src.describe(),
                "level": level,
                "valid": true,
                "vertices": g.len(),
                "edges": g.edge_count(),
                "interior": g.interior_count(),
                "masked": g.len() - g.interior_count(),
                "interior_components": comps.count(),
                "all_grounded": comps.all_grounded(),
                "killing_total": g.killing_total(),
                "measure_total": g.measure_values().iter().sum::<f64>(),
            })))
        }
        Command::Gen { out } => {
            let (g, _) = s.source()?.section()?;
            let text = serialize_graph_file(&g);
            match out {
                Some(path) => {
                    std::fs::write(&path, text)
                        .map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
                    Ok(Output::Json(
                        json!({ "written": path.display().to_string(), "vertices": g.len() }),
                    ))
                }
                None => Ok(Output::Text(text)),
            }
        }
        Command::Cap { vertex, potential } => {
            let src = s.source()?;
            let (g, level) = src.section()?;
            let x = pick_vertex(src, &g, vertex.as_deref())?;
            let eq = equilibrium_potential(&g, x)?;
            let mut record = json!({
                "vertex": g.label(x),
                "level": level,
                "cap": eq.cap,
                "degenerate": eq.degenerate,
                "iterations": eq.iterations,
            });
            set(&mut record, "positive", eq.cap > s.tol);
            if potential {
                return Ok(function_output(&g, &eq.potential, record));
            }
            Ok(Output::Json(record))
        }
        Command::CapProfile { vertex, levels: lv } => {
            let (gen, label) = exhaustion(s, vertex.as_deref())?;
            let levels = levels(s, lv.as_deref(), &gen)?;
            let profile = capacity_profile(&gen, &label, &levels)?;
            let table = profile.to_csv();
            Ok(Output::Tabular(to_value(&profile), table))
        }
        Command::Classify { vertex, levels: lv } => {
            let (gen, label) = exhaustion(s, vertex.as_deref())?;
            let levels = levels(s, lv.as_deref(), &gen)?;
            let c = classify_transience(&gen, &label, &levels, s.tol)?;
            Ok(Output::Json(to_value(&c)))
        }
        Command::Gamma { x, y } => {
            let (g, _) = s.source()?.section()?;
            let r = gamma(&g, g.resolve(&x)?, g.resolve(&y)?)?;
            Ok(Output::Json(gamma_record(&r)))
        }
        Command::GammaO { o, x, y } => {
            let (g, _) = s.source()?.section()?;
            let r = gamma_o(&g, g.resolve(&o)?, g.resolve(&x)?, g.resolve(&y)?)?;
            Ok(Output::Json(gamma_record(&r)))
        }
        Command::Resistance { x, y } => {
            let (g, _) = s.source()?.section()?;
            let r = free_resistance(&g, g.resolve(&x)?, g.resolve(&y)?)?;
            Ok(Output::Json(json!({ "resistance": r })))
        }
        Command::UtReport {
            vertex,
            levels: lv,
            window_level,
            gap_levels,
            liouville_levels,
        } => {
            let (gen, _) = exhaustion(s, vertex.as_deref())?;
            let profile_levels = levels(s, lv.as_deref(), &gen)?;
            let gap_levels = match gap_levels {
                Some(text) => parse_levels(&text)?,
                None if matches!(gen.family(), Family::Lattice { .. }) => Vec::new(),
                None => profile_levels.clone(),
            };
            let report = uniform_transience_report(
                &gen,
                &UtOptions {
                    window_level,
                    profile_levels,
                    gap_levels,
                    tol: s.tol,
                },
            )?;
            let mut v = to_value(&report);
            finite_flag(&mut v, "C", report.c_constant);
            finite_flag(&mut v, "gamma_diameter_bound", report.gamma_diameter_bound);
            if let Some(text) = liouville_levels {
                let probe = liouville_probe(&gen, &parse_levels(&text)?, s.seed()?)?;
                let diagnosis = one_point_diagnosis(&report, &probe);
                set(&mut v, "liouville", to_value(&probe));
                set(&mut v, "diagnosis", to_value(&diagnosis));
            }
            Ok(Output::Json(v))
        }
        Command::Dirichlet { values, out } => {
            let (g, _) = s.source()?.section()?;
            let boundary = boundary_values(&values, &g)?;
            let f = solve_dirichlet(&g, &boundary)?;
            if let Some(path) = out {
                write_fn(&path, &f)?;
            }
            Ok(function_output(&g, &f, json!({})))
        }
        Command::Decompose {
            input,
            out_f0,
            out_fh,
        } => {
            let (g, _) = s.source()?.section()?;
            let f = load_fn(&input, &g, None)?;
            let d = royden_decompose(&g, &f)?;
            if let Some(path) = out_f0 {
                write_fn(&path, &d.f0)?;
            }
            if let Some(path) = out_fh {
                write_fn(&path, &d.fh)?;
            }
            let table = csv(
                &["vertex", "label", "f", "f0", "fh"],
                (0..g.len()).map(|v| {
                    vec![
                        v.to_string(),
                        g.label(v).to_string(),
                        num(f[v]),
                        num(d.f0[v]),
                        num(d.fh[v]),
                    ]
                }),
            );
            let mut v = to_value(&d);
            set(&mut v, "labels", to_value(&g.labels()));
            Ok(Output::Tabular(v, table))
        }
        Command::Maxcheck { input } => {
            let (g, _) = s.source()?.section()?;
            let f = load_fn(&input, &g, None)?;
            let mut v = to_value(&max_principle_check(&g, &f)?);
            if let Value::Object(map) = &mut v {
                if map.get("max_abs_mask").is_some_and(Value::is_null) {
                    map.insert("mask_empty".into(), true.into());
                }
            }
            Ok(Output::Json(v))
        }
        Command::Hbempty { vertex, levels: lv } => {
            let (gen, _) = exhaustion(s, vertex.as_deref())?;
            let levels = levels(s, lv.as_deref(), &gen)?;
            Ok(Output::Json(to_value(&harmonic_boundary_empty(
                &gen, &levels, s.tol,
            )?)))
        }
        Command::TruncateHarmonic { input, n } => {
            let src = s.source()?;
            let (g, _) = src.section()?;
            let fallback = is_tree(src).then_some("harmonic");
            let f = load_fn(&input, &g, fallback)?;
            let n = n.unwrap_or(0.5 * f.sup_norm());
            if !(n > 0.0 && n.is_finite()) {
                return Err(usage(format!("--n must be positive, got {n}")));
            }
            let t = truncate_harmonic(&g, &f, n)?;
            let table = csv(
                &["vertex", "label", "f", "truncated", "f0", "fh"],
                (0..g.len()).map(|v| {
                    vec![
                        v.to_string(),
                        g.label(v).to_string(),
                        num(f[v]),
                        num(t.truncated[v]),
                        num(t.decomposition.f0[v]),
                        num(t.decomposition.fh[v]),
                    ]
                }),
            );
            let mut v = to_value(&t);
            set(&mut v, "labels", to_value(&g.labels()));
            Ok(Output::Tabular(v, table))
        }
        Command::Liouville { vertex, levels: lv } => {
            let (gen, _) = exhaustion(s, vertex.as_deref())?;
            let levels = levels(s, lv.as_deref(), &gen)?;
            let r = liouville_probe(&gen, &levels, s.seed()?)?;
            let table = csv(
                &["level", "oscillation"],
                r.levels
                    .iter()
                    .zip(&r.oscillation)
                    .map(|(n, o)| vec![n.to_string(), num(*o)]),
            );
            Ok(Output::Tabular(to_value(&r), table))
        }
        Command::Spectrum { k } => {
            let (g, _) = s.source()?.section()?;
            let r = spectrum(&g, k)?;
            let table = csv(
                &["index", "eigenvalue"],
                r.eigenvalues
                    .iter()
                    .enumerate()
                    .map(|(i, l)| vec![i.to_string(), num(*l)]),
            );
            Ok(Output::Tabular(to_value(&r), table))
        }
        Command::Bounds { order } => {
            let (g, _) = s.source()?.section()?;
            let enumeration = if order.is_empty() {
                Enumeration::MeasureDecreasing
            } else {
                Enumeration::Given(
                    order
                        .iter()
                        .map(|v| g.resolve(v))
                        .collect::<royden::Result<_>>()?,
                )
            };
            let r = eigenvalue_bounds_check(&g, &enumeration)?;
            let table = csv(
                &["n", "bound", "lambda", "slack"],
                r.rows.iter().map(|row| {
                    vec![
                        row.n.to_string(),
                        num(row.bound),
                        num(row.lambda),
                        num(row.slack),
                    ]
                }),
            );
            Ok(Output::Tabular(to_value(&r), table))
        }
        Command::Heat { t, input } => {
            let (g, _) = s.source()?.section()?;
            let f = load_fn(&input, &g, None)?;
            let u = HeatSemigroup::new(&g)?.apply(t, &f)?;
            Ok(function_output(&g, &u, json!({ "t": t })))
        }
        Command::Trace { t } => {
            let (g, _) = s.source()?.section()?;
            let heat = HeatSemigroup::new(&g)?;
            let traces: Vec<f64> = t
                .iter()
                .map(|&t| heat.trace(t))
                .collect::<royden::Result<_>>()?;
            let table = csv(
                &["t", "trace"],
                t.iter().zip(&traces).map(|(t, tr)| vec![num(*t), num(*tr)]),
            );
            Ok(Output::Tabular(json!({ "t": t, "trace": traces }), table))
        }
        Command::Gapcheck {
            vertex,
            trials,
            levels: lv,
        } => {
            if let Some(text) = lv {
                let (gen, _) = exhaustion(s, vertex.as_deref())?;
                let trend = gap_trend(&gen, &parse_levels(&text)?, s.tol)?;
                let table = csv(
                    &["level", "lambda0"],
                    trend
                        .levels
                        .iter()
                        .zip(&trend.lambda0)
                        .map(|(n, l)| vec![n.to_string(), num(*l)]),
                );
                return Ok(Output::Tabular(to_value(&trend), table));
            }
            let (g, _) = s.source()?.section()?;
            let r = spectral_gap_criterion(&g, trials, s.seed()?)?;
            let mut v = to_value(&r);
            finite_flag(&mut v, "bound_constant", r.bound_constant);
            Ok(Output::Json(v))
        }
        Command::Walk { vertex, trials } => {
            let src = s.source()?;
            let (g, _) = src.section()?;
            let o = pick_vertex(src, &g, vertex.as_deref())?;
            let w = escape_probability(&g, o, trials, s.seed()?)?;
            let mut v = to_value(&w);
            set(&mut v, "vertex", g.label(o));
            set(&mut v, "cap", equilibrium_potential(&g, o)?.cap);
            Ok(Output::Json(v))
        }
        Command::Energy {
            input,
            g: other,
            o,
            laplacian,
        } => {
            let (g, _) = s.source()?.section()?;
            let f = load_fn(&input, &g, None)?;
            let mut v = to_value(&energy(&g, &f)?);
            if let Some(path) = other {
                let h = VertexFn::parse(&read_text(&path)?, &g)?;
                set(&mut v, "inner", energy_inner(&g, &f, &h)?);
            }
            if let Some(o) = o {
                set(&mut v, "o", o.clone());
                set(&mut v, "o_norm", o_norm(&g, &f, g.resolve(&o)?)?);
            }
            if laplacian {
                return Ok(function_output(&g, &formal_laplacian(&g, &f)?, v));
            }
            Ok(Output::Json(v))
        }
        Command::Ultra { t, trials } => {
            let (g, _) = s.source()?.section()?;
            let r = ultracontractivity_check(&g, t, trials, s.seed()?)?;
            Ok(Output::Json(to_value(&r)))
        }
    }
}
