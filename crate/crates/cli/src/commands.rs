use std::collections::BTreeMap;

use littlewood::bounds::{
    constant_scan, verify_basic_multidim, verify_main_prop, verify_mps, verify_multidim,
    verify_multidimz, ConstantMode, InequalityVerdict, MainPropInput, ScanMode, ScanReport,
};
use littlewood::kernels::{discrete_l1_bound, flat_top_discrete_l1, FlatTopKernel};
use littlewood::modulus::{good_modulus, thinning_transform, ResidueFilter};
use littlewood::quadrature::{bernstein_check, certified_l1, riemann_l1};
use littlewood::structures::{
    build_strong_integer, build_strong_lattice, gap_rank2, validate_certificate, IntegerSpec,
    Shape, StructuredSet,
};
use littlewood::{DimCertificate, IntegerSet, NormInterval, TrigPoly};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{Command, GenKind, Theorem};
use crate::config::Settings;
use crate::error::CliError;
use crate::input::{Generated, Input};
use crate::report::{Outcome, Table};
use crate::suite::{brute_force_ladder, run_suite, SuiteOptions};

const DEFAULT_REL_ERR: f64 = 0.05;

pub fn dispatch(cmd: &Command, s: &Settings) -> Result<Outcome, CliError> {
    match cmd {
        Command::Gen { kind, params } => gen(*kind, params, s),
        Command::Norm { set, input } => norm(&Input::from_args(set.as_deref(), input.as_deref())?, s),
        Command::Kernel { m, n, period } => kernel(*m, *n, *period),
        Command::Thin { set, input, d1, d2, delta, q, s: res } => {
            let f = Input::from_args(set.as_deref(), input.as_deref())?.poly()?;
            thin(&f, *d1, *d2, *delta, ResidueFilter::new(*q, *res)?, s)
        }
        Command::Verify { theorem: Theorem::MainProp, input, .. } => match input {
            Some(path) => verify_main_prop_file(path, s),
            None => Err(CliError::Usage("--theorem main-prop needs --input".into())),
        },
        Command::Verify { theorem, input, set, empirical_c } => {
            let input = match (set, input) {
                (None, None) => None,
                (set, input) => Some(Input::from_args(set.as_deref(), input.as_deref())?),
            };
            verify(*theorem, input.as_ref(), *empirical_c, s)
        }
        Command::Suite { fault_kernel, only } => suite(*fault_kernel, only, s),
    }
}

fn parse_params<T: for<'de> Deserialize<'de>>(params: &str) -> Result<T, CliError> {
    serde_json::from_str(params).map_err(|e| CliError::Usage(format!("--params: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GapParams {
    a: i64,
    b: i64,
    #[serde(rename = "M")]
    m: i64,
    #[serde(rename = "N")]
    n: i64,
    #[serde(default)]
    force: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeParams {
    sizes: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegerParams {
    deltas: Vec<f64>,
    sizes: Vec<usize>,
    #[serde(default = "one")]
    stretch: f64,
}

fn one() -> f64 {
    1.0
}

fn set_table(set: &StructuredSet) -> Table {
    match set {
        StructuredSet::Integer(s) => {
            let mut t = Table::new(&["a"]);
            s.iter().for_each(|a| t.push([a]));
            t
        }
        StructuredSet::Lattice(s) => {
            let header: Vec<String> = (1..=s.rank()).map(|i| format!("x{i}")).collect();
            let mut t = Table { header, rows: Vec::new() };
            s.points().iter().for_each(|p| t.push(p.iter()));
            t
        }
    }
}

fn gen(kind: GenKind, params: &str, s: &Settings) -> Result<Outcome, CliError> {
    let (set, certificate) = match kind {
        GenKind::Gap => {
            let p: GapParams = parse_params(params)?;
            (StructuredSet::Integer(gap_rank2(p.a, p.b, p.m, p.n, p.force)?), None)
        }
        GenKind::LatticeBox | GenKind::LatticeRandom => {
            let p: LatticeParams = parse_params(params)?;
            let shape = if kind == GenKind::LatticeBox { Shape::Box } else { Shape::Random };
            let (set, cert) = build_strong_lattice(&p.sizes, shape, s.seed)?;
            (StructuredSet::Lattice(set), Some(cert))
        }
        GenKind::ZstrongBox | GenKind::ZstrongRandom => {
            let p: IntegerParams = parse_params(params)?;
            let shape = if kind == GenKind::ZstrongBox { Shape::Box } else { Shape::Random };
            let spec = IntegerSpec { deltas: p.deltas, sizes: p.sizes, shape, seed: s.seed, stretch: p.stretch };
            let (set, cert) = build_strong_integer(&spec)?;
            (StructuredSet::Integer(set), Some(cert))
        }
    };
    let valid = certificate
        .as_ref()
        .map(|c| validate_certificate(&set, c).pass)
        .unwrap_or(true);
    let table = set_table(&set);
    Ok(Outcome {
        pass: valid,
        result: serde_json::to_value(Generated { set, certificate })?,
        table,
    })
}

fn interval_row(t: &mut Table, label: &str, iv: &NormInterval) {
    t.push([
        label.to_string(),
        iv.lo.to_string(),
        iv.hi.to_string(),
        iv.riemann.to_string(),
        format!("{:?}", iv.grid),
    ]);
}

fn norm(input: &Input, s: &Settings) -> Result<Outcome, CliError> {
    let iv = certified_l1(&input.poly()?, s.rel_err_or(DEFAULT_REL_ERR), s.budget())?;
    let mut table = Table::new(&["label", "lo", "hi", "riemann", "grid"]);
    interval_row(&mut table, "norm", &iv);
    Ok(Outcome { pass: true, result: serde_json::to_value(&iv)?, table })
}

fn kernel(m: i64, n: i64, period: Option<usize>) -> Result<Outcome, CliError> {
    let k = FlatTopKernel::build(m, n)?;
    let period = period.unwrap_or(k.min_period() as usize);
    let l1 = flat_top_discrete_l1(&k, period)?;
    let bound = discrete_l1_bound(m, n);
    let violations = k.property_violations();
    let mut table = Table::new(&["k", "fraction", "float"]);
    for (j, v) in k.values() {
        table.push([j.to_string(), v.to_string(), (*v.numer() as f64 / *v.denom() as f64).to_string()]);
    }
    Ok(Outcome {
        pass: violations.is_empty() && l1 <= bound,
        result: json!({
            "m": m, "n": n, "period": period, "discrete_l1": l1, "bound": bound,
            "violations": violations,
        }),
        table,
    })
}

fn thin(f: &TrigPoly, d1: i64, d2: i64, delta: f64, filter: ResidueFilter, s: &Settings) -> Result<Outcome, CliError> {
    let out = thinning_transform(f, d1, d2, delta, filter)?;
    let rho = s.rel_err_or(0.1);
    let before = certified_l1(f, rho, s.budget())?;
    let after = certified_l1(&out.thinned, rho, s.budget())?;
    let bound_ok = after.hi <= out.bound_factor * before.hi * (1.0 + 2.0 * rho);
    let mut table = Table::new(&["frequency", "re", "im"]);
    for (freq, c) in out.thinned.terms() {
        table.push([freq[0].to_string(), c.re.to_string(), c.im.to_string()]);
    }
    Ok(Outcome {
        pass: out.identity_holds && bound_ok,
        result: json!({
            "thinning": out, "norm_before": before, "norm_after": after, "norm_bound_holds": bound_ok,
        }),
        table,
    })
}

fn verdict_outcome(v: &InequalityVerdict, extra: Option<Value>) -> Result<Outcome, CliError> {
    let mut table = Table::new(&["theorem", "lhs_lo", "lhs_hi", "rhs", "constant", "margin", "pass", "certified"]);
    table.push([
        v.theorem.clone(),
        v.lhs.lo.to_string(),
        v.lhs.hi.to_string(),
        v.rhs.to_string(),
        v.constant_used.to_string(),
        v.margin.to_string(),
        v.pass.to_string(),
        v.certified.to_string(),
    ]);
    let mut result = serde_json::to_value(v)?;
    if let (Value::Object(map), Some(Value::Object(more))) = (&mut result, extra) {
        map.extend(more);
    }
    Ok(Outcome { pass: v.pass, result, table })
}

fn scan_outcome(rep: ScanReport, c: f64) -> Result<Outcome, CliError> {
    let mut table = Table::new(&["label", "size", "lhs_lo", "lhs_hi", "rhs_unit", "ratio"]);
    for r in &rep.rows {
        table.push([
            r.label.clone(),
            r.size.to_string(),
            r.lhs_lo.to_string(),
            r.lhs_hi.to_string(),
            r.rhs_unit.to_string(),
            r.ratio.map(|x| x.to_string()).unwrap_or_default(),
        ]);
    }
    Ok(Outcome {
        pass: rep.min.is_none_or(|m| m >= c),
        result: json!({ "constant": c, "scan": rep }),
        table,
    })
}

fn need<'a>(input: Option<&'a Input>, theorem: &str) -> Result<&'a Input, CliError> {
    input.ok_or_else(|| CliError::Usage(format!("--theorem {theorem} needs --input or --set")))
}

/// Inputs for the main proposition: a set or polynomial with its block
/// parameters, which may instead come from an integer certificate. Without
/// `q` and `s` the good-modulus ladder on the block index supplies them.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MainPropFile {
    #[serde(default)]
    set: Option<IntegerSet>,
    #[serde(default)]
    poly: Option<TrigPoly>,
    #[serde(default)]
    certificate: Option<DimCertificate>,
    d1: Option<i64>,
    d2: Option<i64>,
    delta: Option<f64>,
    q: Option<i64>,
    s: Option<i64>,
}

fn main_prop(text: &str, s: &Settings) -> Result<Outcome, CliError> {
    let file: MainPropFile = serde_json::from_value(crate::input::payload(serde_json::from_str(text)?))?;
    let f = match (&file.set, &file.poly) {
        (Some(set), None) => littlewood::indicator_poly(set)?,
        (None, Some(p)) => p.clone(),
        _ => return Err(CliError::Usage("main-prop input needs exactly one of set or poly".into())),
    };
    let (mut d1, mut d2, mut delta, mut index) = (file.d1, file.d2, file.delta, None);
    if let Some(DimCertificate::Integer { d1: c1, d2: c2, delta: cd, index: ci, .. }) = &file.certificate {
        d1 = d1.or(Some(*c1));
        d2 = d2.or(Some(*c2));
        delta = delta.or(Some(*cd));
        index = Some(ci.clone());
    }
    let (Some(d1), Some(d2), Some(delta)) = (d1, d2, delta) else {
        return Err(CliError::Usage("main-prop input needs d1, d2 and delta or an integer certificate".into()));
    };
    let (q, res, ladder) = match (file.q, file.s) {
        (Some(q), Some(r)) => (q, r, None),
        (None, None) => {
            let index = match index {
                Some(i) => i,
                None => littlewood::modulus::block_index(&f, d1, d2)?,
            };
            let g = good_modulus(&index)?;
            (g.q, g.s, Some(g))
        }
        _ => return Err(CliError::Usage("give both q and s or neither".into())),
    };
    let input = MainPropInput::from_poly(&f, d1, d2, delta, q, res)?;
    let rep = verify_main_prop(&input, s.c_mps, s.rel_err_or(DEFAULT_REL_ERR), s.budget())?;
    let extra = json!({
        "rhs_lower": rep.rhs_lower, "j_count": rep.j_count, "terms": rep.terms,
        "thinning_factor": rep.thinning_factor, "thinned_norm": rep.thinned_norm,
        "t1": rep.t1, "t2_estimate": rep.t2_estimate, "t2_bound": rep.t2_bound,
        "q": q, "s": res, "ladder": ladder,
    });
    verdict_outcome(&rep.verdict, Some(extra))
}

fn suite_options(s: &Settings, fault_kernel: bool, only: &[u8]) -> SuiteOptions {
    SuiteOptions {
        seed: s.seed,
        rel_err: s.rel_err,
        c_mps: s.c_mps,
        budget: s.budget(),
        fault_kernel,
        only: only.to_vec(),
    }
}

fn suite(fault_kernel: bool, only: &[u8], s: &Settings) -> Result<Outcome, CliError> {
    if let Some(bad) = only.iter().find(|&&id| !(1..=11).contains(&id)) {
        return Err(CliError::Usage(format!("no criterion {bad}")));
    }
    let rep = run_suite(&suite_options(s, fault_kernel, only))?;
    Ok(Outcome { pass: rep.pass, table: rep.table(), result: serde_json::to_value(&rep)? })
}

fn verify(theorem: Theorem, input: Option<&Input>, empirical_c: Option<f64>, s: &Settings) -> Result<Outcome, CliError> {
    let rho = s.rel_err_or(DEFAULT_REL_ERR);
    let budget = s.budget();
    match theorem {
        Theorem::Mps => match need(input, "mps")? {
            Input::Family(f) => scan_outcome(constant_scan(f, ScanMode::Mps, rho, budget)?, s.c_mps),
            other => verdict_outcome(&verify_mps(&other.poly()?, s.c_mps, rho, budget)?, None),
        },
        Theorem::BasicMultidim => {
            let set = match need(input, "basic-multidim")? {
                Input::Lattice(l) | Input::Certified { set: StructuredSet::Lattice(l), .. } => l,
                _ => return Err(CliError::Usage("basic-multidim needs a lattice set".into())),
            };
            let rep = verify_basic_multidim(set, s.c_mps, rho, budget)?;
            let extra = json!({ "rhs_lower": rep.rhs_lower, "fibres": rep.fibres });
            verdict_outcome(&rep.verdict, Some(extra))
        }
        Theorem::Multidim => match need(input, "multidim")? {
            Input::Family(f) => scan_outcome(constant_scan(f, ScanMode::Multidim, rho, budget)?, s.c_mps),
            Input::Certified { set: StructuredSet::Lattice(l), certificate } => {
                verdict_outcome(&verify_multidim(l, certificate, s.c_mps, rho, budget)?, None)
            }
            _ => Err(CliError::Usage("multidim needs a lattice set with its certificate".into())),
        },
        Theorem::Multidimz => {
            let mode = match empirical_c {
                Some(c) => ConstantMode::Empirical { c },
                None => ConstantMode::Derived { c_mps: s.c_mps },
            };
            match need(input, "multidimz")? {
                Input::Family(f) => {
                    let c = empirical_c.unwrap_or(s.c_mps);
                    scan_outcome(constant_scan(f, ScanMode::Multidimz, rho, budget)?, c)
                }
                Input::Certified { set: StructuredSet::Integer(z), certificate } => {
                    verdict_outcome(&verify_multidimz(z, certificate, mode, rho, budget)?, None)
                }
                _ => Err(CliError::Usage("multidimz needs an integer set with its certificate".into())),
            }
        }
        Theorem::MainProp => unreachable!("dispatched before input parsing"),
        Theorem::Bernstein => match input {
            Some(i) => {
                let rep = bernstein_check(&i.poly()?, rho, budget)?;
                let mut table = Table::new(&["degree", "lhs_lo", "lhs_hi", "rhs_bound", "pass"]);
                table.push([rep.degree.to_string(), rep.lhs.lo.to_string(), rep.lhs.hi.to_string(), rep.rhs_bound.to_string(), rep.pass.to_string()]);
                Ok(Outcome { pass: rep.pass, result: serde_json::to_value(&rep)?, table })
            }
            None => suite(false, &[5], s),
        },
        Theorem::Numerical => match input {
            Some(i) => numerical_on(&i.poly()?, s),
            None => suite(false, &[4], s),
        },
        Theorem::Kernel => suite(false, &[1, 2, 3], s),
        Theorem::Thinning => suite(false, &[7], s),
        Theorem::GoodModulus => match input {
            Some(Input::Integer(set)) => {
                let g = good_modulus(set)?;
                let agrees = brute_force_ladder(set) == (g.j0, g.s, g.filtered.len());
                let bounds = g.bounds_hold(set.len());
                let mut table = Table::new(&["j", "q", "s", "class_size"]);
                for st in &g.trace {
                    table.push([st.j.to_string(), st.q.to_string(), st.s.to_string(), st.class_size.to_string()]);
                }
                Ok(Outcome {
                    pass: agrees && bounds,
                    result: json!({ "result": g, "bounds_hold": bounds, "brute_force_agrees": agrees }),
                    table,
                })
            }
            Some(_) => Err(CliError::Usage("good-modulus needs an integer set".into())),
            None => suite(false, &[6], s),
        },
    }
}

/// The numerical lemma on one polynomial: a grid of `4 ceil(4 pi d)` points
/// against a fine reference grid.
fn numerical_on(f: &TrigPoly, s: &Settings) -> Result<Outcome, CliError> {
    if f.rank() != 1 {
        return Err(CliError::Usage("numerical check needs rank 1".into()));
    }
    let (centred, _) = littlewood::recentre(f);
    let d = centred.degree()[0].max(1) as f64;
    let coarse_n = 4 * (4.0 * std::f64::consts::PI * d).ceil() as usize;
    let fine_n = (64 * coarse_n).max(1_000_000);
    let coarse = riemann_l1(f, &[coarse_n], s.budget())?;
    let reference = riemann_l1(f, &[fine_n], s.budget())?;
    let allowed = 4.0 * std::f64::consts::PI * d / coarse_n as f64 * reference;
    let diff = (coarse - reference).abs();
    let mut table = Table::new(&["grid", "riemann"]);
    table.push([coarse_n.to_string(), coarse.to_string()]);
    table.push([fine_n.to_string(), reference.to_string()]);
    let mut result = BTreeMap::new();
    result.insert("coarse", json!(coarse));
    result.insert("reference", json!(reference));
    result.insert("diff", json!(diff));
    result.insert("allowed", json!(allowed));
    Ok(Outcome { pass: diff <= allowed, result: serde_json::to_value(result)?, table })
}

/// `verify --theorem main-prop` bypasses [`Input`] since its file carries
/// block parameters.
pub fn verify_main_prop_file(path: &std::path::Path, s: &Settings) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    main_prop(&text, s)
}
