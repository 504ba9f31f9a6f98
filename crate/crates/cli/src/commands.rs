use std::f64::consts::FRAC_PI_8;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use qlds::additivity::{classify_pair, verify_proposition1, AdditivityOperator, DensityMatrix};
use qlds::chsh::{self, Su2Setting, TABLE_COLUMN_LABELS};
use qlds::ds::{self, EmployeeExample, MassFunction};
use qlds::finite_qm::{CoherentFamily, FamilyJson, FiniteSystem};
use qlds::linalg::{self, c, commutator, cr, MatrixJson};
use qlds::{random, tolerance, Subspace};

use crate::args::{ChshArgs, ClassifyArgs, CoherentArgs, DsArgs};
use crate::CliError;

/// CSV header and rows.
pub type Table = (Vec<&'static str>, Vec<Map<String, Value>>);

/// Result of a command: the JSON document, an optional CSV table, and
/// whether a residual check failed.
pub struct Report {
    pub value: Value,
    pub table: Option<Table>,
    pub failed: bool,
}

impl Report {
    fn plain(value: Value, failed: bool) -> Self {
        Self {
            value,
            table: None,
            failed,
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn matrix(m: &linalg::CMatrix) -> Value {
    to_value(&MatrixJson::from(m))
}

// ----------------------------------------------------------------------------
// chsh

const CHSH_COLUMNS: [&str; 8] = [
    "theta",
    "kappa",
    "lambda",
    "chsh_lhs",
    "bound",
    "violated",
    "boole_sum",
    "boole_violated",
];

fn chsh_row(setting: &Su2Setting, theta: Option<f64>) -> Result<Map<String, Value>, CliError> {
    let table = chsh::probability_table(setting)?;
    let lhs = chsh::chsh_lhs(setting)?;
    let closed = chsh::chsh_lhs_closed(table.kappa, table.lambda);
    let boole = chsh::boole_violation(setting)?;
    let tol = tolerance::session().zero_tol;
    let rows: Vec<Value> = chsh::Observable::ALL
        .iter()
        .map(|&o| {
            let cells = table.rows[o as usize];
            json!({
                "observable": o.to_string(),
                "p": cells,
            })
        })
        .collect();
    let mut m = Map::new();
    m.insert("theta".into(), theta.map_or(Value::Null, Value::from));
    m.insert("a".into(), json!([setting.a().re, setting.a().im]));
    m.insert("b".into(), json!([setting.b().re, setting.b().im]));
    m.insert("kappa".into(), table.kappa.into());
    m.insert("lambda".into(), table.lambda.into());
    m.insert("columns".into(), json!(TABLE_COLUMN_LABELS));
    m.insert("table".into(), Value::Array(rows));
    m.insert("chsh_lhs".into(), lhs.into());
    m.insert("bound".into(), 3.into());
    m.insert("violated".into(), (lhs > 3.0 + tol).into());
    m.insert("boole_sum".into(), boole.lhs_sum.into());
    m.insert("boole_joint".into(), boole.joint.into());
    m.insert("boole_violated".into(), boole.violated.into());
    m.insert(
        "route_residual".into(),
        table.residual.max((lhs - closed).abs()).into(),
    );
    Ok(m)
}

fn parse_sweep(grid: &str) -> Result<(f64, f64, usize), CliError> {
    let bad = || CliError::Input(format!("sweep must be lo:hi:steps, got {grid:?}"));
    let parts: Vec<&str> = grid.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if steps == 0 || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    Ok((lo, hi, steps))
}

pub fn chsh(args: &ChshArgs) -> Result<Report, CliError> {
    if let Some(grid) = &args.sweep {
        let (lo, hi, steps) = parse_sweep(grid)?;
        let rows = (0..=steps)
            .map(|k| {
                let theta = lo + (hi - lo) * k as f64 / steps as f64;
                chsh_row(&Su2Setting::from_theta(theta), Some(theta))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let value = json!({ "command": "chsh", "rows": rows });
        return Ok(Report {
            value,
            table: Some((CHSH_COLUMNS.to_vec(), rows)),
            failed: false,
        });
    }
    let raw = [args.a_re, args.a_im, args.b_re, args.b_im];
    let (setting, theta) = if raw.iter().any(Option::is_some) {
        let [ar, ai, br, bi] = raw.map(|x| x.unwrap_or(0.0));
        (Su2Setting::new(c(ar, ai), c(br, bi))?, None)
    } else {
        let theta = args.theta.unwrap_or(FRAC_PI_8);
        (Su2Setting::from_theta(theta), Some(theta))
    };
    let mut row = chsh_row(&setting, theta)?;
    let mut value = Map::new();
    value.insert("command".into(), "chsh".into());
    value.append(&mut row.clone());
    row.retain(|k, _| CHSH_COLUMNS.contains(&k.as_str()));
    Ok(Report {
        value: Value::Object(value),
        table: Some((CHSH_COLUMNS.to_vec(), vec![row])),
        failed: false,
    })
}

// ----------------------------------------------------------------------------
// lattice-demo

pub fn lattice_demo() -> Result<Report, CliError> {
    let h1 = Subspace::span_vectors(3, &[vec![cr(1.0), cr(0.0), cr(0.0)]])?;
    let h2 = Subspace::span_vectors(3, &[vec![cr(1.0), cr(1.0), cr(0.0)]])?;
    let join = h1.join(&h2)?;
    let meet = h1.meet(&h2)?;
    let op = AdditivityOperator::new(&h1, &h2)?;
    let comm = commutator(h1.projector(), h2.projector());
    let report = verify_proposition1(&h1, &h2)?;
    // [𝔓₁,𝔓₂] = 𝔇(𝔓₁ − 𝔓₂)
    let e3 = (&comm - op.matrix() * (h1.projector() - h2.projector())).norm();
    let failed = !report.passed || e3 > tolerance::session().zero_tol;
    let value = json!({
        "command": "lattice-demo",
        "p1": matrix(h1.projector()),
        "p2": matrix(h2.projector()),
        "join": matrix(join.projector()),
        "meet_dim": meet.dim(),
        "operator": matrix(op.matrix()),
        "commutator": matrix(&comm),
        "eigenvalues": op.eigenvalues(),
        "commutator_residual": e3,
        "proposition1": to_value(&report),
    });
    Ok(Report::plain(value, failed))
}

// ----------------------------------------------------------------------------
// coherent

fn parse_fiducial(text: &str, d: usize) -> Result<FamilyJson, CliError> {
    let trimmed = text.trim_start();
    let body = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text)
            .map_err(|e| CliError::Input(format!("cannot read fiducial {text}: {e}")))?
    };
    let v: Value = serde_json::from_str(&body)
        .map_err(|e| CliError::Input(format!("invalid fiducial JSON: {e}")))?;
    if v.is_array() {
        let fiducial: Vec<[f64; 2]> = serde_json::from_value(v)
            .map_err(|e| CliError::Input(format!("fiducial must be [[re,im],...]: {e}")))?;
        Ok(FamilyJson {
            d,
            fiducial,
            seed: None,
        })
    } else {
        serde_json::from_value(v)
            .map_err(|e| CliError::Input(format!("invalid fiducial object: {e}")))
    }
}

pub fn coherent(args: &CoherentArgs) -> Result<Report, CliError> {
    let family = match &args.fiducial {
        Some(text) => {
            let j = parse_fiducial(text, args.d)?;
            CoherentFamily::try_from(&j)?
        }
        None => CoherentFamily::random(FiniteSystem::new(args.d)?, args.seed),
    };
    let report = family.verify()?;
    let tol = tolerance::session().zero_tol;
    let failed = report.max_residual() > tol;
    let value = json!({
        "command": "coherent",
        "d": family.system().d(),
        "seed": family.seed(),
        "fiducial": to_value(&FamilyJson::from(&family).fiducial),
        "resolution_residual": report.resolution_residual,
        "overlap_residual": report.overlap_residual,
        "pair_residual": report.pair_residual,
        "join_residual": report.join_residual,
        "trace_residual": report.trace_residual,
        "pairs_checked": report.pairs_checked,
        "max_operator_norm": report.max_operator_norm,
        "operator_nonzero": report.max_operator_norm > tol,
        "passed": !failed,
    });
    Ok(Report::plain(value, failed))
}

// ----------------------------------------------------------------------------
// classify

#[derive(Deserialize)]
struct ClassifyInput {
    h1: Subspace,
    h2: Subspace,
    rho: DensityMatrix,
    #[serde(default)]
    epsilon: Option<f64>,
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Input(format!("cannot read standard input: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
    }
}

pub fn classify(args: &ClassifyArgs) -> Result<Report, CliError> {
    let text = read_input(&args.input)?;
    let input: ClassifyInput = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("invalid classify input: {e}")))?;
    let tol = tolerance::session().zero_tol;
    let epsilon = args.epsilon.or(input.epsilon).unwrap_or(tol);
    let cls = classify_pair(&input.h1, &input.h2, &input.rho, epsilon)?;
    let prop = verify_proposition1(&input.h1, &input.h2)?;
    let value = json!({
        "command": "classify",
        "d_scalar": cls.d_scalar,
        "verdict": to_value(&cls.verdict),
        "epsilon": cls.epsilon,
        "lambda_min": cls.lambda_min,
        "lambda_max": cls.lambda_max,
        "operator_norm": prop.operator_norm,
        "operator_nonzero": prop.operator_norm > tol,
        "residuals": to_value(&prop.residuals),
    });
    Ok(Report::plain(value, !prop.passed))
}

// ----------------------------------------------------------------------------
// ds-table1

pub fn ds_table1(args: &DsArgs) -> Result<Report, CliError> {
    let mut extra = Map::new();
    let (mass, source) = if let Some(counts) = &args.employees {
        if counts.len() != 3 {
            return Err(CliError::Input(format!(
                "--employees takes three counts n1,n2,n3, got {}",
                counts.len()
            )));
        }
        let e = EmployeeExample::new(counts[0], counts[1], counts[2])?;
        let under = e.under_35;
        let over = e.mass.frame().complement(under);
        let l = e.mass.belief(under)?;
        let u = e.mass.plausibility(under)?;
        let lc = e.mass.belief(over)?;
        extra.insert("subset".into(), under.into());
        extra.insert("lower".into(), l.into());
        extra.insert("upper".into(), u.into());
        extra.insert("lower_complement".into(), lc.into());
        extra.insert("lower_sum".into(), (l + lc).into());
        (e.mass, "employees")
    } else if let Some(path) = &args.mass {
        let text = read_input(path)?;
        let m: MassFunction = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("invalid mass function: {e}")))?;
        (m, "file")
    } else {
        let frame = ds::Frame::new(args.frame)?;
        let mut rng = random::seeded(args.seed);
        (MassFunction::random(&mut rng, frame, 6), "random")
    };
    let n = mass.frame().size();
    let report = match args.trials {
        Some(t) => ds::check_table1(&mass, t, &mut random::seeded(args.seed)),
        None if n <= 10 => ds::check_table1_exhaustive(&mass),
        None => ds::check_table1(&mass, 10_000, &mut random::seeded(args.seed)),
    };
    let mut value = Map::new();
    value.insert("command".into(), "ds-table1".into());
    value.insert("source".into(), source.into());
    if source == "random" {
        value.insert("seed".into(), args.seed.into());
    }
    value.insert("mass".into(), to_value(&mass));
    value.append(&mut extra);
    value.insert("pairs_checked".into(), report.pairs_checked.into());
    value.insert("passed".into(), report.passed().into());
    value.insert("rows".into(), to_value(&report.rows));
    value.insert(
        "lower_boole_violation".into(),
        to_value(&report.lower_boole_violation),
    );
    value.insert(
        "lower_equals_upper".into(),
        report.lower_equals_upper.into(),
    );
    let failed = !report.passed();
    let rows: Vec<Map<String, Value>> = report
        .rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("row".into(), to_value(&r.row));
            m.insert("passed".into(), r.passed.into());
            m.insert(
                "witness_a".into(),
                r.witness.map_or(Value::Null, |w| w.a.into()),
            );
            m.insert(
                "witness_b".into(),
                r.witness.map_or(Value::Null, |w| w.b.into()),
            );
            m.insert(
                "witness_value".into(),
                r.witness.map_or(Value::Null, |w| w.value.into()),
            );
            m
        })
        .collect();
    Ok(Report {
        value: Value::Object(value),
        table: Some((
            vec!["row", "passed", "witness_a", "witness_b", "witness_value"],
            rows,
        )),
        failed,
    })
}
