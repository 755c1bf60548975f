//! Batch front end for `orbicoh`: model files, command dispatch and reports.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use orbicoh::cohomology::{collapse_verify_with, e2_assembly_with, resolution_for, ResolutionChoice, TotalComplex};
use orbicoh::compat::{certified_action_with, solve_rank2, ActionSource, Certificate};
use orbicoh::group::{FiniteMatrixGroup, GroupKind, Subgroup, DEFAULT_BOUND};
use orbicoh::lattice::ZGLattice;
use orbicoh::linalg::IntMatrix;
use orbicoh::models;
use orbicoh::orbifold::{
    abelianization, brown_stable_check, fixed_points, gerbe_groups, order_p_subgroup_classes, OrbifoldModel,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("{pointer}: matrix is not unimodular (det = {det})")]
    NotUnimodular { pointer: String, det: String },
    #[error("{pointer}: generated group exceeds {bound} elements")]
    BoundExceeded { pointer: String, bound: usize },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] orbicoh::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// The on-disk model format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub generators: Vec<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<usize>>>,
}

fn pointer(i: usize) -> String {
    format!("generators[{i}]")
}

/// Validates a model document: square `n × n` unimodular generators that
/// generate a finite group.
pub fn parse_input(document: &str) -> CliResult<OrbifoldModel> {
    let doc: ModelDocument = serde_json::from_str(document).map_err(|e| CliError::Malformed(e.to_string()))?;
    model_from_document(&doc)
}

pub fn model_from_document(doc: &ModelDocument) -> CliResult<OrbifoldModel> {
    let n = doc.n;
    let mut gens = Vec::with_capacity(doc.generators.len());
    for (i, g) in doc.generators.iter().enumerate() {
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(CliError::Malformed(format!("{}: expected a {n}x{n} matrix", pointer(i))));
        }
        let m = IntMatrix::from_rows(g);
        if !m.is_unimodular() {
            let det = m.determinant().map(|d| d.to_string()).unwrap_or_default();
            return Err(CliError::NotUnimodular { pointer: pointer(i), det });
        }
        gens.push(m);
    }
    for (i, g) in gens.iter().enumerate() {
        if let Err(orbicoh::Error::BoundExceeded { bound }) = FiniteMatrixGroup::enumerate_in_rank(n, std::slice::from_ref(g), DEFAULT_BOUND) {
            return Err(CliError::BoundExceeded { pointer: pointer(i), bound });
        }
    }
    let group = match FiniteMatrixGroup::enumerate_in_rank(n, &gens, DEFAULT_BOUND) {
        Ok(g) => g,
        Err(orbicoh::Error::BoundExceeded { bound }) => {
            return Err(CliError::BoundExceeded {
                pointer: "generators".into(),
                bound,
            })
        }
        Err(e) => return Err(CliError::Malformed(e.to_string())),
    };
    let lattice = ZGLattice::natural(Arc::new(group));
    if let Some(blocks) = &doc.blocks {
        check_blocks(&lattice, blocks)?;
    }
    Ok(OrbifoldModel {
        name: doc.name.clone(),
        lattice,
    })
}

fn check_blocks(lattice: &ZGLattice, blocks: &[Vec<usize>]) -> CliResult<()> {
    let n = lattice.rank();
    let mut seen = vec![false; n];
    for b in blocks {
        for &c in b {
            if c >= n || seen[c] {
                return Err(CliError::Malformed("blocks: hint must partition 0..n".into()));
            }
            seen[c] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(CliError::Malformed("blocks: hint must partition 0..n".into()));
    }
    for (bi, b) in blocks.iter().enumerate() {
        let rest: Vec<usize> = (0..n).filter(|c| !b.contains(c)).collect();
        for a in lattice.actions() {
            if !a.submatrix(b, &rest).is_zero() || !a.submatrix(&rest, b).is_zero() {
                return Err(CliError::Malformed(format!("blocks[{bi}] is not invariant")));
            }
        }
    }
    Ok(())
}

/// The document for a model, with generators in the group's generator order.
pub fn emit_model(model: &OrbifoldModel) -> ModelDocument {
    ModelDocument {
        name: model.name.clone(),
        n: model.rank(),
        generators: model
            .lattice
            .generator_images()
            .iter()
            .map(|g| g.to_i64_rows().expect("small entries"))
            .collect(),
        blocks: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelSource {
    Builtin(String),
    File(PathBuf),
}

impl ModelSource {
    pub fn parse(s: &str) -> Self {
        if models::BUILTIN_NAMES.iter().any(|b| b.eq_ignore_ascii_case(s)) {
            ModelSource::Builtin(s.to_ascii_uppercase())
        } else {
            ModelSource::File(PathBuf::from(s))
        }
    }

    pub fn load(&self) -> CliResult<OrbifoldModel> {
        match self {
            ModelSource::Builtin(name) => models::builtin(name).ok_or_else(|| CliError::Usage(format!("unknown model {name}"))),
            ModelSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                parse_input(&text)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Cohomology,
    Verify,
    Gerbes,
    FixedPoints,
    Classes,
    Abelianization,
    Compat,
    BrownCheck,
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "cohomology" => Command::Cohomology,
            "verify" => Command::Verify,
            "gerbes" => Command::Gerbes,
            "fixed-points" => Command::FixedPoints,
            "classes" => Command::Classes,
            "abelianization" => Command::Abelianization,
            "compat" => Command::Compat,
            "brown-check" => Command::BrownCheck,
            other => return Err(CliError::Usage(format!("unknown command {other}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Coefficients {
    Integers,
    Prime(u64),
}

impl FromStr for Coefficients {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        if s == "Z" {
            return Ok(Coefficients::Integers);
        }
        let p = s
            .strip_prefix('F')
            .and_then(|p| p.parse::<u64>().ok())
            .ok_or_else(|| CliError::Usage(format!("coefficients must be Z or F<p>, got {s}")))?;
        if !orbicoh::linalg::is_prime(p) {
            return Err(CliError::Usage(format!("{p} is not a prime")));
        }
        Ok(Coefficients::Prime(p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(CliError::Usage(format!("unknown format {other}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct JobSpec {
    pub model: ModelSource,
    pub command: Command,
    pub max_degree: Option<usize>,
    pub coefficients: Coefficients,
    pub force: bool,
    pub verify: bool,
    pub resolution: ResolutionChoice,
    pub action_source: ActionSource,
    pub subgroup: Option<String>,
    pub prime: u64,
    pub degree: Option<usize>,
    pub matrix: Option<Vec<Vec<i64>>>,
}

impl JobSpec {
    pub fn new(model: ModelSource, command: Command) -> Self {
        JobSpec {
            model,
            command,
            max_degree: None,
            coefficients: Coefficients::Integers,
            force: false,
            verify: false,
            resolution: ResolutionChoice::Auto,
            action_source: ActionSource::Catalog,
            subgroup: None,
            prime: 2,
            degree: None,
            matrix: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelEcho {
    pub name: Option<String>,
    pub n: usize,
    pub group_order: usize,
    pub generators: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub input: JobSpec,
    pub model: ModelEcho,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub text: Vec<String>,
    pub timing_ms: f64,
}

/// Default top degree: 8 for cyclic groups and products of cyclic groups, 4 otherwise.
pub fn default_max_degree(model: &OrbifoldModel) -> usize {
    match model.lattice.group().kind() {
        GroupKind::Trivial | GroupKind::Cyclic(_) => 8,
        GroupKind::Abelian if model.lattice.group().cyclic_decomposition().is_some() => 8,
        _ => 4,
    }
}

/// Parses comma-separated words in the generators, e.g. `t^2` or `t1*t2^-1, t3`.
/// A single generator is called `t`; several are `t1, t2, …`.
pub fn parse_subgroup(group: &FiniteMatrixGroup, words: &str) -> CliResult<Subgroup> {
    let gens = group.generator_indices();
    let mut elements = Vec::new();
    for word in words.split(',') {
        let word = word.trim();
        let mut x = group.identity();
        if word.is_empty() {
            return Err(CliError::Usage("empty subgroup word".into()));
        }
        for factor in word.split('*') {
            let factor = factor.trim();
            if factor == "e" || factor == "1" {
                continue;
            }
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (
                    n.trim(),
                    e.trim()
                        .parse::<i64>()
                        .map_err(|_| CliError::Usage(format!("bad exponent in {factor}")))?,
                ),
                None => (factor, 1),
            };
            let idx = match name.strip_prefix('t') {
                Some("") if gens.len() == 1 => 0,
                Some(i) => i
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i >= 1 && i <= gens.len())
                    .map(|i| i - 1)
                    .ok_or_else(|| CliError::Usage(format!("unknown generator {name}")))?,
                None => return Err(CliError::Usage(format!("unknown generator {name}"))),
            };
            let g = gens[idx];
            let base = if exp < 0 { group.inv(g) } else { g };
            x = group.mul(x, group.pow(base, exp.unsigned_abs()));
        }
        elements.push(x);
    }
    Ok(group.subgroup_generated(&elements))
}

fn echo(model: &OrbifoldModel) -> ModelEcho {
    let doc = emit_model(model);
    ModelEcho {
        name: doc.name,
        n: doc.n,
        group_order: model.group_order(),
        generators: doc.generators,
    }
}

struct Output {
    results: Value,
    certificate: Option<Certificate>,
    warnings: Vec<String>,
    text: Vec<String>,
}

pub fn run_command(spec: &JobSpec) -> CliResult<ReportDocument> {
    let start = Instant::now();
    let model = spec.model.load()?;
    let out = dispatch(spec, &model)?;
    Ok(ReportDocument {
        input: spec.clone(),
        model: echo(&model),
        results: out.results,
        certificate: out.certificate,
        warnings: out.warnings,
        text: out.text,
        timing_ms: start.elapsed().as_secs_f64() * 1000.0,
    })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn dispatch(spec: &JobSpec, model: &OrbifoldModel) -> CliResult<Output> {
    let total_complex = spec.command == Command::Verify
        || (spec.command == Command::Cohomology && (spec.verify || spec.coefficients != Coefficients::Integers));
    let max_degree = match spec.max_degree {
        Some(k) => k,
        // the total complex needs the bar resolution one degree higher
        None if total_complex && default_max_degree(model) == 4 => 3,
        None => default_max_degree(model),
    };
    let mut text = Vec::new();
    let mut warnings = Vec::new();
    let mut certificate = None;
    let results = match spec.command {
        Command::Cohomology => match spec.coefficients {
            Coefficients::Integers if !spec.verify => {
                let e2 = e2_assembly_with(&model.lattice, max_degree, spec.force, spec.resolution)?;
                warnings.extend(e2.warnings.iter().cloned());
                for (k, h) in e2.totals.iter().enumerate() {
                    text.push(format!("H^{k} = {h}"));
                }
                json!({
                    "resolution": e2.resolution,
                    "hypothesis_verified": e2.hypothesis_verified,
                    "degrees": e2.totals.iter().enumerate()
                        .map(|(k, h)| json!({"degree": k, "group": h}))
                        .collect::<Vec<_>>(),
                    "grid": e2.page.grid,
                })
            }
            Coefficients::Integers => {
                let r = verify(spec, model, max_degree, &mut text, &mut warnings)?;
                certificate = Some(r.0);
                r.1
            }
            Coefficients::Prime(p) => {
                let action = certified_action_with(&model.lattice, spec.action_source)?;
                let res = resolution_for(model.lattice.group().clone(), max_degree + 1, 1, spec.resolution)?;
                let dims = TotalComplex::build(&action, &res, max_degree)?.cohomology_mod_p(p)?;
                for (k, d) in dims.iter().enumerate().take(max_degree + 1) {
                    text.push(format!("dim H^{k}(F{p}) = {d}"));
                }
                certificate = Some(action.verify());
                json!({
                    "prime": p,
                    "degrees": dims.iter().enumerate().take(max_degree + 1)
                        .map(|(k, d)| json!({"degree": k, "dimension": d}))
                        .collect::<Vec<_>>(),
                })
            }
        },
        Command::Verify => {
            let r = verify(spec, model, max_degree, &mut text, &mut warnings)?;
            certificate = Some(r.0);
            r.1
        }
        Command::Gerbes => {
            let gb = gerbe_groups(model)?;
            warnings.extend(gb.warnings.iter().cloned());
            text.push(format!("H^2 = {}", gb.h2));
            text.push(format!("H^3 = {}", gb.h3));
            text.push(format!("FGb = {}", gb.flat));
            text.push(format!("Gb = {}", gb.gerbes));
            json!({
                "h2": gb.h2,
                "h3": gb.h3,
                "flat": {"r": gb.flat.r, "torsion": gb.flat.torsion, "display": gb.flat.to_string()},
                "gerbes": gb.gerbes,
            })
        }
        Command::FixedPoints => {
            let group = model.lattice.group();
            let q = match &spec.subgroup {
                Some(w) => parse_subgroup(group, w)?,
                None => group.whole(),
            };
            let r = fixed_points(model, &q)?;
            text.push(format!("|Q| = {}", q.order()));
            text.push(format!("H^1(Q, M) = {}", r.h1));
            text.push(format!("components = {}", r.component_count));
            text.push(format!("dimension = {}", r.component_dimension));
            to_value(&r)
        }
        Command::Classes => {
            let r = order_p_subgroup_classes(model, spec.prime)?;
            for c in &r.subgroup_classes {
                text.push(format!(
                    "Q = <g{}> ({} conjugates, |N(Q)| = {}): H^1(Q, M) = {}, rank M^Q = {}, {} classes",
                    c.generator,
                    c.conjugates,
                    c.normalizer_order,
                    c.h1,
                    c.invariant_rank,
                    c.orbits.len()
                ));
                for o in &c.orbits {
                    text.push(format!(
                        "  orbit of size {} at {:?}: normalizer {}",
                        o.size, o.representative, o.fingerprint
                    ));
                }
            }
            for (f, k) in &r.by_fingerprint {
                text.push(format!("{f}: {k}"));
            }
            text.push(format!("total = {}", r.total_classes));
            to_value(&r)
        }
        Command::Abelianization => {
            let ab = abelianization(model);
            text.push(format!("Gamma_ab = {ab}"));
            json!({
                "coinvariants": model.lattice.coinvariants(),
                "group": model.lattice.group().abelianization(),
                "abelianization": ab,
            })
        }
        Command::Compat => {
            let action = match &spec.matrix {
                Some(rows) => {
                    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
                        return Err(CliError::Malformed("--matrix: expected a 2x2 matrix".into()));
                    }
                    solve_rank2(&IntMatrix::from_rows(rows))?
                }
                None => certified_action_with(&model.lattice, spec.action_source)?,
            };
            let cert = action.verify();
            text.push(format!("source = {}", action.source()));
            text.push(format!("verified = {}", cert.verified));
            text.push(format!("pairs checked = {}", cert.pairs_checked));
            for w in &cert.witnesses {
                text.push(format!("witness: {w:?}"));
            }
            certificate = Some(cert);
            json!({"source": action.source(), "group_order": action.group().order(), "rank": action.n()})
        }
        Command::BrownCheck => {
            let degrees = match spec.degree {
                Some(i) => vec![i],
                None => vec![7, 8, 9],
            };
            let mut reports = Vec::new();
            for i in degrees {
                let r = brown_stable_check(model, i)?;
                text.push(format!(
                    "H^{i}: {} | [{}]^6 + [{}]^4 = {} | {}",
                    r.left,
                    r.trivial_part,
                    r.rotation_part,
                    r.right,
                    if r.agree { "agree" } else { "DIFFER" }
                ));
                reports.push(r);
            }
            to_value(&reports)
        }
    };
    Ok(Output {
        results,
        certificate,
        warnings,
        text,
    })
}

fn verify(
    spec: &JobSpec,
    model: &OrbifoldModel,
    max_degree: usize,
    text: &mut Vec<String>,
    warnings: &mut Vec<String>,
) -> CliResult<(Certificate, Value)> {
    let e2 = e2_assembly_with(&model.lattice, max_degree, spec.force, spec.resolution)?;
    let action = certified_action_with(&model.lattice, spec.action_source)?;
    let r = collapse_verify_with(&e2, &action)?;
    warnings.extend(r.warnings.iter().cloned());
    for d in &r.degrees {
        let total = d.total.as_ref().map(ToString::to_string).unwrap_or_else(|| "-".into());
        text.push(format!(
            "H^{} = {} | total complex {} | {}",
            d.degree,
            d.e2,
            total,
            if d.agree { "agree" } else { "DIFFER" }
        ));
    }
    text.push(format!("action = {}", r.action_source));
    Ok((r.certificate.clone(), to_value(&r.degrees)))
}

/// Renders a report; the timing block appears only in JSON.
pub fn emit_report(doc: &ReportDocument, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(doc).expect("serializable") + "\n",
        Format::Text => {
            let mut s = String::new();
            let name = doc.model.name.as_deref().unwrap_or("model");
            let _ = writeln!(s, "# {name}: rank {}, |G| = {}", doc.model.n, doc.model.group_order);
            for line in &doc.text {
                let _ = writeln!(s, "{line}");
            }
            for w in &doc.warnings {
                let _ = writeln!(s, "warning: {w}");
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_builtin() {
        for name in models::BUILTIN_NAMES {
            let m = models::builtin(name).unwrap();
            let doc = emit_model(&m);
            let text = serde_json::to_string(&doc).unwrap();
            let back = parse_input(&text).unwrap();
            assert!(back.same_action(&m));
            assert_eq!(emit_model(&back), doc);
        }
    }

    #[test]
    fn input_errors() {
        let shear = r#"{"n": 2, "generators": [[[1, 1], [0, 1]]]}"#;
        let e = parse_input(shear).unwrap_err();
        assert!(matches!(&e, CliError::BoundExceeded { pointer, .. } if pointer == "generators[0]"));
        assert_eq!(e.exit_code(), 2);
        let singular = r#"{"n": 2, "generators": [[[-1, 0], [0, 1]], [[2, 0], [0, 1]]]}"#;
        assert!(matches!(parse_input(singular), Err(CliError::NotUnimodular { pointer, .. }) if pointer == "generators[1]"));
        assert!(matches!(parse_input("{\"n\": 2}"), Err(CliError::Malformed(_))));
    }

    #[test]
    fn subgroup_words() {
        let y1 = models::y1();
        let g = y1.lattice.group();
        assert_eq!(parse_subgroup(g, "t^2").unwrap().order(), 2);
        assert_eq!(parse_subgroup(g, "t^-1").unwrap().order(), 4);
        let y2 = models::y2();
        let g = y2.lattice.group();
        assert_eq!(parse_subgroup(g, "t1*t2").unwrap().order(), 2);
        assert_eq!(parse_subgroup(g, "t1, t2").unwrap().order(), 4);
        assert!(parse_subgroup(g, "t3").is_err());
    }
}
