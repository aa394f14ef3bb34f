//! Reproducible experiment runs writing their results into an output
//! directory.
//!
//! Exit codes: `0` success, `2` invalid input or configuration, `3` a
//! computation that failed. Errors render as a JSON object for stderr.

pub mod config;
pub mod slice;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::builders::{build_polytope, lf_vertices, lhv_vertices, ns_hrep, ns_vertices, BuildError, PolytopeKind};
use crate::geometry::repr::{read_facets, write_facets, write_vertices};
use crate::geometry::{lp_membership, GeometryError, HRepresentation, RationalVector, VRepresentation};
use crate::quantum::{
    closed_form_threshold, equatorial_strategy, mu_sweep, numeric_threshold, rho_mu, seesaw_maximize,
    white_noise_tolerance, write_sweep_csv, behavior_from_strategy, QuantumError,
};
use crate::scenario::io::{behavior_to_json, parse_behavior, parse_inequality, LoadedBehavior};
use crate::scenario::{library, promote_to_rational, Inequality, Scenario, ScenarioError};
use crate::symmetry::{canonical_form, classify, name_orbits, relabeling_group, FacetClass, SymmetryError};

pub use config::RunConfig;
pub use slice::{slice_grid, write_slice_csv, SlicePlane, SliceRow};

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Computation(String),
}

impl WorkbenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 2,
            Self::Computation(_) => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        let kind = match self {
            Self::Validation(_) => "validation",
            Self::Computation(_) => "computation",
        };
        json!({ "error": kind, "code": self.exit_code(), "message": self.to_string() })
    }
}

impl From<std::io::Error> for WorkbenchError {
    fn from(e: std::io::Error) -> Self {
        Self::Computation(format!("i/o: {e}"))
    }
}

impl From<ScenarioError> for WorkbenchError {
    fn from(e: ScenarioError) -> Self {
        Self::Validation(e.to_string())
    }
}

impl From<GeometryError> for WorkbenchError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Parse(_) | GeometryError::DimensionMismatch { .. } => Self::Validation(e.to_string()),
            _ => Self::Computation(e.to_string()),
        }
    }
}

impl From<BuildError> for WorkbenchError {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Scenario(_) | BuildError::TooFewSettings => Self::Validation(e.to_string()),
            _ => Self::Computation(e.to_string()),
        }
    }
}

impl From<SymmetryError> for WorkbenchError {
    fn from(e: SymmetryError) -> Self {
        match e {
            SymmetryError::UnmatchedFacet { .. } => Self::Computation(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

impl From<QuantumError> for WorkbenchError {
    fn from(e: QuantumError) -> Self {
        match e {
            QuantumError::OutOfRange(_) | QuantumError::DimensionMismatch(_) | QuantumError::Scenario(_) => {
                Self::Validation(e.to_string())
            }
            _ => Self::Computation(e.to_string()),
        }
    }
}

/// What a run reports on stdout: a JSON summary and, for some runs, a table.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub summary: Value,
    pub table: Option<String>,
}

impl RunOutput {
    fn json(summary: Value) -> Self {
        Self { summary, table: None }
    }
}

fn out_dir(cfg: &RunConfig) -> Result<&Path, WorkbenchError> {
    fs::create_dir_all(&cfg.out)?;
    Ok(&cfg.out)
}

fn write_json(path: &Path, v: &Value) -> Result<(), WorkbenchError> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, v).map_err(|e| WorkbenchError::Computation(e.to_string()))?;
    writeln!(f)?;
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn vertices_of(kind: PolytopeKind, s: Scenario, cap: usize) -> Result<VRepresentation, WorkbenchError> {
    let v = match kind {
        PolytopeKind::Lhv => lhv_vertices(s),
        PolytopeKind::Ns => ns_vertices(s)?,
        PolytopeKind::Lf => lf_vertices(s)?.vrep,
    };
    if v.len() > cap {
        return Err(BuildError::CapExceeded { kind, scenario: s, count: v.len(), cap }.into());
    }
    Ok(v)
}

fn facets_of(kind: PolytopeKind, s: Scenario, cap: usize) -> Result<HRepresentation, WorkbenchError> {
    Ok(match kind {
        PolytopeKind::Ns => ns_hrep(s),
        _ => build_polytope(kind, s, cap)?.facets,
    })
}

fn load_facets(path: &Path) -> Result<HRepresentation, WorkbenchError> {
    let f = File::open(path)
        .map_err(|e| WorkbenchError::Validation(format!("cannot open {}: {e}", path.display())))?;
    read_facets(BufReader::new(f)).map_err(|e| WorkbenchError::Validation(format!("{}: {e}", path.display())))
}

/// Named inequalities used to label facets and separators.
fn known_inequalities() -> Vec<Inequality> {
    let mut v = library::lf_facet_classes();
    v.push(library::bell_non_lf());
    v
}

/// Label of the named inequality equivalent to `ineq`, if any.
fn known_class(ineq: &Inequality) -> Option<String> {
    let group = relabeling_group(ineq.scenario());
    let canon = canonical_form(ineq, &group).ok()?;
    known_inequalities().into_iter().find_map(|k| {
        let kc = canonical_form(&k, &group).ok()?;
        (kc.coefficient_key() == canon.coefficient_key() && kc.bound == canon.bound).then_some(k.label)
    })
}

/// Vertices, facets and a manifest with content hashes.
pub fn run_enumerate(cfg: &RunConfig) -> Result<RunOutput, WorkbenchError> {
    cfg.validate()?;
    let dir = out_dir(cfg)?;
    let p = build_polytope(cfg.model, cfg.scenario, cfg.vertex_cap)?;
    let mut vbytes = Vec::new();
    write_vertices(&mut vbytes, &p.vertices.sorted())?;
    let mut fbytes = Vec::new();
    write_facets(&mut fbytes, &p.facets)?;
    fs::write(dir.join("vertices.jsonl"), &vbytes)?;
    fs::write(dir.join("facets.jsonl"), &fbytes)?;
    let mut both = vbytes.clone();
    both.extend(&fbytes);
    let manifest = json!({
        "scenario": [cfg.scenario.settings, cfg.scenario.outcomes],
        "model": cfg.model,
        "dimension": cfg.scenario.cg_dim(),
        "vertices": p.vertices.len(),
        "facets": p.facets.len(),
        "files": {
            "vertices.jsonl": sha256_hex(&vbytes),
            "facets.jsonl": sha256_hex(&fbytes),
        },
        "content_hash": sha256_hex(&both),
    });
    write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(RunOutput::json(manifest))
}

pub fn class_table(classes: &[FacetClass]) -> String {
    let mut out = format!("{:<18} {:>5} {:>12}  {}\n", "class", "bound", "multiplicity", "canonical form");
    for c in classes {
        out.push_str(&format!(
            "{:<18} {:>5} {:>12}  {}\n",
            c.label,
            c.representative.bound,
            c.multiplicity,
            c.representative.pretty()
        ));
    }
    let total: usize = classes.iter().map(|c| c.multiplicity).sum();
    out.push_str(&format!("{:<18} {:>5} {:>12}\n", "total", "", total));
    out
}

/// Sorts a facet file into relabeling classes. With `orbits`, every orbit is
/// listed (named where it matches a known inequality) instead of requiring a
/// match with the nine LF classes.
pub fn run_classify(cfg: &RunConfig, facets: &Path, orbits: bool) -> Result<RunOutput, WorkbenchError> {
    cfg.validate()?;
    let h = load_facets(facets)?;
    let s = Scenario::binary_from_cg_dim(h.dim()).ok_or_else(|| {
        WorkbenchError::Validation(format!("dimension {} is not a two-outcome Collins-Gisin dimension", h.dim()))
    })?;
    let classes = if orbits { name_orbits(&h, s, &known_inequalities())? } else { classify(&h, s)? };
    let dir = out_dir(cfg)?;
    let doc = Value::Array(
        classes
            .iter()
            .map(|c| {
                json!({
                    "label": c.label,
                    "canonical": c.representative,
                    "multiplicity": c.multiplicity,
                    "members": c.members,
                })
            })
            .collect(),
    );
    write_json(&dir.join("classes.json"), &doc)?;
    let table = class_table(&classes);
    fs::write(dir.join("classes.txt"), &table)?;
    let summary = json!({
        "scenario": [s.settings, s.outcomes],
        "facets": h.len(),
        "classes": classes.iter().map(|c| json!({"label": c.label, "multiplicity": c.multiplicity})).collect::<Vec<_>>(),
    });
    Ok(RunOutput { summary, table: Some(table) })
}

/// Membership of a behavior file in the model polytope, with an LP
/// certificate and the most violated facet.
pub fn run_membership(
    cfg: &RunConfig,
    behavior: &Path,
    facets: Option<&Path>,
) -> Result<RunOutput, WorkbenchError> {
    cfg.validate()?;
    let text = fs::read_to_string(behavior)
        .map_err(|e| WorkbenchError::Validation(format!("cannot read {}: {e}", behavior.display())))?;
    let loaded = parse_behavior(&text)?;
    let s = loaded.scenario();
    let (point, radius, deviation) = match &loaded {
        LoadedBehavior::Exact(b) => {
            let ns = b.check_no_signalling();
            if !ns.passed {
                return Err(ScenarioError::NotNoSignalling { deviation: ns.deviation }.into());
            }
            (RationalVector::new(b.to_collins_gisin()?), None, ns.deviation)
        }
        LoadedBehavior::Float(b) => {
            let ns = b.check_no_signalling();
            if !ns.passed {
                return Err(ScenarioError::NotNoSignalling { deviation: ns.deviation }.into());
            }
            let (p, r) = promote_to_rational(b)?;
            (p, Some(r), ns.deviation)
        }
    };
    let v = vertices_of(cfg.model, s, cfg.vertex_cap)?;
    let cert = lp_membership(&point, &v)?;
    if !cert.verify(&point, &v) {
        return Err(WorkbenchError::Computation("membership certificate failed verification".into()));
    }
    let h = match facets {
        Some(p) => load_facets(p)?,
        None => facets_of(cfg.model, s, cfg.vertex_cap)?,
    };
    if h.dim() != point.dim() {
        return Err(WorkbenchError::Validation(format!(
            "facets live in dimension {}, the behavior in {}",
            h.dim(),
            point.dim()
        )));
    }
    let most_violated = h.most_violated(&point).map(|(i, excess)| {
        let row = &h.rows()[i];
        let mut entry = json!({
            "index": i,
            "excess": crate::geometry::rational::format_rational(&excess),
            "excess_f64": crate::geometry::rational::to_f64(&excess),
        });
        if s.outcomes == 2 {
            let ineq = Inequality::from_collins_gisin(row, s.settings, "");
            entry["inequality"] = json!(ineq.pretty());
            entry["class"] = json!(known_class(&ineq));
        }
        entry
    });
    let summary = json!({
        "scenario": [s.settings, s.outcomes],
        "model": cfg.model,
        "verdict": cert.verdict,
        "certificate": cert.to_json(),
        "certificate_verified": true,
        "rounding_radius": radius,
        "no_signalling_deviation": deviation,
        "facets_checked": h.len(),
        "most_violated_facet": most_violated,
    });
    write_json(&out_dir(cfg)?.join("certificate.json"), &summary)?;
    Ok(RunOutput::json(summary))
}

fn mu_tag(mu: f64) -> String {
    format!("mu_{mu:.2}")
}

/// Violation of the five example inequalities along the `ρ_μ` family; also
/// writes the behavior at each `μ` and the violation thresholds.
pub fn run_sweep(cfg: &RunConfig) -> Result<RunOutput, WorkbenchError> {
    cfg.validate()?;
    let dir = out_dir(cfg)?;
    let ineqs = library::sweep_inequalities();
    let rows = mu_sweep(&cfg.angles, &cfg.mus, &ineqs)?;
    write_sweep_csv(BufWriter::new(File::create(dir.join("sweep.csv"))?), &rows)?;
    let bdir = dir.join("behaviors");
    fs::create_dir_all(&bdir)?;
    for &mu in &cfg.mus {
        let b = behavior_from_strategy(&equatorial_strategy(&cfg.angles, rho_mu(mu)?)?)?;
        write_json(&bdir.join(format!("{}.json", mu_tag(mu))), &behavior_to_json(&LoadedBehavior::Float(b)))?;
    }
    let mut thresholds = Vec::new();
    for i in &ineqs {
        thresholds.push(json!({
            "label": i.label,
            "closed_form": closed_form_threshold(&cfg.angles, i),
            "numeric": numeric_threshold(&cfg.angles, i)?,
        }));
    }
    let summary = json!({
        "angles": cfg.angles,
        "rows": rows.len(),
        "thresholds": thresholds,
    });
    write_json(&dir.join("thresholds.json"), &summary)?;
    Ok(RunOutput::json(summary))
}

/// Resolves a library label or a path to an inequality file.
pub fn resolve_inequality(name: &str) -> Result<Inequality, WorkbenchError> {
    if let Some(i) = library::by_label(name) {
        return Ok(i);
    }
    let path = PathBuf::from(name);
    if path.exists() {
        let text = fs::read_to_string(&path)?;
        return Ok(parse_inequality(&text)?);
    }
    Err(WorkbenchError::Validation(format!(
        "unknown inequality {name:?}; known labels: {}",
        library::labels().join(", ")
    )))
}

/// See-saw search with the white-noise tolerance of the best strategy.
pub fn run_seesaw(cfg: &RunConfig) -> Result<RunOutput, WorkbenchError> {
    cfg.validate()?;
    let ineq = resolve_inequality(&cfg.inequality)?;
    let restarts = cfg.restarts_or_default();
    let r = seesaw_maximize(&ineq, cfg.dims.0, cfg.dims.1, restarts, cfg.seed)?;
    let mut report = r.to_json(&ineq);
    report["noise_tolerance"] = match white_noise_tolerance(&r.strategy, &ineq) {
        Ok(n) => json!({ "tolerance": n.tolerance, "noise_value": n.noise_value }),
        Err(QuantumError::NoViolation { .. }) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    write_json(&out_dir(cfg)?.join("seesaw.json"), &report)?;
    Ok(RunOutput::json(report))
}

/// The two-dimensional slice grid with LHV, LF and NS membership.
pub fn run_slice(cfg: &RunConfig) -> Result<RunOutput, WorkbenchError> {
    cfg.validate()?;
    let s = Scenario { settings: 3, outcomes: 2 };
    let plane = SlicePlane::standard(cfg.resolution)?;
    let lhv = facets_of(PolytopeKind::Lhv, s, cfg.vertex_cap)?;
    let lf = facets_of(PolytopeKind::Lf, s, cfg.vertex_cap)?;
    let ns = ns_hrep(s);
    let rows = slice_grid(&plane, &lhv, &lf, &ns);
    let dir = out_dir(cfg)?;
    write_slice_csv(BufWriter::new(File::create(dir.join("slice.csv"))?), &rows)?;
    let count = |f: fn(&SliceRow) -> bool| rows.iter().filter(|r| f(r)).count();
    let summary = json!({
        "resolution": cfg.resolution,
        "points": rows.len(),
        "valid": count(|r| r.valid),
        "in_ns": count(|r| r.in_ns),
        "in_lf": count(|r| r.in_lf),
        "in_lhv": count(|r| r.in_lhv),
        "lf_facets": lf.len(),
        "lhv_facets": lhv.len(),
    });
    Ok(RunOutput::json(summary))
}
