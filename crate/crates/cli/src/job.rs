//! Runs a validated job: build the surface family, then export and report.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use semidiscrete::curvature::WeingartenRelation;
use semidiscrete::curved::{integrate_frame, lift_surface, parallel_curved, LWParams, LiftedPair};
use semidiscrete::flat::{build_minmax, parallel_flat};
use semidiscrete::holo::HoloNet;
use semidiscrete::singularity::{adjacency_check, classify_vertex, AdjacencyKind, DirClass};
use semidiscrete::surface::Epsilon;
use semidiscrete::{Ambient, Mat2C, OdeSettings, SemiDiscreteSurface, Sheet, Vec4};

use crate::config::{validate, Family, Job, JobConfig};
use crate::error::{numerical, JobError};
use crate::mesh::{build_mesh, to_obj, to_ply, Mesh};
use crate::report::{
    curvature_csv, fnum, singularity_csv, summary_text, weingarten_csv, weingarten_row, AdjacencyResult, EdgeTests,
    MemberSummary, SingularityCounts, ThetaCheck, WeingartenRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    /// Raw sample tables of every family member.
    Generate,
    /// Curvature, singularity and Weingarten reports plus the summary.
    Analyze,
    /// Meshes and reports for the whole θ-family.
    Parallel,
    /// Meshes only.
    Export,
}

impl Verb {
    fn meshes(self) -> bool {
        matches!(self, Verb::Parallel | Verb::Export)
    }

    fn reports(self) -> bool {
        matches!(self, Verb::Parallel | Verb::Analyze)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobOutcome {
    /// Final paths of every artifact, in write order.
    pub artifacts: Vec<PathBuf>,
    pub members: Vec<MemberSummary>,
    pub adjacency: Vec<AdjacencyResult>,
    pub summary: Option<String>,
}

/// Writes files atomically and remembers them so a failed job can be
/// quarantined.
struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self, JobError> {
        fs::create_dir_all(dir).map_err(|e| JobError::io(dir, e))?;
        Ok(Artifacts { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), JobError> {
        let tmp = self.dir.join(format!(".{name}.tmp"));
        let dest = self.dir.join(name);
        let mut f = fs::File::create(&tmp).map_err(|e| JobError::io(&tmp, e))?;
        f.write_all(bytes).and_then(|_| f.sync_all()).map_err(|e| JobError::io(&tmp, e))?;
        fs::rename(&tmp, &dest).map_err(|e| JobError::io(&dest, e))?;
        self.written.push(dest);
        Ok(())
    }

    /// Moves every artifact of this run to `<name>.quarantine`.
    fn quarantine(&self) {
        for p in &self.written {
            let mut q = p.clone().into_os_string();
            q.push(".quarantine");
            let _ = fs::rename(p, q);
        }
    }
}

struct Member {
    theta: f64,
    s_theta: Option<f64>,
    surface: SemiDiscreteSurface,
    relation: WeingartenRelation,
    tests: EdgeTests,
    stem: String,
}

pub fn member_stem(name: &str, theta: f64) -> String {
    format!("{name}_theta{theta:.4}")
}

fn lift(net: &HoloNet, params: LWParams, lambda: f64, solver: &OdeSettings) -> Result<LiftedPair, JobError> {
    let frame = integrate_frame(net, lambda, Mat2C::identity(), solver).map_err(numerical)?;
    lift_surface(&frame, params).map_err(numerical)
}

fn build_members(job: &Job) -> Result<Vec<Member>, JobError> {
    let cfg = &job.config;
    let thetas = &cfg.family.theta;
    let stem = |th: f64| member_stem(&cfg.output.name, th);
    let mut out = Vec::with_capacity(thetas.len());
    match job.family {
        Family::MinMax(eps) => {
            let base = build_minmax(&job.net, eps, Vec4::ZERO, &job.solver).map_err(numerical)?;
            for &th in thetas {
                let surface = if th == 0.0 { base.clone() } else { parallel_flat(&base, th).map_err(numerical)? };
                let relation = if th == 0.0 { WeingartenRelation::MinMax } else { WeingartenRelation::ParallelFlat(th) };
                let tests = match (eps, th == 0.0) {
                    (Epsilon::Plus, _) => EdgeTests::None,
                    (Epsilon::Minus, true) => EdgeTests::Maximal,
                    (Epsilon::Minus, false) => EdgeTests::TangentPlane,
                };
                out.push(Member { theta: th, s_theta: None, surface, relation, tests, stem: stem(th) });
            }
        }
        Family::BrLW { params, lambda } | Family::BiLW { params, lambda } => {
            let bryant = matches!(job.family, Family::BrLW { .. });
            let base = lift(&job.net, params, lambda, &job.solver)?;
            for &th in thetas {
                let pair = if th == 0.0 { base.clone() } else { parallel_curved(&base, th) };
                let st = pair.params.s;
                let (surface, relation, tests) = if bryant {
                    let rel = if th == 0.0 { WeingartenRelation::BrLW(st) } else { WeingartenRelation::ParallelCurved(st) };
                    (pair.x, rel, EdgeTests::None)
                } else {
                    let tests = if th == 0.0 && params.is_cmc1() { EdgeTests::Cmc1 } else { EdgeTests::TangentPlane };
                    (pair.n, WeingartenRelation::BiLW(st), tests)
                };
                out.push(Member { theta: th, s_theta: Some(st), surface, relation, tests, stem: stem(th) });
            }
        }
    }
    Ok(out)
}

fn constraint_residual(s: &SemiDiscreteSurface) -> f64 {
    match s.ambient {
        Ambient::H3 => s.norm_residual(&s.x, -1.0).max(s.orthogonality_residual()),
        Ambient::S21 => s.norm_residual(&s.x, 1.0).max(s.orthogonality_residual()),
        Ambient::R3 => s.norm_residual(&s.n, 1.0),
        Ambient::R21 => s.norm_residual(&s.n, -1.0),
    }
}

fn samples_csv(s: &SemiDiscreteSurface) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["k", "t", "piece", "sheet", "x1", "x2", "x3", "x4", "n1", "n2", "n3", "n4"];
    w.write_record(header).expect("in-memory csv");
    for i in 0..s.strips() {
        for j in 0..s.samples() {
            let sheet = match s.sheet(i, j) {
                Some(Sheet::Plus) => "+",
                Some(Sheet::Minus) => "-",
                None => "",
            };
            let mut row = vec![
                s.grid.k(i).to_string(),
                fnum(s.grid.t(j)),
                s.piece[s.idx(i, j)].to_string(),
                sheet.to_string(),
            ];
            row.extend(s.x(i, j).0.iter().chain(s.n(i, j).0.iter()).map(|v| fnum(*v)));
            w.write_record(&row).expect("in-memory csv");
        }
    }
    w.into_inner().expect("in-memory csv")
}

fn discrete_fps_everywhere(surfaces: &[&SemiDiscreteSurface], i: usize, j: usize, thr: f64) -> bool {
    surfaces
        .iter()
        .all(|s| classify_vertex(s, i, j, thr).is_ok_and(|vc| vc.discrete_dir == DirClass::Fps))
}

fn adjacency(name: &'static str, surfaces: &[&SemiDiscreteSurface], kind: AdjacencyKind, thr: f64) -> AdjacencyResult {
    let first = surfaces[0];
    let mut singular = 0;
    for i in 1..first.strips().saturating_sub(1) {
        for j in 0..first.samples() {
            singular += discrete_fps_everywhere(surfaces, i, j, thr) as usize;
        }
    }
    match adjacency_check(surfaces, kind, thr) {
        Ok(v) => AdjacencyResult { name, singular_vertices: singular, violations: v.len(), error: None },
        Err(e) => AdjacencyResult { name, singular_vertices: singular, violations: 0, error: Some(e.to_string()) },
    }
}

fn adjacency_checks(job: &Job, members: &[Member]) -> Result<Vec<AdjacencyResult>, JobError> {
    let thr = job.config.tolerances.inf_threshold;
    let mut out = Vec::new();
    match job.family {
        Family::MinMax(Epsilon::Minus) => {
            let base = match members.iter().find(|m| m.theta == 0.0) {
                Some(m) => m.surface.clone(),
                None => build_minmax(&job.net, Epsilon::Minus, Vec4::ZERO, &job.solver).map_err(numerical)?,
            };
            out.push(adjacency("maximal-surface adjacency (singular vertex next to singular edge)", &[&base], AdjacencyKind::MaximalEdges, thr));
        }
        Family::BrLW { params, .. } | Family::BiLW { params, .. } if params.is_cmc1() => {
            let sweep = &job.config.tolerances.lambda_sweep;
            if !sweep.is_empty() {
                let pairs = sweep
                    .iter()
                    .map(|&l| lift(&job.net, params, l, &job.solver))
                    .collect::<Result<Vec<_>, _>>()?;
                let surfaces: Vec<&SemiDiscreteSurface> = pairs.iter().map(|p| &p.n).collect();
                out.push(adjacency("CMC 1 adjacency over the lambda sweep", &surfaces, AdjacencyKind::Cmc1Sweep, thr));
            }
        }
        _ => {}
    }
    Ok(out)
}

struct MemberOutput {
    summary: MemberSummary,
    mesh: Option<Mesh>,
    curvature: Option<Vec<u8>>,
    singularity: Option<Vec<u8>>,
}

fn process_member(job: &Job, m: &Member, verb: Verb) -> Result<MemberOutput, JobError> {
    let cfg = &job.config;
    let tol = &cfg.tolerances;
    let thr = tol.inf_threshold;
    let theta_check = match job.family {
        Family::MinMax(eps) => Some(ThetaCheck { net: &job.net, eps, theta: m.theta }),
        _ => None,
    };
    // The mesh and the reports only read the surface; build them side by side.
    let (mesh, reports) = std::thread::scope(|scope| {
        let mesh = verb.meshes().then(|| scope.spawn(|| build_mesh(&m.surface, tol.constraint, thr)));
        let reports = verb.reports().then(|| {
            let curvature = cfg.analyses.curvature.then(|| curvature_csv(&m.surface));
            let singularity = cfg
                .analyses
                .singularity
                .then(|| singularity_csv(&m.surface, &job.net, m.tests, theta_check, thr));
            let weingarten = cfg
                .analyses
                .weingarten
                .then(|| weingarten_row(&m.surface, m.relation, m.theta, m.s_theta, tol.weingarten));
            (curvature, singularity, weingarten)
        });
        (mesh.map(|h| h.join().expect("mesh thread panicked")), reports)
    });
    let mesh = mesh.transpose().map_err(|e| numerical(format!("export of {}: {e}", m.stem)))?;
    let (curvature, singularity, weingarten) = reports.unwrap_or((None, None, None));
    let (singularity, counts): (Option<Vec<u8>>, Option<SingularityCounts>) = match singularity {
        Some((bytes, c)) => (Some(bytes), Some(c)),
        None => (None, None),
    };
    let summary = MemberSummary {
        theta: m.theta,
        s_theta: m.s_theta,
        ambient: m.surface.ambient,
        stem: m.stem.clone(),
        vertices: m.surface.x.len(),
        faces: mesh.as_ref().map(|mm| mm.faces.len()),
        counts,
        weingarten,
        constraint_residual: constraint_residual(&m.surface),
    };
    Ok(MemberOutput { summary, mesh, curvature, singularity })
}

fn grid_line(net: &HoloNet) -> String {
    let g = net.grid();
    format!(
        "k = {}..={} ({} strips), t in [{}, {}], h = {} ({} samples)",
        g.k_min,
        g.k_max,
        g.strips(),
        g.t_min,
        g.t_max,
        g.h,
        g.samples()
    )
}

fn execute(job: &Job, verb: Verb, out: &mut Artifacts) -> Result<JobOutcome, JobError> {
    let cfg = &job.config;
    let members = build_members(job)?;
    let mut summaries = Vec::with_capacity(members.len());
    let mut weingarten: Vec<WeingartenRow> = Vec::new();
    for m in &members {
        if verb == Verb::Generate {
            out.write(&format!("{}.samples.csv", m.stem), &samples_csv(&m.surface))?;
            continue;
        }
        let res = process_member(job, m, verb)?;
        if let Some(mesh) = &res.mesh {
            if cfg.output.obj {
                out.write(&format!("{}.obj", m.stem), to_obj(mesh).as_bytes())?;
            }
            if cfg.output.ply {
                out.write(&format!("{}.ply", m.stem), to_ply(mesh).as_bytes())?;
            }
        }
        if let Some(bytes) = &res.curvature {
            out.write(&format!("{}.curvature.csv", m.stem), bytes)?;
        }
        if let Some(bytes) = &res.singularity {
            out.write(&format!("{}.singularity.csv", m.stem), bytes)?;
        }
        if let Some(w) = &res.summary.weingarten {
            weingarten.push(w.clone());
        }
        summaries.push(res.summary);
    }
    let mut adjacency = Vec::new();
    let mut summary = None;
    if verb.reports() {
        if cfg.analyses.singularity {
            adjacency = adjacency_checks(job, &members)?;
        }
        if cfg.analyses.weingarten {
            out.write(&format!("{}.weingarten.csv", cfg.output.name), &weingarten_csv(&weingarten))?;
        }
        let text = summary_text(&job.family.describe(), &grid_line(&job.net), &summaries, &adjacency);
        out.write(&format!("{}.summary.txt", cfg.output.name), text.as_bytes())?;
        summary = Some(text);
    }
    Ok(JobOutcome { artifacts: out.written.clone(), members: summaries, adjacency, summary })
}

/// Validates, computes and writes. On failure after validation, every file
/// written so far is renamed with a `.quarantine` suffix.
pub fn run_job(config: &JobConfig, verb: Verb) -> Result<JobOutcome, JobError> {
    let job = validate(config)?;
    let mut out = Artifacts::new(&config.output.dir)?;
    match execute(&job, verb, &mut out) {
        Ok(o) => Ok(o),
        Err(e) => {
            out.quarantine();
            Err(e)
        }
    }
}
