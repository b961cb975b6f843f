//! Run configuration and the m-sweep driver behind the `sweep` subcommand,
//! plus the domain loading shared by the other subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geodesic::fast_march;
use crate::gradient::{solve_gradient_constrained, GradientConfig, GradientProblem};
use crate::io::{read_mesh, write_vertex_columns_csv, write_vtk};
use crate::mesh::TriangleMesh;
use crate::obstacle::{ObstacleProblem, ObstacleSolver, SolveConfig, SolveReport};
use crate::operators::{build_operators, face_gradients, Operators};
use crate::planar::{boundary_distance, build_domain, medial_ground_truth, DomainSpec, PlanarDomain};
use crate::semiconcavity::{
    default_lambda_grid, estimate_semiconcavity, sample_geodesics, torus_grid_eval, MeshInterpolator, SampleSurface,
};
use crate::sets::{
    default_contact_threshold, default_gradient_threshold, elastic_set, ground_truth_cut, hausdorff,
    lambda_elastic_set, ElasticMode, HausdorffReport, RegionLabeling,
};
use crate::surfaces::{flat_torus, icosphere, torus_coords, SurfaceId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    UnitSphere {
        #[serde(default = "default_subdivisions")]
        subdivisions: usize,
    },
    FlatUnitTorus {
        #[serde(default = "default_grid")]
        grid: usize,
    },
    Disk {
        radius: f64,
        h: f64,
    },
    Rectangle {
        length: f64,
        width: f64,
        h: f64,
    },
    /// OFF or intrinsic mesh file; closed meshes need a basepoint, meshes
    /// with boundary must be planar.
    Mesh {
        path: PathBuf,
        basepoint: Option<usize>,
    },
}

fn default_subdivisions() -> usize {
    5
}

fn default_grid() -> usize {
    128
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Contact gap ε_c; default depends on h and m.
    pub contact: Option<f64>,
    /// Gradient slack ε_g; default depends on h.
    pub gradient: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemiconcavityConfig {
    /// Number of sampled geodesics; 0 disables the estimate.
    pub samples: usize,
    pub rho: f64,
    pub max_length: f64,
}

impl Default for SemiconcavityConfig {
    fn default() -> Self {
        SemiconcavityConfig {
            samples: 0,
            rho: std::f64::consts::FRAC_PI_4,
            max_length: 2.0,
        }
    }
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub m: Vec<f64>,
    #[serde(default)]
    pub lambda: Vec<f64>,
    /// Also solve the gradient-constrained problem for every m.
    #[serde(default)]
    pub gradient: bool,
    /// Solve every m independently instead of warm-starting from the
    /// previous one.
    #[serde(default)]
    pub parallel: bool,
    #[serde(default)]
    pub obstacle_solver: SolveConfig,
    #[serde(default)]
    pub gradient_solver: GradientConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub semiconcavity: SemiconcavityConfig,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yes")]
    pub write_fields: bool,
}

/// Command-line values that replace the file's.
#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub m: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub parallel: bool,
    pub gradient: bool,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn apply(mut self, o: RunOverrides) -> Result<Self> {
        if let Some(m) = o.m {
            self.m = m;
        }
        if let Some(l) = o.lambda {
            self.lambda = l;
        }
        if let Some(p) = o.output {
            self.output = p;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        self.parallel |= o.parallel;
        self.gradient |= o.gradient;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m.is_empty() || self.m.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
            return Err(Error::Config("m list must be nonempty and positive".into()));
        }
        if self.m.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("m list must be strictly increasing".into()));
        }
        if self.lambda.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::Config("lambda values must be positive".into()));
        }
        Ok(())
    }
}

/// Source of ground-truth labels.
#[derive(Debug, Clone)]
pub enum Truth {
    Surface(SurfaceId),
    Planar(Box<PlanarDomain>),
    None,
}

/// Mesh, obstacle and ground truth for a configured domain.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub mesh: TriangleMesh,
    /// Distance to the basepoint (closed surfaces) or to the boundary.
    pub obstacle: Vec<f64>,
    pub truth: Truth,
    /// Positions for VTK output (torus parameter coordinates on the grid).
    pub points: Vec<[f64; 3]>,
    /// Torus grid size, when the domain is the flat torus.
    pub torus_grid: Option<usize>,
}

impl Prepared {
    pub fn h(&self) -> f64 {
        match self.torus_grid {
            Some(n) => 1.0 / n as f64,
            None => self.mesh.max_edge_length(),
        }
    }

    pub fn truth_labels(&self, lambda: f64) -> Result<Option<RegionLabeling>> {
        match &self.truth {
            Truth::Surface(s) => ground_truth_cut(*s, lambda, &self.mesh).map(Some),
            Truth::Planar(d) => medial_ground_truth(d, lambda).map(Some),
            Truth::None => Ok(None),
        }
    }
}

pub fn prepare_domain(domain: &DomainConfig) -> Result<Prepared> {
    let closed = |mesh: TriangleMesh, truth: Truth, torus_grid: Option<usize>| -> Result<Prepared> {
        let b = mesh
            .basepoint()
            .ok_or_else(|| invalid("closed mesh needs a basepoint"))?;
        let obstacle = fast_march(&mesh, &[b])?.values;
        let points = match (mesh.positions(), torus_grid) {
            (Some(p), _) => p.to_vec(),
            (None, Some(n)) => (0..mesh.vertex_count())
                .map(|v| {
                    let c = torus_coords(n, v);
                    [c[0], c[1], 0.0]
                })
                .collect(),
            (None, None) => return Err(invalid("intrinsic meshes other than the torus grid cannot be exported")),
        };
        Ok(Prepared {
            mesh,
            obstacle,
            truth,
            points,
            torus_grid,
        })
    };
    let planar = |d: PlanarDomain, with_truth: bool| -> Prepared {
        let obstacle = boundary_distance(&d).values;
        let points = d.points().to_vec();
        let mesh = d.mesh.clone();
        let truth = if with_truth {
            Truth::Planar(Box::new(d))
        } else {
            Truth::None
        };
        Prepared {
            mesh,
            obstacle,
            truth,
            points,
            torus_grid: None,
        }
    };
    match domain {
        DomainConfig::UnitSphere { subdivisions } => {
            if *subdivisions > 8 {
                return Err(invalid("at most 8 subdivisions"));
            }
            closed(icosphere(*subdivisions), Truth::Surface(SurfaceId::UnitSphere), None)
        }
        DomainConfig::FlatUnitTorus { grid } => {
            if *grid < 3 {
                return Err(invalid("torus grid needs at least 3 cells per side"));
            }
            closed(flat_torus(*grid), Truth::Surface(SurfaceId::FlatUnitTorus), Some(*grid))
        }
        DomainConfig::Disk { radius, h } => {
            Ok(planar(build_domain(DomainSpec::Disk { radius: *radius, h: *h })?, true))
        }
        DomainConfig::Rectangle { length, width, h } => Ok(planar(
            build_domain(DomainSpec::Rectangle {
                length: *length,
                width: *width,
                h: *h,
            })?,
            true,
        )),
        DomainConfig::Mesh { path, basepoint } => {
            let mesh = read_mesh(path)?;
            if mesh.has_boundary() {
                Ok(planar(build_domain(DomainSpec::External(mesh))?, false))
            } else {
                let b = basepoint.ok_or_else(|| invalid("closed mesh needs a basepoint"))?;
                closed(mesh.with_basepoint(b)?, Truth::None, None)
            }
        }
    }
}

/// Largest face gradient norm of a vertex field.
pub fn max_face_gradient(mesh: &TriangleMesh, u: &[f64]) -> Result<f64> {
    Ok(face_gradients(mesh, u)?
        .iter()
        .map(|g| (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: f64,
    /// 0 for the elastic set E_m itself.
    pub lambda: f64,
    pub sup_gap: f64,
    pub max_grad: f64,
    pub hausdorff_sym: Option<f64>,
    pub hausdorff_e_to_gt: Option<f64>,
    pub hausdorff_gt_to_e: Option<f64>,
    pub c_hat: Option<f64>,
    pub iters: usize,
    pub converged: bool,
}

pub const SWEEP_HEADER: &str =
    "m,lambda,sup_gap,max_grad,hausdorff_sym,hausdorff_E_to_GT,hausdorff_GT_to_E,C_hat,iters,converged";

impl SweepRow {
    pub fn csv_line(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        format!(
            "{},{},{:e},{:e},{},{},{},{},{},{}",
            self.m,
            self.lambda,
            self.sup_gap,
            self.max_grad,
            opt(self.hausdorff_sym),
            opt(self.hausdorff_e_to_gt),
            opt(self.hausdorff_gt_to_e),
            opt(self.c_hat),
            self.iters,
            self.converged
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstacleSummary {
    pub iterations: usize,
    pub energy: f64,
    pub kkt_infeasibility: f64,
    pub kkt_stationarity: f64,
    pub kkt_complementarity: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradientSummary {
    pub iterations: usize,
    pub energy: f64,
    pub relative_gap: f64,
    pub feasibility: f64,
    pub converged: bool,
    /// Sup-norm distance to the obstacle solution.
    pub equivalence_gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MSolve {
    pub m: f64,
    pub contact_threshold: f64,
    pub gradient_threshold: f64,
    pub obstacle: ObstacleSummary,
    pub gradient: Option<GradientSummary>,
    pub c_hat: Option<f64>,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub vertices: usize,
    pub faces: usize,
    pub h: f64,
    pub solves: Vec<MSolve>,
    pub rows: Vec<SweepRow>,
    pub all_converged: bool,
    pub artifacts: Vec<String>,
}

struct Solved {
    obstacle: SolveReport,
    gradient: Option<crate::gradient::GradientReport>,
}

fn solve_m(
    prep: &Prepared,
    ops: &Operators,
    solver: &ObstacleSolver,
    cfg: &RunConfig,
    m: f64,
    warm: Option<&[f64]>,
) -> Result<Solved> {
    let p = ObstacleProblem::new(&prep.mesh, ops, prep.obstacle.clone(), m)?;
    let obstacle = solver.solve(&p, &cfg.obstacle_solver, warm)?;
    let gradient = if cfg.gradient {
        let g = GradientProblem::new(&prep.mesh, ops, m)?;
        Some(solve_gradient_constrained(&g, &cfg.gradient_solver, Some(&obstacle.u))?)
    } else {
        None
    };
    Ok(Solved { obstacle, gradient })
}

fn one_sided(r: &HausdorffReport) -> (Option<f64>, Option<f64>, Option<f64>) {
    (r.symmetric, r.sup_a_to_b, r.sup_b_to_a)
}

/// Runs the configured sweep, writing `sweep.csv`, `run_report.json` and
/// per-m field files into the output directory.
pub fn run_sweep(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output)?;
    let prep = prepare_domain(&cfg.domain)?;
    let ops = build_operators(&prep.mesh)?;
    let solver = ObstacleSolver::new(&ops)?;
    let h = prep.h();
    let eps_g = cfg.thresholds.gradient.unwrap_or_else(|| default_gradient_threshold(h));

    let samples = match (&prep.truth, cfg.semiconcavity.samples) {
        (_, 0) => None,
        (Truth::Surface(s), n) => {
            let surface = match s {
                SurfaceId::UnitSphere => SampleSurface::UnitSphere,
                SurfaceId::FlatUnitTorus => SampleSurface::FlatUnitTorus,
            };
            Some(sample_geodesics(
                surface,
                n,
                cfg.semiconcavity.max_length,
                cfg.semiconcavity.rho,
                cfg.seed,
            )?)
        }
        _ => {
            log::warn!("semiconcavity sampling is only available on the model surfaces; skipped");
            None
        }
    };
    let interp = match (&samples, prep.torus_grid) {
        (Some(_), None) => Some(MeshInterpolator::new(&prep.mesh)?),
        _ => None,
    };
    let c_hat = |u: &[f64]| -> Result<Option<f64>> {
        let Some(s) = &samples else { return Ok(None) };
        let eval = |p: [f64; 3]| match (&interp, prep.torus_grid) {
            (Some(i), _) => i.eval(u, p),
            (None, Some(n)) => torus_grid_eval(n, u, p),
            (None, None) => unreachable!("interpolator exists for non-grid meshes"),
        };
        Ok(Some(
            estimate_semiconcavity(&eval, s, &default_lambda_grid(), 2.0 * h)?.c_hat,
        ))
    };

    let mut truths = vec![prep.truth_labels(0.0)?];
    for &l in &cfg.lambda {
        truths.push(prep.truth_labels(l)?);
    }

    let csv_path = cfg.output.join("sweep.csv");
    let mut csv = format!("{SWEEP_HEADER}\n");
    fs::write(&csv_path, &csv)?;

    let solved: Vec<Result<Solved>> = if cfg.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = cfg
                .m
                .iter()
                .map(|&m| {
                    let (prep, ops, solver) = (&prep, &ops, &solver);
                    scope.spawn(move || solve_m(prep, ops, solver, cfg, m, None))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("solver thread panicked"))
                .collect()
        })
    } else {
        Vec::new()
    };

    let mut rows = Vec::new();
    let mut solves = Vec::new();
    let mut artifacts = vec!["sweep.csv".to_string(), "run_report.json".to_string()];
    let mut warm: Option<Vec<f64>> = None;
    let mut solved = solved.into_iter();
    for (k, &m) in cfg.m.iter().enumerate() {
        let s = if cfg.parallel {
            solved.next().expect("one result per m")?
        } else {
            solve_m(&prep, &ops, &solver, cfg, m, warm.as_deref())?
        };
        let u = &s.obstacle.u;
        let eps_c = cfg
            .thresholds
            .contact
            .unwrap_or_else(|| default_contact_threshold(h, m));
        let sup_gap = u.iter().zip(&prep.obstacle).map(|(u, d)| d - u).fold(0.0, f64::max);
        let max_grad = max_face_gradient(&prep.mesh, u)?;
        let ch = c_hat(u)?;
        let converged = s.obstacle.converged && s.gradient.as_ref().is_none_or(|g| g.converged);

        let mut labels = vec![(
            "elastic",
            elastic_set(u, &prep.obstacle, &prep.mesh, ElasticMode::ContactGap(eps_c))?,
        )];
        for &l in &cfg.lambda {
            labels.push(("lambda", lambda_elastic_set(u, &prep.mesh, l, eps_g)?));
        }
        for (j, (_, e)) in labels.iter().enumerate() {
            let lambda = if j == 0 { 0.0 } else { cfg.lambda[j - 1] };
            let (sym, e_gt, gt_e) = match &truths[j] {
                Some(gt) if !(e.is_empty() && gt.is_empty()) => one_sided(&hausdorff(&prep.mesh, e, gt)?),
                _ => (None, None, None),
            };
            let row = SweepRow {
                m,
                lambda,
                sup_gap,
                max_grad,
                hausdorff_sym: sym,
                hausdorff_e_to_gt: e_gt,
                hausdorff_gt_to_e: gt_e,
                c_hat: ch,
                iters: s.obstacle.iterations + s.gradient.as_ref().map_or(0, |g| g.iterations),
                converged,
            };
            writeln!(csv, "{}", row.csv_line()).unwrap();
            rows.push(row);
        }
        fs::write(&csv_path, &csv)?;

        let mut m_artifacts = Vec::new();
        if cfg.write_fields {
            let gap: Vec<f64> = u.iter().zip(&prep.obstacle).map(|(u, d)| d - u).collect();
            let mut names = vec!["u".to_string(), "obstacle".to_string(), "gap".to_string()];
            let mut cols: Vec<Vec<f64>> = vec![u.clone(), prep.obstacle.clone(), gap];
            if let Some(g) = &s.gradient {
                names.push("u_gradient".into());
                cols.push(g.u.clone());
            }
            for (j, (_, e)) in labels.iter().enumerate() {
                names.push(if j == 0 {
                    "elastic".into()
                } else {
                    format!("lambda_{}", cfg.lambda[j - 1])
                });
                cols.push(e.as_field());
            }
            let named: Vec<(&str, &[f64])> = names
                .iter()
                .map(String::as_str)
                .zip(cols.iter().map(Vec::as_slice))
                .collect();
            let base = format!("fields_{k:02}_m{m}");
            write_vertex_columns_csv(&cfg.output.join(format!("{base}.csv")), &named)?;
            let vtk_named: Vec<(String, &[f64])> = named
                .iter()
                .map(|(n, v)| (n.replace(|c: char| !c.is_ascii_alphanumeric() && c != '_', "_"), *v))
                .collect();
            let vtk_ref: Vec<(&str, &[f64])> = vtk_named.iter().map(|(n, v)| (n.as_str(), *v)).collect();
            write_vtk(
                &cfg.output.join(format!("{base}.vtk")),
                &prep.mesh,
                Some(&prep.points),
                &vtk_ref,
            )?;
            m_artifacts.push(format!("{base}.csv"));
            m_artifacts.push(format!("{base}.vtk"));
        }
        artifacts.extend(m_artifacts.iter().cloned());

        solves.push(MSolve {
            m,
            contact_threshold: eps_c,
            gradient_threshold: eps_g,
            obstacle: ObstacleSummary {
                iterations: s.obstacle.iterations,
                energy: s.obstacle.energy,
                kkt_infeasibility: s.obstacle.kkt_infeasibility,
                kkt_stationarity: s.obstacle.kkt_stationarity,
                kkt_complementarity: s.obstacle.kkt_complementarity,
                converged: s.obstacle.converged,
            },
            gradient: s.gradient.as_ref().map(|g| GradientSummary {
                iterations: g.iterations,
                energy: g.energy,
                relative_gap: g.relative_gap,
                feasibility: g.feasibility,
                converged: g.converged,
                equivalence_gap: g.u.iter().zip(u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
            }),
            c_hat: ch,
            artifacts: m_artifacts,
        });
        warm = Some(s.obstacle.u);
    }

    let report = RunReport {
        config: cfg.clone(),
        vertices: prep.mesh.vertex_count(),
        faces: prep.mesh.face_count(),
        h,
        all_converged: solves
            .iter()
            .all(|s| s.obstacle.converged && s.gradient.as_ref().is_none_or(|g| g.converged)),
        solves,
        rows,
        artifacts,
    };
    fs::write(
        cfg.output.join("run_report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}

/// Exit codes of the command-line tool.
pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INVALID_INPUT: i32 = 3;
