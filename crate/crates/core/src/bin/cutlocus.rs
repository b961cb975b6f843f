use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cutlocus::cli::{
    max_face_gradient, prepare_domain, run_sweep, DomainConfig, Prepared, RunConfig, RunOverrides, Truth,
    EXIT_INVALID_INPUT, EXIT_NOT_CONVERGED, EXIT_OK,
};
use cutlocus::geodesic::fast_march;
use cutlocus::gradient::{solve_gradient_constrained, GradientConfig, GradientProblem};
use cutlocus::io::{
    read_profile_csv, read_vertex_csv, write_face_csv, write_profile_csv, write_vertex_columns_csv, write_vertex_csv,
    write_vtk,
};
use cutlocus::obstacle::{ObstacleProblem, ObstacleSolver, SolveConfig};
use cutlocus::operators::{build_operators, curvature_info, face_gradients, sufficient_m};
use cutlocus::planar::TorsionMode;
use cutlocus::revolution::{
    counterexample_search, default_dumbbell_family, default_witness_ms, dumbbell_profile, solve_gradient_1d,
    solve_obstacle_1d, sphere_profile, DumbbellParams, RevolutionProfile, Solve1DConfig, DEFAULT_WITNESS_MARGIN,
};
use cutlocus::semiconcavity::{
    basepoint_distance, default_lambda_grid, estimate_semiconcavity, sample_geodesics, torus_grid_eval,
    MeshInterpolator, SampleSurface,
};
use cutlocus::sets::{
    default_contact_threshold, default_gradient_threshold, elastic_set, hausdorff, lambda_elastic_set, ElasticMode,
};
use cutlocus::surfaces::{analytic_vertex_distance, SurfaceId};
use cutlocus::{Error, Result};

#[derive(Parser)]
#[command(
    name = "cutlocus",
    version,
    about = "Cut loci and medial axes from elastic-plastic torsion problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct MeshArgs {
    /// Mesh file (OFF or intrinsic format)
    #[arg(long, conflicts_with = "surface")]
    mesh: Option<PathBuf>,
    /// Model surface: unit_sphere or flat_unit_torus
    #[arg(long)]
    surface: Option<String>,
    /// Icosphere subdivisions
    #[arg(long, default_value_t = 5)]
    subdivisions: usize,
    /// Torus grid cells per side
    #[arg(long, default_value_t = 128)]
    grid: usize,
    /// Basepoint vertex for closed mesh files
    #[arg(long)]
    basepoint: Option<usize>,
}

impl MeshArgs {
    fn domain(&self) -> Result<DomainConfig> {
        match (&self.mesh, &self.surface) {
            (Some(path), _) => Ok(DomainConfig::Mesh {
                path: path.clone(),
                basepoint: self.basepoint,
            }),
            (None, Some(s)) => match s.parse::<SurfaceId>()? {
                SurfaceId::UnitSphere => Ok(DomainConfig::UnitSphere {
                    subdivisions: self.subdivisions,
                }),
                SurfaceId::FlatUnitTorus => Ok(DomainConfig::FlatUnitTorus { grid: self.grid }),
            },
            (None, None) => Err(Error::InvalidArgument("give --mesh or --surface".into())),
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Shape {
    Disk,
    Rectangle,
}

#[derive(Copy, Clone, ValueEnum)]
enum ProfileKind {
    Sphere,
    Dumbbell,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh statistics and curvature summary
    MeshInfo {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, default_value = "out")]
        output: PathBuf,
    },
    /// Geodesic distance from the basepoint or given sources
    Distance {
        #[command(flatten)]
        mesh: MeshArgs,
        /// Source vertices (default: the basepoint)
        #[arg(long, value_delimiter = ',')]
        sources: Vec<usize>,
        #[arg(long, default_value = "out")]
        output: PathBuf,
    },
    /// Obstacle problem u ≤ d
    SolveObstacle {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long)]
        m: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value = "out")]
        output: PathBuf,
    },
    /// Gradient-constrained problem |∇u| ≤ 1
    SolveGradient {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long)]
        m: f64,
        #[arg(long, default_value_t = 1e-7)]
        tol_gap: f64,
        #[arg(long, default_value = "out")]
        output: PathBuf,
    },
    /// Elastic and λ-elastic sets of a vertex field
    Extract {
        #[command(flatten)]
        mesh: MeshArgs,
        /// Vertex CSV of the solution
        #[arg(long)]
        field: PathBuf,
        /// Load parameter used for the default contact threshold
        #[arg(long)]
        m: f64,
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<f64>,
        #[arg(long)]
        contact_threshold: Option<f64>,
        #[arg(long)]
        gradient_threshold: Option<f64>,
        #[arg(long, default_value = "out")]
        output: PathBuf,
    },
    /// m-sweep driven by a TOML configuration
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        lambda: Option<Vec<f64>>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        gradient: bool,
    },
    /// Semiconcavity constant along sampled geodesic chords
    Semiconcavity {
        /// unit_sphere or flat_unit_torus
        #[arg(long, default_value = "unit_sphere")]
        surface: String,
        #[arg(long, default_value_t = 5)]
        subdivisions: usize,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        rho: f64,
        #[arg(long, default_value_t = 2.0)]
        max_length: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Estimate for u_m instead of the exact distance
        #[arg(long)]
        m: Option<f64>,
        #[arg(long, default_value = "out")]
        output: PathBuf,
    },
    /// 1-D problems on surfaces of revolution
    Revsurf {
        #[arg(long, value_enum, default_value = "sphere")]
        profile: ProfileKind,
        /// Profile CSV (t,r) instead of a built-in profile
        #[arg(long)]
        profile_csv: Option<PathBuf>,
        #[arg(long, default_value_t = 2001)]
        nt: usize,
        #[arg(long, default_value_t = 1e-3)]
        neck_r: f64,
        #[arg(long, default_value_t = 1.0)]
        neck_len: f64,
        #[arg(long, default_value_t = 1.0)]
        bulb_r: f64,
        #[arg(long, default_value_t = 2.0)]
        bulb_len: f64,
        #[arg(long, value_delimiter = ',', default_value = "10")]
        m: Vec<f64>,
        /// Run the non-equivalence witness search over the dumbbell family
        #[arg(long)]
        search: bool,
        #[arg(long, default_value = "out")]
        output: PathBuf,
    },
    /// Planar torsion and medial axes
    Euclid {
        #[arg(long, value_enum, default_value = "disk")]
        shape: Shape,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 2.0)]
        length: f64,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        #[arg(long, default_value_t = 0.02)]
        h: f64,
        #[arg(long, value_delimiter = ',', default_value = "8")]
        m: Vec<f64>,
        #[arg(long, value_enum, default_value = "obstacle")]
        mode: Mode,
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<f64>,
        #[arg(long, default_value = "out")]
        output: PathBuf,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    Obstacle,
    Gradient,
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn prepare(mesh: &MeshArgs, output: &Path) -> Result<Prepared> {
    fs::create_dir_all(output)?;
    prepare_domain(&mesh.domain()?)
}

fn status(converged: bool) -> i32 {
    if converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}

fn run(cmd: Command) -> Result<i32> {
    match cmd {
        Command::MeshInfo { mesh, output } => {
            let p = prepare(&mesh, &output)?;
            let m = &p.mesh;
            let curv = curvature_info(m)?;
            let suff = sufficient_m(curv.ricci_lower_bound, curv.diameter_estimate, 2).ok();
            let info = json!({
                "vertices": m.vertex_count(),
                "faces": m.face_count(),
                "edges": m.edges().len(),
                "euler_characteristic": m.euler_characteristic(),
                "components": m.component_count(),
                "boundary": m.has_boundary(),
                "h": p.h(),
                "mean_edge": m.mean_edge_length(),
                "area": m.total_area(),
                "ricci_lower_bound": curv.ricci_lower_bound,
                "diameter_estimate": curv.diameter_estimate,
                "gauss_bonnet_residual": curv.gauss_bonnet_residual,
                "sufficient_m": suff,
            });
            write_json(&output.join("mesh_info.json"), &info)?;
            println!(
                "V={} F={} chi={} components={} h={:.4} area={:.6} K={:.3e}",
                m.vertex_count(),
                m.face_count(),
                m.euler_characteristic(),
                m.component_count(),
                p.h(),
                m.total_area(),
                curv.ricci_lower_bound
            );
            Ok(EXIT_OK)
        }
        Command::Distance { mesh, sources, output } => {
            let p = prepare(&mesh, &output)?;
            let d = if sources.is_empty() {
                match p.truth {
                    Truth::Planar(_) => return Err(Error::InvalidArgument("planar meshes need --sources".into())),
                    _ => fast_march(&p.mesh, &[p.mesh.basepoint().expect("closed meshes carry a basepoint")])?,
                }
            } else {
                fast_march(&p.mesh, &sources)?
            };
            write_vertex_csv(&output.join("distance.csv"), &d.values)?;
            write_vtk(
                &output.join("distance.vtk"),
                &p.mesh,
                Some(&p.points),
                &[("distance", &d.values)],
            )?;
            let max = d.values.iter().cloned().fold(0.0, f64::max);
            let err = match (&p.truth, sources.is_empty()) {
                (Truth::Surface(s), true) => {
                    let exact = analytic_vertex_distance(*s, &p.mesh)?;
                    Some(
                        exact
                            .iter()
                            .zip(&d.values)
                            .map(|(a, b)| (a - b).abs())
                            .fold(0.0, f64::max),
                    )
                }
                _ => None,
            };
            let err_text = err.map(|e| format!(" max_error={e:.3e}")).unwrap_or_default();
            println!("max_distance={max:.6} edge_fallbacks={}{err_text}", d.edge_fallbacks);
            Ok(EXIT_OK)
        }
        Command::SolveObstacle { mesh, m, tol, output } => {
            let p = prepare(&mesh, &output)?;
            let ops = build_operators(&p.mesh)?;
            let prob = ObstacleProblem::new(&p.mesh, &ops, p.obstacle.clone(), m)?;
            let cfg = SolveConfig {
                tol,
                ..Default::default()
            };
            let r = ObstacleSolver::new(&ops)?.solve(&prob, &cfg, None)?;
            let gap: Vec<f64> = p.obstacle.iter().zip(&r.u).map(|(d, u)| d - u).collect();
            write_vertex_columns_csv(
                &output.join("obstacle_u.csv"),
                &[("u", &r.u), ("obstacle", &p.obstacle), ("gap", &gap)],
            )?;
            write_vtk(
                &output.join("obstacle_u.vtk"),
                &p.mesh,
                Some(&p.points),
                &[("u", &r.u), ("gap", &gap)],
            )?;
            let sup_gap = gap.iter().cloned().fold(0.0, f64::max);
            let mut report = serde_json::to_value(&r)?;
            report["sup_gap"] = json!(sup_gap);
            report.as_object_mut().expect("object").remove("u");
            write_json(&output.join("obstacle_report.json"), &report)?;
            println!(
                "m={m} iterations={} converged={} sup_gap={sup_gap:.6e} kkt=({:.1e}, {:.1e}, {:.1e}) energy={:.9e}",
                r.iterations, r.converged, r.kkt_infeasibility, r.kkt_stationarity, r.kkt_complementarity, r.energy
            );
            Ok(status(r.converged))
        }
        Command::SolveGradient {
            mesh,
            m,
            tol_gap,
            output,
        } => {
            let p = prepare(&mesh, &output)?;
            let ops = build_operators(&p.mesh)?;
            let prob = GradientProblem::new(&p.mesh, &ops, m)?;
            let cfg = GradientConfig {
                tol_gap,
                ..Default::default()
            };
            let r = solve_gradient_constrained(&prob, &cfg, None)?;
            write_vertex_csv(&output.join("gradient_u.csv"), &r.u)?;
            write_vtk(&output.join("gradient_u.vtk"), &p.mesh, Some(&p.points), &[("u", &r.u)])?;
            let face_grad: Vec<f64> = face_gradients(&p.mesh, &r.u)?
                .iter()
                .map(|g| (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt())
                .collect();
            write_face_csv(&output.join("gradient_face_norm.csv"), &face_grad)?;
            let mut report = serde_json::to_value(&r)?;
            report.as_object_mut().expect("object").remove("u");
            write_json(&output.join("gradient_report.json"), &report)?;
            println!(
                "m={m} iterations={} converged={} relative_gap={:.2e} feasibility={:.2e} energy={:.9e}",
                r.iterations, r.converged, r.relative_gap, r.feasibility, r.energy
            );
            Ok(status(r.converged))
        }
        Command::Extract {
            mesh,
            field,
            m,
            lambda,
            contact_threshold,
            gradient_threshold,
            output,
        } => {
            let p = prepare(&mesh, &output)?;
            let u = read_vertex_csv(&field)?;
            let h = p.h();
            let eps_c = contact_threshold.unwrap_or_else(|| default_contact_threshold(h, m));
            let eps_g = gradient_threshold.unwrap_or_else(|| default_gradient_threshold(h));
            let mut sets = vec![(
                0.0,
                elastic_set(&u, &p.obstacle, &p.mesh, ElasticMode::ContactGap(eps_c))?,
            )];
            for &l in &lambda {
                sets.push((l, lambda_elastic_set(&u, &p.mesh, l, eps_g)?));
            }
            let mut reports = Vec::new();
            let mut summary = Vec::new();
            for (l, e) in &sets {
                let h = match p.truth_labels(*l)? {
                    Some(gt) if !(gt.is_empty() && e.is_empty()) => Some(hausdorff(&p.mesh, e, &gt)?),
                    _ => None,
                };
                summary.push(format!(
                    "lambda={l}: {} vertices{}",
                    e.count(),
                    h.as_ref()
                        .and_then(|h| h.symmetric)
                        .map(|s| format!(", hausdorff={s:.4}"))
                        .unwrap_or_default()
                ));
                reports.push(json!({ "lambda": l, "count": e.count(), "hausdorff": h }));
            }
            let names: Vec<String> = sets
                .iter()
                .map(|(l, _)| {
                    if *l == 0.0 {
                        "elastic".into()
                    } else {
                        format!("lambda_{l}")
                    }
                })
                .collect();
            let fields: Vec<Vec<f64>> = sets.iter().map(|(_, e)| e.as_field()).collect();
            let cols: Vec<(&str, &[f64])> = names
                .iter()
                .map(String::as_str)
                .zip(fields.iter().map(Vec::as_slice))
                .collect();
            write_vertex_columns_csv(&output.join("labels.csv"), &cols)?;
            write_json(
                &output.join("extract_report.json"),
                &json!({ "contact_threshold": eps_c, "gradient_threshold": eps_g, "sets": reports }),
            )?;
            println!("{}", summary.join("; "));
            Ok(EXIT_OK)
        }
        Command::Sweep {
            config,
            m,
            lambda,
            output,
            seed,
            parallel,
            gradient,
        } => {
            let cfg = RunConfig::load(&config)?.apply(RunOverrides {
                m,
                lambda,
                output,
                seed,
                parallel,
                gradient,
            })?;
            let r = run_sweep(&cfg)?;
            println!(
                "{} rows for {} values of m; all converged: {}; written to {}",
                r.rows.len(),
                cfg.m.len(),
                r.all_converged,
                cfg.output.display()
            );
            Ok(status(r.all_converged))
        }
        Command::Semiconcavity {
            surface,
            subdivisions,
            grid,
            samples,
            rho,
            max_length,
            seed,
            m,
            output,
        } => {
            fs::create_dir_all(&output)?;
            let s: SampleSurface = surface.parse()?;
            let geo = sample_geodesics(s, samples, max_length, rho, seed)?;
            let domain = match s {
                SampleSurface::UnitSphere => DomainConfig::UnitSphere { subdivisions },
                SampleSurface::FlatUnitTorus => DomainConfig::FlatUnitTorus { grid },
                SampleSurface::Planar => {
                    return Err(Error::InvalidArgument(
                        "planar sampling has no mesh field to evaluate".into(),
                    ))
                }
            };
            let report = match m {
                None => estimate_semiconcavity(&|p| basepoint_distance(s, p), &geo, &default_lambda_grid(), 0.0)?,
                Some(m) => {
                    let p = prepare_domain(&domain)?;
                    let ops = build_operators(&p.mesh)?;
                    let prob = ObstacleProblem::new(&p.mesh, &ops, p.obstacle.clone(), m)?;
                    let u = ObstacleSolver::new(&ops)?
                        .solve(&prob, &SolveConfig::default(), None)?
                        .u;
                    let min_chord = 2.0 * p.h();
                    match p.torus_grid {
                        Some(n) => estimate_semiconcavity(
                            &|q| torus_grid_eval(n, &u, q),
                            &geo,
                            &default_lambda_grid(),
                            min_chord,
                        )?,
                        None => {
                            let i = MeshInterpolator::new(&p.mesh)?;
                            estimate_semiconcavity(&|q| i.eval(&u, q), &geo, &default_lambda_grid(), min_chord)?
                        }
                    }
                }
            };
            write_json(&output.join("semiconcavity.json"), &serde_json::to_value(&report)?)?;
            println!(
                "C_hat={:.6} samples={} chords={}",
                report.c_hat, report.samples, report.chords
            );
            Ok(EXIT_OK)
        }
        Command::Revsurf {
            profile,
            profile_csv,
            nt,
            neck_r,
            neck_len,
            bulb_r,
            bulb_len,
            m,
            search,
            output,
        } => {
            fs::create_dir_all(&output)?;
            let prof = match (profile_csv, profile) {
                (Some(path), _) => {
                    let (t, r) = read_profile_csv(&path)?;
                    RevolutionProfile::new(path.display().to_string(), t, r)?
                }
                (None, ProfileKind::Sphere) => sphere_profile(nt)?,
                (None, ProfileKind::Dumbbell) => {
                    dumbbell_profile(DumbbellParams::new(neck_r, neck_len, bulb_r, bulb_len, nt))?
                }
            };
            write_profile_csv(&output.join("profile.csv"), &prof.t, &prof.r)?;
            let cfg = Solve1DConfig::default();
            let mut runs = Vec::new();
            let mut converged = true;
            let mut line = Vec::new();
            for &mv in &m {
                let obs = solve_obstacle_1d(&prof, mv, &cfg)?;
                let grad = solve_gradient_1d(&prof, mv, &cfg)?;
                converged &= obs.converged;
                let gap = obs
                    .rho
                    .iter()
                    .zip(&grad.rho)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                write_profile_csv(&output.join(format!("rho_obstacle_m{mv}.csv")), &prof.t, &obs.rho)?;
                write_profile_csv(&output.join(format!("rho_gradient_m{mv}.csv")), &prof.t, &grad.rho)?;
                line.push(format!(
                    "m={mv}: rho(T)={:.6} sup|rho'|={:.4} gap={gap:.3e}",
                    obs.rho.last().expect("nonempty"),
                    obs.sup_gradient
                ));
                runs.push(json!({ "m": mv, "obstacle": obs, "gradient": grad, "equivalence_gap": gap }));
            }
            let witnesses = if search {
                let sphere = counterexample_search(
                    &[sphere_profile(nt)?],
                    &default_witness_ms(),
                    DEFAULT_WITNESS_MARGIN,
                    &cfg,
                )?;
                let family = default_dumbbell_family(4001)?;
                let dumbbell = counterexample_search(&family, &default_witness_ms(), DEFAULT_WITNESS_MARGIN, &cfg)?;
                line.push(format!(
                    "witnesses: {} dumbbell, {} sphere",
                    dumbbell.len(),
                    sphere.len()
                ));
                Some(json!({ "sphere": sphere, "dumbbell": dumbbell }))
            } else {
                None
            };
            write_json(
                &output.join("revsurf_report.json"),
                &json!({ "profile": prof.name, "runs": runs, "witnesses": witnesses }),
            )?;
            println!("{}", line.join("; "));
            Ok(status(converged))
        }
        Command::Euclid {
            shape,
            radius,
            length,
            width,
            h,
            m,
            mode,
            lambda,
            output,
        } => {
            let domain = match shape {
                Shape::Disk => DomainConfig::Disk { radius, h },
                Shape::Rectangle => DomainConfig::Rectangle { length, width, h },
            };
            let mode = match mode {
                Mode::Obstacle => TorsionMode::Obstacle,
                Mode::Gradient => TorsionMode::Gradient,
            };
            fs::create_dir_all(&output)?;
            let p = prepare_domain(&domain)?;
            let Truth::Planar(pd) = &p.truth else {
                unreachable!("built-in planar shapes carry ground truth")
            };
            let ops = build_operators(&p.mesh)?;
            let hh = p.h();
            let mut converged = true;
            let mut line = Vec::new();
            let mut runs = Vec::new();
            for &mv in &m {
                let r = cutlocus::planar::solve_torsion(
                    pd,
                    &ops,
                    mv,
                    mode,
                    &SolveConfig::default(),
                    &GradientConfig::default(),
                )?;
                converged &= r.converged();
                let u = r.u();
                let sup_gap = p.obstacle.iter().zip(u).map(|(d, u)| d - u).fold(0.0, f64::max);
                let mut sets = vec![(
                    0.0,
                    elastic_set(
                        u,
                        &p.obstacle,
                        &p.mesh,
                        ElasticMode::ContactGap(default_contact_threshold(hh, mv)),
                    )?,
                )];
                for &l in &lambda {
                    sets.push((l, lambda_elastic_set(u, &p.mesh, l, default_gradient_threshold(hh))?));
                }
                let mut set_reports = Vec::new();
                for (l, e) in &sets {
                    let gt = p.truth_labels(*l)?.expect("built-in shape");
                    let hd = if gt.is_empty() && e.is_empty() {
                        None
                    } else {
                        Some(hausdorff(&p.mesh, e, &gt)?)
                    };
                    set_reports.push(json!({ "lambda": l, "count": e.count(), "hausdorff": hd }));
                }
                let centre = p
                    .mesh
                    .nearest_vertex(match shape {
                        Shape::Disk => [0.0, 0.0, 0.0],
                        Shape::Rectangle => [0.5 * length, 0.5 * width, 0.0],
                    })
                    .expect("nonempty mesh")
                    .0;
                write_vertex_columns_csv(
                    &output.join(format!("euclid_m{mv}.csv")),
                    &[("u", u), ("boundary_distance", &p.obstacle)],
                )?;
                write_vtk(
                    &output.join(format!("euclid_m{mv}.vtk")),
                    &p.mesh,
                    None,
                    &[("u", u), ("boundary_distance", &p.obstacle)],
                )?;
                line.push(format!(
                    "m={mv}: u(centre)={:.6} sup_gap*m={:.4} max_grad={:.4}",
                    u[centre],
                    sup_gap * mv,
                    max_face_gradient(&p.mesh, u)?
                ));
                runs.push(json!({ "m": mv, "converged": r.converged(), "iterations": r.iterations(), "u_centre": u[centre], "sup_gap": sup_gap, "sets": set_reports }));
            }
            write_json(
                &output.join("euclid_report.json"),
                &json!({ "h": hh, "vertices": p.mesh.vertex_count(), "runs": runs }),
            )?;
            println!("{}", line.join("; "));
            Ok(status(converged))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID_INPUT as u8)
        }
    }
}
