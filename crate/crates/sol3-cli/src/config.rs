//! Job configuration: flags, config files, and the merge between them.
//!
//! A job is described by a [`JobConfig`], which can come from a TOML file,
//! from command-line flags, or both (flags override the file). [`resolve`]
//! turns the merged config into a ready-to-run [`Job`] with the surface
//! built and the expected invariant values filled in.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use sol3::ambient::Sign;
use sol3::families::{self, AlphaProfile, GeneralFamily, GeneralParams};
use sol3::smooth::SmoothFn;
use sol3::surface::{Domain, ParamSurface};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Vertical totally geodesic plane x = x0.
    Leaf,
    /// Cylinder over a profile curve; the normal stays horizontal.
    Cylinder,
    /// Minimal tilted family: exponential profile swept along y.
    Slant,
    /// Two-curve product family driven by zeta(v) and xi(v).
    General,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Leaf => "leaf",
            FamilyKind::Cylinder => "cylinder",
            FamilyKind::Slant => "slant",
            FamilyKind::General => "general",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignArg {
    Plus,
    Minus,
}

impl SignArg {
    fn to_sign(self) -> Sign {
        match self {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    /// Plain-text mesh: `v x y z` vertex lines plus quad faces.
    Mesh,
    /// CSV sweep with header u,v,x,y,z,theta,K,H.
    Csv,
    /// Polyline along u at the middle of the v-range.
    Curve,
}

/// Tabulated profile alternative to the `profile` expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileTable {
    pub s: Vec<f64>,
    pub alpha: Vec<f64>,
}

/// Everything a job can specify. All fields optional; [`resolve`] applies
/// per-family defaults. Unknown keys in a config file are rejected.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct JobConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<SignArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_table: Option<ProfileTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturb_z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euclidean_preview: Option<bool>,
}

impl JobConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| anyhow!("bad config: {e}"))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Command-line flags shared by `generate` and `verify`. Numeric-parameter
/// flags accept constant expressions ("pi/3") as well as plain numbers.
#[derive(Debug, Args, Default)]
pub struct JobArgs {
    /// Read settings from a TOML config file; explicit flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write the merged effective config as TOML to this path ("-" for
    /// stdout) before running.
    #[arg(long, value_name = "PATH")]
    pub emit_config: Option<PathBuf>,

    /// Surface family to build.
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,

    /// Tilt angle in radians, strictly between 0 and pi/2 (e.g. "pi/3").
    #[arg(long, value_name = "ANGLE")]
    pub theta: Option<String>,

    /// Phase offset of the tilted coordinate (general family).
    #[arg(long, value_name = "NUM")]
    pub psi0: Option<String>,

    /// Plane position for the leaf family.
    #[arg(long, value_name = "NUM")]
    pub x0: Option<String>,

    /// Branch sign for the general family.
    #[arg(long, value_enum)]
    pub sign: Option<SignArg>,

    /// Height function zeta(v) for the general family.
    #[arg(long, value_name = "EXPR")]
    pub zeta: Option<String>,

    /// Speed function xi(v) for the general family.
    #[arg(long, value_name = "EXPR")]
    pub xi: Option<String>,

    /// Cylinder profile: linear, quadratic, arccos, umbilic, constant:<num>,
    /// or an expression in one variable.
    #[arg(long, value_name = "PROFILE")]
    pub profile: Option<String>,

    /// Sample counts as MxN (along u, along v).
    #[arg(long, value_name = "MxN")]
    pub grid: Option<String>,

    /// Parameter interval along u, written LO:HI.
    #[arg(long, value_name = "LO:HI")]
    pub u_range: Option<String>,

    /// Parameter interval along v, written LO:HI.
    #[arg(long, value_name = "LO:HI")]
    pub v_range: Option<String>,

    /// Residual tolerance for verification checks.
    #[arg(long, value_name = "NUM")]
    pub tol: Option<f64>,

    /// Output format (defaults to curve for cylinders, mesh otherwise).
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    /// Output path; relative paths land in the output directory, "-" or
    /// absence means stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Add eps*sin(u) to the height coordinate (negative control).
    #[arg(long, value_name = "EPS")]
    pub perturb_z: Option<f64>,

    /// Additionally export the mesh in chart coordinates for naive
    /// Euclidean viewing.
    #[arg(long)]
    pub euclidean_preview: bool,
}

/// Evaluate a constant expression such as "pi/4" or "0.3".
pub fn parse_number(src: &str) -> Result<f64> {
    let e = sol3::expr::parse(src).map_err(|err| anyhow!("bad number '{src}': {err}"))?;
    if let Some(name) = e.free_variable() {
        bail!("bad number '{src}': variable '{name}' is not allowed here");
    }
    e.eval(0.0).map_err(|err| anyhow!("bad number '{src}': {err}"))
}

fn parse_range(src: &str) -> Result<[f64; 2]> {
    let (lo, hi) = src
        .split_once(':')
        .ok_or_else(|| anyhow!("range must look like LO:HI, got '{src}'"))?;
    let lo = parse_number(lo.trim())?;
    let hi = parse_number(hi.trim())?;
    check_range([lo, hi])?;
    Ok([lo, hi])
}

fn check_range(r: [f64; 2]) -> Result<()> {
    if !(r[0].is_finite() && r[1].is_finite() && r[0] < r[1]) {
        bail!("range [{}, {}] must satisfy LO < HI", r[0], r[1]);
    }
    Ok(())
}

pub fn parse_grid(src: &str) -> Result<(usize, usize)> {
    let lower = src.to_ascii_lowercase();
    let (m, n) = lower
        .split_once('x')
        .ok_or_else(|| anyhow!("grid must look like MxN, got '{src}'"))?;
    let m: usize = m.trim().parse().with_context(|| format!("bad grid '{src}'"))?;
    let n: usize = n.trim().parse().with_context(|| format!("bad grid '{src}'"))?;
    if m < 2 || n < 2 {
        bail!("grid must be at least 2x2, got '{src}'");
    }
    Ok((m, n))
}

/// File config (when given) with every explicit flag layered on top.
pub fn load(args: &JobArgs) -> Result<JobConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            JobConfig::from_toml(&text)?
        }
        None => JobConfig::default(),
    };
    if let Some(v) = args.family {
        cfg.family = Some(v);
    }
    if let Some(s) = &args.theta {
        cfg.theta = Some(parse_number(s)?);
    }
    if let Some(s) = &args.psi0 {
        cfg.psi0 = Some(parse_number(s)?);
    }
    if let Some(s) = &args.x0 {
        cfg.x0 = Some(parse_number(s)?);
    }
    if let Some(v) = args.sign {
        cfg.sign = Some(v);
    }
    if let Some(s) = &args.zeta {
        cfg.zeta = Some(s.clone());
    }
    if let Some(s) = &args.xi {
        cfg.xi = Some(s.clone());
    }
    if let Some(s) = &args.profile {
        cfg.profile = Some(s.clone());
    }
    if let Some(s) = &args.grid {
        parse_grid(s)?;
        cfg.grid = Some(s.clone());
    }
    if let Some(s) = &args.u_range {
        cfg.u_range = Some(parse_range(s)?);
    }
    if let Some(s) = &args.v_range {
        cfg.v_range = Some(parse_range(s)?);
    }
    if let Some(v) = args.tol {
        cfg.tol = Some(v);
    }
    if let Some(v) = args.format {
        cfg.format = Some(v);
    }
    if let Some(p) = &args.out {
        cfg.out = Some(p.clone());
    }
    if let Some(v) = args.perturb_z {
        cfg.perturb_z = Some(v);
    }
    if args.euclidean_preview {
        cfg.euclidean_preview = Some(true);
    }
    Ok(cfg)
}

/// A fully resolved job: the surface plus everything the commands need.
pub struct Job {
    pub surface: ParamSurface,
    pub expected_angle_cos: f64,
    pub expected_gauss: Option<f64>,
    pub expected_mean: Option<f64>,
    pub grid: (usize, usize),
    pub tol: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub euclidean_preview: bool,
    /// Deterministic one-line summary embedded in output headers.
    pub header: String,
}

fn smooth_from_src(src: &str, what: &str) -> Result<SmoothFn> {
    let e = sol3::expr::parse(src).map_err(|err| anyhow!("bad {what} '{src}': {err}"))?;
    Ok(SmoothFn::from_expr(&e))
}

pub fn resolve(cfg: &JobConfig) -> Result<Job> {
    let kind = cfg
        .family
        .ok_or_else(|| anyhow!("missing required parameter: family"))?;
    let grid = match &cfg.grid {
        Some(s) => parse_grid(s)?,
        None => (25, 25),
    };
    let u = cfg.u_range.unwrap_or([-1.0, 1.0]);
    let v = cfg.v_range.unwrap_or([-1.0, 1.0]);
    check_range(u)?;
    check_range(v)?;
    let domain = Domain::new((u[0], u[1]), (v[0], v[1]));
    let tol = cfg.tol.unwrap_or(1e-8);
    if !(tol.is_finite() && tol > 0.0) {
        bail!("tol must be positive, got {tol}");
    }

    let mut header = format!("family={}", kind.name());

    let (surface, expected_angle_cos, expected_gauss, expected_mean) = match kind {
        FamilyKind::Leaf => {
            let x0 = cfg.x0.unwrap_or(0.0);
            let _ = write!(header, " x0={x0}");
            let s = families::leaf(x0, domain);
            (s, 1.0, Some(-1.0), Some(0.0))
        }
        FamilyKind::Cylinder => {
            let profile = match (&cfg.profile_table, &cfg.profile) {
                (Some(_), Some(_)) => {
                    bail!("give either profile or profile-table, not both")
                }
                (Some(t), None) => {
                    let _ = write!(header, " profile=table({})", t.s.len());
                    AlphaProfile::Table {
                        s: t.s.clone(),
                        alpha: t.alpha.clone(),
                    }
                }
                (None, selector) => {
                    let src = selector.as_deref().unwrap_or("linear");
                    let _ = write!(header, " profile={src}");
                    src.parse::<AlphaProfile>()
                        .map_err(|e| anyhow!("bad profile '{src}': {e}"))?
                }
            };
            let expected_mean = match &profile {
                AlphaProfile::Constant(_) => Some(0.0),
                _ => None,
            };
            let s = families::cylinder(&profile, domain)?;
            (s, 0.0, None, expected_mean)
        }
        FamilyKind::Slant => {
            let theta = cfg.theta.unwrap_or(PI / 4.0);
            let _ = write!(header, " theta={theta}");
            let s = families::slant(theta, domain)?;
            (s, theta.cos(), Some(-theta.cos().powi(2)), Some(0.0))
        }
        FamilyKind::General => {
            let theta = cfg.theta.unwrap_or(PI / 3.0);
            let psi0 = cfg.psi0.unwrap_or(0.0);
            let zeta_src = cfg.zeta.as_deref().unwrap_or("0");
            let xi_src = cfg.xi.as_deref().unwrap_or("1");
            let sign = cfg.sign.unwrap_or(SignArg::Plus);
            let _ = write!(
                header,
                " theta={theta} psi0={psi0} zeta={zeta_src} xi={xi_src} sign={}",
                match sign {
                    SignArg::Plus => "plus",
                    SignArg::Minus => "minus",
                }
            );
            let params = GeneralParams {
                theta,
                psi0,
                zeta: smooth_from_src(zeta_src, "zeta")?,
                xi: smooth_from_src(xi_src, "xi")?,
                sign: sign.to_sign(),
                domain,
            };
            let fam = GeneralFamily::new(params)?;
            // the grid normal may be the antipode of the reference one;
            // the angle expectation follows the grid's orientation
            let umid = 0.5 * (domain.u.0 + domain.u.1);
            let vmid = 0.5 * (domain.v.0 + domain.v.1);
            let (_, b) = fam.coeffs_ab(umid, vmid)?;
            (fam.surface(), b.signum() * theta.cos(), None, None)
        }
    };

    let _ = write!(
        header,
        " grid={}x{} u={}:{} v={}:{}",
        grid.0, grid.1, u[0], u[1], v[0], v[1]
    );

    let surface = match cfg.perturb_z {
        Some(eps) if eps != 0.0 => {
            let _ = write!(header, " perturb-z={eps}");
            surface.with_z_perturbation(eps)
        }
        _ => surface,
    };

    let format = cfg.format.unwrap_or(match kind {
        FamilyKind::Cylinder => OutputFormat::Curve,
        _ => OutputFormat::Mesh,
    });

    Ok(Job {
        surface,
        expected_angle_cos,
        expected_gauss,
        expected_mean,
        grid,
        tol,
        format,
        out: cfg.out.clone(),
        euclidean_preview: cfg.euclidean_preview.unwrap_or(false),
        header,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_accept_constant_expressions() {
        assert!((parse_number("pi/3").unwrap() - PI / 3.0).abs() < 1e-15);
        assert!((parse_number("-0.25").unwrap() + 0.25).abs() < 1e-15);
        assert!(parse_number("v + 1").is_err());
        assert!(parse_number("1/0").is_err());
    }

    #[test]
    fn grid_and_range_syntax() {
        assert_eq!(parse_grid("50x50").unwrap(), (50, 50));
        assert_eq!(parse_grid("3X7").unwrap(), (3, 7));
        assert!(parse_grid("1x5").is_err());
        assert!(parse_grid("50").is_err());
        assert_eq!(parse_range("-1:2").unwrap(), [-1.0, 2.0]);
        assert!((parse_range("0:pi").unwrap()[1] - PI).abs() < 1e-15);
        assert!(parse_range("2:1").is_err());
        assert!(parse_range("1").is_err());
    }

    #[test]
    fn config_round_trip_is_idempotent() {
        let text = "family = \"slant\"\ntheta = 0.5\ngrid = \"10x10\"\n";
        let cfg = JobConfig::from_toml(text).unwrap();
        let once = cfg.to_toml();
        let twice = JobConfig::from_toml(&once).unwrap().to_toml();
        assert_eq!(once, twice);
        assert_eq!(JobConfig::from_toml(&once).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(JobConfig::from_toml("familly = \"slant\"").is_err());
        assert!(JobConfig::from_toml("family = \"slant\"\nspeed = 3").is_err());
    }

    #[test]
    fn resolve_defaults() {
        let cfg = JobConfig {
            family: Some(FamilyKind::Slant),
            ..JobConfig::default()
        };
        let job = resolve(&cfg).unwrap();
        assert_eq!(job.grid, (25, 25));
        assert!((job.expected_angle_cos - (PI / 4.0).cos()).abs() < 1e-15);
        assert!(matches!(job.format, OutputFormat::Mesh));

        let cfg = JobConfig {
            family: Some(FamilyKind::Cylinder),
            ..JobConfig::default()
        };
        let job = resolve(&cfg).unwrap();
        assert!(matches!(job.format, OutputFormat::Curve));
        assert!(job.header.contains("profile=linear"));
    }

    #[test]
    fn resolve_rejects_nonsense() {
        assert!(resolve(&JobConfig::default()).is_err());
        let cfg = JobConfig {
            family: Some(FamilyKind::Slant),
            theta: Some(2.0),
            ..JobConfig::default()
        };
        assert!(resolve(&cfg).is_err());
    }
}
