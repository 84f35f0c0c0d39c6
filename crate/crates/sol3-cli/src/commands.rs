//! Subcommand implementations: generate, verify, figures, report.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use sol3::ambient::{invariant_battery, Sign, TangentVec};
use sol3::families::{
    classify_minimal, cylinder, leaf, slant, AlphaProfile, GeneralFamily, GeneralParams,
};
use sol3::numerics::ode_rk4;
use sol3::smooth::SmoothFn;
use sol3::surface::{
    normal, principal_curvatures, second_form_on, tangential_e1, verify_surface, Domain, JetMode,
    ParamSurface, VerifyOptions,
};

use crate::config::{Job, OutputFormat};
use crate::output;

pub fn generate(job: &Job) -> Result<()> {
    let text = match job.format {
        OutputFormat::Mesh => output::mesh_text(&job.surface, job.grid, &job.header)?,
        OutputFormat::Csv => output::csv_text(&job.surface, job.grid)?,
        OutputFormat::Curve => output::curve_text(&job.surface, job.grid.0, &job.header)?,
    };
    if job.euclidean_preview {
        let mesh = match job.format {
            OutputFormat::Mesh => text.clone(),
            _ => output::mesh_text(&job.surface, job.grid, &job.header)?,
        };
        output::write_file(&output::preview_path(job.out.as_deref()), &mesh)?;
    }
    output::write_output(job.out.as_deref(), &text)
}

pub fn verify(job: &Job) -> Result<bool> {
    let opts = VerifyOptions {
        grid: job.grid,
        expected_angle_cos: Some(job.expected_angle_cos),
        expected_gauss: job.expected_gauss,
        expected_mean: job.expected_mean,
        angle_tol: job.tol,
        projection_tol: job.tol,
        curvature_tol: job.tol.max(1e-5),
        ..VerifyOptions::default()
    };
    let report = verify_surface(&job.surface, &opts)?;
    let passed = report.passed();
    let mut text = String::new();
    let _ = writeln!(text, "# sol3 verify {}", job.header);
    let _ = write!(text, "{report}");
    let _ = writeln!(text, "result: {}", if passed { "pass" } else { "FAIL" });
    output::write_output(job.out.as_deref(), &text)?;
    Ok(passed)
}

/// Profile-curve catalogue: four documented cylinder profiles, each exported
/// as a polyline plus a surface mesh, with a manifest describing them.
pub fn figures(dir: Option<&Path>) -> Result<()> {
    let dir = dir.map(Path::to_path_buf).unwrap_or_else(output::out_dir);
    let items: [(&str, AlphaProfile, (f64, f64), &str); 4] = [
        (
            "b",
            AlphaProfile::Linear,
            (0.0, 4.0 * PI),
            "alpha(u) = u; height coordinate is sin(u); not minimal",
        ),
        (
            "c",
            AlphaProfile::Quadratic,
            (-3.0, 3.0),
            "alpha(u) = u^2; not minimal",
        ),
        (
            "d",
            AlphaProfile::Arccos,
            (-1.0, 1.0),
            "alpha(u) = arccos(u); not minimal",
        ),
        (
            "e",
            AlphaProfile::Umbilic,
            (-2.0, 2.0),
            "alpha(u) = 2*atan(exp(2u)); umbilical, not geodesic, not minimal",
        ),
    ];
    let mut manifest = String::from("# sol3 figures: cylinder profile catalogue\n");
    for (tag, profile, (lo, hi), desc) in items {
        let domain = Domain::new((lo, hi), (-1.0, 1.0));
        let surface = cylinder(&profile, domain)
            .with_context(|| format!("building item {tag}"))?;
        let header = format!("figures item {tag}");
        let curve_name = format!("item_{tag}_curve.obj");
        let mesh_name = format!("item_{tag}_mesh.obj");
        output::write_file(&dir.join(&curve_name), &output::curve_text(&surface, 401, &header)?)?;
        output::write_file(&dir.join(&mesh_name), &output::mesh_text(&surface, (81, 17), &header)?)?;
        let _ = writeln!(
            manifest,
            "item {tag}: {desc}; u in [{lo}, {hi}]; files {curve_name} {mesh_name}"
        );
    }
    output::write_file(&dir.join("figures.txt"), &manifest)
}

struct Line {
    name: String,
    worst: f64,
    tol: f64,
}

fn push_verify(
    lines: &mut Vec<Line>,
    label: &str,
    surface: &ParamSurface,
    opts: &VerifyOptions,
) -> Result<()> {
    let report = verify_surface(surface, opts).with_context(|| format!("verifying {label}"))?;
    for c in report.checks {
        lines.push(Line {
            name: format!("{label}: {}", c.name),
            worst: c.worst,
            tol: c.tol,
        });
    }
    Ok(())
}

fn expect_opts(cos: f64, gauss: Option<f64>, mean: Option<f64>) -> VerifyOptions {
    VerifyOptions {
        grid: (15, 15),
        expected_angle_cos: Some(cos),
        expected_gauss: gauss,
        expected_mean: mean,
        ..VerifyOptions::default()
    }
}

/// Max of |h(T, S)| over the grid, where T is the tangent projection of e1
/// and S the unit sweep direction: both principal, so the mixed term must
/// vanish on any constant-angle surface.
fn mixed_second_form_max(surface: &ParamSurface, grid: (usize, usize)) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (u, v) in surface.domain().grid(grid.0, grid.1) {
        let jet = surface.jet(u, v, JetMode::Auto)?;
        let n = normal(&jet)?;
        let t = tangential_e1(&jet)?;
        let s = jet.fu_frame();
        let s = s.scale(1.0 / s.norm());
        let h12 = second_form_on(&jet, &t, &s, &n)?;
        worst = worst.max(h12.abs());
    }
    Ok(worst)
}

fn general_sample(sign: Sign) -> Result<GeneralFamily> {
    let params = GeneralParams {
        theta: PI / 3.0,
        psi0: 0.0,
        zeta: SmoothFn::linear(0.0, 0.3),
        xi: SmoothFn::constant(1.0),
        sign,
        domain: Domain::new((-0.4, 0.6), (-1.0, 1.0)),
    };
    Ok(GeneralFamily::new(params)?)
}

/// Flat-height member: zeta constant, so the substitution chain collapses
/// to its rational branch.
fn general_flat() -> Result<GeneralFamily> {
    let params = GeneralParams {
        theta: PI / 3.0,
        psi0: 0.9,
        zeta: SmoothFn::constant(0.0),
        xi: SmoothFn::constant(1.0),
        sign: Sign::Plus,
        domain: Domain::new((-0.6, 0.6), (-1.0, 1.0)),
    };
    Ok(GeneralFamily::new(params)?)
}

fn general_lines(lines: &mut Vec<Line>, label: &str, fam: &GeneralFamily) -> Result<()> {
    let dom = fam.params().domain;
    // expected angle cosine w.r.t. the grid's own normal orientation
    let (_, b) = fam.coeffs_ab(0.5 * (dom.u.0 + dom.u.1), 0.5 * (dom.v.0 + dom.v.1))?;
    push_verify(
        lines,
        label,
        &fam.surface(),
        &expect_opts(b.signum() * fam.params().theta.cos(), None, None),
    )?;

    // structure equations, differenced with a small step: the curvature
    // function has a pole just outside the window
    let h = 5e-4;
    let mut field: f64 = 0.0;
    let mut chain: f64 = 0.0;
    let mut link: f64 = 0.0;
    for (u, v) in dom.grid(9, 5) {
        let r = fam.field_residuals(u, v, h)?;
        for x in [r.alpha_u, r.alpha_e2, r.sigma_pde, r.sigma_u, r.p_u, r.mix_a, r.mix_b] {
            field = field.max(x.abs());
        }
        let c = fam.chain_residuals(u, v, 1e-2)?;
        for x in [c.q_riccati, c.a_sub, c.b_sub] {
            chain = chain.max(x.abs());
        }
        if let Some(l) = c.lambda_link {
            link = link.max(l.abs());
        }
        if let Some(p) = c.p_roundtrip {
            link = link.max(p.abs());
        }
    }
    lines.push(Line {
        name: format!("{label}: structure equation residuals"),
        worst: field,
        tol: 1e-7,
    });
    lines.push(Line {
        name: format!("{label}: substitution chain residuals"),
        worst: chain,
        tol: 1e-8,
    });
    lines.push(Line {
        name: format!("{label}: chain link and recovery residuals"),
        worst: link,
        tol: 1e-7,
    });

    // transport the principal curvature along u and compare with the
    // closed form
    let theta = fam.params().theta;
    let cot = theta.cos() / theta.sin();
    let v0 = 0.5;
    let u0 = dom.u.0 + 0.2 * (dom.u.1 - dom.u.0);
    let f = |u: f64, s: f64| {
        let (sa, _) = fam.alpha_sincos(u);
        -cot * (s + 2.0 * sa * theta.sin()) * (s - sa * theta.sin())
    };
    let start = fam.sigma_closed(u0, v0)?;
    let traj = ode_rk4(f, u0, start, dom.u.1, 2000)?;
    let mut transport: f64 = 0.0;
    for (u, s) in traj.iter().step_by(200) {
        transport = transport.max((s - fam.sigma_closed(*u, v0)?).abs());
    }
    lines.push(Line {
        name: format!("{label}: transported curvature matches closed form"),
        worst: transport,
        tol: 1e-6,
    });

    // generating curve is unit speed
    let mut speed: f64 = 0.0;
    for i in 0..200 {
        let u = dom.u.0 + (dom.u.1 - dom.u.0) * i as f64 / 199.0;
        let base = fam.gamma2(u)?;
        let d = fam.gamma2_deriv(u);
        let n = TangentVec::new(base, d[0], d[1], d[2]).norm();
        speed = speed.max((n - 1.0).abs());
    }
    lines.push(Line {
        name: format!("{label}: generating curve is unit speed"),
        worst: speed,
        tol: 1e-7,
    });
    Ok(())
}

/// Built-in self-check battery over every family plus the ambient sanity
/// checks. Prints one line per check; returns whether all passed.
pub fn report() -> Result<bool> {
    let mut lines = Vec::new();

    for c in invariant_battery(1000, 0x5eed) {
        lines.push(Line {
            name: format!("ambient: {}", c.name),
            worst: c.worst,
            tol: 1e-10,
        });
    }

    let square = Domain::new((-1.0, 1.0), (-1.0, 1.0));

    push_verify(
        &mut lines,
        "leaf x0=2",
        &leaf(2.0, square),
        &expect_opts(1.0, Some(-1.0), Some(0.0)),
    )?;

    for (label, theta) in [
        ("slant pi/6", PI / 6.0),
        ("slant pi/4", PI / 4.0),
        ("slant pi/3", PI / 3.0),
    ] {
        push_verify(
            &mut lines,
            label,
            &slant(theta, square)?,
            &expect_opts(theta.cos(), Some(-theta.cos().powi(2)), Some(0.0)),
        )?;
    }

    let linear = cylinder(&AlphaProfile::Linear, square)?;
    push_verify(&mut lines, "cylinder linear", &linear, &expect_opts(0.0, None, None))?;
    lines.push(Line {
        name: "cylinder linear: mixed second form vanishes".into(),
        worst: mixed_second_form_max(&linear, (15, 15))?,
        tol: 1e-8,
    });

    let constant = cylinder(&AlphaProfile::Constant(0.6), square)?;
    push_verify(
        &mut lines,
        "cylinder constant",
        &constant,
        &expect_opts(0.0, None, Some(0.0)),
    )?;

    let umb_dom = Domain::new((-2.0, 2.0), (-1.0, 1.0));
    let umbilic = cylinder(&AlphaProfile::Umbilic, umb_dom)?;
    push_verify(&mut lines, "cylinder umbilic", &umbilic, &expect_opts(0.0, None, None))?;
    lines.push(Line {
        name: "cylinder umbilic: mixed second form vanishes".into(),
        worst: mixed_second_form_max(&umbilic, (15, 15))?,
        tol: 1e-8,
    });
    let mut gap: f64 = 0.0;
    let mut min_abs: f64 = f64::INFINITY;
    for (u, v) in umb_dom.grid(15, 15) {
        let jet = umbilic.jet(u, v, JetMode::Auto)?;
        let (k1, k2) = principal_curvatures(&jet)?;
        gap = gap.max((k1 - k2).abs());
        min_abs = min_abs.min(k1.abs().min(k2.abs()));
    }
    lines.push(Line {
        name: "cylinder umbilic: principal curvatures coincide".into(),
        worst: gap,
        tol: 1e-6,
    });
    lines.push(Line {
        name: "cylinder umbilic: curvature bounded away from zero".into(),
        worst: (0.02 - min_abs).max(0.0),
        tol: 0.0,
    });

    for (label, sign) in [("general plus", Sign::Plus), ("general minus", Sign::Minus)] {
        general_lines(&mut lines, label, &general_sample(sign)?)?;
    }
    general_lines(&mut lines, "general flat", &general_flat()?)?;

    // minimality trichotomy: exactly the leaf, the slant family, and the
    // constant-profile cylinders are minimal
    let mut wrong = 0.0;
    for (surface, want) in [
        (leaf(0.0, square), true),
        (slant(PI / 3.0, square)?, true),
        (cylinder(&AlphaProfile::Constant(0.6), square)?, true),
        (cylinder(&AlphaProfile::Linear, square)?, false),
        (general_sample(Sign::Plus)?.surface(), false),
    ] {
        let verdict = classify_minimal(&surface, (15, 15), 1e-8)?;
        if verdict.minimal != want {
            wrong += 1.0;
        }
    }
    lines.push(Line {
        name: "minimality trichotomy matches classification".into(),
        worst: wrong,
        tol: 0.0,
    });

    let mut all = true;
    for l in &lines {
        let passed = l.worst <= l.tol;
        all &= passed;
        println!(
            "{}  {}: worst {:.3e} (tol {:.1e})",
            if passed { "pass" } else { "FAIL" },
            l.name,
            l.worst,
            l.tol,
        );
    }
    println!("result: {}", if all { "pass" } else { "FAIL" });
    Ok(all)
}
