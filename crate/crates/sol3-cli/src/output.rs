//! Text artifact writers: meshes, CSV sweeps, and polylines.
//!
//! Every writer renders floating-point values with the shortest decimal
//! that round-trips, so output files are byte-identical across runs.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sol3::surface::{gauss_curvature, mean_curvature, normal_angle, JetMode, ParamSurface};

/// Default output directory: $SOL3_OUT_DIR, or the working directory.
pub fn out_dir() -> PathBuf {
    std::env::var_os("SOL3_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        out_dir().join(path)
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

/// Send text to the resolved output path, or to stdout for `-`/absent.
pub fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(p) if p.as_os_str() == "-" => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(p) => write_file(&resolve_out(p), text),
    }
}

/// Where the Euclidean-preview mesh lands, given the primary output target.
pub fn preview_path(out: Option<&Path>) -> PathBuf {
    match out {
        None => out_dir().join("preview.obj"),
        Some(p) if p.as_os_str() == "-" => out_dir().join("preview.obj"),
        Some(p) => {
            let p = resolve_out(p);
            let mut name = p.file_name().unwrap_or_default().to_os_string();
            name.push(".preview.obj");
            p.with_file_name(name)
        }
    }
}

fn finite_coords(p: &sol3::ambient::Point3, u: f64, v: f64) -> Result<[f64; 3]> {
    let c = p.coords();
    if c.iter().any(|x| !x.is_finite()) {
        bail!("non-finite vertex at (u, v) = ({u}, {v})");
    }
    Ok(c)
}

/// Vertex grid plus quad connectivity, in the `v x y z` / `f a b c d`
/// plain-text form. Vertices walk the grid u-major; face indices are 1-based.
pub fn mesh_text(surface: &ParamSurface, grid: (usize, usize), header: &str) -> Result<String> {
    let (nu, nv) = grid;
    let mut s = String::new();
    let _ = writeln!(s, "# sol3 mesh {header}");
    for (u, v) in surface.domain().grid(nu, nv) {
        let [x, y, z] = finite_coords(&surface.map(u, v), u, v)?;
        let _ = writeln!(s, "v {x} {y} {z}");
    }
    for iu in 0..nu - 1 {
        for iv in 0..nv - 1 {
            let a = iu * nv + iv + 1;
            let b = (iu + 1) * nv + iv + 1;
            let c = (iu + 1) * nv + iv + 2;
            let d = iu * nv + iv + 2;
            let _ = writeln!(s, "f {a} {b} {c} {d}");
        }
    }
    Ok(s)
}

/// Per-sample sweep: position, normal angle, and both curvatures.
pub fn csv_text(surface: &ParamSurface, grid: (usize, usize)) -> Result<String> {
    let mut s = String::from("u,v,x,y,z,theta,K,H\n");
    for (u, v) in surface.domain().grid(grid.0, grid.1) {
        let [x, y, z] = finite_coords(&surface.map(u, v), u, v)?;
        let jet = surface
            .jet(u, v, JetMode::Auto)
            .with_context(|| format!("jet at (u, v) = ({u}, {v})"))?;
        let theta = normal_angle(&jet)?;
        let k = gauss_curvature(&jet)?;
        let h = mean_curvature(&jet)?;
        let _ = writeln!(s, "{u},{v},{x},{y},{z},{theta},{k},{h}");
    }
    Ok(s)
}

/// Polyline along u at the middle of the v-range: `v` lines plus one `l`
/// element connecting them in order.
pub fn curve_text(surface: &ParamSurface, samples: usize, header: &str) -> Result<String> {
    let n = samples.max(2);
    let dom = surface.domain();
    let vmid = 0.5 * (dom.v.0 + dom.v.1);
    let mut s = String::new();
    let _ = writeln!(s, "# sol3 curve {header}");
    for i in 0..n {
        let u = dom.u.0 + (dom.u.1 - dom.u.0) * i as f64 / (n - 1) as f64;
        let [x, y, z] = finite_coords(&surface.map(u, vmid), u, vmid)?;
        let _ = writeln!(s, "v {x} {y} {z}");
    }
    let _ = write!(s, "l");
    for i in 1..=n {
        let _ = write!(s, " {i}");
    }
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sol3::families;
    use sol3::surface::Domain;

    #[test]
    fn mesh_counts_and_indices() {
        let s = families::leaf(0.0, Domain::new((-1.0, 1.0), (-1.0, 1.0)));
        let text = mesh_text(&s, (4, 3), "t").unwrap();
        let verts = text.lines().filter(|l| l.starts_with("v ")).count();
        let faces: Vec<&str> = text.lines().filter(|l| l.starts_with("f ")).collect();
        assert_eq!(verts, 12);
        assert_eq!(faces.len(), 6);
        for f in faces {
            for idx in f.split_whitespace().skip(1) {
                let i: usize = idx.parse().unwrap();
                assert!(i >= 1 && i <= verts);
            }
        }
    }

    #[test]
    fn csv_header_and_leaf_values() {
        let s = families::leaf(2.0, Domain::new((-1.0, 1.0), (-1.0, 1.0)));
        let text = csv_text(&s, (2, 2)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "u,v,x,y,z,theta,K,H");
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[2], "2"); // x = x0 exactly
        let k: f64 = first[6].parse().unwrap();
        assert!((k + 1.0).abs() < 1e-6);
    }

    #[test]
    fn curve_is_a_single_polyline() {
        let s = families::leaf(0.0, Domain::new((0.0, 1.0), (-1.0, 1.0)));
        let text = curve_text(&s, 5, "t").unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 5);
        assert_eq!(text.lines().last().unwrap(), "l 1 2 3 4 5");
    }
}
